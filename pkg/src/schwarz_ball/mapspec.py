"""Map-spec and points files, and the command-line complex syntax."""

from __future__ import annotations

import json
import re

import numpy as np

from .errors import InputError
from .holomap import FORMAT_VERSION, MapSpecError, from_dict
from .pluriharmonic import PluriharmonicFn

_COMPLEX = re.compile(r"^[0-9eE.+\-ij ]+$")


def parse_complex(text):
    """``"0.3+0.1i"`` (or with ``j``) to a Python complex."""
    s = text.strip().replace(" ", "")
    if not s or not _COMPLEX.match(s):
        raise InputError(f"not a complex number: {text!r}")
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise InputError(f"not a complex number: {text!r}") from None


def parse_cvector(text):
    """Comma-separated coordinates, e.g. ``"0.3+0.1i,0.2"``."""
    parts = text.split(",")
    return np.array([parse_complex(p) for p in parts], dtype=np.complex128)


def map_document(f, certify=None):
    """Versioned map-spec document for a tree or pluriharmonic function."""
    doc = {"version": FORMAT_VERSION, "map": f.to_dict()}
    if certify is not None:
        doc["certify"] = certify
    return doc


def parse_map_document(doc):
    """Return ``(expr_or_pluriharmonic, certify_options)``."""
    if not isinstance(doc, dict):
        raise MapSpecError("$", "expected a JSON object")
    version = doc.get("version")
    if version != FORMAT_VERSION:
        raise MapSpecError("$.version", f"unsupported version {version!r}, expected {FORMAT_VERSION}")
    if "map" not in doc:
        raise MapSpecError("$.map", "missing field")
    node = doc["map"]
    if isinstance(node, dict) and node.get("kind") == "pluriharmonic":
        if "b" not in node:
            raise MapSpecError("$.map.b", "missing field")
        b = from_dict(node["b"], "$.map.b")
        try:
            f = PluriharmonicFn(b)
        except InputError as exc:
            raise MapSpecError("$.map.b", str(exc)) from exc
    else:
        f = from_dict(node, "$.map")
    certify = doc.get("certify", {})
    if not isinstance(certify, dict):
        raise MapSpecError("$.certify", "expected an object")
    for key in certify:
        if key not in ("samples", "seed"):
            raise MapSpecError(f"$.certify.{key}", "unknown option")
        v = certify[key]
        if not isinstance(v, int) or isinstance(v, bool) or v < (1 if key == "samples" else 0):
            raise MapSpecError(f"$.certify.{key}", f"bad value {v!r}")
    return f, certify


def _load_json(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MapSpecError(f"{what}:{exc.lineno}:{exc.colno}", exc.msg) from exc


def loads_map(text):
    return parse_map_document(_load_json(text, "map"))


def dumps_map(f, certify=None):
    return json.dumps(map_document(f, certify), indent=2) + "\n"


def parse_points(obj):
    """A JSON array of points; each is a list of ``[re, im]``/numbers or a CLI string."""
    if not isinstance(obj, list) or not obj:
        raise MapSpecError("$", "expected a non-empty array of points")
    pts = []
    for i, p in enumerate(obj):
        path = f"$[{i}]"
        if isinstance(p, str):
            try:
                pts.append(parse_cvector(p))
            except InputError as exc:
                raise MapSpecError(path, str(exc)) from exc
            continue
        if not isinstance(p, list) or not p:
            raise MapSpecError(path, "expected a list of coordinates or a string")
        coords = []
        for j, c in enumerate(p):
            if isinstance(c, (int, float)) and not isinstance(c, bool):
                coords.append(complex(c))
            elif isinstance(c, list) and len(c) == 2 and all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in c
            ):
                coords.append(complex(c[0], c[1]))
            else:
                raise MapSpecError(f"{path}[{j}]", f"bad coordinate {c!r}")
        pts.append(np.array(coords, dtype=np.complex128))
    if len({len(p) for p in pts}) != 1:
        raise MapSpecError("$", "points have different dimensions")
    return pts


def loads_points(text):
    return parse_points(_load_json(text, "points"))
