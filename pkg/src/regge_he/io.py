"""File formats: JSON mesh and surface-metric inputs, OBJ geometry, JSON reports.

3-manifold file::

    {"tets": [[v, v, v, v], ...], "lengths": [{"edge": [a, b], "l": x}, ...]}

surface-metric file::

    {"triangles": [[v, v, v], ...], "lengths": [{"edge": [a, b], "l": x}, ...]}

polyhedron file (or a Wavefront OBJ with triangular faces)::

    {"vertices": [[x, y, z], ...], "faces": [[i, j, k], ...], "star_point": [x, y, z]}

Vertex indices are 0-based in JSON and 1-based in OBJ.
"""

import json
import math

import numpy as np

from .errors import InputError
from .mesh import build_complex, edge_key, lengths_from_mapping, make_surface, orient_faces
from .polyhedra import EmbeddedPolyhedron


class ParseError(InputError):
    pass


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _int_list(value, size, where):
    if not isinstance(value, list) or len(value) != size:
        raise ParseError(f"field {where}: expected a list of {size} integers")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ParseError(f"field {where}: expected integers, got {v!r}")
        out.append(v)
    return out


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ParseError(f"field {where}: expected a finite number, got {value!r}")
    return float(value)


def _cells(doc, key, size):
    if not isinstance(doc, dict) or key not in doc:
        raise ParseError(f"missing field '{key}'")
    cells = doc[key]
    if not isinstance(cells, list) or not cells:
        raise ParseError(f"field {key}: expected a nonempty list")
    return [_int_list(c, size, f"{key}[{n}]") for n, c in enumerate(cells)]


def _lengths(doc):
    if "lengths" not in doc:
        raise ParseError("missing field 'lengths'")
    items = doc["lengths"]
    if not isinstance(items, list):
        raise ParseError("field lengths: expected a list")
    out = {}
    for n, item in enumerate(items):
        if not isinstance(item, dict) or "edge" not in item or "l" not in item:
            raise ParseError(f"field lengths[{n}]: expected {{\"edge\": [a, b], \"l\": x}}")
        a, b = _int_list(item["edge"], 2, f"lengths[{n}].edge")
        key = edge_key(a, b)
        if key in out:
            raise ParseError(f"field lengths[{n}]: duplicate edge {list(key)}")
        out[key] = _number(item["l"], f"lengths[{n}].l")
    return out


def parse_mesh(doc):
    tets = _cells(doc, "tets", 4)
    t3 = build_complex(tets)
    return t3, lengths_from_mapping(t3, _lengths(doc))


def parse_surface(doc):
    return make_surface(_cells(doc, "triangles", 3), _lengths(doc))


def load_mesh(path):
    return parse_mesh(read_json(path))


def load_surface(path):
    return parse_surface(read_json(path))


def mesh_document(t3, lengths):
    return {
        "tets": [list(t) for t in t3.tets],
        "lengths": [{"edge": list(e), "l": float(l)} for e, l in zip(t3.edges, lengths)],
    }


def surface_document(surface):
    return {
        "triangles": [list(t) for t in surface.triangles],
        "lengths": [{"edge": list(e), "l": float(surface.lengths[e])} for e in surface.edges],
    }


def load_polyhedron(path):
    if str(path).lower().endswith(".obj"):
        points, faces = read_obj(path)
        star = None
    else:
        doc = read_json(path)
        if not isinstance(doc, dict) or "vertices" not in doc:
            raise ParseError("missing field 'vertices'")
        verts = doc["vertices"]
        if not isinstance(verts, list) or not verts:
            raise ParseError("field vertices: expected a nonempty list")
        points = []
        for n, v in enumerate(verts):
            if not isinstance(v, list) or len(v) != 3:
                raise ParseError(f"field vertices[{n}]: expected 3 numbers")
            points.append([_number(x, f"vertices[{n}]") for x in v])
        faces = _cells(doc, "faces", 3)
        star = doc.get("star_point")
        if star is not None:
            if not isinstance(star, list) or len(star) != 3:
                raise ParseError("field star_point: expected 3 numbers")
            star = [_number(x, "star_point") for x in star]
    points = np.array(points, dtype=float)
    if max(max(f) for f in faces) >= len(points) or min(min(f) for f in faces) < 0:
        raise ParseError("face index out of range")
    a = points.mean(axis=0) if star is None else np.array(star)
    faces = orient_faces(faces, points - a)
    return EmbeddedPolyhedron(points=points, faces=faces, star_point=a, name=str(path))


def read_obj(path):
    points, faces = [], []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    with fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            try:
                if parts[0] == "v":
                    points.append([float(x) for x in parts[1:4]])
                elif parts[0] == "f":
                    idx = [int(p.split("/")[0]) - 1 for p in parts[1:]]
                    if len(idx) != 3:
                        raise ValueError("only triangular faces are supported")
                    faces.append(idx)
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
    if not points or not faces:
        raise ParseError(f"{path}: no vertices or faces")
    return points, faces


def fmt(x):
    return format(float(x), ".17g")


def obj_text(points, triangles):
    lines = [f"v {fmt(p[0])} {fmt(p[1])} {fmt(p[2])}" for p in points]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in triangles]
    return "\n".join(lines) + "\n"


def dumps(obj, indent=2):
    """JSON with every float printed to 17 significant digits."""
    return _dump(obj, indent, 0)


def _dump(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return json.dumps(str(x))
        return fmt(x)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_dump(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _dump(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")
