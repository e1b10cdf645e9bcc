"""JSON file formats for fans, morphisms, functions, classes and closures.

All files are UTF-8 JSON.  Cone keys are comma-joined sorted ray indices
("" for the zero cone).  Morphism, function, class and closure files refer
to their fan file by a path relative to their own location.

    fan       {"name": "P2", "dim": 2, "rays": [[1,0],[0,1],[-1,-1]],
               "max_cones": [[0,1],[1,2],[0,2]]}
    morphism  {"source": "blp2.fan.json", "target": "p2.fan.json",
               "matrix": [[1,0],[0,1]]}        # rows = target dim
    function  {"fan": "p2.fan.json", "values": {"": 1, "0": 1}}
    class     {"fan": "p2.fan.json", "coefficients": {"0,1": 3}}
    closure   {"fan": "p2.fan.json", "boundary_rays": [2]}
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .chow import CycleClass
from .constructible import ConstructibleFunction
from .csm import GoodClosure
from .errors import ParseError, ValidationError
from .fans import Cone, Fan, ToricMorphism, make_fan
from .lattice import LatticeMatrix


def _read_json(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected a JSON object")
    return obj


def _require(obj: dict, key: str, path: Path):
    if key not in obj:
        raise ParseError(f"{path}: missing key {key!r}")
    return obj[key]


def parse_cone_key(key: str) -> Cone:
    try:
        return Cone.from_key(key)
    except (ValueError, ValidationError) as exc:
        raise ParseError(f"bad cone key {key!r}: {exc}") from exc


def load_fan(path: str | Path) -> Fan:
    path = Path(path)
    obj = _read_json(path)
    name = obj.get("name", path.stem.removesuffix(".fan"))
    dim = _require(obj, "dim", path)
    rays = _require(obj, "rays", path)
    max_cones = _require(obj, "max_cones", path)
    try:
        return make_fan(str(name), int(dim), [tuple(r) for r in rays],
                        [tuple(c) for c in max_cones])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed fan data: {exc}") from exc


def load_validated_fan(path: str | Path) -> Fan:
    fan = load_fan(path)
    if not fan.is_valid:
        raise ValidationError(f"{path}: invalid fan:\n{fan.report.summary()}")
    return fan


def fan_to_obj(fan: Fan) -> dict:
    return {
        "name": fan.name,
        "dim": fan.dim,
        "rays": [list(r.entries) for r in fan.rays],
        "max_cones": [list(c.ray_indices) for c in fan.maximal_cones],
    }


def _fan_json_text(fan: Fan) -> str:
    rays = ",\n    ".join(json.dumps(list(r.entries)) for r in fan.rays)
    maxes = ",\n    ".join(json.dumps(list(c.ray_indices)) for c in fan.maximal_cones)
    return (
        "{\n"
        f'  "name": {json.dumps(fan.name)},\n'
        f'  "dim": {fan.dim},\n'
        f'  "rays": [\n    {rays}\n  ],\n'
        f'  "max_cones": [\n    {maxes}\n  ]\n'
        "}\n"
    ) if fan.rays else (
        "{\n"
        f'  "name": {json.dumps(fan.name)},\n'
        f'  "dim": {fan.dim},\n'
        '  "rays": [],\n'
        f'  "max_cones": [\n    {maxes}\n  ]\n'
        "}\n"
    )


def save_fan(fan: Fan, path: str | Path) -> None:
    Path(path).write_text(_fan_json_text(fan), encoding="utf-8")


def load_morphism(path: str | Path) -> ToricMorphism:
    path = Path(path)
    obj = _read_json(path)
    source = load_validated_fan(path.parent / _require(obj, "source", path))
    target = load_validated_fan(path.parent / _require(obj, "target", path))
    matrix = _require(obj, "matrix", path)
    try:
        m = LatticeMatrix.from_rows([list(row) for row in matrix], cols=source.dim)
    except (TypeError, ValueError, ValidationError) as exc:
        raise ParseError(f"{path}: malformed matrix: {exc}") from exc
    if m.rows != target.dim:
        raise ValidationError(
            f"{path}: matrix has {m.rows} rows, target dimension is {target.dim}")
    return ToricMorphism(source, target, m)


def morphism_to_obj(m: ToricMorphism, source_file: str, target_file: str) -> dict:
    return {
        "source": source_file,
        "target": target_file,
        "matrix": m.matrix.to_lists(),
    }


def save_morphism(m: ToricMorphism, path: str | Path,
                  source_file: str, target_file: str) -> None:
    rows = ",\n    ".join(json.dumps(r) for r in m.matrix.to_lists())
    matrix = f"[\n    {rows}\n  ]" if m.matrix.rows else "[]"
    text = (
        "{\n"
        f'  "source": {json.dumps(source_file)},\n'
        f'  "target": {json.dumps(target_file)},\n'
        f'  "matrix": {matrix}\n'
        "}\n"
    )
    Path(path).write_text(text, encoding="utf-8")


def _load_cone_map(obj: dict, key: str, fan: Fan, path: Path) -> dict[Cone, int]:
    raw = _require(obj, key, path)
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: {key!r} must be an object")
    out: dict[Cone, int] = {}
    for cone_key, value in raw.items():
        cone = parse_cone_key(cone_key)
        if cone not in fan.cones:
            raise ValidationError(f"{path}: cone {cone_key!r} is not in fan {fan.name}")
        if not isinstance(value, int):
            raise ParseError(f"{path}: value for cone {cone_key!r} is not an integer")
        out[cone] = value
    return out


def load_function(path: str | Path) -> ConstructibleFunction:
    path = Path(path)
    obj = _read_json(path)
    fan = load_validated_fan(path.parent / _require(obj, "fan", path))
    return ConstructibleFunction(fan, _load_cone_map(obj, "values", fan, path))


def load_class(path: str | Path) -> CycleClass:
    path = Path(path)
    obj = _read_json(path)
    fan = load_validated_fan(path.parent / _require(obj, "fan", path))
    return CycleClass(fan, _load_cone_map(obj, "coefficients", fan, path))


def load_function_or_class(path: str | Path):
    """Dispatch on the payload key: "values" means a constructible function,
    "coefficients" a cycle class."""
    obj = _read_json(Path(path))
    if "values" in obj:
        return load_function(path)
    if "coefficients" in obj:
        return load_class(path)
    raise ParseError(f"{path}: expected a 'values' or 'coefficients' key")


def load_closure(path: str | Path) -> GoodClosure:
    path = Path(path)
    obj = _read_json(path)
    fan = load_validated_fan(path.parent / _require(obj, "fan", path))
    rays = _require(obj, "boundary_rays", path)
    if not isinstance(rays, list) or not all(isinstance(i, int) for i in rays):
        raise ParseError(f"{path}: 'boundary_rays' must be a list of integers")
    return GoodClosure(fan, frozenset(rays))


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()[:12]
