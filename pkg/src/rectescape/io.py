"""JSON instance and solution files.

Serialization is canonical (fixed key order, two-space indent, trailing
newline) so that write -> read -> write is byte-stable.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

from .geometry import (Boundary, DensityReport, EscapeAssignment, GeometryError, Instance, Rect,
                       RepInstance, SepInstance)


def instance_to_dict(inst: Instance) -> Dict[str, Any]:
    b = {"width": inst.boundary.width, "height": inst.boundary.height}
    if isinstance(inst, SepInstance):
        return {"type": "sep", "boundary": b, "points": [[x, y] for x, y in inst.points]}
    return {
        "type": "rep",
        "boundary": b,
        "disjoint": inst.disjoint,
        "rectangles": [{"x1": r.x1, "y1": r.y1, "x2": r.x2, "y2": r.y2} for r in inst.rects],
    }


def instance_from_dict(d: Dict[str, Any]) -> Instance:
    try:
        kind = d["type"]
        b = Boundary(int(d["boundary"]["width"]), int(d["boundary"]["height"]))
        if kind == "sep":
            return SepInstance(b, tuple((int(p[0]), int(p[1])) for p in d["points"]))
        if kind == "rep":
            rects = tuple(Rect(int(r["x1"]), int(r["y1"]), int(r["x2"]), int(r["y2"]))
                          for r in d["rectangles"])
            return RepInstance(b, rects, disjoint=bool(d.get("disjoint", False)))
    except (KeyError, TypeError, IndexError) as exc:
        raise GeometryError(f"malformed instance: {exc!r}") from None
    raise GeometryError(f"unknown instance type {d.get('type')!r}")


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def write_instance(inst: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(instance_to_dict(inst)))


def read_instance(path: Union[str, Path]) -> Instance:
    return instance_from_dict(json.loads(Path(path).read_text()))


def solution_to_dict(a: EscapeAssignment, report: DensityReport,
                     extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    d = {"directions": a.names(), "density": report.density,
         "boundary_density": report.boundary_density}
    if extra:
        d.update(extra)
    return d


def write_solution(path, a: EscapeAssignment, report: DensityReport, extra=None) -> None:
    Path(path).write_text(dumps(solution_to_dict(a, report, extra)))


def read_solution(path) -> Dict[str, Any]:
    d = json.loads(Path(path).read_text())
    if not isinstance(d, dict) or not isinstance(d.get("directions"), list):
        raise GeometryError("solution file has no 'directions' list")
    return d
