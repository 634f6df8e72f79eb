"""Text mesh format and JSON sidecar.

Mesh file grammar (UTF-8, one record per line, `#` starts a comment):

    v <x> <y> <z>        vertex position (floats, 64-bit)
    g <name>             starts a subgroup; following `t` lines belong to it
    t <i> <j> <k>        triangle as 0-based vertex indices (right-hand rule
                         winding; normals are authoritative)

Every triangle must appear after a `g` line; repeating a group name appends
to the existing subgroup. The upright axis is +Y.

The sidecar `<stem>.json` next to `<stem>.mesh` is a JSON object with
optional keys:

    labels:    {subgroup name: part label string}
    hierarchy: {subgroup name: parent group name}
    colors:    [[r, g, b], ...] per vertex, values in [0, 1]

A missing sidecar is allowed (the building is simply unlabeled).
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from .labels import UNLABELED, label_from_name, label_name
from .model import Building, ParseError, Subgroup, ValidationError

log = logging.getLogger(__name__)

MESH_SUFFIX = ".mesh"


def sidecar_path(path: str | Path) -> Path:
    return Path(path).with_suffix(".json")


def load_building(path: str | Path) -> Building:
    """Parse and validate a building; attach sidecar labels/colors if present."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"mesh file not found: {path}")
    vertices: list[list[float]] = []
    group_names: list[str] = []
    group_tris: dict[str, list[int]] = {}
    triangles: list[list[int]] = []
    current: str | None = None
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind, args = tokens[0], tokens[1:]
        try:
            if kind == "v":
                if len(args) != 3:
                    raise ParseError("vertex line needs 3 coordinates")
                vertices.append([float(x) for x in args])
            elif kind == "g":
                if len(args) != 1:
                    raise ParseError("group line needs exactly one name")
                current = args[0]
                if current not in group_tris:
                    group_names.append(current)
                    group_tris[current] = []
            elif kind == "t":
                if len(args) != 3:
                    raise ParseError("triangle line needs 3 indices")
                if current is None:
                    raise ParseError("triangle before any group line")
                group_tris[current].append(len(triangles))
                triangles.append([int(x) for x in args])
            else:
                raise ParseError(f"unknown record {kind!r}")
        except (ValueError, ParseError) as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None

    subgroups = [Subgroup(name=n, triangle_ids=np.array(group_tris[n], dtype=int))
                 for n in group_names]
    building = Building(
        name=path.stem,
        vertices=np.array(vertices, dtype=float).reshape(-1, 3),
        triangles=np.array(triangles, dtype=int).reshape(-1, 3),
        subgroups=subgroups,
    )

    side = sidecar_path(path)
    if side.exists():
        _apply_sidecar(building, side)
    else:
        log.warning("no sidecar for %s; labels absent", path.name)
    building.validate()
    return building


def _apply_sidecar(building: Building, side: Path) -> None:
    try:
        doc = json.loads(side.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{side}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{side}: sidecar must be a JSON object")
    names = {sub.name: sid for sid, sub in enumerate(building.subgroups)}
    labels = doc.get("labels", {})
    for name, value in labels.items():
        if name not in names:
            raise ValidationError(f"{side}: label for unknown subgroup {name!r}")
        building.labels[names[name]] = label_from_name(value)
    hierarchy = doc.get("hierarchy", {})
    for name in hierarchy:
        if name not in names:
            raise ValidationError(f"{side}: hierarchy entry for unknown subgroup {name!r}")
    building.hierarchy = dict(hierarchy)
    colors = doc.get("colors")
    if colors is not None:
        arr = np.asarray(colors, dtype=float)
        if arr.shape != (len(building.vertices), 3):
            raise ValidationError(f"{side}: colors must be one RGB triple per vertex")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValidationError(f"{side}: color components must lie in [0, 1]")
        building.colors = arr


def _fmt(x: float) -> str:
    return repr(float(x))


def save_building(path: str | Path, building: Building) -> Path:
    """Write mesh plus sidecar. Floats use shortest round-trip formatting."""
    path = Path(path)
    if path.suffix != MESH_SUFFIX:
        path = path.with_suffix(MESH_SUFFIX)
    lines = [f"# {building.name}"]
    for v in building.vertices:
        lines.append(f"v {_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}")
    for sub in building.subgroups:
        lines.append(f"g {sub.name}")
        for t in sub.triangle_ids:
            a, b, c = building.triangles[t]
            lines.append(f"t {a} {b} {c}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    doc: dict = {}
    labeled = {sub.name: label_name(int(building.labels[sid]))
               for sid, sub in enumerate(building.subgroups)
               if building.labels[sid] != UNLABELED}
    if labeled:
        doc["labels"] = labeled
    if building.hierarchy:
        doc["hierarchy"] = building.hierarchy
    if building.colors is not None:
        doc["colors"] = [[_fmt_color(c) for c in row] for row in building.colors]
    side = sidecar_path(path)
    if doc:
        side.write_text(json.dumps(doc, indent=1, sort_keys=True), encoding="utf-8")
    elif side.exists():
        side.unlink()
    return path


def _fmt_color(x: float) -> float:
    return float(x)
