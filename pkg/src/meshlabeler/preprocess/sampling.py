"""Surface point sampling and the point-set binary format.

Sampling is Poisson-disk by dart throwing: candidates are drawn
area-proportionally at 4x the budget, then thinned greedily with a hash-grid
so accepted points keep a minimum spacing of

    r = sqrt(total_area / (pi * budget)) * 0.7

If greedy thinning cannot reach the budget, the radius shrinks by 0.7 per
extra pass over the leftover candidates; as a last resort remaining
candidates are taken as-is (plain area-weighted sampling) with a warning.
Everything is a pure function of (mesh, budget, seed).

Binary layout (little-endian): magic b"MLPT", u32 version, u32 count,
u32 flags (bit 0: colors present), then per point f4 position[3],
f4 normal[3], [f4 color[3]], u32 triangle id, u32 subgroup id.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..mesh.model import Building

log = logging.getLogger(__name__)

MAGIC = b"MLPT"
VERSION = 1
RELAXATION = 0.7
OVERSAMPLE = 4


@dataclass
class PointSet:
    positions: np.ndarray        # (P, 3) float64
    normals: np.ndarray          # (P, 3) unit
    triangle_ids: np.ndarray     # (P,) int
    subgroup_ids: np.ndarray     # (P,) int
    colors: np.ndarray | None = None   # (P, 3) in [0, 1]

    def __len__(self) -> int:
        return len(self.positions)


def _sample_on_triangles(vertices: np.ndarray, triangles: np.ndarray,
                         tri_ids: np.ndarray, rng: np.random.Generator
                         ) -> tuple[np.ndarray, np.ndarray]:
    corners = vertices[triangles[tri_ids]]
    r1 = np.sqrt(rng.random(len(tri_ids)))
    r2 = rng.random(len(tri_ids))
    weights = np.stack([1.0 - r1, r1 * (1.0 - r2), r1 * r2], axis=1)
    return np.einsum("pk,pkd->pd", weights, corners), weights


def _grid_thin(points: np.ndarray, radius: float, budget: int,
               already: list[int], grid: dict, candidates: np.ndarray) -> list[int]:
    """Greedy acceptance at min spacing `radius`; mutates `already`/`grid`."""
    r2 = radius * radius
    inv = 1.0 / radius if radius > 0.0 else 0.0
    leftover = []
    for ci in candidates:
        p = points[ci]
        cell = (int(np.floor(p[0] * inv)), int(np.floor(p[1] * inv)), int(np.floor(p[2] * inv)))
        ok = True
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for dz in (-1, 0, 1):
                    for aj in grid.get((cell[0] + dx, cell[1] + dy, cell[2] + dz), ()):
                        d = points[aj] - p
                        if d @ d < r2:
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            already.append(int(ci))
            grid.setdefault(cell, []).append(int(ci))
            if len(already) >= budget:
                return leftover
        else:
            leftover.append(int(ci))
    return leftover


def sample_points(building: Building, budget: int, seed: int) -> PointSet:
    """Poisson-disk samples with normals from source triangles."""
    if budget == 0:
        empty3 = np.zeros((0, 3))
        return PointSet(empty3, empty3.copy(), np.zeros(0, int), np.zeros(0, int),
                        None if building.colors is None else np.zeros((0, 3)))
    areas = building.triangle_areas()
    total = float(areas.sum())
    if total <= 0.0:
        raise ValueError(f"{building.name}: cannot sample, total surface area is zero")
    if budget < 0:
        raise ValueError("budget must be non-negative")

    rng = np.random.default_rng([seed, 0x5A311])
    n_cand = budget * OVERSAMPLE
    prob = areas / total
    tri_ids = rng.choice(len(areas), size=n_cand, p=prob)
    positions, bary = _sample_on_triangles(building.vertices, building.triangles, tri_ids, rng)

    radius = np.sqrt(total / (np.pi * budget)) * RELAXATION
    accepted: list[int] = []
    grid: dict = {}
    pending = np.arange(n_cand)
    r = radius
    while len(accepted) < budget and len(pending) and r > 1e-9 * max(building.scene_diagonal(), 1.0):
        pending = np.array(_grid_thin(positions, r, budget, accepted, grid, pending), dtype=int)
        if len(accepted) >= budget:
            break
        r *= RELAXATION
        grid = _rebuild_grid(positions, accepted, r)
    if len(accepted) < budget:
        short = budget - len(accepted)
        if len(pending) < short:
            log.warning("%s: budget %d exceeds candidate pool, falling back to "
                        "plain area-weighted sampling", building.name, budget)
            extra_ids = rng.choice(len(areas), size=short - len(pending), p=prob)
            extra_pos, extra_bary = _sample_on_triangles(building.vertices, building.triangles,
                                                         extra_ids, rng)
            positions = np.concatenate([positions, extra_pos])
            bary = np.concatenate([bary, extra_bary])
            tri_ids = np.concatenate([tri_ids, extra_ids])
            pending = np.concatenate([pending, np.arange(n_cand, n_cand + len(extra_ids))])
        accepted.extend(int(i) for i in pending[:short])

    idx = np.array(accepted[:budget], dtype=int)
    pos = positions[idx]
    tids = tri_ids[idx]
    normals = building.triangle_normals()[tids]
    colors = None
    if building.colors is not None:
        corner_colors = building.colors[building.triangles[tids]]
        colors = np.einsum("pk,pkd->pd", bary[idx], corner_colors)
    return PointSet(pos, normals, tids, building.triangle_subgroup[tids], colors)


def _rebuild_grid(points: np.ndarray, accepted: list[int], radius: float) -> dict:
    grid: dict = {}
    inv = 1.0 / radius if radius > 0.0 else 0.0
    for ai in accepted:
        p = points[ai]
        cell = (int(np.floor(p[0] * inv)), int(np.floor(p[1] * inv)), int(np.floor(p[2] * inv)))
        grid.setdefault(cell, []).append(ai)
    return grid


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _record_dtype(has_color: bool) -> np.dtype:
    fields = [("position", "<f4", (3,)), ("normal", "<f4", (3,))]
    if has_color:
        fields.append(("color", "<f4", (3,)))
    fields += [("triangle", "<u4"), ("subgroup", "<u4")]
    return np.dtype(fields)


def save_point_set(path: str | Path, points: PointSet) -> Path:
    path = Path(path)
    has_color = points.colors is not None
    rec = np.zeros(len(points), dtype=_record_dtype(has_color))
    rec["position"] = points.positions.astype("<f4")
    rec["normal"] = points.normals.astype("<f4")
    if has_color:
        rec["color"] = points.colors.astype("<f4")
    rec["triangle"] = points.triangle_ids.astype("<u4")
    rec["subgroup"] = points.subgroup_ids.astype("<u4")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<III", VERSION, len(points), 1 if has_color else 0))
        fh.write(rec.tobytes())
    return path


def load_point_set(path: str | Path) -> PointSet:
    path = Path(path)
    blob = path.read_bytes()
    if blob[:4] != MAGIC:
        raise ValueError(f"{path}: not a point-set file")
    version, count, flags = struct.unpack_from("<III", blob, 4)
    if version != VERSION:
        raise ValueError(f"{path}: unsupported point-set version {version}")
    has_color = bool(flags & 1)
    rec = np.frombuffer(blob, dtype=_record_dtype(has_color), count=count, offset=16)
    return PointSet(
        positions=rec["position"].astype(float),
        normals=rec["normal"].astype(float),
        triangle_ids=rec["triangle"].astype(int),
        subgroup_ids=rec["subgroup"].astype(int),
        colors=rec["color"].astype(float) if has_color else None,
    )
