"""Building data model.

A building is an indexed triangle mesh partitioned into named subgroups (the
atomic labeling unit). The upright axis is +Y by convention of the input
format. Buildings are immutable after loading/summarizing: all operations
treat them as read-only, so cross-building parallelism needs no locking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .geometry import Obb
from .labels import UNLABELED, label_name


class MeshError(Exception):
    pass


class ParseError(MeshError):
    pass


class ValidationError(MeshError):
    pass


@dataclass
class Subgroup:
    """A named set of triangles plus cached geometric summaries."""

    name: str
    triangle_ids: np.ndarray            # indices into Building.triangles
    area: float = 0.0
    barycenter: np.ndarray | None = None
    obb: Obb | None = None
    degenerate: bool = False            # all triangles have zero area
    sample_ids: np.ndarray | None = None    # indices into the building point set
    sample_points: np.ndarray | None = None  # cached positions of those samples

    @property
    def diagonal(self) -> float:
        return 0.0 if self.obb is None else self.obb.diagonal


@dataclass
class Building:
    name: str
    vertices: np.ndarray                # (V, 3) float64
    triangles: np.ndarray               # (T, 3) int
    subgroups: list[Subgroup]
    colors: np.ndarray | None = None    # (V, 3) in [0, 1], optional
    labels: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    hierarchy: dict[str, str] = field(default_factory=dict)

    # derived caches
    triangle_subgroup: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    _areas: np.ndarray | None = None
    _normals: np.ndarray | None = None

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=int).reshape(-1, 3)
        if self.labels.size == 0:
            self.labels = np.full(len(self.subgroups), UNLABELED, dtype=int)
        if self.triangle_subgroup.size == 0:
            owner = np.full(len(self.triangles), -1, dtype=int)
            for sid, sub in enumerate(self.subgroups):
                owner[sub.triangle_ids] = sid
            self.triangle_subgroup = owner

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        t = self.triangles
        if t.size and (t.min() < 0 or t.max() >= len(self.vertices)):
            bad = int(t.max() if t.max() >= len(self.vertices) else t.min())
            raise ValidationError(
                f"{self.name}: triangle references vertex {bad} outside 0..{len(self.vertices) - 1}")
        if self.colors is not None and len(self.colors) != len(self.vertices):
            raise ValidationError(f"{self.name}: color count != vertex count")
        if len(self.labels) != len(self.subgroups):
            raise ValidationError(f"{self.name}: label count != subgroup count")
        seen = np.zeros(len(self.triangles), dtype=int)
        for sub in self.subgroups:
            if len(sub.triangle_ids) == 0:
                raise ValidationError(f"{self.name}: subgroup {sub.name!r} is empty")
            if len(sub.triangle_ids) and (sub.triangle_ids.min() < 0
                                          or sub.triangle_ids.max() >= len(self.triangles)):
                raise ValidationError(f"{self.name}: subgroup {sub.name!r} has a dangling triangle index")
            seen[sub.triangle_ids] += 1
        if not np.all(seen == 1):
            orphan = int(np.argmax(seen != 1))
            raise ValidationError(
                f"{self.name}: triangle {orphan} belongs to {seen[orphan]} subgroups (expected exactly 1)")

    # -- geometric caches ---------------------------------------------------

    def triangle_areas(self) -> np.ndarray:
        if self._areas is None:
            self._areas = geometry.triangle_areas(self.vertices, self.triangles)
        return self._areas

    def triangle_normals(self) -> np.ndarray:
        if self._normals is None:
            self._normals = geometry.triangle_normals(self.vertices, self.triangles)
        return self._normals

    def total_area(self) -> float:
        return float(self.triangle_areas().sum())

    def aabb(self) -> tuple[np.ndarray, np.ndarray]:
        used = self.vertices[np.unique(self.triangles)] if len(self.triangles) else self.vertices
        return used.min(axis=0), used.max(axis=0)

    def scene_diagonal(self) -> float:
        lo, hi = self.aabb()
        return float(np.linalg.norm(hi - lo))

    def subgroup_vertices(self, sid: int) -> np.ndarray:
        """Unique vertex ids referenced by the subgroup, ascending."""
        return np.unique(self.triangles[self.subgroups[sid].triangle_ids])

    # -- transforms / filtering --------------------------------------------

    def transformed(self, rotation: np.ndarray | None = None,
                    translation: np.ndarray | None = None) -> "Building":
        verts = self.vertices
        if rotation is not None:
            verts = verts @ np.asarray(rotation, dtype=float).T
        if translation is not None:
            verts = verts + np.asarray(translation, dtype=float)
        subs = [Subgroup(name=s.name, triangle_ids=s.triangle_ids.copy()) for s in self.subgroups]
        return Building(name=self.name, vertices=verts, triangles=self.triangles.copy(),
                        subgroups=subs, colors=None if self.colors is None else self.colors.copy(),
                        labels=self.labels.copy(), hierarchy=dict(self.hierarchy))

    def filter_subgroups(self, keep: list[int]) -> "Building":
        """New building containing only the given subgroups (triangles reindexed)."""
        keep = sorted(keep)
        tri_ids = np.concatenate([self.subgroups[s].triangle_ids for s in keep]) if keep else np.zeros(0, int)
        tri_ids = np.sort(tri_ids)
        remap = {int(t): i for i, t in enumerate(tri_ids)}
        subs = []
        for s in keep:
            ids = np.array(sorted(remap[int(t)] for t in self.subgroups[s].triangle_ids), dtype=int)
            subs.append(Subgroup(name=self.subgroups[s].name, triangle_ids=ids))
        return Building(name=self.name, vertices=self.vertices.copy(),
                        triangles=self.triangles[tri_ids].copy(), subgroups=subs,
                        colors=None if self.colors is None else self.colors.copy(),
                        labels=self.labels[keep].copy(), hierarchy=dict(self.hierarchy))

    def label_names(self) -> list[str]:
        return [label_name(int(l)) for l in self.labels]


# ---------------------------------------------------------------------------
# subgroup summaries
# ---------------------------------------------------------------------------

def summarize_subgroup(building: Building, sid: int, obb_mode: str = "free") -> Subgroup:
    """Populate area, barycenter and OBB of one subgroup (in place).

    Zero-area triangles are excluded from the area sum and the PCA weighting,
    but their vertices still bound the box. A fully degenerate subgroup is
    flagged and falls back to the axis-aligned box.
    """
    sub = building.subgroups[sid]
    if len(sub.triangle_ids) == 0:
        raise ValidationError(f"{building.name}: subgroup {sub.name!r} is empty")
    areas = building.triangle_areas()[sub.triangle_ids]
    verts = building.vertices[building.subgroup_vertices(sid)]
    total = float(areas.sum())
    centroids = geometry.triangle_centroids(building.vertices,
                                            building.triangles[sub.triangle_ids])
    if total > 0.0:
        sub.area = total
        sub.barycenter = (centroids * areas[:, None]).sum(axis=0) / total
        sub.degenerate = False
        sub.obb = geometry.compute_obb(verts, centroids, areas, mode=obb_mode)
    else:
        sub.area = 0.0
        sub.barycenter = verts.mean(axis=0)
        sub.degenerate = True
        sub.obb = geometry.compute_obb(verts, mode="aabb")
    return sub


def summarize(building: Building, obb_mode: str = "free") -> Building:
    for sid in range(len(building.subgroups)):
        summarize_subgroup(building, sid, obb_mode=obb_mode)
    return building


def attach_samples(building: Building, positions: np.ndarray, subgroup_ids: np.ndarray) -> None:
    """Cache each subgroup's share of the global point samples."""
    for sid, sub in enumerate(building.subgroups):
        ids = np.nonzero(subgroup_ids == sid)[0]
        sub.sample_ids = ids
        sub.sample_points = positions[ids]
