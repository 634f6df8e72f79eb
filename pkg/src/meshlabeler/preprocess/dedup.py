"""Exact-duplicate subgroup detection.

Candidate pairs (equal vertex and triangle counts, areas within 1e-4
relative, matching rotation-invariant radial/height profiles) are aligned by
searching rotations about the upright axis: a 1 degree grid scored by Chamfer
distance on corresponding surface samples, golden-section refinement around
the best grid angle, then a closed-form polish solving the optimal Y-rotation
from mutual-nearest vertex pairs. A pair is a duplicate when the polished
alignment yields a bijective mutual-nearest vertex correspondence with every
distance below tolerance * mean(OBB diagonals) and identical mesh
connectivity under the correspondence.

Coincident vertex positions within a subgroup are collapsed before
correspondence, since copies of meshes with duplicated vertices could never
satisfy a strict bijection otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..mesh.geometry import rotation_about_y
from ..mesh.model import Building

GRID_STEP_DEG = 1.0
SEARCH_SAMPLES = 128
GRID_SUBSET = 48


@dataclass
class DuplicateSets:
    classes: list[list[int]]
    # (i, j) with i < j -> (angle_rad, translation) such that x_j ~ R x_i + t
    transforms: dict[tuple[int, int], tuple[float, np.ndarray]] = field(default_factory=dict)

    def class_of(self, sid: int) -> list[int]:
        for cls in self.classes:
            if sid in cls:
                return cls
        raise KeyError(sid)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _search_samples(building: Building, sid: int, seed: int, count: int) -> np.ndarray:
    """Deterministic per-subgroup surface samples for rotation scoring.

    The RNG stream is keyed by the local triangle count, so subgroups that are
    copies of each other draw corresponding samples and score Chamfer 0 at the
    true rotation.
    """
    tris = building.subgroups[sid].triangle_ids
    rng = np.random.default_rng([seed, 0xD0D0, len(tris)])
    picks = rng.integers(0, len(tris), size=count)
    corners = building.vertices[building.triangles[tris[picks]]]
    r1 = np.sqrt(rng.random(count))
    r2 = rng.random(count)
    w = np.stack([1.0 - r1, r1 * (1.0 - r2), r1 * r2], axis=1)
    return np.einsum("pk,pkd->pd", w, corners)


def _chamfer_all_angles(a_centered: np.ndarray, b_centered: np.ndarray,
                        angles: np.ndarray) -> np.ndarray:
    """Symmetric Chamfer of R(theta) @ a vs b for every angle, batched."""
    cos, sin = np.cos(angles), np.sin(angles)
    rot = np.zeros((len(angles), 3, 3))
    rot[:, 0, 0] = cos
    rot[:, 0, 2] = sin
    rot[:, 1, 1] = 1.0
    rot[:, 2, 0] = -sin
    rot[:, 2, 2] = cos
    ra = np.einsum("kab,nb->kna", rot, a_centered)
    d2 = (np.einsum("na,na->n", a_centered, a_centered)[None, :, None]
          + np.einsum("ma,ma->m", b_centered, b_centered)[None, None, :]
          - 2.0 * np.einsum("kna,ma->knm", ra, b_centered))
    d = np.sqrt(np.maximum(d2, 0.0))
    return 0.5 * (d.min(axis=2).mean(axis=1) + d.min(axis=1).mean(axis=1))


def chamfer_after_y_rotation(a: np.ndarray, b: np.ndarray,
                             grid_step_deg: float = GRID_STEP_DEG) -> tuple[float, float]:
    """(best chamfer, best angle in radians) for aligning `a` onto `b`.

    Both sets are centered on their means before rotation; the grid optimum is
    refined with golden-section search.
    """
    ac = a - a.mean(axis=0)
    bc = b - b.mean(axis=0)
    grid = np.deg2rad(np.arange(0.0, 360.0, grid_step_deg))
    scores = _chamfer_all_angles(ac, bc, grid)
    k = int(np.argmin(scores))
    lo = grid[k] - np.deg2rad(1.5 * grid_step_deg)
    hi = grid[k] + np.deg2rad(1.5 * grid_step_deg)

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1 = _chamfer_all_angles(ac, bc, np.array([x1]))[0]
    f2 = _chamfer_all_angles(ac, bc, np.array([x2]))[0]
    for _ in range(40):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = _chamfer_all_angles(ac, bc, np.array([x1]))[0]
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = _chamfer_all_angles(ac, bc, np.array([x2]))[0]
    candidates = [(float(scores[k]), float(grid[k])),
                  (float(f1), float(x1 % (2.0 * np.pi))),
                  (float(f2), float(x2 % (2.0 * np.pi)))]
    best_val, best_angle = min(candidates)
    return best_val, best_angle


def _mutual_nearest(a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Bijective mutual-nearest map a->b, or None. Ties take the lowest index."""
    d2 = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
    ab = np.argmin(d2, axis=1)
    ba = np.argmin(d2, axis=0)
    if not np.all(ba[ab] == np.arange(len(a))):
        return None
    if len(np.unique(ab)) != len(a):
        return None
    return ab


def _polish_angle(a_centered: np.ndarray, b_centered: np.ndarray, angle: float) -> float:
    """Closed-form optimal Y-rotation given mutual-nearest pairs at `angle`."""
    for _ in range(3):
        rot = rotation_about_y(angle)
        corr = _mutual_nearest(a_centered @ rot.T, b_centered)
        if corr is None:
            return angle
        bb = b_centered[corr]
        c = float((a_centered[:, 0] * bb[:, 0] + a_centered[:, 2] * bb[:, 2]).sum())
        s = float((a_centered[:, 2] * bb[:, 0] - a_centered[:, 0] * bb[:, 2]).sum())
        if c == 0.0 and s == 0.0:
            return angle
        angle = float(np.arctan2(s, c)) % (2.0 * np.pi)
    return angle


class _LocalMesh:
    """Subgroup vertices with coincident positions collapsed, plus edge set."""

    def __init__(self, building: Building, sid: int):
        vert_ids = building.subgroup_vertices(sid)
        raw = building.vertices[vert_ids]
        self.positions, inverse = np.unique(raw, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        self.barycenter = raw.mean(axis=0)
        to_local = {int(g): inverse[k] for k, g in enumerate(vert_ids)}
        edges = set()
        for t in building.subgroups[sid].triangle_ids:
            a, b, c = (int(to_local[int(v)]) for v in building.triangles[t])
            for u, v in ((a, b), (b, c), (a, c)):
                if u != v:
                    edges.add((min(u, v), max(u, v)))
        self.edges = frozenset(edges)
        centered = self.positions - self.barycenter
        self.radii = np.sort(np.linalg.norm(centered[:, [0, 2]], axis=1))
        self.heights = np.sort(centered[:, 1])


def _check_pair(building: Building, la: _LocalMesh, lb: _LocalMesh,
                i: int, j: int, tolerance: float, seed: int
                ) -> tuple[float, np.ndarray] | None:
    limit = tolerance * 0.5 * (building.subgroups[i].diagonal + building.subgroups[j].diagonal)
    if len(la.positions) != len(lb.positions):
        return None
    # rotation-invariant profile gate; generous bound so true pairs always pass
    gate = max(1e-3 * building.subgroups[i].diagonal, 10.0 * limit)
    if np.abs(la.radii - lb.radii).max() > gate or np.abs(la.heights - lb.heights).max() > gate:
        return None

    sa = _search_samples(building, i, seed, SEARCH_SAMPLES)
    sb = _search_samples(building, j, seed, SEARCH_SAMPLES)
    _, angle = chamfer_after_y_rotation(sa[:GRID_SUBSET], sb[:GRID_SUBSET])
    pa = la.positions - la.barycenter
    pb = lb.positions - lb.barycenter
    angle = _polish_angle(pa, pb, angle)

    rot = rotation_about_y(angle)
    aligned = pa @ rot.T
    corr = _mutual_nearest(aligned, pb)
    if corr is None:
        return None
    dists = np.linalg.norm(aligned - pb[corr], axis=1)
    if dists.max() >= limit:
        return None
    mapped = frozenset((min(int(corr[a]), int(corr[b])), max(int(corr[a]), int(corr[b])))
                       for a, b in la.edges)
    if mapped != lb.edges:
        return None
    translation = lb.barycenter - rot @ la.barycenter
    return angle, translation


def detect_duplicates(building: Building, tolerance: float = 1e-6,
                      seed: int = 0) -> DuplicateSets:
    """Partition subgroups into exact-duplicate classes.

    Requires summaries (OBB diagonals). Candidate pairs may be evaluated
    concurrently; here they run in ascending (i, j) order and merge through a
    single union-find.
    """
    n = len(building.subgroups)
    areas = np.array([s.area for s in building.subgroups])
    tcounts = np.array([len(s.triangle_ids) for s in building.subgroups])
    locals_: list[_LocalMesh | None] = [None] * n

    uf = _UnionFind(n)
    transforms: dict[tuple[int, int], tuple[float, np.ndarray]] = {}
    for i in range(n):
        for j in range(i + 1, n):
            if tcounts[i] != tcounts[j]:
                continue
            if abs(areas[i] - areas[j]) > 1e-4 * max(areas[i], areas[j]):
                continue
            if locals_[i] is None:
                locals_[i] = _LocalMesh(building, i)
            if locals_[j] is None:
                locals_[j] = _LocalMesh(building, j)
            result = _check_pair(building, locals_[i], locals_[j], i, j, tolerance, seed)
            if result is not None:
                transforms[(i, j)] = result
                uf.union(i, j)

    groups: dict[int, list[int]] = {}
    for s in range(n):
        groups.setdefault(uf.find(s), []).append(s)
    classes = [sorted(v) for _, v in sorted(groups.items())]
    return DuplicateSets(classes=classes, transforms=transforms)
