"""Bidirectional point <-> triangle assignment.

Forward: each point maps to its exactly-nearest triangle (BVH query).
Reverse: each triangle maps to its nearest point, so triangles that attract
no points still receive one. P_t merges both directions, which guarantees
|P_t| >= 1 for every triangle and that every point is assigned somewhere.
Distance ties break on the lowest triangle / point index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ..mesh.geometry import point_triangle_distances
from ..mesh.model import Building
from .bvh import TriangleBvh
from .sampling import PointSet


@dataclass
class PointTriangleMap:
    nearest_triangle: np.ndarray        # (P,) triangle id per point
    nearest_point: np.ndarray           # (T,) point id per triangle
    points_per_triangle: list[np.ndarray]   # P_t, ascending point ids

    def covers_all(self) -> bool:
        return all(len(p) for p in self.points_per_triangle)


def _triangle_nearest_points(building: Building, positions: np.ndarray) -> np.ndarray:
    """For every triangle, the point with minimal exact point-triangle distance."""
    tree = cKDTree(positions)
    corners = building.vertices[building.triangles]
    centroids = corners.mean(axis=1)
    radii = np.linalg.norm(corners - centroids[:, None, :], axis=2).max(axis=1)
    out = np.empty(len(corners), dtype=int)
    for t in range(len(corners)):
        # exact distance to the kd-nearest point bounds the search sphere
        d0, i0 = tree.query(centroids[t])
        bound = point_triangle_distances(positions[i0][None], corners[t][None])[0, 0]
        cand = tree.query_ball_point(centroids[t], bound + radii[t] + 1e-12)
        cand = np.array(sorted(cand), dtype=int)
        d = point_triangle_distances(positions[cand], corners[t][None])[:, 0]
        k = int(np.argmin(d))  # first occurrence = lowest point id (cand ascending)
        out[t] = cand[k]
    return out


def build_point_triangle_map(building: Building, points: PointSet) -> PointTriangleMap:
    if len(points) == 0:
        raise ValueError("point set is empty")
    bvh = TriangleBvh(building.vertices, building.triangles)
    nearest_tri = np.empty(len(points), dtype=int)
    for p in range(len(points)):
        _, nearest_tri[p] = bvh.nearest_triangle(points.positions[p])

    nearest_point = _triangle_nearest_points(building, points.positions)

    per_tri: list[set[int]] = [set() for _ in range(len(building.triangles))]
    for p, t in enumerate(nearest_tri):
        per_tri[t].add(p)
    for t in range(len(per_tri)):
        if not per_tri[t]:
            per_tri[t].add(int(nearest_point[t]))
    return PointTriangleMap(
        nearest_triangle=nearest_tri,
        nearest_point=nearest_point,
        points_per_triangle=[np.array(sorted(s), dtype=int) for s in per_tri],
    )
