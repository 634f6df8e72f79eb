"""Axis-aligned bounding volume hierarchy over triangles.

Median split on the longest centroid axis, vectorized leaf kernels. Nearest
queries break exact distance ties by the lowest triangle index so results
match a brute-force scan with the same rule.
"""

from __future__ import annotations

import numpy as np

from ..mesh.geometry import point_triangle_distances, ray_triangles_hit


class TriangleBvh:
    def __init__(self, vertices: np.ndarray, triangles: np.ndarray, leaf_size: int = 8):
        self.tri = np.asarray(vertices, dtype=float)[np.asarray(triangles, dtype=int)]
        n = len(self.tri)
        if n == 0:
            raise ValueError("cannot build a BVH over zero triangles")
        self.leaf_size = max(1, leaf_size)
        tri_min = self.tri.min(axis=1)
        tri_max = self.tri.max(axis=1)
        centroids = self.tri.mean(axis=1)

        self.order = np.arange(n)
        # flat node arrays; children as indices, leaves store [start, count)
        self.node_min: list[np.ndarray] = []
        self.node_max: list[np.ndarray] = []
        self.node_left: list[int] = []
        self.node_right: list[int] = []
        self.node_start: list[int] = []
        self.node_count: list[int] = []

        stack = [(0, n, self._new_node())]
        while stack:
            start, end, node = stack.pop()
            ids = self.order[start:end]
            self.node_min[node] = tri_min[ids].min(axis=0)
            self.node_max[node] = tri_max[ids].max(axis=0)
            if end - start <= self.leaf_size:
                self.node_start[node] = start
                self.node_count[node] = end - start
                continue
            cent = centroids[ids]
            axis = int(np.argmax(cent.max(axis=0) - cent.min(axis=0)))
            # stable argsort keeps splitting deterministic under ties
            local = np.argsort(cent[:, axis], kind="stable")
            self.order[start:end] = ids[local]
            mid = start + (end - start) // 2
            left = self._new_node()
            right = self._new_node()
            self.node_left[node] = left
            self.node_right[node] = right
            stack.append((start, mid, left))
            stack.append((mid, end, right))

        self.node_min = np.array(self.node_min)
        self.node_max = np.array(self.node_max)
        self.node_left = np.array(self.node_left)
        self.node_right = np.array(self.node_right)
        self.node_start = np.array(self.node_start)
        self.node_count = np.array(self.node_count)

    def _new_node(self) -> int:
        self.node_min.append(np.zeros(3))
        self.node_max.append(np.zeros(3))
        self.node_left.append(-1)
        self.node_right.append(-1)
        self.node_start.append(-1)
        self.node_count.append(0)
        return len(self.node_min) - 1

    # -- queries -------------------------------------------------------------

    def _aabb_distance(self, node: int, point: np.ndarray) -> float:
        d = np.maximum(self.node_min[node] - point, 0.0) + np.maximum(point - self.node_max[node], 0.0)
        return float(np.linalg.norm(d))

    def nearest_triangle(self, point: np.ndarray) -> tuple[float, int]:
        """(distance, original triangle index); exact ties pick the lowest index."""
        point = np.asarray(point, dtype=float)
        best_d = np.inf
        best_id = -1
        stack = [0]
        while stack:
            node = stack.pop()
            if self._aabb_distance(node, point) > best_d:
                continue
            if self.node_count[node] > 0:
                start = self.node_start[node]
                ids = self.order[start:start + self.node_count[node]]
                d = point_triangle_distances(point[None], self.tri[ids])[0]
                for k in np.argsort(d, kind="stable"):
                    dk, tid = float(d[k]), int(ids[k])
                    if dk < best_d or (dk == best_d and tid < best_id):
                        best_d, best_id = dk, tid
                continue
            left, right = int(self.node_left[node]), int(self.node_right[node])
            dl = self._aabb_distance(left, point)
            dr = self._aabb_distance(right, point)
            # push the farther child first so the nearer one is explored next
            if dl <= dr:
                stack.append(right)
                stack.append(left)
            else:
                stack.append(left)
                stack.append(right)
        return best_d, best_id

    def _ray_hits_box(self, node: int, origin: np.ndarray, inv_dir: np.ndarray,
                      t_min: float, t_max: float) -> bool:
        t0 = (self.node_min[node] - origin) * inv_dir
        t1 = (self.node_max[node] - origin) * inv_dir
        lo = np.minimum(t0, t1)
        hi = np.maximum(t0, t1)
        enter = max(lo.max(), t_min)
        leave = min(hi.min(), t_max)
        return enter <= leave

    def any_hit(self, origin: np.ndarray, direction: np.ndarray,
                t_min: float, t_max: float,
                triangle_groups: np.ndarray | None = None,
                exclude_group: int | None = None) -> bool:
        """True if the ray hits any triangle with t in (t_min, t_max).

        Triangles whose group id equals `exclude_group` are ignored.
        """
        origin = np.asarray(origin, dtype=float)
        direction = np.asarray(direction, dtype=float)
        with np.errstate(divide="ignore"):
            inv_dir = np.where(direction != 0.0, 1.0 / direction, np.inf)
        stack = [0]
        while stack:
            node = stack.pop()
            if not self._ray_hits_box(node, origin, inv_dir, t_min, t_max):
                continue
            if self.node_count[node] > 0:
                start = self.node_start[node]
                ids = self.order[start:start + self.node_count[node]]
                skip = None
                if triangle_groups is not None and exclude_group is not None:
                    skip = triangle_groups[ids] == exclude_group
                if ray_triangles_hit(origin, direction, self.tri[ids], t_min, t_max, skip=skip):
                    return True
                continue
            stack.append(int(self.node_left[node]))
            stack.append(int(self.node_right[node]))
        return False
