"""Triangle kernels and oriented-bounding-box machinery.

All functions take float64 arrays; vertices are (N, 3), triangles are integer
index triples into the vertex array. Triangle normals follow the right-hand
rule and are treated as the authoritative surface normals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UP_AXIS = np.array([0.0, 1.0, 0.0])


def triangle_corners(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """(T, 3, 3) corner positions for each triangle."""
    return vertices[triangles]


def triangle_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    tri = vertices[triangles]
    cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    return 0.5 * np.linalg.norm(cross, axis=1)


def triangle_normals(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Unit normals; degenerate triangles get a zero normal."""
    tri = vertices[triangles]
    cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    norm = np.linalg.norm(cross, axis=1)
    out = np.zeros_like(cross)
    ok = norm > 0.0
    out[ok] = cross[ok] / norm[ok, None]
    return out


def triangle_centroids(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    return vertices[triangles].mean(axis=1)


def rotation_about_y(angle_rad: float) -> np.ndarray:
    c, s = np.cos(angle_rad), np.sin(angle_rad)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


# ---------------------------------------------------------------------------
# closest point / ray kernels
# ---------------------------------------------------------------------------

def point_triangle_distances(points: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Exact point-to-triangle distances, (P, T) for P points and T triangles.

    Region-based closest-point computation (vertex / edge / face cases);
    degenerate triangles resolve to their nearest edge.
    """
    points = np.asarray(points, dtype=float)
    tri = np.asarray(tri, dtype=float)
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    ab = b - a
    ac = c - a
    bc = c - b

    p = points[:, None, :]
    ap = p - a[None]
    bp = p - b[None]
    cp = p - c[None]

    d1 = np.einsum("tk,ptk->pt", ab, ap)
    d2 = np.einsum("tk,ptk->pt", ac, ap)
    d3 = np.einsum("tk,ptk->pt", ab, bp)
    d4 = np.einsum("tk,ptk->pt", ac, bp)
    d5 = np.einsum("tk,ptk->pt", ab, cp)
    d6 = np.einsum("tk,ptk->pt", ac, cp)

    with np.errstate(divide="ignore", invalid="ignore"):
        # edge AB
        t_ab = np.where(d1 - d3 != 0.0, d1 / (d1 - d3), 0.0)
        t_ab = np.clip(t_ab, 0.0, 1.0)
        q_ab = a[None] + t_ab[..., None] * ab[None]
        # edge AC
        t_ac = np.where(d2 - d6 != 0.0, d2 / (d2 - d6), 0.0)
        t_ac = np.clip(t_ac, 0.0, 1.0)
        q_ac = a[None] + t_ac[..., None] * ac[None]
        # edge BC
        denom_bc = (d4 - d3) + (d5 - d6)
        t_bc = np.where(denom_bc != 0.0, (d4 - d3) / denom_bc, 0.0)
        t_bc = np.clip(t_bc, 0.0, 1.0)
        q_bc = b[None] + t_bc[..., None] * bc[None]
        # interior
        va = d3 * d6 - d5 * d4
        vb = d5 * d2 - d1 * d6
        vc = d1 * d4 - d3 * d2
        s = va + vb + vc
        safe = np.abs(s) > 0.0
        v = np.where(safe, vb / np.where(safe, s, 1.0), 0.0)
        w = np.where(safe, vc / np.where(safe, s, 1.0), 0.0)
        q_face = a[None] + v[..., None] * ab[None] + w[..., None] * ac[None]

    face_ok = safe & (va >= 0.0) & (vb >= 0.0) & (vc >= 0.0)
    d_ab = np.linalg.norm(p - q_ab, axis=-1)
    d_ac = np.linalg.norm(p - q_ac, axis=-1)
    d_bc = np.linalg.norm(p - q_bc, axis=-1)
    d_edge = np.minimum(np.minimum(d_ab, d_ac), d_bc)
    d_face = np.linalg.norm(p - q_face, axis=-1)
    return np.where(face_ok, np.minimum(d_face, d_edge), d_edge)


def points_to_surface_distance(points: np.ndarray, vertices: np.ndarray,
                               triangles: np.ndarray,
                               chunk: int = 1_000_000) -> np.ndarray:
    """Per-point distance to the nearest triangle of a mesh patch."""
    tri = triangle_corners(vertices, triangles)
    n = len(points)
    if n == 0:
        return np.zeros(0)
    t = len(tri)
    rows = max(1, chunk // max(t, 1))
    out = np.empty(n)
    for start in range(0, n, rows):
        block = points[start:start + rows]
        out[start:start + rows] = point_triangle_distances(block, tri).min(axis=1)
    return out


def ray_triangles_hit(origin: np.ndarray, direction: np.ndarray, tri: np.ndarray,
                      t_min: float, t_max: float,
                      skip: np.ndarray | None = None) -> bool:
    """Any-hit Moller-Trumbore test for one ray against a triangle batch.

    `skip` is an optional boolean mask of triangles to ignore. The hit interval
    is the open range (t_min, t_max).
    """
    eps = 1e-12
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    e1 = b - a
    e2 = c - a
    pvec = np.cross(direction, e2)
    det = np.einsum("tk,tk->t", e1, pvec)
    ok = np.abs(det) > eps
    if skip is not None:
        ok &= ~skip
    if not ok.any():
        return False
    inv = np.zeros_like(det)
    inv[ok] = 1.0 / det[ok]
    tvec = origin - a
    u = np.einsum("tk,tk->t", tvec, pvec) * inv
    ok &= (u >= -1e-12) & (u <= 1.0 + 1e-12)
    qvec = np.cross(tvec, e1)
    v = np.einsum("k,tk->t", direction, qvec) * inv
    ok &= (v >= -1e-12) & (u + v <= 1.0 + 1e-12)
    t = np.einsum("tk,tk->t", e2, qvec) * inv
    ok &= (t > t_min) & (t < t_max)
    return bool(ok.any())


# ---------------------------------------------------------------------------
# oriented bounding boxes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Obb:
    """Oriented box: `axes` rows are orthonormal directions, extents are halved."""

    center: np.ndarray          # (3,)
    axes: np.ndarray            # (3, 3), rows
    half_extents: np.ndarray    # (3,)

    @property
    def diagonal(self) -> float:
        return 2.0 * float(np.linalg.norm(self.half_extents))

    @property
    def volume(self) -> float:
        return float(np.prod(2.0 * self.half_extents))

    def opposite_corners(self) -> tuple[np.ndarray, np.ndarray]:
        offset = self.axes.T @ self.half_extents
        return self.center - offset, self.center + offset

    def corners(self) -> np.ndarray:
        """All 8 corners, (8, 3)."""
        signs = np.array([[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)], float)
        return self.center + (signs * self.half_extents) @ self.axes

    def height(self) -> float:
        """Extent of the box projected on the world up axis."""
        return 2.0 * float(np.sum(self.half_extents * np.abs(self.axes[:, 1])))

    def contains(self, points: np.ndarray, pad: float = 0.0) -> np.ndarray:
        local = (points - self.center) @ self.axes.T
        return np.all(np.abs(local) <= self.half_extents + pad, axis=-1)


@dataclass(frozen=True)
class FaceRect:
    """One face of an Obb as a planar rectangle."""

    center: np.ndarray       # (3,)
    axis_u: np.ndarray       # in-plane unit axis
    axis_v: np.ndarray
    half_u: float
    half_v: float
    normal: np.ndarray       # outward
    height: float            # world-Y of the face center


def _fix_axis_signs(axes: np.ndarray) -> np.ndarray:
    """Deterministic sign convention: dominant component of each axis positive."""
    fixed = axes.copy()
    for k in range(3):
        j = int(np.argmax(np.abs(fixed[k])))
        if fixed[k, j] < 0.0:
            fixed[k] = -fixed[k]
    return fixed


def _frame_box(points: np.ndarray, axes: np.ndarray) -> Obb:
    proj = points @ axes.T
    lo = proj.min(axis=0)
    hi = proj.max(axis=0)
    center = axes.T @ ((lo + hi) / 2.0)
    return Obb(center=center, axes=axes, half_extents=(hi - lo) / 2.0)


def convex_hull_2d(points: np.ndarray) -> np.ndarray:
    """Monotone-chain hull, counter-clockwise, no repeated endpoint. (H, 2)."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) <= 2:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[np.ndarray] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0.0:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0.0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:  # collinear input
        return np.array([pts[0], pts[-1]])
    return np.array(hull)


def min_area_rect_angle(points_2d: np.ndarray) -> float:
    """Rotation angle (radians) of the minimum-area bounding rectangle.

    Rotating calipers over the convex hull; the optimal rectangle shares a
    direction with some hull edge. Ties resolve to the smallest angle in
    [0, pi/2). Degenerate (collinear) inputs align with the dominant segment.
    """
    hull = convex_hull_2d(points_2d)
    if len(hull) == 1:
        return 0.0
    if len(hull) == 2:
        d = hull[1] - hull[0]
        return float(np.arctan2(d[1], d[0])) % (np.pi / 2.0)
    edges = np.roll(hull, -1, axis=0) - hull
    angles = np.arctan2(edges[:, 1], edges[:, 0]) % (np.pi / 2.0)
    angles = np.unique(angles)
    best = (np.inf, np.inf, 0.0)
    for ang in angles:
        c, s = np.cos(ang), np.sin(ang)
        rot = hull @ np.array([[c, -s], [s, c]])
        ext = rot.max(axis=0) - rot.min(axis=0)
        area = float(ext[0] * ext[1])
        key = (area, float(ang))
        if key < best[:2]:
            best = (area, float(ang), float(ang))
    return best[2]


def _pca_axes(centroids: np.ndarray, weights: np.ndarray) -> np.ndarray:
    total = weights.sum()
    mu = (centroids * weights[:, None]).sum(axis=0) / total
    d = centroids - mu
    cov = np.einsum("t,ti,tj->ij", weights, d, d) / total
    _, vecs = np.linalg.eigh(cov)
    axes = vecs.T[::-1]  # descending eigenvalue
    return _fix_axis_signs(axes)


def _upright_axes(points: np.ndarray) -> np.ndarray:
    ang = min_area_rect_angle(points[:, [0, 2]])
    c, s = np.cos(ang), np.sin(ang)
    # 2D frame (c, s), (-s, c) in the XZ plane, up axis kept as world Y
    return _fix_axis_signs(np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]))


def compute_obb(points: np.ndarray, centroids: np.ndarray | None = None,
                weights: np.ndarray | None = None, mode: str = "free") -> Obb:
    """Fit an oriented box around `points`.

    Candidate frames: world-aligned, area-weighted centroid PCA (in "free"
    mode), and the exact best upright rotation from rotating calipers over the
    XZ footprint. The candidate with the smallest volume wins; ties fall to
    the smallest diagonal, then candidate order. The world-aligned candidate
    guarantees the result is never looser than the axis-aligned box.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or len(points) == 0:
        raise ValueError("compute_obb needs a non-empty (N, 3) point array")
    if mode not in ("free", "upright", "aabb"):
        raise ValueError(f"unknown OBB mode {mode!r}")
    candidates = [_frame_box(points, np.eye(3))]
    if mode == "free" and centroids is not None and weights is not None and weights.sum() > 0.0:
        candidates.append(_frame_box(points, _pca_axes(centroids, weights)))
    if mode != "aabb":
        candidates.append(_frame_box(points, _upright_axes(points)))
    best = candidates[0]
    best_key = (best.volume, best.diagonal)
    for cand in candidates[1:]:
        key = (cand.volume, cand.diagonal)
        if key < best_key:
            best, best_key = cand, key
    return best


def obb_face_rect(obb: Obb, which: str) -> FaceRect:
    """Top or bottom face of an oriented box.

    "top" is the face whose outward normal has the largest +Y component,
    "bottom" the largest -Y component; ties break by axis index with the
    positive direction scanned first.
    """
    if which not in ("top", "bottom"):
        raise ValueError(f"which must be 'top' or 'bottom', got {which!r}")
    sign_goal = 1.0 if which == "top" else -1.0
    best_k, best_s, best_val = 0, 1.0, -np.inf
    for k in range(3):
        for s in (1.0, -1.0):
            val = sign_goal * s * obb.axes[k, 1]
            if val > best_val:
                best_k, best_s, best_val = k, s, val
    normal = best_s * obb.axes[best_k]
    center = obb.center + normal * obb.half_extents[best_k]
    k1, k2 = [k for k in range(3) if k != best_k]
    return FaceRect(
        center=center,
        axis_u=obb.axes[k1],
        axis_v=obb.axes[k2],
        half_u=float(obb.half_extents[k1]),
        half_v=float(obb.half_extents[k2]),
        normal=normal,
        height=float(center[1]),
    )


def obb_overlap(a: Obb, b: Obb, inflate_a: float = 0.0, inflate_b: float = 0.0) -> bool:
    """Separating-axis overlap test between two oriented boxes (15 axes)."""
    ea = a.half_extents + inflate_a
    eb = b.half_extents + inflate_b
    rot = a.axes @ b.axes.T              # rot[i, j] = a_i . b_j
    abs_rot = np.abs(rot) + 1e-12
    t_world = b.center - a.center
    t = a.axes @ t_world                 # in a's frame

    for i in range(3):                   # a's axes
        if abs(t[i]) > ea[i] + eb @ abs_rot[i]:
            return False
    for j in range(3):                   # b's axes
        if abs(t @ rot[:, j]) > ea @ abs_rot[:, j] + eb[j]:
            return False
    for i in range(3):                   # cross axes
        for j in range(3):
            ra = ea[(i + 1) % 3] * abs_rot[(i + 2) % 3, j] + ea[(i + 2) % 3] * abs_rot[(i + 1) % 3, j]
            rb = eb[(j + 1) % 3] * abs_rot[i, (j + 1) % 3] + eb[(j + 2) % 3] * abs_rot[i, (j + 2) % 3]
            lhs = abs(t[(i + 2) % 3] * rot[(i + 1) % 3, j] - t[(i + 1) % 3] * rot[(i + 2) % 3, j])
            if lhs > ra + rb:
                return False
    return True
