"""Interior-structure removal by visibility ray casting.

Each subgroup shoots rays from surface samples (default 10 per triangle)
toward viewpoints on a surrounding sphere (default 50, Fibonacci spiral at
twice the scene diagonal). A subgroup is exterior as soon as one ray reaches
its viewpoint without crossing a triangle of another subgroup; intersections
with the subgroup's own triangles are ignored. Ray origins are lifted off the
surface along the triangle normal to dodge contact-coincident geometry.
"""

from __future__ import annotations

import numpy as np

from ..mesh.model import Building, ValidationError
from .bvh import TriangleBvh

DEFAULT_VIEWPOINTS = 50
DEFAULT_SAMPLES_PER_TRIANGLE = 10


def fibonacci_sphere(count: int, radius: float, center: np.ndarray) -> np.ndarray:
    i = np.arange(count)
    golden = np.pi * (3.0 - np.sqrt(5.0))
    y = 1.0 - 2.0 * (i + 0.5) / count
    r = np.sqrt(np.maximum(1.0 - y * y, 0.0))
    theta = golden * i
    pts = np.stack([r * np.cos(theta), y, r * np.sin(theta)], axis=1)
    return center + radius * pts


def classify_exterior(building: Building, viewpoints: int = DEFAULT_VIEWPOINTS,
                      samples_per_triangle: int = DEFAULT_SAMPLES_PER_TRIANGLE,
                      seed: int = 0) -> np.ndarray:
    """Boolean mask over subgroups: True = exterior (visible from outside)."""
    lo, hi = building.aabb()
    center = (lo + hi) / 2.0
    diag = float(np.linalg.norm(hi - lo))
    if diag == 0.0:
        raise ValidationError(f"{building.name}: degenerate scene extent")
    views = fibonacci_sphere(viewpoints, 2.0 * diag, center)
    offset = 1e-5 * diag

    bvh = TriangleBvh(building.vertices, building.triangles)
    normals = building.triangle_normals()
    areas = building.triangle_areas()
    groups = building.triangle_subgroup
    rng = np.random.default_rng([seed, 0x1A7E])

    exterior = np.zeros(len(building.subgroups), dtype=bool)
    for sid, sub in enumerate(building.subgroups):
        found = False
        for t in sub.triangle_ids:
            if areas[t] == 0.0:
                continue
            corners = building.vertices[building.triangles[t]]
            r1 = np.sqrt(rng.random(samples_per_triangle))
            r2 = rng.random(samples_per_triangle)
            w = np.stack([1.0 - r1, r1 * (1.0 - r2), r1 * r2], axis=1)
            origins = w @ corners + offset * normals[t]
            for origin in origins:
                for view in views:
                    direction = view - origin
                    dist = float(np.linalg.norm(direction))
                    direction = direction / dist
                    if not bvh.any_hit(origin, direction, 0.0, dist,
                                       triangle_groups=groups, exclude_group=sid):
                        found = True
                        break
                if found:
                    break
            if found:
                break
        exterior[sid] = found
    return exterior


def remove_interior(building: Building, viewpoints: int = DEFAULT_VIEWPOINTS,
                    samples_per_triangle: int = DEFAULT_SAMPLES_PER_TRIANGLE,
                    seed: int = 0) -> tuple[Building, list[int]]:
    """Filtered building without interior subgroups, plus the removed ids."""
    exterior = classify_exterior(building, viewpoints, samples_per_triangle, seed)
    if not exterior.any():
        raise ValidationError(
            f"{building.name}: every subgroup classified interior; "
            "input is degenerate (likely inverted normals)")
    keep = [i for i in range(len(exterior)) if exterior[i]]
    removed = [i for i in range(len(exterior)) if not exterior[i]]
    return building.filter_subgroups(keep), removed
