"""Procedural labeled buildings for tests and demos.

Every fixture is deterministic in its seed and comes with exact ground-truth
labels plus metadata describing the structure the generator planted (duplicate
classes, interior subgroups, expected relations), so tests can assert against
construction instead of re-deriving it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .mesh.labels import PartLabel
from .mesh.model import Building, Subgroup

CATALOG = ("stacked-boxes", "row-houses", "tower-with-windows",
           "duplicate-stress", "interior-stress")


@dataclass
class Fixture:
    building: Building
    meta: dict = field(default_factory=dict)


class BuildingBuilder:
    def __init__(self, name: str):
        self.name = name
        self.vertices: list[np.ndarray] = []
        self.triangles: list[tuple[int, int, int]] = []
        self.groups: list[tuple[str, list[int]]] = []
        self.labels: list[int] = []

    def add_mesh(self, verts: np.ndarray, tris: np.ndarray, name: str, label: int) -> int:
        base_v = len(self.vertices)
        base_t = len(self.triangles)
        self.vertices.extend(np.asarray(verts, dtype=float))
        self.triangles.extend((int(a) + base_v, int(b) + base_v, int(c) + base_v)
                              for a, b, c in tris)
        self.groups.append((name, list(range(base_t, base_t + len(tris)))))
        self.labels.append(int(label))
        return len(self.groups) - 1

    def add_box(self, lo, hi, name: str, label: int,
                transform: np.ndarray | None = None,
                translate: np.ndarray | None = None) -> int:
        verts, tris = box_mesh(lo, hi)
        if transform is not None:
            verts = verts @ np.asarray(transform, dtype=float).T
        if translate is not None:
            verts = verts + np.asarray(translate, dtype=float)
        return self.add_mesh(verts, tris, name, label)

    def build(self) -> Building:
        subs = [Subgroup(name=n, triangle_ids=np.array(t, dtype=int)) for n, t in self.groups]
        b = Building(name=self.name, vertices=np.array(self.vertices),
                     triangles=np.array(self.triangles, dtype=int), subgroups=subs,
                     labels=np.array(self.labels, dtype=int))
        b.validate()
        return b


def box_mesh(lo, hi, flip_diagonal_face: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Axis-aligned box: 8 vertices, 12 outward-facing triangles.

    `flip_diagonal_face` (0..5) re-splits one face along its other diagonal,
    changing connectivity but not geometry.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    c = lambda xi, yi, zi: xi * 4 + yi * 2 + zi
    verts = np.array([[hi[0] if xi else lo[0], hi[1] if yi else lo[1], hi[2] if zi else lo[2]]
                      for xi in (0, 1) for yi in (0, 1) for zi in (0, 1)])
    quads = [
        (c(0, 0, 0), c(1, 0, 0), c(1, 0, 1), c(0, 0, 1)),  # bottom (-y)
        (c(0, 1, 0), c(0, 1, 1), c(1, 1, 1), c(1, 1, 0)),  # top (+y)
        (c(0, 0, 0), c(0, 0, 1), c(0, 1, 1), c(0, 1, 0)),  # -x
        (c(1, 0, 0), c(1, 1, 0), c(1, 1, 1), c(1, 0, 1)),  # +x
        (c(0, 0, 0), c(0, 1, 0), c(1, 1, 0), c(1, 0, 0)),  # -z
        (c(0, 0, 1), c(1, 0, 1), c(1, 1, 1), c(0, 1, 1)),  # +z
    ]
    tris = []
    for f, (a, b, cc, d) in enumerate(quads):
        if f == flip_diagonal_face:
            tris += [(b, cc, d), (b, d, a)]
        else:
            tris += [(a, b, cc), (a, cc, d)]
    return verts, np.array(tris, dtype=int)


def l_prism_mesh() -> tuple[np.ndarray, np.ndarray]:
    """Y-rotation-asymmetric shape: two unequal boxes fused into one mesh."""
    va, ta = box_mesh((0.0, 0.0, 0.0), (0.6, 1.0, 0.4))
    vb, tb = box_mesh((0.6, 0.6, 0.0), (0.9, 1.0, 0.4))
    verts = np.concatenate([va, vb])
    tris = np.concatenate([ta, tb + len(va)])
    return verts, tris


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def stacked_boxes(seed: int, name: str | None = None) -> Fixture:
    """Two identical cubes, one resting on the other; only the support
    direction tells roof from wall once the global offset is randomized."""
    rng = np.random.default_rng([seed, 0x57AC])
    offset = np.array([rng.uniform(-5, 5), rng.uniform(0, 3), rng.uniform(-5, 5)])
    bb = BuildingBuilder(name or f"stacked_{seed}")
    bb.add_box(offset, offset + 1.0, "base", PartLabel.WALL)
    top = offset + np.array([0.0, 1.0, 0.0])
    bb.add_box(top, top + 1.0, "top", PartLabel.ROOF)
    return Fixture(bb.build(), {"support_pairs": [(1, 0)]})


def row_houses(seed: int, houses: int = 3, name: str | None = None) -> Fixture:
    rng = np.random.default_rng([seed, 0x80035])
    gap = 0.05
    offset = np.array([rng.uniform(-3, 3), rng.uniform(0, 2), rng.uniform(-3, 3)])
    bb = BuildingBuilder(name or f"rowhouses_{seed}")
    for h in range(houses):
        base = offset + np.array([h * (1.0 + gap), 0.0, 0.0])
        bb.add_box(base, base + 1.0, f"wall_{h}", PartLabel.WALL)
        bb.add_box(base + np.array([0.0, 1.0, 0.0]),
                   base + np.array([1.0, 1.3, 1.0]), f"roof_{h}", PartLabel.ROOF)
    return Fixture(bb.build(), {"houses": houses, "gap": gap})


def tower_with_windows(seed: int, windows: int = 8, name: str | None = None) -> Fixture:
    rng = np.random.default_rng([seed, 0x703E2])
    offset = np.array([rng.uniform(-2, 2), 0.0, rng.uniform(-2, 2)])
    bb = BuildingBuilder(name or f"tower_{seed}")
    bb.add_box(offset + np.array([-2.0, -0.1, -2.0]), offset + np.array([2.0, 0.0, 2.0]),
               "ground", PartLabel.GROUND)
    bb.add_box(offset + np.array([-1.0, 0.0, -1.0]), offset + np.array([1.0, 6.0, 1.0]),
               "tower", PartLabel.WALL)
    rows = (windows + 1) // 2
    win_ids = []
    for w in range(windows):
        col = w % 2
        row = w // 2
        x = -0.6 + 1.2 * col
        y = 0.6 + row * (4.8 / max(rows, 1))
        lo = offset + np.array([x - 0.25, y, 0.95])
        hi = offset + np.array([x + 0.25, y + 0.7, 1.07])
        win_ids.append(bb.add_box(lo, hi, f"window_{w}", PartLabel.WINDOW))
    return Fixture(bb.build(), {"window_ids": win_ids, "tower_id": 1, "ground_id": 0})


def duplicate_stress(seed: int, copies: int = 12, name: str | None = None) -> Fixture:
    """Planted duplicate class under known Y-rotations plus non-duplicate decoys."""
    from .mesh.geometry import rotation_about_y

    rng = np.random.default_rng([seed, 0xD0BB])
    bb = BuildingBuilder(name or f"dupstress_{seed}")
    verts, tris = l_prism_mesh()
    planted = []
    angles = {}
    spacing = 4.0
    for k in range(copies):
        angle_deg = float(rng.integers(0, 360))
        rot = rotation_about_y(np.deg2rad(angle_deg))
        t = np.array([spacing * (k % 6), 0.0, spacing * (k // 6)])
        sid = bb.add_mesh(verts @ rot.T + t, tris, f"copy_{k}", PartLabel.WALL)
        planted.append(sid)
        angles[sid] = angle_deg

    decoys = []
    n_decoys = 34
    for d in range(n_decoys):
        t = np.array([spacing * (d % 6), 0.0, -spacing * (1 + d // 6)])
        kind = d % 4
        if kind == 0:      # scaled: fails the area prefilter
            decoys.append(bb.add_mesh(verts * 1.01 + t, tris, f"decoy_scaled_{d}", PartLabel.WALL))
        elif kind == 1:    # tiny jitter: passes prefilters, fails the 1e-6 distance gate
            jitter = rng.uniform(-1e-5, 1e-5, size=verts.shape)
            decoys.append(bb.add_mesh(verts + jitter + t, tris, f"decoy_jitter_{d}", PartLabel.WALL))
        elif kind == 2:    # same geometry, different connectivity on one face
            va, ta = box_mesh((0.0, 0.0, 0.0), (0.6, 1.0, 0.4), flip_diagonal_face=d % 6)
            vb, tb = box_mesh((0.6, 0.6, 0.0), (0.9, 1.0, 0.4))
            decoys.append(bb.add_mesh(np.concatenate([va, vb]) + t,
                                      np.concatenate([ta, tb + len(va)]),
                                      f"decoy_connect_{d}", PartLabel.WALL))
        else:              # mirrored: not reachable by an upright rotation
            mirrored = verts * np.array([-1.0, 1.0, 1.0])
            decoys.append(bb.add_mesh(mirrored + t, tris[:, ::-1], f"decoy_mirror_{d}", PartLabel.WALL))
    return Fixture(bb.build(), {"planted": planted, "angles_deg": angles, "decoys": decoys})


def interior_stress(seed: int, name: str | None = None) -> Fixture:
    rng = np.random.default_rng([seed, 0x1A7E5])
    offset = np.array([rng.uniform(-2, 2), 0.0, rng.uniform(-2, 2)])
    bb = BuildingBuilder(name or f"interior_{seed}")
    shell = bb.add_box(offset + np.array([-2.0, 0.0, -2.0]), offset + np.array([2.0, 3.0, 2.0]),
                       "shell", PartLabel.WALL)
    inner = bb.add_box(offset + np.array([-0.4, 1.0, -0.4]), offset + np.array([0.4, 1.8, 0.4]),
                       "inner", PartLabel.FURNITURE)
    porch = bb.add_box(offset + np.array([2.0, 0.0, -0.5]), offset + np.array([3.0, 1.0, 0.5]),
                       "porch", PartLabel.GARAGE)
    return Fixture(bb.build(), {"interior_ids": [inner], "exterior_ids": [shell, porch]})


_GENERATORS = {
    "stacked-boxes": stacked_boxes,
    "row-houses": row_houses,
    "tower-with-windows": tower_with_windows,
    "duplicate-stress": duplicate_stress,
    "interior-stress": interior_stress,
}


def generate_fixture(kind: str, seed: int, **kwargs) -> Fixture:
    if kind not in _GENERATORS:
        raise ValueError(f"unknown fixture kind {kind!r}; choose from {', '.join(CATALOG)}")
    return _GENERATORS[kind](seed, **kwargs)


def make_corpus(kind: str, count: int, seed: int) -> list[Fixture]:
    return [generate_fixture(kind, seed * 1000 + k, name=f"{kind.replace('-', '_')}_{seed}_{k}")
            for k in range(count)]


def write_fixtures(fixtures: list[Fixture], out_dir: str | Path) -> list[Path]:
    from .mesh.io import save_building

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return [save_building(out_dir / f"{fx.building.name}.mesh", fx.building) for fx in fixtures]
