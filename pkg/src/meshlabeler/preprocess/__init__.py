from .bvh import TriangleBvh
from .dedup import DuplicateSets, chamfer_after_y_rotation, detect_duplicates
from .interior import classify_exterior, remove_interior
from .pointmap import PointTriangleMap, build_point_triangle_map
from .sampling import PointSet, load_point_set, sample_points, save_point_set

__all__ = [
    "DuplicateSets", "PointSet", "PointTriangleMap", "TriangleBvh",
    "build_point_triangle_map", "chamfer_after_y_rotation", "classify_exterior",
    "detect_duplicates", "load_point_set", "remove_interior", "sample_points",
    "save_point_set",
]
