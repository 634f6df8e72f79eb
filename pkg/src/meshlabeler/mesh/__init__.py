from .geometry import FaceRect, Obb, compute_obb, obb_face_rect
from .io import load_building, save_building, sidecar_path
from .labels import NUM_LABELS, UNLABELED, PartLabel, label_from_name, label_name
from .model import (Building, MeshError, ParseError, Subgroup, ValidationError,
                    attach_samples, summarize, summarize_subgroup)

__all__ = [
    "Building", "FaceRect", "MeshError", "NUM_LABELS", "Obb", "ParseError",
    "PartLabel", "Subgroup", "UNLABELED", "ValidationError", "attach_samples",
    "compute_obb", "label_from_name", "label_name", "load_building",
    "obb_face_rect", "save_building", "sidecar_path", "summarize",
    "summarize_subgroup",
]
