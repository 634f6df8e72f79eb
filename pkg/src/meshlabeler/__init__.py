"""meshlabeler: part labeling for subgroup-structured 3D building meshes."""

__version__ = "0.1.0"
