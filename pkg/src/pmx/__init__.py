"""Principal minor ideals of generic matrices: constructions and checks."""

__version__ = "0.1.0"
