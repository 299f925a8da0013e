"""Mean-field numerics for the anisotropic 3D Hubbard model at half filling."""

__version__ = "1.0.0"
