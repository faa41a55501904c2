"""Numerical laboratory for Weierstrass point distributions and Bergman
measures on smooth, nodal, and degenerating complex algebraic curves."""

__version__ = "0.1.0"
