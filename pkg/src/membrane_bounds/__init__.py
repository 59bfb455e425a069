"""Lower bounds for the first Dirichlet eigenvalue of divergence-form operators."""

__version__ = "0.1.0"
