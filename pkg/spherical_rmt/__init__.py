"""Fixed trace square ensemble: Selberg integrals, GUE densities, Monte Carlo
sampling of the fixed-trace ensemble and its radial-mixing integral equation."""

__version__ = "0.1.0"
