"""Numerical laboratory for the Jacobi trigonometric orthonormal systems.

Modules cover the scalar special functions, the five basis families,
quadrature against their measures, expansion coefficients and Hardy
functionals, the sharpness counterexample atoms, the r-weighted and
Poisson kernels, small-angle/mid-band asymptotics, and the growth and
divergence harnesses; ``jacobilab.cli`` is the command-line entry point.
"""

from .bases import BasisFamily, BasisSpec, JacobiParams, MultiIndex
from .specfun import Tolerance

__version__ = "0.1.0"

__all__ = [
    "BasisFamily",
    "BasisSpec",
    "JacobiParams",
    "MultiIndex",
    "Tolerance",
    "__version__",
]
