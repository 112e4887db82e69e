"""quadlab: quadrature domains from quadrature functions.

Reconstructs simply connected quadrature domains (classical, power-weighted,
log-weighted) from their quadrature functions via Faber-transform formulae,
solves the corresponding direct problems, classifies one-point and monomial
families, verifies every identity with an independent boundary-integral
oracle, and renders Schwarz-reflection escape-time sets.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .maps import BoundaryCurve, InnerFactor, MapSpec
from .ratfun import PoleExpansion, RationalFn

__version__ = "0.1.0"

__all__ = [
    "BoundaryCurve",
    "InnerFactor",
    "KERNEL_BACKEND",
    "MapSpec",
    "PoleExpansion",
    "RationalFn",
    "__version__",
]
