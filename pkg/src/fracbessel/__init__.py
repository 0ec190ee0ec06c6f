"""Series solutions of the generalized multi-term fractional Bessel equation

    sum_i d_i x^{alpha_i} D^{alpha_i} u(x) + (x^beta - nu2) u(x) = 0

with Caputo derivatives: characteristic roots, existence/uniqueness
diagnostics, power and logarithmic series, and residual verification.
"""

from .characteristic import (
    CharacteristicRoot,
    Diagnosis,
    G,
    G_derivative,
    RootStatus,
    UniquenessClass,
    classify,
    find_roots,
    ivp_bound,
    nu2_min,
)
from .equation import EquationSpec, Term, validate
from .series import SeriesSolution, build, build_logarithmic, build_simple, choose_truncation, evaluate
from .verifier import ResidualReport, caputo_power, caputo_power_log, caputo_quadrature, residual

__version__ = "0.1.0"

__all__ = [
    "CharacteristicRoot",
    "Diagnosis",
    "EquationSpec",
    "G",
    "G_derivative",
    "ResidualReport",
    "RootStatus",
    "SeriesSolution",
    "Term",
    "UniquenessClass",
    "build",
    "build_logarithmic",
    "build_simple",
    "caputo_power",
    "caputo_power_log",
    "caputo_quadrature",
    "choose_truncation",
    "classify",
    "evaluate",
    "find_roots",
    "ivp_bound",
    "nu2_min",
    "residual",
    "validate",
]
