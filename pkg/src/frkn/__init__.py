"""Functionally fitted Runge-Kutta-Nystrom methods for y'' = f(t, y)."""
from .basis import BasisSpec, builtin_basis, parse_basis
from .integrator import IntegratorConfig, integrate, step
from .problems import KeplerParams, linear_system, twobody_system
from .tableau import Tableau, closed_form_frkn2g, derive_tableau, gauss_nodes

__all__ = [
    "BasisSpec", "builtin_basis", "parse_basis",
    "IntegratorConfig", "integrate", "step",
    "KeplerParams", "linear_system", "twobody_system",
    "Tableau", "closed_form_frkn2g", "derive_tableau", "gauss_nodes",
]
__version__ = "0.1.0"
