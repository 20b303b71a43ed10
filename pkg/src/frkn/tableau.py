"""Derivation of functionally fitted RKN coefficients.

Given nodes ``c`` and a basis, the coefficients ``A(h)``, ``b(h)``, ``d(h)``
are fixed by requiring the stage, solution and derivative formulas to be
exact on every basis function. With ``E`` and ``F`` from
:func:`frkn.basis.collocation_matrices` this reads::

    E        = h^2 A F
    r_b^T    = h^2 b^T F,   r_b[k] = u_k(t+h) - u_k(t) - h u_k'(t)
    r_d^T    = h   d^T F,   r_d[k] = u_k'(t+h) - u_k'(t)

All three are solved against ``F^T`` from a single LU factorisation.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from math import cos, sin, sqrt
from typing import Optional, Tuple

import numpy as np

from . import numkernel
from .basis import (BasisSpec, builtin_basis, check_collocation, collocation_matrices, DEFAULT_RCOND_FLOOR,
                    taylor_remainders)
from .errors import AugmentedSingular, CollocationFailure, DenominatorVanishes, SingularMatrix

# Below this nu = scale*h the fitted and classical coefficients differ by
# less than ~nu^2 = 1e-8, so the classical tableau is used.
SMALL_NU_THRESHOLD = 1e-4
ORTHOGONALITY_TOL = 1e-13


@dataclass(frozen=True)
class Tableau:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    d: np.ndarray
    h: float
    extended: Optional[Tuple[float, np.ndarray]] = None
    basis_name: str = "poly"
    fallback_used: bool = False
    t: float = 0.0

    @property
    def s(self) -> int:
        return len(self.c)

    def to_dict(self) -> dict:
        ext = None
        if self.extended is not None:
            ext = {"d0x": float(self.extended[0]), "dx": [float(v) for v in self.extended[1]]}
        return {
            "s": self.s,
            "c": [float(v) for v in self.c],
            "A": [[float(v) for v in row] for row in self.A],
            "b": [float(v) for v in self.b],
            "d": [float(v) for v in self.d],
            "h": float(self.h),
            "extended": ext,
            "basis": self.basis_name,
            "fallback_used": bool(self.fallback_used),
        }

    def to_json(self) -> str:
        return dump_json(self.to_dict()) + "\n"


def dump_json(obj) -> str:
    """JSON with floats written to 17 significant digits, keys in insertion order."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not np.isfinite(obj):
            return "null"
        return format(obj, ".17g")
    if isinstance(obj, str):
        import json
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{dump_json(str(k))}: {dump_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dump_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def as_nodes(c) -> np.ndarray:
    """Validate a node vector: non-empty, finite, pairwise distinct."""
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if c.ndim != 1 or c.size < 1 or not np.all(np.isfinite(c)):
        raise ValueError(f"invalid node vector {c!r}")
    if len(np.unique(c)) != len(c):
        raise ValueError(f"nodes must be pairwise distinct, got {c.tolist()}")
    return c


def gauss_nodes(s: int = 2) -> np.ndarray:
    """Gauss-Legendre points on [0, 1]."""
    if s == 2:
        return np.array([0.5 - sqrt(3.0) / 6.0, 0.5 + sqrt(3.0) / 6.0])
    x, _ = np.polynomial.legendre.leggauss(s)
    return 0.5 * (x + 1.0)


def classical_basis(s: int) -> BasisSpec:
    return builtin_basis("poly", s=s)


def _small_nu(basis: BasisSpec, h: float, threshold: float) -> bool:
    return basis.scale is not None and abs(basis.scale * h) < threshold


def derive_tableau(
    basis: BasisSpec,
    c,
    h: float,
    t: float = 0.0,
    extended: bool = False,
    small_nu_threshold: float = SMALL_NU_THRESHOLD,
    rcond_floor: float = DEFAULT_RCOND_FLOOR,
) -> Tableau:
    """Fitted coefficients for step ``h`` at time ``t``.

    When ``scale * h`` is below ``small_nu_threshold`` the classical
    (polynomial) tableau for the same nodes is returned instead and
    ``fallback_used`` is set.
    """
    c = as_nodes(c)
    if h == 0 or not np.isfinite(h):
        raise ValueError("step h must be finite and nonzero")
    if len(c) != basis.s:
        raise ValueError(f"basis has {basis.s} functions but {len(c)} nodes were given")
    if _small_nu(basis, h, small_nu_threshold):
        classical = derive_tableau(classical_basis(basis.s), c, 1.0, extended=extended,
                                   rcond_floor=rcond_floor)
        return replace(classical, h=float(h), t=float(t), basis_name=basis.name, fallback_used=True)

    report = check_collocation(basis, c, t, h, rcond_floor)
    if not report.satisfied:
        raise CollocationFailure(
            f"collocation condition fails for {basis.name} at t={t:g}, h={h:g} "
            f"(rcond_E={report.rcond_E:.3e}, rcond_F={report.rcond_F:.3e})",
            h=h, t=t,
        )
    E, F = collocation_matrices(basis, c, t, h)
    R2, R1 = taylor_remainders(basis, t, [h])
    r_b, r_d = R2[0], R1[0]
    rhs = np.column_stack([E.T / h ** 2, r_b / h ** 2, r_d / h])
    sol = numkernel.lu_solve(F.T, rhs).solution
    s = basis.s
    A = sol[:, :s].T.copy()
    b = sol[:, s].copy()
    d = sol[:, s + 1].copy()
    ext = derive_extended_d(basis, c, h, t, rcond_floor=rcond_floor) if extended else None
    return Tableau(c, A, b, d, float(h), ext, basis.name, False, float(t))


def classical_tableau(c, h: float = 1.0, extended: bool = False) -> Tableau:
    """Classical collocation RKN tableau (polynomial basis) for nodes ``c``."""
    c = as_nodes(c)
    return derive_tableau(classical_basis(len(c)), c, h, extended=extended)


def _augmenting_power(basis: BasisSpec, t: float) -> int:
    """Lowest m >= 2 with (t^m/m!)'' outside span{u_k''}.

    Independence is judged by least squares on a window of O(1/scale), so
    the decision does not depend on the step size.
    """
    width = 1.0 / basis.scale if basis.scale else 1.0
    grid = t + width * np.linspace(0.0, 1.0, 4 * basis.s + 8)
    U2 = np.array([u2(grid) for u2 in basis.u2]).T
    for m in range(2, basis.s + 4):
        target = (grid - t) ** (m - 2) / _factorial(m - 2)
        coef, *_ = np.linalg.lstsq(U2, target, rcond=None)
        resid = np.linalg.norm(U2 @ coef - target) / np.linalg.norm(target)
        if resid > 1e-8:
            return m
    raise AugmentedSingular(f"no augmenting monomial found for basis {basis.name}")


def _factorial(n: int) -> float:
    out = 1.0
    for k in range(2, n + 1):
        out *= k
    return out


def derive_extended_d(
    basis: BasisSpec,
    c,
    h: float,
    t: float = 0.0,
    small_nu_threshold: float = SMALL_NU_THRESHOLD,
    rcond_floor: float = DEFAULT_RCOND_FLOOR,
) -> Tuple[float, np.ndarray]:
    """Weights ``(d0x, dx)`` of the derivative update with an extra left-end sample.

    The rule ``g'(t+h) = g'(t) + h*d0x*g''(t) + h*dx @ g''(t + c h)`` is made
    exact for every basis function and for one augmenting monomial
    ``p = (tau)^m / m!`` with ``tau = time - t`` (see :func:`_augmenting_power`).
    """
    c = as_nodes(c)
    if np.any(c == 0.0):
        raise AugmentedSingular("node 0 duplicates the left-end sample of the extended rule")
    if _small_nu(basis, h, small_nu_threshold):
        basis = classical_basis(basis.s)
        t, h_solve = 0.0, 1.0
    else:
        h_solve = h
    m = _augmenting_power(basis, t)
    nodes = t + np.concatenate([[0.0], c]) * h_solve
    rows = [u2(nodes) for u2 in basis.u2]
    rhs = list(taylor_remainders(basis, t, [h_solve])[1][0] / h_solve)
    rows.append((nodes - t) ** (m - 2) / _factorial(m - 2))
    rhs.append(h_solve ** (m - 1) / _factorial(m - 1) / h_solve)
    M = np.array(rows)
    try:
        report = numkernel.lu_solve(M, np.array(rhs))
    except SingularMatrix:
        raise AugmentedSingular(f"augmented system singular for {basis.name}, h={h:g}") from None
    if report.rcond_estimate < rcond_floor:
        raise AugmentedSingular(
            f"augmented system ill-conditioned (rcond={report.rcond_estimate:.3e}) for {basis.name}, h={h:g}"
        )
    x = report.solution
    return float(x[0]), x[1:].copy()


def closed_form_frkn2g(c, nu: float) -> Tableau:
    """Closed-form two-stage tableau for the basis {sin(omega t), cos(omega t)}.

    Entries are functions of ``nu = omega*h`` only; the returned tableau has
    ``h = nu`` (i.e. omega = 1).
    """
    c = as_nodes(c)
    if len(c) != 2:
        raise ValueError("the closed form is for two nodes")
    c1, c2 = float(c[0]), float(c[1])
    if nu == 0:
        raise DenominatorVanishes("nu must be nonzero")
    den = sin((c1 - c2) * nu)
    if abs(den) <= 1e-12:
        raise DenominatorVanishes(f"sin((c1-c2)nu) vanishes at nu={nu!r}", nu=nu)
    n2 = nu * nu * den
    A = np.array([
        [(c1 * nu * cos(c2 * nu) - sin(c2 * nu) - sin((c1 - c2) * nu)) / n2,
         (sin(c1 * nu) - c1 * nu * cos(c1 * nu)) / n2],
        [(c2 * nu * cos(c2 * nu) - sin(c2 * nu)) / n2,
         (sin(c1 * nu) - c2 * nu * cos(c1 * nu) + sin((c2 - c1) * nu)) / n2],
    ])
    b = np.array([
        (nu * cos(c2 * nu) - sin(c2 * nu) - sin((1 - c2) * nu)) / n2,
        (sin(c1 * nu) - nu * cos(c1 * nu) + sin((1 - c1) * nu)) / n2,
    ])
    d = np.array([
        (cos(c2 * nu) - cos((1 - c2) * nu)) / (nu * den),
        (cos((1 - c1) * nu) - cos(c1 * nu)) / (nu * den),
    ])
    return Tableau(c, A, b, d, float(nu), None, "trig:omega=1,n=1", False, 0.0)


def verify_orthogonality(c, q: int, tol: float = ORTHOGONALITY_TOL) -> Tuple[bool, np.ndarray]:
    """Check that ``prod(xi - c_i)`` is orthogonal to ``xi**j`` on [0, 1] for j < q."""
    if q < 1:
        raise ValueError("q must be >= 1")
    c = as_nodes(c)
    residuals = np.array([numkernel.integrate_monomial_product(c, j) for j in range(q)])
    return bool(np.all(np.abs(residuals) <= tol)), residuals


def reconstruction_residuals(tableau: Tableau, basis: BasisSpec) -> Tuple[float, float, float]:
    """Relative residuals of the three defining identities at the tableau's (t, h)."""
    h, t = tableau.h, tableau.t
    E, F = collocation_matrices(basis, tableau.c, t, h)
    rel = lambda r, ref: float(np.max(np.abs(r)) / max(np.max(np.abs(ref)), 1e-300))
    res_A = rel(E - h ** 2 * tableau.A @ F, E)
    R2, R1 = taylor_remainders(basis, t, [h])
    r_b, r_d = R2[0], R1[0]
    res_b = rel(r_b - h ** 2 * tableau.b @ F, r_b)
    res_d = rel(r_d - h * tableau.d @ F, r_d)
    return res_A, res_b, res_d
