"""Small dense numeric kernel.

Dense matrices are plain 2-D ``float64`` numpy arrays. Every linear system in
the package has dimension at most ``s + 2``, so the routines here favour
transparency over blocking or vectorised pivoting.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import NoConvergence, SingularMatrix

PIVOT_FLOOR = 1e-300


@dataclass(frozen=True)
class SolveReport:
    solution: np.ndarray
    rcond_estimate: float
    singular_flag: bool


def _as_matrix(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def lu_factor(a) -> Tuple[np.ndarray, np.ndarray, bool]:
    """LU factorisation with partial (row) pivoting.

    Returns the packed factors (unit lower triangle below the diagonal,
    upper triangle on and above it), the row permutation and a flag that is
    set when some pivot magnitude fell below ``PIVOT_FLOOR``.
    """
    lu = _as_matrix(a)
    n, m = lu.shape
    if n != m:
        raise ValueError(f"lu_factor needs a square matrix, got {lu.shape}")
    perm = np.arange(n)
    singular = False
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) < PIVOT_FLOOR:
            singular = True
            continue
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, perm, singular


def lu_substitute(lu: np.ndarray, perm: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Forward and back substitution against packed LU factors."""
    n = lu.shape[0]
    x = np.array(rhs, dtype=float)[perm]
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
    return x


def _rcond_from_lu(a: np.ndarray, lu: np.ndarray, perm: np.ndarray) -> float:
    # n <= 10 everywhere, so the exact inverse 1-norm is affordable
    n = a.shape[0]
    inv = lu_substitute(lu, perm, np.eye(n))
    anorm = np.abs(a).sum(axis=0).max()
    inorm = np.abs(inv).sum(axis=0).max()
    if anorm == 0.0 or not np.isfinite(inorm):
        return 0.0
    return float(1.0 / (anorm * inorm))


def rcond(a) -> float:
    """Reciprocal 1-norm condition number; 0.0 for a numerically singular matrix."""
    a = _as_matrix(a)
    lu, perm, singular = lu_factor(a)
    if singular:
        return 0.0
    return _rcond_from_lu(a, lu, perm)


def determinant(a) -> float:
    a = _as_matrix(a)
    lu, perm, singular = lu_factor(a)
    if singular:
        return 0.0
    # parity of the permutation from its cycle decomposition
    sign = 1.0
    seen = np.zeros(len(perm), dtype=bool)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return float(sign * np.prod(np.diag(lu)))


def lu_solve(a, rhs, check: bool = True) -> SolveReport:
    """Solve ``a @ x = rhs`` by Gaussian elimination with partial pivoting.

    Parameters
    ----------
    a : array_like, shape (n, n)
    rhs : array_like, shape (n,) or (n, m)
        A 1-D right-hand side yields a 1-D solution.
    check : bool
        Raise :class:`SingularMatrix` on a vanishing pivot. With
        ``check=False`` the failure is reported through ``singular_flag`` and
        the solution is filled with NaN.
    """
    a = _as_matrix(a)
    b = np.array(rhs, dtype=float)
    vector = b.ndim == 1
    b = _as_matrix(b)
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"rhs has {b.shape[0]} rows, matrix has {a.shape[0]}")
    lu, perm, singular = lu_factor(a)
    if singular:
        if check:
            raise SingularMatrix(f"pivot below {PIVOT_FLOOR:g} in {a.shape[0]}x{a.shape[0]} system")
        x = np.full(b.shape, np.nan)
        return SolveReport(x[:, 0] if vector else x, 0.0, True)
    x = lu_substitute(lu, perm, b)
    return SolveReport(x[:, 0] if vector else x, _rcond_from_lu(a, lu, perm), False)


def solve(a, rhs) -> np.ndarray:
    return lu_solve(a, rhs).solution


def spectral_radius_2x2(m) -> float:
    """Largest eigenvalue modulus of a real 2x2 matrix from its trace and determinant."""
    m = np.asarray(m, dtype=float)
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    disc = tr * tr - 4.0 * det
    if disc >= 0.0:
        root = sqrt(disc)
        return max(abs(tr + root), abs(tr - root)) / 2.0
    # complex pair: |lambda|^2 = det > 0
    return sqrt(det)


def newton_scalar(
    residual: Callable[[float], float],
    derivative: Callable[[float], float],
    guess: float,
    tol: float = 1e-14,
    max_iter: int = 50,
    bracket: Optional[Tuple[float, float]] = None,
) -> float:
    """Scalar Newton iteration with an optional bisection fallback.

    Newton stops once ``|residual(x)| <= tol``. If that has not happened
    after ``max_iter`` steps (or a step produced a non-finite iterate) and a
    sign-changing ``bracket`` was supplied, bisection takes over.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = float(guess)
    for _ in range(max_iter):
        r = residual(x)
        if abs(r) <= tol:
            return x
        dr = derivative(x)
        if dr == 0.0 or not np.isfinite(dr):
            break
        x_new = x - r / dr
        if not np.isfinite(x_new):
            break
        if x_new == x:
            break
        x = x_new
    if abs(residual(x)) <= tol:
        return x
    if bracket is None:
        raise NoConvergence(f"Newton stalled at x={x!r} after {max_iter} iterations", x=x)
    return _bisect(residual, bracket, tol, x)


def _bisect(residual, bracket, tol, newton_x):
    lo, hi = map(float, bracket)
    flo, fhi = residual(lo), residual(hi)
    if abs(flo) <= tol:
        return lo
    if abs(fhi) <= tol:
        return hi
    if flo * fhi > 0:
        raise NoConvergence(f"bracket [{lo}, {hi}] does not change sign", x=newton_x)
    best, fbest = (lo, flo) if abs(flo) < abs(fhi) else (hi, fhi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = residual(mid)
        if abs(fm) < abs(fbest):
            best, fbest = mid, fm
        if abs(fm) <= tol:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    if abs(fbest) <= tol:
        return best
    raise NoConvergence(f"bisection reached |residual|={abs(fbest):.3e} > tol", x=best)


def integrate_monomial_product(c, j: int) -> float:
    """Exact value of the integral of ``xi**j * prod(xi - c_i)`` over [0, 1].

    The product is expanded into monomial coefficients and integrated term by
    term, so the only error is floating-point rounding.
    """
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if c.size < 1 or j < 0:
        raise ValueError("need at least one node and j >= 0")
    coeffs = np.array([1.0])  # ascending powers
    for ci in c:
        shifted = np.zeros(len(coeffs) + 1)
        shifted[1:] += coeffs
        shifted[:-1] -= ci * coeffs
        coeffs = shifted
    powers = np.arange(len(coeffs)) + j
    return float(np.sum(coeffs / (powers + 1)))
