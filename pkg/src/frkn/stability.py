"""Linear stability of FRKN methods on ``y'' = lambda y`` with ``z = lambda h^2``.

The 2x2 stability matrix ``M`` maps ``(y_n, h y'_n)`` to ``(y_n+1, h y'_n+1)``.
It is available from the coefficients (resolvent form) and, for separable
bases, from the basis itself through the collocation solution.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from . import numkernel
from .basis import BasisSpec, DEFAULT_RCOND_FLOOR, eval_uvec, eval_uvec_d1, eval_uvec_d2
from .errors import FRKNError, MissingCertificate, ResolventSingular, SingularMatrix, WSingular
from .tableau import Tableau, as_nodes, derive_tableau

TOL_BOUNDARY = 1e-10
PERIODIC_DISCRIMINANT = -1e-12


@dataclass(frozen=True)
class StabilityMatrix:
    m: np.ndarray
    z: float
    h: float
    rho: float
    trace: float
    det: float


@dataclass(frozen=True)
class RegionSample:
    nu: float
    z: float
    rho: float
    classification: str  # "stable" | "periodic" | "unstable"
    failed: bool = False


def _wrap(m: np.ndarray, z: float, h: float) -> StabilityMatrix:
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return StabilityMatrix(m, float(z), float(h), numkernel.spectral_radius_2x2(m), float(tr), float(det))


def stability_matrix_coeff(tableau: Tableau, z: float,
                           rcond_floor: float = DEFAULT_RCOND_FLOOR) -> StabilityMatrix:
    s = tableau.s
    e = np.ones(s)
    try:
        rep = numkernel.lu_solve(np.eye(s) - z * tableau.A, np.column_stack([e, tableau.c]))
    except SingularMatrix:
        raise ResolventSingular(f"I - zA is singular at z={z:g}", z=z) from None
    if rep.rcond_estimate < rcond_floor:
        raise ResolventSingular(f"I - zA ill-conditioned at z={z:g} (rcond={rep.rcond_estimate:.2e})", z=z)
    xe, xc = rep.solution[:, 0], rep.solution[:, 1]
    b, d = tableau.b, tableau.d
    m = np.array([
        [1.0 + z * (b @ xe), 1.0 + z * (b @ xc)],
        [z * (d @ xe), 1.0 + z * (d @ xc)],
    ])
    return _wrap(m, z, tableau.h)


def stability_matrix_basis(basis: BasisSpec, c, h: float, z: float,
                           rcond_floor: float = DEFAULT_RCOND_FLOOR) -> StabilityMatrix:
    """Stability matrix from the collocation solution of the test equation.

    ``W = [u(0), u'(0), h^2 u''(c_1 h) - z u(c_1 h), ...]`` is built from
    basis evaluations, which stand in for ``exp(S t) u0`` and its
    ``S``-multiples.
    """
    if basis.separable_certificate is None:
        raise MissingCertificate(f"basis {basis.name} carries no separability certificate")
    c = as_nodes(c)
    tc = c * h
    W = np.column_stack([
        eval_uvec(basis, 0.0),
        eval_uvec_d1(basis, 0.0),
        h * h * eval_uvec_d2(basis, tc) - z * eval_uvec(basis, tc),
    ])
    try:
        rep = numkernel.lu_solve(W, np.column_stack([eval_uvec(basis, h), eval_uvec_d1(basis, h)]))
    except SingularMatrix:
        raise WSingular(f"W singular at h={h:g}, z={z:g}", h=h, z=z) from None
    if rep.rcond_estimate < rcond_floor:
        raise WSingular(f"W ill-conditioned at h={h:g}, z={z:g} (rcond={rep.rcond_estimate:.2e})", h=h, z=z)
    xu, xup = rep.solution[:, 0], rep.solution[:, 1]
    m = np.array([
        [xu[0], xu[1] / h],
        [h * xup[0], xup[1]],
    ])
    return _wrap(m, z, h)


def classify(sm: StabilityMatrix, tol_boundary: float = TOL_BOUNDARY) -> str:
    if sm.rho < 1.0 - tol_boundary:
        return "stable"
    if abs(sm.rho - 1.0) <= tol_boundary and sm.trace ** 2 - 4.0 * sm.det < PERIODIC_DISCRIMINANT:
        return "periodic"
    return "unstable"


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("FRKN_THREADS", "1")))
    except ValueError:
        return 1


def _scan_column(basis, c, nu, z_grid, tol_boundary) -> List[RegionSample]:
    h = nu / basis.scale if basis.scale else nu
    try:
        tab = derive_tableau(basis, c, h)
    except FRKNError:
        return [RegionSample(nu, float(z), float("nan"), "unstable", True) for z in z_grid]
    out = []
    for z in z_grid:
        try:
            sm = stability_matrix_coeff(tab, float(z))
        except FRKNError:
            out.append(RegionSample(nu, float(z), float("nan"), "unstable", True))
            continue
        out.append(RegionSample(nu, float(z), sm.rho, classify(sm, tol_boundary)))
    return out


def scan_region(basis: BasisSpec, c, nu_grid: Sequence[float], z_grid: Sequence[float],
                tol_boundary: float = TOL_BOUNDARY, workers: Optional[int] = None) -> List[RegionSample]:
    """Classify every ``(nu, z)`` pair; the tableau is derived once per ``nu``.

    ``nu`` is converted to a step as ``h = nu / basis.scale``. Samples whose
    derivation or resolvent fails are returned as unstable with ``failed``
    set. Results are ordered by ``nu`` then ``z`` regardless of ``workers``.
    """
    c = as_nodes(c)
    z_grid = [float(z) for z in z_grid]
    if any(z > 0 for z in z_grid):
        raise ValueError("z grid must lie on the non-positive real axis")
    workers = workers or default_workers()
    columns = [None] * len(nu_grid)
    if workers > 1 and len(nu_grid) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_scan_column, basis, c, float(nu), z_grid, tol_boundary): i
                       for i, nu in enumerate(nu_grid)}
            for fut, i in futures.items():
                columns[i] = fut.result()
    else:
        columns = [_scan_column(basis, c, float(nu), z_grid, tol_boundary) for nu in nu_grid]
    return [sample for col in columns for sample in col]


def stability_interval(basis: BasisSpec, c, nu: float, z_min: float = -50.0, dz: float = 0.01) -> float:
    """Length of the contiguous stable-or-periodic interval ending just left of z = 0."""
    z_grid = -dz * np.arange(1, int(round(-z_min / dz)) + 1)
    length = 0.0
    for sample in scan_region(basis, c, [nu], z_grid, workers=1):
        if sample.classification == "unstable":
            break
        length = -sample.z
    return length


def region_csv(samples: Sequence[RegionSample]) -> str:
    lines = ["nu,z,rho,class"]
    for smp in samples:
        lines.append(f"{smp.nu:.12g},{smp.z:.12g},{smp.rho:.12g},{smp.classification}")
    return "\n".join(lines) + "\n"


def radius_csv(samples: Sequence[RegionSample]) -> str:
    """``z,rho`` rows; meant for samples of a single ``nu``."""
    lines = ["z,rho"]
    for smp in samples:
        lines.append(f"{smp.z:.12g},{smp.rho:.12g}")
    return "\n".join(lines) + "\n"
