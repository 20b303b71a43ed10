"""Convergence tables on the two-body problem and stability-region data."""
from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .basis import BasisSpec, builtin_basis
from .errors import FRKNError, InsufficientRows
from .integrator import IntegratorConfig, integrate
from .problems import KeplerParams, twobody_exact, twobody_system
from .stability import region_csv, scan_region
from .tableau import gauss_nodes

T_END = 20.0
GENERIC_NODES = (0.2, 1.0)
# representative nu values for stability-region figures
FIGURE_NU_SWEEP = (0.1, np.pi / 4, np.pi / 2, 3 * np.pi / 4, np.pi, 4.0, 5.0, 5.8)


def default_z_grid(z_min: float = -12.0, z_max: float = -0.01, dz: float = 0.01) -> np.ndarray:
    """Negative real axis from ``z_min`` to ``z_max`` in steps of ``dz``."""
    count = int(np.floor((z_max - z_min) / dz + 1e-9)) + 1
    return z_min + dz * np.arange(count)


@dataclass(frozen=True)
class MethodSpec:
    label: str
    basis: BasisSpec
    nodes: np.ndarray
    variant: str


def method_spec(label: str) -> MethodSpec:
    """Resolve labels such as ``FRKN2G`` or ``RKN2x``.

    ``FRKN`` uses {sin t, cos t}, ``RKN`` the polynomial basis; a ``G``
    suffix selects Gauss nodes, otherwise nodes (0.2, 1); an ``x`` suffix
    selects the extended derivative update.
    """
    table = {
        "FRKN2G": ("trig", "gauss", "standard"),
        "RKN2G": ("poly", "gauss", "standard"),
        "FRKN2": ("trig", "generic", "standard"),
        "FRKN2x": ("trig", "generic", "extended"),
        "RKN2": ("poly", "generic", "standard"),
        "RKN2x": ("poly", "generic", "extended"),
    }
    key = {k.lower(): k for k in table}.get(label.lower())
    if key is None:
        raise ValueError(f"unknown method {label!r}; expected one of {sorted(table)}")
    kind, nodes, variant = table[key]
    basis = builtin_basis("trig", omega=1.0, n=1) if kind == "trig" else builtin_basis("poly", s=2)
    c = gauss_nodes(2) if nodes == "gauss" else np.array(GENERIC_NODES)
    return MethodSpec(key, basis, c, variant)


@dataclass
class ErrorTable:
    method_label: str
    e: float
    rows: List[Tuple[float, float, float]] = field(default_factory=list)
    seconds: List[float] = field(default_factory=list)

    @property
    def orders(self) -> List[Tuple[float, float]]:
        """Observed order between consecutive rows (NaN for the first row)."""
        out = [(float("nan"), float("nan"))]
        for (h0, a0, b0), (h1, a1, b1) in zip(self.rows, self.rows[1:]):
            ratio = np.log10(h0 / h1)
            out.append(((a0 - a1) / ratio, (b0 - b1) / ratio))
        return out

    def to_csv(self) -> str:
        lines = ["h,dy1,dy2,order1,order2"]
        for (h, d1, d2), (o1, o2) in zip(self.rows, self.orders):
            fo = lambda v: "" if np.isnan(v) else f"{v:.4f}"
            lines.append(f"{h:.17g},{d1:.4f},{d2:.4f},{fo(o1)},{fo(o2)}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        rows = [
            {"h": h, "dy1": round(d1, 4), "dy2": round(d2, 4),
             "order1": None if np.isnan(o1) else round(o1, 4),
             "order2": None if np.isnan(o2) else round(o2, 4)}
            for (h, d1, d2), (o1, o2) in zip(self.rows, self.orders)
        ]
        return json.dumps({"method": self.method_label, "e": self.e, "rows": rows}, indent=2) + "\n"

    def filename(self, ext: str = "csv") -> str:
        return f"{self.method_label}_e{self.e:g}.{ext}"


def max_log_errors(traj, p: KeplerParams) -> Tuple[float, float]:
    y1, y2, _, _ = twobody_exact(traj.t, p)
    err1 = np.max(np.abs(traj.y[:, 0] - y1))
    err2 = np.max(np.abs(traj.y[:, 1] - y2))
    return float(np.log10(err1)), float(np.log10(err2))


def run_error_table(method: str, e: float, h_list: Sequence[float],
                    cfg: Optional[IntegratorConfig] = None, t_end: float = T_END) -> ErrorTable:
    """Integrate the two-body problem over ``[0, t_end]`` for each step size.

    Errors are the log10 of the max-norm error over all step points.
    """
    spec = method_spec(method)
    p = KeplerParams(e)
    sys = twobody_system(p)
    base = cfg or IntegratorConfig()
    cfg = IntegratorConfig(base.stage_tol, base.max_stage_iters, spec.variant, base.coefficient_policy)
    table = ErrorTable(spec.label, float(e))
    for h in h_list:
        start = time.perf_counter()
        try:
            traj = integrate(spec.basis, sys, 0.0, t_end, float(h), cfg, nodes=spec.nodes)
        except FRKNError as exc:
            exc.context.update(method=spec.label, h=h)
            exc.detail = f"{exc.detail} [method={spec.label}, h={h:g}]"
            exc.args = (exc.detail,)
            raise
        table.rows.append((float(h), *max_log_errors(traj, p)))
        table.seconds.append(time.perf_counter() - start)
    return table


def empirical_order(table: ErrorTable, last: int = 4) -> Tuple[float, float]:
    """Least-squares slope of log10 error against log10 h over the last rows."""
    if len(table.rows) < 3:
        raise InsufficientRows(f"need at least 3 rows, have {len(table.rows)}")
    rows = np.array(table.rows[-last:])
    x = np.log10(rows[:, 0])
    return float(np.polyfit(x, rows[:, 1], 1)[0]), float(np.polyfit(x, rows[:, 2], 1)[0])


def emit_region_data(method: str, nu_grid: Optional[Sequence[float]] = None,
                     z_grid: Optional[Sequence[float]] = None, out=None) -> str:
    """Stability-region CSV for a method, optionally written to ``out`` (path or file object).

    Defaults are :data:`FIGURE_NU_SWEEP` and :func:`default_z_grid`.
    """
    spec = method_spec(method)
    nu_grid = FIGURE_NU_SWEEP if nu_grid is None else nu_grid
    z_grid = default_z_grid() if z_grid is None else z_grid
    text = region_csv(scan_region(spec.basis, spec.nodes, nu_grid, z_grid))
    if out is None:
        return text
    if hasattr(out, "write"):
        out.write(text)
    else:
        try:
            with open(out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write region data to {os.fspath(out)}: {exc.strerror}") from exc
    return text
