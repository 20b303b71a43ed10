"""Fixed-step FRKN integration of ``y'' = f(t, y``).

One step with nodes ``c`` and coefficients ``A, b, d``::

    Y      = y_n + c h y'_n + h^2 A f(t_n + c h, Y)        (implicit stages)
    y_n+1  = y_n + h y'_n + h^2 b . f(t_n + c h, Y)
    y'_n+1 = y'_n + h d . f(t_n + c h, Y)

The extended variant replaces the derivative update by
``y'_n + h (d0x f(t_n, y_n) + dx . f(t_n + c h, Y))``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .basis import BasisSpec
from .errors import StageNoConvergence
from .problems import OdeSystem2
from .tableau import Tableau, as_nodes, derive_tableau

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntegratorConfig:
    stage_tol: float = 1e-14
    max_stage_iters: int = 100
    variant: str = "standard"  # or "extended"
    coefficient_policy: Optional[str] = None  # "frozen_per_h" | "per_step_t"; None picks by separability

    def __post_init__(self):
        if not self.stage_tol > 0:
            raise ValueError("stage_tol must be positive")
        if self.variant not in ("standard", "extended"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.coefficient_policy not in (None, "frozen_per_h", "per_step_t"):
            raise ValueError(f"unknown coefficient policy {self.coefficient_policy!r}")


@dataclass
class StageSolution:
    stages: np.ndarray  # (s, dim)
    forces: np.ndarray  # f at the stages, (s, dim)
    iterations: int
    converged: bool


@dataclass
class StepResult:
    y_next: np.ndarray
    yp_next: np.ndarray
    stages: np.ndarray
    iterations: int
    converged: bool


@dataclass
class Trajectory:
    t: np.ndarray   # (n+1,)
    y: np.ndarray   # (n+1, dim)
    yp: np.ndarray  # (n+1, dim)
    stage_iterations: int = 0

    def to_csv(self) -> str:
        dim = self.y.shape[1]
        header = ["t"] + [f"y{k + 1}" for k in range(dim)] + [f"yp{k + 1}" for k in range(dim)]
        lines = [",".join(header)]
        for tk, yk, ypk in zip(self.t, self.y, self.yp):
            lines.append(",".join(format(float(v), ".17g") for v in (tk, *yk, *ypk)))
        return "\n".join(lines) + "\n"


def stage_solve(tableau: Tableau, sys: OdeSystem2, t_n: float, y_n, yp_n, h: float,
                cfg: IntegratorConfig = IntegratorConfig()) -> StageSolution:
    """Fixed-point iteration for the implicit stage equations."""
    c = tableau.c
    tc = t_n + c * h
    base = y_n[None, :] + (c * h)[:, None] * yp_n[None, :]
    h2A = h * h * tableau.A
    Y = base
    tol = cfg.stage_tol
    for it in range(1, cfg.max_stage_iters + 1):
        F = sys.rhs(tc, Y)
        Y_new = base + h2A @ F
        done = np.all(np.abs(Y_new - Y) <= tol * (1.0 + np.abs(Y_new)))
        Y = Y_new
        if done:
            return StageSolution(Y, sys.rhs(tc, Y), it, True)
    raise StageNoConvergence(
        f"stage iteration did not converge in {cfg.max_stage_iters} iterations at t={t_n:g}, h={h:g}",
        t=t_n, h=h,
    )


def step(tableau: Tableau, sys: OdeSystem2, t_n: float, y_n, yp_n, h: float,
         cfg: IntegratorConfig = IntegratorConfig()) -> StepResult:
    y_n = np.asarray(y_n, dtype=float)
    yp_n = np.asarray(yp_n, dtype=float)
    sol = stage_solve(tableau, sys, t_n, y_n, yp_n, h, cfg)
    F = sol.forces
    y_next = y_n + h * yp_n + h * h * (tableau.b @ F)
    if cfg.variant == "extended":
        if tableau.extended is None:
            raise ValueError("extended variant needs a tableau derived with extended=True")
        d0x, dx = tableau.extended
        f0 = sys.rhs(np.array([t_n]), y_n[None, :])[0]
        yp_next = yp_n + h * (d0x * f0 + dx @ F)
    else:
        yp_next = yp_n + h * (tableau.d @ F)
    return StepResult(y_next, yp_next, sol.stages, sol.iterations, sol.converged)


def integrate(method: Union[Tableau, BasisSpec], sys: OdeSystem2, t0: float, T: float, h: float,
              cfg: IntegratorConfig = IntegratorConfig(), nodes=None) -> Trajectory:
    """Integrate over ``[t0, t0 + T]`` with ``round(T/h)`` steps of size ``h``.

    ``method`` is either a ready tableau (used as is) or a basis, in which
    case ``nodes`` are required. Separable bases get one tableau per run;
    other bases are re-derived at every step time.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    n = int(round(T / h))
    if n < 1:
        raise ValueError(f"T/h = {T / h:g} gives no steps")
    extended = cfg.variant == "extended"

    per_step = None
    if isinstance(method, Tableau):
        tableau = method
    else:
        c = as_nodes(nodes)
        policy = cfg.coefficient_policy or ("frozen_per_h" if method.separable else "per_step_t")
        if policy == "per_step_t":
            per_step = method
            tableau = None
        else:
            tableau = derive_tableau(method, c, h, extended=extended)
    if tableau is not None and extended and tableau.extended is None:
        raise ValueError("extended variant needs a tableau derived with extended=True")

    dim = sys.dim
    ts = t0 + h * np.arange(n + 1)
    ys = np.empty((n + 1, dim))
    yps = np.empty((n + 1, dim))
    ys[0], yps[0] = sys.y0, sys.yp0
    total_iters = 0
    for k in range(n):
        if per_step is not None:
            tableau = derive_tableau(per_step, c, h, t=ts[k], extended=extended)
        try:
            res = step(tableau, sys, ts[k], ys[k], yps[k], h, cfg)
        except StageNoConvergence as exc:
            exc.context["step"] = k
            exc.detail = f"{exc.detail} (step {k})"
            exc.args = (exc.detail,)
            raise
        ys[k + 1], yps[k + 1] = res.y_next, res.yp_next
        total_iters += res.iterations
    log.debug("integrated %d steps, %d stage iterations", n, total_iters)
    return Trajectory(ts, ys, yps, total_iters)
