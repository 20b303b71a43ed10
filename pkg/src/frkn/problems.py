"""Benchmark problems: the linear test equation and the two-body Kepler orbit."""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, cosh, sin, sinh, sqrt
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import InvalidParams, OriginSingularity
from .numkernel import newton_scalar


@dataclass(frozen=True)
class OdeSystem2:
    """Special second-order system ``y'' = rhs(t, y)``.

    ``rhs`` must broadcast over leading axes: called with times of shape
    ``(s,)`` and states of shape ``(s, dim)`` it returns accelerations of
    shape ``(s, dim)``. ``exact(t)`` (optional) returns ``(y, y')``.
    """

    dim: int
    rhs: Callable[[np.ndarray, np.ndarray], np.ndarray]
    y0: np.ndarray
    yp0: np.ndarray
    exact: Optional[Callable[[float], Tuple[np.ndarray, np.ndarray]]] = None
    name: str = "system"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        y0 = np.atleast_1d(np.asarray(self.y0, dtype=float))
        yp0 = np.atleast_1d(np.asarray(self.yp0, dtype=float))
        if y0.shape != (self.dim,) or yp0.shape != (self.dim,):
            raise ValueError(f"initial data must have length {self.dim}")
        object.__setattr__(self, "y0", y0)
        object.__setattr__(self, "yp0", yp0)


@dataclass(frozen=True)
class KeplerParams:
    e: float
    tol: float = 1e-14
    max_iter: int = 50

    def __post_init__(self):
        if not 0.0 <= self.e < 1.0:
            raise InvalidParams(f"eccentricity must lie in [0, 1), got {self.e!r}")


def kepler_u(t: float, p: KeplerParams) -> float:
    """Eccentric anomaly: root of ``u - e sin(u) = t``."""
    e = p.e
    t = float(t)
    if e == 0.0:
        return t
    # (u - t) first keeps the residual rounding small for large t
    return newton_scalar(
        lambda u: (u - t) - e * sin(u),
        lambda u: 1.0 - e * cos(u),
        guess=t,
        tol=p.tol,
        max_iter=p.max_iter,
        bracket=(t - e, t + e),
    )


def twobody_exact(t, p: KeplerParams):
    """Exact ``(y1, y2, y1', y2')`` of the Kepler orbit starting at pericentre.

    Array ``t`` gives arrays of the same shape.
    """
    t_arr = np.asarray(t, dtype=float)
    u = np.vectorize(lambda tt: kepler_u(tt, p), otypes=[float])(t_arr)
    e = p.e
    w = sqrt(1.0 - e * e)
    du = 1.0 / (1.0 - e * np.cos(u))
    out = (np.cos(u) - e, w * np.sin(u), -np.sin(u) * du, w * np.cos(u) * du)
    if t_arr.ndim == 0:
        return tuple(float(v) for v in out)
    return out


def _twobody_rhs(t, y):
    r2 = y[..., 0] ** 2 + y[..., 1] ** 2
    if np.any(r2 < 1e-24):
        raise OriginSingularity("trajectory reached the origin (r < 1e-12)")
    return -y / (r2 * np.sqrt(r2))[..., None]


def twobody_system(p: KeplerParams) -> OdeSystem2:
    e = p.e

    def exact(t):
        y1, y2, v1, v2 = twobody_exact(t, p)
        return np.array([y1, y2]), np.array([v1, v2])

    return OdeSystem2(
        dim=2,
        rhs=_twobody_rhs,
        y0=np.array([1.0 - e, 0.0]),
        yp0=np.array([0.0, sqrt((1.0 + e) / (1.0 - e))]),
        exact=exact,
        name=f"twobody(e={e:g})",
    )


def linear_system(lam: float, y0=1.0, yp0=0.0) -> OdeSystem2:
    """``y'' = lam * y`` with an analytic oracle; ``y0``, ``yp0`` may be vectors."""
    y0, yp0 = np.broadcast_arrays(np.atleast_1d(np.asarray(y0, dtype=float)),
                                  np.atleast_1d(np.asarray(yp0, dtype=float)))
    y0, yp0 = y0.copy(), yp0.copy()
    lam = float(lam)

    def exact(t):
        t = float(t)
        if lam < 0:
            w = sqrt(-lam)
            return y0 * cos(w * t) + yp0 * sin(w * t) / w, -y0 * w * sin(w * t) + yp0 * cos(w * t)
        if lam > 0:
            w = sqrt(lam)
            return y0 * cosh(w * t) + yp0 * sinh(w * t) / w, y0 * w * sinh(w * t) + yp0 * cosh(w * t)
        return y0 + yp0 * t, yp0.copy()

    return OdeSystem2(len(y0), lambda t, y: lam * y, y0, yp0, exact, f"linear(lambda={lam:g})")


def twobody_energy(y1, y2, v1, v2):
    return 0.5 * (v1 * v1 + v2 * v2) - 1.0 / np.sqrt(y1 * y1 + y2 * y2)


def twobody_angular_momentum(y1, y2, v1, v2):
    return y1 * v2 - y2 * v1
