"""Fitting bases, the collocation condition and separability checks.

A basis is ``s`` functions ``u_k`` together with their first and second
derivatives. Methods are built on the augmented vector
``(1, t, u_1(t), ..., u_s(t))``. Catalog bases are products
``t**p * g(a*t)`` with ``g`` one of 1, sin, cos, exp. For those, the
derivative matrix ``S`` with ``uvec'(t) = S @ uvec(t)`` follows from the same
term algebra used for evaluation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from . import numkernel
from .errors import InvalidParams, MissingCertificate

Func = Callable[[np.ndarray], np.ndarray]

DEFAULT_RCOND_FLOOR = 1e-12


@dataclass(frozen=True)
class BasisSpec:
    """An immutable fitting basis.

    ``u``, ``u1`` and ``u2`` hold the functions and their first and second
    derivatives; each must accept a numpy array of times. ``scale`` is the
    characteristic frequency used to form the dimensionless step
    ``nu = scale * h`` (``None`` for purely polynomial bases).
    """

    u: Tuple[Func, ...]
    u1: Tuple[Func, ...]
    u2: Tuple[Func, ...]
    name: str = "custom"
    params: Dict[str, float] = field(default_factory=dict)
    separable_certificate: Optional[Tuple[np.ndarray, np.ndarray]] = None
    scale: Optional[float] = None
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.u) < 1:
            raise InvalidParams("a basis needs at least one function")
        if not (len(self.u) == len(self.u1) == len(self.u2)):
            raise InvalidParams("u, u1 and u2 must have the same length")

    @property
    def s(self) -> int:
        return len(self.u)

    @property
    def separable(self) -> bool:
        return self.separable_certificate is not None

    @classmethod
    def from_callables(cls, u, u1, u2, name="custom", params=None, certificate=None, scale=None):
        return cls(tuple(u), tuple(u1), tuple(u2), name, dict(params or {}), certificate, scale)


def _stack(funcs, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return np.array([np.broadcast_to(f(t), t.shape) for f in funcs], dtype=float)


def eval_uvec(basis: BasisSpec, t) -> np.ndarray:
    """``(1, t, u_1(t), ..., u_s(t))``; array ``t`` adds trailing axes."""
    t = np.asarray(t, dtype=float)
    return np.concatenate([np.ones((1,) + t.shape), t[None], _stack(basis.u, t)])


def eval_uvec_d1(basis: BasisSpec, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return np.concatenate([np.zeros((1,) + t.shape), np.ones((1,) + t.shape), _stack(basis.u1, t)])


def eval_uvec_d2(basis: BasisSpec, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return np.concatenate([np.zeros((2,) + t.shape), _stack(basis.u2, t)])


# --------------------------------------------------------------------------
# catalog

@dataclass(frozen=True)
class _Term:
    """``t**power * g(rate * t)`` with ``g`` in {one, sin, cos, exp}."""

    power: int
    kind: str = "one"
    rate: float = 0.0

    def _g(self, t, order):
        a = self.rate
        x = a * t
        if self.kind == "one":
            return np.ones_like(t) if order == 0 else np.zeros_like(t)
        if self.kind == "exp":
            return a ** order * np.exp(x)
        # sin/cos derivatives cycle with period four
        shift = order + (1 if self.kind == "cos" else 0)
        base = (np.sin, np.cos, lambda v: -np.sin(v), lambda v: -np.cos(v))[shift % 4]
        return a ** order * base(x)

    def _poly(self, t, order):
        p = self.power
        if order > p:
            return np.zeros_like(t)
        coef = 1.0
        for k in range(order):
            coef *= p - k
        return coef * t ** (p - order)

    def derivative(self, t, order: int):
        t = np.asarray(t, dtype=float)
        # Leibniz rule, order <= 2
        binom = (1, order, 1) if order == 2 else ((1, 1) if order == 1 else (1,))
        return sum(b * self._poly(t, k) * self._g(t, order - k) for k, b in enumerate(binom))

    def d_expansion(self):
        """Derivative as a list of (coefficient, term) pairs."""
        out = []
        if self.power > 0:
            out.append((float(self.power), _Term(self.power - 1, self.kind, self.rate)))
        if self.kind == "sin":
            out.append((self.rate, _Term(self.power, "cos", self.rate)))
        elif self.kind == "cos":
            out.append((-self.rate, _Term(self.power, "sin", self.rate)))
        elif self.kind == "exp":
            out.append((self.rate, self))
        return out

    def label(self) -> str:
        poly = "" if self.power == 0 else ("t" if self.power == 1 else f"t^{self.power}")
        if self.kind == "one":
            return poly or "1"
        g = f"{self.kind}({self.rate:g}t)"
        return f"{poly}*{g}" if poly else g


def basis_from_terms(terms: Sequence[_Term], name: str, params=None, scale=None) -> BasisSpec:
    """Build a basis from product terms and attach its separability certificate.

    The certificate is attached only when the derivative of every term lies in
    ``span{1, t, terms}``.
    """
    terms = list(terms)
    if len(set(terms)) != len(terms):
        raise InvalidParams(f"duplicate functions in basis {name}")
    index = {_Term(0): 0, _Term(1): 1}
    for k, term in enumerate(terms):
        if term in index:
            raise InvalidParams(f"basis {name} must not contain 1 or t")
        index[term] = k + 2
    n = len(terms) + 2
    S = np.zeros((n, n))
    S[1, 0] = 1.0
    closed = True
    for k, term in enumerate(terms):
        for coef, dterm in term.d_expansion():
            if dterm not in index:
                closed = False
                break
            S[k + 2, index[dterm]] += coef
    u = tuple((lambda tt, _t=term: _t.derivative(tt, 0)) for term in terms)
    u1 = tuple((lambda tt, _t=term: _t.derivative(tt, 1)) for term in terms)
    u2 = tuple((lambda tt, _t=term: _t.derivative(tt, 2)) for term in terms)
    cert = None
    if closed:
        u0 = np.array([1.0, 0.0] + [float(term.derivative(0.0, 0)) for term in terms])
        cert = (S, u0)
    labels = tuple(term.label() for term in terms)
    return BasisSpec(u, u1, u2, name, dict(params or {}), cert, scale, labels)


def _count(params, key, default=None, minimum=1) -> int:
    value = params.get(key, default)
    if value is None:
        raise InvalidParams(f"missing parameter {key!r}")
    if float(value) != int(float(value)) or int(float(value)) < minimum:
        raise InvalidParams(f"{key} must be an integer >= {minimum}, got {value!r}")
    return int(float(value))


def _freq(params, key, default=None) -> float:
    value = params.get(key, default)
    if value is None:
        raise InvalidParams(f"missing parameter {key!r}")
    value = float(value)
    if value == 0.0 or not np.isfinite(value):
        raise InvalidParams(f"{key} must be finite and nonzero, got {value!r}")
    return value


def builtin_basis(kind: str, **params) -> BasisSpec:
    """Catalog of separable bases.

    ``poly`` (s)
        ``t^2, ..., t^(s+1)``
    ``trig`` (omega, n) or (omegas)
        ``sin(w_k t), cos(w_k t)`` with ``w_k = k*omega`` or explicit ``omegas``
    ``mixed`` (omega, m, n)
        ``sin(k omega t), cos(k omega t)`` for k=1..m, plus ``t^2, ..., t^n``
    ``trigpoly_env`` (omega, n)
        ``t^j sin(omega t), t^j cos(omega t)`` for j=0..n
    ``expoly`` (w, n, m)
        ``t^2, ..., t^n`` plus ``t^j exp(+-w t)`` for j=0..m
    """
    kind = kind.lower()
    if kind == "poly":
        s = _count(params, "s")
        terms = [_Term(p) for p in range(2, s + 2)]
        return basis_from_terms(terms, f"poly:s={s}", {"s": s})
    if kind == "trig":
        if "omegas" in params:
            omegas = [float(w) for w in params["omegas"]]
            for w in omegas:
                _freq({"omega": w}, "omega")
            name = "trig:omegas=" + ";".join(f"{w:g}" for w in omegas)
            pdict = {"omegas": tuple(omegas)}
        else:
            omega = _freq(params, "omega")
            n = _count(params, "n", 1)
            omegas = [k * omega for k in range(1, n + 1)]
            name, pdict = f"trig:omega={omega:g},n={n}", {"omega": omega, "n": n}
        if len({abs(w) for w in omegas}) != len(omegas):
            raise InvalidParams(f"duplicate frequency in {omegas}")
        terms = [tm for w in omegas for tm in (_Term(0, "sin", w), _Term(0, "cos", w))]
        return basis_from_terms(terms, name, pdict, scale=max(abs(w) for w in omegas))
    if kind == "mixed":
        omega = _freq(params, "omega")
        m = _count(params, "m", 1)
        n = _count(params, "n", 1)
        terms = [tm for k in range(1, m + 1) for tm in (_Term(0, "sin", k * omega), _Term(0, "cos", k * omega))]
        terms += [_Term(p) for p in range(2, n + 1)]
        return basis_from_terms(terms, f"mixed:omega={omega:g},m={m},n={n}",
                                {"omega": omega, "m": m, "n": n}, scale=m * abs(omega))
    if kind == "trigpoly_env":
        omega = _freq(params, "omega")
        n = _count(params, "n", 1, minimum=0)
        terms = [tm for j in range(n + 1) for tm in (_Term(j, "sin", omega), _Term(j, "cos", omega))]
        return basis_from_terms(terms, f"trigpoly_env:omega={omega:g},n={n}",
                                {"omega": omega, "n": n}, scale=abs(omega))
    if kind == "expoly":
        w = _freq(params, "w")
        n = _count(params, "n", 1)
        m = _count(params, "m", 0, minimum=0)
        terms = [_Term(p) for p in range(2, n + 1)]
        terms += [tm for j in range(m + 1) for tm in (_Term(j, "exp", w), _Term(j, "exp", -w))]
        return basis_from_terms(terms, f"expoly:w={w:g},n={n},m={m}",
                                {"w": w, "n": n, "m": m}, scale=abs(w))
    raise InvalidParams(f"unknown basis kind {kind!r}")


_ALLOWED_KEYS = {
    "poly": {"s"},
    "trig": {"omega", "n"},
    "mixed": {"omega", "m", "n"},
    "trigpoly_env": {"omega", "n"},
    "expoly": {"w", "n", "m"},
}


def parse_basis(config: str) -> BasisSpec:
    """Parse a CLI basis string such as ``"trig:omega=1,n=1"`` (case-insensitive)."""
    text = config.strip().lower()
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    if kind not in _ALLOWED_KEYS:
        raise InvalidParams(f"unknown basis kind {kind!r}; expected one of {sorted(_ALLOWED_KEYS)}")
    params = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, value = item.partition("=")
        key = key.strip()
        if not eq:
            raise InvalidParams(f"malformed basis parameter {item!r}")
        if key not in _ALLOWED_KEYS[kind]:
            raise InvalidParams(f"unknown key {key!r} for basis {kind}")
        try:
            params[key] = float(value)
        except ValueError:
            raise InvalidParams(f"non-numeric value for {key}: {value!r}") from None
    return builtin_basis(kind, **params)


# --------------------------------------------------------------------------
# collocation condition

@dataclass(frozen=True)
class CollocationReport:
    det_E: float
    det_F: float
    rcond_E: float
    rcond_F: float
    satisfied: bool


def _phi_series(X: np.ndarray, k: int, terms: int = 30) -> np.ndarray:
    """``phi_k(X) = sum_j X^j / (j + k)!`` by its Taylor series (for small ``X``)."""
    n = X.shape[0]
    out = np.zeros((n, n))
    term = np.eye(n)
    fact = float(np.prod(np.arange(1, k + 1))) if k > 0 else 1.0
    term = term / fact
    for j in range(terms):
        out += term
        term = term @ X / (j + k + 1)
    return out


def taylor_remainders(basis: BasisSpec, t: float, taus) -> Tuple[np.ndarray, np.ndarray]:
    """``u(t+tau) - u(t) - tau u'(t)`` and ``u'(t+tau) - u'(t)``, rows indexed by tau.

    For separable bases and small ``|tau S|`` the remainders are formed from
    ``u(t+tau) = exp(tau S) u(t)`` through phi-function series, which avoids
    the cancellation of the direct differences as ``tau -> 0``.
    """
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    cert = basis.separable_certificate
    if cert is not None:
        S = cert[0]
        norm = np.max(np.abs(taus)) * np.linalg.norm(S, 1)
        if norm <= 1.0:
            v = np.concatenate([[1.0, t], _stack(basis.u, t)])
            S2v = S @ (S @ v)
            R2 = np.array([tau * tau * (_phi_series(tau * S, 2) @ S2v) for tau in taus])[:, 2:]
            R1 = np.array([tau * (_phi_series(tau * S, 1) @ S2v) for tau in taus])[:, 2:]
            return R2, R1
    u_at = _stack(basis.u, t + taus).T
    up_at = _stack(basis.u1, t + taus).T
    u_t = _stack(basis.u, t)
    up_t = _stack(basis.u1, t)
    return u_at - u_t[None, :] - taus[:, None] * up_t[None, :], up_at - up_t[None, :]


def collocation_matrices(basis: BasisSpec, c, t: float, h: float) -> Tuple[np.ndarray, np.ndarray]:
    """Rows are nodes, columns basis functions.

    ``E[i, k] = u_k(t + c_i h) - u_k(t) - c_i h u_k'(t)`` and
    ``F[i, k] = u_k''(t + c_i h)``.
    """
    c = np.asarray(c, dtype=float)
    E, _ = taylor_remainders(basis, t, c * h)
    F = _stack(basis.u2, t + c * h).T
    return E, F


def check_collocation(basis: BasisSpec, c, t: float, h: float,
                      threshold: float = DEFAULT_RCOND_FLOOR) -> CollocationReport:
    E, F = collocation_matrices(basis, c, t, h)
    rE, rF = numkernel.rcond(E), numkernel.rcond(F)
    return CollocationReport(
        numkernel.determinant(E), numkernel.determinant(F), rE, rF,
        bool(rE > threshold and rF > threshold),
    )


def check_separability(basis: BasisSpec, grid) -> float:
    """Max over ``grid`` of ``|uvec'(t) - S uvec(t)|_inf``."""
    if basis.separable_certificate is None:
        raise MissingCertificate(f"basis {basis.name} carries no separability certificate")
    S, _ = basis.separable_certificate
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    defect = eval_uvec_d1(basis, grid) - S @ eval_uvec(basis, grid)
    return float(np.max(np.abs(defect)))
