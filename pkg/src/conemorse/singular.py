"""Singular radial eigenvalues of -Δ - a with the weight 1/|x|^2.

The radial problem

    -(r^{N-1} ψ')' - r^{N-1} a ψ = Λ r^{N-3} ψ,   ψ(1) = 0,

becomes a regular Schrödinger equation in t = ln r after ψ = r^{-(N-2)/2} w:

    w'' = ((N-2)^2/4 - Λ - r^2 a(r)) w,   t in (-inf, 0].

Shooting is done in Prüfer variables (w = ρ sin θ, w' = ρ cos θ), so the
oscillation count is read off θ and no renormalization of w is needed.  The
same change of variables handles the standard (nonsingular) radial problem
with an angular shift λ/r^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from scipy.integrate import quad, simpson, solve_ivp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .errors import BoundViolationError, BracketError, InvalidParameterError
from .radial import SERIES_START, LinearizedPotential

SHOOT_RTOL = 1e-12
PROP35_MARGIN = 0.5


class IndicialData(NamedTuple):
    lam: float
    beta: float


class Shot(NamedTuple):
    value: float  # ψ(1), normalized so that ψ ~ r^β near 0
    zeros: int
    angle: float  # Prüfer angle at r = 1


def hardy_constant(N: int) -> float:
    return (N - 2) ** 2 / 4


def indicial_exponent(N: int, lam: float) -> IndicialData:
    """Admissible Frobenius exponent β₊ of the singular equation at r = 0."""
    disc = (N - 2) ** 2 - 4 * lam
    if disc <= 0:
        raise InvalidParameterError(
            f"eigenvalue {lam} is not below the Hardy constant {(N - 2) ** 2 / 4}", N=N, lam=lam)
    # -2Λ/((N-2) + √disc) equals (-(N-2) + √disc)/2 without the cancellation
    return IndicialData(float(lam), -2 * lam / ((N - 2) + math.sqrt(disc)))


def _start_time(a: LinearizedPotential) -> float:
    return math.log(SERIES_START * a.inner_scale)


def _prufer(kappa2: float, r2q: Callable[[float], float], t0: float, dense=False,
            rtol=SHOOT_RTOL):
    """Integrate w'' = (kappa2 - r2q(r)) w from t0 to 0 with w ~ exp(kappa t).

    Returns the solve_ivp result for (θ, ln ρ).
    """
    kappa = math.sqrt(kappa2)

    def rhs(t, y):
        Q = kappa2 - r2q(math.exp(t))
        s, c = math.sin(y[0]), math.cos(y[0])
        return [c * c - Q * s * s, (1.0 + Q) * s * c]

    y0 = [math.atan2(1.0, kappa), kappa * t0 + 0.5 * math.log1p(kappa2)]
    sol = solve_ivp(rhs, (t0, 0.0), y0, method="DOP853", rtol=rtol,
                    atol=[rtol * 0.1, rtol * 0.1], dense_output=dense)
    if not sol.success:
        raise BracketError(f"Prüfer integration failed: {sol.message}")
    return sol


def _interior_zeros(angle: float) -> int:
    return max(0, math.ceil(angle / math.pi - 1e-14) - 1)


def _scalar_r2a(a: LinearizedPotential) -> Callable[[float], float]:
    return lambda r: float(a.r2a(r))


def _shot(N, a, lam, rtol=SHOOT_RTOL):
    r2a = _scalar_r2a(a)
    sol = _prufer(hardy_constant(N) - lam, r2a, _start_time(a), rtol=rtol)
    theta, log_rho = sol.y[0, -1], sol.y[1, -1]
    return theta, log_rho


def shoot_singular(N: int, a: LinearizedPotential, lam: float, rtol=SHOOT_RTOL) -> Shot:
    """Shoot the singular radial equation from the r^{β₊} branch to r = 1."""
    indicial_exponent(N, lam)
    theta, log_rho = _shot(N, a, lam, rtol)
    value = math.exp(min(log_rho, 700.0)) * math.sin(theta)
    return Shot(value, _interior_zeros(theta), theta)


def count_singular_below(N: int, a: LinearizedPotential, lam: float, rtol=SHOOT_RTOL) -> int:
    """Number of singular radial eigenvalues strictly below ``lam``."""
    indicial_exponent(N, lam)
    return _count_at(N, a, lam, rtol)


def _count_at(N, a, lam, rtol):
    return _interior_zeros(_shot(N, a, lam, rtol)[0])


@dataclass(frozen=True)
class Eigenpair:
    value: float
    zeros: int
    shot: object = field(repr=False, compare=False)
    N: int = 3

    def __call__(self, r):
        """(ψ, ψ') at radii r in (0, 1], normalized by ∫ r^{N-3} ψ^2 dr = 1."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        sol, t0, scale = self.shot
        t = np.log(r)
        inner = t < t0
        y = sol.sol(np.clip(t, t0, 0.0))
        theta, log_rho = y[0], y[1]
        w = np.exp(log_rho) * np.sin(theta) * scale
        wt = np.exp(log_rho) * np.cos(theta) * scale
        # below the start radius the solution is the pure power r^β
        kappa = math.sqrt(hardy_constant(self.N) - self.value)
        if inner.any():
            w_start = float(np.exp(sol.sol(t0)[1]) * np.sin(sol.sol(t0)[0]) * scale)
            w[inner] = w_start * np.exp(kappa * (t[inner] - t0))
            wt[inner] = kappa * w[inner]
        m = (self.N - 2) / 2
        psi = r**-m * w
        dpsi = r ** (-m - 1) * (wt - m * w)
        return psi, dpsi


@dataclass(frozen=True)
class SingularSpectrum:
    """Negative singular radial eigenvalues with their oscillation counts."""

    N: int
    eigenvalues: np.ndarray
    zeros: tuple
    potential: Optional[LinearizedPotential] = field(default=None, repr=False, compare=False)
    eigenfunctions: np.ndarray = field(default=None, repr=False, compare=False)
    pairs: tuple = field(default=(), repr=False, compare=False)
    tol: float = 1e-9
    window: tuple = (None, 0.0)

    @classmethod
    def from_values(cls, N, values, p=None):
        vals = np.sort(np.asarray(list(values), dtype=float))
        if np.any(vals >= 0):
            raise InvalidParameterError("singular spectrum lists negative eigenvalues only",
                                        values=list(vals))
        return cls(N, vals, tuple(range(len(vals))), window=(None, 0.0))

    @property
    def count(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def exponent(self):
        return None if self.potential is None else self.potential.exponent

    def eigenfunction(self, k: int) -> Eigenpair:
        return self.pairs[k - 1]

    def to_dict(self) -> dict:
        return {
            "N": int(self.N),
            "p": self.exponent,
            "potential": None if self.potential is None else self.potential.label,
            "eigenvalues": [
                {"k": i + 1, "value": float(v), "zeros": int(z)}
                for i, (v, z) in enumerate(zip(self.eigenvalues, self.zeros))
            ],
            "tolerances": {"eigenvalue": float(self.tol), "shooting_rtol": SHOOT_RTOL},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SingularSpectrum":
        entries = sorted(doc["eigenvalues"], key=lambda e: e["k"])
        vals = [e["value"] for e in entries]
        spec = cls.from_values(int(doc["N"]), vals)
        zeros = tuple(int(e.get("zeros", e["k"] - 1)) for e in entries)
        return cls(spec.N, spec.eigenvalues, zeros,
                   tol=float(doc.get("tolerances", {}).get("eigenvalue", 1e-9)))


def search_window(N: int, a: LinearizedPotential):
    """Bracket (lower, 0) for negative singular eigenvalues.

    Lane-Emden potentials use -(N-1)(1 + margin), which the a-priori bound Λ̂_1 > -(N-1)
    leaves room for; other potentials use the Hardy lower bound
    (N-2)^2/4 - sup r^2 a, padded by one.
    """
    if a.from_lane_emden:
        return -(N - 1) * (1 + PROP35_MARGIN)
    return hardy_constant(N) - sup_r2a(a) - 1.0


def sup_r2a(a: LinearizedPotential, n: int = 20001) -> float:
    """sup of r^2 a(r) over (0, 1], sampled on a fine logarithmic grid."""
    grid = np.geomspace(1e-3 * SERIES_START * a.inner_scale, 1.0, n)
    return float(np.max(a.r2a(grid)))


def negative_singular_eigenvalues(N: int, a: LinearizedPotential, k_max: int = 10,
                                  tol: float = 1e-9, rtol=SHOOT_RTOL) -> SingularSpectrum:
    """All negative Λ̂_k^rad for k <= k_max, refined to ``tol`` by bracketed root finding.

    Each eigenvalue is the unique crossing of the Prüfer angle at r = 1 through
    kπ; the crossing is bracketed by the oscillation count and refined with
    Brent's method.
    """
    if k_max < 1:
        raise InvalidParameterError("k_max must be >= 1", k_max=k_max)
    lower = search_window(N, a)
    n_neg = _count_at(N, a, 0.0, rtol)
    n_low = _count_at(N, a, lower, rtol)
    if n_low > 0:
        if a.from_lane_emden:
            raise BoundViolationError(
                f"{n_low} singular eigenvalue(s) at or below {lower:g}; "
                f"Lane-Emden potentials must satisfy Λ̂_1 > -(N-1)",
                N=N, p=a.exponent, lower=lower)
        raise BracketError(f"eigenvalue below the Hardy lower bound {lower:g}", N=N, lower=lower)

    values, zeros, pairs = [], [], []
    lo = lower
    t0 = _start_time(a)
    r2a = _scalar_r2a(a)
    for k in range(1, min(k_max, n_neg) + 1):
        target = k * math.pi
        f = lambda lam: _shot(N, a, lam, rtol)[0] - target
        lam_k = brentq(f, lo, 0.0, xtol=tol, rtol=4 * np.finfo(float).eps)
        sol = _prufer(hardy_constant(N) - lam_k, r2a, t0, dense=True, rtol=rtol)
        w2 = _l2_weight(sol, t0)
        pairs.append(Eigenpair(lam_k, k - 1, (sol, t0, 1 / math.sqrt(w2)), N))
        values.append(lam_k)
        zeros.append(k - 1)
        lo = lam_k
    grid = a.r
    funcs = np.array([pair(grid)[0] for pair in pairs]) if pairs else np.zeros((0, grid.size))
    return SingularSpectrum(N, np.array(values), tuple(zeros), a, funcs, tuple(pairs), tol,
                            (lower, 0.0))


def _l2_weight(sol, t0, n=20001):
    """∫ r^{N-3} ψ^2 dr = ∫ w^2 dt over [t0, 0] (the tail below t0 is a pure exponential)."""
    t = np.linspace(t0, 0.0, n)
    y = sol.sol(t)
    w2 = np.exp(2 * y[1]) * np.sin(y[0]) ** 2
    kappa = (math.cos(y[0, 0]) / math.sin(y[0, 0]))
    return float(simpson(w2, x=t) + w2[0] / (2 * kappa))


def radial_form_integrals(N: int, a: LinearizedPotential, pair: Eigenpair, chi: Callable,
                          dchi: Callable, n: int = 40001):
    """(∫ r^{N-1} ψ' χ', ∫ r^{N-1} a ψ χ, ∫ r^{N-3} ψ χ) by Simpson quadrature in t = ln r."""
    _, t0, _ = pair.shot
    t = np.linspace(t0, 0.0, n)
    r = np.exp(t)
    psi, dpsi = pair(r)
    c, dc = chi(r), dchi(r)
    grad = simpson(r**N * dpsi * dc, x=t)
    pot = simpson(r ** (N - 2) * a.r2a(r) * psi * c, x=t)
    mass = simpson(r ** (N - 2) * psi * c, x=t)
    return float(grad), float(pot), float(mass)


def weak_form_residual(N: int, a: LinearizedPotential, pair: Eigenpair, chi: Callable,
                       dchi: Callable, n: int = 40001) -> float:
    """Relative residual of the weak form of the singular radial equation.

    ∫ r^{N-1} ψ' χ' - ∫ r^{N-1} a ψ χ - Λ ∫ r^{N-3} ψ χ, divided by the sum of
    the absolute values of the three terms.
    """
    grad, pot, mass = radial_form_integrals(N, a, pair, chi, dchi, n)
    res = grad - pot - pair.value * mass
    return abs(res) / (abs(grad) + abs(pot) + abs(pair.value * mass))


# ---------------------------------------------------------------- standard problem

def _standard_angle(N, a, shift, lam, rtol=SHOOT_RTOL):
    kappa2 = hardy_constant(N) + shift
    r2a = _scalar_r2a(a)
    sol = _prufer(kappa2, lambda r: r2a(r) + lam * r * r, _start_time_standard(a, lam), rtol=rtol)
    return sol.y[0, -1]


def _start_time_standard(a, lam):
    scale = min(a.inner_scale, 1.0 / math.sqrt(max(1.0, abs(lam))))
    return math.log(SERIES_START * scale)


def count_standard_below(N: int, a: LinearizedPotential, shift: float, lam: float = 0.0,
                         rtol=SHOOT_RTOL) -> int:
    """Number of eigenvalues of the shifted standard radial problem strictly below ``lam``."""
    if shift < 0:
        raise InvalidParameterError("angular shift must be >= 0", shift=shift)
    return _interior_zeros(_standard_angle(N, a, shift, lam, rtol))


def standard_radial_eigenvalues(N: int, a: LinearizedPotential, shift: float, count: int,
                                tol: float = 1e-9, rtol=SHOOT_RTOL) -> np.ndarray:
    """Lowest ``count`` eigenvalues of -ψ'' - (N-1)/r ψ' + shift/r^2 ψ - a ψ = Λ ψ, ψ(1) = 0."""
    if shift < 0:
        raise InvalidParameterError("angular shift must be >= 0", shift=shift)
    lo = -a.sup_norm - 1.0
    if count_standard_below(N, a, shift, lo, rtol) > 0:
        raise BracketError("standard eigenvalue below -||a||_inf", N=N, shift=shift)
    hi = max(10.0, 2 * shift)
    while count_standard_below(N, a, shift, hi, rtol) < count:
        hi *= 2
        if hi > 1e9:
            raise BracketError("could not bracket standard eigenvalues", N=N, shift=shift)
    out = []
    for k in range(1, count + 1):
        f = lambda lam: _standard_angle(N, a, shift, lam, rtol) - k * math.pi
        lam_k = brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)
        out.append(lam_k)
        lo = lam_k
    return np.array(out)


# ---------------------------------------------------------------- dense oracles

class OracleResult(NamedTuple):
    values: np.ndarray
    h: float


def _symmetric_tridiagonal(diag, off, weight):
    sw = np.sqrt(weight)
    return diag / weight, off / (sw[:-1] * sw[1:])


def dense_oracle_singular(N: int, a: LinearizedPotential, n: int = 4000,
                          t_min: Optional[float] = None) -> OracleResult:
    """Negative eigenvalues of the finite-difference pencil for the singular problem.

    The Sturm-Liouville form is discretized on a uniform grid in t = ln r,

        -(e^{(N-2)t} ψ_t)_t - e^{(N-2)t} r^2 a ψ = Λ e^{(N-2)t} ψ,

    with ψ = 0 at t_min and at t = 0.  The pencil (A, diag(W)) is symmetric
    definite and is reduced to a symmetric tridiagonal matrix.
    """
    if t_min is None:
        t_min = math.log(1e-2 * SERIES_START * a.inner_scale)
    t = np.linspace(t_min, 0.0, n + 1)
    h = t[1] - t[0]
    ti = t[1:-1]
    tf = 0.5 * (t[1:] + t[:-1])
    P = np.exp((N - 2) * tf)
    W = np.exp((N - 2) * ti)
    q = W * a.r2a(np.exp(ti))
    diag = (P[:-1] + P[1:]) / h**2 - q
    off = -P[1:-1] / h**2
    if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off))):
        raise BracketError("non-finite oracle matrix", N=N, n=n)
    d, e = _symmetric_tridiagonal(diag, off, W)
    vals = eigh_tridiagonal(d, e, eigvals_only=True, select="v",
                            select_range=(-np.inf, 0.0))
    return OracleResult(np.sort(vals), float(h))


def dense_oracle_standard(N: int, a: LinearizedPotential, shift: float, count: int,
                          n: int = 4000) -> OracleResult:
    """Lowest eigenvalues of the cell-centered discretization on a uniform r grid.

    -(r^{N-1} ψ')' + shift r^{N-3} ψ - r^{N-1} a ψ = Λ r^{N-1} ψ; the flux
    vanishes at r = 0 and ψ(1) = 0 is imposed through a half-cell ghost.
    """
    h = 1.0 / n
    rc = (np.arange(n) + 0.5) * h
    rf = np.arange(n + 1) * h
    P = rf ** (N - 1)
    W = rc ** (N - 1)
    diag = np.empty(n)
    diag[:] = (P[:-1] + P[1:]) / h**2
    diag[-1] = P[-2] / h**2 + 2 * P[-1] / h**2
    diag += shift * rc ** (N - 3) - W * a(rc)
    off = -P[1:-1] / h**2
    d, e = _symmetric_tridiagonal(diag, off, W)
    vals = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, count - 1))
    return OracleResult(vals, h)


# ---------------------------------------------------------------- Hardy quotient

def hardy_quotient(N: int, v, r=None, dv=None) -> float:
    """(∫ r^{N-1} v'^2 dr) / (∫ r^{N-3} v^2 dr) for a radial v vanishing at r = 1.

    ``v`` is either an array sampled on ``r`` (with optional derivative
    samples ``dv``) or a callable, in which case ``dv`` must be a callable too
    and both integrals are done adaptively in t = ln r, which handles power
    singularities r^β at the origin without evaluating there.
    """
    if callable(v):
        if dv is None:
            raise InvalidParameterError("callable v needs a callable derivative")
        if abs(v(1.0)) > 1e-12:
            raise InvalidParameterError("test function must vanish at r = 1", v1=v(1.0))
        # the cut at r = e^{-200} keeps r^{β-1} finite for β near the Hardy
        # threshold; both tails decay at the same exponential rate there.  The
        # weight is split before squaring so r^{2β-2} never overflows on its own
        num = quad(lambda t: (math.exp(N * t / 2) * dv(math.exp(t))) ** 2, -200, 0,
                   limit=400)[0]
        den = quad(lambda t: (math.exp((N - 2) * t / 2) * v(math.exp(t))) ** 2, -200, 0,
                   limit=400)[0]
    else:
        r = np.asarray(r, dtype=float)
        v = np.asarray(v, dtype=float)
        if abs(v[-1]) > 1e-12 or abs(r[-1] - 1.0) > 1e-14:
            raise InvalidParameterError("samples must end at r = 1 with v(1) = 0")
        if dv is None:
            dv = np.gradient(v, r, edge_order=2)
        num = simpson(r ** (N - 1) * np.asarray(dv) ** 2, x=r)
        den = simpson(r ** (N - 3) * v**2, x=r)
    if den <= 0 or not math.isfinite(den):
        raise InvalidParameterError("zero denominator: test function vanishes identically")
    if not math.isfinite(num):
        raise InvalidParameterError("test function has infinite Dirichlet energy")
    return float(num / den)
