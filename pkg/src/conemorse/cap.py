"""Neumann spectrum of the Laplace-Beltrami operator on geodesic caps.

On the cap D = {θ < θ₀} ⊂ S^{N-1} the eigenfunctions separate as
g(θ) Y_ℓ(ω) with Y_ℓ a degree-ℓ harmonic on S^{N-2}, and g solves

    -g'' - (N-2) cot θ g' + ℓ(ℓ+N-3)/sin²θ g = λ g,   g'(θ₀) = 0,

with the regular branch g ~ θ^ℓ at the pole.  Shooting uses the Prüfer
angle φ (g = ρ sin φ, g' = ρ cos φ): the m-th Neumann eigenvalue of the
ℓ-branch is the λ with φ(θ₀) = π/2 + mπ.

Indexing: λ₀ = 0 is the constant mode, λ₁ is the first nontrivial value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq
from scipy.special import comb

from .errors import BracketError, InvalidParameterError, SpectrumFormatError

THETA_START = 1e-6
ANGLE_RTOL = 1e-12


class Shot(NamedTuple):
    value: float  # Neumann defect g'(θ₀), with g ~ θ^ℓ at the pole
    zeros: int
    angle: float


def multiplicity(ell: int, N: int) -> int:
    """Dimension of degree-ℓ spherical harmonics on S^{N-2}."""
    if ell < 0 or N < 3:
        raise InvalidParameterError("need ell >= 0 and N >= 3", ell=ell, N=N)
    n = N - 1  # ambient dimension of S^{N-2}
    if ell == 0:
        return 1
    return int(comb(ell + n - 1, n - 1, exact=True) - comb(ell + n - 3, n - 1, exact=True))


def sphere_area(k: int) -> float:
    """Surface measure of the unit sphere S^k."""
    return 2 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)


def cap_measure(N: int, theta0: float) -> float:
    """(N-1)-dimensional measure |D| of the cap of half-angle θ₀ in S^{N-1}."""
    return sphere_area(N - 2) * quad(lambda t: math.sin(t) ** (N - 2), 0, theta0)[0]


def _check_cap(N, theta0):
    if N < 3:
        raise InvalidParameterError("dimension must be >= 3", N=N)
    if not 0 < theta0 < math.pi:
        raise InvalidParameterError("cap half-angle must lie in (0, pi)", theta0=theta0)


def _start(N, ell, lam):
    ts = THETA_START
    if ell == 0:
        return ts, 1 - lam * ts**2 / (2 * (N - 1)), -lam * ts / (N - 1)
    return ts, ts**ell, ell * ts ** (ell - 1)


def _angular(N, ell, theta0, lam, dense=False, rtol=ANGLE_RTOL):
    L = ell * (ell + N - 3)
    ts, g, dg = _start(N, ell, lam)

    def rhs(t, y):
        s, c = math.sin(y[0]), math.cos(y[0])
        st = math.sin(t)
        cot = math.cos(t) / st
        q = lam - L / (st * st)
        return [c * c + (N - 2) * cot * s * c + q * s * s,
                s * c * (1.0 - q) - (N - 2) * cot * c * c]

    y0 = [math.atan2(g, dg), 0.5 * math.log(g * g + dg * dg)]
    sol = solve_ivp(rhs, (ts, theta0), y0, method="DOP853", rtol=rtol,
                    atol=[rtol * 0.1, rtol * 0.1], dense_output=dense)
    if not sol.success:
        raise BracketError(f"angular integration failed: {sol.message}", N=N, ell=ell)
    return sol


def angular_shoot(N: int, ell: int, theta0: float, lam: float, rtol=ANGLE_RTOL) -> Shot:
    """Shoot the ℓ-branch from the pole to θ₀; returns g'(θ₀) and interior zeros."""
    _check_cap(N, theta0)
    if ell < 0:
        raise InvalidParameterError("ell must be >= 0", ell=ell)
    sol = _angular(N, ell, theta0, lam, rtol=rtol)
    phi, log_rho = sol.y[0, -1], sol.y[1, -1]
    return Shot(math.exp(min(log_rho, 700.0)) * math.cos(phi),
                int(math.floor(phi / math.pi)), float(phi))


def _phi_end(N, ell, theta0, lam, rtol=ANGLE_RTOL):
    return _angular(N, ell, theta0, lam, rtol=rtol).y[0, -1]


def _branch_count(phi):
    """Number of Neumann eigenvalues <= λ given φ(θ₀; λ)."""
    if phi < math.pi / 2:
        return 0
    return int(math.floor((phi - math.pi / 2) / math.pi)) + 1


def branch_eigenvalues(N: int, ell: int, theta0: float, lam_max: float,
                       tol: float = 1e-11, rtol=ANGLE_RTOL) -> np.ndarray:
    """All Neumann eigenvalues ≤ lam_max of the ℓ-branch, in order of mode index."""
    _check_cap(N, theta0)
    count = _branch_count(_phi_end(N, ell, theta0, lam_max, rtol))
    out = []
    lo = -1.0
    for m in range(count):
        target = math.pi / 2 + m * math.pi
        if ell == 0 and m == 0:
            out.append(0.0)  # constants, exactly
            lo = 0.0
            continue
        lam = brentq(lambda x: _phi_end(N, ell, theta0, x, rtol) - target, lo, lam_max,
                     xtol=tol, rtol=4 * np.finfo(float).eps)
        out.append(lam)
        lo = lam
    return np.array(out)


@dataclass(frozen=True)
class AngularMode:
    """Neumann eigenfunction g(θ) of one branch, normalized by ∫ g² sin^{N-2} = 1."""

    N: int
    ell: int
    mode: int
    lam: float
    theta0: float
    sol: object = field(repr=False, compare=False)
    scale: float = 1.0

    def __call__(self, theta):
        """(g, g') at angles θ in (0, θ₀]; below the start angle the leading series is used."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        t = np.clip(theta, THETA_START, self.theta0)
        y = self.sol.sol(t)
        g = np.exp(y[1]) * np.sin(y[0]) * self.scale
        dg = np.exp(y[1]) * np.cos(y[0]) * self.scale
        inner = theta < THETA_START
        if inner.any():
            ts, g0, dg0 = _start(self.N, self.ell, self.lam)
            ratio = np.exp(y[1, 0]) * self.scale / math.hypot(g0, dg0)
            if self.ell == 0:
                g[inner] = ratio * (1 - self.lam * theta[inner] ** 2 / (2 * (self.N - 1)))
                dg[inner] = ratio * (-self.lam * theta[inner] / (self.N - 1))
            else:
                g[inner] = ratio * theta[inner] ** self.ell
                dg[inner] = ratio * self.ell * theta[inner] ** (self.ell - 1)
        return g, dg

    @property
    def zeros(self) -> int:
        return int(math.floor(self.sol.y[0, -1] / math.pi))


def angular_mode(N: int, ell: int, theta0: float, lam: float, mode: int = 0) -> AngularMode:
    """Dense eigenfunction at a known Neumann eigenvalue ``lam``."""
    _check_cap(N, theta0)
    sol = _angular(N, ell, theta0, lam, dense=True)
    raw = AngularMode(N, ell, mode, lam, theta0, sol, 1.0)
    norm = quad(lambda t: raw(t)[0][0] ** 2 * math.sin(t) ** (N - 2), 0, theta0, limit=200)[0]
    return AngularMode(N, ell, mode, lam, theta0, sol, 1 / math.sqrt(norm))


@dataclass(frozen=True)
class CapEntry:
    lam: float
    ell: Optional[int]
    mode: Optional[int]
    multiplicity: int

    def to_dict(self) -> dict:
        d = {"lambda": float(self.lam), "multiplicity": int(self.multiplicity)}
        if self.ell is not None:
            d["ell"] = int(self.ell)
        if self.mode is not None:
            d["mode"] = int(self.mode)
        return d


@dataclass(frozen=True)
class CapSpectrum:
    """Neumann eigenvalues with multiplicities, sorted, complete up to ``cutoff``."""

    N: int
    theta0: Optional[float]  # None for an external spectrum
    entries: tuple
    cutoff: float

    @property
    def external(self) -> bool:
        return self.theta0 is None

    def values(self) -> np.ndarray:
        """Eigenvalues repeated according to multiplicity."""
        return np.repeat([e.lam for e in self.entries],
                         [e.multiplicity for e in self.entries]).astype(float)

    @property
    def first_nontrivial(self) -> float:
        """λ₁, the lowest eigenvalue above the constant mode."""
        return float(self.first_nontrivial_entry().lam)

    def first_nontrivial_entry(self) -> CapEntry:
        if len(self.entries) < 2:
            raise SpectrumFormatError(
                f"no nontrivial eigenvalue up to the cutoff {self.cutoff:g}", cutoff=self.cutoff)
        return self.entries[1]

    def to_dict(self) -> dict:
        return {
            "N": int(self.N),
            "theta0": "external" if self.external else float(self.theta0),
            "cutoff": float(self.cutoff),
            "entries": [e.to_dict() for e in self.entries],
        }


def cap_neumann_eigenvalues(N: int, theta0: float, lam_max: float,
                            tol: float = 1e-11) -> CapSpectrum:
    """All Neumann eigenvalues ≤ lam_max on the cap of half-angle θ₀, with multiplicity.

    Branches are enumerated for ℓ = 0, 1, ... until the branch minimum exceeds
    lam_max; branch minima increase with ℓ, so no eigenvalue is missed.
    """
    _check_cap(N, theta0)
    if not lam_max > 0:
        raise InvalidParameterError("lam_max must be positive", lam_max=lam_max)
    entries = []
    ell = 0
    while True:
        vals = branch_eigenvalues(N, ell, theta0, lam_max, tol)
        if vals.size == 0:
            break
        mult = multiplicity(ell, N)
        entries.extend(CapEntry(float(v), ell, m, mult) for m, v in enumerate(vals))
        ell += 1
    entries.sort(key=lambda e: (e.lam, e.ell, e.mode))
    return CapSpectrum(N, float(theta0), tuple(entries), float(lam_max))


def load_spectrum(doc: dict) -> CapSpectrum:
    """Validate a user-supplied spectrum document and return it tagged external.

    Accepts ``{"N": .., "entries": [{"lambda": .., "multiplicity": ..}, ...]}``
    (the CapSpectrum JSON layout) or a bare list of (lambda, multiplicity) pairs
    under ``entries``.  The spectrum is taken to be complete up to ``cutoff``,
    which defaults to the largest listed eigenvalue.
    """
    if "N" not in doc or "entries" not in doc:
        raise SpectrumFormatError("spectrum document needs 'N' and 'entries'")
    N = int(doc["N"])
    raw = []
    for item in doc["entries"]:
        if isinstance(item, dict):
            raw.append((float(item["lambda"]), int(item.get("multiplicity", 1)),
                        item.get("ell"), item.get("mode")))
        else:
            lam, mult = item
            raw.append((float(lam), int(mult), None, None))
    if not raw:
        raise SpectrumFormatError("empty spectrum")
    lams = [r[0] for r in raw]
    if any(lam < 0 for lam in lams):
        raise SpectrumFormatError("negative Neumann eigenvalue", values=lams)
    if any(m < 1 for _, m, _, _ in raw):
        raise SpectrumFormatError("multiplicities must be >= 1")
    if raw[0][0] != 0 or raw[0][1] != 1:
        raise SpectrumFormatError("first entry must be the simple zero mode (0, 1)",
                                  first=list(raw[0][:2]))
    if any(lam == 0 for lam in lams[1:]):
        raise SpectrumFormatError("the zero mode must be simple", values=lams)
    if any(b < a for a, b in zip(lams, lams[1:])):
        raise SpectrumFormatError("eigenvalues must be sorted ascending", values=lams)
    cutoff = float(doc.get("cutoff", lams[-1]))
    if cutoff < lams[-1]:
        raise SpectrumFormatError("cutoff lies below the largest listed eigenvalue",
                                  cutoff=cutoff, largest=lams[-1])
    entries = tuple(CapEntry(lam, None, None, m) for lam, m, _, _ in raw)
    theta0 = doc.get("theta0", "external")
    if theta0 != "external":
        # a cap spectrum written by this package: keep its labels and angle
        entries = tuple(CapEntry(lam, ell, mode, m) for lam, m, ell, mode in raw)
        return CapSpectrum(N, float(theta0), entries, cutoff)
    return CapSpectrum(N, None, entries, cutoff)


class OracleResult(NamedTuple):
    values: np.ndarray
    h: float


def dense_oracle_cap(N: int, ell: int, theta0: float, count: int, n: int = 2000) -> OracleResult:
    """Lowest ``count`` eigenvalues of a cell-centered finite-volume discretization.

    -(sin^{N-2} g')' + ℓ(ℓ+N-3) sin^{N-4} g = λ sin^{N-2} g with zero flux at
    the pole and at θ₀.
    """
    _check_cap(N, theta0)
    h = theta0 / n
    tc = (np.arange(n) + 0.5) * h
    tf = np.arange(n + 1) * h
    P = np.sin(tf) ** (N - 2)
    P[0] = P[-1] = 0.0
    W = np.sin(tc) ** (N - 2)
    q = ell * (ell + N - 3) * np.sin(tc) ** (N - 4)
    d = (P[:-1] + P[1:]) / h**2 + q
    e = -P[1:-1] / h**2
    sw = np.sqrt(W)
    vals = eigh_tridiagonal(d / W, e / (sw[:-1] * sw[1:]), eigvals_only=True,
                            select="i", select_range=(0, count - 1))
    return OracleResult(vals, h)
