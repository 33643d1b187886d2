"""Morse indices from radial singular eigenvalues and angular Neumann spectra.

The Morse index of a radial solution on a cone sector is the number of pairs
(k, j), angular eigenvalues counted with multiplicity, with Λ̂_k + λ_j < 0.
This module counts them directly, through the closed-form bucket formula, and
through the standard (nonsingular) radial problems with angular shift; it also
locates the exponent where λ₁(D) + Λ̂₁(p) changes sign.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .cap import AngularMode, CapSpectrum
from .errors import ConeMorseError, CutoffError, InvalidParameterError, NoSignChangeError
from .radial import LinearizedPotential, critical_exponent, linearized_potential, solve_lane_emden
from .singular import (Eigenpair, SingularSpectrum, count_standard_below, hardy_constant,
                       negative_singular_eigenvalues, radial_form_integrals, sup_r2a)

log = logging.getLogger(__name__)

TIE_TOL = 1e-8


def _radial_values(radial) -> np.ndarray:
    if isinstance(radial, SingularSpectrum):
        return np.asarray(radial.eigenvalues, dtype=float)
    vals = np.sort(np.asarray(list(radial), dtype=float))
    if np.any(vals >= 0):
        raise InvalidParameterError("radial spectrum must list negative eigenvalues only",
                                    values=list(vals))
    return vals


@dataclass(frozen=True)
class MorseReport:
    m_rad: int
    m: int
    formula_m: int
    pairs: tuple  # (k, j, Λ̂_k + λ_j), j indexes angular values with repetition
    radial: tuple
    angular: tuple
    warnings: tuple = ()

    def to_dict(self) -> dict:
        return {
            "m_rad": self.m_rad,
            "m": self.m,
            "formula_m": self.formula_m,
            "pairs": [{"k": k, "j": j, "value": float(v)} for k, j, v in self.pairs],
            "radial": [float(v) for v in self.radial],
            "angular": [float(v) for v in self.angular],
            "warnings": list(self.warnings),
        }


def _check_cutoff(angular: CapSpectrum, needed: float, what: str):
    if angular.cutoff < needed:
        raise CutoffError(f"angular spectrum enumerated to {angular.cutoff:g}; "
                          f"{what} needs at least {needed:g}",
                          cutoff=angular.cutoff, needed=needed)


def morse_index_direct(radial, angular: CapSpectrum, tie_tol: float = TIE_TOL) -> MorseReport:
    """Enumerate all (k, j) with Λ̂_k + λ_j < 0, counting λ_j with multiplicity.

    Sums within ``tie_tol`` of zero are treated as nonnegative (not counted)
    and reported as warnings.
    """
    vals = _radial_values(radial)
    lam = angular.values()
    if vals.size:
        _check_cutoff(angular, -vals[0], "Morse counting")
    pairs, warnings = [], []
    for k, v in enumerate(vals, start=1):
        for j, l in enumerate(lam):
            s = v + l
            if abs(s) <= tie_tol:
                warnings.append(f"tie: Λ̂_{k} + λ_{j} = {s:.3e} treated as nonnegative")
            elif s < 0:
                pairs.append((k, j, float(s)))
    return MorseReport(int(vals.size), len(pairs), morse_index_formula(vals, angular, tie_tol),
                       tuple(pairs), tuple(vals), tuple(lam), tuple(warnings))


def morse_index_formula(radial, angular: CapSpectrum, tie_tol: float = TIE_TOL) -> int:
    """Closed-form count: d + Σ_k k · #{j ≥ 1 : -Λ̂_{k+1} ≤ λ_j < -Λ̂_k}, with Λ̂_{d+1} = 0.

    An angular eigenvalue in the k-th bucket pairs with Λ̂_1, ..., Λ̂_k, hence
    the weight k; the j = 0 column contributes one per negative Λ̂_k.
    """
    vals = _radial_values(radial)
    d = int(vals.size)
    if d == 0:
        return 0
    _check_cutoff(angular, -vals[0], "Morse counting")
    lam = angular.values()[1:]  # j >= 1
    bounds = np.append(-vals, 0.0)  # -Λ̂_1 > -Λ̂_2 > ... > -Λ̂_d > 0
    total = d
    for k in range(1, d + 1):
        upper, lower = bounds[k - 1], bounds[k]
        in_bucket = (lam >= lower - tie_tol) & (lam < upper - tie_tol)
        total += k * int(np.count_nonzero(in_bucket))
    return total


def bubble_morse(angular: CapSpectrum, N: int, tie_tol: float = TIE_TOL) -> int:
    """m(U) = #{j ≥ 1 : λ_j < N-1} + 1, with multiplicity; ties count as not below."""
    _check_cutoff(angular, N - 1, "the bubble Morse index")
    lam = angular.values()[1:]
    return int(np.count_nonzero(lam < (N - 1) - tie_tol)) + 1


def count_cutoff(N: int, a: LinearizedPotential) -> float:
    """Angular level above which no shifted standard radial problem has a negative eigenvalue.

    With shift λ, ∫ r^{N-1}(ψ'² + (λ/r² - a)ψ²) ≥ ∫ r^{N-3}((N-2)²/4 + λ - r²a)ψ²
    by the Hardy inequality, so λ ≥ sup r²a - (N-2)²/4 gives no negative
    eigenvalue.  This is much smaller than ||a||_inf for concentrated potentials.
    """
    return max(0.0, sup_r2a(a) * (1 + 1e-6) - hardy_constant(N))


def verify_count_equality(N: int, a: LinearizedPotential, angular: CapSpectrum,
                          radial: Optional[SingularSpectrum] = None, k_max: int = 10):
    """(k_a, k̂_a): standard-problem count versus singular-pair count.

    k_a sums, over angular entries, multiplicity × (number of negative standard
    radial eigenvalues with that shift); k̂_a is the direct pair count.
    """
    if radial is None:
        radial = negative_singular_eigenvalues(N, a, k_max=k_max)
    needed = count_cutoff(N, a)
    if radial.count:
        needed = max(needed, -radial.eigenvalues[0])
    _check_cutoff(angular, needed, "count verification")
    k_hat = morse_index_direct(radial, angular).m
    k_a = 0
    for e in angular.entries:
        k_a += e.multiplicity * count_standard_below(N, a, e.lam, 0.0)
    return int(k_a), int(k_hat)


# ---------------------------------------------------------------- product eigenfunctions

def product_weak_residual(N: int, a: LinearizedPotential, pair: Eigenpair, mode: AngularMode,
                          chi: Callable, dchi: Callable, h: Callable, dh: Callable) -> float:
    """Relative weak-form residual of ψ_k(r) g(θ) Y_ℓ against χ(r) h(θ) Y_ℓ on the sector.

    The harmonic factor Y_ℓ integrates to the same constant in every term and
    drops out; the rest separates into radial and angular integrals.
    """
    grad_r, pot_r, mass_r = radial_form_integrals(N, a, pair, chi, dchi)
    L = mode.ell * (mode.ell + N - 3)
    th0 = mode.theta0
    g = lambda t: mode(t)[0][0]
    dg = lambda t: mode(t)[1][0]
    b_mass = quad(lambda t: math.sin(t) ** (N - 2) * g(t) * h(t), 0, th0, limit=200)[0]
    b_grad = quad(lambda t: math.sin(t) ** (N - 2) * dg(t) * dh(t), 0, th0, limit=200)[0]
    b_cent = 0.0
    if L:
        b_cent = quad(lambda t: math.sin(t) ** (N - 4) * g(t) * h(t), 0, th0, limit=200)[0]
    grad = grad_r * b_mass + mass_r * (b_grad + L * b_cent)
    pot = pot_r * b_mass
    mass = mass_r * b_mass
    lam = pair.value + mode.lam
    res = grad - pot - lam * mass
    return abs(res) / (abs(grad) + abs(pot) + abs(lam * mass))


# ---------------------------------------------------------------- threshold search

@dataclass(frozen=True)
class ThresholdResult:
    N: int
    lambda1: float
    status: str  # "bracketed" or "no-breaking-detected"
    p0: Optional[float] = None
    bracket: Optional[tuple] = None
    signs: Optional[tuple] = None  # λ₁ + Λ̂₁ at (p_lo, p_hi)
    samples: tuple = ()  # rows (p, Λ̂₁(p), λ₁ + Λ̂₁(p))
    brackets: tuple = ()  # every coarse sign change, (p_lo, p_hi)
    tol: float = 1e-3
    spectrum: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bracket"] = None if self.bracket is None else list(self.bracket)
        d["signs"] = None if self.signs is None else list(self.signs)
        d["samples"] = [list(map(float, row)) for row in self.samples]
        d["brackets"] = [list(b) for b in self.brackets]
        return d


def lambda_hat_1(N: int, p: float, tol: float = 1e-10) -> float:
    """Λ̂₁(p) of the Lane-Emden potential; 0.0 if no negative eigenvalue exists."""
    pot = linearized_potential(solve_lane_emden(N, p))
    spec = negative_singular_eigenvalues(N, pot, k_max=1, tol=tol)
    return float(spec.eigenvalues[0]) if spec.count else 0.0


def _lh1_task(args):
    return lambda_hat_1(*args)


def default_sweep(N: int) -> np.ndarray:
    pS = critical_exponent(N)
    s = np.array([0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95])
    return 1 + (pS - 1) * s


def symmetry_breaking_threshold(N: int, angular: CapSpectrum, tol: float = 1e-3,
                                p_samples: Optional[Sequence[float]] = None, jobs: int = 1,
                                tie_tol: float = TIE_TOL) -> ThresholdResult:
    """Locate p₀ where λ₁(D) + Λ̂₁(p) changes sign from positive to negative.

    A coarse sweep over ``p_samples`` finds every sign change; the first one
    (in increasing p) is refined by bisection until the bracket is shorter
    than ``tol``.
    """
    lam1 = angular.first_nontrivial
    label = "external" if angular.external else f"cap(N={angular.N}, theta0={angular.theta0:.12g})"
    if lam1 >= (N - 1) - tie_tol:
        return ThresholdResult(N, lam1, "no-breaking-detected", tol=tol, spectrum=label)
    ps = np.sort(np.asarray(default_sweep(N) if p_samples is None else p_samples, dtype=float))
    pS = critical_exponent(N)
    if ps[0] <= 1 or ps[-1] >= pS:
        raise InvalidParameterError("sweep exponents must lie in (1, p_S)", p=list(ps))
    tasks = [(N, float(p)) for p in ps]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            lh = list(pool.map(_lh1_task, tasks))
    else:
        lh = [_lh1_task(t) for t in tasks]
    rows = [(float(p), v, lam1 + v) for p, v in zip(ps, lh)]
    brackets = [(a[0], b[0]) for a, b in zip(rows, rows[1:]) if a[2] > 0 > b[2]]
    if not brackets:
        raise NoSignChangeError("λ₁ + Λ̂₁(p) has no sign change on the sampled exponents",
                                samples=rows, N=N, lambda1=lam1)
    if len(brackets) > 1:
        log.warning("%d sign changes found; refining the first", len(brackets))
    lo, hi = brackets[0]
    f_lo = next(r[2] for r in rows if r[0] == lo)
    f_hi = next(r[2] for r in rows if r[0] == hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        v = lambda_hat_1(N, mid)
        f = lam1 + v
        rows.append((mid, v, f))
        if f > 0:
            lo, f_lo = mid, f
        elif f < 0:
            hi, f_hi = mid, f
        else:
            lo = hi = mid
            f_lo = f_hi = 0.0
    rows.sort()
    return ThresholdResult(N, lam1, "bracketed", 0.5 * (lo + hi), (lo, hi), (f_lo, f_hi),
                           tuple(rows), tuple(brackets), tol, label)
