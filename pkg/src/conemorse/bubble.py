"""The critical bubble, its singular eigenpair, and the subcritical limit.

U(r) = A (B + r²)^{-(N-2)/2} solves -ΔU = U^{p_S} on R^N.  Two
normalizations are used: the α_N form (A = α_N λ^{(N-2)/2}, B = λ²) and
the unit-peak form, which is the α_N form with λ = sqrt(N(N-2)).

For the unit-peak bubble the function

    η(r) = r / (1 + r²/(N(N-2)))^{N/2}

solves -Δη - Vη = -(N-1) η / r² with V = p_S U^{p_S-1}, so -(N-1) is the
singular eigenvalue of the limit problem.  η ⊗ φ for an angular Neumann
eigenfunction φ is a negative direction of Q_U exactly when λ(φ) < N-1.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import beta as beta_fn

from .cap import AngularMode, cap_measure, sphere_area
from .errors import InvalidParameterError
from .radial import critical_exponent, linearized_potential, solve_lane_emden
from .singular import negative_singular_eigenvalues

TAIL_TOL = 1e-12
NORMALIZATIONS = ("alpha", "peak")


def alpha_N(N: int) -> float:
    return (N * (N - 2)) ** ((N - 2) / 4)


def _coefficients(N, lam, normalization):
    if lam <= 0:
        raise InvalidParameterError("bubble scale must be positive", lam=lam)
    if normalization == "alpha":
        return alpha_N(N) * lam ** ((N - 2) / 2), lam**2
    if normalization == "peak":
        return (N * (N - 2)) ** ((N - 2) / 2) * lam ** ((N - 2) / 2), N * (N - 2) * lam**2
    raise InvalidParameterError(f"normalization must be one of {NORMALIZATIONS}",
                                normalization=normalization)


def bubble_value(N: int, lam: float, r, normalization: str = "alpha"):
    """U(r); with ``normalization='peak'`` and λ = 1, U(0) = 1."""
    A, B = _coefficients(N, lam, normalization)
    r = np.asarray(r, dtype=float)
    return A * (B + r * r) ** (-(N - 2) / 2)


def bubble_potential(N: int, lam: float, r, normalization: str = "alpha"):
    """V = p_S U^{p_S - 1}."""
    pS = critical_exponent(N)
    return pS * bubble_value(N, lam, r, normalization) ** (pS - 1)


def bubble_residual(N: int, lam: float, r, normalization: str = "alpha"):
    """-ΔU - U^{p_S} from the closed-form derivatives, summed term by term."""
    A, B = _coefficients(N, lam, normalization)
    r = np.asarray(r, dtype=float)
    m = (N - 2) / 2
    s = B + r * r
    ddU = -2 * m * A * s ** (-m - 1) + 4 * m * (m + 1) * A * r * r * s ** (-m - 2)
    dU_over_r = -2 * m * A * s ** (-m - 1)  # U'/r, regular at 0
    return -(ddU + (N - 1) * dU_over_r) - (A * s**-m) ** critical_exponent(N)


def eta_value(N: int, r):
    r = np.asarray(r, dtype=float)
    return r / (1 + r * r / (N * (N - 2))) ** (N / 2)


def eta_derivative(N: int, r):
    r = np.asarray(r, dtype=float)
    s = 1 + r * r / (N * (N - 2))
    return s ** (-N / 2 - 1) * (s - r * r / (N - 2))


def _fd_second(f, r, h):
    """8th-order central difference for f''."""
    w = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])
    return sum(wk * f(r + k * h) for wk, k in zip(w, range(-4, 5))) / h**2


def _fd_first(f, r, h):
    w = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
    return sum(wk * f(r + k * h) for wk, k in zip(w, range(-4, 5))) / h


def eta_residual(N: int, r, include_hardy: bool = True):
    """-η'' - (N-1)/r η' - V η + (N-1) η / r², derivatives by finite differences.

    With ``include_hardy=False`` the last term is dropped (negative control).
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise InvalidParameterError("eta_residual needs r > 0")
    h = np.minimum(0.1 * r, 1e-2)
    f = lambda x: eta_value(N, x)
    eta = f(r)
    res = (-_fd_second(f, r, h) - (N - 1) / r * _fd_first(f, r, h)
           - bubble_potential(N, 1.0, r, "peak") * eta)
    if include_hardy:
        res = res + (N - 1) * eta / (r * r)
    return res


def _radial_integral(f, N, decay_power, const):
    """∫₀^∞ f with |f| ≤ const · r^{-decay_power} for large r; returns (value, tail bound)."""
    R = (const / ((decay_power - 1) * TAIL_TOL)) ** (1 / (decay_power - 1))
    R = max(R, 10.0)
    edges = [0.0, 1.0] + list(np.geomspace(10.0, R, max(2, int(math.log10(R)) + 1)))
    edges = sorted(set(edges))
    total = sum(quad(f, a, b, limit=200, epsabs=1e-15, epsrel=1e-13)[0]
                for a, b in zip(edges, edges[1:]))
    bound = const * R ** (1 - decay_power) / (decay_power - 1)
    return total, bound


def eta_integrals(N: int):
    """(∫ r^{N-1} η'², ∫ r^{N-1} V η², ∫ r^{N-3} η²) over (0, ∞), with the summed tail bound."""
    C = (N * (N - 2)) ** (N / 2)  # η ≤ C r^{1-N}
    V = lambda r: float(bubble_potential(N, 1.0, r, "peak"))
    e = lambda r: float(eta_value(N, r))
    de = lambda r: float(eta_derivative(N, r))
    grad, b1 = _radial_integral(lambda r: r ** (N - 1) * de(r) ** 2, N, N + 1, 4 * (N - 1) ** 2 * C**2)
    pot, b2 = _radial_integral(lambda r: r ** (N - 1) * V(r) * e(r) ** 2, N, N + 3,
                               critical_exponent(N) * (N * (N - 2)) ** 2 * C**2)
    mass, b3 = _radial_integral(lambda r: r ** (N - 3) * e(r) ** 2, N, N + 1, C**2)
    return grad, pot, mass, b1 + b2 + b3


def eta_rayleigh_quotient(N: int) -> float:
    """(∫ |∇η|² - V η²) / ∫ η²/|x|² for the radial η; equals -(N-1)."""
    grad, pot, mass, _ = eta_integrals(N)
    return (grad - pot) / mass


def q_u_on_bubble(N: int, theta0: float = math.pi / 2) -> float:
    """Q_U(U) = (1 - p_S) ∫ U^{2*} over the cone, α_N bubble with λ = 1."""
    two_star = 2 * N / (N - 2)
    A = alpha_N(N)
    radial, _ = _radial_integral(lambda r: r ** (N - 1) * A**two_star * (1 + r * r) ** -N,
                                 N, N + 1, A**two_star)
    return (1 - critical_exponent(N)) * cap_measure(N, theta0) * radial


def q_u_on_bubble_exact(N: int, theta0: float = math.pi / 2) -> float:
    """Closed form of q_u_on_bubble via ∫₀^∞ r^{N-1}(1+r²)^{-N} dr = B(N/2, N/2)/2."""
    two_star = 2 * N / (N - 2)
    return ((1 - critical_exponent(N)) * cap_measure(N, theta0)
            * alpha_N(N) ** two_star * beta_fn(N / 2, N / 2) / 2)


@dataclass(frozen=True)
class Step1Form:
    value: float
    radial_grad: float
    radial_pot: float
    radial_mass: float
    angular_mass: float
    angular_grad: float

    @property
    def predicted(self) -> float:
        """(-(N-1) + λ) ∫ ψ²/|x|², with λ read from the angular quotient."""
        lam = self.angular_grad / self.angular_mass
        return (self.radial_grad - self.radial_pot + lam * self.radial_mass) * self.angular_mass


def step1_test_function_form(N: int, mode: AngularMode) -> Step1Form:
    """Q_U(η φ) for φ = g(θ) Y_ℓ on the cap, by separated quadrature.

    The angular factors are computed from g by quadrature (not from λ):
    ∫ φ² = |S^{N-2}| ∫ sin^{N-2} g², ∫ |∇φ|² = |S^{N-2}| ∫ sin^{N-2}(g'² + L g²/sin²).
    """
    grad, pot, mass, _ = eta_integrals(N)
    L = mode.ell * (mode.ell + N - 3)
    th0 = mode.theta0
    g = lambda t: mode(t)[0][0]
    dg = lambda t: mode(t)[1][0]
    area = sphere_area(N - 2)
    b = area * quad(lambda t: math.sin(t) ** (N - 2) * g(t) ** 2, 0, th0, limit=200)[0]
    gr = area * quad(lambda t: math.sin(t) ** (N - 2) * dg(t) ** 2
                     + (L * math.sin(t) ** (N - 4) * g(t) ** 2 if L else 0.0),
                     0, th0, limit=200)[0]
    value = (grad - pot) * b + mass * gr
    return Step1Form(value, grad, pot, mass, b, gr)


# ---------------------------------------------------------------- limit study

@dataclass(frozen=True)
class LimitTable:
    N: int
    rows: tuple  # (p, Λ̂₁(p), gap, V_p diagnostic)

    @property
    def gaps(self) -> np.ndarray:
        return np.array([row[2] for row in self.rows])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "lambda_hat_1_rad", "gap", "Vp_diagnostic"])
        for row in self.rows:
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


def vp_diagnostic(sol, ball_radius: float = 5.0, n: int = 2001) -> float:
    """sup_{|x| ≤ ball_radius} |V_p - V| for the rescaled potential V_p(x) = p v(x)^{p-1}."""
    N, p = sol.N, sol.p
    x = np.linspace(0.0, ball_radius, n)
    inside = x < sol.first_zero
    v = np.zeros_like(x)
    v[inside] = np.maximum(sol.unit_profile(x[inside])[0], 0.0)
    Vp = p * v ** (p - 1)
    return float(np.max(np.abs(Vp - bubble_potential(N, 1.0, x, "peak"))))


def _limit_row(args):
    N, p, tol = args
    sol = solve_lane_emden(N, p)
    spec = negative_singular_eigenvalues(N, linearized_potential(sol), k_max=1, tol=tol)
    lh = float(spec.eigenvalues[0]) if spec.count else 0.0
    return (float(p), lh, lh + (N - 1), vp_diagnostic(sol))


def limit_study(N: int, p_list: Sequence[float], tol: float = 1e-12, jobs: int = 1) -> LimitTable:
    """Λ̂₁(p) and its gap above -(N-1) along an ascending list of exponents."""
    ps = [float(p) for p in p_list]
    if any(b <= a for a, b in zip(ps, ps[1:])):
        raise InvalidParameterError("p_list must be strictly ascending", p_list=ps)
    tasks = [(N, p, tol) for p in ps]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_limit_row, tasks))
    else:
        rows = [_limit_row(t) for t in tasks]
    return LimitTable(N, tuple(rows))
