"""Positive radial Lane-Emden solutions in the unit ball and their linearization.

The solver integrates the unit-peak profile v'' + (N-1)/x v' + v^p = 0,
v(0) = 1, v'(0) = 0, locates its first zero R and rescales,

    u(r) = M v(R r),   M = R^{2/(p-1)},

so that u(1) = 0.  Everything downstream (the potential a = p u^{p-1}, the
singular eigenproblem) is evaluated through the profile, which keeps numbers
of order one even when M is huge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import InvalidParameterError, NoFirstZeroError, StepSizeUnderflowError

SERIES_START = 1e-6
DEFAULT_STEP_CONTROL = (1e-12, 1e-14)
DEFAULT_GRID_SIZE = 4096


def critical_exponent(N: int) -> float:
    """Sobolev exponent p_S = (N+2)/(N-2)."""
    return (N + 2) / (N - 2)


def _check_dimension(N):
    if int(N) != N or N < 3:
        raise InvalidParameterError(f"dimension must be an integer >= 3, got {N}", N=N)


def _power(v, p):
    return np.sign(v) * np.abs(v) ** p


@dataclass(frozen=True)
class Trajectory:
    """Output of :func:`integrate_radial`."""

    N: int
    p: float
    u0: float
    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    first_zero: Optional[float]
    r_start: float
    dense: Optional[Callable] = field(default=None, repr=False, compare=False)

    def __call__(self, r):
        """Evaluate (u, u') anywhere on [0, r_end] with the series below r_start."""
        r = np.asarray(r, dtype=float)
        u = np.empty_like(r)
        du = np.empty_like(r)
        inner = r < self.r_start
        if self.u0 == 0.0 or self.dense is None:
            u[...] = 0.0
            du[...] = 0.0
            return u, du
        ri = r[inner]
        u[inner] = self.u0 - self.u0**self.p * ri**2 / (2 * self.N)
        du[inner] = -self.u0**self.p * ri / self.N
        if np.any(~inner):
            ro = np.minimum(r[~inner], self.r[-1])
            y = self.dense(ro)
            u[~inner] = y[0]
            du[~inner] = y[1]
        return u, du


def integrate_radial(N, p, u0, r_max, step_control=DEFAULT_STEP_CONTROL, zero_tol=1e-12):
    """Integrate u'' + (N-1)/r u' + |u|^{p-1} u = 0 with u(0) = u0, u'(0) = 0.

    Integration starts from the two-term regular series at a start radius of
    ``SERIES_START`` measured in the natural length u0^{-(p-1)/2}, so the
    Lane-Emden scaling symmetry is preserved exactly by the discretization.
    Stops at r_max or at the first sign change of u; in the latter case the
    zero is refined by bisection on the dense output and reported.
    """
    _check_dimension(N)
    if p <= 1:
        raise InvalidParameterError(f"exponent must exceed 1, got {p}", N=N, p=p)
    if u0 < 0:
        raise InvalidParameterError(f"u0 must be nonnegative, got {u0}", u0=u0)
    rtol, atol = step_control
    if u0 == 0.0:
        r = np.array([0.0, float(r_max)])
        zeros = np.zeros(2)
        return Trajectory(N, p, 0.0, r, zeros, zeros.copy(), None, 0.0)

    length = u0 ** (-(p - 1) / 2)
    r0 = SERIES_START * length
    y0 = [u0 - u0**p * r0**2 / (2 * N), -u0**p * r0 / N]

    def rhs(r, y):
        return [y[1], -(N - 1) / r * y[1] - _power(y[0], p)]

    def crossing(r, y):
        return y[0]

    crossing.terminal = True
    crossing.direction = -1

    # atol is relative to the peak so that the scaled problems are identical
    sol = solve_ivp(rhs, (r0, r_max), y0, method="DOP853", rtol=rtol,
                    atol=[atol * u0, atol * u0 / length], events=crossing,
                    dense_output=True)
    if sol.status == -1:
        raise StepSizeUnderflowError(f"radial integration failed: {sol.message}",
                                     N=N, p=p, u0=u0)
    zero = None
    if sol.t_events[0].size:
        guess = sol.t_events[0][0]
        lo = sol.t[-2] if sol.t.size > 1 else r0
        f = lambda x: sol.sol(x)[0]
        if f(lo) > 0 and f(guess) * f(lo) <= 0:
            zero = brentq(f, lo, guess, xtol=zero_tol * length, rtol=4 * np.finfo(float).eps)
        else:
            zero = guess
    return Trajectory(N, p, float(u0), sol.t, sol.y[0], sol.y[1], zero, r0, sol.sol)


def _fd_weights(offsets):
    """First-derivative finite-difference weights on integer offsets (unit spacing)."""
    offsets = np.asarray(offsets, dtype=float)
    n = offsets.size
    A = np.vander(offsets, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[1] = 1.0
    return np.linalg.solve(A, rhs)


def _default_grid(size):
    n_left = size // 2
    left = np.geomspace(SERIES_START, 0.5, n_left)
    right = 1.0 - np.geomspace(0.5, 1e-7, size - n_left)[1:]
    return np.concatenate([left, right, [1.0]])


@dataclass(frozen=True)
class RadialSolution:
    """Positive radial solution on (0, 1] sampled on a fixed grid.

    ``first_zero`` is the first zero R of the unit-peak profile; the peak is
    M_p = R^{2/(p-1)}.  ``profile`` evaluates (v, v') of the unit-peak
    problem at x = R r.
    """

    N: int
    p: float
    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    peak: float
    first_zero: float
    step_control: tuple = DEFAULT_STEP_CONTROL
    tol: float = 1e-12
    profile: Optional[Trajectory] = field(default=None, repr=False, compare=False)

    @classmethod
    def zero(cls, N, p, grid_size=DEFAULT_GRID_SIZE):
        r = _default_grid(grid_size)
        z = np.zeros_like(r)
        return cls(N, p, r, z, z.copy(), 0.0, 1.0)

    def evaluate(self, r):
        """(u, u') at arbitrary radii in [0, 1]."""
        r = np.asarray(r, dtype=float)
        if self.profile is None:
            return np.zeros_like(r), np.zeros_like(r)
        R = self.first_zero
        v, dv = self.profile(R * r)
        v = np.where(r <= 1.0, v, 0.0)
        return self.peak * v, self.peak * R * dv

    def unit_profile(self, x):
        """(v, v') of the unit-peak profile at x = R r."""
        if self.profile is None:
            x = np.asarray(x, dtype=float)
            return np.zeros_like(x), np.zeros_like(x)
        return self.profile(x)

    def residual(self, step=1e-2):
        """Sup-normalized ODE residual on the grid.

        Returns (u'' + (N-1)/r u' + u^p) / M^p at the grid radii outside the
        series-start region.  u'' is
        taken from an 8th-order central difference of the dense output of
        u', so the residual is not implied by construction.  Dividing by M^p
        makes the number scale free (it equals the residual of the unit-peak
        profile at x = R r).
        """
        if self.profile is None:
            return np.zeros_like(self.r)
        N, p = self.N, self.p
        R = self.first_zero
        x = R * self.r
        x = x[x >= self.profile.r_start + 0.2 * step]
        h = np.minimum(step, 0.05 * x)
        dense = self.profile.dense
        central = np.arange(-4, 5)
        backward = np.arange(-8, 1)
        near_end = x + 4 * h > R
        # v^p is not smooth at the zero when p < 2; refine toward it
        h = np.where(near_end, np.minimum(h, np.maximum(1e-6, (R - x) / 4)), h)
        ddv = np.zeros_like(x)
        for mask, offsets in ((~near_end, central), (near_end, backward)):
            if not mask.any():
                continue
            w = _fd_weights(offsets)
            acc = np.zeros(mask.sum())
            for wk, k in zip(w, offsets):
                acc += wk * dense(x[mask] + k * h[mask])[1]
            ddv[mask] = acc / h[mask]
        v, dv = dense(x)
        return ddv + (N - 1) / x * dv + _power(v, p)

    def to_header(self) -> dict:
        return {
            "N": int(self.N),
            "p": float(self.p),
            "M_p": float(self.peak),
            "first_zero_unit_profile": float(self.first_zero),
            "grid_size": int(self.r.size),
            "tolerances": {
                "rtol": float(self.step_control[0]),
                "atol": float(self.step_control[1]),
                "first_zero": float(self.tol),
            },
        }


def solve_lane_emden(N, p, tol=1e-12, grid_size=DEFAULT_GRID_SIZE, r_max=1e8,
                     step_control=DEFAULT_STEP_CONTROL) -> RadialSolution:
    """Unique positive radial solution of -Δu = u^p in B_1 with u = 0 on the sphere."""
    _check_dimension(N)
    pS = critical_exponent(N)
    if not 1 < p < pS:
        raise InvalidParameterError(
            f"exponent must lie in (1, {pS:g}) for N={N}, got {p}", N=N, p=p)
    traj = integrate_radial(N, p, 1.0, r_max, step_control, zero_tol=tol)
    if traj.first_zero is None:
        raise NoFirstZeroError(f"no first zero before r_max={r_max:g}", N=N, p=p, r_max=r_max)
    R = traj.first_zero
    try:
        M = R ** (2 / (p - 1))
    except OverflowError:
        raise InvalidParameterError(f"peak overflows for p={p}", N=N, p=p) from None
    if not math.isfinite(M):
        raise InvalidParameterError(f"peak overflows for p={p}", N=N, p=p)
    r = _default_grid(grid_size)
    v, dv = traj(R * r)
    v[-1] = 0.0
    u = M * v
    du = M * R * dv
    return RadialSolution(N, p, r, u, du, M, R, tuple(step_control), tol, traj)


@dataclass(frozen=True)
class LinearizedPotential:
    """Radial potential a(r) entering -Δ - a.

    ``func`` evaluates a(r); ``scaled`` evaluates r^2 a(r), which is the
    combination the singular eigenproblem actually uses and which stays
    bounded for Lane-Emden potentials.  ``inner_scale`` is the length below
    which a is essentially constant; shooting starts well inside it.
    """

    r: np.ndarray
    values: np.ndarray
    sup_norm: float
    func: Callable = field(repr=False, compare=False)
    scaled: Callable = field(repr=False, compare=False)
    inner_scale: float = 1.0
    solution: Optional[RadialSolution] = field(default=None, repr=False, compare=False)
    label: str = "custom"

    def __call__(self, r):
        return self.func(np.asarray(r, dtype=float))

    def r2a(self, r):
        return self.scaled(np.asarray(r, dtype=float))

    @property
    def from_lane_emden(self) -> bool:
        return self.solution is not None and self.solution.peak > 0

    @property
    def exponent(self) -> Optional[float]:
        return None if self.solution is None else float(self.solution.p)

    @classmethod
    def constant(cls, c, grid_size=DEFAULT_GRID_SIZE):
        c = float(c)
        r = _default_grid(grid_size)
        scale = 1.0 / math.sqrt(max(1.0, abs(c)))
        return cls(r, np.full_like(r, c), abs(c), lambda x: np.full_like(x, c),
                   lambda x: c * x**2, scale, None, f"constant({c:g})")


def linearized_potential(sol: RadialSolution) -> LinearizedPotential:
    """a = p u^{p-1} on the solution grid, with ||a||_inf = p M^{p-1}."""
    p = sol.p
    if sol.peak == 0.0:
        pot = LinearizedPotential.constant(0.0, sol.r.size)
        return LinearizedPotential(sol.r, np.zeros_like(sol.r), 0.0, pot.func, pot.scaled,
                                   1.0, sol, "zero")
    R = sol.first_zero
    amp = p * R**2  # p M^{p-1}

    def profile_power(x):
        v, _ = sol.unit_profile(x)
        v = np.where(x < R, np.maximum(v, 0.0), 0.0)
        return v ** (p - 1)

    def func(r):
        return amp * profile_power(R * r)

    def scaled(r):
        x = R * r
        return p * x**2 * profile_power(x)

    values = p * np.maximum(sol.u, 0.0) ** (p - 1)
    return LinearizedPotential(sol.r, values, amp, func, scaled, 1.0 / R, sol,
                               f"lane-emden(N={sol.N}, p={p:g})")
