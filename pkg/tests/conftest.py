"""Shared fixtures: expensive pipeline results are computed once per session."""
from __future__ import annotations

import math
import sys
from functools import lru_cache

import pytest
from hypothesis import settings

from conemorse.cap import cap_neumann_eigenvalues
from conemorse.radial import linearized_potential, solve_lane_emden
from conemorse.singular import negative_singular_eigenvalues

settings.register_profile("default", deadline=None, max_examples=25)
settings.load_profile("default")


@lru_cache(maxsize=None)
def lane_emden(N, p):
    return solve_lane_emden(N, p)


@lru_cache(maxsize=None)
def potential(N, p):
    return linearized_potential(lane_emden(N, p))


@lru_cache(maxsize=None)
def singular(N, p, k_max=10):
    return negative_singular_eigenvalues(N, potential(N, p), k_max=k_max)


@lru_cache(maxsize=None)
def cap(N, theta0, lam_max):
    return cap_neumann_eigenvalues(N, theta0, lam_max)


def rk4_first_zero(N, p, h, r_end=20.0):
    """Fixed-step classical RK4 for v'' + (N-1)/x v' + v^p = 0, v(0) = 1.

    Independent of the library: starts on the series at x = h and locates the
    first zero by cubic Hermite interpolation on the step that brackets it.
    """
    def f(x, v, w):
        return w, -(N - 1) / x * w - math.copysign(abs(v) ** p, v)

    x = h
    v, w = 1 - h * h / (2 * N), -h / N
    while x < r_end:
        k1 = f(x, v, w)
        k2 = f(x + h / 2, v + h / 2 * k1[0], w + h / 2 * k1[1])
        k3 = f(x + h / 2, v + h / 2 * k2[0], w + h / 2 * k2[1])
        k4 = f(x + h, v + h * k3[0], w + h * k3[1])
        vn = v + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        wn = w + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if vn <= 0:
            lo, hi = 0.0, 1.0
            for _ in range(80):
                s = 0.5 * (lo + hi)
                h00, h10 = 2 * s**3 - 3 * s**2 + 1, s**3 - 2 * s**2 + s
                h01, h11 = -2 * s**3 + 3 * s**2, s**3 - s**2
                val = h00 * v + h10 * h * w + h01 * vn + h11 * h * wn
                lo, hi = (s, hi) if val > 0 else (lo, s)
            return x + 0.5 * (lo + hi) * h
        x, v, w = x + h, vn, wn
    return None


HALF = math.pi / 2
CAPS = (math.pi / 3, math.pi / 2, 2 * math.pi / 3)


@pytest.fixture(scope="session")
def le33():
    return lane_emden(3, 3.0)


@pytest.fixture(scope="session")
def pot33():
    return potential(3, 3.0)


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance lines at the end of the run, in criterion order."""
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
