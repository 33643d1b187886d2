import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conemorse.errors import InvalidParameterError, NoFirstZeroError
from conemorse.radial import (critical_exponent, integrate_radial, linearized_potential,
                              solve_lane_emden)

from conftest import lane_emden, rk4_first_zero

R33 = 6.896848619376458  # first zero of the unit-peak profile, N=3 p=3


# ---- independent oracle first

@pytest.mark.parametrize("N,p", [(3, 3.0), (4, 2.0), (3, 2.0), (5, 2.0)])
def test_first_zero_matches_fixed_step_oracle(N, p):
    coarse = rk4_first_zero(N, p, 1e-3)
    fine = rk4_first_zero(N, p, 5e-4)
    assert abs(coarse - fine) < 1e-8  # the oracle itself is converged
    traj = integrate_radial(N, p, 1.0, 100.0)
    assert traj.first_zero == pytest.approx(fine, abs=1e-8)


def test_first_zero_regression_lock():
    assert integrate_radial(3, 3.0, 1.0, 100.0).first_zero == pytest.approx(R33, abs=1e-9)


# ---- integrate_radial

def test_zero_initial_data_gives_zero_trajectory():
    traj = integrate_radial(3, 3.0, 0.0, 10.0)
    assert traj.first_zero is None
    assert np.all(traj.u == 0) and np.all(traj.du == 0)


def test_negative_initial_value_rejected():
    with pytest.raises(InvalidParameterError):
        integrate_radial(3, 3.0, -1.0, 10.0)


def test_stops_at_r_max_without_zero():
    traj = integrate_radial(3, 3.0, 1.0, 2.0)
    assert traj.first_zero is None
    assert traj.r[-1] == pytest.approx(2.0)
    assert np.all(traj.u > 0)


@pytest.mark.parametrize("lam", [0.5, 2.0, 10.0])
def test_lane_emden_scaling(lam):
    p = 3.0
    base = integrate_radial(3, p, 1.0, 100.0).first_zero
    u0 = lam ** (2 / (p - 1))
    scaled = integrate_radial(3, p, u0, 100.0).first_zero
    assert scaled * u0 ** ((p - 1) / 2) == pytest.approx(base, rel=1e-8)
    assert scaled == pytest.approx(base / lam, rel=1e-8)


@given(st.floats(1.2, 4.8), st.floats(0.3, 30.0))
def test_scaling_invariant_property(p, u0):
    base = integrate_radial(3, p, 1.0, 1e6).first_zero
    scaled = integrate_radial(3, p, u0, 1e6).first_zero
    assert scaled * u0 ** ((p - 1) / 2) == pytest.approx(base, rel=1e-8)


# ---- solve_lane_emden

@pytest.mark.parametrize("N,p", [(3, 3.0), (4, 2.0)])
def test_solution_invariants(N, p):
    sol = solve_lane_emden(N, p, tol=1e-10)
    assert sol.r[-1] == 1.0 and np.all(np.diff(sol.r) > 0)
    assert sol.u[-1] == 0.0
    assert np.all(sol.u[:-1] > 0)
    assert np.all(sol.du[1:] < 0)
    assert abs(sol.du[0]) < 1e-4 * sol.peak * sol.first_zero  # u'(r) ~ r near 0
    assert sol.du[-1] < 0  # Hopf
    assert sol.peak == pytest.approx(sol.first_zero ** (2 / (p - 1)), rel=1e-14)


@pytest.mark.parametrize("N,p", [(3, 3.0), (4, 2.0), (3, 2.0), (4, 2.9), (5, 2.0), (3, 4.5),
                                 (3, 4.99)])
def test_residual_below_1e8(N, p):
    assert np.max(np.abs(lane_emden(N, p).residual())) < 1e-8


@pytest.mark.parametrize("p", [1.1, 1.5])
def test_residual_small_exponents(p):
    # |v|^p is not smooth at the boundary zero for p < 2; the dense interpolant
    # carries a residual of a few 1e-8 there even though R is accurate to 1e-12
    sol = lane_emden(3, p)
    assert sol.first_zero == pytest.approx(rk4_first_zero(3, p, 5e-4), abs=1e-9)
    assert np.max(np.abs(sol.residual())) < 1e-7


def test_regression_lock_peaks():
    assert lane_emden(3, 3.0).peak == pytest.approx(R33, rel=1e-10)
    assert lane_emden(4, 2.0).peak == pytest.approx(lane_emden(4, 2.0).first_zero ** 2, rel=1e-14)
    assert lane_emden(4, 2.0).first_zero == pytest.approx(rk4_first_zero(4, 2.0, 5e-4), abs=1e-8)


def test_first_zero_approaches_linear_limit():
    # p -> 1: v'' + 2/x v' + v = 0 has v = sin x / x, first zero at pi
    zeros = [lane_emden(3, p).first_zero for p in (2.0, 1.5, 1.1)]
    assert zeros[0] > zeros[1] > zeros[2] > math.pi
    assert zeros[2] - math.pi < 0.1
    peaks = [lane_emden(3, p).peak for p in (2.0, 1.5, 1.1)]
    assert np.all(np.isfinite(peaks))


@pytest.mark.parametrize("p", [1.0, 0.5, 5.0, 6.0])
def test_exponent_outside_range_rejected(p):
    with pytest.raises(InvalidParameterError):
        solve_lane_emden(3, p)


def test_critical_exponent():
    assert critical_exponent(3) == 5 and critical_exponent(4) == 3
    with pytest.raises(InvalidParameterError):
        solve_lane_emden(4, 3.0)


def test_no_zero_before_r_max():
    with pytest.raises(NoFirstZeroError):
        solve_lane_emden(3, 4.99, r_max=100.0)


def test_evaluate_matches_grid():
    sol = lane_emden(3, 3.0)
    u, du = sol.evaluate(sol.r[::97])
    assert np.allclose(u, sol.u[::97], rtol=1e-12, atol=1e-12)
    assert np.allclose(du, sol.du[::97], rtol=1e-12, atol=1e-10)


# ---- linearized_potential

def test_zero_solution_gives_zero_potential():
    from conemorse.radial import RadialSolution

    pot = linearized_potential(RadialSolution.zero(3, 3.0))
    assert pot.sup_norm == 0 and np.all(pot.values == 0)
    assert np.all(pot(np.linspace(0, 1, 11)) == 0)


def test_potential_values_and_sup():
    sol = lane_emden(3, 3.0)
    pot = linearized_potential(sol)
    assert np.allclose(pot.values, 3 * sol.u**2, rtol=1e-13)
    assert pot.sup_norm == pytest.approx(3 * sol.peak**2, rel=1e-13)
    assert pot.values[0] == pytest.approx(pot.sup_norm, rel=1e-9)
    assert np.all(np.diff(pot.values) <= 1e-12 * pot.sup_norm)
    assert pot.values[-1] == 0.0 and float(pot(1.0)) == 0.0
    assert np.all(pot.values >= 0)


@given(st.floats(1e-4, 1.0))
def test_potential_callable_matches_definition(r):
    sol = lane_emden(4, 2.0)
    pot = linearized_potential(sol)
    u, _ = sol.evaluate(r)
    assert float(pot(r)) == pytest.approx(2 * float(u), rel=1e-10, abs=1e-10)
    assert float(pot.r2a(r)) == pytest.approx(r * r * float(pot(r)), rel=1e-12, abs=1e-14)


def test_header_round_numbers():
    h = lane_emden(3, 3.0).to_header()
    assert h["N"] == 3 and h["p"] == 3.0 and h["tolerances"]["rtol"] == 1e-12
