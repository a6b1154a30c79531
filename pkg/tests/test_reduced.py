import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subradiant.evolution import log_time_grid
from subradiant.observables import population_series
from subradiant.reduced import (analytic_pas, analytic_validity_start, effective_decay_rate,
                                quasi_stationary, rate_matrix, rate_rhs, solve_rates)
from subradiant.system import SystemParams, eigen_system

P = SystemParams()
G_DP, G_RAD, K = 0.02, 2e-4, math.exp(-10)


def test_rhs_from_excited_state():
    d = rate_rhs([1, 0, 0, 0], P)
    assert d == pytest.approx([-4e-4, 4e-4, 0, 0], abs=1e-18)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=4, max_size=4))
def test_rhs_conserves_probability(p):
    assert abs(sum(rate_rhs(p, P))) <= 1e-15


def test_rhs_at_plateau_is_the_slow_leak():
    qs = quasi_stationary(P)
    d = rate_rhs(qs, P)
    assert d[2] == pytest.approx(-(G_DP / 2) * K * qs.p_as, rel=1e-12)
    assert d[2] == pytest.approx(-4.366e-7, rel=1e-3)


def test_quasi_stationary_values():
    qs = quasi_stationary(P)
    assert qs.p_as == pytest.approx(0.96154, abs=5e-6)
    assert qs.p_gg == pytest.approx(0.03846, abs=5e-6)
    assert qs.p_ee == qs.p_s == 0
    assert sum(qs) == pytest.approx(1.0, abs=1e-12)


def test_quasi_stationary_limits():
    assert quasi_stationary(P.replace(gamma_rad=1e-14)).p_as == pytest.approx(1.0, abs=1e-9)
    assert quasi_stationary(P.replace(gamma_dp1=0, gamma_dp2=0)) == (0, 0, 0, 1)
    with pytest.raises(ValueError):
        quasi_stationary(P.replace(gamma_dp1=0, gamma_dp2=0, gamma_rad=0))


def test_reduced_model_preconditions():
    with pytest.raises(ValueError):
        rate_matrix(P.replace(omega1=100.01))
    with pytest.raises(ValueError):
        rate_matrix(P.replace(gamma_dp1=0.0))


def test_effective_rate_and_validity_start():
    by_hand = G_DP * G_RAD * K / (G_DP / 2 + 2 * G_RAD)
    assert effective_decay_rate(P) == pytest.approx(by_hand, rel=1e-14)
    assert effective_decay_rate(P) == pytest.approx(1.746e-8, rel=1e-3)
    assert 1 / effective_decay_rate(P) == pytest.approx(5.7e7, rel=0.01)
    assert analytic_validity_start(P) == pytest.approx(2 / G_DP * math.exp(5), rel=1e-14)
    assert analytic_validity_start(P) == pytest.approx(1.48e4, rel=0.01)


def test_analytic_law_identities():
    qs = quasi_stationary(P).p_as
    assert analytic_pas(0.0, P) == pytest.approx(qs, rel=1e-15)
    half = math.log(2) / effective_decay_rate(P)
    assert analytic_pas(half, P) == pytest.approx(qs / 2, rel=1e-12)


def test_rate_matrix_is_a_generator():
    M = rate_matrix(P)
    off = M - np.diag(np.diag(M))
    assert np.all(off >= 0)
    assert np.allclose(M.sum(axis=0), 0, atol=1e-18)
    assert M[1, 2] / M[2, 1] == pytest.approx(K, rel=1e-14)


def test_solution_relaxes_to_ground_state():
    p = solve_rates([1, 0, 0, 0], [1e11], P)[0]
    assert p == pytest.approx([0, 0, 0, 1], abs=1e-10)


def test_solution_without_dephasing_is_the_dicke_chain():
    q = P.replace(gamma_dp1=0, gamma_dp2=0)
    t = np.linspace(0, 3e4, 25)
    p = solve_rates([1, 0, 0, 0], t, q)
    k = 2 * G_RAD
    assert np.max(np.abs(p[:, 0] - np.exp(-k * t))) <= 1e-12
    assert np.max(np.abs(p[:, 1] - k * t * np.exp(-k * t))) <= 1e-12


def test_solution_follows_analytic_law_after_validity_start():
    t = log_time_grid(analytic_validity_start(P), 1e10, 20)
    p_as = solve_rates([1, 0, 0, 0], t, P)[:, 2]
    an = analytic_pas(t, P)
    keep = an >= 0.05 * an[0]
    assert np.max(np.abs(p_as[keep] - an[keep]) / an[keep]) <= 0.02


def test_solve_rates_validates_initial_vector():
    with pytest.raises(ValueError):
        solve_rates([0.5, 0.2, 0, 0], [1.0], P)
    with pytest.raises(ValueError):
        solve_rates([1.5, -0.5, 0, 0], [1.0], P)


def test_full_model_agrees_with_rates(main_trajectory):
    full = population_series(main_trajectory.states, eigen_system(P))
    rates = solve_rates([1, 0, 0, 0], main_trajectory.times, P)
    assert np.max(np.abs(full - rates)) <= 1e-6
