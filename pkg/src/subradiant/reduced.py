"""Four-population rate equations for the resonant, symmetric-dephasing case.

Populations are ordered (p_ee, p_s, p_as, p_gg). With a common dephasing
rate g_dp, radiative rate g_rad and k = exp(-2 Omega / T_dp):

    p_ee' = -2 g_rad p_ee
    p_s'  =  2 g_rad p_ee - (g_dp/2 + 2 g_rad) p_s + (g_dp/2) k p_as
    p_as' =  (g_dp/2) p_s - (g_dp/2) k p_as
    p_gg' =  2 g_rad p_s

Thermal re-excitation by the radiative bath (suppressed by exp(-omega/T))
is not part of this model.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .system import SystemParams


class PopulationVector(NamedTuple):
    p_ee: float
    p_s: float
    p_as: float
    p_gg: float


def _common_dephasing(params: SystemParams):
    if not params.is_resonant:
        raise ValueError("the rate equations only cover zero detuning")
    if params.gamma_dp1 != params.gamma_dp2:
        raise ValueError("the rate equations assume gamma_dp1 == gamma_dp2")
    return params.gamma_dp1


def rate_matrix(params: SystemParams):
    """Generator M with p' = M p."""
    g_dp = _common_dephasing(params)
    g_rad = params.gamma_rad
    up = 0.5 * g_dp * np.exp(-2.0 * params.Omega / params.T_dp)
    down = 0.5 * g_dp
    return np.array([
        [-2 * g_rad, 0.0, 0.0, 0.0],
        [2 * g_rad, -(down + 2 * g_rad), up, 0.0],
        [0.0, down, -up, 0.0],
        [0.0, 2 * g_rad, 0.0, 0.0],
    ])


def rate_rhs(p, params: SystemParams):
    return rate_matrix(params) @ np.asarray(p, dtype=float)


def quasi_stationary(params: SystemParams) -> PopulationVector:
    """Plateau reached once |ee> and |s> have emptied, ignoring as -> s leakage."""
    g_dp = _common_dephasing(params)
    denom = 2 * params.gamma_rad + 0.5 * g_dp
    if denom <= 0:
        raise ValueError("all rates are zero; no quasi-stationary state")
    p_as = 0.5 * g_dp / denom
    return PopulationVector(0.0, 0.0, p_as, 2 * params.gamma_rad / denom)


def effective_decay_rate(params: SystemParams):
    """Slow leak of the plateau, g_dp g_rad exp(-2 Omega/T) / (g_dp/2 + 2 g_rad)."""
    g_dp = _common_dephasing(params)
    return (g_dp * params.gamma_rad * np.exp(-2.0 * params.Omega / params.T_dp)
            / (0.5 * g_dp + 2 * params.gamma_rad))


def analytic_validity_start(params: SystemParams):
    """Time 2 exp(Omega/T_dp) / g_dp after which the analytic decay law applies."""
    g_dp = _common_dephasing(params)
    return 2.0 / g_dp * np.exp(params.Omega / params.T_dp)


def analytic_pas(t, params: SystemParams):
    """Closed-form long-time p_as(t); p_gg follows as 1 - p_as."""
    t = np.asarray(t, dtype=float)
    return quasi_stationary(params).p_as * np.exp(-effective_decay_rate(params) * t)


def solve_rates(p0, times, params: SystemParams):
    """Exact solution p(t) = expm(M t) p0, shape (len(times), 4)."""
    M = rate_matrix(params)
    p0 = np.asarray(p0, dtype=float)
    if abs(p0.sum() - 1.0) > 1e-12 or np.any(p0 < 0):
        raise ValueError("initial populations must be a probability vector")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    return np.array([scipy.linalg.expm(M * t) @ p0 for t in times])
