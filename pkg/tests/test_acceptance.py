"""Acceptance criteria, one test per criterion.

Each criterion prints a single ``criterion N: PASS|FAIL ...`` line; the
lines are collected and repeated in the pytest terminal summary. Run this
file directly (``python3 tests/test_acceptance.py``) for the lines alone.
"""

import functools
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
import scipy.linalg

sys.path.insert(0, str(Path(__file__).parent))

from subradiant.config import parse_config
from subradiant.evolution import log_time_grid, rk_propagate, spectral_propagate
from subradiant.lindblad import (assemble_liouvillian, channels_for, detuned_jump_channels,
                                 resonant_jump_channels)
from subradiant.observables import fit_decay, population_series
from subradiant.reduced import effective_decay_rate, solve_rates
from subradiant.runner import initial_state, run_scenario, sweep_detuning, validate_scenario
from subradiant.system import SIGMA1, SIGMA2, SystemParams, build_hamiltonian, dag, eigen_system

RESULTS = {}


def report(number, passed, detail):
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
    RESULTS[number] = line
    print(line)
    return passed


@functools.lru_cache(maxsize=None)
def scenario(preset, *overrides):
    cfg = parse_config("", preset=preset, overrides=overrides, out_dir="unused")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return run_scenario(cfg, write=False)


def at(result, name, t):
    times = result.trajectory.times
    i = int(np.argmin(np.abs(times - t)))
    assert abs(times[i] / t - 1) < 1e-9, "time grid does not contain the requested sample"
    return result.column(name)[i]


# -- criteria ------------------------------------------------------------------

def criterion_1():
    p_as = at(scenario("main"), "p_as", 1e5)
    return report(1, abs(p_as - 0.9615) <= 0.005,
                  f"p_as(1e5) = {p_as:.5f}, target 0.9615 +/- 0.005")


def criterion_2():
    res = scenario("main")
    t = res.trajectory.times
    c = res.column("C")[(t >= 1e4) & (t <= 1e7)].max()
    return report(2, 0.93 <= c <= 0.97, f"max C on [1e4, 1e7] = {c:.5f}, target [0.93, 0.97]")


def criterion_3():
    res = scenario("main")
    fit = fit_decay(res.trajectory.times, res.column("p_as"))
    target = effective_decay_rate(SystemParams())
    rel = abs(fit.rate - target) / target
    return report(3, rel <= 0.10 and abs(target - 1.746e-8) / 1.746e-8 < 1e-3,
                  f"fitted rate {fit.rate:.5e} vs {target:.5e} (rel err {rel:.2e}, tol 0.10), "
                  f"t_ent = {fit.t_ent:.3e}")


def criterion_4():
    res = scenario("main")
    t = res.trajectory.times
    early = res.column("p_as")[t < 1e5].max()
    late = res.column("p_gg")[t > 1e9].min()
    return report(4, early > 0.9 and late > 0.9,
                  f"max p_as before 1e5 = {early:.5f}, min p_gg after 1e9 = {late:.8f}")


def criterion_5():
    res = scenario("dicke")
    t = res.trajectory.times
    k = 2 * SystemParams().gamma_rad
    err_ee = np.max(np.abs(res.column("p_ee") - np.exp(-k * t)))
    err_s = np.max(np.abs(res.column("p_s") - k * t * np.exp(-k * t)))
    c = res.column("C").max()
    p_as = np.abs(res.column("p_as")).max()
    ok = max(err_ee, err_s) <= 1e-6 and c <= 1e-9 and p_as <= 1e-9
    return report(5, ok, f"chain error {max(err_ee, err_s):.2e} (tol 1e-6), max C {c:.2e}, "
                         f"max p_as {p_as:.2e} (tol 1e-9)")


def criterion_6():
    res = scenario("local")
    gap = np.max(np.abs(res.column("p_s") - res.column("p_as")))
    c = res.column("C").max()
    return report(6, gap <= 1e-9 and c <= 1e-9,
                  f"max |p_s - p_as| = {gap:.3e} (tol 1e-9), max C = {c:.2e} (tol 1e-9)")


def criterion_7():
    main = scenario("main").column("p_as").max()
    one = scenario("one_reservoir").column("p_as").max()
    rel = abs(one - main) / main
    return report(7, rel <= 0.05,
                  f"plateau one_reservoir {one:.5f} vs main {main:.5f} (rel diff {rel:.3f}, tol 0.05)")


def criterion_8():
    omega = SystemParams().Omega
    cfg = parse_config("", preset="detuning_sweep", out_dir="unused", overrides=[
        "t_min=1e2", "t_max=1e10", "points_per_decade=20",
        "sweep.min=0", f"sweep.max={2 * omega}", "sweep.steps=41"])
    res = sweep_detuning(cfg, write=False)
    d = res.detunings / omega
    i_t = int(np.argmin(np.abs(res.times - 1e5)))
    c_01 = res.concurrence[int(np.argmin(np.abs(d - 0.1))), i_t]
    picks = [int(np.argmin(np.abs(d - x))) for x in (0.0, 0.5, 1.0, 2.0)]
    rates = res.decay_rates[picks]
    increasing = bool(np.all(np.isfinite(rates)) and np.all(np.diff(rates) > 0))
    ok = c_01 > 0.9 and increasing and res.complete
    return report(8, ok, f"C(1e5) at 0.1 Omega = {c_01:.4f}; rates at 0, 0.5, 1, 2 Omega = "
                         + ", ".join(f"{r:.3e}" for r in rates))


def _heisenberg(H, op, t):
    U = scipy.linalg.expm(1j * H * t)
    return U @ op @ dag(U)


def criterion_9():
    p = SystemParams()
    basis = eigen_system(p)
    # full model vs rate equations
    main = scenario("main")
    full = population_series(main.trajectory.states, basis)
    rates = solve_rates([1, 0, 0, 0], main.trajectory.times, p)
    e_rates = float(np.max(np.abs(full - rates)))
    # spectral vs Runge-Kutta over [0, 1e6]
    H = build_hamiltonian(p)
    ch = channels_for(p)
    times = np.concatenate([[0.0], log_time_grid(1.0, 1e6, 10)])
    rho0 = initial_state("ee")
    sp = spectral_propagate(assemble_liouvillian(H, ch), rho0, times)
    rk = rk_propagate(H, ch, rho0, times=times)
    e_rk = float(np.max(np.abs(population_series(sp.states, basis)
                               - population_series(rk.states, basis))))
    # interaction-picture decompositions vs matrix exponential
    rng = np.random.default_rng(7)
    n1, n2 = dag(SIGMA1) @ SIGMA1, dag(SIGMA2) @ SIGMA2
    e_dec = 0.0
    for y in np.concatenate([[0.0], rng.uniform(-2, 2, 4)]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            q = SystemParams(omega1=1.0 + 0.3 * y, omega2=1.0, Omega=0.3)
        Hq = build_hamiltonian(q)
        c = {x.label: x.operator for x in detuned_jump_channels(q)}
        W = q.splitting
        for t in rng.uniform(0, 40, 10):
            rad = (c["rad,1"] * np.exp(-0.5j * (q.theta + W) * t)
                   + c["rad,2"] * np.exp(-0.5j * (q.theta - W) * t))
            e_dec = max(e_dec, np.abs(_heisenberg(Hq, SIGMA1 + SIGMA2, t) - rad).max())
            for k, n in ((1, n1), (2, n2)):
                dp = (c[f"dp,{k}1"] + c[f"dp,{k}2"] * np.exp(1j * W * t)
                      + c[f"dp,{k}3"] * np.exp(-1j * W * t))
                e_dec = max(e_dec, np.abs(_heisenberg(Hq, n, t) - dp).max())
    # detuned channels at zero detuning
    e_lim = max(np.abs(a.operator - b.operator).max()
                for a, b in zip(resonant_jump_channels(p), detuned_jump_channels(p)))
    ok = e_rates <= 1e-6 and e_rk <= 1e-7 and e_dec <= 1e-10 and e_lim <= 1e-12
    return report(9, ok, f"full vs rates {e_rates:.1e} (1e-6), spectral vs rk {e_rk:.1e} (1e-7), "
                         f"decompositions {e_dec:.1e} (1e-10), zero-detuning limit {e_lim:.1e} (1e-12)")


def criterion_10():
    worst = {"trace": 0.0, "herm": 0.0, "min_eig": 0.0, "kms": 0.0, "left_null": 0.0}
    ok = True
    for preset in ("main", "one_reservoir", "dicke", "local", "detuning_sweep"):
        cfg = parse_config("", preset=preset, out_dir="unused",
                           overrides=["t_min=1", "t_max=1e10", "points_per_decade=20"])
        configs = [cfg]
        if preset == "detuning_sweep":
            configs = [replace(cfg, preset="custom", params=q, sweep=None)
                       for q in cfg.sweep_points()[::5]]
        for c in configs:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                rep = validate_scenario(c)
            ok &= rep["ok"]
            chk = rep["checks"]
            worst["trace"] = max(worst["trace"], chk["max_trace_error"])
            worst["herm"] = max(worst["herm"], chk["max_hermiticity_error"])
            worst["min_eig"] = min(worst["min_eig"], chk["min_eigenvalue"])
            worst["kms"] = max(worst["kms"], chk["kms_max_error"])
            worst["left_null"] = max(worst["left_null"], chk["trace_preservation"])
    ok &= (worst["trace"] <= 1e-9 and worst["herm"] <= 1e-10 and worst["min_eig"] >= -1e-9
           and worst["kms"] <= 1e-12 and worst["left_null"] <= 1e-12)
    return report(10, bool(ok), "worst trace {trace:.1e}, hermiticity {herm:.1e}, min eig "
                                "{min_eig:.1e}, KMS {kms:.1e}, left null vector {left_null:.1e}"
                                .format(**worst))


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda f: f.__name__)
def test_criterion(criterion):
    assert criterion(), RESULTS[int(criterion.__name__.split("_")[1])]


if __name__ == "__main__":
    outcomes = [c() for c in CRITERIA]
    sys.exit(0 if all(outcomes) else 1)
