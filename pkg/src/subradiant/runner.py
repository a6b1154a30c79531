"""Scenario execution and file output.

Every run writes a CSV whose body depends only on the resolved config
(17 significant digits, fixed column order), a gnuplot-ready ``.dat`` file
and a JSON manifest. Timestamps live only in the manifest.
"""

from __future__ import annotations

import json
import os
import tempfile
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import ScenarioConfig, SweepSpec
from .errors import (FitQualityError, InsufficientHorizonError, StiffnessError,
                     SubradiantError, InvalidStateError)
from .evolution import (Trajectory, log_time_grid, rk_propagate, spectral_propagate,
                        state_diagnostics)
from .lindblad import (assemble_liouvillian, channels_for, detuned_jump_channels,
                       resonant_jump_channels)
from .observables import concurrence, fit_decay, observe, population_series
from .reduced import (analytic_pas, analytic_validity_start, effective_decay_rate,
                      solve_rates)
from .system import (ANTISYMMETRIC, SYMMETRIC, build_hamiltonian, eigen_system, ket,
                     projector)

COLUMNS = ("t", "p_ee", "p_s", "p_as", "p_gg", "S", "C", "trace_err", "min_eig")

TOL_FULL_VS_RATES = 1e-6
TOL_RATE_FIT = 0.10
TOL_ANALYTIC = 0.02


class NumericalFailure(SubradiantError, RuntimeError):
    """Propagation failed; the message names the scenario."""


def initial_state(label):
    vectors = {"s": SYMMETRIC, "as": ANTISYMMETRIC}
    return projector(vectors[label] if label in vectors else ket(label))


def time_grid(config: ScenarioConfig):
    return log_time_grid(config.t_min, config.t_max, config.points_per_decade)


def propagate(config: ScenarioConfig, params=None, times=None, channels=None):
    """Trajectory for ``config`` (optionally with other params / times / channels)."""
    params = config.params if params is None else params
    times = time_grid(config) if times is None else times
    H = build_hamiltonian(params)
    if channels is None:
        channels = channels_for(params, config.channel_kind)
    rho0 = initial_state(config.initial_state)
    try:
        if config.propagator == "rk":
            return rk_propagate(H, channels, rho0, times=times, rel_tol=config.rel_tol)
        return spectral_propagate(assemble_liouvillian(H, channels), rho0, times)
    except (InvalidStateError, StiffnessError, np.linalg.LinAlgError) as exc:
        raise NumericalFailure(f"scenario {config.preset!r}: {exc}") from exc


# -- file helpers ----------------------------------------------------------------

def _fmt(x):
    return format(float(x), ".17g")


def _atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _param_header(config, params=None):
    params = config.params if params is None else params
    lines = [f"# preset = {config.preset}", f"# channels = {config.channel_kind}",
             f"# propagator = {config.propagator}", f"# initial_state = {config.initial_state}"]
    lines += [f"# {k} = {_fmt(v)}" for k, v in asdict(params).items()]
    return lines


def _manifest(config, files, summary):
    cfg = {
        "preset": config.preset,
        "params": asdict(config.params),
        "time": {"t_min": config.t_min, "t_max": config.t_max,
                 "points_per_decade": config.points_per_decade},
        "propagator": config.propagator,
        "initial_state": config.initial_state,
        "rel_tol": config.rel_tol,
        "sweep": asdict(config.sweep) if config.sweep else None,
    }
    return {
        "tool": "subradiant",
        "version": __version__,
        "created": datetime.now(timezone.utc).isoformat(),
        "config": cfg,
        "files": [str(f) for f in files],
        "summary": summary,
    }


def _write_manifest(path, config, files, summary):
    _atomic_write(path, json.dumps(_manifest(config, files, summary), indent=2) + "\n")


def trajectory_csv(records, header_lines):
    rows = list(header_lines) + [",".join(COLUMNS)]
    rows += [",".join(_fmt(getattr(r, c)) for c in COLUMNS) for r in records]
    return "\n".join(rows) + "\n"


def plot_dat(records, header_lines):
    rows = list(header_lines) + ["# " + " ".join(COLUMNS[:7])]
    rows += [" ".join(_fmt(getattr(r, c)) for c in COLUMNS[:7]) for r in records]
    return "\n".join(rows) + "\n"


# -- run -------------------------------------------------------------------------

@dataclass
class ScenarioResult:
    config: ScenarioConfig
    trajectory: Trajectory
    records: list
    files: list = field(default_factory=list)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records])


def run_scenario(config: ScenarioConfig, write=True):
    """Propagate from the configured initial state and emit observables."""
    traj = propagate(config)
    basis = eigen_system(config.params)
    records = observe(traj, basis)
    for rec in records:
        try:
            rec.check()
        except InvalidStateError as exc:
            raise NumericalFailure(f"scenario {config.preset!r}: {exc}") from exc
    result = ScenarioResult(config=config, trajectory=traj, records=records)
    if write:
        out = Path(config.out_dir)
        header = _param_header(config)
        csv_path = out / f"{config.preset}_trajectory.csv"
        dat_path = out / f"{config.preset}_plot.dat"
        _atomic_write(csv_path, trajectory_csv(records, header))
        _atomic_write(dat_path, plot_dat(records, header))
        c = result.column("C")
        summary = {
            "method": traj.method,
            "max_concurrence": float(c.max()),
            "t_max_concurrence": float(traj.times[int(c.argmax())]),
            "max_p_as": float(result.column("p_as").max()),
        }
        man = out / f"{config.preset}_manifest.json"
        result.files = [csv_path, dat_path, man]
        _write_manifest(man, config, result.files, summary)
    return result


# -- sweep -----------------------------------------------------------------------

@dataclass
class SweepResult:
    detunings: np.ndarray
    times: np.ndarray
    concurrence: np.ndarray        # (n_detuning, n_times), NaN for failed points
    plateau_population: np.ndarray  # p of |-> (the as-like state), same shape
    decay_rates: np.ndarray        # fitted plateau decay, NaN if not fittable
    failures: dict
    metadata: dict
    files: list = field(default_factory=list)

    @property
    def complete(self):
        return not self.failures


def _sweep_point(task):
    index, config, params, times, write = task
    try:
        traj = propagate(config, params=params, times=times,
                         channels=detuned_jump_channels(params))
        basis = eigen_system(params)
        c = np.array([concurrence(r) for r in traj.states])
        p_minus = population_series(traj.states, basis)[:, 2]
        try:
            rate = fit_decay(times, p_minus).rate
        except (InsufficientHorizonError, FitQualityError):
            rate = float("nan")
        if write:
            point_file = Path(config.out_dir) / "points" / f"point_{index:04d}.csv"
            body = ["t,C,p_minus"] + [f"{_fmt(t)},{_fmt(a)},{_fmt(b)}"
                                      for t, a, b in zip(times, c, p_minus)]
            _atomic_write(point_file, "\n".join(body) + "\n")
        return index, c, p_minus, rate, None
    except (SubradiantError, ValueError, np.linalg.LinAlgError) as exc:
        return index, None, None, float("nan"), f"{type(exc).__name__}: {exc}"


def sweep_detuning(config: ScenarioConfig, write=True, workers=None):
    """Concurrence map over (detuning, time); each point propagated independently."""
    if config.sweep is None:
        config = replace(config, sweep=SweepSpec(max=0.5 * config.params.Omega))
    if config.sweep.parameter != "detuning":
        raise ValueError("sweep_detuning needs sweep.parameter = detuning")
    times = time_grid(config)
    points = config.sweep_points()
    detunings = np.array([p.detuning for p in points])
    tasks = [(i, config, p, times, write) for i, p in enumerate(points)]
    workers = config.workers if workers is None else workers
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_sweep_point, tasks))
        else:
            results = [_sweep_point(t) for t in tasks]
    conc = np.full((len(points), len(times)), np.nan)
    pops = np.full_like(conc, np.nan)
    rates = np.full(len(points), np.nan)
    failures = {}
    for index, c, p, rate, err in sorted(results, key=lambda r: r[0]):
        if err is not None:
            failures[index] = err
            continue
        conc[index], pops[index], rates[index] = c, p, rate
    result = SweepResult(detunings=detunings, times=times, concurrence=conc,
                         plateau_population=pops, decay_rates=rates, failures=failures,
                         metadata={"params": asdict(config.params), "version": __version__})
    if write:
        result.files = _write_sweep(config, result)
    return result


def _write_sweep(config, res):
    out = Path(config.out_dir)
    header = _param_header(config)
    matrix = header + ["detuning," + ",".join(_fmt(t) for t in res.times)]
    matrix += [_fmt(d) + "," + ",".join(_fmt(c) for c in row)
               for d, row in zip(res.detunings, res.concurrence)]
    grid = header + ["# detuning t C"]
    for d, row in zip(res.detunings, res.concurrence):
        grid += [f"{_fmt(d)} {_fmt(t)} {_fmt(c)}" for t, c in zip(res.times, row)]
        grid.append("")
    rates = header + ["detuning,decay_rate"]
    rates += [f"{_fmt(d)},{_fmt(r)}" for d, r in zip(res.detunings, res.decay_rates)]
    files = [out / "sweep_concurrence.csv", out / "sweep_plot.dat", out / "sweep_rates.csv"]
    for path, lines in zip(files, (matrix, grid, rates)):
        _atomic_write(path, "\n".join(lines) + "\n")
    man = out / "sweep_manifest.json"
    summary = {"points": len(res.detunings), "failures": {str(k): v for k, v in res.failures.items()}}
    _write_manifest(man, config, files + [man], summary)
    return files + [man]


# -- full vs reduced -------------------------------------------------------------

def compare_full_vs_reduced(config: ScenarioConfig, write=True):
    """Residuals between the master equation, the rate equations and the analytic law."""
    params = config.params
    times = time_grid(config)
    traj = propagate(config, times=times)
    basis = eigen_system(params)
    full = population_series(traj.states, basis)
    p0 = np.real(np.diag(basis.vectors.conj().T @ initial_state(config.initial_state)
                         @ basis.vectors))
    rates = solve_rates(p0, times, params)
    analytic = analytic_pas(times, params)
    t_valid = analytic_validity_start(params)
    gamma_an = effective_decay_rate(params)

    plateau = analytic[0] if len(analytic) else 0.0
    window = (times >= t_valid) & (analytic >= 0.05 * plateau)
    rel_an = np.abs(rates[window, 2] - analytic[window]) / analytic[window]

    def fitted(values):
        try:
            return fit_decay(times, values).rate
        except (InsufficientHorizonError, FitQualityError):
            return float("nan")

    g_full = fitted(full[:, 2])
    g_rates = fitted(rates[:, 2])
    summary = {
        "analytic_validity_start": float(t_valid),
        "gamma_analytic": float(gamma_an),
        "gamma_full": float(g_full),
        "gamma_rates": float(g_rates),
        "max_abs_full_vs_rates": float(np.max(np.abs(full - rates))),
        "max_rel_rates_vs_analytic": float(rel_an.max()) if rel_an.size else float("nan"),
        "tolerances": {"full_vs_rates": TOL_FULL_VS_RATES, "rate_fit": TOL_RATE_FIT,
                       "analytic": TOL_ANALYTIC},
    }
    rel_fit = abs(g_full - gamma_an) / gamma_an
    summary["checks"] = {
        "full_vs_rates": bool(summary["max_abs_full_vs_rates"] <= TOL_FULL_VS_RATES),
        "rate_fit": bool(np.isfinite(rel_fit) and rel_fit <= TOL_RATE_FIT),
        "analytic": bool(rel_an.size and rel_an.max() <= TOL_ANALYTIC),
    }
    summary["passed"] = all(summary["checks"].values())
    if write:
        out = Path(config.out_dir)
        header = _param_header(config)
        cols = "t,p_as_full,p_as_rates,p_as_analytic,resid_full_rates,resid_full_analytic,analytic_valid"
        lines = header + [cols]
        lines += [",".join([_fmt(t), _fmt(f), _fmt(r), _fmt(a), _fmt(f - r), _fmt(f - a),
                            str(int(t >= t_valid))])
                  for t, f, r, a in zip(times, full[:, 2], rates[:, 2], analytic)]
        csv_path = out / "compare_residuals.csv"
        _atomic_write(csv_path, "\n".join(lines) + "\n")
        json_path = out / "compare_summary.json"
        _write_manifest(json_path, config, [csv_path, json_path], summary)
        summary["files"] = [str(csv_path), str(json_path)]
    return summary


# -- validation ------------------------------------------------------------------

def validate_scenario(config: ScenarioConfig):
    """Structural checks on the generator plus state validity along a run."""
    params = config.params
    H = build_hamiltonian(params)
    channels = channels_for(params, config.channel_kind)
    L = assemble_liouvillian(H, channels)
    left = np.eye(4).reshape(-1, order="F")
    checks = {}
    checks["trace_preservation"] = float(np.max(np.abs(left @ L)))
    checks["max_real_eigenvalue"] = float(np.max(np.linalg.eigvals(L).real))
    kms = 0.0
    by_label = {c.label: c for c in channels}
    for c in channels:
        if c.label.endswith("+") and c.label[:-1] in by_label:
            fwd = by_label[c.label[:-1]]
            T = params.T_rad
            expected = fwd.rate * np.exp(-abs(c.transition_frequency) / T)
            kms = max(kms, abs(c.rate - expected))
    for k, g in ((1, params.gamma_dp1), (2, params.gamma_dp2)):
        up, down = by_label.get(f"dp,{k}2"), by_label.get(f"dp,{k}3")
        if up and down:
            expected = down.rate * np.exp(-abs(up.transition_frequency) / params.T_dp)
            kms = max(kms, abs(up.rate - expected))
    checks["kms_max_error"] = kms
    if config.channel_kind == "global" and params.is_resonant:
        res = resonant_jump_channels(params)
        det = detuned_jump_channels(params)
        checks["detuned_limit_error"] = float(max(
            np.max(np.abs(a.operator - b.operator)) for a, b in zip(res, det)))
    traj = propagate(config)
    diag = np.array([state_diagnostics(r) for r in traj.states])
    checks["max_trace_error"] = float(diag[:, 0].max())
    checks["max_hermiticity_error"] = float(diag[:, 1].max())
    checks["min_eigenvalue"] = float(diag[:, 2].min())
    limits = {
        "trace_preservation": ("<=", 1e-12),
        "max_real_eigenvalue": ("<=", 1e-10),
        "kms_max_error": ("<=", 1e-12),
        "detuned_limit_error": ("<=", 1e-12),
        "max_trace_error": ("<=", 1e-9),
        "max_hermiticity_error": ("<=", 1e-10),
        "min_eigenvalue": (">=", -1e-9),
    }
    passed = {}
    for name, value in checks.items():
        op, bound = limits[name]
        passed[name] = bool(value <= bound) if op == "<=" else bool(value >= bound)
    return {"checks": checks, "passed": passed, "ok": all(passed.values()),
            "method": traj.method}
