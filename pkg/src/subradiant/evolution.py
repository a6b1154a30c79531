"""Time evolution of the density matrix.

Two independent routes:

* :func:`spectral_propagate` diagonalises the 16x16 Liouvillian once and
  evaluates V exp(Lambda t) V^-1 vec(rho0) at any t, which is what makes
  spans of 1e9-1e10 cheap. Defective generators (e.g. the pure Dicke chain,
  where two decay rates coincide) fall back to scaling-and-squaring matrix
  exponentials.
* :func:`rk_propagate` integrates the non-vectorised master equation with an
  embedded Dormand-Prince 5(4) pair. It works in a frame rotating at the mean
  qubit frequency, which removes the optical oscillation from the step-size
  budget without changing populations, entropy or concurrence.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.csgraph

from .errors import InvalidStateError, StiffnessError
from .lindblad import assemble_liouvillian, excitation_shift, unvec, vec
from .system import NUMBER, dag

log = logging.getLogger(__name__)

TRACE_TOL = 1e-9
HERMITIAN_TOL = 1e-10
POSITIVITY_TOL = 1e-9


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n, 4, 4)
    method: str

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=complex)
        if times.ndim != 1 or states.shape[0] != times.shape[0]:
            raise ValueError("times and states must have matching length")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        times.setflags(write=False)
        states.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    def __len__(self):
        return len(self.times)


def state_diagnostics(rho):
    """(trace error, Hermiticity error, smallest eigenvalue) of one state."""
    rho = np.asarray(rho)
    herm = float(np.max(np.abs(rho - dag(rho))))
    trace_err = float(abs(np.trace(rho) - 1.0))
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + dag(rho))).min())
    return trace_err, herm, min_eig


def check_state(rho, t=None):
    trace_err, herm, min_eig = state_diagnostics(rho)
    where = "" if t is None else f" at t={t:.6g}"
    if trace_err > TRACE_TOL:
        raise InvalidStateError(f"trace deviates by {trace_err:.3e}{where}")
    if herm > HERMITIAN_TOL:
        raise InvalidStateError(f"state is not Hermitian ({herm:.3e}){where}")
    if min_eig < -POSITIVITY_TOL:
        raise InvalidStateError(
            f"negative eigenvalue {min_eig:.3e}{where}; the generator is probably malformed")


def _finish(times, states, method):
    out = np.empty_like(states)
    for i, (t, rho) in enumerate(zip(times, states)):
        sym = 0.5 * (rho + dag(rho))
        dev = np.max(np.abs(rho - sym))
        if dev > 0:
            log.debug("symmetrised state at t=%g (deviation %.2e)", t, dev)
        check_state(sym, t)
        out[i] = sym
    return Trajectory(times=np.asarray(times, dtype=float), states=out, method=method)


def log_time_grid(t_min, t_max, points_per_decade):
    """Logarithmic grid from t_min to t_max inclusive."""
    if not (0 < t_min < t_max) or not np.isfinite(t_max):
        raise ValueError(f"need 0 < t_min < t_max, got {t_min}, {t_max}")
    if points_per_decade <= 0:
        raise ValueError("points_per_decade must be positive")
    decades = np.log10(t_max / t_min)
    n = int(np.ceil(points_per_decade * decades - 1e-9)) + 1
    grid = np.logspace(np.log10(t_min), np.log10(t_max), n)
    grid[0], grid[-1] = t_min, t_max
    return np.unique(grid)


def _as_times(times):
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    return times


def _blocks(L):
    """Index sets of the independent blocks of ``L``.

    A number-conserving generator never couples coherences with different
    excitation-number differences, so ``L`` splits into independent blocks.
    Treating each block on its own keeps the slow population modes away from
    the optical frequencies and the roundoff they bring.
    """
    pattern = scipy.sparse.csr_matrix(np.abs(L) > 0)
    n_blocks, labels = scipy.sparse.csgraph.connected_components(pattern, directed=False)
    return [np.flatnonzero(labels == b) for b in range(n_blocks)]


def block_eig(L):
    """Eigendecomposition of ``L`` done block by block."""
    evals = np.empty(L.shape[0], dtype=complex)
    V = np.zeros_like(L)
    for idx in _blocks(L):
        w, v = np.linalg.eig(L[np.ix_(idx, idx)])
        evals[idx] = w
        V[np.ix_(idx, idx)] = v
    return evals, V


def _traceless_modes(evals, V):
    """Remove the stationary-state component roundoff leaves in decaying modes.

    Trace preservation makes every mode with a nonzero eigenvalue traceless.
    A mode whose eigenvalue sits close to zero (the long-lived plateau) picks
    up a spurious admixture of the stationary state, which shows up as a
    trace drift; projecting it out restores the exact constraint.
    """
    dim = int(round(np.sqrt(V.shape[0])))
    traces = vec(np.eye(dim)) @ V
    scale = max(1.0, float(np.max(np.abs(evals))))
    stationary = np.flatnonzero(np.abs(evals) <= 1e-13 * scale)
    if len(stationary) != 1:
        return V
    k0 = stationary[0]
    if abs(traces[k0]) < 1e-8:
        return V
    ratio = traces / traces[k0]
    ratio[k0] = 0.0
    return V - np.outer(V[:, k0], ratio)


def spectral_propagate(L, rho0, times, max_condition=1e12):
    """rho(t) = exp(L t) rho0 through the eigendecomposition of ``L``.

    Falls back to :func:`expm_propagate` (with a warning) when the
    eigenvector matrix has condition number above ``max_condition``.
    """
    L = np.asarray(L, dtype=complex)
    rho0 = np.asarray(rho0, dtype=complex)
    times = _as_times(times)
    evals, V = block_eig(L)
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond > max_condition:
        warnings.warn(
            f"Liouvillian eigenvectors are ill-conditioned (cond={cond:.2e}); "
            "using matrix-exponential propagation instead",
            RuntimeWarning,
            stacklevel=2,
        )
        return expm_propagate(L, rho0, times)
    V = _traceless_modes(evals, V)
    # positive real parts can only be roundoff for a Lindblad generator
    evals = np.minimum(evals.real, 0.0) + 1j * evals.imag
    coeffs = np.linalg.solve(V, vec(rho0))
    states = np.empty((len(times), *rho0.shape), dtype=complex)
    for i, t in enumerate(times):
        if t == 0:
            states[i] = rho0
        else:
            states[i] = unvec(V @ (np.exp(evals * t) * coeffs), rho0.shape[0])
    return _finish(times, states, "spectral")


def expm_propagate(L, rho0, times):
    """Step exp(L dt) between consecutive sample times (scaling and squaring).

    Each block is exponentiated separately with its mean oscillation
    frequency factored out as a scalar phase.
    """
    L = np.asarray(L, dtype=complex)
    times = _as_times(times)
    v = vec(np.asarray(rho0, dtype=complex)).copy()
    dim = int(round(np.sqrt(v.size)))
    blocks = []
    for idx in _blocks(L):
        A = L[np.ix_(idx, idx)]
        mu = 1j * np.mean(np.diag(A).imag)
        blocks.append((idx, A - mu * np.eye(len(idx)), mu))
    states = np.empty((len(times), dim, dim), dtype=complex)
    t_prev = 0.0
    for i, t in enumerate(times):
        dt = t - t_prev
        if dt > 0:
            for idx, A, mu in blocks:
                v[idx] = np.exp(mu * dt) * (scipy.linalg.expm(A * dt) @ v[idx])
        states[i] = unvec(v, dim)
        t_prev = t
    return _finish(times, states, "expm")


def propagate_params(params, rho0, times, kind="global", method="spectral", rel_tol=1e-10):
    """Convenience wrapper: build generator for ``params`` and propagate."""
    from .lindblad import channels_for
    from .system import build_hamiltonian

    H = build_hamiltonian(params)
    channels = channels_for(params, kind)
    if method == "spectral":
        return spectral_propagate(assemble_liouvillian(H, channels), rho0, times)
    if method == "rk":
        return rk_propagate(H, channels, rho0, times=times, rel_tol=rel_tol)
    if method == "expm":
        return expm_propagate(assemble_liouvillian(H, channels), rho0, times)
    raise ValueError(f"unknown propagator {method!r}")


# -- Dormand-Prince 5(4) -------------------------------------------------------

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array(_A[6] + [0.0])
_B_LOW = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                   -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B - _B_LOW
_A_ROWS = np.zeros((7, 7))
for _i, _row in enumerate(_A):
    _A_ROWS[_i, :len(_row)] = _row


class _Kernel:
    """Master-equation right-hand side with the jump operators stacked.

    -i (H_eff rho - rho H_eff^+) + sum_k A_k rho A_k^+ with
    A_k = sqrt(rate_k) L_k and H_eff = H - (i/2) sum_k A_k^+ A_k. The jump
    sum is done as two 2-D products, [A_1; ...; A_K] rho reshaped against
    [A_1^+; ...; A_K^+].
    """

    def __init__(self, H, channels):
        dim = H.shape[0]
        jumps = [np.sqrt(c.rate) * c.operator for c in channels if c.rate > 0]
        self.dim = dim
        self.n = len(jumps)
        loss = np.zeros((dim, dim), dtype=complex)
        if jumps:
            A = np.array(jumps)
            self.left = A.reshape(-1, dim)                                  # (K*d, d)
            self.right = np.conj(np.transpose(A, (0, 2, 1))).reshape(-1, dim)  # (K*d, d)
            loss = sum(dag(a) @ a for a in jumps)
        self.Heff = np.asarray(H, dtype=complex) - 0.5j * loss
        self.Heff_d = dag(self.Heff)

    def __call__(self, rho):
        # ndarray.dot is markedly cheaper than @ for 4x4 operands
        out = -1j * (self.Heff.dot(rho) - rho.dot(self.Heff_d))
        if self.n:
            m = self.left.dot(rho).reshape(self.n, self.dim, self.dim)
            out += m.transpose(1, 0, 2).reshape(self.dim, -1).dot(self.right)
        return out


def _frame_frequency(H, channels):
    """Mean qubit frequency if every channel has a definite excitation shift."""
    H = np.asarray(H)
    if np.max(np.abs(NUMBER @ H - H @ NUMBER)) > 1e-12 * max(1.0, np.max(np.abs(H))):
        return 0.0
    if any(excitation_shift(c.operator) is None for c in channels):
        return 0.0
    n = np.real(np.diag(NUMBER))
    top = int(np.argmax(n))
    return float(np.real(H[top, top]) / n[top]) if n[top] > 0 else 0.0


def rk_propagate(H, channels, rho0, t_end=None, rel_tol=1e-10, times=None,
                 abs_tol=None, rotating_frame=True, max_steps=5_000_000):
    """Adaptive Dormand-Prince integration of the master equation.

    States are returned at ``times`` (default: ``[0, t_end]``); steps are
    shortened to land exactly on each sample.
    """
    if not 1e-12 <= rel_tol <= 1e-4:
        raise ValueError(f"rel_tol must lie in [1e-12, 1e-4], got {rel_tol}")
    if times is None:
        if t_end is None or t_end <= 0:
            raise ValueError("give t_end > 0 or explicit sample times")
        times = np.array([0.0, float(t_end)])
    times = _as_times(times)
    abs_tol = rel_tol if abs_tol is None else abs_tol
    H = np.asarray(H, dtype=complex)
    rho = np.array(rho0, dtype=complex)

    w_frame = _frame_frequency(H, channels) if rotating_frame else 0.0
    n_diag = np.real(np.diag(NUMBER)) if w_frame else np.zeros(H.shape[0])
    rhs = _Kernel(H - w_frame * NUMBER if w_frame else H, channels)

    def to_lab(r, t):
        phase = np.exp(-1j * w_frame * n_diag * t)
        return phase[:, None] * r * phase.conj()[None, :]

    states = np.empty((len(times), *rho.shape), dtype=complex)
    t = 0.0
    k1 = rhs(rho)
    scale0 = max(np.max(np.abs(k1)), 1e-300)
    h = min(1e-2 / scale0, times[-1]) if times[-1] > 0 else 0.0
    steps = 0
    shape = rho.shape
    stages = np.empty((7, rho.size), dtype=complex)
    for i, t_sample in enumerate(times):
        while t < t_sample:
            if steps >= max_steps:
                raise StiffnessError(
                    f"exceeded {max_steps} steps at t={t:.6g}; use spectral_propagate")
            h_try = min(h, t_sample - t)
            if h_try < 1e-14 * max(1.0, abs(t)):
                raise StiffnessError(
                    f"step size underflow at t={t:.6g}; problem is too stiff, "
                    "use spectral_propagate")
            stages[0] = k1.ravel()
            for i_s in range(1, 7):
                incr = _A_ROWS[i_s, :i_s].dot(stages[:i_s]).reshape(shape)
                stages[i_s] = rhs(rho + h_try * incr).ravel()
            rho_new = rho + h_try * _B.dot(stages).reshape(shape)
            err_vec = h_try * _E.dot(stages)
            tol = abs_tol + rel_tol * np.maximum(np.abs(rho), np.abs(rho_new)).ravel()
            err = float(np.max(np.abs(err_vec) / tol))
            steps += 1
            if err <= 1.0:
                t = t_sample if h_try == t_sample - t else t + h_try
                rho = rho_new
                k1 = stages[6].reshape(shape).copy()
                grow = 5.0 if err == 0 else min(5.0, 0.9 * err ** -0.2)
                # a step clipped to hit a sample time should not shrink h
                h = max(h, h_try * grow) if h_try < h else h_try * grow
            else:
                h = h_try * max(0.2, 0.9 * err ** -0.2)
        states[i] = to_lab(rho, t_sample) if w_frame else rho
    log.debug("rk_propagate: %d steps, frame frequency %g", steps, w_frame)
    return _finish(times, states, "rk")
