"""Jump channels, detailed-balance rates and the Liouvillian.

Each channel contributes (rate / 2) * (2 L rho L^+ - rho L^+ L - L^+ L rho)
to d rho / dt. Reservoir spectra are flat on the emission side: a channel
whose transition frequency is <= 0 (or which moves energy out of the
system) carries the bare rate, its reverse partner carries the
Boltzmann-suppressed rate.

Vectorisation is column stacking, vec(A X B) = (B^T kron A) vec(X), so the
Liouvillian acts on ``rho.reshape(-1, order="F")``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChannelError
from .system import (NUMBER, SIGMA1, SIGMA2, SIGMAZ1, SIGMAZ2, SystemParams,
                     build_hamiltonian, dag)


@dataclass(frozen=True)
class JumpChannel:
    operator: np.ndarray
    rate: float
    transition_frequency: float
    label: str

    def __post_init__(self):
        if not self.rate >= 0:
            raise ValueError(f"channel {self.label}: rate must be >= 0, got {self.rate}")
        op = np.array(self.operator, dtype=complex)
        op.setflags(write=False)
        object.__setattr__(self, "operator", op)


def kms_rate(gamma_negative, omega, T):
    """Rate at frequency ``omega`` given the emission-side rate gamma(-|omega|).

    gamma(omega) = exp(-omega / T) gamma(-omega) for omega > 0; the flat
    emission side is returned unchanged for omega <= 0.
    """
    if not T > 0:
        raise ValueError(f"temperature must be > 0, got {T}")
    if gamma_negative < 0:
        raise ValueError(f"rate must be >= 0, got {gamma_negative}")
    if omega <= 0:
        return float(gamma_negative)
    return float(gamma_negative * np.exp(-omega / T))


def vec(rho):
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v, dim=4):
    return np.asarray(v).reshape(dim, dim, order="F")


# -- resonant (omega1 == omega2) ------------------------------------------------

def _radiative_channels(l_rad1, l_rad2, w_rad1, w_rad2, params):
    """Emission channels L_rad,k plus absorption partners L_rad,k^+."""
    g, T = params.gamma_rad, params.T_rad
    return [
        JumpChannel(l_rad1, kms_rate(g, -w_rad1, T), -w_rad1, "rad,1"),
        JumpChannel(l_rad2, kms_rate(g, -w_rad2, T), -w_rad2, "rad,2"),
        JumpChannel(dag(l_rad1), kms_rate(g, w_rad1, T), w_rad1, "rad,1+"),
        JumpChannel(dag(l_rad2), kms_rate(g, w_rad2, T), w_rad2, "rad,2+"),
    ]


def _dephasing_channels(ops, gap, params):
    """ops[k] = (L_k1, L_k2, L_k3) for reservoir k; frequencies gap * (0, 1, -1)."""
    out = []
    for k, (gamma, triple) in enumerate(zip((params.gamma_dp1, params.gamma_dp2), ops), start=1):
        for j, (theta, op) in enumerate(zip((0.0, 1.0, -1.0), triple), start=1):
            w = gap * theta
            out.append(JumpChannel(op, kms_rate(gamma, w, params.T_dp), w, f"dp,{k}{j}"))
    return out


def resonant_jump_channels(params: SystemParams, atol=1e-12):
    """Global channels for equal qubit frequencies: six dephasing, four radiative."""
    if abs(params.detuning) > atol:
        raise ChannelError(
            f"qubits are detuned by {params.detuning}; use detuned_jump_channels")
    s1, s2 = SIGMA1, SIGMA2
    n1 = dag(s1) @ s1
    n2 = dag(s2) @ s2
    l_rad1 = s1 + s2 - n1 @ s2 - s1 @ n2
    l_rad2 = n1 @ s2 + s1 @ n2
    l11 = n1 / 2 + n2 / 2
    l12 = (dag(s1) + dag(s2)) @ (s1 - s2) / 4
    l13 = dag(l12)
    ops = [(l11, l12, l13), (l11, -l12, -l13)]
    w = 0.5 * params.theta
    return (_dephasing_channels(ops, 2.0 * params.Omega, params)
            + _radiative_channels(l_rad1, l_rad2, w + params.Omega, w - params.Omega, params))


# -- detuned -------------------------------------------------------------------

def detuned_jump_channels(params: SystemParams):
    """Global channels for arbitrary detuning, y = (omega1 - omega2) / Omega.

    Reduces to :func:`resonant_jump_channels` at y = 0.
    """
    if params.Omega == 0:
        raise ChannelError("Omega = 0: detuned channels need a finite coupling")
    y = params.detuning / params.Omega
    q = np.sqrt(y * y + 4.0)
    s1, s2 = SIGMA1, SIGMA2
    n1 = dag(s1) @ s1
    n2 = dag(s2) @ s2
    hop = dag(s1) @ s2 + dag(s2) @ s1
    a = n1 @ s2          # s1+ s1 s2
    b = n2 @ s1          # s2+ s2 s1

    l_rad1 = (s1 * (1 + (y + q) / 2) + s2 * (1 + (-y + q) / 2) - 2 * a - 2 * b) / q
    l_rad2 = (s1 * (-1 - (y - q) / 2) + s2 * (-1 + (y + q) / 2) + 2 * a + 2 * b) / q

    c = 1.0 / (y * y + 4.0)
    l11 = c * (2 * (n1 * (y * y + 2) / 2 + n2) + y * hop)
    l12 = -c * (dag(s1) * (y + q) / 2 + dag(s2)) @ (s1 * (y - q) / 2 + s2)
    l13 = -c * (dag(s1) * (y - q) / 2 + dag(s2)) @ (s1 * (y + q) / 2 + s2)
    l21 = c * (2 * (n2 * (y * y + 2) / 2 + n1) - y * hop)
    l22 = -c * (dag(s2) * (-y + q) / 2 + dag(s1)) @ (s2 * (-y - q) / 2 + s1)
    l23 = -c * (dag(s2) * (-y - q) / 2 + dag(s1)) @ (s2 * (-y + q) / 2 + s1)

    gap = params.splitting
    return (_dephasing_channels([(l11, l12, l13), (l21, l22, l23)], gap, params)
            + _radiative_channels(l_rad1, l_rad2, 0.5 * (params.theta + gap),
                                  0.5 * (params.theta - gap), params))


def global_jump_channels(params: SystemParams):
    if params.is_resonant:
        return resonant_jump_channels(params)
    return detuned_jump_channels(params)


def local_jump_channels(params: SystemParams):
    """Bare sigma_z dephasing on each qubit plus the common radiative channels."""
    rad = [c for c in global_jump_channels(params) if c.label.startswith("rad")]
    dp = [
        JumpChannel(SIGMAZ1, params.gamma_dp1, 0.0, "local,dp_1"),
        JumpChannel(SIGMAZ2, params.gamma_dp2, 0.0, "local,dp_2"),
    ]
    return dp + rad


# -- generator -----------------------------------------------------------------

def assemble_liouvillian(H, channels):
    """16x16 generator acting on column-stacked density matrices."""
    H = np.asarray(H, dtype=complex)
    dim = H.shape[0]
    if H.shape != (dim, dim):
        raise ValueError(f"Hamiltonian must be square, got {H.shape}")
    eye = np.eye(dim, dtype=complex)
    gen = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    for ch in channels:
        L = np.asarray(ch.operator, dtype=complex)
        if L.shape != (dim, dim):
            raise ValueError(f"channel {ch.label} has shape {L.shape}, expected {(dim, dim)}")
        if ch.rate == 0:
            continue
        LdL = dag(L) @ L
        gen += 0.5 * ch.rate * (2.0 * np.kron(L.conj(), L)
                                - np.kron(eye, LdL) - np.kron(LdL.T, eye))
    return gen


def master_rhs(rho, H, channels):
    """d rho / dt evaluated directly on the 4x4 matrix (no vectorisation)."""
    rho = np.asarray(rho, dtype=complex)
    drho = -1j * (H @ rho - rho @ H)
    for ch in channels:
        L = ch.operator
        Ld = dag(L)
        drho = drho + 0.5 * ch.rate * (2.0 * L @ rho @ Ld - rho @ Ld @ L - Ld @ L @ rho)
    return drho


def excitation_shift(op, atol=1e-12):
    """Integer m with [N, op] = m op, or None if op mixes excitation sectors."""
    op = np.asarray(op)
    scale = np.linalg.norm(op)
    if scale == 0:
        return 0
    comm = NUMBER @ op - op @ NUMBER
    m = np.vdot(op, comm).real / scale**2
    if np.linalg.norm(comm - m * op) > atol * max(1.0, scale):
        return None
    return int(round(m))


def channels_for(params: SystemParams, kind="global"):
    if kind == "global":
        return global_jump_channels(params)
    if kind == "local":
        return local_jump_channels(params)
    raise ValueError(f"unknown channel set {kind!r}")


def liouvillian_for(params: SystemParams, kind="global"):
    return assemble_liouvillian(build_hamiltonian(params), channels_for(params, kind))
