"""Eigenstate populations, entropy, concurrence and plateau lifetimes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import FitQualityError, InsufficientHorizonError, InvalidStateError
from .system import EigenBasis, dag

EIG_CLIP = 1e-12

SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]])
YY = np.kron(SIGMA_Y, SIGMA_Y)


class Populations(NamedTuple):
    p_ee: float
    p_s: float
    p_as: float
    p_gg: float


def populations(rho, basis: EigenBasis) -> Populations:
    """Diagonal of rho in ``basis`` (ordered ee, +/s, -/as, gg)."""
    u = np.asarray(basis.vectors)
    diag = np.einsum("ia,ij,ja->a", u.conj(), np.asarray(rho), u)
    return Populations(*(float(x) for x in diag.real))


def population_series(states, basis: EigenBasis):
    """Populations for a stack of states, shape (n, 4)."""
    u = np.asarray(basis.vectors)
    return np.einsum("ia,nij,ja->na", u.conj(), np.asarray(states), u).real


def von_neumann_entropy(rho):
    """S = -Tr rho ln rho in nats."""
    rho = np.asarray(rho)
    lam = np.linalg.eigvalsh(0.5 * (rho + dag(rho)))
    if lam.min() < -1e-6:
        raise InvalidStateError(f"state has eigenvalue {lam.min():.3e}")
    lam = lam[lam > EIG_CLIP]
    return float(max(0.0, -np.sum(lam * np.log(lam))))


def spin_flip(rho):
    """(sigma_y x sigma_y) rho* (sigma_y x sigma_y) in the product basis."""
    return YY @ np.conj(rho) @ YY


def concurrence(rho, basis="product"):
    """Wootters concurrence of a two-qubit state.

    The spin flip is only meaningful in the product basis, so a state tagged
    with any other basis is rejected. The eigenvalues of rho * spin_flip(rho)
    are obtained from the Hermitian form sqrt(rho) rho~ sqrt(rho), which has
    the same spectrum. Eigenvalues below ``EIG_CLIP`` are roundoff and are
    set to zero before the square roots.
    """
    if basis != "product":
        raise ValueError(f"concurrence needs a product-basis state, got basis={basis!r}")
    rho = np.asarray(rho, dtype=complex)
    rho = 0.5 * (rho + dag(rho))
    w, v = np.linalg.eigh(rho)
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ dag(v)
    m = root @ spin_flip(rho) @ root
    lam = np.linalg.eigvalsh(0.5 * (m + dag(m)))
    lam = np.sort(np.where(lam > EIG_CLIP, lam, 0.0))[::-1]
    s = np.sqrt(lam)
    return float(np.clip(s[0] - s[1] - s[2] - s[3], 0.0, 1.0))


@dataclass(frozen=True)
class ObservableRecord:
    t: float
    p_ee: float
    p_s: float
    p_as: float
    p_gg: float
    S: float
    C: float
    trace_err: float
    min_eig: float

    def check(self, tol=1e-8):
        """Raise if the record violates the bounds every physical state obeys."""
        for name in ("p_ee", "p_s", "p_as", "p_gg"):
            value = getattr(self, name)
            if not -tol <= value <= 1 + tol:
                raise InvalidStateError(f"{name}={value} out of [0, 1] at t={self.t}")
        total = self.p_ee + self.p_s + self.p_as + self.p_gg
        if abs(total - 1.0) > tol:
            raise InvalidStateError(f"populations sum to {total} at t={self.t}")
        if not 0.0 <= self.C <= 1.0:
            raise InvalidStateError(f"concurrence {self.C} out of range at t={self.t}")
        if not 0.0 <= self.S <= np.log(4.0) + 1e-12:
            raise InvalidStateError(f"entropy {self.S} out of range at t={self.t}")


def observe(traj, basis: EigenBasis):
    """One :class:`ObservableRecord` per sample of a trajectory."""
    pops = population_series(traj.states, basis)
    out = []
    for t, rho, p in zip(traj.times, traj.states, pops):
        out.append(ObservableRecord(
            t=float(t), p_ee=float(p[0]), p_s=float(p[1]), p_as=float(p[2]), p_gg=float(p[3]),
            S=von_neumann_entropy(rho), C=concurrence(rho),
            trace_err=float(abs(np.trace(rho).real - 1.0)),
            min_eig=float(np.linalg.eigvalsh(rho).min()),
        ))
    return out


class LifetimeFit(NamedTuple):
    rate: float
    t_ent: float
    r_squared: float
    plateau: float
    window: tuple


def fit_decay(times, values, lower=0.05, upper=0.8, min_r_squared=0.999, min_points=4):
    """Exponential decay rate of the tail of ``values`` after its maximum.

    The window holds the samples after the peak that lie between
    ``lower * plateau`` and ``upper * plateau``; ln(values) is regressed
    linearly on t over that window.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    i_peak = int(np.argmax(values))
    plateau = float(values[i_peak])
    if plateau <= 0 or values[-1] > 0.5 * plateau:
        raise InsufficientHorizonError(
            "population never falls below half its plateau; extend the time grid")
    after = np.arange(len(values)) > i_peak
    mask = after & (values <= upper * plateau) & (values >= lower * plateau)
    if mask.sum() < min_points:
        raise InsufficientHorizonError(
            f"only {int(mask.sum())} samples in the fit window; use a denser or longer grid")
    idx = np.flatnonzero(mask)
    if np.any(np.diff(idx) != 1):
        raise FitQualityError("fit window is not contiguous; the tail is not monotone")
    t_w, y_w = times[mask], np.log(values[mask])
    if np.any(np.diff(y_w) > 1e-12):
        raise FitQualityError("population is not monotonically decreasing in the fit window")
    slope, intercept = np.polyfit(t_w, y_w, 1)
    resid = y_w - (slope * t_w + intercept)
    ss_tot = float(np.sum((y_w - y_w.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
    if r2 < min_r_squared:
        raise FitQualityError(f"exponential fit has R^2={r2:.6f} < {min_r_squared}")
    rate = -float(slope)
    if rate <= 0:
        raise FitQualityError("fitted rate is not positive")
    return LifetimeFit(rate=rate, t_ent=1.0 / rate, r_squared=r2, plateau=plateau,
                       window=(float(t_w[0]), float(t_w[-1])))


def fit_lifetime(traj, basis: EigenBasis, state="as", **kwargs):
    """Decay rate and lifetime of the subradiant (or given) population plateau."""
    column = {"ee": 0, "s": 1, "+": 1, "as": 2, "-": 2, "gg": 3}[state]
    pops = population_series(traj.states, basis)[:, column]
    return fit_decay(traj.times, pops, **kwargs)
