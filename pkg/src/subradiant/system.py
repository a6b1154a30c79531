"""Two coupled qubits: parameters, operator algebra, Hamiltonian and eigenbasis.

Units: hbar = k_B = 1 and one unit of energy (frequency, rate, temperature)
is 0.01 eV. All 4x4 operators are written in the ordered product basis

    index 0: |ee>,  1: |eg>,  2: |ge>,  3: |gg>

where the first letter refers to qubit 1. Every matrix in the package, the
CSV outputs and the spin flip used for the concurrence rely on this order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import constants

from .errors import SingularGeometryError

BASIS_LABELS = ("ee", "eg", "ge", "gg")

_SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |g><e|, qubit order (e, g)
_ID2 = np.eye(2, dtype=complex)

SIGMA1 = np.kron(_SIGMA_MINUS, _ID2)
SIGMA2 = np.kron(_ID2, _SIGMA_MINUS)
SIGMAZ1 = np.kron(np.diag([1.0, -1.0]).astype(complex), _ID2)
SIGMAZ2 = np.kron(_ID2, np.diag([1.0, -1.0]).astype(complex))
NUMBER = SIGMA1.conj().T @ SIGMA1 + SIGMA2.conj().T @ SIGMA2

for _op in (SIGMA1, SIGMA2, SIGMAZ1, SIGMAZ2, NUMBER):
    _op.setflags(write=False)


def dag(op):
    return np.conj(op).T


def ket(label):
    """Product-basis ket for one of 'ee', 'eg', 'ge', 'gg'."""
    v = np.zeros(4, dtype=complex)
    v[BASIS_LABELS.index(label)] = 1.0
    return v


def projector(vec):
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


SYMMETRIC = (ket("eg") + ket("ge")) / np.sqrt(2.0)
ANTISYMMETRIC = (ket("eg") - ket("ge")) / np.sqrt(2.0)


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of the two-qubit problem.

    Rates are the emission-side (negative frequency) values of flat reservoir
    spectra; absorption rates follow from detailed balance at the reservoir
    temperature. ``gamma_dp1``/``gamma_dp2`` belong to the separate dephasing
    reservoirs of qubit 1 and 2, ``gamma_rad`` to the common radiative one.
    """

    omega1: float = 100.0
    omega2: float = 100.0
    Omega: float = 0.1
    gamma_dp1: float = 2e-2
    gamma_dp2: float = 2e-2
    gamma_rad: float = 2e-4
    T_dp: float = 2e-2
    T_rad: float = 2e-2

    def __post_init__(self):
        for name in ("omega1", "omega2", "Omega", "gamma_dp1", "gamma_dp2",
                     "gamma_rad", "T_dp", "T_rad"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.Omega <= 0:
            raise ValueError(f"Omega must be > 0, got {self.Omega}")
        for name in ("gamma_dp1", "gamma_dp2", "gamma_rad"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("T_dp", "T_rad"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        # rotating wave approximation needs omega_k >> Omega and |Delta| << omega_k
        w_min = min(self.omega1, self.omega2)
        if w_min < 10.0 * self.Omega or abs(self.detuning) > 0.1 * w_min:
            warnings.warn(
                "qubit frequencies are not much larger than the coupling/detuning; "
                "the rotating wave approximation may not hold",
                RuntimeWarning,
                stacklevel=3,
            )

    @property
    def detuning(self):
        return self.omega1 - self.omega2

    @property
    def theta(self):
        return self.omega1 + self.omega2

    @property
    def splitting(self):
        """Frequency gap sqrt(Delta^2 + 4 Omega^2) of the one-excitation doublet."""
        return float(np.hypot(self.detuning, 2.0 * self.Omega))

    @property
    def is_resonant(self):
        return abs(self.detuning) <= 1e-12

    def replace(self, **changes):
        values = {k: getattr(self, k) for k in self.__dataclass_fields__}
        values.update(changes)
        return SystemParams(**values)


def build_hamiltonian(params: SystemParams) -> np.ndarray:
    """System Hamiltonian w1 s1+s1 + w2 s2+s2 + Omega (s1+ s2 + s2+ s1)."""
    hop = dag(SIGMA1) @ SIGMA2
    h = (params.omega1 * dag(SIGMA1) @ SIGMA1
         + params.omega2 * dag(SIGMA2) @ SIGMA2
         + params.Omega * hop)
    h = h + params.Omega * dag(hop)
    return 0.5 * (h + dag(h))


@dataclass(frozen=True)
class EigenBasis:
    """Closed-form eigenbasis ordered (|ee>, |+>, |->, |gg>).

    At zero detuning |+> is the symmetric (superradiant) state and |->
    the antisymmetric (subradiant) one. ``vectors`` holds the states as
    columns in the product basis.
    """

    vectors: np.ndarray
    frequencies: np.ndarray
    detuning: float = 0.0
    labels: tuple = field(default=("ee", "+", "-", "gg"))

    def state(self, label):
        aliases = {"s": "+", "as": "-"}
        return self.vectors[:, self.labels.index(aliases.get(label, label))]


def doublet_mixing(detuning, Omega):
    """Admixture x = Delta / (2 Omega + sqrt(Delta^2 + 4 Omega^2)).

    |+> ~ |s> + x|as>  and  |-> ~ |as> - x|s>. The second form replaces the
    printed (2 Omega - sqrt(...)) / Delta, which is 0/0 at resonance.
    """
    return detuning / (2.0 * Omega + np.hypot(detuning, 2.0 * Omega))


def eigen_system(params: SystemParams) -> EigenBasis:
    x = doublet_mixing(params.detuning, params.Omega)
    norm = np.sqrt(1.0 + x * x)
    plus = (SYMMETRIC + x * ANTISYMMETRIC) / norm
    minus = (ANTISYMMETRIC - x * SYMMETRIC) / norm
    vectors = np.column_stack([ket("ee"), plus, minus, ket("gg")])
    w = params.splitting
    freqs = np.array([params.theta, 0.5 * (params.theta + w), 0.5 * (params.theta - w), 0.0])
    vectors.setflags(write=False)
    freqs.setflags(write=False)
    return EigenBasis(vectors=vectors, frequencies=freqs, detuning=params.detuning)


def change_basis(rho, basis: EigenBasis, direction="to_eigen", atol=1e-10):
    """Rotate a density matrix between the product basis and ``basis``.

    ``to_eigen`` returns U^+ rho U, ``to_product`` returns U rho U^+.
    """
    u = np.asarray(basis.vectors)
    if np.max(np.abs(dag(u) @ u - np.eye(u.shape[0]))) > atol:
        raise ValueError("basis matrix is not unitary")
    rho = np.asarray(rho, dtype=complex)
    if direction == "to_eigen":
        return dag(u) @ rho @ u
    if direction == "to_product":
        return u @ rho @ dag(u)
    raise ValueError(f"direction must be 'to_eigen' or 'to_product', got {direction!r}")


class DipoleCoupling(NamedTuple):
    rate: float           # s^-1
    dimensionless: float  # in units of ``energy_unit_ev``


DEBYE_CGS = 1e-18  # statC cm
HBAR_CGS = constants.hbar * 1e7  # erg s


def dipole_coupling_constant(d1, d2, r_nm, energy_unit_ev=0.01):
    """Point-dipole coupling (d1.d2 - 3 (d1.n)(d2.n)) / (hbar r^3), Gaussian units.

    ``d1`` and ``d2`` are dipole vectors in Debye; the separation vector
    ``r_nm`` (nm) fixes both the distance and the unit vector n. A scalar
    ``r_nm`` places the second dipole along the x axis.
    """
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    r_vec = np.asarray(r_nm, dtype=float)
    if r_vec.ndim == 0:
        r_vec = np.array([float(r_vec), 0.0, 0.0])
    if not (np.all(np.isfinite(d1)) and np.all(np.isfinite(d2)) and np.all(np.isfinite(r_vec))):
        raise ValueError("dipoles and separation must be finite")
    r = float(np.linalg.norm(r_vec))
    if r == 0.0:
        raise SingularGeometryError("dipole separation must be non-zero")
    n = r_vec / r
    r_cm = r * 1e-7
    energy = (d1 @ d2 - 3.0 * (d1 @ n) * (d2 @ n)) * DEBYE_CGS**2 / r_cm**3  # erg
    rate = energy / HBAR_CGS
    unit_erg = energy_unit_ev * constants.e * 1e7
    return DipoleCoupling(rate=float(rate), dimensionless=float(energy / unit_erg))
