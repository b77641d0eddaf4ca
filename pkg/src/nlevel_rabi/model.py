"""Physical configuration and Hamiltonian builders for the driven n-level atom.

An atom with n levels E_0 < ... < E_{n-1} interacts with n(n-1)/2 external
fields, one per level pair (i, j).  Under the rotating wave approximation the
pair (i, j) couples through a phase factor exp(i*omega_ij*t); without it the
drive is a real cosine, g*cos(omega_ij*t).

Conventions (fixed throughout the package):

* hbar = 1; the constant ground-state offset is dropped, so energies are
  stored shifted with E_0 = 0.
* Drive phases are zero.
* The RWA coupling g already absorbs the factor 1/2 from splitting the
  cosine, so an RWA run with coupling g corresponds physically to a cosine
  drive of amplitude 2g.  Cross-mode comparisons must apply that factor.

Note on the cosine drive: the three-level source problem is sometimes written
with "cos(i*omega*t)", which taken literally is a cosh and would make the
Hamiltonian non-Hermitian and unbounded.  We read it as cos(omega*t),
consistent with the two-level dipole form.

All types are immutable after construction and all evaluators are pure
functions of t, so everything here is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

HamiltonianFn = Callable[[float], np.ndarray]

__all__ = [
    "ConfigError",
    "LevelSpec",
    "DriveSpec",
    "Detunings",
    "StateVector",
    "HamiltonianFn",
    "build_h0",
    "build_interaction_rwa",
    "full_hamiltonian",
    "full_hamiltonian_nonrwa",
    "rotating_frame",
    "transformed_hamiltonian",
    "apply_resonance",
    "is_resonant",
    "detunings",
    "residual_coupling",
    "split_c_r",
]


class ConfigError(ValueError):
    """Invalid physical configuration or parameters."""


@dataclass(frozen=True)
class LevelSpec:
    """Atomic level structure: strictly increasing energies, ground at zero.

    Energies are shifted at construction so E_0 = 0; the overall offset is a
    global phase and never enters populations.
    """

    energies: tuple

    def __post_init__(self):
        e = tuple(float(x) for x in self.energies)
        if len(e) < 2:
            raise ConfigError("need at least two levels")
        if any(b <= a for a, b in zip(e, e[1:])):
            raise ConfigError("energies must be strictly increasing")
        object.__setattr__(self, "energies", tuple(x - e[0] for x in e))

    @property
    def n(self) -> int:
        return len(self.energies)

    @property
    def deltas(self) -> np.ndarray:
        """Energies relative to the ground state: delta_0 = 0, delta_j = E_j - E_0."""
        return np.asarray(self.energies, dtype=float)


@dataclass(frozen=True)
class DriveSpec:
    """External fields: one positive frequency per level pair, coupling g > 0.

    ``omega`` maps each ordered pair (i, j), i < j, to its drive frequency.
    The adjacent frequencies omega_k = omega[(k-1, k)] set the rotating frame;
    the non-adjacent ones control the detunings.
    """

    n: int
    omega: Mapping
    g: float
    rwa: bool = True

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError("need at least two levels")
        if not self.g > 0:
            raise ConfigError("coupling g must be positive")
        om = {(int(i), int(j)): float(w) for (i, j), w in dict(self.omega).items()}
        want = {(i, j) for i in range(self.n) for j in range(i + 1, self.n)}
        if set(om) != want:
            raise ConfigError(
                "omega must hold exactly one frequency per pair (i, j) with i < j"
            )
        if any(w <= 0 for w in om.values()):
            raise ConfigError("drive frequencies must be positive")
        object.__setattr__(self, "omega", om)

    @property
    def adjacent(self) -> np.ndarray:
        """omega_k = omega_{k-1,k} for k = 1 .. n-1."""
        return np.array([self.omega[(k - 1, k)] for k in range(1, self.n)])


@dataclass(frozen=True)
class Detunings:
    """eps_{ij} = omega_{ij} - (omega_{i+1} + ... + omega_j) for j - i >= 2."""

    n: int
    eps: Mapping

    def __post_init__(self):
        object.__setattr__(
            self, "eps", {(int(i), int(j)): float(v) for (i, j), v in dict(self.eps).items()}
        )

    def max_abs(self) -> float:
        return max((abs(v) for v in self.eps.values()), default=0.0)


_NORM_TOL = 1e-12


@dataclass(frozen=True)
class StateVector:
    """Unit-norm complex amplitude vector (same shape in every frame)."""

    amp: np.ndarray

    def __post_init__(self):
        a = np.array(self.amp, dtype=complex)
        if a.ndim != 1 or len(a) < 2:
            raise ConfigError("state must be a vector of length >= 2")
        if abs(np.linalg.norm(a) - 1.0) > _NORM_TOL:
            raise ConfigError("state vector must have unit norm")
        a.flags.writeable = False
        object.__setattr__(self, "amp", a)

    @property
    def n(self) -> int:
        return len(self.amp)

    def populations(self) -> np.ndarray:
        return np.abs(self.amp) ** 2

    @classmethod
    def basis(cls, n: int, k: int) -> "StateVector":
        amp = np.zeros(n, dtype=complex)
        amp[k] = 1.0
        return cls(amp)

    @classmethod
    def normalized(cls, amps) -> "StateVector":
        a = np.asarray(amps, dtype=complex)
        norm = np.linalg.norm(a)
        if norm == 0:
            raise ConfigError("cannot normalize the zero vector")
        return cls(a / norm)


def build_h0(levels: LevelSpec) -> np.ndarray:
    """Bare atomic Hamiltonian diag(0, delta_1, ..., delta_{n-1})."""
    return np.diag(levels.deltas)


def build_interaction_rwa(drive: DriveSpec, t: float) -> np.ndarray:
    """RWA interaction V(t): V_ij = exp(i*omega_ij*t) for i < j, Hermitian."""
    if not drive.rwa:
        raise ConfigError("RWA interaction requested with rwa=False")
    v = np.zeros((drive.n, drive.n), dtype=complex)
    for (i, j), w in drive.omega.items():
        v[i, j] = np.exp(1j * w * t)
        v[j, i] = np.conj(v[i, j])
    return v


def full_hamiltonian(levels: LevelSpec, drive: DriveSpec) -> HamiltonianFn:
    """Lab-frame RWA Hamiltonian H(t) = H0 + g*V(t)."""
    _check_match(levels, drive)
    if not drive.rwa:
        raise ConfigError("full_hamiltonian requires an RWA drive")
    h0 = build_h0(levels).astype(complex)
    g = drive.g
    return lambda t: h0 + g * build_interaction_rwa(drive, t)


def full_hamiltonian_nonrwa(levels: LevelSpec, drive: DriveSpec) -> HamiltonianFn:
    """Lab-frame cosine-drive Hamiltonian: off-diagonals g*cos(omega_ij*t)."""
    _check_match(levels, drive)
    if drive.rwa:
        raise ConfigError("full_hamiltonian_nonrwa requires rwa=False")
    h0 = build_h0(levels).astype(complex)
    g = drive.g
    pairs = list(drive.omega.items())

    def h(t: float) -> np.ndarray:
        m = h0.copy()
        for (i, j), w in pairs:
            m[i, j] = m[j, i] = g * np.cos(w * t)
        return m

    return h


def rotating_frame(drive: DriveSpec, t: float) -> np.ndarray:
    """Diagonal frame unitary U(t) = diag(1, e^{i*omega_1*t}, e^{i(omega_1+omega_2)t}, ...)."""
    phases = np.concatenate(([0.0], np.cumsum(drive.adjacent))) * t
    return np.diag(np.exp(1j * phases))


def rotating_frame_phases(drive: DriveSpec) -> np.ndarray:
    """Cumulative adjacent frequencies (0, omega_1, omega_1+omega_2, ...)."""
    return np.concatenate(([0.0], np.cumsum(drive.adjacent)))


def detunings(drive: DriveSpec) -> Detunings:
    """Detunings eps_{ij} of non-adjacent drives against the adjacent chain."""
    adj = drive.adjacent
    eps = {}
    for i in range(drive.n):
        for j in range(i + 2, drive.n):
            eps[(i, j)] = drive.omega[(i, j)] - float(adj[i:j].sum())
    return Detunings(drive.n, eps)


def transformed_hamiltonian(levels: LevelSpec, drive: DriveSpec) -> HamiltonianFn:
    """Rotating-frame Hamiltonian U†HU - i U†(dU/dt).

    Diagonal: delta_k - (omega_1 + ... + omega_k).  First off-diagonal: g.
    Pairs with j - i >= 2: g * exp(+-i*eps_ij*t).
    """
    _check_match(levels, drive)
    if not drive.rwa:
        raise ConfigError("transformed_hamiltonian requires an RWA drive")
    diag = levels.deltas - rotating_frame_phases(drive)
    eps = detunings(drive).eps
    g = drive.g
    n = drive.n

    def h(t: float) -> np.ndarray:
        m = np.diag(diag.astype(complex))
        for k in range(n - 1):
            m[k, k + 1] = m[k + 1, k] = g
        for (i, j), e in eps.items():
            m[i, j] = g * np.exp(1j * e * t)
            m[j, i] = np.conj(m[i, j])
        return m

    return h


def apply_resonance(levels: LevelSpec, g: float, *, rwa: bool = True,
                    nonadjacent: Mapping | None = None) -> DriveSpec:
    """Drive with adjacent frequencies on resonance: omega_j = E_j - E_{j-1}.

    Non-adjacent frequencies default to the sum of the adjacent ones in
    between (all detunings zero); pass ``nonadjacent`` entries to detune
    specific pairs.
    """
    e = levels.deltas
    omega = {(k - 1, k): float(e[k] - e[k - 1]) for k in range(1, levels.n)}
    for i in range(levels.n):
        for j in range(i + 2, levels.n):
            omega[(i, j)] = float(e[j] - e[i])
    if nonadjacent:
        for (i, j), w in dict(nonadjacent).items():
            if j - i < 2:
                raise ConfigError("only pairs with j - i >= 2 may be overridden")
            omega[(int(i), int(j))] = float(w)
    return DriveSpec(n=levels.n, omega=omega, g=g, rwa=rwa)


def is_resonant(levels: LevelSpec, drive: DriveSpec, tol: float = 1e-12) -> bool:
    """True when omega_j = E_j - E_{j-1} for every adjacent pair."""
    e = levels.deltas
    gaps = e[1:] - e[:-1]
    scale = max(1.0, float(np.max(np.abs(e))))
    return bool(np.all(np.abs(drive.adjacent - gaps) <= tol * scale))


def residual_coupling(det: Detunings, t: float) -> np.ndarray:
    """R(t): exp(+-i*eps_ij*t) on pairs with j - i >= 2, zeros elsewhere."""
    r = np.zeros((det.n, det.n), dtype=complex)
    for (i, j), e in det.eps.items():
        r[i, j] = np.exp(1j * e * t)
        r[j, i] = np.conj(r[i, j])
    return r


def split_c_r(levels: LevelSpec, drive: DriveSpec):
    """Split the resonant rotating-frame Hamiltonian as g*C + g*R(t).

    C is the 0/1 tridiagonal nearest-neighbour coupling matrix, R(t) holds the
    residual non-adjacent phases.  Requires the resonance conditions, which
    zero the diagonal.
    """
    _check_match(levels, drive)
    if not is_resonant(levels, drive):
        raise ConfigError("split requires the resonance conditions omega_j = E_j - E_{j-1}")
    n = drive.n
    c = np.zeros((n, n), dtype=int)
    for k in range(n - 1):
        c[k, k + 1] = c[k + 1, k] = 1
    det = detunings(drive)
    return c, lambda t: residual_coupling(det, t)


def _check_match(levels: LevelSpec, drive: DriveSpec):
    if levels.n != drive.n:
        raise ConfigError("level count and drive dimension disagree")
