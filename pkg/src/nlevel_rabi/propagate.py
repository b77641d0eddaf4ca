"""Independent numerical oracle: RK4 Schrödinger integration and a generic expm.

Nothing here touches the closed-form machinery in `spectral` or `exact`; this
module exists to cross-check it.  The integrator never renormalizes, so norm
drift stays visible as an error meter.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .model import ConfigError, HamiltonianFn, StateVector

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "DeviationReport",
    "NumericFailure",
    "StepBudgetExceeded",
    "NormRangeError",
    "integrate",
    "expm_generic",
    "compare",
]


class NumericFailure(RuntimeError):
    """NaN or overflow encountered during integration."""


class StepBudgetExceeded(RuntimeError):
    """max_steps hit before reaching the end of the grid.

    The partial trajectory up to the last completed grid point is attached.
    """

    def __init__(self, trajectory: "Trajectory"):
        self.trajectory = trajectory
        super().__init__("integration step budget exceeded")


class NormRangeError(ValueError):
    """Matrix norm outside the range the series exponential is rated for."""


@dataclass(frozen=True)
class IntegratorConfig:
    """RK4 settings: base step, local error target, and a total work bound."""

    step: float = 1e-3
    tol: float = 1e-9
    max_steps: int = 10_000_000
    adaptive: bool = False

    def __post_init__(self):
        if not self.step > 0:
            raise ConfigError("step must be positive")
        if not (0 < self.tol <= 1e-3):
            raise ConfigError("tol must lie in (0, 1e-3]")
        if self.max_steps < 1:
            raise ConfigError("max_steps must be positive")


@dataclass(frozen=True)
class Trajectory:
    """Time grid and the state at each grid point (rows of ``states``)."""

    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        states = np.array(self.states, dtype=complex)
        times.flags.writeable = False
        states.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.states) ** 2

    def norm_drift(self) -> float:
        return float(np.max(np.abs(np.linalg.norm(self.states, axis=1) - 1.0)))

    def to_csv(self, target):
        """CSV with header t, re_0, im_0, ..., p_0, ...; 17 significant digits.

        ``target`` may be a path or an open text stream.
        """
        if hasattr(target, "write"):
            self._write_csv(target)
        else:
            with open(target, "w") as fh:
                self._write_csv(fh)

    def _write_csv(self, fh):
        n = self.n
        header = ["t"]
        header += [f"{part}_{k}" for k in range(n) for part in ("re", "im")]
        header += [f"p_{k}" for k in range(n)]
        pops = self.populations
        fh.write(",".join(header) + "\n")
        for i, t in enumerate(self.times):
            row = [f"{t:.17g}"]
            for k in range(n):
                row.append(f"{self.states[i, k].real:.17g}")
                row.append(f"{self.states[i, k].imag:.17g}")
            row += [f"{p:.17g}" for p in pops[i]]
            fh.write(",".join(row) + "\n")

    def as_dict(self, config: dict | None = None) -> dict:
        return {
            "config": config or {},
            "times": [float(t) for t in self.times],
            "states": [
                [[float(z.real), float(z.imag)] for z in row] for row in self.states
            ],
            "populations": self.populations.tolist(),
        }

    def to_json(self, target, config: dict | None = None):
        """JSON variant carrying the full input configuration as provenance."""
        doc = self.as_dict(config)
        if hasattr(target, "write"):
            json.dump(doc, target, indent=2)
            target.write("\n")
        else:
            with open(target, "w") as fh:
                json.dump(doc, fh, indent=2)
                fh.write("\n")


def _rk4_step(h_fn: HamiltonianFn, t: float, psi: np.ndarray, h: float) -> np.ndarray:
    k1 = -1j * (h_fn(t) @ psi)
    k2 = -1j * (h_fn(t + 0.5 * h) @ (psi + 0.5 * h * k1))
    k3 = -1j * (h_fn(t + 0.5 * h) @ (psi + 0.5 * h * k2))
    k4 = -1j * (h_fn(t + h) @ (psi + h * k3))
    return psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(h_fn: HamiltonianFn, psi0: StateVector, t_grid, cfg: IntegratorConfig) -> Trajectory:
    """Integrate i dPsi/dt = H(t) Psi over an increasing grid starting at 0.

    Steps land exactly on every grid point (the step is clipped, never
    interpolated).  With ``adaptive`` set, each step is checked by step
    doubling and halved until the local error estimate meets ``tol``.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 2:
        raise ConfigError("t_grid must hold at least two times")
    if t_grid[0] != 0.0 or np.any(np.diff(t_grid) <= 0):
        raise ConfigError("t_grid must increase from 0")

    psi = np.array(psi0.amp, dtype=complex)
    states = [psi.copy()]
    steps_used = 0
    t = 0.0
    for target in t_grid[1:]:
        while t < target:
            rem = target - t
            h = rem if rem <= cfg.step * (1.0 + 1e-12) else cfg.step
            exact_hit = h == rem
            if cfg.adaptive:
                psi_new, h, used = _adaptive_step(h_fn, t, psi, h, cfg.tol)
                exact_hit = h == rem
            else:
                psi_new, used = _rk4_step(h_fn, t, psi, h), 1
            steps_used += used
            if steps_used > cfg.max_steps:
                raise StepBudgetExceeded(Trajectory(t_grid[: len(states)], np.array(states)))
            if not np.all(np.isfinite(psi_new)):
                raise NumericFailure(f"non-finite state at t = {t:.6g}")
            psi = psi_new
            t = target if exact_hit else t + h
        states.append(psi.copy())
    return Trajectory(t_grid, np.array(states))


def _adaptive_step(h_fn, t, psi, h, tol):
    used = 0
    while True:
        full = _rk4_step(h_fn, t, psi, h)
        half = _rk4_step(h_fn, t, psi, 0.5 * h)
        half = _rk4_step(h_fn, t + 0.5 * h, half, 0.5 * h)
        used += 3
        err = float(np.max(np.abs(half - full)))
        if err <= tol or h <= 1e-14 * max(1.0, abs(t)):
            return half, h, used  # h is the step actually taken
        h *= 0.5


def expm_generic(m: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring of the Taylor series.

    Rated for ||M||_1 <= 50 at ~1e-12 relative accuracy; larger norms raise
    NormRangeError.  Deliberately independent of the closed-form propagators
    it is used to check.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expm_generic needs a square matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    norm = float(np.linalg.norm(m, 1))
    if norm > 50.0:
        raise NormRangeError(f"matrix 1-norm {norm:.3g} exceeds the rated range 50")
    squarings = 0
    if norm > 0.5:
        squarings = int(np.ceil(np.log2(norm / 0.5)))
    a = m / (2.0 ** squarings)
    n = m.shape[0]
    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, 40):
        term = term @ a / k
        result = result + term
        if float(np.max(np.abs(term))) < 1e-18:
            break
    for _ in range(squarings):
        result = result @ result
    return result


@dataclass(frozen=True)
class DeviationReport:
    """Per-time and global deviations between two trajectories.

    ``table`` columns: t, raw amplitude deviation, phase-aligned amplitude
    deviation, population deviation.  The aligned column removes the global
    phase that best matches the states at each time.
    """

    max_amplitude_dev: float
    max_aligned_amplitude_dev: float
    max_population_dev: float
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        table = np.array(self.table, dtype=float)
        table.flags.writeable = False
        object.__setattr__(self, "table", table)

    def to_dict(self) -> dict:
        return {
            "max_amplitude_dev": self.max_amplitude_dev,
            "max_aligned_amplitude_dev": self.max_aligned_amplitude_dev,
            "max_population_dev": self.max_population_dev,
            "columns": ["t", "amp_dev", "aligned_amp_dev", "pop_dev"],
            "table": self.table.tolist(),
        }


def compare(traj_a: Trajectory, traj_b: Trajectory) -> DeviationReport:
    """Deviation report for two trajectories on the same time grid."""
    if traj_a.times.shape != traj_b.times.shape or not np.array_equal(
        traj_a.times, traj_b.times
    ):
        raise ConfigError("trajectories must share an identical time grid")
    rows = []
    for t, a, b in zip(traj_a.times, traj_a.states, traj_b.states):
        raw = float(np.max(np.abs(a - b)))
        overlap = np.vdot(b, a)
        phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
        aligned = float(np.max(np.abs(a - phase * b)))
        pop = float(np.max(np.abs(np.abs(a) ** 2 - np.abs(b) ** 2)))
        rows.append((float(t), raw, aligned, pop))
    table = np.array(rows)
    return DeviationReport(
        max_amplitude_dev=float(np.max(table[:, 1])),
        max_aligned_amplitude_dev=float(np.max(table[:, 2])),
        max_population_dev=float(np.max(table[:, 3])),
        table=table,
    )
