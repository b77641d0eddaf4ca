"""Command-line front end: spectrum, evolve, exact-check, compare, sweep.

Configuration lives in an INI-style file with three sections::

    [levels]
    energies = 0.0, 1.0, 2.0      ; strictly increasing, any units (hbar = 1)

    [drive]
    g = 0.1                       ; coupling constant (> 0)
    frequencies = resonant        ; 'resonant' or 'explicit'
    omega_0_2 = 2.1               ; per-pair keys; overrides under 'resonant',
                                  ; all pairs required under 'explicit'

    [run]
    solver = exact                ; exact | dyson1 | dyson2 | numeric-rwa | numeric-full
    t_max = 10.0
    samples = 201
    initial = 0                   ; level index, or amplitude list '1, 0, 1j'
    output = trajectory.csv       ; omit to write to stdout
    format = csv                  ; csv | json

Command-line flags override file keys.  Exit codes: 0 success, 2 config
error, 3 precondition failure (e.g. consistency violation), 4 numeric
failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .dyson import DysonConfig, approximate_solution_3, dyson_state, max_quadrature_step
from .exact import ConsistencyError, check_consistency, default_consistency_tol, exact_evolution
from .model import (
    ConfigError,
    DriveSpec,
    LevelSpec,
    StateVector,
    apply_resonance,
    detunings,
    full_hamiltonian,
    full_hamiltonian_nonrwa,
    rotating_frame_phases,
)
from .propagate import (
    IntegratorConfig,
    NumericFailure,
    StepBudgetExceeded,
    Trajectory,
    compare,
    integrate,
)
from .spectral import coupling_matrix, decompose

SOLVERS = ("exact", "dyson1", "dyson2", "numeric-rwa", "numeric-full")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_NUMERIC = 4


@dataclass(frozen=True)
class RunConfig:
    """One fully resolved simulation run."""

    energies: tuple
    g: float
    omega: dict
    solver: str
    t_max: float
    samples: int
    initial: tuple
    output: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise ConfigError(f"unknown solver {self.solver!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.samples < 2:
            raise ConfigError("samples must be >= 2")
        if not self.t_max > 0:
            raise ConfigError("t_max must be positive")
        object.__setattr__(self, "energies", tuple(float(e) for e in self.energies))
        object.__setattr__(
            self, "omega", {(int(i), int(j)): float(w) for (i, j), w in self.omega.items()}
        )
        amp = np.asarray(self.initial, dtype=complex)
        norm = np.linalg.norm(amp)
        if norm == 0:
            raise ConfigError("initial state must be nonzero")
        object.__setattr__(self, "initial", tuple(complex(z) for z in amp / norm))

    # eq on frozen dataclass works because all fields are hashable scalars/tuples
    def __eq__(self, other):
        if not isinstance(other, RunConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    @property
    def levels(self) -> LevelSpec:
        return LevelSpec(self.energies)

    @property
    def rwa(self) -> bool:
        return self.solver != "numeric-full"

    @property
    def drive(self) -> DriveSpec:
        return DriveSpec(n=len(self.energies), omega=self.omega, g=self.g, rwa=self.rwa)

    @property
    def psi0(self) -> StateVector:
        return StateVector(np.asarray(self.initial))

    def to_dict(self) -> dict:
        return {
            "energies": list(self.energies),
            "g": self.g,
            "omega": {f"{i},{j}": w for (i, j), w in sorted(self.omega.items())},
            "solver": self.solver,
            "t_max": self.t_max,
            "samples": self.samples,
            "initial": [[z.real, z.imag] for z in self.initial],
            "output": self.output,
            "format": self.format,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        omega = {tuple(int(x) for x in k.split(",")): float(v) for k, v in d["omega"].items()}
        initial = tuple(complex(re, im) for re, im in d["initial"])
        return cls(
            energies=tuple(d["energies"]),
            g=float(d["g"]),
            omega=omega,
            solver=d["solver"],
            t_max=float(d["t_max"]),
            samples=int(d["samples"]),
            initial=initial,
            output=d.get("output"),
            format=d.get("format", "csv"),
        )


def _parse_float_list(text: str):
    return [float(x) for x in text.replace(",", " ").split()]


def _parse_initial(text: str, n: int):
    text = text.strip()
    parts = [p.strip() for p in text.split(",")] if "," in text else [text]
    if len(parts) == 1 and "." not in text and "j" not in text:
        k = int(text)
        if not 0 <= k < n:
            raise ConfigError(f"initial level index {k} out of range for n={n}")
        amp = [0.0] * n
        amp[k] = 1.0
        return tuple(amp)
    amps = tuple(complex(p.replace(" ", "")) for p in parts)
    if len(amps) != n:
        raise ConfigError(f"initial amplitude list must have {n} entries")
    return amps


def load_config(path, overrides: dict | None = None) -> RunConfig:
    """Parse the INI config, apply flag overrides, resolve frequencies."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    ov = overrides or {}
    try:
        energies = tuple(_parse_float_list(parser.get("levels", "energies")))
        g = float(ov.get("g", parser.get("drive", "g")))
        mode = parser.get("drive", "frequencies", fallback="resonant").strip().lower()
        solver = str(ov.get("solver", parser.get("run", "solver", fallback="numeric-rwa")))
        t_max = float(ov.get("t_max", parser.get("run", "t_max")))
        samples = int(ov.get("samples", parser.get("run", "samples", fallback="101")))
        initial_text = str(ov.get("initial", parser.get("run", "initial", fallback="0")))
        output = ov.get("output", parser.get("run", "output", fallback=None))
        fmt = str(ov.get("format", parser.get("run", "format", fallback="csv")))
    except (configparser.Error, ValueError) as exc:
        raise ConfigError(str(exc)) from exc

    levels = LevelSpec(energies)
    n = levels.n
    pair_keys = {}
    for key, value in parser.items("drive"):
        if key.startswith("omega_"):
            try:
                _, i, j = key.split("_")
                pair_keys[(int(i), int(j))] = float(value)
            except ValueError as exc:
                raise ConfigError(f"bad frequency key {key!r}") from exc

    if ov.get("resonant"):
        mode = "resonant"
        pair_keys = {ij: w for ij, w in pair_keys.items() if ij[1] - ij[0] >= 2}
    if "epsilon" in ov:
        if n != 3:
            raise ConfigError("--epsilon is the n=3 detuning knob")
        mode = "resonant"
        e = levels.deltas
        pair_keys[(0, 2)] = float(e[2]) + float(ov["epsilon"])

    if mode == "resonant":
        nonadj = {ij: w for ij, w in pair_keys.items() if ij[1] - ij[0] >= 2}
        drive = apply_resonance(levels, g, nonadjacent=nonadj)
        omega = dict(drive.omega)
    elif mode == "explicit":
        omega = pair_keys
    else:
        raise ConfigError("frequencies must be 'resonant' or 'explicit'")

    return RunConfig(
        energies=energies,
        g=g,
        omega=omega,
        solver=solver,
        t_max=t_max,
        samples=samples,
        initial=_parse_initial(initial_text, n),
        output=output,
        format=fmt,
    )


def _integrator_for(cfg: RunConfig, step_override=None, max_steps=None) -> IntegratorConfig:
    scale = max(
        max(cfg.omega.values()),
        float(np.max(np.abs(cfg.levels.deltas))),
        cfg.g,
        1.0,
    )
    step = step_override if step_override else min(1e-3, 0.1 / scale)
    kwargs = {"step": step}
    if max_steps is not None:
        kwargs["max_steps"] = max_steps
    return IntegratorConfig(**kwargs)


def run_solver(cfg: RunConfig, step_override=None, max_steps=None) -> Trajectory:
    """Dispatch a RunConfig to its solver and return the trajectory."""
    levels, drive, psi0 = cfg.levels, cfg.drive, cfg.psi0
    grid = np.linspace(0.0, cfg.t_max, cfg.samples)
    if cfg.solver == "exact":
        states = np.stack([exact_evolution(levels, drive, psi0, t).amp for t in grid])
        return Trajectory(grid, states)
    if cfg.solver == "dyson1":
        if levels.n != 3:
            raise ConfigError("dyson1 uses the closed-form path and requires n = 3")
        if not np.array_equal(psi0.amp, [1.0, 0.0, 0.0]):
            raise ConfigError("dyson1 closed form starts from the ground state")
        states = np.stack([approximate_solution_3(levels, drive, t) for t in grid])
        return Trajectory(grid, states)
    if cfg.solver == "dyson2":
        det = detunings(drive)
        dyson_cfg = DysonConfig(order=2, quadrature_step=0.5 * max_quadrature_step(drive.g, det))
        phases = rotating_frame_phases(drive)
        states = []
        for t in grid:
            rot = dyson_state(levels.n, drive.g, det, psi0, t, dyson_cfg)
            states.append(np.exp(-1j * phases * t) * rot)
        return Trajectory(grid, np.stack(states))
    if cfg.solver == "numeric-rwa":
        return integrate(full_hamiltonian(levels, drive), psi0, grid,
                         _integrator_for(cfg, step_override, max_steps))
    if cfg.solver == "numeric-full":
        return integrate(
            full_hamiltonian_nonrwa(levels, drive), psi0, grid,
            _integrator_for(cfg, step_override, max_steps),
        )
    raise ConfigError(f"unknown solver {cfg.solver!r}")


def _write_trajectory(traj: Trajectory, cfg: RunConfig):
    target = cfg.output if cfg.output is not None else sys.stdout
    if cfg.format == "csv":
        traj.to_csv(target)
    else:
        traj.to_json(target, config=cfg.to_dict())


def cmd_spectrum(args) -> int:
    n = args.n
    dec = decompose(n)
    c = coupling_matrix(n)
    print("# closed-form eigenvalues lambda_j = 2*cos(pi*j/(n+1))")
    for j, lam in enumerate(dec.eigenvalues, start=1):
        print(f"{j} {lam:.17g}")
    print("# orthogonal basis O")
    for row in dec.basis:
        print(" ".join(f"{x:.17g}" for x in row))
    residual = float(np.max(np.abs(c @ dec.basis - dec.basis * dec.eigenvalues)))
    print(f"# max eigen residual: {residual:.3g}")
    return EXIT_OK


def cmd_evolve(args) -> int:
    cfg = load_config(args.config, _flag_overrides(args))
    traj = run_solver(cfg, step_override=args.step, max_steps=args.max_steps)
    _write_trajectory(traj, cfg)
    print(f"# solver={cfg.solver} samples={cfg.samples} norm_drift={traj.norm_drift():.3g}",
          file=sys.stderr)
    return EXIT_OK


def cmd_exact_check(args) -> int:
    cfg = load_config(args.config, _flag_overrides(args))
    drive = DriveSpec(n=len(cfg.energies), omega=cfg.omega, g=cfg.g, rwa=True)
    report = check_consistency(detunings(drive), default_consistency_tol(drive))
    doc = {
        "satisfied": report.satisfied,
        "violations": [{"pair": list(ij), "epsilon": v} for ij, v in report.violations],
    }
    print(json.dumps(doc, indent=2))
    return EXIT_OK if report.satisfied else EXIT_PRECONDITION


def cmd_compare(args) -> int:
    solver_a, solver_b = args.solvers.split(",")
    base = load_config(args.config, _flag_overrides(args))
    traj_a = run_solver(replace(base, solver=solver_a.strip()), step_override=args.step)
    traj_b = run_solver(replace(base, solver=solver_b.strip()), step_override=args.step)
    report = compare(traj_a, traj_b)
    doc = {
        "solvers": [solver_a.strip(), solver_b.strip()],
        "config": base.to_dict(),
        "report": report.to_dict(),
    }
    text = json.dumps(doc, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = load_config(args.config, _flag_overrides(args))
    values = _parse_float_list(args.values)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    section, _, key = args.param.partition(".")
    if not key:
        raise ConfigError("sweep parameter must look like 'drive.g' or 'run.t_max'")

    def one(idx_value):
        idx, value = idx_value
        overrides = dict(_flag_overrides(args))
        overrides[key] = value
        cfg = load_config(args.config, overrides)
        suffix = "json" if cfg.format == "json" else "csv"
        path = outdir / f"run_{idx:03d}.{suffix}"
        cfg = replace(cfg, output=str(path))
        traj = run_solver(cfg, step_override=args.step)
        _write_trajectory(traj, cfg)
        return {"index": idx, "param": args.param, "value": value, "file": path.name,
                "norm_drift": traj.norm_drift()}

    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        entries = list(pool.map(one, enumerate(values)))
    manifest = {"config": base.to_dict(), "param": args.param, "runs": entries}
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"# wrote {len(entries)} runs to {outdir}", file=sys.stderr)
    return EXIT_OK


def _flag_overrides(args) -> dict:
    ov = {}
    for name in ("solver", "g", "t_max", "samples", "initial", "output", "format"):
        value = getattr(args, name, None)
        if value is not None:
            ov[name] = value
    if getattr(args, "resonant", False):
        ov["resonant"] = True
    if getattr(args, "epsilon", None) is not None:
        ov["epsilon"] = args.epsilon
    return ov


def _add_run_flags(p):
    p.add_argument("config", help="INI configuration file")
    p.add_argument("--solver", choices=SOLVERS)
    p.add_argument("--g", type=float, help="coupling constant override")
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--initial", help="level index or amplitude list")
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--step", type=float, help="integrator step override")
    p.add_argument("--max-steps", dest="max_steps", type=int,
                   help="integrator step budget override")
    p.add_argument("--resonant", action="store_true",
                   help="force resonant adjacent frequencies")
    p.add_argument("--epsilon", type=float,
                   help="n=3 convenience: detune omega_02 by this amount")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlevel-rabi",
        description="Multilevel Rabi oscillation simulator (RWA).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="closed-form eigenvalues and basis of C")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("evolve", help="run one solver, write a trajectory")
    _add_run_flags(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("exact-check", help="report the consistency condition")
    _add_run_flags(p)
    p.set_defaults(func=cmd_exact_check)

    p = sub.add_parser("compare", help="run two solvers, emit a deviation report")
    _add_run_flags(p)
    p.add_argument("--solvers", required=True, help="pair like 'exact,numeric-rwa'")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="fan a parameter over values, one file per run")
    _add_run_flags(p)
    p.add_argument("--param", required=True, help="key to sweep, e.g. drive.g")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--outdir", required=True)
    p.add_argument("--jobs", type=int, default=4)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConsistencyError as exc:
        record = {
            "error": "consistency",
            "message": str(exc),
            "violations": [{"pair": list(ij), "epsilon": v} for ij, v in exc.report.violations],
        }
        print(json.dumps(record), file=sys.stderr)
        return EXIT_PRECONDITION
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    except (NumericFailure, StepBudgetExceeded) as exc:
        print(json.dumps({"error": "numeric", "message": str(exc)}), file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
