"""Command-line harness: configuration, experiment drivers, persistence.

Subcommands: simulate, verify-lemma, rei-check, uniqueness-study,
convergence-study.  Exit codes: 0 success, 1 verification failure,
2 usage/configuration error.

Configs are flat ``section.key = value`` text (JSON with the same nesting
is accepted as an alternative).  Artifacts are written with 17 significant
digits so reruns with identical config and seed reproduce them verbatim;
the manifest's wall-clock field is the one intentionally varying item.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .fields import ConservedState, Grid2D, dump_state_csv, integrate_array, load_state_csv
from .kernels import backend_name
from .measures import dirac_from_state
from .relenergy import (
    check_coercivity_bound,
    energy_inequality_residual,
    rei_breakdown,
    uniqueness_experiment,
    verify_coercivity,
)
from .solver import SolverConfig, Trajectory, run
from .strong import constant_strong_solution, manufactured_strong_solution
from .thermo import FluidParams, entropy

__all__ = ["RunConfig", "parse_config", "make_initial_state", "random_smooth_state", "main"]

USAGE_ERROR = 2
VERIFY_ERROR = 1


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    """Resolved harness configuration (defaults follow the desk-scale runs)."""

    nx: int = 64
    ny: int = 64
    lx: float = 1.0
    ly: float = 1.0
    gamma: float = 1.4
    a: float = 1.0
    mu: float = 1e-2
    lam: float = 0.0
    c_star: float = 0.5
    t_end: float = 0.1
    cfl: float = 0.45
    output_every: int = 8
    ic_kind: str = "perturbed"
    ic_rho0: float = 1.0
    ic_theta0: float = 1.0
    ic_amplitude: float = 1e-2
    ic_modes: int = 2
    ic_path: str = ""
    forcing: str = "none"
    seed: int = 0
    snapshots: bool = True

    def grid(self) -> Grid2D:
        return Grid2D(self.nx, self.ny, self.lx, self.ly)

    def params(self) -> FluidParams:
        return FluidParams(
            gamma=self.gamma, a=self.a, mu=self.mu, lam=self.lam, c_star=self.c_star
        )

    def to_dict(self) -> dict:
        return {
            "grid": {"nx": self.nx, "ny": self.ny, "lx": self.lx, "ly": self.ly},
            "fluid": {
                "gamma": self.gamma,
                "a": self.a,
                "mu": self.mu,
                "lambda": self.lam,
                "c_star": self.c_star,
            },
            "run": {"t_end": self.t_end, "cfl": self.cfl, "output_every": self.output_every},
            "ic": {
                "kind": self.ic_kind,
                "rho0": self.ic_rho0,
                "theta0": self.ic_theta0,
                "amplitude": self.ic_amplitude,
                "modes": self.ic_modes,
                "path": self.ic_path,
            },
            "forcing": self.forcing,
            "seed": self.seed,
            "snapshots": self.snapshots,
        }


_KEYS = {
    "grid.nx": ("nx", int, True),
    "grid.ny": ("ny", int, True),
    "grid.lx": ("lx", float, False),
    "grid.ly": ("ly", float, False),
    "fluid.gamma": ("gamma", float, False),
    "fluid.a": ("a", float, False),
    "fluid.mu": ("mu", float, False),
    "fluid.lambda": ("lam", float, False),
    "fluid.c_star": ("c_star", float, False),
    "run.t_end": ("t_end", float, True),
    "run.cfl": ("cfl", float, False),
    "run.output_every": ("output_every", int, False),
    "ic.kind": ("ic_kind", str, False),
    "ic.rho0": ("ic_rho0", float, False),
    "ic.theta0": ("ic_theta0", float, False),
    "ic.amplitude": ("ic_amplitude", float, False),
    "ic.modes": ("ic_modes", int, False),
    "ic.path": ("ic_path", str, False),
    "forcing": ("forcing", str, False),
    "seed": ("seed", int, False),
    "snapshots": ("snapshots", bool, False),
}


def _parse_value(text: str, typ, where: str):
    text = text.strip()
    if typ is bool:
        if text.lower() in ("true", "1", "yes", "on"):
            return True
        if text.lower() in ("false", "0", "no", "off"):
            return False
        raise ConfigError(f"{where}: cannot parse boolean from {text!r}")
    try:
        return typ(text)
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {typ.__name__} from {text!r}") from None


def _flatten(prefix: str, obj, out: dict):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    else:
        out[prefix] = obj


def parse_config(path: str) -> RunConfig:
    """Parse a flat key = value (or JSON) config file into a RunConfig."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from None

    raw: dict = {}
    if text.lstrip().startswith("{"):
        try:
            nested = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
        _flatten("", nested, raw)
        for key in raw:
            if key not in _KEYS:
                raise ConfigError(f"{path}: unknown config key {key!r}")
    else:
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected `key = value`, got {stripped!r}")
            key, _, value = stripped.partition("=")
            key = key.strip()
            if key not in _KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            raw[key] = (value, f"{path}:{lineno}")

    cfg = RunConfig()
    seen = set()
    for key, (attr, typ, _required) in _KEYS.items():
        if key in raw:
            val = raw[key]
            if isinstance(val, tuple):
                val = _parse_value(val[0], typ, val[1])
            elif typ in (int, float) and isinstance(val, (int, float)):
                val = typ(val)
            elif not isinstance(val, typ):
                raise ConfigError(f"{path}: key {key!r} needs a {typ.__name__}")
            setattr(cfg, attr, val)
            seen.add(key)
    for key, (_attr, _typ, required) in _KEYS.items():
        if required and key not in seen:
            raise ConfigError(f"{path}: missing required key {key!r}")

    if cfg.ic_kind not in ("constant", "perturbed", "file"):
        raise ConfigError(f"{path}: ic.kind must be constant, perturbed, or file")
    if cfg.forcing not in ("none", "manufactured"):
        raise ConfigError(f"{path}: forcing must be none or manufactured")
    if cfg.ic_kind == "file" and not cfg.ic_path:
        raise ConfigError(f"{path}: ic.kind = file needs ic.path")
    return cfg


def random_smooth_state(
    grid: Grid2D,
    params: FluidParams,
    rng: np.random.Generator,
    rho0: float = 1.0,
    theta0: float = 1.0,
    amplitude: float = 1e-2,
    modes: int = 2,
) -> ConservedState:
    """Constant state plus a random low-mode smooth perturbation.

    rho/theta get cosine modes, the velocity gets wall-vanishing sine
    modes; coefficients are normalized so the largest relative deviation
    equals ``amplitude``.
    """
    X, Y = grid.centers()
    xh, yh = X / grid.lx, Y / grid.ly

    # normalize by the coefficient l1 norm (grid independent) so the same
    # seed gives the same continuum field on every refinement level
    def cos_noise():
        out = np.zeros(grid.shape)
        total = 0.0
        for kx in range(modes + 1):
            for ky in range(modes + 1):
                if kx == 0 and ky == 0:
                    continue
                c = rng.uniform(-1, 1)
                total += abs(c)
                out += c * np.cos(np.pi * kx * xh) * np.cos(np.pi * ky * yh)
        return out / max(1e-30, total)

    def sin_noise():
        out = np.zeros(grid.shape)
        total = 0.0
        for kx in range(1, modes + 1):
            for ky in range(1, modes + 1):
                c = rng.uniform(-1, 1)
                total += abs(c)
                out += c * np.sin(np.pi * kx * xh) * np.sin(np.pi * ky * yh)
        return out / max(1e-30, total)

    rho = rho0 * (1.0 + amplitude * cos_noise())
    theta = theta0 * (1.0 + amplitude * cos_noise())
    u = amplitude * np.stack([sin_noise(), sin_noise()])
    if np.any(theta < params.c_star):
        raise ValueError("amplitude drives theta below c_star")
    return ConservedState(grid, rho, np.stack([rho * u[0], rho * u[1]]), rho * theta)


def make_initial_state(cfg: RunConfig):
    """Initial state plus the forcing implied by the config."""
    grid = cfg.grid()
    params = cfg.params()
    forcing = None
    if cfg.forcing == "manufactured":
        strong = manufactured_strong_solution(
            grid.lx, grid.ly, rho0=cfg.ic_rho0, theta0=cfg.ic_theta0
        )
        # the forced run starts from the manufactured fields so the
        # reference stays an exact solution of what is integrated
        X, Y = grid.centers()
        rho = strong.rho(0.0, X, Y)
        theta = strong.theta(0.0, X, Y)
        u = strong.u(0.0, X, Y)
        state = ConservedState(grid, rho, np.stack([rho * u[0], rho * u[1]]), rho * theta)
        return state, strong.forcing_for(params)

    if cfg.ic_kind == "constant":
        rho = np.full(grid.shape, cfg.ic_rho0)
        theta = np.full(grid.shape, cfg.ic_theta0)
        state = ConservedState(grid, rho, np.zeros((2,) + grid.shape), rho * theta)
    elif cfg.ic_kind == "perturbed":
        state = random_smooth_state(
            grid,
            params,
            np.random.default_rng(cfg.seed),
            rho0=cfg.ic_rho0,
            theta0=cfg.ic_theta0,
            amplitude=cfg.ic_amplitude,
            modes=cfg.ic_modes,
        )
    else:
        state = load_state_csv(grid, cfg.ic_path)
    return state, forcing


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def write_timeseries(path, trajectory: Trajectory, params: FluidParams, rel_energy=None):
    """Time-series CSV; ``rel_energy`` (aligned values) appends a column."""
    header = "t,total_mass,total_rhotheta,total_energy,entropy_integral,dissipation_accum,min_theta,max_rho"
    if rel_energy is not None:
        header += ",rel_energy"
    grid = trajectory.config.grid
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for k, (t, s) in enumerate(zip(trajectory.times, trajectory.states)):
            theta = s.z / s.rho
            kinetic = 0.5 * (s.mom[0] ** 2 + s.mom[1] ** 2) / s.rho
            internal = params.a / (params.gamma - 1.0) * s.z**params.gamma
            row = [
                t,
                integrate_array(grid, s.rho),
                integrate_array(grid, s.z),
                integrate_array(grid, kinetic + internal),
                integrate_array(grid, entropy(s.rho, theta, params)),
                trajectory.dissipation_accum[k],
                float(np.min(theta)),
                float(np.max(s.rho)),
            ]
            if rel_energy is not None:
                row.append(rel_energy[k])
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_manifest(out_dir, cfg: RunConfig, wall_clock: float, extra: dict):
    manifest = {
        "version": __version__,
        "kernel_backend": backend_name,
        "dmv_threads": os.environ.get("DMV_THREADS"),
        "config": cfg.to_dict(),
        "wall_clock_s": wall_clock,
    }
    manifest.update(extra)
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _run_from_config(cfg: RunConfig) -> Trajectory:
    state, forcing = make_initial_state(cfg)
    solver_cfg = SolverConfig(
        grid=cfg.grid(),
        params=cfg.params(),
        cfl=cfg.cfl,
        t_end=cfg.t_end,
        output_every=cfg.output_every,
        forcing=forcing,
    )
    return run(solver_cfg, state)


def cmd_simulate(args) -> int:
    cfg = parse_config(args.config)
    os.makedirs(args.out, exist_ok=True)
    t0 = time.perf_counter()
    trajectory = _run_from_config(cfg)
    wall = time.perf_counter() - t0
    grid = cfg.grid()

    write_timeseries(os.path.join(args.out, "timeseries.csv"), trajectory, cfg.params())
    if cfg.snapshots:
        for k, s in enumerate(trajectory.states):
            dump_state_csv(s, os.path.join(args.out, f"snap_{k:06d}.csv"))

    mass0 = integrate_array(grid, trajectory.states[0].rho)
    mass1 = integrate_array(grid, trajectory.states[-1].rho)
    z0 = integrate_array(grid, trajectory.states[0].z)
    z1 = integrate_array(grid, trajectory.states[-1].z)
    min_theta = min(float(np.min(s.z / s.rho)) for s in trajectory.states)
    _write_manifest(
        args.out,
        cfg,
        wall,
        {
            "invariants": {
                "mass_drift_rel": abs(mass1 - mass0) / abs(mass0),
                "rhotheta_drift_rel": abs(z1 - z0) / abs(z0),
                "min_theta": min_theta,
                "dissipation_total": trajectory.dissipation_accum[-1],
                "n_steps": trajectory.n_steps,
            }
        },
    )
    print(f"simulate: {trajectory.n_steps} steps to t = {trajectory.times[-1]:g}, "
          f"{len(trajectory.times)} snapshots -> {args.out}")
    return 0


def cmd_verify_lemma(args) -> int:
    try:
        params = FluidParams(gamma=args.gamma, a=args.a, c_star=args.c_star)
        cert = verify_coercivity(params, tuple(args.rho_bounds), tuple(args.theta_bounds))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except RuntimeError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return VERIFY_ERROR
    check = check_coercivity_bound(cert, params, args.samples, seed=args.seed)
    report = {"certificate": cert.as_dict(), "fresh_samples": check}
    os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    ok = cert.passed and check["ok"]
    print(
        f"verify-lemma: c1={cert.c1:g} c2={cert.c2:g} c3={cert.c3:g} "
        f"c4={cert.c4:.6g} fresh_ok={check['ok']} -> {args.out}"
    )
    if not ok:
        print(f"bound violated at margin {check['worst_margin']:.3e}", file=sys.stderr)
    return 0 if ok else VERIFY_ERROR


def cmd_rei_check(args) -> int:
    cfg = parse_config(args.config)
    os.makedirs(args.out, exist_ok=True)
    t0 = time.perf_counter()
    trajectory = _run_from_config(cfg)
    params = cfg.params()
    strong = constant_strong_solution(cfg.ic_rho0, cfg.ic_theta0)
    measures = [dirac_from_state(s, params) for s in trajectory.states]
    grid = cfg.grid()
    dt_max = float(np.max(np.diff(trajectory.times))) if len(trajectory.times) > 1 else 0.0
    # pinned slack: tolerance + (dx + dt) * initial total-energy scale
    e_scale = integrate_array(
        grid,
        0.5 * (trajectory.states[0].mom[0] ** 2 + trajectory.states[0].mom[1] ** 2)
        / trajectory.states[0].rho
        + params.a / (params.gamma - 1.0) * trajectory.states[0].z ** params.gamma,
    )
    slack = 1e-8 + (grid.dx + dt_max) * e_scale
    checkpoints = []
    worst = -np.inf
    for tau in trajectory.times[1:]:
        bd = rei_breakdown(trajectory, measures, None, strong, params, tau)
        gap = bd.lhs_total - sum(bd.terms)  # <= slack required
        worst = max(worst, gap)
        checkpoints.append(
            {"tau": bd.tau, "lhs": bd.lhs_total, "terms": list(bd.terms), "gap": gap}
        )
    report = {
        "slack": slack,
        "worst_gap": worst,
        "passed": bool(worst <= slack),
        "checkpoints": checkpoints,
    }
    with open(os.path.join(args.out, "rei_report.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(args.out, cfg, time.perf_counter() - t0, {"passed": report["passed"]})
    print(f"rei-check: worst gap {worst:.3e} vs slack {slack:.3e} -> {args.out}")
    return 0 if report["passed"] else VERIFY_ERROR


def cmd_uniqueness_study(args) -> int:
    cfg = parse_config(args.config)
    try:
        epsilons = [float(e) for e in args.eps.split(",") if e.strip() != ""]
    except ValueError:
        print(f"error: cannot parse --eps {args.eps!r}", file=sys.stderr)
        return USAGE_ERROR
    if not epsilons:
        print("error: --eps needs at least one value", file=sys.stderr)
        return USAGE_ERROR
    os.makedirs(args.out, exist_ok=True)
    params = cfg.params()
    strong = constant_strong_solution(cfg.ic_rho0, cfg.ic_theta0)
    solver_cfg = SolverConfig(
        grid=cfg.grid(), params=params, cfl=cfg.cfl, t_end=cfg.t_end, output_every=cfg.output_every
    )
    t0 = time.perf_counter()
    report, runs = uniqueness_experiment(solver_cfg, epsilons, strong, return_runs=True)
    wall = time.perf_counter() - t0
    out = report.as_dict()
    out["notes"] = []
    if len([e for e in epsilons if e > 0]) < 2:
        out["notes"].append("single epsilon: C-stability check is vacuous")
    with open(os.path.join(args.out, "uniqueness_report.json"), "w") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")

    # per-epsilon relative-energy time series beside the run quantities
    for eps, traj in runs.items():
        if eps <= 0:
            continue
        write_timeseries(
            os.path.join(args.out, f"timeseries_eps_{eps:g}.csv"),
            traj,
            params,
            rel_energy=report.energies[eps],
        )
    _write_manifest(args.out, cfg, wall, {"epsilons": epsilons, "passed": report.passed})
    print(
        f"uniqueness-study: scaling_ok={report.scaling_ok} "
        f"c_spread={report.c_spread:.3f} envelope_ok={report.envelope_ok} "
        f"passed={report.passed} -> {args.out}"
    )
    return 0 if report.passed else VERIFY_ERROR


def _restrict(fine: np.ndarray, factor: int) -> np.ndarray:
    ny, nx = fine.shape
    return fine.reshape(ny // factor, factor, nx // factor, factor).mean(axis=(1, 3))


def cmd_convergence_study(args) -> int:
    cfg = parse_config(args.config)
    try:
        levels = sorted(int(x) for x in args.levels.split(","))
    except ValueError:
        print(f"error: cannot parse --levels {args.levels!r}", file=sys.stderr)
        return USAGE_ERROR
    if len(levels) < 3:
        print("error: need at least 3 levels", file=sys.stderr)
        return USAGE_ERROR
    for fine, coarse in zip(levels[1:], levels):
        if fine % coarse:
            print("error: levels must be nested (each a multiple of the previous)", file=sys.stderr)
            return USAGE_ERROR
    os.makedirs(args.out, exist_ok=True)
    params = cfg.params()
    strong = constant_strong_solution(cfg.ic_rho0, cfg.ic_theta0)
    n_ref = 2 * levels[-1]

    def run_level(n: int, final_only: bool = False):
        level_cfg = RunConfig(**{**cfg.__dict__, "nx": n, "ny": n})
        if final_only:
            level_cfg.output_every = 10**9  # initial and final snapshots only
        return level_cfg, _run_from_config(level_cfg)

    t0 = time.perf_counter()
    results = {}
    for n in levels:
        _, traj = run_level(n)
        measures = [dirac_from_state(s, params) for s in traj.states]
        tau = traj.times[-1]
        res = {
            "trajectory": traj,
            "energy_residual": energy_inequality_residual(traj, measures, None, params, tau),
        }
        bd = rei_breakdown(traj, measures, None, strong, params, tau)
        res["rei_gap"] = bd.lhs_total - sum(bd.terms)
        results[n] = res
    results[n_ref] = {"trajectory": run_level(n_ref, final_only=True)[1]}
    wall = time.perf_counter() - t0

    ref_rho = results[n_ref]["trajectory"].states[-1].rho
    rows = []
    for n in levels:
        rho_n = results[n]["trajectory"].states[-1].rho
        err = integrate_array(
            Grid2D(n, n, cfg.lx, cfg.ly), np.abs(rho_n - _restrict(ref_rho, n_ref // n))
        )
        rows.append(
            {
                "n": n,
                "state_l1_error": err,
                "energy_residual": results[n]["energy_residual"],
                "rei_gap": results[n]["rei_gap"],
            }
        )

    def orders(key):
        out = []
        for a, b in zip(rows, rows[1:]):
            ea, eb = abs(a[key]), abs(b[key])
            out.append(float(np.log2(ea / eb) / np.log2(b["n"] / a["n"])) if ea > 0 and eb > 0 else None)
        return out

    report = {
        "levels": levels,
        "reference": n_ref,
        "rows": rows,
        "orders": {
            "state": orders("state_l1_error"),
            "energy_residual": orders("energy_residual"),
            "rei_gap": orders("rei_gap"),
        },
    }
    with open(os.path.join(args.out, "convergence_report.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(args.out, cfg, wall, {"levels": levels})
    print("convergence-study:")
    print(f"  {'n':>6} {'state L1':>12} {'energy res':>12} {'REI gap':>12}")
    for r in rows:
        print(
            f"  {r['n']:>6} {r['state_l1_error']:>12.4e} "
            f"{r['energy_residual']:>12.4e} {r['rei_gap']:>12.4e}"
        )
    print(f"  orders: {report['orders']}")
    return 0


def _cap_threads():
    cap = os.environ.get("DMV_THREADS")
    if cap:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, cap)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dmvflow",
        description="finite-volume flow runs and measure-valued relative-energy diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the solver and dump artifacts")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-lemma", help="certify the coercivity constants")
    p.add_argument("--gamma", type=float, default=1.4)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--c-star", type=float, default=0.5, dest="c_star")
    p.add_argument("--rho-bounds", type=float, nargs=2, default=[0.5, 2.0])
    p.add_argument("--theta-bounds", type=float, nargs=2, default=[0.5, 2.0])
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_verify_lemma)

    p = sub.add_parser("rei-check", help="relative energy inequality on a perturbed run")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rei_check)

    p = sub.add_parser("uniqueness-study", help="perturbation-decay uniqueness experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--eps", required=True, help="comma-separated amplitudes, 0 allowed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_uniqueness_study)

    p = sub.add_parser("convergence-study", help="self-convergence orders across grids")
    p.add_argument("--config", required=True)
    p.add_argument("--levels", required=True, help="comma-separated cell counts, nested")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_convergence_study)
    return parser


def main(argv=None) -> int:
    _cap_threads()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except RuntimeError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return VERIFY_ERROR


if __name__ == "__main__":
    sys.exit(main())
