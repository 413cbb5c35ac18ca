"""Batch command-line front end.

Usage: ``relwigner <subcommand> <config.ini> [--figures]``.

Subcommands: trajectory, rotor, dirac-free, wigner, kvnd, salpeter, kvn,
klein-gordon, operator-check, convergence.  Each reads one INI config (see
:mod:`relwigner.config`), writes CSV/binary artifacts plus a ``manifest.json``
into the configured output directory, and optionally renders PNG figures
alongside the delimited output.

Exit codes: 0 success, 2 config error, 3 numerical abort.  CSV and binary
outputs are byte-identical across runs for a fixed config and seed; the
manifest records wall time and is exempt from that contract.
``WIGNER_THREADS`` caps BLAS/OpenMP parallelism.
"""

from __future__ import annotations

import os

if os.environ.get("WIGNER_THREADS"):
    _cap = os.environ["WIGNER_THREADS"]
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _cap)

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .clifford import FourVector
from .config import ScenarioConfig, parse_config, serialize
from .convergence import fit_slope
from .dirac import BranchLabel, dirac_residual, free_spinor, onshell_momentum
from .dynamics import (
    PhasePoint,
    RotorState,
    TrajectoryRecord,
    boost_from_velocity,
    integrate_hamiltonian,
    integrate_rotor,
)
from .errors import ConfigError, NumericalAbort
from .gridio import write_csv, write_wiggrid
from .operator_lab import full_report
from .potentials import PotentialSpec
from .scalar import (
    PhaseSpaceField,
    SalpeterPotential,
    Wavefunction1D,
    klein_gordon_apply,
    klein_gordon_eigenvalue,
    klein_gordon_propagate,
    kvn_step,
    salpeter_step,
)
from .wigner import (
    SpinorField,
    XThetaGrid,
    classical_limit_deviation,
    gaussian_packet,
    positive_energy_packet,
    propagate,
    validate_regime,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _outdir(cfg: ScenarioConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_trajectory_csv(path: Path, traj: TrajectoryRecord) -> None:
    write_csv(path, TrajectoryRecord.csv_header(with_rotor=traj.rotor is not None), traj.csv_rows())


def _initial_phase_point(cfg: ScenarioConfig, pot: PotentialSpec, k) -> PhasePoint:
    x0 = FourVector(np.array(cfg.get_floats("trajectory", "x0", 4)), "upper")
    if cfg.has("trajectory", "u0"):
        u = FourVector(np.array(cfg.get_floats("trajectory", "u0", 4)), "upper")
        if abs(u.norm2() - k.c**2) > 1e-8 * k.c**2:
            raise ConfigError(
                f"{cfg.path}: trajectory.u0 must satisfy u.u = c^2, got u.u = {u.norm2():.6g}"
            )
        p_low = k.m * u.lower + k.e * pot.lower_components(x0)
        return PhasePoint(0.0, x0, FourVector(p_low, "lower"))
    p0 = FourVector(np.array(cfg.get_floats("trajectory", "p0", 4)), "lower")
    return PhasePoint(0.0, x0, p0)


def run_trajectory(cfg: ScenarioConfig, figures: bool) -> list[Path]:
    k = cfg.constants()
    pot = cfg.potential()
    point = _initial_phase_point(cfg, pot, k)
    ds = cfg.get_float("trajectory", "ds", positive=True)
    steps = cfg.get_int("trajectory", "steps", positive=True)
    traj = integrate_hamiltonian(point, pot, k, ds, steps)
    out = _outdir(cfg)
    paths = [out / "trajectory.csv"]
    _write_trajectory_csv(paths[0], traj)
    if figures:
        from . import figures as fig

        paths.append(fig.plot_trajectory(traj, out / "trajectory.png"))
    return paths


def run_rotor(cfg: ScenarioConfig, figures: bool) -> list[Path]:
    k = cfg.constants()
    pot = cfg.potential()
    x0 = FourVector(np.array(cfg.get_floats("trajectory", "x0", 4)), "upper")
    u0 = FourVector(np.array(cfg.get_floats("trajectory", "u0", 4)), "upper")
    try:
        rotor0 = boost_from_velocity(u0, k)
    except ValueError as exc:
        raise ConfigError(f"{cfg.path}: trajectory.u0 {exc}") from None
    ds = cfg.get_float("trajectory", "ds", positive=True)
    steps = cfg.get_int("trajectory", "steps", positive=True)
    traj = integrate_rotor(RotorState(0.0, x0, rotor0), pot, k, ds, steps)
    out = _outdir(cfg)
    paths = [out / "rotor.csv"]
    _write_trajectory_csv(paths[0], traj)
    if figures:
        from . import figures as fig

        paths.append(fig.plot_trajectory(traj, out / "rotor.png", title="rotor trajectory"))
    return paths


def run_dirac_free(cfg: ScenarioConfig, figures: bool) -> list[Path]:
    k = cfg.constants()
    n_samples = cfg.get_int("dirac", "samples", default=25, positive=True)
    p_scale = cfg.get_float("dirac", "p_scale", default=1.0, positive=True)
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for branch in BranchLabel:
        for _ in range(n_samples):
            p = onshell_momentum(rng.normal(size=3) * p_scale, k, positive=branch.positive_energy)
            x = FourVector(rng.normal(size=4))
            psi = free_spinor(branch, p, x, k)
            res = dirac_residual(psi, p, PotentialSpec.zero(), x, k)
            rows.append([branch.value, *p.upper, res])
    out = _outdir(cfg)
    paths = [out / "dirac_residuals.csv"]
    write_csv(paths[0], ["branch", "p0", "p1", "p2", "p3", "residual"], rows)
    if figures:
        from . import figures as fig

        labels = [b.value for b in BranchLabel]
        worst = [
            max(row[5] for row in rows if row[0] == label) for label in labels
        ]
        paths.append(
            fig.plot_residuals(labels, worst, out / "dirac_residuals.png", "worst Dirac residual per branch")
        )
    return paths


def _build_packet(cfg: ScenarioConfig, grid: XThetaGrid, k, kappa: float) -> SpinorField:
    kind = cfg.get_choice("packet", "kind", ["gaussian", "positive_energy"], default="gaussian")
    x0 = cfg.get_float("packet", "x0", default=0.0)
    sigma_x = cfg.get_float("packet", "sigma_x", positive=True)
    k_center = cfg.get_float("packet", "k_center", default=0.0)
    if kind == "positive_energy":
        return positive_energy_packet(grid, k, x0, sigma_x, k_center, kappa=kappa)
    profile = cfg.get_choice("packet", "theta_profile", ["constant", "gaussian"], default="constant")
    sigma_theta = None
    if profile == "gaussian":
        sigma_theta = cfg.get_float("packet", "sigma_theta", positive=True)
    spinor = None
    if cfg.get_choice("packet", "spinor", ["positive", "rest"], default="positive") == "rest":
        spinor = np.array([1.0, 0.0, 0.0, 0.0], complex)
    return gaussian_packet(
        grid, k, x0, sigma_x, k_center, theta_profile=profile, sigma_theta=sigma_theta,
        spinor=spinor, kappa=kappa,
    )


def _wigner_common(cfg: ScenarioConfig, figures: bool, kappa: float | None) -> list[Path]:
    k = cfg.constants()
    pot = cfg.potential()
    grid = XThetaGrid(
        nx=cfg.get_int("grid", "nx", positive=True),
        ntheta=cfg.get_int("grid", "ntheta", positive=True),
        lx=cfg.get_float("grid", "lx", positive=True),
        ltheta=cfg.get_float("grid", "ltheta", positive=True),
        k0=cfg.get_float("grid", "k0", default=0.0),
    )
    if kappa is None:
        kappa = cfg.get_float("evolution", "kappa", default=1.0, nonnegative=True)
        if kappa > 1.0:
            raise ConfigError(f"{cfg.path}: evolution.kappa must lie in [0, 1], got {kappa:g}")
    dx0 = cfg.get_float("evolution", "dt", positive=True)
    steps = cfg.get_int("evolution", "steps", positive=True)
    psi0 = _build_packet(cfg, grid, k, kappa)

    sigma_x = cfg.get_float("packet", "sigma_x", positive=True)
    grad = max(
        float(np.abs(np.asarray(pot.dcomponent_dx1(mu, grid.x))).max()) for mu in range(4)
    )
    for warning in validate_regime(sigma_x, abs(k.e) * grad * k.c, k):
        print(f"warning: {warning}", file=sys.stderr)

    traj = propagate(psi0, pot, kappa, dx0, steps)
    out = _outdir(cfg)
    obs_path = out / "observables.csv"
    write_csv(obs_path, traj.observables.CSV_HEADER, traj.observables.csv_rows())
    snap_path = out / "final.wiggrid"
    final = traj.final
    write_wiggrid(
        snap_path, final.values, grid.dx, grid.dtheta, kappa=kappa, k0=grid.k0, x0=final.x0
    )
    paths = [obs_path, snap_path]
    if figures:
        from . import figures as fig

        paths.append(fig.plot_wigner_field(final, out / "field.png"))
        paths.append(fig.plot_wigner_observables(traj, out / "observables.png"))
    return paths


def run_wigner(cfg: ScenarioConfig, figures: bool) -> list[Path]:
    return _wigner_common(cfg, figures, kappa=None)


def run_kvnd(cfg: ScenarioConfig, figures: bool) -> list[Path]:
    return _wigner_common(cfg, figures, kappa=0.0)


def run_salpeter(cfg: ScenarioConfig, figures: bool) -> list[Path]:
    k = cfg.constants()
    pot = SalpeterPotential(cfg.scalar_potential("salpeter"), k)
    psi0 = Wavefunction1D.gaussian(
        n=cfg.get_int("salpeter", "n", positive=True),
        length=cfg.get_float("salpeter", "l", positive=True),
        x0=cfg.get_float("salpeter", "x0", default=0.0),
        sigma=cfg.get_float("salpeter", "sigma", positive=True),
        p0=cfg.get_float("salpeter", "p0", default=0.0),
        hbar=k.hbar,
    )
    dt = cfg.get_float("salpeter", "dt", positive=True)
    steps = cfg.get_int("salpeter", "steps", positive=True)
    traj = salpeter_step(psi0, pot, dt, steps)
    out = _outdir(cfg)
    paths = [out / "salpeter.csv"]
    write_csv(paths[0], traj.observables.CSV_HEADER, traj.observables.csv_rows())
    if figures:
        from . import figures as fig

        paths.append(fig.plot_scalar_trajectory(traj, out / "salpeter.png"))
    return paths


def run_kvn(cfg: ScenarioConfig, figures: bool) -> list[Path]:
    k = cfg.constants()
    pot = SalpeterPotential(cfg.scalar_potential("kvn"), k)
    field0 = PhaseSpaceField.gaussian(
        nx=cfg.get_int("kvn", "nx", positive=True),
        npoints=cfg.get_int("kvn", "np", positive=True),
        lx=cfg.get_float("kvn", "lx", positive=True),
        lp=cfg.get_float("kvn", "lp", positive=True),
        x0=cfg.get_float("kvn", "x0", default=0.0),
        p0=cfg.get_float("kvn", "p0", default=0.0),
        sigma_x=cfg.get_float("kvn", "sigma_x", positive=True),
        sigma_p=cfg.get_float("kvn", "sigma_p", positive=True),
    )
    dt = cfg.get_float("kvn", "dt", positive=True)
    steps = cfg.get_int("kvn", "steps", positive=True)
    traj = kvn_step(field0, pot, dt, steps)
    out = _outdir(cfg)
    paths = [out / "kvn.csv", out / "final.wiggrid"]
    write_csv(paths[0], traj.observables.CSV_HEADER, traj.observables.csv_rows())
    final = traj.final
    write_wiggrid(paths[1], final.values, final.dx, final.dp, x0=traj.observables.t[-1])
    if figures:
        from . import figures as fig

        paths.append(fig.plot_phase_space(traj, out / "kvn.png"))
    return paths


def run_klein_gordon(cfg: ScenarioConfig, figures: bool) -> list[Path]:
    k = cfg.constants()
    pot = cfg.potential() if "potential" in cfg.sections else PotentialSpec.zero()
    nt = cfg.get_int("klein_gordon", "nt", positive=True)
    nx = cfg.get_int("klein_gordon", "nx", positive=True)
    lt = cfg.get_float("klein_gordon", "lt", positive=True)
    lx = cfg.get_float("klein_gordon", "lx", positive=True)
    s = cfg.get_float("klein_gordon", "s", default=1.0)
    modes_raw = cfg.raw("klein_gordon", "modes", default="1:0")
    rows = []
    k0_all = 2 * np.pi * np.fft.fftfreq(nt, d=lt / nt)
    k1_all = 2 * np.pi * np.fft.fftfreq(nx, d=lx / nx)
    t_grid = np.arange(nt) * (lt / nt)
    x_grid = np.arange(nx) * (lx / nx)
    for token in modes_raw.split():
        try:
            it, ix = (int(part) for part in token.split(":"))
        except ValueError:
            raise ConfigError(
                f"{cfg.path}: klein_gordon.modes entries must look like 'it:ix', got {token!r}"
            ) from None
        if not (0 <= it < nt and 0 <= ix < nx):
            raise ConfigError(f"{cfg.path}: klein_gordon.modes index {token!r} out of range")
        phi = np.exp(1j * (k0_all[it] * t_grid[:, None] + k1_all[ix] * x_grid[None, :]))
        p0, p1 = k.hbar * k0_all[it], k.hbar * k1_all[ix]
        lam = klein_gordon_eigenvalue(p0, p1, k)
        applied = klein_gordon_apply(phi, lt, lx, pot, k)
        residual = float(np.linalg.norm(applied - lam * phi) / np.linalg.norm(phi))
        evolved = klein_gordon_propagate(phi, lt, lx, s, k)
        expected = phi * np.exp(1j * lam * s / k.hbar)
        phase_error = float(np.abs(evolved - expected).max())
        rows.append([f"{it}:{ix}", p0, p1, lam, residual, phase_error])
    out = _outdir(cfg)
    paths = [out / "klein_gordon.csv"]
    write_csv(
        paths[0], ["mode", "p0", "p1", "eigenvalue", "generator_residual", "phase_error"], rows
    )
    if figures:
        from . import figures as fig

        paths.append(
            fig.plot_residuals(
                [row[0] for row in rows],
                [row[4] for row in rows],
                out / "klein_gordon.png",
                "generator residual per mode",
            )
        )
    return paths


def run_operator_check(cfg: ScenarioConfig, figures: bool) -> list[Path]:
    n = cfg.get_int("operator_check", "n", default=32, positive=True)
    kappas = cfg.get_floats("operator_check", "kappas") if cfg.has("operator_check", "kappas") else [0.0, 0.5, 1.0]
    hbar = cfg.get_float("constants", "hbar", default=1.0, positive=True)
    for kappa in kappas:
        if not 0.0 <= kappa <= 1.0:
            raise ConfigError(f"{cfg.path}: operator_check.kappas entries must lie in [0, 1], got {kappa:g}")
    rows = [
        [check, kappa_str, "" if degree < 0 else "%d" % degree, residual]
        for check, kappa_str, degree, residual in full_report(n, kappas, hbar)
    ]
    out = _outdir(cfg)
    paths = [out / "operator_check.csv"]
    write_csv(paths[0], ["check", "kappa", "degree", "residual"], rows)
    if figures:
        from . import figures as fig

        paths.append(
            fig.plot_residuals(
                [row[0] for row in rows],
                [row[3] for row in rows],
                out / "operator_check.png",
                "operator-algebra residuals",
            )
        )
    return paths


def _convergence_dt(cfg: ScenarioConfig, levels: list[float]) -> list[float]:
    k = cfg.constants()
    pot = cfg.potential()
    grid = XThetaGrid(
        nx=cfg.get_int("grid", "nx", default=64, positive=True),
        ntheta=cfg.get_int("grid", "ntheta", default=32, positive=True),
        lx=cfg.get_float("grid", "lx", default=40.0, positive=True),
        ltheta=cfg.get_float("grid", "ltheta", default=12.0, positive=True),
    )
    kappa = cfg.get_float("evolution", "kappa", default=1.0, nonnegative=True)
    t_final = cfg.get_float("convergence", "t_final", default=0.8, positive=True)
    psi0 = _build_packet(cfg, grid, k, kappa)

    def steps_for(dt: float) -> int:
        steps = round(t_final / dt)
        if steps < 1 or abs(steps * dt - t_final) > 1e-9 * t_final:
            raise ConfigError(
                f"{cfg.path}: convergence.levels entry {dt:g} does not divide t_final = {t_final:g}"
            )
        return steps

    n_ref = 4 * max(steps_for(dt) for dt in levels)
    ref = propagate(psi0, pot, kappa, t_final / n_ref, n_ref).final
    w = grid.dx * grid.dtheta
    errors = []
    for dt in levels:
        fin = propagate(psi0, pot, kappa, dt, steps_for(dt)).final
        errors.append(float(np.sqrt(np.sum(np.abs(fin.values - ref.values) ** 2) * w)))
    return errors


def _convergence_kappa(cfg: ScenarioConfig, levels: list[float]) -> list[float]:
    k = cfg.constants()
    pot = cfg.potential()
    grid = XThetaGrid(
        nx=cfg.get_int("grid", "nx", default=64, positive=True),
        ntheta=cfg.get_int("grid", "ntheta", default=32, positive=True),
        lx=cfg.get_float("grid", "lx", default=40.0, positive=True),
        ltheta=cfg.get_float("grid", "ltheta", default=12.0, positive=True),
    )
    psi0 = _build_packet(cfg, grid, k, levels[0])
    dt = cfg.get_float("evolution", "dt", default=0.02, positive=True)
    steps = cfg.get_int("evolution", "steps", default=40, positive=True)
    devs, _ = classical_limit_deviation(psi0, pot, levels, dt, steps)
    return [d for _, d in devs]


def _convergence_dx(cfg: ScenarioConfig, levels: list[float]) -> list[float]:
    k = cfg.constants()
    pot = SalpeterPotential(cfg.scalar_potential("salpeter"), k)
    length = cfg.get_float("salpeter", "l", default=100.0, positive=True)
    dt = cfg.get_float("salpeter", "dt", default=0.02, positive=True)
    steps = cfg.get_int("salpeter", "steps", default=100, positive=True)
    x0 = cfg.get_float("salpeter", "x0", default=-10.0)
    sigma = cfg.get_float("salpeter", "sigma", default=2.0, positive=True)
    p0 = cfg.get_float("salpeter", "p0", default=0.6)

    def n_for(dx: float) -> int:
        n = round(length / dx)
        if n < 8 or (n & (n - 1)) != 0:
            raise ConfigError(
                f"{cfg.path}: convergence.levels entry {dx:g} must give a power-of-two grid, got n = {n}"
            )
        return n

    n_ref = 2 * max(n_for(dx) for dx in levels)
    ref = salpeter_step(
        Wavefunction1D.gaussian(n_ref, length, x0, sigma, p0, k.hbar), pot, dt, steps
    ).observables.mean_x[-1]
    errors = []
    for dx in levels:
        psi0 = Wavefunction1D.gaussian(n_for(dx), length, x0, sigma, p0, k.hbar)
        mean_x = salpeter_step(psi0, pot, dt, steps).observables.mean_x[-1]
        errors.append(abs(mean_x - ref))
    return errors


def run_convergence(cfg: ScenarioConfig, figures: bool) -> list[Path]:
    parameter = cfg.get_choice("convergence", "parameter", ["dt", "dx", "kappa"])
    levels = cfg.get_floats("convergence", "levels")
    if len(levels) < 3:
        raise ConfigError(f"{cfg.path}: convergence.levels needs at least 3 entries")
    runner = {"dt": _convergence_dt, "kappa": _convergence_kappa, "dx": _convergence_dx}[parameter]
    errors = runner(cfg, levels)
    report = fit_slope(parameter, levels, errors)
    out = _outdir(cfg)
    paths = [out / "convergence.csv", out / "convergence_summary.csv"]
    write_csv(paths[0], ["level", "error"], list(zip(levels, errors)))
    write_csv(
        paths[1],
        ["parameter", "slope", "r_squared", "classification"],
        [[report.parameter, report.slope, report.r_squared, report.classification]],
    )
    if figures:
        from . import figures as fig

        paths.append(fig.plot_convergence(levels, errors, report.slope, out / "convergence.png"))
    return paths


HANDLERS = {
    "trajectory": run_trajectory,
    "rotor": run_rotor,
    "dirac-free": run_dirac_free,
    "wigner": run_wigner,
    "kvnd": run_kvnd,
    "salpeter": run_salpeter,
    "kvn": run_kvn,
    "klein-gordon": run_klein_gordon,
    "operator-check": run_operator_check,
    "convergence": run_convergence,
}


def _write_manifest(cfg: ScenarioConfig, scenario: str, outputs: list[Path], wall: float) -> Path:
    out = _outdir(cfg)
    manifest = {
        "scenario": scenario,
        "version": __version__,
        "seed": cfg.seed,
        "config": serialize(cfg),
        "outputs": sorted(p.name for p in outputs),
        "wall_time_s": wall,
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="relwigner",
        description="Covariant dynamics, Dirac oracles and relativistic Wigner propagation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in HANDLERS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("config", help="path to the INI scenario configuration")
        p.add_argument(
            "--figures", action="store_true", help="render PNG figures alongside the CSV output"
        )
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config)
        start = time.monotonic()
        outputs = HANDLERS[args.command](cfg, figures=args.figures)
        wall = time.monotonic() - start
        manifest = _write_manifest(cfg, args.command, outputs, wall)
        for path in [*outputs, manifest]:
            print(path)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalAbort as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
