"""Figure rendering for the CLI report path.

Every renderer takes computed objects and writes a PNG next to the CSV
output.  Figures are presentation artifacts: they are not covered by the
byte-determinism contract of the delimited and binary outputs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dynamics import TrajectoryRecord
from .scalar import KvnTrajectory, ScalarTrajectory
from .wigner import SpinorField, WignerTrajectory, current_xp

FIGSIZE = (7.0, 4.5)
DPI = 130


def _finish(fig, path: Path | str) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def plot_trajectory(traj: TrajectoryRecord, path: Path | str, title: str = "trajectory") -> Path:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=FIGSIZE)
    ax1.plot(traj.x[:, 1], traj.x[:, 0], lw=1.2)
    ax1.set_xlabel(r"$X^1$")
    ax1.set_ylabel(r"$X^0$")
    ax1.set_title("worldline")
    for mu in range(4):
        ax2.plot(traj.s, traj.p[:, mu], lw=1.0, label=rf"$P_{mu}$")
    ax2.set_xlabel("s")
    ax2.set_ylabel("momentum components")
    ax2.legend(fontsize=8)
    ax2.set_title(title)
    return _finish(fig, path)


def plot_wigner_field(field: SpinorField, path: Path | str) -> Path:
    grid = field.grid
    density = np.sum(np.abs(field.values) ** 2, axis=0)
    cur = current_xp(field)
    j0p = np.abs(cur.components[0].real)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=FIGSIZE)
    im1 = ax1.pcolormesh(grid.x, grid.theta, density.T, shading="auto", cmap="viridis")
    ax1.set_xlabel(r"$X^1$")
    ax1.set_ylabel(r"$\Theta^1$")
    ax1.set_title(r"$|\psi|^2(X,\Theta)$")
    fig.colorbar(im1, ax=ax1)
    im2 = ax2.pcolormesh(grid.x, cur.axis_values, j0p.T, shading="auto", cmap="magma")
    ax2.set_xlabel(r"$X^1$")
    ax2.set_ylabel(r"$P_1$")
    ax2.set_title(r"$|J^0|(X,P)$")
    fig.colorbar(im2, ax=ax2)
    return _finish(fig, path)


def plot_wigner_observables(traj: WignerTrajectory, path: Path | str) -> Path:
    obs = traj.observables
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=FIGSIZE)
    ax1.plot(obs.x0, obs.mean_x, lw=1.2)
    ax1.set_xlabel(r"$X^0$")
    ax1.set_ylabel(r"$\langle X^1 \rangle$")
    ax2.semilogy(obs.x0, np.abs(obs.norm / obs.norm[0] - 1.0) + 1e-18, lw=1.0)
    ax2.set_xlabel(r"$X^0$")
    ax2.set_ylabel("relative norm drift")
    return _finish(fig, path)


def plot_scalar_trajectory(traj: ScalarTrajectory, path: Path | str) -> Path:
    first, last = traj.fields[0], traj.fields[-1]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=FIGSIZE)
    ax1.plot(first.x, np.abs(first.values) ** 2, label="initial", lw=1.2)
    ax1.plot(last.x, np.abs(last.values) ** 2, label="final", lw=1.2)
    ax1.set_xlabel("x")
    ax1.set_ylabel(r"$|\psi|^2$")
    ax1.legend(fontsize=8)
    obs = traj.observables
    ax2.plot(obs.t, obs.mean_x, lw=1.2)
    ax2.set_xlabel("t")
    ax2.set_ylabel(r"$\langle x \rangle$")
    return _finish(fig, path)


def plot_phase_space(traj: KvnTrajectory, path: Path | str) -> Path:
    first, last = traj.fields[0], traj.fields[-1]
    fig, axes = plt.subplots(1, 2, figsize=FIGSIZE)
    for ax, f, label in ((axes[0], first, "initial"), (axes[1], last, "final")):
        im = ax.pcolormesh(f.x, f.p, f.density().T, shading="auto", cmap="viridis")
        ax.set_xlabel("X")
        ax.set_ylabel("P")
        ax.set_title(rf"$\rho$ {label}")
        fig.colorbar(im, ax=ax)
    return _finish(fig, path)


def plot_residuals(labels: list[str], residuals: list[float], path: Path | str, title: str) -> Path:
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.bar(range(len(residuals)), np.maximum(residuals, 1e-18))
    ax.set_yscale("log")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("residual")
    ax.set_title(title)
    return _finish(fig, path)


def plot_convergence(levels: list[float], errors: list[float], slope: float, path: Path | str) -> Path:
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.loglog(levels, errors, "o-", lw=1.2)
    ax.set_xlabel("refinement parameter")
    ax.set_ylabel("error")
    ax.set_title(f"fitted slope {slope:.3g}" if np.isfinite(slope) else "slope undefined")
    ax.grid(True, which="both", alpha=0.3)
    return _finish(fig, path)
