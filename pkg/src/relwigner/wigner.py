"""Split-step propagation of the spinorial Wigner function on an (X, Theta) grid.

The full constraint equation

    gamma^0 ( c gamma^mu [ i hbar d/dX^mu + (e/kappa)(A_mu^+ - A_mu^-) ] - m c^2 ) psi = 0,
    A_mu^{+-} = A_mu(X +- hbar kappa Theta / 2),

is rearranged into lab-time evolution by isolating the mu = 0 term
(multiply by gamma^0, use (gamma^0)^2 = 1):

    i hbar c d/dX^0 psi = H psi,
    H = -(e c / kappa) dA_0 - c alpha^1 [ i hbar d/dX^1 + (e/kappa) dA_1 ]
        + gamma^0 m c^2 - c hbar k_0,          alpha^1 = gamma^0 gamma^1,

where dA_mu = A_mu^+ - A_mu^-, the potential is static (a function of X^1
only), and the spectator frequency k_0 replaces the internal X^0 dependence
(a pure overall phase of the evolution, 0 by default).  H is Hermitian for
real potentials; a test asserts this numerically.

kappa = 0 is a distinct code path: the generator is then the analytic
Koopman-von Neumann-Dirac limit with (e/kappa) dA_mu replaced by
e hbar (dA_mu/dX^1) Theta^1.  The quotient (e/kappa) dA is never evaluated
at kappa = 0.

Propagation is Strang splitting, potential half-step / kinetic full step /
potential half-step, each sub-step an exact 4x4 unitary (pointwise over the
grid for the potential, per Fourier mode for the kinetic part), so the
propagator is unitary to rounding.  Both exponential tables are cached for
the whole run since the potential is static.

The grid is periodic in X^1 and Theta^1; Theta^0 is fixed to 0.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .clifford import ArrayC, ArrayR, FourVector, GammaRep, exp_hermitian, gammas, rep_transform
from .constants import PhysicalConstants
from .dirac import BranchLabel, branch_column, free_spinor, onshell_momentum
from .errors import NumericalAbort
from .potentials import PotentialSpec

NORM_DRIFT_ABORT = 1e-8  # relative, per step
LEAK_WARN_FRACTION = 1e-8


@dataclass(frozen=True)
class XThetaGrid:
    """Rectangular periodic (X^1, Theta^1) grid with spectator parameters.

    ``k0`` is the fixed X^0 frequency carried by the field; Theta^0 = 0.
    """

    nx: int
    ntheta: int
    lx: float
    ltheta: float
    k0: float = 0.0

    def __post_init__(self) -> None:
        for name, n in (("nx", self.nx), ("ntheta", self.ntheta)):
            if n < 8 or (n & (n - 1)) != 0:
                raise ValueError(f"{name} must be a power of two >= 8, got {n}")
        if self.lx <= 0 or self.ltheta <= 0:
            raise ValueError("box lengths must be positive")

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dtheta(self) -> float:
        return self.ltheta / self.ntheta

    @property
    def x(self) -> ArrayR:
        return -0.5 * self.lx + self.dx * np.arange(self.nx)

    @property
    def theta(self) -> ArrayR:
        return -0.5 * self.ltheta + self.dtheta * np.arange(self.ntheta)

    @property
    def kx(self) -> ArrayR:
        """Angular wavenumbers conjugate to X^1, FFT ordering."""
        return 2.0 * np.pi * np.fft.fftfreq(self.nx, d=self.dx)

    @property
    def p_grid(self) -> ArrayR:
        """Momentum grid conjugate to Theta^1, centered at zero."""
        return np.fft.fftshift(2.0 * np.pi * np.fft.fftfreq(self.ntheta, d=self.dtheta))

    @property
    def theta_zero_index(self) -> int:
        return self.ntheta // 2


@dataclass
class SpinorField:
    """Four-spinor sampled on an XThetaGrid; ``kappa`` tags the generator.

    ``kappa = 0.0`` marks the Koopman-von Neumann-Dirac branch.
    """

    grid: XThetaGrid
    values: ArrayC  # shape (4, nx, ntheta)
    kappa: float
    constants: PhysicalConstants
    x0: float = 0.0  # current lab-time coordinate X^0

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (4, self.grid.nx, self.grid.ntheta):
            raise ValueError(f"field shape {v.shape} does not match grid")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        self.values = v

    def norm(self) -> float:
        total = np.sum(np.abs(self.values) ** 2)
        return float(total * self.grid.dx * self.grid.dtheta)

    def with_values(self, values: ArrayC, x0: float | None = None) -> "SpinorField":
        return SpinorField(self.grid, values, self.kappa, self.constants, self.x0 if x0 is None else x0)


def validate_kappa(kappa: float) -> float:
    kappa = float(kappa)
    if not 0.0 <= kappa <= 1.0:
        raise ValueError(f"kappa must lie in [0, 1], got {kappa}")
    return kappa


def potential_difference(
    a: PotentialSpec,
    x: ArrayR | float,
    theta: ArrayR | float,
    kappa: float,
    k: PhysicalConstants,
) -> ArrayR:
    """[A_mu(X + hbar kappa Theta/2) - A_mu(X - hbar kappa Theta/2)] / kappa.

    Returns the four components stacked along axis 0.  ``kappa`` must be
    positive; the kappa = 0 limit lives in :func:`kvnd_apply`.
    """
    if kappa <= 0.0:
        raise ValueError("potential_difference requires kappa > 0; use kvnd_apply at kappa = 0")
    x = np.asarray(x, dtype=float)
    theta = np.asarray(theta, dtype=float)
    h = 0.5 * k.hbar * kappa * theta
    return np.stack([np.asarray(a.centered_difference(mu, x, h)) / kappa for mu in range(4)])


def _require_supported_potential(a: PotentialSpec) -> None:
    if a.spatial_components_23():
        raise ValueError(
            "the (X^1, Theta^1) propagator supports potentials with components A_0, A_1 only"
        )


def _potential_coefficients(
    a: PotentialSpec,
    grid: XThetaGrid,
    kappa: float,
    k: PhysicalConstants,
) -> tuple[ArrayR, ArrayR]:
    """Coefficients (v0, v1) of the multiplication part V = v0 + v1 alpha^1.

    kappa > 0: v_mu = -(e c / kappa) dA_mu;
    kappa = 0: v_mu = -(e c hbar) (dA_mu/dX^1) Theta^1  (KvND generator).
    """
    _require_supported_potential(a)
    xg = grid.x[:, None]
    tg = grid.theta[None, :]
    if kappa > 0.0:
        diff = potential_difference(a, xg, tg, kappa, k)
        v0 = -k.e * k.c * diff[0]
        v1 = -k.e * k.c * diff[1]
    else:
        v0 = -k.e * k.c * k.hbar * np.asarray(a.dcomponent_dx1(0, xg)) * tg
        v1 = -k.e * k.c * k.hbar * np.asarray(a.dcomponent_dx1(1, xg)) * tg
    shape = (grid.nx, grid.ntheta)
    return np.broadcast_to(v0, shape).copy(), np.broadcast_to(v1, shape).copy()


def _kinetic_symbols(grid: XThetaGrid, k: PhysicalConstants, rep: GammaRep) -> ArrayC:
    """Per-mode 4x4 matrices c alpha^1 hbar k_1 + gamma^0 m c^2 - c hbar k_0."""
    g = gammas(rep)
    alpha1 = g[0] @ g[1]
    ident = np.eye(4)
    kx = grid.kx
    return (
        k.c * k.hbar * kx[:, None, None] * alpha1[None, :, :]
        + (k.m * k.c**2) * g[0][None, :, :]
        - (k.c * k.hbar * grid.k0) * ident[None, :, :]
    )


def _apply_generator(
    psi: SpinorField, a: PotentialSpec, kappa: float, rep: GammaRep
) -> SpinorField:
    k = psi.constants
    grid = psi.grid
    g = gammas(rep)
    alpha1 = g[0] @ g[1]
    v0, v1 = _potential_coefficients(a, grid, kappa, k)
    out = v0[None, :, :] * psi.values + v1[None, :, :] * np.einsum("ab,bxt->axt", alpha1, psi.values)
    # kinetic term: -c alpha^1 (i hbar d/dX^1) psi, spectral derivative
    dpsi = np.fft.ifft(1j * grid.kx[None, :, None] * np.fft.fft(psi.values, axis=1), axis=1)
    out = out - k.c * 1j * k.hbar * np.einsum("ab,bxt->axt", alpha1, dpsi)
    out = out + (k.m * k.c**2) * np.einsum("ab,bxt->axt", g[0], psi.values)
    out = out - k.c * k.hbar * grid.k0 * psi.values
    return psi.with_values(out)


def wigner_hamiltonian_apply(
    psi: SpinorField, a: PotentialSpec, kappa: float, rep: GammaRep = GammaRep.DIRAC
) -> SpinorField:
    """Apply the kappa-parametrized Hamiltonian H to a field (kappa > 0)."""
    if kappa <= 0.0:
        raise ValueError("kappa must be positive here; use kvnd_apply for the classical limit")
    validate_kappa(kappa)
    return _apply_generator(psi, a, kappa, rep)


def kvnd_apply(psi: SpinorField, a: PotentialSpec, rep: GammaRep = GammaRep.DIRAC) -> SpinorField:
    """Apply the kappa -> 0 Koopman-von Neumann-Dirac Hamiltonian."""
    return _apply_generator(psi, a, 0.0, rep)


@dataclass
class WignerObservables:
    """Per-step reduced observables of a propagation."""

    x0: ArrayR
    norm: ArrayR
    mean_x: ArrayR
    mean_p: ArrayR
    j0_integral: ArrayR
    mean_alpha1: ArrayR

    CSV_HEADER = ["X0", "norm", "meanX", "meanP", "J0_integral"]

    def csv_rows(self) -> list[list[float]]:
        return [
            [self.x0[i], self.norm[i], self.mean_x[i], self.mean_p[i], self.j0_integral[i]]
            for i in range(len(self.x0))
        ]


@dataclass
class WignerTrajectory:
    """Stored fields (every ``store_every`` steps) plus per-step observables."""

    fields: list[SpinorField]
    observables: WignerObservables
    store_every: int

    @property
    def initial(self) -> SpinorField:
        return self.fields[0]

    @property
    def final(self) -> SpinorField:
        return self.fields[-1]


def _observables_of(psi: SpinorField, alpha1: ArrayC) -> tuple[float, float, float, float, float]:
    grid = psi.grid
    w = grid.dx * grid.dtheta
    rho = np.sum(np.abs(psi.values) ** 2, axis=0)
    norm = float(rho.sum() * w)
    mean_x = float((grid.x[:, None] * rho).sum() * w / norm)
    # mean of P-hat = -i d/dTheta (classical-algebra normalization, no hbar)
    psihat = np.fft.fft(psi.values, axis=2)
    ktheta = 2.0 * np.pi * np.fft.fftfreq(grid.ntheta, d=grid.dtheta)
    dens_t = np.sum(np.abs(psihat) ** 2, axis=(0, 1))
    mean_p = float((ktheta * dens_t).sum() / dens_t.sum())
    j0 = float(rho[:, grid.theta_zero_index].sum() * grid.dx)
    a_psi = np.einsum("ab,bxt->axt", alpha1, psi.values)
    mean_a1 = float(np.sum(psi.values.conj() * a_psi).real * w / norm)
    return norm, mean_x, mean_p, j0, mean_a1


def propagate(
    psi0: SpinorField,
    a: PotentialSpec,
    kappa: float,
    dx0: float,
    n_steps: int,
    store_every: int = 0,
    rep: GammaRep = GammaRep.DIRAC,
) -> WignerTrajectory:
    """Strang split-step evolution over n_steps of size dx0 in X^0.

    ``kappa = 0`` propagates with the KvND generator.  ``store_every = 0``
    keeps only the initial and final fields; observables are recorded every
    step either way.  Aborts on norm drift beyond ``NORM_DRIFT_ABORT`` per
    step; warns when the boundary-cell density exceeds ``LEAK_WARN_FRACTION``
    of the total.
    """
    kappa = validate_kappa(kappa)
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    k = psi0.constants
    grid = psi0.grid
    g = gammas(rep)
    alpha1 = g[0] @ g[1]

    v0, v1 = _potential_coefficients(a, grid, kappa, k)
    ident = np.eye(4)
    v_matrices = v0[..., None, None] * ident + v1[..., None, None] * alpha1
    u_pot_half = exp_hermitian(v_matrices, 0.5 * dx0 / (k.hbar * k.c))
    u_kin = exp_hermitian(_kinetic_symbols(grid, k, rep), dx0 / (k.hbar * k.c))

    n_obs = n_steps + 1
    obs = WignerObservables(
        x0=np.empty(n_obs),
        norm=np.empty(n_obs),
        mean_x=np.empty(n_obs),
        mean_p=np.empty(n_obs),
        j0_integral=np.empty(n_obs),
        mean_alpha1=np.empty(n_obs),
    )

    psi = SpinorField(grid, psi0.values.copy(), kappa, k, psi0.x0)
    fields = [psi]
    obs.x0[0] = psi.x0
    obs.norm[0], obs.mean_x[0], obs.mean_p[0], obs.j0_integral[0], obs.mean_alpha1[0] = _observables_of(
        psi, alpha1
    )
    norm0 = obs.norm[0]
    leak_warned = False

    values = psi.values
    for step in range(1, n_steps + 1):
        values = np.einsum("xtab,bxt->axt", u_pot_half, values)
        vhat = np.fft.fft(values, axis=1)
        vhat = np.einsum("xab,bxt->axt", u_kin, vhat)
        values = np.fft.ifft(vhat, axis=1)
        values = np.einsum("xtab,bxt->axt", u_pot_half, values)

        x0_now = psi0.x0 + step * dx0
        cur = SpinorField(grid, values, kappa, k, x0_now)
        norm, mean_x, mean_p, j0, mean_a1 = _observables_of(cur, alpha1)
        if abs(norm - obs.norm[step - 1]) > NORM_DRIFT_ABORT * norm0:
            raise NumericalAbort(
                f"norm drift {abs(norm - obs.norm[step - 1]):.3e} in one step at X^0 = {x0_now:.6g}"
            )
        obs.x0[step] = x0_now
        obs.norm[step] = norm
        obs.mean_x[step] = mean_x
        obs.mean_p[step] = mean_p
        obs.j0_integral[step] = j0
        obs.mean_alpha1[step] = mean_a1

        if not leak_warned:
            # transport happens along X only; Theta profiles never move
            rho = np.abs(values) ** 2
            boundary = rho[:, 0, :].sum() + rho[:, -1, :].sum()
            if boundary > LEAK_WARN_FRACTION * rho.sum():
                warnings.warn(
                    f"X-boundary density fraction {boundary / rho.sum():.3e} exceeds "
                    f"{LEAK_WARN_FRACTION:.1e}; the box may be too small",
                    RuntimeWarning,
                    stacklevel=2,
                )
                leak_warned = True

        if store_every and step % store_every == 0:
            fields.append(cur)
    if n_steps > 0 and (not store_every or n_steps % store_every != 0):
        fields.append(SpinorField(grid, values, kappa, k, psi0.x0 + n_steps * dx0))
    return WignerTrajectory(fields, obs, store_every)


def classical_limit_deviation(
    psi0: SpinorField,
    a: PotentialSpec,
    kappa_list: list[float],
    dx0: float,
    n_steps: int,
    rep: GammaRep = GammaRep.DIRAC,
) -> tuple[list[tuple[float, float]], float]:
    """L2 deviation of kappa-propagation from KvND propagation, plus slope.

    ``kappa_list`` must be positive and descending.  The returned slope is
    the log-log fit of deviation against kappa (expected to approach 2 for
    potentials with a nonvanishing third derivative).
    """
    if any(kap <= 0.0 for kap in kappa_list):
        raise ValueError("kappa_list entries must be positive")
    if list(kappa_list) != sorted(kappa_list, reverse=True):
        raise ValueError("kappa_list must be descending")
    ref = propagate(psi0, a, 0.0, dx0, n_steps, rep=rep).final
    w = psi0.grid.dx * psi0.grid.dtheta
    out = []
    for kap in kappa_list:
        fin = propagate(psi0, a, kap, dx0, n_steps, rep=rep).final
        dev = float(np.sqrt(np.sum(np.abs(fin.values - ref.values) ** 2) * w))
        out.append((float(kap), dev))
    devs = np.array([d for _, d in out])
    if np.all(devs > 0.0):
        slope = float(np.polyfit(np.log(np.array(kappa_list)), np.log(devs), 1)[0])
    else:
        slope = float("nan")
    return out, slope


# -- currents ----------------------------------------------------------------


@dataclass
class CurrentGrid:
    """Current field: 4x4 slash matrix per node plus its vector components.

    ``components[mu]`` is Tr(M gamma^mu), scaled so that J^0 equals
    psi^dag psi at Theta = 0.  ``axis_values`` holds the Theta (or P) grid.
    """

    matrix: ArrayC  # (nx, n_axis, 4, 4)
    components: ArrayC  # (4, nx, n_axis); complex before symmetrization
    axis_name: str  # "theta" or "p"
    axis_values: ArrayR


def current_xtheta(psi: SpinorField, rep: GammaRep = GammaRep.DIRAC) -> CurrentGrid:
    """J_XTheta(X, Theta) = psi psi^dag gamma^0, pointwise on the grid."""
    g = gammas(rep)
    outer = np.einsum("axt,bxt->xtab", psi.values, psi.values.conj())
    matrix = outer @ g[0]
    components = np.einsum("xtab,mba->mxt", matrix, np.stack([g[mu] for mu in range(4)]))
    return CurrentGrid(matrix, components, "theta", psi.grid.theta.copy())


def current_xp(psi: SpinorField, rep: GammaRep = GammaRep.DIRAC) -> CurrentGrid:
    """Fourier transform of the XTheta current over Theta.

    Convention: forward kernel exp(-i P Theta) with the quadrature weight
    dTheta (so the sum approximates the integral over Theta); the momentum
    grid is fftshift-centered with spacing 2 pi / L_theta.  With this
    normalization Parseval reads
    sum |J_XP|^2 dP = 2 pi sum |J_XTheta|^2 dTheta.
    """
    cur = current_xtheta(psi, rep)
    grid = psi.grid
    p = grid.p_grid
    kernel = np.exp(-1j * np.outer(grid.theta, p)) * grid.dtheta  # (ntheta, np)
    matrix = np.einsum("xtab,tp->xpab", cur.matrix, kernel)
    components = np.einsum("mxt,tp->mxp", cur.components, kernel)
    return CurrentGrid(matrix, components, "p", p.copy())


# -- diagnostics --------------------------------------------------------------


def validate_regime(
    packet_width: float, potential_scale_over_width: float, k: PhysicalConstants
) -> list[str]:
    """Localization and pair-creation warnings; empty list when safe.

    Warns when the packet is narrower than the Compton wavelength, or when
    the potential variation per width reaches the pair-creation scale
    2 m c^2 / (hbar / (m c)).
    """
    out = []
    compton = k.compton_wavelength
    if packet_width < compton:
        out.append(
            f"localization: packet width {packet_width:.4g} is below the "
            f"Compton wavelength {compton:.4g}"
        )
    pair_scale = 2.0 * k.rest_energy / compton
    if potential_scale_over_width >= pair_scale:
        out.append(
            f"pair-creation: potential gradient {potential_scale_over_width:.4g} reaches "
            f"the pair-creation scale {pair_scale:.4g}"
        )
    return out


def ehrenfest_check(traj: WignerTrajectory, k: PhysicalConstants) -> ArrayR:
    """|centered-difference d<X^1>/dX^0 - c <alpha^1>| at interior steps."""
    obs = traj.observables
    if len(obs.x0) < 3:
        raise ValueError("need at least 3 stored steps")
    dx0 = obs.x0[1] - obs.x0[0]
    lhs = (obs.mean_x[2:] - obs.mean_x[:-2]) / (2.0 * dx0)
    rhs = k.c * obs.mean_alpha1[1:-1]
    return np.abs(lhs - rhs)


# -- initial packets -----------------------------------------------------------


def _theta_profile(grid: XThetaGrid, profile: str, sigma_theta: float | None) -> ArrayR:
    if profile == "constant":
        return np.ones(grid.ntheta)
    if profile == "gaussian":
        if sigma_theta is None or sigma_theta <= 0:
            raise ValueError("gaussian theta profile needs a positive sigma_theta")
        return np.exp(-(grid.theta**2) / (2.0 * sigma_theta**2))
    raise ValueError(f"unknown theta profile {profile!r}")


def gaussian_packet(
    grid: XThetaGrid,
    k: PhysicalConstants,
    x_center: float,
    sigma_x: float,
    k_center: float,
    theta_profile: str = "constant",
    sigma_theta: float | None = None,
    spinor: ArrayC | None = None,
    kappa: float = 1.0,
    rep: GammaRep = GammaRep.DIRAC,
) -> SpinorField:
    """Gaussian in X^1 times a Theta profile times a fixed four-spinor.

    The default spinor is the positive-energy eigenvector at the packet's
    central momentum hbar k_center, normalized to unit total density.
    """
    if spinor is None:
        p = onshell_momentum((k.hbar * k_center, 0.0, 0.0), k)
        spinor = free_spinor(BranchLabel.PLUS_UP, p, FourVector(np.zeros(4)), k, rep)
    spinor = np.asarray(spinor, dtype=complex)
    gx = np.exp(-((grid.x - x_center) ** 2) / (2.0 * sigma_x**2)) * np.exp(1j * k_center * grid.x)
    gt = _theta_profile(grid, theta_profile, sigma_theta)
    values = spinor[:, None, None] * gx[None, :, None] * gt[None, None, :]
    out = SpinorField(grid, values, kappa, k)
    out.values /= np.sqrt(out.norm())
    return out


def positive_energy_packet(
    grid: XThetaGrid,
    k: PhysicalConstants,
    x_center: float,
    sigma_x: float,
    k_center: float,
    kappa: float = 1.0,
    rep: GammaRep = GammaRep.DIRAC,
) -> SpinorField:
    """Theta-independent packet built mode-by-mode from +up branch spinors.

    Exactly positive-energy: each Fourier mode carries the closed-form
    eigenvector of the free symbol at its momentum.
    """
    gx = np.exp(-((grid.x - x_center) ** 2) / (2.0 * sigma_x**2)) * np.exp(1j * k_center * grid.x)
    amp = np.fft.fft(gx)
    spinors = np.empty((4, grid.nx), dtype=complex)
    s = rep_transform(GammaRep.DIRAC, rep)
    for i, kx in enumerate(grid.kx):
        p = onshell_momentum((k.hbar * kx, 0.0, 0.0), k)
        spinors[:, i] = s @ branch_column(BranchLabel.PLUS_UP, p, k)
    values_x = np.fft.ifft(amp[None, :] * spinors, axis=1)
    values = np.repeat(values_x[:, :, None], grid.ntheta, axis=2)
    out = SpinorField(grid, values, kappa, k)
    out.values /= np.sqrt(out.norm())
    return out


def free_packet_oracle(psi0: SpinorField, dx0_total: float, rep: GammaRep = GammaRep.DIRAC) -> SpinorField:
    """Analytic free evolution of a Theta-independent positive-energy packet.

    Superposes dirac-branch plane waves: each X-Fourier mode is projected
    onto the +up/+down closed-form spinors and advanced by its dispersion
    phase exp(-i p^0 dX^0 / hbar), times the spectator phase exp(i k0 dX^0).
    """
    k = psi0.constants
    grid = psi0.grid
    s = rep_transform(GammaRep.DIRAC, rep)
    slice0 = psi0.values[:, :, 0]
    vhat = np.fft.fft(slice0, axis=1)
    out_hat = np.zeros_like(vhat)
    for i, kx in enumerate(grid.kx):
        p = onshell_momentum((k.hbar * kx, 0.0, 0.0), k)
        u_up = s @ branch_column(BranchLabel.PLUS_UP, p, k)
        u_dn = s @ branch_column(BranchLabel.PLUS_DOWN, p, k)
        phase = np.exp(-1j * p.upper[0] * dx0_total / k.hbar)
        for u in (u_up, u_dn):
            un = u / np.linalg.norm(u)
            out_hat[:, i] += un * (un.conj() @ vhat[:, i]) * phase
    out_hat *= np.exp(1j * grid.k0 * dx0_total)
    values_x = np.fft.ifft(out_hat, axis=1)
    values = np.repeat(values_x[:, :, None], grid.ntheta, axis=2)
    return SpinorField(grid, values, psi0.kappa, k, x0=psi0.x0 + dx0_total)


def constraint_residual(traj: WignerTrajectory, a: PotentialSpec, rep: GammaRep = GammaRep.DIRAC) -> ArrayR:
    """Residual of the constraint equation along stored fields.

    Uses centered differences in X^0 of the stored fields against the
    generator application; reports ||i hbar c dpsi/dX^0 - H psi|| / ||psi||
    at interior stored steps.  Unconstrained data is propagated as-is; this
    is the monitor for how far it sits from the W psi = 0 manifold.
    """
    if len(traj.fields) < 3:
        raise ValueError("need at least 3 stored fields")
    k = traj.fields[0].constants
    out = []
    for i in range(1, len(traj.fields) - 1):
        prev, cur, nxt = traj.fields[i - 1], traj.fields[i], traj.fields[i + 1]
        dt = 0.5 * (nxt.x0 - prev.x0)
        dpsi = (nxt.values - prev.values) / (2.0 * dt)
        h_psi = _apply_generator(cur, a, cur.kappa, rep).values
        res = 1j * k.hbar * k.c * dpsi - h_psi
        out.append(float(np.linalg.norm(res) / np.linalg.norm(cur.values)))
    return np.array(out)
