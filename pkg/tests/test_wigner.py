"""Phase-space propagator: generators, splitting, currents, classical limit."""

import numpy as np
import pytest

from relwigner.clifford import GammaRep, gammas
from relwigner.constants import PhysicalConstants
from relwigner.dirac import BranchLabel, branch_column, onshell_momentum
from relwigner.potentials import PotentialSpec
from relwigner.wigner import (
    CurrentGrid,
    SpinorField,
    XThetaGrid,
    classical_limit_deviation,
    constraint_residual,
    current_xp,
    current_xtheta,
    ehrenfest_check,
    free_packet_oracle,
    gaussian_packet,
    kvnd_apply,
    positive_energy_packet,
    potential_difference,
    propagate,
    validate_regime,
    wigner_hamiltonian_apply,
)

K = PhysicalConstants()
GRID = XThetaGrid(nx=64, ntheta=32, lx=40.0, ltheta=12.0)


def _plane_wave(grid, mode_index, spinor, kappa=1.0, k=K):
    kx = grid.kx[mode_index]
    vals = np.asarray(spinor, complex)[:, None, None] * np.exp(1j * kx * grid.x)[None, :, None]
    vals = np.repeat(vals, grid.ntheta, axis=2)
    return SpinorField(grid, vals, kappa, k)


def _l2(a, b):
    w = a.grid.dx * a.grid.dtheta
    return float(np.sqrt(np.sum(np.abs(a.values - b.values) ** 2) * w))


class TestGrid:
    def test_power_of_two_enforced(self):
        with pytest.raises(ValueError, match="power of two"):
            XThetaGrid(nx=48, ntheta=32, lx=10, ltheta=10)
        with pytest.raises(ValueError, match="power of two"):
            XThetaGrid(nx=64, ntheta=4, lx=10, ltheta=10)

    def test_spacings_and_theta_zero(self):
        g = XThetaGrid(nx=128, ntheta=64, lx=40.0, ltheta=16.0)
        assert g.dx == pytest.approx(40.0 / 128)
        assert g.theta[g.theta_zero_index] == pytest.approx(0.0, abs=1e-14)
        assert np.diff(g.p_grid)[0] == pytest.approx(2 * np.pi / g.ltheta, rel=1e-12)


class TestPotentialDifference:
    def test_linear_exact_and_kappa_independent(self):
        a = 0.43
        pot = PotentialSpec.polynomial({1: [0.0, a]})
        x, th = 1.3, 2.1
        for kappa in (1.0, 0.37, 1e-6):
            d = potential_difference(pot, x, th, kappa, K)
            assert float(d[1]) == pytest.approx(K.hbar * a * th, rel=1e-14)
            assert float(d[0]) == 0.0

    def test_quadratic_exact(self):
        a = -0.21
        pot = PotentialSpec.polynomial({1: [0.0, 0.0, a]})
        x, th, kappa = 0.8, -1.4, 0.6
        d = potential_difference(pot, x, th, kappa, K)
        assert float(d[1]) == pytest.approx(2.0 * a * K.hbar * x * th, rel=1e-14)

    def test_cubic_kappa_squared_witness(self):
        a = 0.17
        pot = PotentialSpec.polynomial({1: [0.0, 0.0, 0.0, a]})
        x, th = -0.9, 1.7
        for kappa in (0.5, 0.25):
            d = potential_difference(pot, x, th, kappa, K)
            expected = 3 * a * K.hbar * x**2 * th + a * K.hbar**3 * kappa**2 * th**3 / 4.0
            assert float(d[1]) == pytest.approx(expected, rel=1e-13)
            deviation = float(d[1]) - 3 * a * K.hbar * x**2 * th
            assert deviation == pytest.approx(a * K.hbar**3 * kappa**2 * th**3 / 4.0, rel=1e-10)

    def test_kappa_zero_rejected(self):
        with pytest.raises(ValueError, match="kvnd_apply"):
            potential_difference(PotentialSpec.zero(), 0.0, 0.0, 0.0, K)


class TestHamiltonianApply:
    def test_plane_wave_dispersion(self):
        # H acts as the 4x4 symbol; eigenvalues +-sqrt((c hbar k)^2 + (mc^2)^2) - c hbar k0
        grid = XThetaGrid(nx=64, ntheta=32, lx=40.0, ltheta=12.0, k0=0.3)
        mode = 5
        kx = grid.kx[mode]
        g = gammas(GammaRep.DIRAC)
        symbol = K.c * K.hbar * kx * (g[0] @ g[1]) + K.m * K.c**2 * g[0] - K.c * K.hbar * grid.k0 * np.eye(4)
        w, v = np.linalg.eigh(symbol)
        expected = np.sort(
            np.array([s * np.hypot(K.c * K.hbar * kx, K.m * K.c**2) - K.c * K.hbar * grid.k0 for s in (-1, -1, 1, 1)])
        )
        assert np.abs(np.sort(w) - expected).max() < 1e-12
        psi = _plane_wave(grid, mode, v[:, 3])
        h_psi = wigner_hamiltonian_apply(psi, PotentialSpec.zero(), kappa=1.0)
        assert np.abs(h_psi.values - w[3] * psi.values).max() < 1e-10

    def test_constant_field_mass_term(self):
        spinor = np.array([0.3, -0.1, 0.7, 0.2], complex)
        vals = np.repeat(np.repeat(spinor[:, None, None], GRID.nx, 1), GRID.ntheta, 2)
        psi = SpinorField(GRID, vals, 1.0, K)
        h_psi = wigner_hamiltonian_apply(psi, PotentialSpec.zero(), kappa=1.0)
        g0 = gammas(GammaRep.DIRAC)[0]
        expected = (K.m * K.c**2) * np.einsum("ab,bxt->axt", g0, vals)
        assert np.abs(h_psi.values - expected).max() < 1e-12

    def test_hermiticity_sine_potential(self):
        rng = np.random.default_rng(31)
        pot = PotentialSpec.sine(0.4, 2 * np.pi / GRID.lx * 3, component=0)
        f1 = SpinorField(GRID, rng.normal(size=(4, 64, 32)) + 1j * rng.normal(size=(4, 64, 32)), 1.0, K)
        f2 = SpinorField(GRID, rng.normal(size=(4, 64, 32)) + 1j * rng.normal(size=(4, 64, 32)), 1.0, K)
        w = GRID.dx * GRID.dtheta
        h2 = wigner_hamiltonian_apply(f2, pot, kappa=0.8).values
        h1 = wigner_hamiltonian_apply(f1, pot, kappa=0.8).values
        lhs = np.sum(f1.values.conj() * h2) * w
        rhs = np.sum(h1.conj() * f2.values) * w
        assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))

    def test_rejects_transverse_potential_components(self):
        psi = gaussian_packet(GRID, K, 0.0, 4.0, 0.5)
        with pytest.raises(ValueError, match="components A_0, A_1"):
            wigner_hamiltonian_apply(psi, PotentialSpec.constant_b(1.0), kappa=1.0)


class TestKvndApply:
    def test_zero_potential_matches_any_kappa(self):
        psi = gaussian_packet(GRID, K, 0.0, 4.0, 0.4)
        ref = kvnd_apply(psi, PotentialSpec.zero()).values
        for kappa in (1.0, 0.3):
            out = wigner_hamiltonian_apply(psi, PotentialSpec.zero(), kappa).values
            assert np.abs(out - ref).max() < 1e-12

    @pytest.mark.parametrize("coeffs", [[0.0, 0.37], [0.0, 0.0, -0.22]])
    def test_low_order_potentials_degenerate(self, coeffs):
        pot = PotentialSpec.polynomial({1: coeffs})
        psi = gaussian_packet(GRID, K, 0.0, 4.0, 0.4)
        ref = kvnd_apply(psi, pot).values
        for kappa in (1.0, 0.5, 0.05):
            out = wigner_hamiltonian_apply(psi, pot, kappa).values
            assert np.abs(out - ref).max() < 1e-11

    def test_cubic_generator_discrepancy_is_exact(self):
        a = 0.06
        pot = PotentialSpec.polynomial({1: [0.0, 0.0, 0.0, a]})
        psi = gaussian_packet(GRID, K, 0.0, 4.0, 0.4)
        kappa = 0.5
        diff = wigner_hamiltonian_apply(psi, pot, kappa).values - kvnd_apply(psi, pot).values
        alpha1 = gammas(GammaRep.DIRAC)[0] @ gammas(GammaRep.DIRAC)[1]
        theta = GRID.theta[None, None, :]
        coeff = -K.e * K.c * a * K.hbar**3 * kappa**2 * theta**3 / 4.0
        expected = coeff * np.einsum("ab,bxt->axt", alpha1, psi.values)
        assert np.abs(diff - expected).max() < 1e-12 * max(1.0, np.abs(expected).max())


class TestPropagate:
    def test_zero_steps_identity(self):
        psi = gaussian_packet(GRID, K, 0.0, 4.0, 0.5)
        traj = propagate(psi, PotentialSpec.zero(), 1.0, dx0=0.01, n_steps=0)
        assert traj.final is traj.initial
        assert np.abs(traj.final.values - psi.values).max() == 0.0

    def test_plane_wave_phase_exact(self):
        grid = XThetaGrid(nx=64, ntheta=32, lx=40.0, ltheta=12.0)
        mode = 3
        kx = grid.kx[mode]
        p = onshell_momentum((K.hbar * kx, 0, 0), K)
        spinor = branch_column(BranchLabel.PLUS_UP, p, K)
        psi = _plane_wave(grid, mode, spinor)
        omega = np.hypot(K.c * K.hbar * kx, K.m * K.c**2)
        n, dx0 = 25, 0.05
        # a plane wave is delocalized, so the leak monitor fires by design
        with pytest.warns(RuntimeWarning, match="X-boundary"):
            traj = propagate(psi, PotentialSpec.zero(), 1.0, dx0=dx0, n_steps=n)
        expected = psi.values * np.exp(-1j * omega * n * dx0 / (K.hbar * K.c))
        rel = np.abs(traj.final.values - expected).max() / np.abs(psi.values).max()
        assert rel < 1e-10

    def test_unitarity_drift(self):
        pot = PotentialSpec.sine(0.3, 2 * np.pi / GRID.lx * 2, component=0)
        psi = gaussian_packet(GRID, K, 0.0, 4.0, 0.5)
        traj = propagate(psi, pot, 1.0, dx0=0.02, n_steps=200)
        drift = np.abs(traj.observables.norm - traj.observables.norm[0]).max()
        assert drift / traj.observables.norm[0] < 1e-11

    def test_kappa_ordering_sine(self):
        pot = PotentialSpec.sine(0.4, 2 * np.pi / GRID.lx * 2, component=1)
        psi = gaussian_packet(GRID, K, 0.0, 4.0, 0.4)
        final_kvnd = propagate(psi, pot, 0.0, dx0=0.02, n_steps=100).final
        d1 = _l2(propagate(psi, pot, 1.0, dx0=0.02, n_steps=100).final, final_kvnd)
        d05 = _l2(propagate(psi, pot, 0.5, dx0=0.02, n_steps=100).final, final_kvnd)
        assert np.isfinite(d1) and np.isfinite(d05)
        assert d1 > d05 > 0.0

    def test_strang_second_order_sine(self):
        pot = PotentialSpec.sine(0.5, 2 * np.pi / GRID.lx * 2, component=0)
        psi = gaussian_packet(GRID, K, 0.0, 4.0, 0.5)
        t_final = 0.8
        ref = propagate(psi, pot, 1.0, dx0=t_final / 256, n_steps=256).final
        errs = []
        dts = [t_final / 16, t_final / 32, t_final / 64]
        for n in (16, 32, 64):
            fin = propagate(psi, pot, 1.0, dx0=t_final / n, n_steps=n).final
            errs.append(_l2(fin, ref))
        slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
        assert 1.8 <= slope <= 2.2

    def test_free_field_matches_dirac_superposition(self):
        grid = XThetaGrid(nx=128, ntheta=8, lx=60.0, ltheta=4.0)
        psi = positive_energy_packet(grid, K, x_center=-5.0, sigma_x=4.0, k_center=0.6)
        t_final = 4.0
        traj = propagate(psi, PotentialSpec.zero(), 1.0, dx0=t_final / 40, n_steps=40)
        oracle = free_packet_oracle(psi, t_final)
        assert _l2(traj.final, oracle) < 1e-10


class TestClassicalLimit:
    def test_linear_degeneracy(self):
        pot = PotentialSpec.polynomial({1: [0.0, 0.3]})
        psi = gaussian_packet(GRID, K, 0.0, 4.0, 0.4)
        devs, _ = classical_limit_deviation(psi, pot, [1.0, 0.5, 0.1], dx0=0.02, n_steps=60)
        assert max(d for _, d in devs) < 1e-12

    def test_cubic_kappa_squared_slope(self):
        pot = PotentialSpec.polynomial({1: [0.0, 0.0, 0.0, 0.01]})
        psi = gaussian_packet(GRID, K, 0.0, 4.0, 0.4)
        devs, slope = classical_limit_deviation(psi, pot, [0.2, 0.1, 0.05], dx0=0.02, n_steps=40)
        assert 1.8 <= slope <= 2.2
        values = [d for _, d in devs]
        assert values[0] > values[1] > values[2] > 0.0

    def test_sine_kappa_squared_slope(self):
        pot = PotentialSpec.sine(0.15, 2 * np.pi / GRID.lx * 2, component=1)
        psi = gaussian_packet(GRID, K, 0.0, 4.0, 0.4)
        _, slope = classical_limit_deviation(psi, pot, [0.2, 0.1, 0.05], dx0=0.02, n_steps=40)
        assert 1.8 <= slope <= 2.2

    def test_requires_descending_positive_list(self):
        psi = gaussian_packet(GRID, K, 0.0, 4.0, 0.4)
        with pytest.raises(ValueError, match="descending"):
            classical_limit_deviation(psi, PotentialSpec.zero(), [0.1, 0.2], 0.01, 1)
        with pytest.raises(ValueError, match="positive"):
            classical_limit_deviation(psi, PotentialSpec.zero(), [0.1, 0.0], 0.01, 1)


class TestCurrents:
    def test_rest_spinor_node(self):
        vals = np.zeros((4, GRID.nx, GRID.ntheta), complex)
        vals[0, 10, GRID.theta_zero_index] = 1.0
        psi = SpinorField(GRID, vals, 1.0, K)
        cur = current_xtheta(psi)
        g = gammas(GammaRep.DIRAC)
        node = cur.matrix[10, GRID.theta_zero_index]
        assert np.abs(node - np.outer(vals[:, 10, GRID.theta_zero_index], vals[:, 10, GRID.theta_zero_index].conj()) @ g[0]).max() < 1e-14
        assert cur.components[0, 10, GRID.theta_zero_index].real == pytest.approx(1.0, rel=1e-13)

    def test_zero_field_zero_current(self):
        psi = SpinorField(GRID, np.zeros((4, GRID.nx, GRID.ntheta), complex), 1.0, K)
        cur = current_xtheta(psi)
        assert np.abs(cur.components).max() == 0.0

    def test_j0_nonnegative_on_diagonal_slice(self):
        psi = gaussian_packet(GRID, K, 0.0, 4.0, 0.6, theta_profile="gaussian", sigma_theta=2.0)
        cur = current_xtheta(psi)
        j0_slice = cur.components[0, :, GRID.theta_zero_index]
        assert np.abs(j0_slice.imag).max() < 1e-14
        assert j0_slice.real.min() >= -1e-15

    def test_theta_independent_concentrates_at_p_zero(self):
        psi = positive_energy_packet(GRID, K, 0.0, 4.0, 0.5)
        cur = current_xp(psi)
        p0_idx = GRID.ntheta // 2
        assert np.abs(cur.axis_values[p0_idx]) < 1e-14
        others = np.delete(np.abs(cur.components[0]), p0_idx, axis=1)
        assert others.max() < 1e-10 * np.abs(cur.components[0][:, p0_idx]).max()

    def test_gaussian_theta_profile_transforms_to_gaussian_p(self):
        sigma_theta = 1.2
        grid = XThetaGrid(nx=32, ntheta=128, lx=20.0, ltheta=24.0)
        psi = gaussian_packet(grid, K, 0.0, 3.0, 0.0, theta_profile="gaussian", sigma_theta=sigma_theta)
        cur = current_xp(psi)
        ix = grid.nx // 2
        p = cur.axis_values
        j0 = cur.components[0, ix].real
        center = grid.ntheta // 2
        # |g(theta)|^2 has width sigma_theta/sqrt(2); its transform is
        # proportional to exp(-p^2 sigma_theta^2 / 4)
        for offset in (3, 6, 9):
            expected = j0[center] * np.exp(-(p[center + offset] ** 2) * sigma_theta**2 / 4.0)
            assert j0[center + offset] == pytest.approx(expected, rel=1e-6)

    def test_parseval_fixed_convention(self):
        psi = gaussian_packet(GRID, K, 0.0, 4.0, 0.5, theta_profile="gaussian", sigma_theta=2.0)
        cur_t = current_xtheta(psi)
        cur_p = current_xp(psi)
        dp = 2 * np.pi / GRID.ltheta
        lhs = np.sum(np.abs(cur_p.components) ** 2) * dp
        rhs = 2 * np.pi * np.sum(np.abs(cur_t.components) ** 2) * GRID.dtheta
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestRegimeAndEhrenfest:
    def test_localization_warning(self):
        assert any("localization" in w for w in validate_regime(0.5, 0.0, K))

    def test_safe_packet_no_warnings(self):
        assert validate_regime(5.0, 0.1, K) == []

    def test_pair_creation_warning(self):
        threshold = 2.0 * K.rest_energy / K.compton_wavelength
        assert any("pair-creation" in w for w in validate_regime(5.0, threshold * 1.1, K))

    def test_positive_energy_packet_residual(self):
        grid = XThetaGrid(nx=128, ntheta=8, lx=60.0, ltheta=4.0)
        psi = positive_energy_packet(grid, K, -3.0, 4.0, 0.6)
        traj = propagate(psi, PotentialSpec.zero(), 1.0, dx0=0.05, n_steps=20)
        res = ehrenfest_check(traj, K)
        assert res.max() < 1e-8
        # both sides sit at the packet's group velocity
        vg = K.c * traj.observables.mean_alpha1[1]
        assert 0.0 < vg < K.c

    def test_rest_packet_both_sides_vanish(self):
        psi = gaussian_packet(GRID, K, 0.0, 4.0, 0.0, spinor=np.array([1, 0, 0, 0], complex))
        traj = propagate(psi, PotentialSpec.zero(), 1.0, dx0=0.02, n_steps=10)
        res = ehrenfest_check(traj, K)
        assert res.max() < 1e-10
        assert np.abs(traj.observables.mean_alpha1).max() < 1e-12

    def test_gaussian_packet_residual_second_order_in_dt(self):
        psi = gaussian_packet(GRID, K, 0.0, 4.0, 0.5)
        res = []
        for dx0, n in ((0.08, 10), (0.04, 20)):
            traj = propagate(psi, PotentialSpec.zero(), 1.0, dx0=dx0, n_steps=n)
            res.append(ehrenfest_check(traj, K).max())
        ratio = res[0] / res[1]
        assert 2.5 < ratio < 6.0

    def test_discrete_continuity_order(self):
        rms = []
        for nx, n_steps in ((64, 16), (128, 32)):
            grid = XThetaGrid(nx=nx, ntheta=8, lx=60.0, ltheta=4.0)
            psi = positive_energy_packet(grid, K, -3.0, 5.0, 0.5)
            dx0 = 1.6 / n_steps
            traj = propagate(psi, PotentialSpec.zero(), 1.0, dx0=dx0, n_steps=n_steps, store_every=1)
            j0 = np.array([current_xtheta(f).components[0, :, grid.theta_zero_index].real for f in traj.fields])
            j1 = np.array([current_xtheta(f).components[1, :, grid.theta_zero_index].real for f in traj.fields])
            dt_j0 = (j0[2:] - j0[:-2]) / (2 * dx0) / K.c  # d/dX^0 = (1/c) d/dt
            dx_j1 = (np.roll(j1, -1, axis=1) - np.roll(j1, 1, axis=1))[1:-1] / (2 * grid.dx)
            rms.append(float(np.sqrt(np.mean((dt_j0 + dx_j1) ** 2))))
        order = np.log2(rms[0] / rms[1])
        assert order >= 1.8

    def test_constraint_residual_small_for_fine_steps(self):
        psi = gaussian_packet(GRID, K, 0.0, 4.0, 0.4)
        pot = PotentialSpec.sine(0.2, 2 * np.pi / GRID.lx, component=0)
        traj = propagate(psi, pot, 1.0, dx0=0.01, n_steps=20, store_every=1)
        res = constraint_residual(traj, pot)
        assert res.max() < 1e-2
        traj2 = propagate(psi, pot, 1.0, dx0=0.005, n_steps=40, store_every=1)
        res2 = constraint_residual(traj2, pot)
        assert res2.max() < res.max()
