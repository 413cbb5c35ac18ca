"""Covariant classical dynamics of a charged particle.

Three equivalent formulations are implemented and cross-checked:

  * Newton/Lorentz force   m du_mu/ds = e F_{mu nu} u^nu
  * extended-phase-space Hamilton equations for (X^mu, P_mu)
  * Lorentz-rotor equations dX-slash/ds = c L L^dag gamma^0,
    dL/ds = (e/2) F-slash L

The evolution parameter is proper time s throughout; lab time is recovered
afterwards through u^0 = c dt/ds.  Both integrators are fixed-step classical
RK4; conservation (mass shell, extended Hamiltonian, rotor constraint) is
monitored, not enforced, except for an on-demand polar-type projection of the
rotor back to the constraint manifold when its drift exceeds 1e-10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .clifford import (
    METRIC_DIAG,
    ArrayC,
    ArrayR,
    FourVector,
    GammaRep,
    field_slash,
    gamma,
    gammas,
    slash,
    unslash,
)
from .constants import PhysicalConstants
from .errors import NumericalAbort
from .potentials import FieldTensor, PotentialSpec, field_tensor_at

ROTOR_CORRECT_THRESHOLD = 1e-10
ROTOR_ABORT_THRESHOLD = 1e-4


@dataclass(frozen=True)
class PhasePoint:
    """Extended-phase-space state: parameter s, position X^mu, momentum P_mu."""

    s: float
    x: FourVector
    p: FourVector

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", self.x.raised())
        object.__setattr__(self, "p", self.p.lowered())


@dataclass(frozen=True)
class RotorState:
    """Position plus Lorentz rotor L (constraint L^-1 = gamma^0 L^dag gamma^0)."""

    s: float
    x: FourVector
    rotor: ArrayC

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", self.x.raised())
        object.__setattr__(self, "rotor", np.asarray(self.rotor, dtype=complex))


def extended_hamiltonian(point: PhasePoint, a: PotentialSpec, k: PhysicalConstants) -> float:
    """H = (P - eA).(P - eA) / (2m) - m c^2 / 2; zero on the mass shell."""
    pi_lower = point.p.lower - k.e * a.lower_components(point.x)
    pi2 = float((METRIC_DIAG * pi_lower) @ pi_lower)
    return pi2 / (2.0 * k.m) - 0.5 * k.m * k.c**2


def hamilton_rhs(
    point: PhasePoint, a: PotentialSpec, k: PhysicalConstants
) -> tuple[FourVector, FourVector]:
    """Right-hand sides dX^mu/ds and dP_mu/ds of the Hamilton equations."""
    dx, dp = _hamilton_rhs_arrays(point.x.upper, point.p.lower, a, k)
    return FourVector(dx, "upper"), FourVector(dp, "lower")


def _potential_evaluator(a: PotentialSpec):
    """Scalar-fast closure x1 -> (A_mu(x1), dA_mu/dx1) as 4-tuples of floats.

    The RK4 loop spends most of its time here, so this avoids numpy
    overhead on length-4 arrays.
    """
    if a.kind == "sine":
        amp, freq, comp = a.params["a"], a.params["b"], a.params["component"]

        def evaluate(x1: float):
            val = [0.0, 0.0, 0.0, 0.0]
            der = [0.0, 0.0, 0.0, 0.0]
            val[comp] = amp * math.sin(freq * x1)
            der[comp] = amp * freq * math.cos(freq * x1)
            return val, der

        return evaluate

    table = a._poly_table()
    coeffs = [list(table.get(mu, ())) for mu in range(4)]
    dcoeffs = [[k * c[k] for k in range(1, len(c))] for c in coeffs]

    def evaluate(x1: float):
        val = [0.0, 0.0, 0.0, 0.0]
        der = [0.0, 0.0, 0.0, 0.0]
        for mu in range(4):
            acc = 0.0
            for c in reversed(coeffs[mu]):
                acc = acc * x1 + c
            val[mu] = acc
            acc = 0.0
            for c in reversed(dcoeffs[mu]):
                acc = acc * x1 + c
            der[mu] = acc
        return val, der

    return evaluate


def _rhs_scalar(x1: float, p_low, evaluate, e: float, m: float):
    """Hamilton right-hand sides as plain floats: (dx_up, dp1)."""
    a_low, da1 = evaluate(x1)
    pi0 = p_low[0] - e * a_low[0]
    pi1 = -(p_low[1] - e * a_low[1])
    pi2 = -(p_low[2] - e * a_low[2])
    pi3 = -(p_low[3] - e * a_low[3])
    dp1 = e / m * (da1[0] * pi0 + da1[1] * pi1 + da1[2] * pi2 + da1[3] * pi3)
    return (pi0 / m, pi1 / m, pi2 / m, pi3 / m), dp1


def _hamilton_rhs_arrays(
    x_up: ArrayR, p_low: ArrayR, a: PotentialSpec, k: PhysicalConstants
) -> tuple[ArrayR, ArrayR]:
    dx, dp1 = _rhs_scalar(float(x_up[1]), p_low, _potential_evaluator(a), k.e, k.m)
    dp = np.zeros(4)
    dp[1] = dp1
    return np.array(dx), dp


def proper_velocity(point: PhasePoint, a: PotentialSpec, k: PhysicalConstants) -> FourVector:
    """u^mu = (P^mu - e A^mu) / m at a phase point."""
    dx, _ = hamilton_rhs(point, a, k)
    return dx


@dataclass(frozen=True)
class TrajectoryRecord:
    """Hamiltonian trajectory samples plus monitored invariants."""

    s: ArrayR
    x: ArrayR  # (n+1, 4) upper components
    p: ArrayR  # (n+1, 4) lower components
    hamiltonian: ArrayR
    uu: ArrayR  # u.u along the trajectory
    rotor: ArrayC | None = None  # (n+1, 4, 4) for rotor runs

    @property
    def hamiltonian_drift(self) -> float:
        return float(np.abs(self.hamiltonian - self.hamiltonian[0]).max())

    def csv_rows(self) -> list[list[float]]:
        rows = []
        for i in range(len(self.s)):
            row = [self.s[i], *self.x[i], *self.p[i], self.hamiltonian[i], self.uu[i]]
            if self.rotor is not None:
                flat = self.rotor[i].reshape(-1)
                for z in flat:
                    row.extend((z.real, z.imag))
            rows.append(row)
        return rows

    @staticmethod
    def csv_header(with_rotor: bool = False) -> list[str]:
        header = ["s", "X0", "X1", "X2", "X3", "P0", "P1", "P2", "P3", "H", "uu"]
        if with_rotor:
            for i in range(4):
                for j in range(4):
                    header.extend((f"L{i}{j}_re", f"L{i}{j}_im"))
        return header


def integrate_hamiltonian(
    start: PhasePoint,
    a: PotentialSpec,
    k: PhysicalConstants,
    ds: float,
    n_steps: int,
) -> TrajectoryRecord:
    """Fixed-step RK4 integration of the extended Hamilton equations."""
    if ds <= 0.0:
        raise ValueError(f"ds must be positive, got {ds}")
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")

    s = np.empty(n_steps + 1)
    xs = np.empty((n_steps + 1, 4))
    ps = np.empty((n_steps + 1, 4))
    s[0] = start.s
    xs[0] = start.x.upper
    ps[0] = start.p.lower

    evaluate = _potential_evaluator(a)
    e, m = k.e, k.m
    x = tuple(float(v) for v in xs[0])
    p = tuple(float(v) for v in ps[0])
    sixth = ds / 6.0
    isfinite = np.isfinite
    for i in range(n_steps):
        kx1, kp1 = _rhs_scalar(x[1], p, evaluate, e, m)
        p_mid1 = (p[0], p[1] + 0.5 * ds * kp1, p[2], p[3])
        kx2, kp2 = _rhs_scalar(x[1] + 0.5 * ds * kx1[1], p_mid1, evaluate, e, m)
        p_mid2 = (p[0], p[1] + 0.5 * ds * kp2, p[2], p[3])
        kx3, kp3 = _rhs_scalar(x[1] + 0.5 * ds * kx2[1], p_mid2, evaluate, e, m)
        p_end = (p[0], p[1] + ds * kp3, p[2], p[3])
        kx4, kp4 = _rhs_scalar(x[1] + ds * kx3[1], p_end, evaluate, e, m)
        x = tuple(
            x[j] + sixth * (kx1[j] + 2.0 * kx2[j] + 2.0 * kx3[j] + kx4[j]) for j in range(4)
        )
        p = (p[0], p[1] + sixth * (kp1 + 2.0 * kp2 + 2.0 * kp3 + kp4), p[2], p[3])
        if not (isfinite(x).all() and isfinite(p).all()):
            raise NumericalAbort(f"non-finite state at step {i + 1} (s = {s[i] + ds:.6g})")
        s[i + 1] = start.s + (i + 1) * ds
        xs[i + 1] = x
        ps[i + 1] = p

    h, uu = _invariants_along(xs, ps, a, k)
    return TrajectoryRecord(s, xs, ps, h, uu)


def _invariants_along(xs: ArrayR, ps: ArrayR, a: PotentialSpec, k: PhysicalConstants):
    """Vectorized extended Hamiltonian and u.u along a trajectory."""
    x1 = xs[:, 1]
    a_low = np.stack([np.asarray(a.component(mu, x1)) for mu in range(4)], axis=1)
    pi_low = ps - k.e * a_low
    pi_up = pi_low * METRIC_DIAG[None, :]
    pi2 = np.einsum("ij,ij->i", pi_up, pi_low)
    h = pi2 / (2.0 * k.m) - 0.5 * k.m * k.c**2
    uu = pi2 / k.m**2
    return h, uu


# -- Lorentz rotors and classical spinors ----------------------------------


def boost_from_velocity(
    u: FourVector, k: PhysicalConstants, rep: GammaRep = GammaRep.DIRAC, rtol: float = 1e-8
) -> ArrayC:
    """Hermitian boost B = (u-slash gamma^0 / c + 1) / sqrt(2 (gamma + 1)).

    Requires u on the mass shell (u.u = c^2) with positive u^0; then
    B^2 gamma^0 = u-slash / c.
    """
    c2 = k.c**2
    if abs(u.norm2() - c2) > rtol * c2:
        raise ValueError(f"velocity is off shell: u.u = {u.norm2():.6g}, expected {c2:.6g}")
    gamma_factor = u.upper[0] / k.c
    if gamma_factor <= 0.0:
        raise ValueError(f"boost requires u^0 > 0, got u^0 = {u.upper[0]:.6g}")
    us = slash(u, rep)
    return (us @ gamma(rep, 0) / k.c + np.eye(4)) / np.sqrt(2.0 * (gamma_factor + 1.0))


def rotor_rhs(rotor: ArrayC, f_slashed: ArrayC, k: PhysicalConstants) -> ArrayC:
    """dL/ds = (e/2) F-slash L."""
    return 0.5 * k.e * f_slashed @ rotor


def projector(rep: GammaRep = GammaRep.DIRAC) -> ArrayC:
    """Rank-1 projector P = (1 + gamma^0)(1 + i gamma^1 gamma^2) / 4.

    Equals diag(1, 0, 0, 0) in the Dirac representation.
    """
    one = np.eye(4, dtype=complex)
    g = gammas(rep)
    return 0.25 * (one + g[0]) @ (one + 1j * g[1] @ g[2])


def projector_vector(rep: GammaRep = GammaRep.DIRAC) -> ArrayC:
    """Unit vector v spanning the range of :func:`projector` (P = v v^dag).

    In the Dirac representation v = (1, 0, 0, 0)^T, so L @ v is the leftmost
    column of the rotor.
    """
    p = projector(rep)
    w, vecs = np.linalg.eigh(p)
    v = vecs[:, np.argmax(w)]
    # fix the overall phase: largest-magnitude entry real positive
    pivot = v[np.argmax(np.abs(v))]
    return v * (abs(pivot) / pivot)


def spinor_from_rotor(rotor: ArrayC, rep: GammaRep = GammaRep.DIRAC) -> ArrayC:
    """Classical column spinor Psi = L v (leftmost column in the Dirac rep)."""
    return rotor @ projector_vector(rep)


def velocity_from_spinor(
    psi: ArrayC, k: PhysicalConstants, rep: GammaRep = GammaRep.DIRAC
) -> FourVector:
    """u^mu = Psi^dag c gamma^0 gamma^mu Psi."""
    g = gammas(rep)
    comp = np.array([(psi.conj() @ (g[0] @ g[mu] @ psi)).real for mu in range(4)])
    return FourVector(k.c * comp, "upper")


def rotor_constraint_error(rotor: ArrayC, rep: GammaRep = GammaRep.DIRAC) -> float:
    """Frobenius deviation of gamma^0 L^dag gamma^0 L from the identity."""
    g0 = gamma(rep, 0)
    return float(np.linalg.norm(g0 @ rotor.conj().T @ g0 @ rotor - np.eye(4)))


def _correct_rotor(rotor: ArrayC, rep: GammaRep) -> ArrayC:
    """One Newton step toward the constraint manifold, then renormalize det."""
    g0 = gamma(rep, 0)
    c = g0 @ rotor.conj().T @ g0 @ rotor
    rotor = rotor @ (1.5 * np.eye(4) - 0.5 * c)
    det = np.linalg.det(rotor)
    return rotor / det**0.25


def integrate_rotor(
    start: RotorState,
    a: PotentialSpec,
    k: PhysicalConstants,
    ds: float,
    n_steps: int,
    rep: GammaRep = GammaRep.DIRAC,
) -> TrajectoryRecord:
    """Co-integrate (X, L) with RK4; aborts if the rotor constraint blows up."""
    if ds <= 0.0:
        raise ValueError(f"ds must be positive, got {ds}")
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    err0 = rotor_constraint_error(start.rotor, rep)
    if err0 > 1e-8:
        raise ValueError(f"initial rotor violates the constraint by {err0:.3e}")

    g0 = gamma(rep, 0)

    def rhs(x_up: ArrayR, rotor: ArrayC) -> tuple[ArrayR, ArrayC]:
        f = field_tensor_at(a, FourVector(x_up, "upper"))
        fs = field_slash(f.f_lower, rep)
        m_cur = k.c * rotor @ rotor.conj().T @ g0
        dx = np.einsum("ij,mji->m", m_cur, gammas(rep)).real / 4.0
        return dx, rotor_rhs(rotor, fs, k)

    s = np.empty(n_steps + 1)
    xs = np.empty((n_steps + 1, 4))
    rotors = np.empty((n_steps + 1, 4, 4), dtype=complex)
    s[0] = start.s
    xs[0] = start.x.upper
    rotors[0] = start.rotor

    x, rot = xs[0].copy(), rotors[0].copy()
    for i in range(n_steps):
        kx1, kl1 = rhs(x, rot)
        kx2, kl2 = rhs(x + 0.5 * ds * kx1, rot + 0.5 * ds * kl1)
        kx3, kl3 = rhs(x + 0.5 * ds * kx2, rot + 0.5 * ds * kl2)
        kx4, kl4 = rhs(x + ds * kx3, rot + ds * kl3)
        x = x + ds / 6.0 * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4)
        rot = rot + ds / 6.0 * (kl1 + 2.0 * kl2 + 2.0 * kl3 + kl4)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(rot))):
            raise NumericalAbort(f"non-finite rotor state at step {i + 1}")
        err = rotor_constraint_error(rot, rep)
        if err > ROTOR_ABORT_THRESHOLD:
            raise NumericalAbort(
                f"rotor constraint drift {err:.3e} exceeds {ROTOR_ABORT_THRESHOLD:.1e} "
                f"at step {i + 1} (s = {s[i] + ds:.6g})"
            )
        if err > ROTOR_CORRECT_THRESHOLD:
            rot = _correct_rotor(rot, rep)
        s[i + 1] = start.s + (i + 1) * ds
        xs[i + 1] = x
        rotors[i + 1] = rot

    # derived momentum P_mu = m u_mu + e A_mu and invariants, vectorized
    current = k.c * np.einsum("nij,nkj->nik", rotors, rotors.conj()) @ g0
    u_up = np.einsum("nij,mji->nm", current, gammas(rep)).real / 4.0
    u_low = u_up * METRIC_DIAG[None, :]
    a_low = np.stack([np.asarray(a.component(mu, xs[:, 1])) for mu in range(4)], axis=1)
    ps = k.m * u_low + k.e * a_low
    uu = np.einsum("ij,ij->i", u_up, u_low)
    h = k.m * (uu - k.c**2) / 2.0
    return TrajectoryRecord(s, xs, ps, h, uu, rotor=rotors)
