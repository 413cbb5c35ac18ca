"""Finite-dimensional checks of the operator-commutator calculus.

The canonical pair is realized by the truncated harmonic-oscillator ladder:
x = sqrt(hbar/2)(a + a^dag), p = i sqrt(hbar/2)(a^dag - a) on an N-state
basis.  The commutator [x, p] equals i hbar exactly on the span of the
lowest N-1 states; the truncation defect is confined to the top state,
where [x, p] |N-1> = -i hbar (N-1) |N-1>.  Every residual below is
therefore measured on test vectors supported on the lowest N/2 states,
where products of up to four ladder factors cannot reach the defect.

Verified here:
  * the derivative form of commutators with Weyl-symmetrized monomials,
        [x, W(x^a p^b)] =  i hbar dW/dp,
        [p, W(x^a p^b)] = -i hbar dW/dx,      a + b <= 4;
  * the extended two-factor algebra X, P, Lambda, Theta with
        [X, P] = 0, [X, Lambda] = -i, [P, Theta] = -i, [Lambda, Theta] = 0,
    the composite pair x = X - (hbar kappa/2) Theta,
    p = P + (hbar kappa/2) Lambda with [x, p] = -i hbar kappa,
    and the mirror pair x' = x + hbar kappa Theta,
    p' = p - hbar kappa Lambda with [x', p'] = +i hbar kappa and all four
    cross-commutators with (x, p) vanishing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .clifford import ArrayC

DEGREE_CAP = 4


@dataclass(frozen=True)
class TruncatedPair:
    """Truncated-oscillator position and momentum matrices."""

    n: int
    hbar: float
    x: ArrayC
    p: ArrayC

    @property
    def low_dim(self) -> int:
        return self.n // 2


def build_truncated_pair(n: int, hbar: float = 1.0) -> TruncatedPair:
    """Hermitian x, p with [x, p] = i hbar on the lowest N-1 states."""
    if n < 8:
        raise ValueError(f"need n >= 8, got {n}")
    ladder = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
    x = np.sqrt(hbar / 2.0) * (ladder + ladder.conj().T)
    p = 1j * np.sqrt(hbar / 2.0) * (ladder.conj().T - ladder)
    return TruncatedPair(n, hbar, x, p)


def low_subspace_vectors(n: int, count: int, seed: int = 0) -> ArrayC:
    """Unit test vectors supported on the lowest n//2 basis states."""
    rng = np.random.default_rng(seed)
    out = np.zeros((count, n), dtype=complex)
    half = n // 2
    out[:, :half] = rng.normal(size=(count, half)) + 1j * rng.normal(size=(count, half))
    out /= np.linalg.norm(out, axis=1)[:, None]
    return out


def weyl_monomial(pair: TruncatedPair, a: int, b: int) -> ArrayC:
    """Weyl-symmetrized monomial W(x^a p^b): the average over all orderings."""
    if a < 0 or b < 0 or a + b > DEGREE_CAP:
        raise ValueError(f"need 0 <= a+b <= {DEGREE_CAP}, got a={a}, b={b}")
    if a + b == 0:
        return np.eye(pair.n, dtype=complex)
    orderings = set(itertools.permutations("x" * a + "p" * b))
    out = np.zeros((pair.n, pair.n), dtype=complex)
    for word in orderings:
        m = np.eye(pair.n, dtype=complex)
        for letter in word:
            m = m @ (pair.x if letter == "x" else pair.p)
        out += m
    return out / len(orderings)


def weyl_commutator_check(pair: TruncatedPair, a: int, b: int, n_vectors: int = 8) -> dict:
    """Residuals of both derivative identities for the monomial x^a p^b.

    Returns ``{"x": res_x, "p": res_p}`` with res_x the worst
    ||([x, W] - i hbar b W(x^a p^{b-1})) v|| over low-subspace vectors v,
    and res_p the analogue for [p, W] + i hbar a W(x^{a-1} p^b).
    """
    f = weyl_monomial(pair, a, b)
    hbar = pair.hbar
    df_dp = hbar * b * weyl_monomial(pair, a, b - 1) if b > 0 else np.zeros_like(f)
    df_dx = hbar * a * weyl_monomial(pair, a - 1, b) if a > 0 else np.zeros_like(f)
    op_x = (pair.x @ f - f @ pair.x) - 1j * df_dp
    op_p = (pair.p @ f - f @ pair.p) + 1j * df_dx
    vs = low_subspace_vectors(pair.n, n_vectors, seed=a * 7 + b)
    res_x = max(float(np.linalg.norm(op_x @ v)) for v in vs)
    res_p = max(float(np.linalg.norm(op_p @ v)) for v in vs)
    return {"x": res_x, "p": res_p}


@dataclass(frozen=True)
class ExtendedQuad:
    """Classical-algebra operators on the tensor product of two pairs."""

    n: int  # per-factor dimension; total space dimension n*n
    hbar: float
    kappa: float
    x_op: ArrayC  # X-hat
    p_op: ArrayC  # P-hat
    lam_op: ArrayC  # Lambda-hat
    theta_op: ArrayC  # Theta-hat

    def composite_pair(self) -> tuple[ArrayC, ArrayC]:
        """x = X - (hbar kappa / 2) Theta, p = P + (hbar kappa / 2) Lambda."""
        half = 0.5 * self.hbar * self.kappa
        return self.x_op - half * self.theta_op, self.p_op + half * self.lam_op

    def mirror_pair(self) -> tuple[ArrayC, ArrayC]:
        """x' = x + hbar kappa Theta, p' = p - hbar kappa Lambda."""
        x, p = self.composite_pair()
        return x + self.hbar * self.kappa * self.theta_op, p - self.hbar * self.kappa * self.lam_op


def build_extended_quad(n: int, kappa: float, hbar: float = 1.0) -> ExtendedQuad:
    """Tensor-product realization of [X, Lambda] = -i, [P, Theta] = -i.

    X and P live on separate factors (so they commute exactly); the
    conjugates are Lambda = -p_1/hbar x 1 and Theta = 1 x (-p_2/hbar).
    """
    pair = build_truncated_pair(n, hbar)
    eye = np.eye(n, dtype=complex)
    x_op = np.kron(pair.x, eye)
    p_op = np.kron(eye, pair.x)
    lam_op = np.kron(-pair.p / hbar, eye)
    theta_op = np.kron(eye, -pair.p / hbar)
    return ExtendedQuad(n, hbar, float(kappa), x_op, p_op, lam_op, theta_op)


def _low_quad_vectors(n: int, count: int, seed: int = 1) -> ArrayC:
    """Vectors supported on the lowest n//2 states of both factors."""
    rng = np.random.default_rng(seed)
    half = n // 2
    out = np.zeros((count, n, n), dtype=complex)
    out[:, :half, :half] = rng.normal(size=(count, half, half)) + 1j * rng.normal(
        size=(count, half, half)
    )
    out = out.reshape(count, n * n)
    out /= np.linalg.norm(out, axis=1)[:, None]
    return out


def _comm_apply(a: ArrayC, b: ArrayC, v: ArrayC) -> ArrayC:
    return a @ (b @ v) - b @ (a @ v)


def extended_algebra_check(quad: ExtendedQuad, n_vectors: int = 6) -> dict[str, float]:
    """Low-subspace residuals of the extended and mirror commutators.

    Keys: ``base`` ([x, p] + i hbar kappa), ``mirror`` ([x', p'] - i hbar
    kappa), and the four cross-commutators ``cross_xx``, ``cross_xp``,
    ``cross_px``, ``cross_pp`` (all expected to vanish).
    """
    if not 0.0 <= quad.kappa <= 1.0:
        raise ValueError(f"kappa must lie in [0, 1], got {quad.kappa}")
    x, p = quad.composite_pair()
    xm, pm = quad.mirror_pair()
    hk = quad.hbar * quad.kappa
    vs = _low_quad_vectors(quad.n, n_vectors)
    out = {key: 0.0 for key in ("base", "mirror", "cross_xx", "cross_xp", "cross_px", "cross_pp")}
    for v in vs:
        out["base"] = max(out["base"], float(np.linalg.norm(_comm_apply(x, p, v) + 1j * hk * v)))
        out["mirror"] = max(
            out["mirror"], float(np.linalg.norm(_comm_apply(xm, pm, v) - 1j * hk * v))
        )
        out["cross_xx"] = max(out["cross_xx"], float(np.linalg.norm(_comm_apply(xm, x, v))))
        out["cross_xp"] = max(out["cross_xp"], float(np.linalg.norm(_comm_apply(xm, p, v))))
        out["cross_px"] = max(out["cross_px"], float(np.linalg.norm(_comm_apply(pm, x, v))))
        out["cross_pp"] = max(out["cross_pp"], float(np.linalg.norm(_comm_apply(pm, p, v))))
    return out


def full_report(n: int, kappas: list[float], hbar: float = 1.0) -> list[tuple[str, str, int, float]]:
    """Rows (check, kappa, degree, residual) for the operator-check export.

    Theorem-1 rows carry an empty kappa field; algebra rows carry an empty
    degree field (encoded as -1 and rendered blank by the writer).
    """
    pair = build_truncated_pair(n, hbar)
    rows: list[tuple[str, str, int, float]] = []
    for a in range(DEGREE_CAP + 1):
        for b in range(DEGREE_CAP + 1 - a):
            if a + b == 0:
                continue
            res = weyl_commutator_check(pair, a, b)
            rows.append((f"xp-derivative:x{a}p{b}", "", a + b, res["x"]))
            rows.append((f"px-derivative:x{a}p{b}", "", a + b, res["p"]))
    for kappa in kappas:
        quad = build_extended_quad(n, kappa, hbar)
        res = extended_algebra_check(quad)
        for key, value in res.items():
            rows.append((f"algebra:{key}", f"{kappa:g}", -1, value))
    return rows
