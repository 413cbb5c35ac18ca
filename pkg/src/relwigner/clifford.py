"""Gamma-matrix algebra, slash calculus and small Hermitian-matrix utilities.

Matrices are plain ``numpy`` arrays of shape (4, 4) and dtype complex128.
The metric is fixed to diag(+1, -1, -1, -1); all index raising and lowering
is centralized in :class:`FourVector`.

Two gamma representations are provided,

    Dirac:  gamma^0 = sigma_3 x 1,   gamma^j = i sigma_2 x sigma_j
    Weyl:   gamma^0 = sigma_1 x 1,   gamma^j = i sigma_2 x sigma_j

both satisfying {gamma^mu, gamma^nu} = 2 g^{mu nu} 1, (gamma^0)^dag = gamma^0,
(gamma^k)^dag = -gamma^k and gamma^mu = (gamma_mu)^(-1).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

ArrayC = NDArray[np.complex128]
ArrayR = NDArray[np.float64]

METRIC_DIAG: ArrayR = np.array([1.0, -1.0, -1.0, -1.0])

# span-of-{gamma_mu} membership is decided at this relative tolerance
SPAN_RTOL = 1e-10

_SIGMA = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)
_EYE2 = np.eye(2, dtype=complex)


class GammaRep(enum.Enum):
    """Gamma-matrix representation selector."""

    DIRAC = "dirac"
    WEYL = "weyl"


def _build_gammas(rep: GammaRep) -> ArrayC:
    g0 = np.kron(_SIGMA[2] if rep is GammaRep.DIRAC else _SIGMA[0], _EYE2)
    spatial = [np.kron(1j * _SIGMA[1], s) for s in _SIGMA]
    out = np.stack([g0, *spatial])
    out.setflags(write=False)
    return out


_GAMMAS = {rep: _build_gammas(rep) for rep in GammaRep}


def gammas(rep: GammaRep = GammaRep.DIRAC) -> ArrayC:
    """All four upper-index gamma matrices, stacked along axis 0."""
    return _GAMMAS[rep]


def gamma(rep: GammaRep, mu: int) -> ArrayC:
    """The upper-index matrix gamma^mu of the given representation."""
    if mu not in (0, 1, 2, 3):
        raise IndexError(f"gamma index must be in 0..3, got {mu}")
    return _GAMMAS[rep][mu]


def gamma_lower(rep: GammaRep, mu: int) -> ArrayC:
    """gamma_mu = g_{mu mu} gamma^mu (diagonal metric, no sum)."""
    return METRIC_DIAG[mu] * gamma(rep, mu)


def _build_sigmas(rep: GammaRep) -> ArrayC:
    g = _GAMMAS[rep]
    out = np.zeros((4, 4, 4, 4), dtype=complex)
    for mu in range(4):
        for nu in range(4):
            out[mu, nu] = 0.5 * (g[mu] @ g[nu] - g[nu] @ g[mu])
    out.setflags(write=False)
    return out


_SIGMAS = {rep: _build_sigmas(rep) for rep in GammaRep}


def sigma_munu(rep: GammaRep, mu: int, nu: int) -> ArrayC:
    """Lorentz generator sigma^{mu nu} = [gamma^mu, gamma^nu] / 2."""
    return _SIGMAS[rep][mu, nu]


def rep_transform(rep_from: GammaRep, rep_to: GammaRep) -> ArrayC:
    """Unitary S with gamma_to^mu = S gamma_from^mu S^dag.

    Dirac -> Weyl is the block form (1/sqrt2) [[1, -1], [1, 1]] (x) 1.
    """
    if rep_from is rep_to:
        return np.eye(4, dtype=complex)
    s = np.kron(np.array([[1.0, -1.0], [1.0, 1.0]], dtype=complex), _EYE2) / np.sqrt(2.0)
    if rep_from is GammaRep.DIRAC:  # Dirac -> Weyl
        return s
    return s.conj().T


@dataclass(frozen=True)
class FourVector:
    """Real four-vector with an explicit index variance.

    ``components`` always stores the numbers as given for the declared
    variance; conversion between variances applies the diagonal metric.
    """

    components: ArrayR
    variance: str = "upper"  # "upper" (v^mu) or "lower" (v_mu)

    def __post_init__(self) -> None:
        comp = np.asarray(self.components, dtype=float)
        if comp.shape != (4,):
            raise ValueError(f"four-vector needs 4 components, got shape {comp.shape}")
        if self.variance not in ("upper", "lower"):
            raise ValueError(f"variance must be 'upper' or 'lower', got {self.variance!r}")
        object.__setattr__(self, "components", comp)

    @property
    def upper(self) -> ArrayR:
        if self.variance == "upper":
            return self.components
        return METRIC_DIAG * self.components

    @property
    def lower(self) -> ArrayR:
        if self.variance == "lower":
            return self.components
        return METRIC_DIAG * self.components

    def raised(self) -> "FourVector":
        return FourVector(self.upper, "upper")

    def lowered(self) -> "FourVector":
        return FourVector(self.lower, "lower")

    def dot(self, other: "FourVector") -> float:
        """Minkowski inner product v . w = v^mu w_mu."""
        return float(self.upper @ other.lower)

    def norm2(self) -> float:
        return self.dot(self)

    def __add__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.components + other.with_variance(self.variance).components, self.variance)

    def __sub__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.components - other.with_variance(self.variance).components, self.variance)

    def __mul__(self, scalar: float) -> "FourVector":
        return FourVector(self.components * scalar, self.variance)

    __rmul__ = __mul__

    def with_variance(self, variance: str) -> "FourVector":
        return self.raised() if variance == "upper" else self.lowered()


def slash(v: FourVector, rep: GammaRep = GammaRep.DIRAC) -> ArrayC:
    """Feynman slash v^mu gamma_mu = v_mu gamma^mu."""
    return np.tensordot(v.lower, _GAMMAS[rep], axes=(0, 0))


def unslash(m: ArrayC, rep: GammaRep = GammaRep.DIRAC, check: bool = True) -> FourVector:
    """Invert :func:`slash`: component mu is Tr(M gamma^mu) / 4.

    Raises ``ValueError`` when M does not lie in span{gamma_mu}, i.e. when
    the reconstruction residual exceeds ``SPAN_RTOL`` relative to ||M||.
    """
    comp = np.einsum("ij,mji->m", m, _GAMMAS[rep]).real / 4.0
    if check:
        rebuilt = np.tensordot(METRIC_DIAG * comp, _GAMMAS[rep], axes=(0, 0))
        norm = np.linalg.norm(m)
        residual = np.linalg.norm(m - rebuilt)
        if residual > SPAN_RTOL * max(norm, 1.0):
            raise ValueError(
                f"not-a-vector: matrix is not in span{{gamma_mu}} "
                f"(residual {residual:.3e}, norm {norm:.3e})"
            )
    return FourVector(comp, "upper")


def hermitian_part(m: ArrayC) -> ArrayC:
    """<M>_H = (M + M^dag) / 2."""
    return 0.5 * (m + m.conj().T)


def field_slash(f_lower: ArrayR, rep: GammaRep = GammaRep.DIRAC, atol: float = 1e-12) -> ArrayC:
    """Slashed field tensor F-slash = sigma^{mu nu} F_{mu nu} / 2.

    ``f_lower`` is the antisymmetric covariant tensor F_{mu nu}.
    """
    f = np.asarray(f_lower, dtype=float)
    if f.shape != (4, 4):
        raise ValueError(f"field tensor must be 4x4, got {f.shape}")
    if np.abs(f + f.T).max() > atol * max(1.0, np.abs(f).max()):
        raise ValueError("field tensor must be antisymmetric")
    return 0.5 * np.einsum("mn,mnij->ij", f, _SIGMAS[rep])


def exp_hermitian(h: ArrayC, t: float, atol: float = 1e-10) -> ArrayC:
    """Unitary exp(-i t H) of a Hermitian matrix via eigendecomposition.

    Works on a single matrix or on a stacked batch of shape (..., n, n).
    """
    h = np.asarray(h, dtype=complex)
    hermiticity = np.abs(h - np.swapaxes(h, -1, -2).conj()).max()
    if hermiticity > atol * max(1.0, np.abs(h).max()):
        raise ValueError(f"matrix is not Hermitian (deviation {hermiticity:.3e})")
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * t * w)
    return np.einsum("...ik,...k,...jk->...ij", v, phases, v.conj())
