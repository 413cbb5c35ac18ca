"""Analytic four-potentials with closed-form derivatives.

Every member of the family depends on the spatial coordinate X^1 only, which
is what the 1+1 dimensional solvers require; trajectories still live in the
full four-dimensional space.  Components are stored and returned with lower
indices (A_mu), matching the canonical momentum P_mu.

The available shapes:

    ConstantE(e0)           A_0 = -e0 X^1          =>  F_01 = e0
    ConstantB(b0)           A_2 =  b0 X^1          =>  F_12 = b0
    Sine(a, b, component)   A_c =  a sin(b X^1)
    Polynomial(coeffs)      A_c =  sum_k coeffs[c][k] (X^1)^k

``centered_difference`` evaluates A_mu(x + h) - A_mu(x - h) in closed form
(odd-power binomial expansion for polynomials, a product formula for the
sine), which avoids the catastrophic cancellation of naive evaluation when
h is small.  The kappa -> 0 degeneracy checks rely on this.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .clifford import FourVector

ArrayR = NDArray[np.float64]

_BINOM = [[1], [1, 1], [1, 2, 1], [1, 3, 3, 1], [1, 4, 6, 4, 1], [1, 5, 10, 10, 5, 1]]


def _binom(n: int, k: int) -> float:
    if n < len(_BINOM):
        return float(_BINOM[n][k])
    import math

    return float(math.comb(n, k))


@dataclass(frozen=True)
class PotentialSpec:
    """Four-potential A_mu(X^1) from a parametric family.

    ``kind`` is one of ``"zero"``, ``"constant_e"``, ``"constant_b"``,
    ``"sine"``, ``"polynomial"``.  Use the classmethod constructors.
    """

    kind: str
    params: dict = field(default_factory=dict)

    @classmethod
    def zero(cls) -> "PotentialSpec":
        return cls("zero", {})

    @classmethod
    def constant_e(cls, e0: float) -> "PotentialSpec":
        return cls("constant_e", {"e0": float(e0)})

    @classmethod
    def constant_b(cls, b0: float) -> "PotentialSpec":
        return cls("constant_b", {"b0": float(b0)})

    @classmethod
    def sine(cls, a: float, b: float, component: int = 0) -> "PotentialSpec":
        if component not in (0, 1, 2, 3):
            raise ValueError(f"component must be in 0..3, got {component}")
        return cls("sine", {"a": float(a), "b": float(b), "component": int(component)})

    @classmethod
    def polynomial(cls, coeffs: dict[int, list[float]] | list[list[float]]) -> "PotentialSpec":
        """``coeffs[mu]`` are the X^1-monomial coefficients of A_mu."""
        if isinstance(coeffs, dict):
            table = {int(mu): [float(c) for c in cs] for mu, cs in coeffs.items()}
        else:
            table = {mu: [float(c) for c in cs] for mu, cs in enumerate(coeffs)}
        for mu in table:
            if mu not in (0, 1, 2, 3):
                raise ValueError(f"polynomial component index out of range: {mu}")
        return cls("polynomial", {"coeffs": table})

    # -- closed forms ------------------------------------------------------

    def _poly_table(self) -> dict[int, list[float]]:
        if self.kind == "zero":
            return {}
        if self.kind == "constant_e":
            return {0: [0.0, -self.params["e0"]]}
        if self.kind == "constant_b":
            return {2: [0.0, self.params["b0"]]}
        if self.kind == "polynomial":
            return self.params["coeffs"]
        raise KeyError(self.kind)

    def component(self, mu: int, x1: ArrayR | float):
        """A_mu evaluated at spatial coordinate(s) x1."""
        x1 = np.asarray(x1, dtype=float)
        if self.kind == "sine":
            if mu != self.params["component"]:
                return np.zeros_like(x1)
            return self.params["a"] * np.sin(self.params["b"] * x1)
        coeffs = self._poly_table().get(mu)
        if not coeffs:
            return np.zeros_like(x1)
        out = np.zeros_like(x1)
        for k in reversed(range(len(coeffs))):
            out = out * x1 + coeffs[k]
        return out

    def dcomponent_dx1(self, mu: int, x1: ArrayR | float):
        """dA_mu / dX^1 evaluated at x1 (the only nonvanishing derivative)."""
        x1 = np.asarray(x1, dtype=float)
        if self.kind == "sine":
            if mu != self.params["component"]:
                return np.zeros_like(x1)
            a, b = self.params["a"], self.params["b"]
            return a * b * np.cos(b * x1)
        coeffs = self._poly_table().get(mu)
        if not coeffs or len(coeffs) < 2:
            return np.zeros_like(x1)
        out = np.zeros_like(x1)
        for k in reversed(range(1, len(coeffs))):
            out = out * x1 + k * coeffs[k]
        return out

    def centered_difference(self, mu: int, x1: ArrayR | float, h: ArrayR | float):
        """A_mu(x1 + h) - A_mu(x1 - h) without subtractive cancellation."""
        x1 = np.asarray(x1, dtype=float)
        h = np.asarray(h, dtype=float)
        if self.kind == "sine":
            if mu != self.params["component"]:
                return np.zeros(np.broadcast(x1, h).shape)
            a, b = self.params["a"], self.params["b"]
            return 2.0 * a * np.cos(b * x1) * np.sin(b * h)
        coeffs = self._poly_table().get(mu)
        if not coeffs:
            return np.zeros(np.broadcast(x1, h).shape)
        # (x+h)^k - (x-h)^k = 2 sum_{j odd} C(k,j) x^(k-j) h^j
        out = np.zeros(np.broadcast(x1, h).shape)
        for k, c in enumerate(coeffs):
            if c == 0.0:
                continue
            for j in range(1, k + 1, 2):
                out = out + 2.0 * c * _binom(k, j) * x1 ** (k - j) * h**j
        return out

    def lower_components(self, x: FourVector) -> ArrayR:
        """A_mu(x) as a length-4 array of lower components."""
        x1 = x.upper[1]
        return np.array([float(self.component(mu, x1)) for mu in range(4)])

    def gradient(self, x: FourVector) -> ArrayR:
        """partial_nu A_mu as a 4x4 array indexed [nu, mu]."""
        x1 = x.upper[1]
        grad = np.zeros((4, 4))
        for mu in range(4):
            grad[1, mu] = float(self.dcomponent_dx1(mu, x1))
        return grad

    def depends_only_on_x1(self) -> bool:
        return True

    def spatial_components_23(self) -> bool:
        """True when A_2 or A_3 can be nonzero (unsupported on the XTheta grid)."""
        if self.kind == "constant_b":
            return True
        if self.kind == "sine":
            return self.params["component"] in (2, 3)
        if self.kind == "polynomial":
            return any(mu in (2, 3) and any(c != 0.0 for c in cs) for mu, cs in self.params["coeffs"].items())
        return False


@dataclass(frozen=True)
class FieldTensor:
    """Antisymmetric covariant field tensor F_{mu nu}."""

    f_lower: ArrayR

    def __post_init__(self) -> None:
        f = np.asarray(self.f_lower, dtype=float)
        if f.shape != (4, 4):
            raise ValueError(f"field tensor must be 4x4, got shape {f.shape}")
        if np.abs(f + f.T).max() > 1e-12 * max(1.0, np.abs(f).max()):
            raise ValueError("field tensor must be antisymmetric")
        object.__setattr__(self, "f_lower", f)


def field_tensor_at(a: PotentialSpec, x: FourVector) -> FieldTensor:
    """F_{mu nu} = partial_mu A_nu - partial_nu A_mu from closed-form derivatives."""
    grad = a.gradient(x)
    return FieldTensor(grad - grad.T)
