"""Relativistic Wigner-function toolkit.

Covariant classical dynamics of charged spin-1/2 particles (Hamiltonian and
Lorentz-rotor forms), closed-form free Dirac solutions, split-step propagation
of the spinorial Wigner function on an (X, Theta) grid with a tunable
quantumness parameter kappa, the kappa -> 0 Koopman-von Neumann-Dirac limit,
1D scalar quantum/classical solvers, and finite-dimensional operator-algebra
verification.

Conventions used throughout:
  * metric signature (+, -, -, -)
  * natural units hbar = c = m = 1 by default (all four constants configurable)
  * Dirac representation of the gamma matrices by default, Weyl behind a flag
"""

from .constants import PhysicalConstants
from .clifford import (
    METRIC_DIAG,
    FourVector,
    GammaRep,
    exp_hermitian,
    field_slash,
    gamma,
    gammas,
    hermitian_part,
    sigma_munu,
    slash,
    unslash,
)
from .potentials import FieldTensor, PotentialSpec, field_tensor_at
from .errors import ConfigError, NumericalAbort

__all__ = [
    "METRIC_DIAG",
    "ConfigError",
    "FieldTensor",
    "FourVector",
    "GammaRep",
    "NumericalAbort",
    "PhysicalConstants",
    "PotentialSpec",
    "exp_hermitian",
    "field_slash",
    "field_tensor_at",
    "gamma",
    "gammas",
    "hermitian_part",
    "sigma_munu",
    "slash",
    "unslash",
]

__version__ = "0.1.0"
