"""Two-term quasi-frequency asymptotics for two-dimensional sloshing.

For a container whose free surface has length L and meets the walls at
interior angles alpha (corner A) and beta (corner B), the scaled
frequencies sigma_k = lambda_k approach an arithmetic lattice

    sigma_k * L = pi (k - 1/2) + phase(regime, alpha, beta),

where the phase depends only on the corner angles and the wall boundary
conditions.  This module evaluates those closed forms, the associated
remainder exponents, and the one-term Weyl counting estimate.

Everything here is exact double-precision arithmetic on explicit
formulas; no rounding or table lookup happens anywhere.
"""

import enum
import math
from dataclasses import dataclass

HALF_PI = math.pi / 2


class Regime(enum.Enum):
    """Wall condition regime at the two surface corners."""

    NEUMANN_NEUMANN = "nn"
    DIRICHLET_DIRICHLET = "dd"
    MIXED_DIRICHLET_A_NEUMANN_B = "mixed"
    HALFPI_NEUMANN = "halfpi-neumann"
    HALFPI_DIRICHLET = "halfpi-dirichlet"

    @classmethod
    def from_string(cls, name: str) -> "Regime":
        for member in cls:
            if member.value == name:
                return member
        valid = ", ".join(m.value for m in cls)
        raise ValueError(f"unknown regime {name!r}; expected one of: {valid}")


@dataclass(frozen=True)
class QuasiFrequencyModel:
    """Container geometry and wall conditions entering the two-term law.

    alpha and beta are the interior angles between the free surface and
    the walls at corners A and B.  For the mixed regime, alpha is the
    angle at the corner whose adjacent wall carries the Dirichlet
    condition (corner A by convention) and beta the Neumann one.  The
    half-pi regimes fix alpha = pi/2 exactly (a vertical wall at A, where
    the model solution is exact) and keep beta free.
    """

    regime: Regime
    alpha: float
    beta: float
    surface_length: float

    def __post_init__(self):
        if not (0.0 < self.alpha < math.pi) or not (0.0 < self.beta < math.pi):
            raise ValueError("corner angles must lie strictly between 0 and pi")
        if not self.surface_length > 0.0:
            raise ValueError("surface_length must be positive")
        if self.regime in (Regime.HALFPI_NEUMANN, Regime.HALFPI_DIRICHLET):
            if abs(self.alpha - HALF_PI) > 1e-15:
                raise ValueError("half-pi regimes require alpha = pi/2 exactly")

    @property
    def phase(self) -> float:
        """The k-independent phase shift added to pi (k - 1/2)."""
        a, b = self.alpha, self.beta
        quarter = math.pi**2 / 8.0
        if self.regime is Regime.NEUMANN_NEUMANN:
            return -quarter * (1.0 / a + 1.0 / b)
        if self.regime is Regime.DIRICHLET_DIRICHLET:
            return quarter * (1.0 / a + 1.0 / b)
        if self.regime is Regime.MIXED_DIRICHLET_A_NEUMANN_B:
            return quarter * (1.0 / a - 1.0 / b)
        if self.regime is Regime.HALFPI_NEUMANN:
            return -math.pi / 4.0 - math.pi**2 / (8.0 * b)
        if self.regime is Regime.HALFPI_DIRICHLET:
            return math.pi / 4.0 + math.pi**2 / (8.0 * b)
        raise AssertionError(f"unhandled regime {self.regime}")

    @property
    def conjectural(self) -> bool:
        """True when an angle exceeds pi/2, outside the proven range."""
        return max(self.alpha, self.beta) > HALF_PI + 1e-12


def quasi_frequency(model: QuasiFrequencyModel, k: int) -> float:
    """k-th quasi-frequency sigma_k (1-based)."""
    if k < 1 or int(k) != k:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    return (math.pi * (k - 0.5) + model.phase) / model.surface_length


def remainder_exponent(model: QuasiFrequencyModel):
    """Power-law exponent of sigma_k - quasi_frequency(k), or "exponential".

    The deviation from the lattice decays like k**exponent, driven by the
    wider corner; vertical Neumann walls contribute no algebraic term at
    all, so the fully vertical Neumann case decays exponentially.
    """
    a, b = model.alpha, model.beta
    tol = 1e-12
    if model.regime is Regime.NEUMANN_NEUMANN:
        if abs(a - HALF_PI) <= tol and abs(b - HALF_PI) <= tol:
            return "exponential"
        return 1.0 - math.pi / (2.0 * max(a, b))
    if model.regime is Regime.DIRICHLET_DIRICHLET:
        return 1.0 - math.pi / max(a, b)
    if model.regime is Regime.MIXED_DIRICHLET_A_NEUMANN_B:
        return 1.0 - math.pi / max(a, 2.0 * b)
    if model.regime is Regime.HALFPI_NEUMANN:
        if abs(b - HALF_PI) <= tol:
            return "exponential"
        return 1.0 - math.pi / (2.0 * b)
    if model.regime is Regime.HALFPI_DIRICHLET:
        return 1.0 - math.pi / b
    raise AssertionError(f"unhandled regime {model.regime}")


@dataclass(frozen=True)
class QuasiFrequencySequence:
    """Evaluated lattice sigma_1..sigma_kmax plus decay metadata."""

    model: QuasiFrequencyModel
    kmax: int
    remainder_exponent: object  # float or the string "exponential"

    def sigma(self, k: int) -> float:
        if not 1 <= k <= self.kmax:
            raise ValueError(f"k must lie in 1..{self.kmax}, got {k}")
        return quasi_frequency(self.model, k)

    @property
    def values(self):
        return [quasi_frequency(self.model, k) for k in range(1, self.kmax + 1)]


def quasi_frequency_sequence(model: QuasiFrequencyModel, kmax: int) -> QuasiFrequencySequence:
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    return QuasiFrequencySequence(model=model, kmax=kmax, remainder_exponent=remainder_exponent(model))


def weyl_count_estimate(lam: float, surface_length: float) -> float:
    """One-term Weyl law: expected number of eigenvalues at most lam."""
    if surface_length <= 0:
        raise ValueError("surface_length must be positive")
    return surface_length * lam / math.pi
