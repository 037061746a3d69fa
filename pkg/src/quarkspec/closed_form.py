"""Exactly solvable spectra used as oracles, and the OEA level formula."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import DomainError
from .numerov import FallToCenterError, NoBoundStateError


class SingularInputError(ValueError):
    pass


@dataclass(frozen=True)
class KratzerCoefficients:
    """Coefficients of ``psi'' + (B/r - A/r^2 - C) psi = 0``.

    ``W`` is the energy-independent part of ``C`` (``C = W - epsilon``) and
    ``delta`` the expansion point that produced the set.
    """

    A: float
    B: float
    W: float = 0.0
    delta: float = math.nan

    @property
    def lam(self) -> float:
        """Effective angular momentum: ``Lambda (Lambda + 1) = A``."""
        return 0.5 * (-1.0 + math.sqrt(1.0 + 4.0 * self.A))


@dataclass(frozen=True)
class OEAGammas:
    Gamma0: float
    Gamma1: float
    Gamma2: float


def _check_quantum_numbers(n_r, l=0):
    if n_r < 0 or l < 0 or int(n_r) != n_r or int(l) != l:
        raise DomainError("quantum numbers must be non-negative integers")


def coulomb_levels(k: float, mu: float, hbar: float, n_r: int, l: int) -> float:
    if k <= 0:
        raise DomainError(f"Coulomb strength must be positive, got {k}")
    _check_quantum_numbers(n_r, l)
    N = n_r + l + 1
    return -mu * k * k / (2.0 * hbar**2 * N * N)


def oscillator_levels(omega: float, hbar: float, n_r: int, l: int) -> float:
    if omega <= 0:
        raise DomainError(f"oscillator frequency must be positive, got {omega}")
    _check_quantum_numbers(n_r, l)
    return hbar * omega * (2 * n_r + l + 1.5)


def kratzer_levels(coeffs: KratzerCoefficients, n_r: int) -> float:
    """Eigen-constant ``C = B^2 / (4 (n_r + Lambda + 1)^2)``.

    ``C`` is the value for which the Kratzer equation admits a normalizable
    solution with ``n_r`` nodes.
    """
    if 1.0 + 4.0 * coeffs.A < 0:
        raise FallToCenterError(f"1 + 4A = {1 + 4 * coeffs.A:.6g} < 0: fall to the center")
    if coeffs.B <= 0:
        raise NoBoundStateError(f"B = {coeffs.B} <= 0: Kratzer potential is not attractive")
    _check_quantum_numbers(n_r)
    N = n_r + coeffs.lam + 1.0
    return coeffs.B**2 / (4.0 * N * N)


def oea_gammas(kratzer: KratzerCoefficients, c_s: float, mu: float, hbar: float) -> OEAGammas:
    """Parameters of the OEA level formula implied by a Kratzer reduction."""
    if 1.0 + 4.0 * kratzer.A < 0:
        raise FallToCenterError("1 + 4A < 0")
    scale = hbar**2 / (2.0 * mu)
    return OEAGammas(
        Gamma0=c_s + scale * kratzer.W,
        Gamma1=hbar**2 * kratzer.B / (2.0 * mu),
        Gamma2=0.5 * (1.0 + math.sqrt(1.0 + 4.0 * kratzer.A)),
    )


def oea_spectrum(gammas: OEAGammas, mu: float, hbar: float, n: int) -> float:
    """``Gamma0 - (mu / 2 hbar^2) (Gamma1 / (n + Gamma2))^2``; ``n`` counts radial nodes."""
    if n < 0:
        raise DomainError("n must be non-negative")
    denom = n + gammas.Gamma2
    if denom == 0:
        raise SingularInputError("n + Gamma2 = 0")
    return gammas.Gamma0 - mu / (2.0 * hbar**2) * (gammas.Gamma1 / denom) ** 2


def kratzer_energy(coeffs: KratzerCoefficients, mu: float, hbar: float, n_r: int) -> float:
    """Level of the potential ``(hbar^2/2mu)(A/r^2 - B/r)``: ``-(hbar^2/2mu) C``."""
    return -hbar**2 / (2.0 * mu) * kratzer_levels(coeffs, n_r)
