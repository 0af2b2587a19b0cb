"""Statistical mixture of Gaussian packets describing the atom cloud.

The cloud is fixed by the measured temperature ``theta`` and initial width
``w``; the packet waist is a free parameter restricted to
``hbar^2 / (4 M k_B theta) <= waist^2 <= w^2``.  Central momenta and initial
centres are Gaussian with variances ``M k_B theta - hbar^2 / (4 waist^2)`` and
``w^2 - waist^2`` so that, convolved with a single packet, they reproduce the
measured marginals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .wavepacket import AtomSpecies, CAESIUM, HBAR, K_B

# relative slack when testing the waist bounds
_BOUND_RTOL = 1e-9


class DegenerateDistribution(ValueError):
    """A weight density collapsed to a delta; use the delta-limit path."""


class InvalidAperture(ValueError):
    pass


@dataclass(frozen=True)
class EnsembleSpec:
    theta: float
    w: float
    waist: float
    species: AtomSpecies = CAESIUM

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta!r}")
        if not self.w > 0:
            raise ValueError(f"w must be positive, got {self.w!r}")
        if not self.waist > 0:
            raise ValueError(f"waist must be positive, got {self.waist!r}")
        lo = HBAR**2 / (4.0 * self.species.mass * K_B * self.theta)
        w2 = self.waist**2
        if w2 < lo * (1.0 - _BOUND_RTOL) or w2 > self.w**2 * (1.0 + _BOUND_RTOL):
            raise ValueError(
                "waist constraint violated: need hbar^2/(4 M k_B theta) <= waist^2 <= w^2 "
                f"(waist={self.waist:.6g} m, min={np.sqrt(lo):.6g} m, w={self.w:.6g} m)"
            )

    @property
    def momentum_variance(self) -> float:
        """Variance of the central momenta, clipped at zero."""
        scale = self.species.mass * K_B * self.theta
        var = scale - HBAR**2 / (4.0 * self.waist**2)
        return var if var > scale * _BOUND_RTOL else 0.0

    @property
    def position_variance(self) -> float:
        var = self.w**2 - self.waist**2
        return var if var > self.w**2 * _BOUND_RTOL else 0.0

    @property
    def a_param(self) -> float:
        """``M^2 / (2 M k_B theta - hbar^2 / (2 waist^2))`` in s^2/m^2 (inf at the delta limit)."""
        var = 2.0 * self.momentum_variance
        return np.inf if var == 0.0 else self.species.mass**2 / var


def delta_waist(species: AtomSpecies, theta: float) -> float:
    """Waist at which the central-velocity distribution is a delta at 0."""
    if not theta > 0:
        raise ValueError("theta must be positive")
    return HBAR / (2.0 * np.sqrt(K_B * theta * species.mass))


def momentum_weight(spec: EnsembleSpec, species: AtomSpecies, p_i):
    """Normalized density of the packets' central momenta."""
    m = species.mass
    denom = 2.0 * m * K_B * spec.theta - HBAR**2 / (2.0 * spec.waist**2)
    if denom <= 2.0 * m * K_B * spec.theta * _BOUND_RTOL:
        raise DegenerateDistribution("momentum weight is a delta at p_i = 0 for this waist")
    p_i = np.asarray(p_i, dtype=float)
    return np.exp(-p_i * p_i / denom) / np.sqrt(np.pi * denom)


def position_weight(spec: EnsembleSpec, z_i):
    var = spec.w**2 - spec.waist**2
    if var <= spec.w**2 * _BOUND_RTOL:
        raise DegenerateDistribution("position weight is a delta at z_i = 0 for this waist")
    z_i = np.asarray(z_i, dtype=float)
    return np.exp(-z_i * z_i / (2.0 * var)) / np.sqrt(2.0 * np.pi * var)


def marginal_momentum(spec: EnsembleSpec, species: AtomSpecies, p):
    var = species.mass * K_B * spec.theta
    p = np.asarray(p, dtype=float)
    return np.exp(-p * p / (2.0 * var)) / np.sqrt(2.0 * np.pi * var)


def marginal_position(spec: EnsembleSpec, z):
    z = np.asarray(z, dtype=float)
    return np.exp(-z * z / (2.0 * spec.w**2)) / np.sqrt(2.0 * np.pi * spec.w**2)


def sample_positions(spec: EnsembleSpec, count: int, aperture: float) -> list[float]:
    """Stratified initial centres from the truncated position weight.

    Midpoint quantiles ``(j + 0.5) / count`` of the Gaussian of variance
    ``w^2 - waist^2`` restricted to ``[-aperture, aperture]``; ascending.
    A pure state (``waist == w``) returns ``count`` zeros.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if not aperture > 0:
        raise InvalidAperture(f"aperture must be positive, got {aperture!r}")
    sigma = np.sqrt(spec.position_variance)
    if sigma == 0.0:
        return [0.0] * count
    # symmetric quantiles; lower tail mirrored to keep the list exactly odd
    lo = norm.cdf(-aperture / sigma) if np.isfinite(aperture) else 0.0
    u = (np.arange(count) + 0.5) / count
    half = count // 2
    tail = lo + (1.0 - u[count - half:]) * (1.0 - 2.0 * lo)
    upper = sigma * norm.isf(tail)
    mid = [0.0] if count % 2 else []
    return [float(-x) for x in upper[::-1]] + mid + [float(x) for x in upper]
