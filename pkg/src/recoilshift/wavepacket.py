"""Single Gaussian wave packets along the recoil axis.

A packet is the free evolution of a minimum-uncertainty Gaussian of waist
``waist`` released at ``t = 0`` from ``z_init`` with central velocity
``v_init``.  The momentum representation is

    <p|phi> = (2 waist^2 / (pi hbar^2))^(1/4) exp(-waist^2 (p - p_i)^2 / hbar^2)
              exp(-i (p z_i + p^2 t / 2M) / hbar)

and the position representation is its Fourier transform with kernel
``exp(i p z / hbar) / sqrt(2 pi hbar)``.  With that convention
``sigma_z(0) = waist`` and ``sigma_p = hbar / (2 waist)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import constants as const
from scipy.special import erf

HBAR = const.hbar
K_B = const.k
C_LIGHT = const.c


@dataclass(frozen=True)
class AtomSpecies:
    """Clock atom: mass in kg and transition angular frequency in rad/s."""

    mass: float
    omega_eg: float

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass!r}")
        if not self.omega_eg > 0:
            raise ValueError(f"omega_eg must be positive, got {self.omega_eg!r}")


CAESIUM = AtomSpecies(
    mass=132.905451933 * const.atomic_mass,
    omega_eg=2.0 * np.pi * 9_192_631_770.0,
)


@dataclass(frozen=True)
class PacketParams:
    waist: float
    z_init: float = 0.0
    v_init: float = 0.0

    def __post_init__(self):
        if not self.waist > 0:
            raise ValueError(f"waist must be positive, got {self.waist!r}")


def complex_width(species: AtomSpecies, waist: float, t):
    """``waist^2 + i hbar t / 2M``; the packet is ``exp(-x^2 / 4 s)``."""
    return waist * waist + 1j * HBAR * np.asarray(t, dtype=float) / (2.0 * species.mass)


def spread_sigma(species: AtomSpecies, packet: PacketParams, t):
    """rms width of ``|phi(t, z)|^2``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    dz = packet.waist
    return np.sqrt(dz * dz + (HBAR * t / (2.0 * species.mass * dz)) ** 2)


def eval_momentum(species: AtomSpecies, packet: PacketParams, t: float, p):
    if t < 0:
        raise ValueError("t must be non-negative")
    p = np.asarray(p, dtype=float)
    dz = packet.waist
    p_i = species.mass * packet.v_init
    norm = (2.0 * dz * dz / (np.pi * HBAR * HBAR)) ** 0.25
    gauss = np.exp(-(dz * (p - p_i) / HBAR) ** 2)
    phase = np.exp(-1j * (p * packet.z_init + p * p * t / (2.0 * species.mass)) / HBAR)
    return norm * gauss * phase


def eval_position(species: AtomSpecies, packet: PacketParams, t: float, z):
    """Position amplitude in 1/sqrt(m).

    Uses the Galilean form ``phi = exp(i p_i z / hbar) exp(-i (p_i z_i +
    p_i^2 t / 2M) / hbar) psi0(t, z - z_i - v_i t)`` where ``psi0`` is the
    zero-momentum packet centred at the origin.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    z = np.asarray(z, dtype=float)
    m = species.mass
    dz = packet.waist
    p_i = m * packet.v_init
    s = complex_width(species, dz, t)
    x = z - packet.z_init - packet.v_init * t
    psi0 = (2.0 * np.pi) ** -0.25 * np.sqrt(dz / s) * np.exp(-x * x / (4.0 * s))
    phase = np.exp(1j * (p_i * z - p_i * packet.z_init - p_i * p_i * t / (2.0 * m)) / HBAR)
    return phase * psi0


def _gaussian_moments(species, pA, pB, t, q):
    """Return (alpha, beta, gamma) with phi_A* phi_B e^{iqz} = exp(-alpha z^2 + beta z + gamma)."""
    m = species.mass
    dz = pA.waist
    s = complex_width(species, dz, t)
    sc = np.conj(s)
    cA = pA.z_init + pA.v_init * t
    cB = pB.z_init + pB.v_init * t
    kA = m * pA.v_init / HBAR
    kB = m * pB.v_init / HBAR
    thA = (kA * pA.z_init + m * pA.v_init**2 * t / (2.0 * HBAR))
    thB = (kB * pB.z_init + m * pB.v_init**2 * t / (2.0 * HBAR))
    alpha = 1.0 / (4.0 * s) + 1.0 / (4.0 * sc)
    beta = cB / (2.0 * s) + cA / (2.0 * sc) + 1j * (kB - kA + q)
    gamma = (
        -cB * cB / (4.0 * s)
        - cA * cA / (4.0 * sc)
        + 1j * (thA - thB)
        + np.log((2.0 * np.pi) ** -0.5 * dz / np.abs(s))
    )
    return alpha, beta, gamma


def overlap_with_plane_factor(species: AtomSpecies, pA: PacketParams, pB: PacketParams, t: float, q: float,
                              bounds: tuple[float, float] | None = None) -> complex:
    """Closed-form ``integral phi_A*(t,z) phi_B(t,z) exp(i q z) dz``.

    Both packets must share the same waist.  ``bounds=None`` integrates over
    the whole line; a finite ``(z1, z2)`` uses the complex error function.
    """
    if not np.isclose(pA.waist, pB.waist, rtol=1e-12, atol=0.0):
        raise ValueError("overlap requires packets with equal waist")
    # work about the packets' mean centre; far from the origin the exponents cancel badly
    ref = 0.5 * (pA.z_init + pB.z_init + (pA.v_init + pB.v_init) * t)
    pA = PacketParams(pA.waist, pA.z_init - ref, pA.v_init)
    pB = PacketParams(pB.waist, pB.z_init - ref, pB.v_init)
    if bounds is not None:
        bounds = (bounds[0] - ref, bounds[1] - ref)
    return complex(np.exp(1j * q * ref) * _overlap_centred(species, pA, pB, t, q, bounds))


def _overlap_centred(species, pA, pB, t, q, bounds):
    alpha, beta, gamma = _gaussian_moments(species, pA, pB, t, q)
    alpha = float(np.real(alpha))
    z0 = beta / (2.0 * alpha)
    log_peak = gamma + beta * beta / (4.0 * alpha)
    full = np.sqrt(np.pi / alpha)
    if bounds is None:
        return complex(np.exp(log_peak) * full)
    z1, z2 = bounds
    ra = np.sqrt(alpha)
    part = 0.5 * full * (erf(ra * (z2 - z0)) - erf(ra * (z1 - z0)))
    return complex(np.exp(log_peak) * part)
