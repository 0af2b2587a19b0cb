"""Closed-form weak-field results for gaussian pulses.

Every interference term is returned summed over its two recoil branches
(``+-``), with the common proportionality constant set to 1; shifts and
envelope ratios do not depend on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import FountainTiming
from .ensemble import EnsembleSpec
from .wavepacket import AtomSpecies, C_LIGHT, HBAR, K_B


class DegenerateEnvelopes(ArithmeticError):
    pass


def recoil_constants(species: AtomSpecies, k: float):
    """``(v_r, delta, free_space_fraction)`` for wave number ``k``."""
    if not k > 0:
        raise ValueError("k must be positive")
    m = species.mass
    v_r = HBAR * k / m
    delta = HBAR * k * k / (2.0 * m)
    frac = HBAR * species.omega_eg / (2.0 * m * C_LIGHT**2)
    return v_r, delta, frac


@dataclass(frozen=True)
class WeakFieldInputs:
    spec: EnsembleSpec
    timing: FountainTiming
    tau: float
    detuning: float = 0.0
    omega0: float = 0.0

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")

    @property
    def delta_recoil(self) -> float:
        return HBAR * self.timing.k**2 / (2.0 * self.spec.species.mass)

    @property
    def a_param(self) -> float:
        return self.spec.a_param


def first_order_amplitudes(inputs: WeakFieldInputs, pulse_index, z_i, v_i, sign) -> complex:
    """``e_{+-1}`` after the first pulse or ``e_{+-1}^{-+1}`` after the second, from ``g_0^0 = 1``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    tm = inputs.timing
    if pulse_index == "first":
        tj = tm.T_b
    elif pulse_index == "second":
        tj = tm.T_b + tm.T
    else:
        raise ValueError("pulse_index must be 'first' or 'second'")
    k, tau, det = tm.k, inputs.tau, inputs.detuning
    off = det - sign * k * v_i
    mag = np.sqrt(np.pi / 2.0) * inputs.omega0 * tau / 4.0 * np.exp(-off * off * tau * tau / 8.0)
    phase = -det * tj + sign * k * z_i + sign * k * v_i * tj
    return complex(-1j * mag * np.exp(1j * phase))


def _packet_visibility(spec, timing):
    m = spec.species.mass
    return HBAR**2 * timing.k**2 / (8.0 * m * m * spec.waist**2)


def single_packet_terms(inputs: WeakFieldInputs, z_i, v_i):
    """Co- and counter-propagating interference for one packet ``(z_i, v_i)``."""
    tm, spec = inputs.timing, inputs.spec
    k, tau, det, T = tm.k, inputs.tau, inputs.detuning, tm.T
    d = inputs.delta_recoil
    m = spec.species.mass
    vis = np.exp(-_packet_visibility(spec, tm) * T * T)
    co = 0.0
    counter = 0.0
    cenv = np.exp(-(det * det + k * k * v_i * v_i) * tau * tau / 4.0) * np.exp(
        -2.0 * spec.waist**2 * k * k
        - HBAR**2 * k * k * (tm.T_b + T / 2.0) ** 2 / (2.0 * m * m * spec.waist**2)
    )
    for s in (1, -1):
        off = det - s * k * v_i
        co += np.exp(-off * off * tau * tau / 4.0) * vis * np.cos(-s * k * v_i * T + det * T - d * T)
        counter += cenv * np.cos(s * (2 * k * z_i + 2 * k * v_i * tm.T_b + k * v_i * T) + det * T + d * T)
    return float(co), float(counter)


def velocity_averaged_terms(inputs: WeakFieldInputs, z_i, detuning=None):
    """Terms averaged over central velocities only, without expanding in ``k^2 tau^2 / 4a``."""
    a = inputs.a_param
    if not np.isfinite(a):
        raise ValueError("velocity average needs a finite a_param (waist above delta_waist)")
    tm = inputs.timing
    det = inputs.detuning if detuning is None else detuning
    k, tau, T = tm.k, inputs.tau, tm.T
    d = inputs.delta_recoil
    m = inputs.spec.species.mass
    wz = inputs.spec.waist
    den = 4.0 * a + k * k * tau * tau
    vis = np.exp(-_packet_visibility(inputs.spec, tm) * T * T)
    co_one = (np.exp(-(k * k * T * T + a * det * det * tau * tau) / den) * vis
              * np.cos(-k * k * det * T * tau * tau / den + det * T - d * T))
    cenv = (np.exp(-det * det * tau * tau / 4.0) * np.exp(-k * k * (2 * tm.T_b + T) ** 2 / den)
            * np.exp(-2.0 * wz * wz * k * k
                     - HBAR**2 * k * k * (tm.T_b + T / 2.0) ** 2 / (2.0 * m * m * wz * wz)))
    counter = sum(cenv * np.cos(s * 2 * k * z_i + det * T + d * T) for s in (1, -1))
    return float(2.0 * co_one), float(counter)


def expanded_velocity_terms(inputs: WeakFieldInputs, z_i, detuning=None):
    """Leading order of ``velocity_averaged_terms`` in ``k^2 tau^2 / 4a``."""
    tm, spec = inputs.timing, inputs.spec
    det = inputs.detuning if detuning is None else detuning
    k, tau, T = tm.k, inputs.tau, tm.T
    d = inputs.delta_recoil
    th = k * k * K_B * spec.theta / (2.0 * spec.species.mass)
    env = np.exp(-det * det * tau * tau / 4.0)
    co = 2.0 * env * np.exp(-th * T * T) * np.cos(det * T - d * T)
    cenv = env * np.exp(-2.0 * spec.waist**2 * k * k - th * (2 * tm.T_b + T) ** 2)
    counter = sum(cenv * np.cos(s * 2 * k * z_i + det * T + d * T) for s in (1, -1))
    return float(co), float(counter)


def envelopes(spec, timing):
    """Detuning-independent envelopes ``(A, B)`` of the ensemble terms."""
    k = timing.k
    th = k * k * K_B * spec.theta / (2.0 * spec.species.mass)
    A = np.exp(-th * timing.T**2)
    B = np.exp(-2.0 * spec.w**2 * k * k - th * (2 * timing.T_b + timing.T) ** 2)
    return float(A), float(B)


def ensemble_terms(inputs: WeakFieldInputs, detuning=None):
    """Fully averaged co- and counter-propagating terms; independent of the waist."""
    tm = inputs.timing
    det = inputs.detuning if detuning is None else detuning
    A, B = envelopes(inputs.spec, tm)
    env = 2.0 * np.exp(-det * det * inputs.tau**2 / 4.0)
    d = inputs.delta_recoil
    return (float(env * A * np.cos(det * tm.T - d * tm.T)),
            float(env * B * np.cos(det * tm.T + d * tm.T)))


def cancellation_factor(spec, timing) -> float:
    """``exp[-2 w^2 k^2 - 2 k^2 k_B theta T_b (T_b + T) / M]``; 1 means full cancellation."""
    k = timing.k
    return float(np.exp(-2.0 * spec.w**2 * k * k
                        - 2.0 * k * k * K_B * spec.theta * timing.T_b * (timing.T_b + timing.T)
                        / spec.species.mass))


def shift_from_envelopes(A, B, delta, T, omega_eg) -> float:
    """Extremum of ``A cos(dT - delta T) + B cos(dT + delta T)`` as a fraction of ``omega_eg``."""
    if not A + B > 0:
        raise DegenerateEnvelopes(f"A + B = {A + B:.3g} must be positive")
    d_star = np.arctan((A - B) / (A + B) * np.tan(delta * T)) / T
    return float(d_star / omega_eg)


def predicted_shift(inputs: WeakFieldInputs) -> float:
    A, B = envelopes(inputs.spec, inputs.timing)
    return shift_from_envelopes(A, B, inputs.delta_recoil, inputs.timing.T,
                                inputs.spec.species.omega_eg)


def classical_ramsey_phase(detuning, k, species: AtomSpecies, L, v_x):
    """``(detuning - hbar k^2 / 2M) L / v_x``."""
    if not v_x > 0:
        raise ValueError("v_x must be positive")
    return (detuning - HBAR * k * k / (2.0 * species.mass)) * L / v_x
