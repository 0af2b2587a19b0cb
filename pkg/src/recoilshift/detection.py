"""Detection probabilities, ensemble averaging and fringe-centre extraction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .dynamics import AmplitudeLadder, FountainTiming, plane_wave_probabilities, run_sequence
from .ensemble import sample_positions
from .quadrature import QuadratureFailure, integrate
from .wavepacket import AtomSpecies, complex_width, spread_sigma, PacketParams

# the integration window is clipped to the packet cluster +- this many sigma
CLIP_SIGMAS = 8.0

__all__ = [
    "DetectionRegion", "FringePoint", "Tolerances", "ScenarioResult", "QuadratureFailure",
    "NoConvergence", "DegenerateCurvature", "packet_center", "detect_probability",
    "detect_both", "fringe_point", "ensemble_observables", "contrast", "locate_extremum",
    "extract_shift", "run_scenario",
]


class NoConvergence(RuntimeError):
    pass


class DegenerateCurvature(ArithmeticError):
    """The three-point curvature vanished; the fringe is flat around the guess."""


@dataclass(frozen=True)
class DetectionRegion:
    half_width: float = 5e-3
    center: float = 0.0

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be > 0")


@dataclass(frozen=True)
class Tolerances:
    ode: float = 1e-11
    quadrature: float = 1e-10
    shift: float = 1e-9  # rad/s, stopping rule of the parabola iteration
    edge: float = 1e-7
    norm: float = 1e-9


@dataclass(frozen=True)
class FringePoint:
    detuning: float
    O_e: float
    O_g: float
    P_e_raw: float
    P_g_raw: float


def packet_center(timing: FountainTiming, a: int, n: int, t: float) -> float:
    """Comoving centre ``a v_r T + n v_r (t - T_b)`` of packet ``(a, n)``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return timing.v_r * (a * timing.T + n * (t - timing.T_b))


def _packet_expansion(bare: AmplitudeLadder, species: AtomSpecies, timing: FountainTiming,
                      waist, v_i):
    """Rewrite ``sum c phi_n^a(T_d, .)`` as ``psi0(x) sum C exp(x (alpha a + beta n))``."""
    a, n = bare.index_grids()
    Td = timing.T_d
    s = complex_width(species, waist, Td)
    c = packet_center(timing, a, n, Td)
    phase = (-timing.omega_r * (a * n * timing.T - n * n * timing.T_b + n * n * Td / 2.0)
             - timing.k * v_i * (a * timing.T - n * timing.T_b))
    factor = np.exp(1j * phase - c * c / (4.0 * s))
    alpha = timing.v_r * timing.T / (2.0 * s)
    beta = 1j * timing.k + timing.v_r * (Td - timing.T_b) / (2.0 * s)
    return bare.e * factor, bare.g * factor, alpha, beta, s, c


def _trim(ce, cg, a_vals, n_vals):
    """Drop all-zero rows/columns before the quadrature loop."""
    live = (np.abs(ce) + np.abs(cg)) > 0
    rows = np.nonzero(live.any(axis=1))[0]
    cols = np.nonzero(live.any(axis=0))[0]
    if not len(rows):
        return None
    sl = (slice(rows[0], rows[-1] + 1), slice(cols[0], cols[-1] + 1))
    return (np.ascontiguousarray(ce[sl]), np.ascontiguousarray(cg[sl]),
            a_vals[sl[0]].astype(float), n_vals[sl[1]].astype(float))


@dataclass
class _DetectInfo:
    error: float = 0.0
    intervals: int = 0


def detect_both(bare: AmplitudeLadder, species: AtomSpecies, timing: FountainTiming, waist,
                z_i, v_i, region: DetectionRegion, tol=1e-10, info=None):
    """``(P_e, P_g)`` over the lab-frame region ``[center - hw, center + hw]``.

    ``bare`` holds the amplitudes of packet ``(z_i, v_i)`` with every recoil
    phase folded back in.  Lab and comoving coordinates are related by
    ``z_lab = x + z_i + v_i T_d``.
    """
    ce, cg, alpha, beta, s, c = _packet_expansion(bare, species, timing, waist, v_i)
    trimmed = _trim(ce, cg, bare.a_values, bare.n_values)
    if trimmed is None:
        return 0.0, 0.0
    ce, cg, av, nv = trimmed
    sigma = float(spread_sigma(species, PacketParams(waist), timing.T_d))
    shift = z_i + v_i * timing.T_d
    lo = max(region.center - region.half_width - shift, float(c.min()) - CLIP_SIGMAS * sigma)
    hi = min(region.center + region.half_width - shift, float(c.max()) + CLIP_SIGMAS * sigma)
    if not hi > lo:
        return 0.0, 0.0
    inv_s = 1.0 / s
    norm = (2.0 * np.pi) ** -0.5 * waist / abs(s)
    psum = _core.packet_sum

    def integrand(x):
        env = norm * np.exp(-0.5 * x * x * inv_s.real)
        ae = psum(x, ce, alpha, beta, av, nv)
        ag = psum(x, cg, alpha, beta, av, nv)
        return np.stack([env * (ae.real**2 + ae.imag**2), env * (ag.real**2 + ag.imag**2)])

    val, err, nint = integrate(integrand, lo, hi, rtol=tol, atol=1e-15)
    if info is not None:
        info.error = max(info.error, float(err))
        info.intervals += nint
    return float(val[0]), float(val[1])


def detect_probability(ladder: AmplitudeLadder, species: AtomSpecies, timing: FountainTiming,
                       waist, z_i, v_i, region: DetectionRegion, state="e", tol=1e-10) -> float:
    if state not in ("e", "g"):
        raise ValueError("state must be 'e' or 'g'")
    pe, pg = detect_both(ladder, species, timing, waist, z_i, v_i, region, tol)
    return pe if state == "e" else pg


@dataclass
class Diagnostics:
    """Worst-case numerical health figures over every evaluated fringe point."""

    epsilon: float = 0.0
    edge_population: float = 0.0
    norm_drift: float = 0.0
    quad_error: float = 0.0
    evaluations: int = 0

    def absorb_sequence(self, seq):
        for r in seq.reports:
            self.edge_population = max(self.edge_population, r.edge_population)
            self.norm_drift = max(self.norm_drift, r.norm_drift)


def _sequence(config, detuning, z_i=0.0):
    t = config.tolerances
    return run_sequence(config.timing, config.omega0, detuning, config.cutoff,
                        profile=config.pulse_profile, z_i=z_i, v_i=0.0, tol=t.ode,
                        edge_tol=t.edge, norm_tol=t.norm)


def _gauge_shift(bare: AmplitudeLadder, k, z_i):
    # with v_i = 0 the start point enters the ladder only as exp(i n k z_i)
    _, n = bare.index_grids()
    return bare.scaled(np.exp(1j * n * k * z_i))


def fringe_point(config, detuning, diagnostics=None, executor=None) -> FringePoint:
    """Normalised observables at one detuning for any ``config.mode``."""
    diag = diagnostics if diagnostics is not None else Diagnostics()
    diag.evaluations += 1
    seq = _sequence(config, detuning)
    diag.absorb_sequence(seq)
    if config.mode == "plane_wave":
        pe, pg, eps = plane_wave_probabilities(seq.tilde)
        diag.epsilon = max(diag.epsilon, abs(eps))
    else:
        spec = config.ensemble
        if spec.momentum_variance > 0.0:
            raise ValueError("ensemble averaging is implemented for waist = delta_waist(theta) only")
        zs = sample_positions(spec, config.samples, config.aperture)
        timing, species = config.timing, config.ensemble.species
        tol = config.tolerances.quadrature
        info = _DetectInfo()

        def one(z):
            return detect_both(_gauge_shift(seq.bare, timing.k, z), species, timing, spec.waist,
                               z, 0.0, config.region, tol, info)

        vals = list(executor.map(one, zs)) if executor is not None else [one(z) for z in zs]
        pe = math.fsum(v[0] for v in vals) / len(vals)
        pg = math.fsum(v[1] for v in vals) / len(vals)
        diag.quad_error = max(diag.quad_error, info.error)
    total = pe + pg
    if not total > 0:
        raise ZeroDivisionError("no atoms reach the detection region")
    o_e = pe / total
    return FringePoint(float(detuning), o_e, 1.0 - o_e, pe, pg)


def ensemble_observables(config, detuning, diagnostics=None, executor=None) -> FringePoint:
    """Sample-averaged, normalised observables at one detuning."""
    return fringe_point(config, detuning, diagnostics, executor)


def contrast(config, diagnostics=None) -> float:
    fp = fringe_point(config, 0.0, diagnostics)
    return abs(fp.O_e - fp.O_g)


def locate_extremum(fringe, T, tol=1e-9, start=0.0, max_iter=60):
    """Iterated three-point parabola around the central fringe extremum.

    ``fringe(delta)`` returns the observable; the step is ``h = pi / (10 T)``.
    Returns ``(delta_c, iterations)``.
    """
    h = np.pi / (10.0 * T)
    c = float(start)
    for it in range(1, max_iter + 1):
        om, o0, op = fringe(c - h), fringe(c), fringe(c + h)
        den = om - 2.0 * o0 + op
        scale = abs(om) + abs(o0) + abs(op)
        if abs(den) <= 1e-13 * max(scale, 1e-300):
            raise DegenerateCurvature(f"curvature {den:.3g} vanishes at delta = {c:.6g}")
        upd = h * (om - op) / (2.0 * den)
        # stay inside the parabola's bracket; a far jump means a bad start
        upd = max(-h, min(h, upd))
        c += upd
        if abs(upd) < tol:
            return c, it
    raise NoConvergence(f"no convergence after {max_iter} iterations (last delta {c:.6g})")


@dataclass
class ScenarioResult:
    shift: float
    contrast: float
    detuning: float
    iterations: int
    diagnostics: Diagnostics = field(default_factory=Diagnostics)


def extract_shift(config, diagnostics=None, executor=None):
    """Relative shift ``delta_c / omega_eg`` of the central ``O_e`` extremum."""
    return _extract(config, diagnostics, executor)[0]


def _extract(config, diagnostics, executor):
    cache = {}

    def fringe(d):
        if d not in cache:
            cache[d] = fringe_point(config, d, diagnostics, executor)
        return cache[d].O_e

    dc, it = locate_extremum(fringe, config.timing.T, tol=config.tolerances.shift)
    return dc / config.ensemble.species.omega_eg, dc, it, cache


def run_scenario(config, executor=None) -> ScenarioResult:
    """Shift, contrast and numerical diagnostics for one configuration."""
    diag = Diagnostics()
    shift, dc, it, cache = _extract(config, diag, executor)
    fp0 = cache.get(0.0) or fringe_point(config, 0.0, diag, executor)
    # epsilon of the coherent plane-wave sums, reported for every mode
    if config.mode != "plane_wave":
        _, _, eps = plane_wave_probabilities(_sequence(config, 0.0).tilde)
        diag.epsilon = max(diag.epsilon, abs(eps))
    return ScenarioResult(shift, abs(fp0.O_e - fp0.O_g), dc, it, diag)
