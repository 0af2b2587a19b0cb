"""Randomised invariants across modules."""

import numpy as np
from hypothesis import given, settings, strategies as st

from recoilshift.dynamics import (
    AmplitudeLadder, FountainTiming, PulseSpec, evolve_pulse, transform_first, transform_second,
)
from recoilshift.ensemble import EnsembleSpec, delta_waist
from recoilshift.wavepacket import CAESIUM, PacketParams, overlap_with_plane_factor
from recoilshift.weakfield import WeakFieldInputs, cancellation_factor, envelopes, ensemble_terms, predicted_shift

FAST = settings(max_examples=25, deadline=None)

timings = st.builds(
    lambda tb, t, extra: FountainTiming(tb, t, tb + t + extra),
    st.floats(0.0, 0.3), st.floats(0.1, 0.6), st.floats(0.05, 0.5),
)


def random_ladder(seed, cutoff=3):
    rng = np.random.default_rng(seed)
    lad = AmplitudeLadder(cutoff)
    lad.e[:] = rng.normal(size=lad.e.shape) + 1j * rng.normal(size=lad.e.shape)
    lad.g[:] = rng.normal(size=lad.g.shape) + 1j * rng.normal(size=lad.g.shape)
    return lad


@FAST
@given(st.floats(1e-8, 1e-2), st.floats(0.0, 2.0), st.floats(-1e-2, 1e-2), st.floats(-0.1, 0.1))
def test_packet_norm(waist, t, z0, v0):
    p = PacketParams(waist, z0, v0)
    assert abs(overlap_with_plane_factor(CAESIUM, p, p, t, 0.0) - 1.0) < 1e-12


@FAST
@given(st.integers(0, 10**6), timings)
def test_transform_round_trips(seed, tm):
    lad = random_ladder(seed)
    for fn in (transform_first, transform_second):
        back = fn(fn(lad, tm, "to_tilde"), tm, "from_tilde")
        assert np.max(np.abs(back.e - lad.e)) < 1e-14
        assert np.max(np.abs(back.g - lad.g)) < 1e-14


@settings(max_examples=10, deadline=None)
@given(st.integers(-4, 4), st.floats(-300, 300), st.floats(-5e-3, 5e-3), st.floats(-0.02, 0.02),
       st.sampled_from(["cosine", "gaussian", "constant"]))
def test_second_pulse_sector_conservation(s, det, z, v, profile):
    lad = AmplitudeLadder(4)
    a, n = lad.index_grids()
    rng = np.random.default_rng(abs(s))
    sector = (a + n == s) & (np.abs(n) <= 1)
    lad.g[sector] = rng.normal(size=sector.sum())
    lad = lad.scaled(1 / np.sqrt(lad.norm()))
    out = evolve_pulse(lad, "second", det, z, v, PulseSpec(profile, 200.0, 9.3e-3, 0.0), edge_tol=1.0)
    assert np.all(out.e[a + n != s] == 0) and np.all(out.g[a + n != s] == 0)
    assert abs(out.norm() - 1.0) < 1e-9


@settings(max_examples=10, deadline=None)
@given(st.integers(-3, 3), st.floats(-300, 300), st.floats(-5e-3, 5e-3))
def test_first_pulse_keeps_a(a0, det, z):
    lad = AmplitudeLadder(4)
    lad[a0, 0] = (0.0, 1.0)
    out = evolve_pulse(lad, "first", det, z, 0.0, PulseSpec("cosine", 200.0, 9.3e-3, 0.0), edge_tol=1.0)
    a, _ = out.index_grids()
    assert np.all(out.e[a != a0] == 0) and np.all(out.g[a != a0] == 0)


ensembles = st.builds(
    lambda theta, w, frac: (theta, w, frac),
    st.floats(0.2e-6, 5e-6), st.floats(0.5e-3, 6e-3), st.floats(0.0, 1.0),
)


@FAST
@given(ensembles, timings, st.floats(-20.0, 20.0))
def test_waist_independence(ens, tm, det):
    theta, w, frac = ens
    lo = delta_waist(CAESIUM, theta)
    a = EnsembleSpec(theta, w, lo)
    b = EnsembleSpec(theta, w, lo + frac * (w - lo))
    ra = ensemble_terms(WeakFieldInputs(a, tm, tm.tau), det)
    rb = ensemble_terms(WeakFieldInputs(b, tm, tm.tau), det)
    assert np.allclose(ra, rb, rtol=1e-12, atol=0)
    pa = predicted_shift(WeakFieldInputs(a, tm, tm.tau))
    pb = predicted_shift(WeakFieldInputs(b, tm, tm.tau))
    assert abs(pa - pb) <= 1e-12 * abs(pa)


@FAST
@given(ensembles, timings)
def test_envelope_ratio(ens, tm):
    theta, w, _ = ens
    sp = EnsembleSpec(theta, w, delta_waist(CAESIUM, theta))
    A, B = envelopes(sp, tm)
    assert abs(B / A / cancellation_factor(sp, tm) - 1.0) < 1e-14
