import numpy as np
import pytest
from scipy.integrate import quad

from recoilshift.wavepacket import (
    CAESIUM, HBAR, AtomSpecies, PacketParams, complex_width, eval_momentum, eval_position,
    overlap_with_plane_factor, spread_sigma,
)

M = CAESIUM.mass
DZ = 3.377e-8


def test_species_validation():
    with pytest.raises(ValueError):
        AtomSpecies(0.0, 1.0)
    with pytest.raises(ValueError):
        AtomSpecies(1.0, -1.0)
    with pytest.raises(ValueError):
        PacketParams(0.0)


def test_momentum_peak_value():
    v = eval_momentum(CAESIUM, PacketParams(DZ), 0.0, 0.0)
    assert v == pytest.approx((2 * DZ**2 / (np.pi * HBAR**2)) ** 0.25, rel=1e-14)
    assert np.angle(v) == 0.0


def test_momentum_width():
    pk = PacketParams(DZ, 0.0, 2e-8)
    p_i = M * pk.v_init
    peak = abs(eval_momentum(CAESIUM, pk, 0.3, p_i)) ** 2
    for sgn in (1, -1):
        side = abs(eval_momentum(CAESIUM, pk, 0.3, p_i + sgn * HBAR / (2 * DZ))) ** 2
        assert side / peak == pytest.approx(np.exp(-0.5), rel=1e-12)


@pytest.mark.parametrize("t", [0.0, 0.4, 0.8])
def test_momentum_normalised(t):
    pk = PacketParams(DZ, 1e-4, 3e-8)
    sp = HBAR / (2 * DZ)
    p_i = M * pk.v_init
    val, _ = quad(lambda p: abs(eval_momentum(CAESIUM, pk, t, p)) ** 2, p_i - 12 * sp, p_i + 12 * sp,
                  epsabs=0, epsrel=1e-12, limit=200)
    assert val == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("t", [0.0, 0.2, 0.8])
def test_position_normalised(t):
    pk = PacketParams(1e-3 * 0.05, 2e-4, -1e-7)
    sg = float(spread_sigma(CAESIUM, pk, t))
    c = pk.z_init + pk.v_init * t
    val, _ = quad(lambda z: abs(eval_position(CAESIUM, pk, t, z)) ** 2, c - 12 * sg, c + 12 * sg,
                  epsabs=0, epsrel=1e-12, limit=200)
    assert val == pytest.approx(1.0, abs=1e-10)


def test_position_width_at_release():
    pk = PacketParams(DZ, 1e-5)
    peak = abs(eval_position(CAESIUM, pk, 0.0, pk.z_init)) ** 2
    for sgn in (1, -1):
        side = abs(eval_position(CAESIUM, pk, 0.0, pk.z_init + sgn * DZ)) ** 2
        # sigma_z(0) = waist, so the density drops by exp(-1/2) one waist out
        assert side / peak == pytest.approx(np.exp(-0.5), rel=1e-12)


def test_center_drift():
    pk = PacketParams(2e-5, 0.0, 1e-7)
    t = 0.8
    sg = float(spread_sigma(CAESIUM, pk, t))
    z = np.linspace(-3 * sg, 3 * sg, 200001)
    dens = abs(eval_position(CAESIUM, pk, t, z)) ** 2
    assert z[np.argmax(dens)] == pytest.approx(pk.v_init * t, abs=z[1] - z[0])


def test_fourier_duality():
    # position amplitude = FFT of the momentum amplitude; the p^2 t chirp is
    # resolved with ~0.3 rad per sample on a 2^24 grid
    pk = PacketParams(3.38e-8)
    t = 0.5
    sp = HBAR / (2 * pk.waist)
    n = 2**24
    L = 28 * sp
    dp = L / n
    p = (np.arange(n) - n // 2) * dp
    f = eval_momentum(CAESIUM, pk, t, p)
    dz = 2 * np.pi * HBAR / L
    # phi(z_j) = 1/sqrt(2 pi hbar) sum f(p) exp(i p z_j / hbar) dp with z_j = j dz
    F = np.fft.ifft(np.fft.ifftshift(f)) * n
    j = np.arange(-10, 10) * 40
    z = j * dz
    shift = np.exp(1j * p[0] * z / HBAR)
    num = F[j % n] * shift * dp / np.sqrt(2 * np.pi * HBAR)
    ref = eval_position(CAESIUM, pk, t, z)
    peak = np.max(np.abs(ref))
    assert np.max(np.abs(num - ref)) / peak < 1e-8


def test_spread_sigma_values():
    pk = PacketParams(3.377e-8)
    assert spread_sigma(CAESIUM, pk, 0.0) == pytest.approx(pk.waist)
    assert spread_sigma(CAESIUM, pk, 0.8) == pytest.approx(5.66e-3, rel=2e-3)
    s = spread_sigma(CAESIUM, pk, np.linspace(0, 2, 50))
    assert np.all(np.diff(s) >= 0)
    with pytest.raises(ValueError):
        spread_sigma(CAESIUM, pk, -1.0)


def test_minimum_uncertainty():
    dz = 4e-7
    sp = HBAR / (2 * dz)
    pk = PacketParams(dz)
    var_p, _ = quad(lambda p: p * p * abs(eval_momentum(CAESIUM, pk, 0.0, p)) ** 2, -14 * sp, 14 * sp,
                    epsrel=1e-12)
    assert spread_sigma(CAESIUM, pk, 0.0) * np.sqrt(var_p) == pytest.approx(HBAR / 2, rel=1e-9)


def test_free_schrodinger_residual():
    pk = PacketParams(1e-4, 3e-5, 2e-7)
    t0 = 0.4
    sg = float(spread_sigma(CAESIUM, pk, t0))
    z = pk.z_init + pk.v_init * t0 + np.linspace(-2 * sg, 2 * sg, 9)
    hz = sg / 50
    ht = 1e-3 * t0
    f = lambda t, zz: eval_position(CAESIUM, pk, t, zz)
    # fourth-order central stencils
    dt = (-f(t0 + 2 * ht, z) + 8 * f(t0 + ht, z) - 8 * f(t0 - ht, z) + f(t0 - 2 * ht, z)) / (12 * ht)
    dzz = (-f(t0, z + 2 * hz) + 16 * f(t0, z + hz) - 30 * f(t0, z) + 16 * f(t0, z - hz)
           - f(t0, z - 2 * hz)) / (12 * hz * hz)
    lhs = 1j * HBAR * dt
    res = lhs + HBAR**2 / (2 * M) * dzz
    assert np.max(np.abs(res)) / np.max(np.abs(lhs)) < 1e-6


def test_overlap_normalisation():
    pk = PacketParams(DZ, 1e-4, 2e-8)
    assert abs(overlap_with_plane_factor(CAESIUM, pk, pk, 0.6, 0.0) - 1.0) < 1e-12


def test_overlap_matches_quadrature():
    k = 135.04
    vr = HBAR * k / M
    pA = PacketParams(DZ, 0.0, vr)
    pB = PacketParams(DZ, 0.0, -vr)
    t = 0.8
    ana = overlap_with_plane_factor(CAESIUM, pA, pB, t, 0.0)
    sg = float(spread_sigma(CAESIUM, pA, t))
    f = lambda z: np.conj(eval_position(CAESIUM, pA, t, z)) * eval_position(CAESIUM, pB, t, z)
    re, _ = quad(lambda z: f(z).real, -10 * sg, 10 * sg, epsrel=1e-11, limit=400)
    im, _ = quad(lambda z: f(z).imag, -10 * sg, 10 * sg, epsrel=1e-11, limit=400)
    assert abs(ana - (re + 1j * im)) < 1e-9
    assert abs(ana) <= 1.0


def test_overlap_plane_factor_envelope():
    k = 135.04
    dz = 1e-3
    pk = PacketParams(dz)
    v = overlap_with_plane_factor(CAESIUM, pk, pk, 0.0, 2 * k)
    assert abs(v) == pytest.approx(np.exp(-2 * dz**2 * k**2), rel=1e-12)


def test_overlap_finite_bounds():
    pk = PacketParams(1e-4, 2e-5)
    t = 0.2
    sg = float(spread_sigma(CAESIUM, pk, t))
    q = 80.0
    lo, hi = -sg, 0.5 * sg
    ana = overlap_with_plane_factor(CAESIUM, pk, pk, t, q, bounds=(lo, hi))
    f = lambda z: abs(eval_position(CAESIUM, pk, t, z)) ** 2 * np.exp(1j * q * z)
    re, _ = quad(lambda z: f(z).real, lo, hi, epsrel=1e-12)
    im, _ = quad(lambda z: f(z).imag, lo, hi, epsrel=1e-12)
    assert abs(ana - (re + 1j * im)) < 1e-10


def test_overlap_requires_equal_waists():
    with pytest.raises(ValueError):
        overlap_with_plane_factor(CAESIUM, PacketParams(1e-6), PacketParams(2e-6), 0.1, 0.0)


def test_complex_width():
    s = complex_width(CAESIUM, 1e-6, 0.5)
    assert s.real == pytest.approx(1e-12)
    assert s.imag == pytest.approx(HBAR * 0.5 / (2 * M))
