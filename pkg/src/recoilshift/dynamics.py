"""Recoil-ladder amplitudes through the two standing-wave interactions.

Amplitudes are indexed by ``(a, n)``: ``n`` counts photon momenta ``n hbar k``
carried by a packet and ``a`` labels the position offset ``a v_r T`` picked up
between the pulses.  The first pulse couples ``n -> n +- 1`` at fixed ``a``;
the second couples ``(a, n) -> (a +- 1, n -+ 1)`` so ``s = a + n`` is
conserved.  Both are solved with the same tridiagonal kernel, rows being
``a`` for the first pulse and ``s`` for the second.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import jv

from . import _core
from .wavepacket import AtomSpecies, CAESIUM, HBAR

STANDARD_GRAVITY = 9.80665

PROFILES = {
    "constant": _core.PROFILE_CONSTANT,
    "cosine": _core.PROFILE_COSINE,
    "gaussian": _core.PROFILE_GAUSSIAN,
}

# gaussian pulses are integrated over t_center +- GAUSS_WINDOW * tau
GAUSS_WINDOW = 1.5


class CutoffTooSmall(RuntimeError):
    """Population reached the outermost momentum components."""


class ToleranceNotMet(RuntimeError):
    """Step control failed or the norm drifted beyond the allowed bound."""


class AmplitudeLadder:
    """Excited/ground amplitudes on ``|a| <= 2N``, ``|n| <= N``.

    Stored densely: ``e[a + 2N, n + N]``.  Indices outside the box read as 0.
    """

    __slots__ = ("cutoff", "e", "g")

    def __init__(self, cutoff: int, e=None, g=None):
        if cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        self.cutoff = int(cutoff)
        shape = (4 * cutoff + 1, 2 * cutoff + 1)
        self.e = np.zeros(shape, complex) if e is None else np.array(e, dtype=complex)
        self.g = np.zeros(shape, complex) if g is None else np.array(g, dtype=complex)
        if self.e.shape != shape or self.g.shape != shape:
            raise ValueError(f"amplitude arrays must have shape {shape}")

    @classmethod
    def initial(cls, cutoff: int) -> "AmplitudeLadder":
        """Ground state, no recoil: ``g_0^0 = 1``."""
        lad = cls(cutoff)
        lad.g[2 * cutoff, cutoff] = 1.0
        return lad

    @property
    def a_values(self):
        return np.arange(-2 * self.cutoff, 2 * self.cutoff + 1)

    @property
    def n_values(self):
        return np.arange(-self.cutoff, self.cutoff + 1)

    def index_grids(self):
        """``(a, n)`` integer grids broadcast to the storage shape."""
        return np.meshgrid(self.a_values, self.n_values, indexing="ij")

    def __getitem__(self, key):
        a, n = key
        N = self.cutoff
        if abs(a) > 2 * N or abs(n) > N:
            return 0j, 0j
        return complex(self.e[a + 2 * N, n + N]), complex(self.g[a + 2 * N, n + N])

    def __setitem__(self, key, value):
        a, n = key
        N = self.cutoff
        if abs(a) > 2 * N or abs(n) > N:
            raise IndexError(f"({a}, {n}) outside the cutoff box")
        self.e[a + 2 * N, n + N], self.g[a + 2 * N, n + N] = value

    def items(self, threshold=0.0):
        """Yield ``((a, n), (e, g))`` for entries with ``|e|^2 + |g|^2 > threshold``."""
        N = self.cutoff
        pop = np.abs(self.e) ** 2 + np.abs(self.g) ** 2
        for i, j in zip(*np.nonzero(pop > threshold)):
            yield (int(i) - 2 * N, int(j) - N), (complex(self.e[i, j]), complex(self.g[i, j]))

    def norm(self) -> float:
        return float(np.sum(np.abs(self.e) ** 2) + np.sum(np.abs(self.g) ** 2))

    def excited_population(self) -> float:
        return float(np.sum(np.abs(self.e) ** 2))

    def copy(self) -> "AmplitudeLadder":
        return AmplitudeLadder(self.cutoff, self.e.copy(), self.g.copy())

    def scaled(self, factor) -> "AmplitudeLadder":
        """Multiply entries by ``factor`` (scalar or array of the storage shape)."""
        return AmplitudeLadder(self.cutoff, self.e * factor, self.g * factor)

    def __repr__(self):
        return f"AmplitudeLadder(cutoff={self.cutoff}, norm={self.norm():.12f})"


@dataclass(frozen=True)
class PulseSpec:
    profile: str
    omega0: float
    tau: float
    t_center: float
    phase: float = 0.0

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}; expected one of {sorted(PROFILES)}")
        if not self.omega0 >= 0:
            raise ValueError("omega0 must be >= 0")
        if not self.tau > 0:
            raise ValueError("tau must be > 0")

    @property
    def window(self):
        half = GAUSS_WINDOW * self.tau if self.profile == "gaussian" else 0.5 * self.tau
        return self.t_center - half, self.t_center + half


@dataclass(frozen=True)
class FountainTiming:
    """Fountain time line and the cavity field geometry.

    ``v_x`` defaults to ``g T / 2`` (apogee half way between the passages).
    ``T_b = 0`` is accepted so launch-at-first-pulse scenarios can be run.
    """

    T_b: float
    T: float
    T_d: float
    k: float = 135.04
    k_x: float = 137.43
    v_x: float | None = None
    species: AtomSpecies = field(default=CAESIUM)

    def __post_init__(self):
        if not self.T_b >= 0:
            raise ValueError("T_b must be >= 0")
        if not self.T > 0:
            raise ValueError("T must be > 0")
        if not self.T_d > self.T_b + self.T:
            raise ValueError("need T_d > T_b + T")
        if not self.k > 0 or not self.k_x > 0:
            raise ValueError("k and k_x must be positive")
        if self.v_x is None:
            object.__setattr__(self, "v_x", STANDARD_GRAVITY * self.T / 2.0)
        if not self.v_x > 0:
            raise ValueError("v_x must be positive")

    @property
    def v_r(self) -> float:
        return HBAR * self.k / self.species.mass

    @property
    def omega_r(self) -> float:
        """``M v_r^2 / hbar = hbar k^2 / M`` (twice the recoil shift)."""
        return HBAR * self.k**2 / self.species.mass

    @property
    def tau(self) -> float:
        """Transit time through one half period of the cavity mode."""
        return np.pi / (self.k_x * self.v_x)

    def pulse(self, which: str, omega0: float, profile: str = "cosine") -> PulseSpec:
        tc = self.T_b if which == "first" else self.T_b + self.T
        return PulseSpec(profile, omega0, self.tau, tc)


def rabi_at(pulse: PulseSpec, t):
    """Rabi frequency at time ``t`` (zero outside the window for cosine/constant)."""
    if np.ndim(t):
        return np.array([rabi_at(pulse, x) for x in np.ravel(t)]).reshape(np.shape(t))
    return float(_core._fallback.rabi(PROFILES[pulse.profile], pulse.omega0, pulse.tau,
                                      pulse.t_center, float(t)))


def omega0_for_power(power: int, tau: float) -> float:
    """Peak of the cosine profile whose mean over ``tau`` gives an area ``N pi / 2``."""
    return power * np.pi**2 / (4.0 * tau)


# sector layout for the second pulse: rows s = a + n in [-3N, 3N]
def _to_sectors(arr, N):
    out = np.zeros((6 * N + 1, 2 * N + 1), complex)
    a = np.arange(-2 * N, 2 * N + 1)[:, None]
    n = np.arange(-N, N + 1)[None, :]
    s = a + n
    out[s + 3 * N, n + N] = arr
    return out


def _from_sectors(sec, N):
    a = np.arange(-2 * N, 2 * N + 1)[:, None]
    n = np.arange(-N, N + 1)[None, :]
    keep = np.zeros_like(sec, dtype=bool)
    keep[(a + n) + 3 * N, n + N] = True
    lost = float(np.sum(np.abs(sec[~keep]) ** 2))
    return sec[(a + n) + 3 * N, n + N], lost


def _field_args(detuning, z_i, v_i, pulse, k):
    return (PROFILES[pulse.profile], pulse.omega0, pulse.tau, pulse.t_center,
            float(detuning), float(k), float(z_i), float(v_i))


def rhs_first(ladder: AmplitudeLadder, t, detuning, z_i, v_i, pulse: PulseSpec, k=135.04):
    """Time derivative under the first interaction, as a ladder."""
    y = np.stack([ladder.e, ladder.g])
    if pulse.phase:
        y[0] *= np.exp(1j * pulse.phase)
    d = _core._fallback.ladder_rhs(y, float(t), *_field_args(detuning, z_i, v_i, pulse, k))
    if pulse.phase:
        d[0] *= np.exp(-1j * pulse.phase)
    return AmplitudeLadder(ladder.cutoff, d[0], d[1])


def rhs_second(ladder: AmplitudeLadder, t, detuning, z_i, v_i, pulse: PulseSpec, k=135.04):
    """Time derivative under the second interaction (couples within ``a + n``)."""
    N = ladder.cutoff
    y = np.stack([_to_sectors(ladder.e, N), _to_sectors(ladder.g, N)])
    if pulse.phase:
        y[0] *= np.exp(1j * pulse.phase)
    d = _core._fallback.ladder_rhs(y, float(t), *_field_args(detuning, z_i, v_i, pulse, k))
    if pulse.phase:
        d[0] *= np.exp(-1j * pulse.phase)
    de, _ = _from_sectors(d[0], N)
    dg, _ = _from_sectors(d[1], N)
    return AmplitudeLadder(N, de, dg)


@dataclass
class PulseReport:
    steps: int
    edge_population: float
    norm_drift: float


def _integrate_rows(e, g, pulse, detuning, z_i, v_i, k, tol, max_steps):
    t0, t1 = pulse.window
    if pulse.phase:
        e *= np.exp(1j * pulse.phase)
    status, steps, edge = _core.integrate_chains(
        e, g, t0, t1, PROFILES[pulse.profile], pulse.omega0, pulse.tau, pulse.t_center,
        float(detuning), float(k), float(z_i), float(v_i), tol, tol * 1e-3,
        pulse.tau / 50.0, max_steps,
    )
    if pulse.phase:
        e *= np.exp(-1j * pulse.phase)
    if status == _core.STATUS_MAX_STEPS:
        raise ToleranceNotMet(f"step budget of {max_steps} exhausted")
    if status == _core.STATUS_STEP_UNDERFLOW:
        raise ToleranceNotMet("step size underflow")
    return steps, edge


def evolve_pulse(ladder: AmplitudeLadder, which: str, detuning, z_i, v_i, pulse: PulseSpec,
                 tol=1e-11, k=135.04, edge_tol=1e-7, norm_tol=1e-9, max_steps=200_000,
                 report=None) -> AmplitudeLadder:
    """Integrate one interaction; returns a new ladder.

    ``tol`` is the local relative tolerance of the DOPRI5 step control.
    Raises ``CutoffTooSmall`` if the outermost ``|n| = cutoff`` columns ever
    hold more than ``edge_tol`` of the population, and ``ToleranceNotMet`` if
    step control fails or the norm drifts by more than ``norm_tol``.
    Pass a list as ``report`` to receive a ``PulseReport``.
    """
    if which not in ("first", "second"):
        raise ValueError("which must be 'first' or 'second'")
    N = ladder.cutoff
    norm0 = ladder.norm()
    if which == "first":
        e, g = ladder.e.copy(), ladder.g.copy()
    else:
        e, g = _to_sectors(ladder.e, N), _to_sectors(ladder.g, N)
    rows = np.nonzero(np.any(e != 0, axis=1) | np.any(g != 0, axis=1))[0]
    steps, edge = 0, 0.0
    if len(rows):
        er = np.ascontiguousarray(e[rows])
        gr = np.ascontiguousarray(g[rows])
        steps, edge = _integrate_rows(er, gr, pulse, detuning, z_i, v_i, k, tol, max_steps)
        e[rows], g[rows] = er, gr
    if which == "second":
        e, lost_e = _from_sectors(e, N)
        g, lost_g = _from_sectors(g, N)
        edge = max(edge, lost_e + lost_g)
    if edge > edge_tol:
        raise CutoffTooSmall(
            f"population {edge:.3g} at the ladder edge (cutoff {N}); increase the cutoff"
        )
    out = AmplitudeLadder(N, e, g)
    drift = abs(out.norm() - norm0)
    if drift > norm_tol:
        raise ToleranceNotMet(f"norm drift {drift:.3g} exceeds {norm_tol:.3g}")
    if report is not None:
        report.append(PulseReport(steps, edge, drift))
    return out


def _phase_first(ladder, timing):
    a, n = ladder.index_grids()
    return timing.omega_r * (a * n * timing.T - n * n * timing.T_b / 2.0)


def _phase_second(ladder, timing):
    _, n = ladder.index_grids()
    return timing.omega_r * n * n * timing.T / 2.0


def _apply(ladder, phase, direction):
    if direction == "to_tilde":
        return ladder.scaled(np.exp(-1j * phase))
    if direction == "from_tilde":
        return ladder.scaled(np.exp(1j * phase))
    raise ValueError("direction must be 'to_tilde' or 'from_tilde'")


def transform_first(ladder: AmplitudeLadder, timing: FountainTiming, direction: str) -> AmplitudeLadder:
    """Phase map ``exp[-+ i omega_r (a n T - n^2 T_b / 2)]`` (to/from tilde)."""
    return _apply(ladder, _phase_first(ladder, timing), direction)


def transform_second(ladder: AmplitudeLadder, timing: FountainTiming, direction: str) -> AmplitudeLadder:
    """Free-flight phase ``exp[-+ i omega_r n^2 T / 2]`` (to/from tilde)."""
    return _apply(ladder, _phase_second(ladder, timing), direction)


def bessel_solution(omega: float, duration: float, cutoff: int) -> AmplitudeLadder:
    """Resonant constant-field solution on ``a = 0`` from ``g_0^0 = 1``.

    Odd ``n = 2m + 1`` are excited with ``i (-1)^(m+1) J_n(x)``, even
    ``n = 2m`` ground with ``(-1)^m J_n(x)``, where ``x = omega t / 2``.
    """
    x = 0.5 * omega * duration
    lad = AmplitudeLadder(cutoff)
    for n in range(-cutoff, cutoff + 1):
        jn = jv(n, x)
        if n % 2:
            m = (n - 1) // 2
            lad.e[2 * cutoff, n + cutoff] = 1j * (-1) ** (m + 1) * jn
        else:
            lad.g[2 * cutoff, n + cutoff] = (-1) ** (n // 2) * jn
    return lad


def rabi_probability(omega_tau):
    return np.sin(0.5 * np.asarray(omega_tau)) ** 2


def plane_wave_probabilities(ladder: AmplitudeLadder):
    """Coherent sums ``(|sum e|^2, |sum g|^2, epsilon)`` over the whole ladder."""
    pe = abs(ladder.e.sum()) ** 2
    pg = abs(ladder.g.sum()) ** 2
    return float(pe), float(pg), float(pe + pg - 1.0)


@dataclass(frozen=True)
class SequenceResult:
    """Ladders of one two-pulse sequence.

    ``tilde`` holds the doubly transformed amplitudes right after the second
    pulse; ``bare`` the same state with every free-flight phase folded back.
    """

    tilde: AmplitudeLadder
    bare: AmplitudeLadder
    reports: tuple


def run_sequence(timing: FountainTiming, omega0: float, detuning: float, cutoff: int,
                 profile="cosine", z_i=0.0, v_i=0.0, tol=1e-11, edge_tol=1e-7,
                 norm_tol=1e-9, enabled=("first", "second")) -> SequenceResult:
    """Both interactions for one packet, starting from ``g_0^0 = 1``.

    Dropping a name from ``enabled`` switches that pulse off, which isolates
    single-pulse contributions in weak-field checks.
    """
    reports = []
    kw = dict(tol=tol, k=timing.k, edge_tol=edge_tol, norm_tol=norm_tol, report=reports)
    lad = AmplitudeLadder.initial(cutoff)
    if "first" in enabled:
        lad = evolve_pulse(lad, "first", detuning, z_i, v_i, timing.pulse("first", omega0, profile), **kw)
    lad = transform_second(lad, timing, "to_tilde")
    if "second" in enabled:
        lad = evolve_pulse(lad, "second", detuning, z_i, v_i, timing.pulse("second", omega0, profile), **kw)
    bare = transform_first(transform_second(lad, timing, "from_tilde"), timing, "from_tilde")
    return SequenceResult(lad, bare, tuple(reports))
