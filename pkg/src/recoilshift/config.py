"""Run configuration: flat ``key = value`` files and named presets.

Keys use dotted sections and carry their unit in the name, e.g.::

    preset = standard-a
    mode = ensemble
    cloud.theta_uK = 0.8
    cloud.w_mm = 1.0
    timing.T_b_s = 0.15
    pulse.power = 1
    detection.half_width_mm = 5

Values are converted to SI at load time.  Lines starting with ``#`` and
blank lines are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass

from .detection import DetectionRegion, Tolerances
from .dynamics import PROFILES, STANDARD_GRAVITY, FountainTiming, omega0_for_power
from .ensemble import EnsembleSpec, delta_waist
from .wavepacket import AtomSpecies, CAESIUM

MODES = ("ensemble", "plane_wave", "weak_field")


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    pass


def default_cutoff(power: int) -> int:
    return max(9, 2 * power + 5)


@dataclass(frozen=True)
class RunConfig:
    species: AtomSpecies
    ensemble: EnsembleSpec
    timing: FountainTiming
    pulse_power: int = 1
    pulse_profile: str = "cosine"
    region: DetectionRegion = DetectionRegion()
    aperture: float = 5e-3
    samples: int = 32
    cutoff: int = 9
    tolerances: Tolerances = Tolerances()
    mode: str = "ensemble"
    omega0_tau: float | None = None  # overrides pulse_power when set
    preset: str = "standard-a"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.pulse_profile not in PROFILES:
            raise ValidationError(f"unknown pulse profile {self.pulse_profile!r}")
        if self.pulse_power < 1:
            raise ValidationError("pulse power N must be >= 1")
        if self.samples < 1:
            raise ValidationError("samples must be >= 1")
        if self.cutoff < 1:
            raise ValidationError("cutoff must be >= 1")
        if not self.aperture > 0:
            raise ValidationError("aperture must be > 0")

    @property
    def omega0(self) -> float:
        tau = self.timing.tau
        if self.omega0_tau is not None:
            return self.omega0_tau / tau
        return omega0_for_power(self.pulse_power, tau)


# flat key -> (field path, scale to SI, type)
_KEYS = {
    "preset": ("preset", None, str),
    "mode": ("mode", None, str),
    "cloud.theta_uK": ("theta", 1e-6, float),
    "cloud.w_mm": ("w", 1e-3, float),
    "cloud.waist_m": ("waist", 1.0, float),
    "cloud.aperture_mm": ("aperture", 1e-3, float),
    "cloud.samples": ("samples", None, int),
    "timing.T_b_s": ("T_b", 1.0, float),
    "timing.T_s": ("T", 1.0, float),
    "timing.T_d_s": ("T_d", 1.0, float),
    "cavity.k_per_m": ("k", 1.0, float),
    "cavity.k_x_per_m": ("k_x", 1.0, float),
    "cavity.v_x_m_per_s": ("v_x", 1.0, float),
    "pulse.power": ("pulse_power", None, int),
    "pulse.profile": ("pulse_profile", None, str),
    "pulse.omega0_tau_rad": ("omega0_tau", 1.0, float),
    "detection.half_width_mm": ("half_width", 1e-3, float),
    "detection.center_mm": ("center", 1e-3, float),
    "numerics.cutoff": ("cutoff", None, int),
    "numerics.ode_tol": ("ode", 1.0, float),
    "numerics.quad_tol": ("quadrature", 1.0, float),
    "numerics.shift_tol_rad_per_s": ("shift", 1.0, float),
    "numerics.edge_tol": ("edge", 1.0, float),
    "species.mass_kg": ("mass", 1.0, float),
    "species.omega_eg_rad_per_s": ("omega_eg", 1.0, float),
}

STANDARD = dict(
    mode="ensemble", theta=0.8e-6, w=1e-3, waist=None, aperture=5e-3, samples=32,
    T_b=0.15, T=0.5, T_d=0.8, k=135.04, k_x=137.43, v_x=None,
    pulse_power=1, pulse_profile="cosine", omega0_tau=None,
    half_width=5e-3, center=0.0, cutoff=None,
    ode=1e-11, quadrature=1e-10, shift=1e-9, edge=1e-7,
    mass=CAESIUM.mass, omega_eg=CAESIUM.omega_eg,
)

# named starting points; grid presets in ``presets`` start from these
BASE_PRESETS = {
    "standard-a": {},
    "standard-b": dict(T_b=0.21, T=0.25, T_d=0.67),
    "standard-c": dict(theta=3.2e-6),
    "plane-wave": dict(mode="plane_wave"),
}


def build_config(values: dict) -> RunConfig:
    """Assemble a validated config from flat SI values (missing keys take defaults)."""
    v = dict(STANDARD)
    base = values.get("preset", "standard-a")
    if base in BASE_PRESETS:
        v.update(BASE_PRESETS[base])
    v.update(values)
    v["preset"] = base
    try:
        species = AtomSpecies(v["mass"], v["omega_eg"])
        waist = v["waist"] if v["waist"] is not None else delta_waist(species, v["theta"])
        ensemble = EnsembleSpec(v["theta"], v["w"], waist, species)
        timing = FountainTiming(v["T_b"], v["T"], v["T_d"], v["k"], v["k_x"], v["v_x"], species)
        region = DetectionRegion(v["half_width"], v["center"])
        tol = Tolerances(v["ode"], v["quadrature"], v["shift"], v["edge"])
        cutoff = v["cutoff"] if v["cutoff"] is not None else default_cutoff(v["pulse_power"])
        return RunConfig(species, ensemble, timing, v["pulse_power"], v["pulse_profile"], region,
                         v["aperture"], v["samples"], cutoff, tol, v["mode"], v["omega0_tau"],
                         v["preset"])
    except ValidationError:
        raise
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def parse_text(text: str) -> dict:
    """Flat ``key = value`` text to a dict of SI values."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (p.strip() for p in line.split("=", 1))
        if key not in _KEYS:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
        name, scale, typ = _KEYS[key]
        if name in out:
            raise ParseError(f"line {lineno}: duplicate key {key!r}")
        val = val.strip("\"'")
        try:
            if typ is str:
                x = val
            elif typ is int:
                x = int(val)
            else:
                x = float(val) * scale
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad value for {key!r}: {val!r}") from exc
        if key == "preset" and val not in BASE_PRESETS:
            raise ParseError(f"line {lineno}: unknown base preset {val!r}; have {sorted(BASE_PRESETS)}")
        out[name] = x
    return out


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not a text file") from exc
    return build_config(parse_text(text))


def dump_config(cfg: RunConfig) -> str:
    """Inverse of ``load_config``: every effective parameter as flat text."""
    t, e, tol = cfg.timing, cfg.ensemble, cfg.tolerances
    rows = [
        ("preset", cfg.preset), ("mode", cfg.mode),
        ("cloud.theta_uK", e.theta / 1e-6), ("cloud.w_mm", e.w / 1e-3),
        ("cloud.waist_m", e.waist), ("cloud.aperture_mm", cfg.aperture / 1e-3),
        ("cloud.samples", cfg.samples),
        ("timing.T_b_s", t.T_b), ("timing.T_s", t.T), ("timing.T_d_s", t.T_d),
        ("cavity.k_per_m", t.k), ("cavity.k_x_per_m", t.k_x), ("cavity.v_x_m_per_s", t.v_x),
        ("pulse.power", cfg.pulse_power), ("pulse.profile", cfg.pulse_profile),
    ]
    if cfg.omega0_tau is not None:
        rows.append(("pulse.omega0_tau_rad", cfg.omega0_tau))
    rows += [
        ("detection.half_width_mm", cfg.region.half_width / 1e-3),
        ("detection.center_mm", cfg.region.center / 1e-3),
        ("numerics.cutoff", cfg.cutoff), ("numerics.ode_tol", tol.ode),
        ("numerics.quad_tol", tol.quadrature), ("numerics.shift_tol_rad_per_s", tol.shift),
        ("numerics.edge_tol", tol.edge),
        ("species.mass_kg", cfg.species.mass), ("species.omega_eg_rad_per_s", cfg.species.omega_eg),
    ]
    out = []
    for k, v in rows:
        if isinstance(v, float):  # np.float64 included
            v = repr(float(v))
        out.append(f"{k} = {v}\n")
    return "".join(out)


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    """Copy with flat SI overrides (same names as the file keys' targets)."""
    values = {
        "preset": cfg.preset, "mode": cfg.mode, "theta": cfg.ensemble.theta, "w": cfg.ensemble.w,
        "waist": cfg.ensemble.waist, "aperture": cfg.aperture, "samples": cfg.samples,
        "T_b": cfg.timing.T_b, "T": cfg.timing.T, "T_d": cfg.timing.T_d, "k": cfg.timing.k,
        "k_x": cfg.timing.k_x, "v_x": cfg.timing.v_x, "pulse_power": cfg.pulse_power,
        "pulse_profile": cfg.pulse_profile, "omega0_tau": cfg.omega0_tau,
        "half_width": cfg.region.half_width, "center": cfg.region.center, "cutoff": cfg.cutoff,
        "ode": cfg.tolerances.ode, "quadrature": cfg.tolerances.quadrature,
        "shift": cfg.tolerances.shift, "edge": cfg.tolerances.edge,
        "mass": cfg.species.mass, "omega_eg": cfg.species.omega_eg,
    }
    # derived quantities follow their inputs unless pinned explicitly
    if cfg.ensemble.waist == delta_waist(cfg.species, cfg.ensemble.theta):
        values["waist"] = None
    if cfg.timing.v_x == STANDARD_GRAVITY * cfg.timing.T / 2.0:
        values["v_x"] = None
    if cfg.cutoff == default_cutoff(cfg.pulse_power):
        values["cutoff"] = None
    values.update(kw)
    return build_config(values)
