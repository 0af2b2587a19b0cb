"""Named scenario grids, batch execution and CSV/summary output."""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import build_config, dump_config
from .detection import run_scenario
from .ensemble import delta_waist
from .weakfield import WeakFieldInputs, predicted_shift
from .wavepacket import CAESIUM

COLUMNS = ["preset", "N", "w_mm", "theta_uK", "T_b_s", "T_s", "half_width_mm", "shift_rel",
           "contrast", "epsilon_47", "samples", "runtime_s", "error"]
WEAK_COLUMNS = ["shift_numeric", "shift_analytic", "ratio"]

POWERS = (1, 3, 5, 7)
WIDTHS_MM = (1.0, 2.0, 3.0, 4.0, 5.0)

CURVES = {
    "a": {},
    "b": dict(T_b=0.21, T=0.25, T_d=0.67),
    "c": dict(theta=3.2e-6),
}


class UnknownPreset(KeyError):
    pass


@dataclass
class Dataset:
    preset: str
    columns: list
    rows: list = field(default_factory=list)
    configs: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    @property
    def failures(self) -> int:
        return sum(1 for r in self.rows if r.get("error"))


def _grid(base, curve, powers=POWERS, widths=WIDTHS_MM, **extra):
    out = []
    for n in powers:
        for w in widths:
            kw = dict(base)
            kw.update(CURVES[curve])
            kw.update(pulse_power=n, w=w * 1e-3)
            kw.update(extra)
            out.append(kw)
    return out


def _weak_compare():
    dw = delta_waist(CAESIUM, 0.8e-6)
    # pure state, single packet at the origin, detection region wide open
    return [dict(mode="weak_field", pulse_profile="gaussian", omega0_tau=np.pi / 20, w=dw,
                 waist=dw, samples=1, half_width=1.0, cutoff=3)]


def preset_grid(name: str) -> list[dict]:
    """Flat SI override dicts, one per output row."""
    if name == "table1":
        return [dict(mode="plane_wave", pulse_power=n) for n in POWERS]
    if name in ("fig3a", "fig3b", "fig3c"):
        return _grid({}, name[-1])
    if name == "fig4":
        return _grid({}, "a")
    if name == "tb-zero":
        return [dict(pulse_power=1, w=w * 1e-3, T_b=tb) for w in (1.0, 5.0) for tb in (0.15, 0.0)]
    if name == "detection-x2":
        return [dict(pulse_power=1, w=w * 1e-3, half_width=hw * 1e-3, **CURVES[c])
                for hw in (5.0, 10.0) for c in ("a", "b", "c") for w in (1.0, 5.0)]
    if name == "weakfield-compare":
        return _weak_compare()
    raise UnknownPreset(name)


PRESETS = ("table1", "fig3a", "fig3b", "fig3c", "fig4", "tb-zero", "detection-x2",
           "weakfield-compare")


def preset_configs(name, samples=None, nrec=None):
    cfgs = []
    for kw in preset_grid(name):
        if samples is not None and kw.get("mode") != "weak_field":
            kw["samples"] = samples
        if nrec is not None:
            kw["cutoff"] = nrec
        cfgs.append(build_config(kw))
    return cfgs


def run_config(cfg, preset_name) -> tuple[dict, object]:
    """One output row; engine errors are caught and tagged."""
    row = {
        "preset": preset_name, "N": cfg.pulse_power, "w_mm": cfg.ensemble.w / 1e-3,
        "theta_uK": cfg.ensemble.theta / 1e-6, "T_b_s": cfg.timing.T_b, "T_s": cfg.timing.T,
        "half_width_mm": cfg.region.half_width / 1e-3, "samples": cfg.samples,
        "shift_rel": math.nan, "contrast": math.nan, "epsilon_47": math.nan, "error": "",
    }
    t0 = time.perf_counter()
    res = None
    try:
        res = run_scenario(cfg)
        row.update(shift_rel=res.shift, contrast=res.contrast, epsilon_47=res.diagnostics.epsilon)
        if cfg.mode == "weak_field":
            inp = WeakFieldInputs(cfg.ensemble, cfg.timing, cfg.timing.tau, 0.0, cfg.omega0)
            ana = predicted_shift(inp)
            row.update(shift_numeric=res.shift, shift_analytic=ana, ratio=res.shift / ana)
    except Exception as exc:  # noqa: BLE001 - a failed row must not stop the grid
        row["error"] = f"{type(exc).__name__}: {exc}"
        if cfg.mode == "weak_field":
            row.update(shift_numeric=math.nan, shift_analytic=math.nan, ratio=math.nan)
    row["runtime_s"] = time.perf_counter() - t0
    return row, res


def run_configs(cfgs, preset_name, threads=1) -> Dataset:
    weak = any(c.mode == "weak_field" for c in cfgs)
    ds = Dataset(preset_name, COLUMNS + (WEAK_COLUMNS if weak else []))
    if threads > 1 and len(cfgs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: run_config(c, preset_name), cfgs))
    else:
        results = [run_config(c, preset_name) for c in cfgs]
    for cfg, (row, res) in zip(cfgs, results):
        ds.rows.append(row)
        ds.configs.append(cfg)
        ds.diagnostics.append(None if res is None else res.diagnostics)
    return ds


def run_preset(name, threads=1, samples=None, nrec=None) -> Dataset:
    return run_configs(preset_configs(name, samples, nrec), name, threads)


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.9e}"


def emit_report(dataset: Dataset, path) -> str:
    """Write ``path`` (CSV) and ``path + '.summary.txt'``; returns the summary path."""
    if not dataset.rows:
        raise ValueError("dataset is empty")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        write_csv(dataset, fh)
    summary = str(path) + ".summary.txt"
    with open(summary, "w", encoding="utf-8") as fh:
        fh.write(summary_text(dataset))
    return summary


def write_csv(dataset: Dataset, fh):
    w = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    w.writerow(dataset.columns)
    for row in dataset.rows:
        w.writerow([_fmt(row.get(c, "")) for c in dataset.columns])


def summary_text(dataset: Dataset) -> str:
    lines = [f"preset: {dataset.preset}", f"rows: {len(dataset.rows)}",
             f"failed rows: {dataset.failures}", ""]
    for i, (row, diag) in enumerate(zip(dataset.rows, dataset.diagnostics)):
        head = f"row {i}: N={row['N']} w_mm={row['w_mm']:g} theta_uK={row['theta_uK']:g} T_b_s={row['T_b_s']:g}"
        if row.get("error"):
            lines.append(f"{head}  ERROR {row['error']}")
            continue
        lines.append(
            f"{head}  epsilon={diag.epsilon:.3e} edge_pop={diag.edge_population:.3e} "
            f"norm_drift={diag.norm_drift:.3e} quad_err={diag.quad_error:.3e} "
            f"fringe_evals={diag.evaluations}"
        )
    if dataset.configs:
        lines += ["", "effective configuration of row 0:", dump_config(dataset.configs[0])]
    return "\n".join(lines) + "\n"


def read_csv(path) -> list[dict]:
    """Parse a CSV written by ``emit_report`` back into typed rows."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            row = {}
            for k, v in rec.items():
                if k in ("preset", "error"):
                    row[k] = v
                elif k in ("N", "samples"):
                    row[k] = int(v)
                else:
                    row[k] = float(v)
            out.append(row)
    return out
