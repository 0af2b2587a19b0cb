"""``simulate`` command line entry point."""

from __future__ import annotations

import argparse
import os
import sys

from .config import ParseError, ValidationError, load_config, with_overrides
from .scenarios import PRESETS, UnknownPreset, emit_report, preset_configs, run_configs, write_csv

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARTIAL = 2


def _threads(arg):
    if arg is not None:
        return arg
    env = os.environ.get("SIM_THREADS", "").strip()
    if not env:
        return 1
    try:
        n = int(env)
    except ValueError:
        raise ValidationError(f"SIM_THREADS must be an integer, got {env!r}") from None
    if n < 1:
        raise ValidationError("SIM_THREADS must be >= 1")
    return n


def build_parser():
    p = argparse.ArgumentParser(prog="simulate",
                                description="Recoil shift and fringe contrast of a two-zone Ramsey fountain.")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESETS, help="named scenario grid")
    src.add_argument("--config", metavar="PATH", help="key = value run configuration")
    p.add_argument("--out", metavar="PATH", help="CSV output (a .summary.txt sidecar is written next to it); default stdout")
    p.add_argument("--threads", type=int, help="worker threads for grid rows (env SIM_THREADS)")
    p.add_argument("--samples", type=int, help="override the number of z_i samples")
    p.add_argument("--nrec", type=int, help="override the recoil ladder cutoff")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        threads = _threads(args.threads)
        if threads < 1:
            raise ValidationError("--threads must be >= 1")
        if args.preset:
            name = args.preset
            cfgs = preset_configs(name, args.samples, args.nrec)
        else:
            cfg = load_config(args.config)
            over = {}
            if args.samples is not None:
                over["samples"] = args.samples
            if args.nrec is not None:
                over["cutoff"] = args.nrec
            if over:
                cfg = with_overrides(cfg, **over)
            name = cfg.preset
            cfgs = [cfg]
    except (ParseError, ValidationError, UnknownPreset, OSError) as exc:
        print(f"simulate: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    ds = run_configs(cfgs, name, threads)
    if args.out:
        try:
            emit_report(ds, args.out)
        except OSError as exc:
            print(f"simulate: cannot write output: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    else:
        write_csv(ds, sys.stdout)
    for row in ds.rows:
        if row.get("error"):
            print(f"simulate: row failed: {row['error']}", file=sys.stderr)
    return EXIT_PARTIAL if ds.failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
