"""Compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times the ladder ODE over one pulse and two end-to-end workloads (a
plane-wave shift extraction and an ensemble fringe point) with each
backend, and reports the largest difference between their outputs.
"""

import argparse
import os
import time

import numpy as np

from recoilshift import _core, _fallback
from recoilshift.config import build_config
from recoilshift.detection import fringe_point, run_scenario
from recoilshift.dynamics import FountainTiming, omega0_for_power


def best_of(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def chains_case(mod, power):
    tm = FountainTiming(0.15, 0.5, 0.8)
    N = max(9, 2 * power + 5)
    om = omega0_for_power(power, tm.tau)

    def run():
        e = np.zeros((1, 2 * N + 1), complex)
        g = np.zeros_like(e)
        g[0, N] = 1.0
        p0, p1 = tm.T_b - tm.tau / 2, tm.T_b + tm.tau / 2
        st = mod.integrate_chains(e, g, p0, p1, _core.PROFILE_COSINE, om, tm.tau, tm.T_b, 0.3,
                                  tm.k, 0.0, 0.0, 1e-11, 1e-14, tm.tau / 50, 200000)
        return np.concatenate([e.ravel(), g.ravel()]), st
    return run


def end_to_end(mod, cfg, what):
    def run():
        saved = _core.integrate_chains
        _core.integrate_chains = mod.integrate_chains
        try:
            if what == "shift":
                return np.array([run_scenario(cfg).shift])
            fp = fringe_point(cfg, 0.0)
            return np.array([fp.P_e_raw, fp.P_g_raw])
        finally:
            _core.integrate_chains = saved
    return run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    compiled = _core.load_backend(pure=False)
    if compiled is _fallback:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")
    print(f"{'case':<28}{'python s':>12}{'compiled s':>12}{'speedup':>10}{'max rel':>12}")
    cases = [(f"integrate_chains N={p}", lambda m, p=p: chains_case(m, p)) for p in (1, 3, 7)]
    pw = build_config(dict(mode="plane_wave", pulse_power=3))
    ens = build_config({})
    cases += [("plane-wave shift N=3", lambda m: end_to_end(m, pw, "shift")),
              ("ensemble fringe point N=1", lambda m: end_to_end(m, ens, "point"))]
    for label, make in cases:
        tp, op = best_of(make(_fallback), args.repeat)
        tc, oc = best_of(make(compiled), args.repeat)
        if isinstance(op, tuple):
            op, oc = op[0], oc[0]
        diff = float(np.max(np.abs(op - oc) / np.maximum(np.abs(op), 1e-300)))
        print(f"{label:<28}{tp:>12.4f}{tc:>12.4f}{tp / tc:>10.1f}{diff:>12.2e}")
    print(f"default backend: {_core.BACKEND_NAME} (RECOILSHIFT_PURE={os.environ.get('RECOILSHIFT_PURE', '')!r})")


if __name__ == "__main__":
    main()
