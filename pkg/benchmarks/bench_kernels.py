#!/usr/bin/env python3
"""Benchmark the compiled series kernels against the pure-Python fallback.

The residue-ladder evaluation in double-double arithmetic is the hot inner
loop of every analytic metric (a single quadrature cross-check makes several
hundred such calls), so this is the comparison that decides whether the
extension is worth building on a given host.

Run:  python benchmarks/bench_kernels.py
"""

import math
import time

from fsorf.kernels import _series_py as pure

try:
    from fsorf.kernels import _series_cy as compiled
except ImportError:
    compiled = None

ALPHA, BETA, XI = 2.902, 2.51, 6.7
X2 = XI * XI

CASES = [
    ("exp-reduction  G(1,0/0,1)", (), (0.0,), 1, 0, (0.5, 5.0, 40.0)),
    ("bessel         G(2,0/0,2)", (), (0.196, -0.196), 2, 0, (0.5, 5.0, 40.0)),
    ("snr density    G(3,0/1,3)", (X2 + 1.0,), (X2, ALPHA, BETA), 3, 0,
     (0.5, 5.0, 40.0)),
    ("snr cdf        G(3,1/2,4)", (1.0, X2 + 1.0), (X2, ALPHA, BETA, 0.0),
     3, 1, (0.5, 5.0, 40.0, 200.0)),
    ("ser kernel     G(3,2/3,4)", (0.5, 1.0, X2 + 1.0),
     (X2, ALPHA, BETA, 0.0), 3, 2, (1e-3, 0.5, 5.0)),
]

HYP_CASES = [
    ("2F1 series", lambda mod: mod.hyp2f1_series(1.0, 3.5, 4.5, 0.45,
                                                 1e-12, 10 ** 6)),
    ("1F1 series", lambda mod: mod.hyp1f1_series(1.0, 1.5, 8.0,
                                                 1e-12, 10 ** 6)),
]


def time_meijer(mod, reps):
    t0 = time.perf_counter()
    sink = 0.0
    for _ in range(reps):
        for _, a, b, m, n, args in CASES:
            for x in args:
                v, _, _ = mod.meijer_slater(a, b, m, n, x, 0.0, False,
                                            1e-10, 100_000)
                sink += v
    return (time.perf_counter() - t0) / reps, sink / reps


def time_hyp(mod, reps):
    t0 = time.perf_counter()
    sink = 0.0
    for _ in range(reps):
        for _, fn in HYP_CASES:
            v, _ = fn(mod)
            sink += v
    return (time.perf_counter() - t0) / reps, sink / reps


def main():
    print(f"{'kernel':<28} {'pure':>12} {'compiled':>12} {'speedup':>9}")
    t_pure, s1 = time_meijer(pure, 3)
    if compiled is not None:
        t_comp, s2 = time_meijer(compiled, 50)
        if abs(s1 - s2) > 1e-9 * max(abs(s1), 1.0):
            raise SystemExit("implementations disagree!")
        print(f"{'meijer ladder batch':<28} {t_pure * 1e3:>10.2f}ms "
              f"{t_comp * 1e3:>10.3f}ms {t_pure / t_comp:>8.1f}x")
    else:
        print(f"{'meijer ladder batch':<28} {t_pure * 1e3:>10.2f}ms "
              f"{'(not built)':>12}")

    t_pure, s1 = time_hyp(pure, 200)
    if compiled is not None:
        t_comp, s2 = time_hyp(compiled, 2000)
        if abs(s1 - s2) > 1e-9 * max(abs(s1), 1.0):
            raise SystemExit("implementations disagree!")
        print(f"{'hypergeometric series':<28} {t_pure * 1e6:>10.2f}us "
              f"{t_comp * 1e6:>10.3f}us {t_pure / t_comp:>8.1f}x")
    else:
        print(f"{'hypergeometric series':<28} {t_pure * 1e6:>10.2f}us "
              f"{'(not built)':>12}")

    # end-to-end: one analytic outage evaluation through each kernel set
    import os
    import subprocess
    import sys
    code = (
        "import time; from fsorf.channel import FsoChannelSpec, RfNetworkSpec;"
        "from fsorf.metrics import SystemSpec, outage;"
        "s = SystemSpec(FsoChannelSpec(2.902, 2.51, 6.7, 'heterodyne', 500.0),"
        "RfNetworkSpec(1, 2, 2, 0.8, 100.0));"
        "outage(s); t0 = time.perf_counter();"
        "n = 20;"
        "[outage(s) for _ in range(n)];"
        "print((time.perf_counter() - t0) / n)"
    )
    times = {}
    for label, env_val in (("compiled", "0"), ("pure", "1")):
        env = dict(os.environ, FSORF_PURE_PYTHON=env_val)
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        times[label] = float(out.stdout.strip())
    print(f"{'outage() end to end':<28} {times['pure'] * 1e3:>10.2f}ms "
          f"{times['compiled'] * 1e3:>10.3f}ms "
          f"{times['pure'] / times['compiled']:>8.1f}x")


if __name__ == "__main__":
    main()
