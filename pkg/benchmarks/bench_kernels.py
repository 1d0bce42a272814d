"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Reports the best wall time of each kernel on representative inputs and
checks that both backends agree.
"""

import argparse
import timeit

import numpy as np

from permwave import _pykernels
from permwave.ambiguity import GridSpec
from permwave.codec import WaveformParams, random_symbol

try:
    from permwave import _ckernels
except ImportError:
    _ckernels = None


def af_case(n):
    p = WaveformParams(L=8, M=4)
    s = random_symbol(p, np.random.default_rng(0))
    taus, omegas = GridSpec(n, n).axes(p)
    return (p.omegas[np.asarray(s.perm)], s.phases(p.M), p.T, taus, omegas)


def detect_case(batch, L, M):
    X = np.random.default_rng(1).normal(size=(batch, L * M, L))
    return X, M


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; only the Python backend is available")

    rows = []
    for n in (128, 512):
        a = af_case(n)
        t_py = best(lambda: _pykernels.af_grid(*a), args.repeat)
        row = [f"af_grid {n}x{n} (L=8)", t_py]
        if _ckernels:
            t_c = best(lambda: _ckernels.af_grid(*a, 1), args.repeat)
            err = np.max(np.abs(_pykernels.af_grid(*a) - _ckernels.af_grid(*a, 1)))
            row += [t_c, err]
        rows.append(row)
    for batch, L, M in ((4096, 4, 4), (1024, 8, 4)):
        X, M_ = detect_case(batch, L, M)
        t_py = best(lambda: _pykernels.detect_batch(X, M_), args.repeat)
        row = [f"detect_batch {batch} x L={L}, M={M}", t_py]
        if _ckernels:
            t_c = best(lambda: _ckernels.detect_batch(X, M_), args.repeat)
            a, b = _pykernels.detect_batch(X, M_), _ckernels.detect_batch(X, M_)
            err = float(np.any(a[0] != b[0]) or np.any(a[1] != b[1]))
            row += [t_c, err]
        rows.append(row)

    print(f"{'kernel':34s} {'python [s]':>11s} {'compiled [s]':>13s} {'speed-up':>9s} {'max diff':>9s}")
    for r in rows:
        if len(r) == 2:
            print(f"{r[0]:34s} {r[1]:11.4f}")
        else:
            print(f"{r[0]:34s} {r[1]:11.4f} {r[2]:13.4f} {r[1] / r[2]:9.1f} {r[3]:9.1e}")


if __name__ == "__main__":
    main()
