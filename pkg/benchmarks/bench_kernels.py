"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times sparse polynomial multiplication and modular rank on synthetic
inputs, then an end-to-end Jacobian rank computation with each backend
(run in a subprocess so backend selection happens at import).
"""
from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import time

from neurogeo import _pykernels
from neurogeo.linalg import primes_from_seed

try:
    from neurogeo import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def poly_inputs(rng, nterms, p):
    keys_a = sorted(rng.sample(range(1 << 20), nterms))
    keys_b = sorted(rng.sample(range(1 << 20), nterms))
    return keys_a, [rng.randrange(1, p) for _ in keys_a], keys_b, [rng.randrange(1, p) for _ in keys_b]


def matrix_inputs(rng, n, p):
    return [[rng.randrange(p) for _ in range(n)] for _ in range(n)]


END_TO_END = (
    "import random,time;"
    "from neurogeo import MlpSpec, Activation, BACKEND;"
    "from neurogeo.geometry import generic_rank;"
    "rng=random.Random('bench');"
    "co=(0,)+tuple(rng.choice([-3,-2,-1,1,2,3]) for _ in range(8));"
    "t=time.perf_counter();"
    "r=generic_rank(MlpSpec((2,2,2,1),Activation(co)),trials=1);"
    "print(BACKEND, r.rank, time.perf_counter()-t)"
)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    rng = random.Random(0)
    p = primes_from_seed(0, 1)[0]
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    rows = []
    for nterms in (200, 1000):
        inp = poly_inputs(rng, nterms, p)
        for name, mod in backends:
            rows.append((f"mul_packed {nterms}x{nterms}", name, _best(lambda: mod.mul_packed(*inp, p), args.repeat)))
    for n in (60, 150):
        m = matrix_inputs(rng, n, p)
        for name, mod in backends:
            rows.append((f"rank_mod_p {n}x{n}", name, _best(lambda: mod.rank_mod_p([r[:] for r in m], n, p), args.repeat)))
    for force in ("1", "0"):
        env = dict(os.environ, NEUROGEO_PURE_PYTHON=force)
        out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True, check=True)
        name, _, secs = out.stdout.split()
        rows.append(("generic_rank (2,2,2,1) deg 8", name, float(secs)))
    width = max(len(r[0]) for r in rows)
    print(f"{'case':<{width}}  {'backend':<7}  seconds")
    for case, name, secs in rows:
        print(f"{case:<{width}}  {name:<7}  {secs:.4f}")


if __name__ == "__main__":
    main()
