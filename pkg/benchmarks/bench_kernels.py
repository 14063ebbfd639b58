"""Compare the compiled and pure-Python shift-polynomial kernels.

Usage: python3 benchmarks/bench_kernels.py [--N 6] [--repeat 3]

Two measurements per backend: raw ``mul_terms`` on the entries of a large
Lax matrix, and end-to-end generation of the hierarchy equations (each
backend in its own interpreter so module state cannot leak).
"""

import argparse
import os
import subprocess
import sys
import timeit

from toeplitz_dpii import _kernels_py
from toeplitz_dpii.lax import build_T

try:
    from toeplitz_dpii import _kernels
except ImportError:
    _kernels = None

END_TO_END = (
    "import time; t=time.perf_counter();"
    "from toeplitz_dpii.hierarchy import generate_equation;"
    "from toeplitz_dpii.shiftpoly import BACKEND;"
    "[generate_equation(k) for k in range(1, {n} + 1)];"
    "print(BACKEND, time.perf_counter() - t)"
)


def end_to_end(big_n, pure):
    env = dict(os.environ)
    if pure:
        env["TOEPLITZ_DPII_PURE_PYTHON"] = "1"
    else:
        env.pop("TOEPLITZ_DPII_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", END_TO_END.format(n=big_n)],
                         env=env, capture_output=True, text=True, check=True)
    backend, seconds = out.stdout.split()
    return backend, float(seconds)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--N", type=int, default=6)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    T = build_T(min(args.N, 5))
    mid = T.T_k(T.big_n + 1)
    a = mid[0][1].terms
    b = mid[1][0].terms
    print(f"mul_terms on {len(a)} x {len(b)} terms")
    backends = [("python", _kernels_py)]
    if _kernels is not None:
        backends.append(("cython", _kernels))
    else:
        print("compiled kernels not built; only the fallback is timed")
    assert _kernels is None or _kernels.mul_terms(a, b) == _kernels_py.mul_terms(a, b)
    for name, mod in backends:
        best = min(timeit.repeat(lambda: mod.mul_terms(a, b), number=1, repeat=args.repeat))
        print(f"  {name:7s} {best * 1e3:9.2f} ms")

    print(f"generate_equation(1..{args.N})")
    for pure in (True, False):
        if not pure and _kernels is None:
            break
        times = [end_to_end(args.N, pure) for _ in range(args.repeat)]
        print(f"  {times[0][0]:7s} {min(t for _, t in times):9.3f} s")


if __name__ == "__main__":
    main()
