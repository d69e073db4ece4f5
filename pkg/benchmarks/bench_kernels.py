"""Time the compiled kernels against their numpy versions.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from qencost import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    n = 20
    psi = (rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)).astype(np.complex128)
    c, s = np.cos(0.3), np.sin(0.3)
    bits = rng.integers(0, 2, size=(1 << 16, 64)).astype(np.uint8)
    ctrl = np.array([3, 17, 40], dtype=np.int64)
    vals = np.array([1, 0, 1], dtype=np.uint8)

    def rotation(mod):
        v = psi.copy()
        return lambda: [mod.apply_matrix(v, n, q, c, s, -s, c, 0, 0) for q in range(0, n, 4)]

    def controlled_swap(mod):
        v = psi.copy()
        return lambda: mod.apply_swap(v, n, 2, 15, 1 << 3, 1 << 3)

    def branch_mcx(mod):
        b = bits.copy()
        return lambda: [mod.mcx_rows(b, t, ctrl, vals) for t in (0, 10, 63)]

    def band_count(mod):
        return lambda: mod.count_band_sequences(4, 11, 1, 4)

    return {
        "5 rotations, 20 qubits": rotation,
        "controlled SWAP, 20 qubits": controlled_swap,
        "3 MCX on 65536 branches": branch_mcx,
        "band count 4^11": band_count,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    mods = kernels.backends()
    names = sorted(mods)
    print(f"{'case':30s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, make in cases().items():
        t = {name: best_of(make(mods[name]), args.repeat) for name in names}
        row = f"{label:30s}" + "".join(f"{t[n] * 1e3:10.2f}ms" for n in names)
        if len(names) == 2:
            row += f"{t['python'] / t['compiled']:11.1f}x"
        print(row)
    if "compiled" not in mods:
        print("compiled extension not built; only the numpy backend was timed")


if __name__ == "__main__":
    main()
