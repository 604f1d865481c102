"""Time the jitted kernels against the numpy/python fallbacks.

Run: python3 benchmarks/bench_kernels.py [--repeat R]
"""
import argparse
import timeit

import numpy as np

from slabperc import _kernels as K
from slabperc.geometry import Region, SlabSpec


def cases(rng):
    big = Region.box(64, 64, SlabSpec(2, 3))
    u, v = big.bond_u, big.bond_v
    open_ = rng.random(u.size) < 0.5
    mask = np.ones(big.n_sites, dtype=bool)
    yield "label 64x64x2", (lambda: K._label_numba(big.n_sites, u, v, open_, mask)), \
        (lambda: K._label_numpy(big.n_sites, u, v, open_, mask))

    su, sv = u[open_], v[open_]
    s, t = 0, big.n_sites - 1
    yield "backbone 64x64x2", (lambda: K._backbone_numba(big.n_sites, su, sv, s, t)), \
        (lambda: K._backbone_python(big.n_sites, su, sv, s, t))

    small = Region.box(3, 3, SlabSpec(1, 2))
    x = small.rect_mask(0, 1, 0, 3)
    y = small.rect_mask(2, 3, 0, 3)
    m = np.ones(small.n_sites, dtype=bool)
    yield "table 3x3 (2^12 states)", (lambda: K._table_numba(small.n_sites, small.bond_u, small.bond_v, x, y, m)), \
        (lambda: K._table_numpy(small.n_sites, small.bond_u, small.bond_v, x, y, m))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<26}{'numba ms':>12}{'fallback ms':>14}{'speedup':>10}")
    for name, fast, slow in cases(rng):
        assert np.array_equal(fast(), slow())
        tf = min(timeit.repeat(fast, number=1, repeat=args.repeat)) * 1e3
        ts = min(timeit.repeat(slow, number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<26}{tf:>12.3f}{ts:>14.3f}{ts / tf:>10.1f}")


if __name__ == "__main__":
    main()
