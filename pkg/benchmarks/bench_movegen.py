"""Compare the compiled and pure-Python move-generation kernels.

Usage: python benchmarks/bench_movegen.py [--hands N] [--seed S]
"""

from __future__ import annotations

import argparse
import random
import statistics
import time

from guanzero import cards
from guanzero.combos import KERNEL_BACKEND, _gen as gen_py

try:
    from guanzero.combos import _gen_c as gen_c
except ImportError:
    gen_c = None


def bench(kernel, hands, levels, repeats=3) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        total = 0
        for hand, level in zip(hands, levels):
            total += len(kernel.generate_leads(hand, level))
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--hands", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    hands, levels = [], []
    for _ in range(args.hands):
        hands.append(tuple(sorted(rng.sample(range(cards.NUM_CARDS), 27))))
        levels.append(rng.randrange(13))

    print(f"active backend: {KERNEL_BACKEND}")
    t_py = bench(gen_py, hands, levels)
    print(f"pure-python : {t_py:8.3f}s  "
          f"({args.hands / t_py:7.1f} full hands/s)")
    if gen_c is None:
        print("compiled    : not built (pip install -e . to compile)")
        return
    t_c = bench(gen_c, hands, levels)
    print(f"compiled    : {t_c:8.3f}s  "
          f"({args.hands / t_c:7.1f} full hands/s)")
    print(f"speedup     : {t_py / t_c:8.2f}x")


if __name__ == "__main__":
    main()
