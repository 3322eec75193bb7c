"""How reliably does the weight grid search recover a planted video weight?

Plants mos = qv**w * qa**(1 - w) + noise and reports the hit rate (recovered
weight within one grid step) for a sweep of sample sizes and noise levels.
"""

import argparse

import numpy as np

from oavqa.fusion import WEIGHT_GRID, grid_search_weight


def hit_rate(w: float, n: int, noise: float, seeds: int) -> float:
    step = WEIGHT_GRID[1] - WEIGHT_GRID[0]
    hits = 0
    for seed in range(seeds):
        g = np.random.default_rng(seed)
        qv, qa = g.random(n), g.random(n)
        mos = qv**w * qa ** (1 - w) + g.normal(0.0, noise, n)
        hits += abs(grid_search_weight(qv, qa, mos) - w) <= step + 1e-9
    return hits / seeds


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--weight", type=float, default=0.65)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--sizes", default="30,100,300")
    ap.add_argument("--noise", default="0.01,0.05,0.1,0.2")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    noises = [float(s) for s in args.noise.split(",")]
    print("n \\ noise " + "".join(f"{s:>8}" for s in noises))
    for n in sizes:
        print(f"{n:<10}" + "".join(f"{hit_rate(args.weight, n, s, args.seeds):8.2f}" for s in noises))


if __name__ == "__main__":
    main()
