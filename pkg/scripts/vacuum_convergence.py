"""First-order convergence of the simulated vacuum expectation to exp(T A).

    python scripts/vacuum_convergence.py --horizon 1 --levels 8
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from ccrcocycle.focksim import DiscreteCocycle, vacuum_expectation
from ccrcocycle.generators import BlockGenerator, expectation_semigroup
from ccrcocycle.sampling import random_projection_generator


@dataclass
class ConvergenceConfig:
    horizon: float = 1.0
    first_slices: int = 100
    levels: int = 6
    seed: int = 0


def table(F: BlockGenerator, cfg: ConvergenceConfig) -> list[tuple[int, float, float]]:
    exact = expectation_semigroup(F, cfg.horizon)
    rows, prev = [], None
    for k in range(cfg.levels):
        N = cfg.first_slices * 2 ** k
        err = float(np.linalg.norm(vacuum_expectation(DiscreteCocycle(F, cfg.horizon / N, N)) - exact, 2))
        rows.append((N, err, np.nan if prev is None else err / prev))
        prev = err
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--levels", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    cfg = ConvergenceConfig(horizon=args.horizon, levels=args.levels, seed=args.seed)
    scalar = BlockGenerator.from_matrix([[-1, 1], [1, -1]], 1, 1)
    random_F = random_projection_generator(2, 2, np.random.default_rng(cfg.seed))[0]
    for name, F in (("F = [[-1, 1], [1, -1]]", scalar), ("random projection generator, n=d=2", random_F)):
        print(name)
        print(f"  {'N':>7} {'error':>11} {'ratio':>7}")
        for N, err, ratio in table(F, cfg):
            print(f"  {N:>7} {err:11.4e} {ratio:7.3f}")


if __name__ == "__main__":
    main()
