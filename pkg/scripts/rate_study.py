"""Defect rates of the discrete cocycle for random generators.

Runs the fixed-slice-count study (tau halved, N fixed) on projection
generators, subordinate pairs and rejected generators, then the fixed-horizon
study on vacuum-block rejections. Prints one row per generator.

    python scripts/rate_study.py --count 10 --seed 0
"""
from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass

import numpy as np

from ccrcocycle.focksim import DiscreteCocycle, defect_report, horizon_study, rate_study, standard_probes
from ccrcocycle.sampling import perturb_generator, random_projection_generator, random_subordinate_pair


@dataclass
class RateConfig:
    count: int = 10
    slices: int = 10
    tau_exponents: tuple[int, ...] = (4, 5, 6, 7, 8)
    d_max: int = 2
    seed: int = 0
    horizon: float = 1.0
    horizon_slices: tuple[int, ...] = (5, 10)

    @property
    def taus(self) -> list[float]:
        return [2.0 ** -k for k in self.tau_exponents]


def _fmt(xs):
    return " ".join("   -  " if x is None else f"{x:6.3f}" for x in xs)


def run(cfg: RateConfig) -> dict:
    rng = np.random.default_rng(cfg.seed)
    out = {"config": asdict(cfg), "projection": [], "pairs": [], "rejected": [], "vacuum_only": []}
    print(f"fixed N = {cfg.slices}, tau = 2^-{cfg.tau_exponents[0]} .. 2^-{cfg.tau_exponents[-1]}")
    print("projection generators: idempotence ratios per halving")
    for i in range(cfg.count):
        n, d = int(rng.integers(1, 3)), int(rng.integers(1, cfg.d_max + 1))
        F = random_projection_generator(n, d, rng)[0]
        rep = rate_study(F, cfg.taus, cfg.slices, standard_probes(n, d, cfg.slices, seed=i))
        out["projection"].append(rep)
        print(f"  n={n} d={d}  {_fmt(rep['ratios']['idempotence'])}  final {rep['defects']['idempotence'][-1]:.2e}")
    print("subordinate pairs: subordination ratios per halving ('-' = exact)")
    for i in range(cfg.count):
        n, d = int(rng.integers(1, 3)), int(rng.integers(1, cfg.d_max + 1))
        F, G, _ = random_subordinate_pair(n, d, rng)
        rep = rate_study(F, cfg.taus, cfg.slices, standard_probes(n, d, cfg.slices, seed=i), G=G)
        out["pairs"].append(rep)
        print(f"  n={n} d={d}  {_fmt(rep['ratios']['subordination'])}")
    print(f"rejected (noise/generic) generators: idempotence at tau = {cfg.taus[-1]}")
    for i in range(cfg.count):
        n, d = int(rng.integers(1, 3)), int(rng.integers(1, cfg.d_max + 1))
        F = perturb_generator(random_projection_generator(n, d, rng)[0], rng, 0.5,
                              kind=("noise", "generic")[i % 2])
        c = DiscreteCocycle(F, cfg.taus[-1], cfg.slices)
        val = defect_report(c, cfg.slices, standard_probes(n, d, cfg.slices, seed=i))["max"]["idempotence"]
        out["rejected"].append(val)
        print(f"  n={n} d={d}  {val:.3f}")
    print(f"vacuum-block rejections at fixed horizon T = {cfg.horizon}, N = {list(cfg.horizon_slices)}")
    for i in range(cfg.count):
        n = int(rng.integers(1, 3))
        F = perturb_generator(random_projection_generator(n, 1, rng)[0], rng, 0.5, kind="vacuum")
        rep = horizon_study(F, cfg.horizon, cfg.horizon_slices, seed=i)
        out["vacuum_only"].append(rep)
        print(f"  n={n}  defects {_fmt(rep['defects']['idempotence'])}  extrapolated {rep['limit']['idempotence']:.3f}")
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--count", type=int, default=RateConfig.count)
    p.add_argument("--seed", type=int, default=RateConfig.seed)
    p.add_argument("--slices", type=int, default=RateConfig.slices)
    p.add_argument("--json", help="write the full report here")
    args = p.parse_args()
    report = run(RateConfig(count=args.count, seed=args.seed, slices=args.slices))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(report, fh, indent=2)


if __name__ == "__main__":
    main()
