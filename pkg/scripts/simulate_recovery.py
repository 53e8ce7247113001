"""Parameter recovery of the unrestricted fit as the sample size grows.

    python3 scripts/simulate_recovery.py --sizes 1000 10000 100000 --reps 5
"""
import argparse
import time
from dataclasses import dataclass

import numpy as np

from causalvar.model import CvarModel, fit_unrestricted, simulate

TRUE_MODEL = CvarModel(
    A=[[1, 0.3, 0, -0.2], [0, 1, 0.4, 0], [0, 0, 1, 0.25], [0, 0, 0, 1]],
    B=([[-0.4, 0.1, 0, 0], [0, -0.3, 0.1, 0], [0.05, 0, -0.5, 0], [0, 0, 0.1, -0.2]],),
    Delta=[1.0, 0.5, 2.0, 0.8],
)


@dataclass
class RecoveryConfig:
    sizes: tuple[int, ...] = (1000, 10_000, 100_000, 200_000)
    reps: int = 5
    seed: int = 0


def max_error(fit, model) -> float:
    return max(np.abs(fit.A - model.A).max(),
               max(np.abs(b - b0).max() for b, b0 in zip(fit.B, model.B)),
               np.abs(fit.Delta - model.Delta).max())


def run(cfg: RecoveryConfig, model=TRUE_MODEL):
    print(f"{'n':>8} {'mean err':>10} {'max err':>10} {'sec/fit':>8}")
    for n in cfg.sizes:
        errs, start = [], time.perf_counter()
        for r in range(cfg.reps):
            data = simulate(model, n, seed=cfg.seed + r)
            errs.append(max_error(fit_unrestricted(data, model.p), model))
        per_fit = (time.perf_counter() - start) / cfg.reps
        print(f"{n:>8} {np.mean(errs):>10.4f} {np.max(errs):>10.4f} {per_fit:>8.3f}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=list(RecoveryConfig.sizes))
    ap.add_argument("--reps", type=int, default=RecoveryConfig.reps)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    run(RecoveryConfig(tuple(args.sizes), args.reps, args.seed))


if __name__ == "__main__":
    main()
