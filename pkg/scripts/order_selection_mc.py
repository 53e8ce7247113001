"""Monte Carlo frequencies of the order picked by each information criterion.

    python3 scripts/order_selection_mc.py --runs 100 --n 2000 --max-order 5
"""
import argparse
from collections import Counter
from dataclasses import dataclass

from causalvar.model import CvarModel, simulate
from causalvar.select import CRITERIA, order_selection

TRUE_MODEL = CvarModel(
    A=[[1, 0.4, -0.3], [0, 1, 0.5], [0, 0, 1]],
    B=([[-0.5, 0.2, 0.0], [0.1, -0.4, 0.2], [0.0, 0.1, -0.3]],),
    Delta=[1.0, 0.7, 1.3],
)


@dataclass
class OrderMcConfig:
    runs: int = 100
    n: int = 2000
    max_order: int = 5
    seed: int = 0
    aicc_form: str = "full"


def run(cfg: OrderMcConfig, model=TRUE_MODEL) -> dict[str, Counter]:
    picks = {c: Counter() for c in CRITERIA}
    for r in range(cfg.runs):
        data = simulate(model, cfg.n, seed=cfg.seed + r)
        best = order_selection(data, cfg.max_order, aicc_form=cfg.aicc_form).best
        for c in CRITERIA:
            picks[c][best[c]] += 1
    print(f"true order {model.p}; {cfg.runs} runs of n={cfg.n}")
    print("criterion " + " ".join(f"p={p:<3}" for p in range(1, cfg.max_order + 1)))
    for c in CRITERIA:
        print(f"{c:<9} " + " ".join(f"{picks[c][p]:<5}" for p in range(1, cfg.max_order + 1)))
    return picks


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=OrderMcConfig.runs)
    ap.add_argument("--n", type=int, default=OrderMcConfig.n)
    ap.add_argument("--max-order", type=int, default=OrderMcConfig.max_order)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--aicc-form", default="full")
    args = ap.parse_args(argv)
    run(OrderMcConfig(args.runs, args.n, args.max_order, args.seed, args.aicc_form))


if __name__ == "__main__":
    main()
