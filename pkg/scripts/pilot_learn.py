"""Calibration run for the monomial learnability check.

Trains on x**2 (D=1, width 512) with a few candidate (learning rate, steps)
settings on seeds disjoint from the acceptance seeds, and writes the chosen
setting plus the observed medians to tests/fixtures/pilot_learn.json.

    python scripts/pilot_learn.py
"""

import json
import sys
import time
from pathlib import Path
from statistics import median

from lrgakit.mlp import MonomialTask, TrainConfig, train_monomial

CANDIDATES = [(0.05, 3000), (0.1, 3000), (0.2, 2000)]
PILOT_SEEDS = [100, 101, 102]
WIDTH = 512
M_BIG, M_SMALL = 1000, 50
OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "pilot_learn.json"


def main() -> int:
    task = MonomialTask((2,))
    runs = []
    for lr, steps in CANDIDATES:
        t0 = time.time()
        cfgs = [TrainConfig(learning_rate=lr, steps=steps, seed=s) for s in PILOT_SEEDS]
        big = [train_monomial(task, M_BIG, WIDTH, c) for c in cfgs]
        small = [train_monomial(task, M_SMALL, WIDTH, c) for c in cfgs]
        row = {
            "learning_rate": lr,
            "steps": steps,
            "test_mse_m1000": [r.test_mse for r in big],
            "test_mse_m50": [r.test_mse for r in small],
            "median_m1000": median(r.test_mse for r in big),
            "median_m50": median(r.test_mse for r in small),
            "diverged": sum(r.diverged for r in big + small),
            "seconds": time.time() - t0,
        }
        runs.append(row)
        print(json.dumps(row), file=sys.stderr, flush=True)
    ok = [r for r in runs if r["diverged"] == 0]
    best = min(ok, key=lambda r: (max(r["test_mse_m1000"]), r["seconds"]))
    doc = {
        "task": {"delta": [2], "width": WIDTH, "m": [M_SMALL, M_BIG]},
        "seeds": PILOT_SEEDS,
        "candidates": runs,
        "chosen": {"learning_rate": best["learning_rate"], "steps": best["steps"]},
        "pilot_median_m1000": best["median_m1000"],
        "tolerance_2x_pilot_median": 2 * best["median_m1000"],
        "selection": "no divergence, then smallest worst-seed test MSE at m=1000, then runtime",
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(doc, indent=2) + "\n")
    print(json.dumps(doc["chosen"]))
    return 0


if __name__ == "__main__":
    sys.exit(main())
