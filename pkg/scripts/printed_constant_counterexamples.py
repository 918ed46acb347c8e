"""Search for vectors where a printed norm constant is exceeded.

Runs the Q/P bound suite on random vectors and keeps, per tag, the instance
with the largest measured/printed ratio. The sharp bounds must still hold.
"""

import argparse
import json
import math
import sys

import numpy as np

from wgl import riesz_products as rp


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--max-n", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    best: dict[str, dict] = {}
    sharp_violations = 0
    for _ in range(args.trials):
        n = int(rng.integers(1, args.max_n + 1))
        s = float(rng.choice([1.0, rng.uniform(1, 2), 2.0, rng.uniform(2, 6)]))
        eps = float(rng.uniform(0.05, 1.0))
        x = rng.standard_normal(n)
        for row in rp.verify_key_bounds(x, eps, s).rows:
            sharp_violations += not row.ok
            if not row.printed_bound:
                continue
            ratio = row.measured / row.printed_bound
            if ratio > best.get(row.tag, {}).get("ratio", -math.inf):
                best[row.tag] = {"ratio": ratio, "n": n, "s": s, "epsilon": eps, "x": x.tolist(),
                                 "measured": row.measured, "printed_bound": row.printed_bound,
                                 "sharp_bound": row.bound, "quantity": row.quantity}
    payload = {"experiment": "printed_constant_counterexamples", "args": vars(args),
               "sharp_violations": sharp_violations,
               "exceeded": sorted(t for t, r in best.items() if r["ratio"] > 1 + 1e-9),
               "worst_by_tag": best}
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 1 if sharp_violations else 0


if __name__ == "__main__":
    sys.exit(main())
