"""Lower estimates of the L1 Khintchin constant and of Grothendieck ratios.

kappa(n) comes from minimising ||sum x_i r_i||_1 over the unit sphere; the
ratio sweep reports vector/scalar norm ratios for random real matrices.
"""

import argparse
import json
import sys

import numpy as np

from wgl import tensor_norms as tn


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kappa-n", type=int, nargs="+", default=[2, 3, 4, 5, 6])
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 3, 4, 6])
    ap.add_argument("--matrices", type=int, default=20)
    ap.add_argument("--dim", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    kappa = [{"n": n, **tn.kappa_estimate(n, seed=args.seed).as_dict()} for n in args.kappa_n]
    rng = np.random.default_rng(args.seed)
    ratios = []
    for m in args.sizes:
        vals = [tn.grothendieck_ratio(rng.standard_normal((m, m)), args.dim, restarts=8,
                                      seed=int(rng.integers(2**31))).ratio
                for _ in range(args.matrices)]
        ratios.append({"size": m, "max_ratio": max(vals), "mean_ratio": float(np.mean(vals))})
    text = json.dumps({"experiment": "constant_sweeps", "args": vars(args),
                       "kappa": kappa, "grothendieck": ratios}, indent=2, default=str)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
