"""Survey purification and closure over seeded random monomial modules.

Two families over QQ[u,v] with supports at the origin:
  family   direct sums of monomial ideals, finite-length quotients and free modules
  raw      cokernels of uniformly random monomial matrices

    python3 scripts/depth_survey.py --n 50 --seed 4
"""
import argparse
import random
import sys
import time
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from helpers import coker  # noqa: E402
from test_acceptance import R, check_depth, depth_family_module, origin, rand_monomial_matrix  # noqa: E402


def survey(make, n, seed):
    rng = random.Random(seed)
    A = origin()
    counts = Counter()
    for _ in range(n):
        ok, bad = check_depth(make(rng), A)
        counts["stabilized" if ok else "not stabilized"] += 1
        counts["violations"] += len(bad)
    return counts


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--seed", type=int, default=4)
    args = ap.parse_args()
    makers = {
        "family": depth_family_module,
        "raw": lambda rng: coker(R, rand_monomial_matrix(rng)),
    }
    for name, make in makers.items():
        t0 = time.perf_counter()
        c = survey(make, args.n, args.seed)
        print(f"{name:7s} stabilized {c['stabilized']:3d}/{args.n}  violations {c['violations']}  "
              f"{time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
