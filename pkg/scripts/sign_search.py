"""Pick the sign in front of the Delta term of the relative cup product.

For each candidate convention, multiply every pair of cone cocycles
x in E_1(M,U), y in E_1(M,V) on randomized covers of circle bundles over
2-dimensional bases, and count products that fail to be cone cocycles.
The surviving convention is frozen as ``folss.relative.RESIDUAL_SIGN``.

    python scripts/sign_search.py [--seeds N] [--log PATH]
"""
from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction

from folss.fixtures import SimplicialComplex
from folss.relative import (
    SIGN_CONVENTIONS,
    cocycle_basis,
    rel_class,
    relative_cup_raw,
    relative_pages,
    simplicial_cover,
    validate_cover,
)

BASES = {
    "sphere": [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)],
    "disk_pair": [(0, 1, 2), (0, 2, 3)],
    "strip": [(0, 1, 2), (1, 2, 3), (2, 3, 4)],
}


def random_cover(rng: random.Random):
    name = rng.choice(sorted(BASES))
    faces = BASES[name]
    while True:
        a = [f for f in faces if rng.random() < 0.6]
        b = [f for f in faces if f not in a or rng.random() < 0.3]
        if not a or not b:
            continue
        A, B = SimplicialComplex.from_maximal(a), SimplicialComplex.from_maximal(b)
        shared = [s for lst in A.simplices.values() for s in lst if B.index(s) is not None]
        if shared:
            break
    weights = {}

    def w(s):
        if s not in weights:
            weights[s] = Fraction(rng.randint(0, 4), 4)
        return weights[s]

    K = SimplicialComplex.from_maximal(faces)
    return name, a, b, simplicial_cover(K, A, B, weights=w)


def run(seeds: int, out) -> dict:
    failures = {conv: 0 for conv in SIGN_CONVENTIONS}
    exercised = 0
    for seed in range(seeds):
        rng = random.Random(seed)
        name, a, b, c = random_cover(rng)
        assert validate_cover(c, check_products=False).ok
        rpU, rpV, rpM = (relative_pages(c, W) for W in ("U", "V", "M"))
        pairs = 0
        bad = {conv: 0 for conv in SIGN_CONVENTIONS}
        for (p, q) in rpU.E2:
            for x in cocycle_basis(rpU, p, q):
                for (r, s) in rpV.E2:
                    for y in cocycle_basis(rpV, r, s):
                        X, Y = rel_class(rpU, p, q, x), rel_class(rpV, r, s, y)
                        key = (p + r, q + s)
                        if key not in rpM.delta:
                            continue
                        pairs += 1
                        results = {conv: relative_cup_raw(c, X, Y, conv) for conv in SIGN_CONVENTIONS}
                        if len({res.coords for res in results.values()}) > 1:
                            exercised += 1
                        for conv, res in results.items():
                            if not rpM.is_cocycle(*key, res.coords):
                                bad[conv] += 1
        for conv in SIGN_CONVENTIONS:
            failures[conv] += bad[conv]
        print(f"seed {seed:3d} base {name:9s} U={a} V={b} pairs={pairs} failures={bad}", file=out)
    print(f"pairs where conventions disagree: {exercised}", file=out)
    print(f"total failures: {failures}", file=out)
    survivors = [conv for conv, n in failures.items() if n == 0]
    print(f"surviving conventions: {survivors}", file=out)
    return failures


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--log", default=None)
    args = ap.parse_args(argv)
    if args.log:
        with open(args.log, "w") as fh:
            run(args.seeds, fh)
        sys.stdout.write(open(args.log).read())
    else:
        run(args.seeds, sys.stdout)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
