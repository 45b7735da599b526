"""Generate a synthetic instruction corpus for benchmarks and demos.

Usage: python scripts/make_synthetic_corpus.py --n 52000 --out corpus.jsonl [--seed 0] [--clusters 8]
"""

from __future__ import annotations

import argparse
import json
import random

VOCAB = (
    "alpha bravo charlie delta echo foxtrot golf hotel india juliet kilo lima "
    "mike november oscar papa quebec romeo sierra tango uniform victor whiskey "
    "xray yankee zulu amber birch cedar dune ember flint grove harbor iris jade"
).split()


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=52_000)
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--clusters", type=int, default=0,
                        help="when > 0, tag each record with a cluster id")
    args = parser.parse_args()

    rng = random.Random(args.seed)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        for i in range(args.n):
            instruction = " ".join(rng.choice(VOCAB) for _ in range(rng.randint(3, 14)))
            response = " ".join(rng.choice(VOCAB) for _ in range(rng.randint(4, 30)))
            row = {"instruction": instruction.capitalize() + "?", "input": "",
                   "output": response + "."}
            if args.clusters > 0:
                row["cluster"] = i % args.clusters
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    print(f"wrote {args.n} records to {args.out}")


if __name__ == "__main__":
    main()
