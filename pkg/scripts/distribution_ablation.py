"""Compare the k-distribution families on one corpus.

Builds the corpus once per family with a shared seed and prints the sample
count, count-reduction ratio, and Mix<=5 for each, mirroring the
distribution ablation table.

Usage: python scripts/distribution_ablation.py --input corpus.jsonl [--budget 1400] [--seed 0]
"""

from __future__ import annotations

import argparse
import time

from mosaic import EngineConfig, KDistribution, default_registry, load_dataset, run
from mosaic.ksampler import FAMILIES


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--input", required=True)
    parser.add_argument("--input-format", default="alpaca-triplet",
                        choices=("alpaca-triplet", "pair"))
    parser.add_argument("--budget", type=int, default=1400)
    parser.add_argument("--k-max", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    dataset = load_dataset(args.input, format_tag=args.input_format)
    registry = default_registry()
    config = EngineConfig(seed=args.seed, budget=args.budget)

    print(f"{len(dataset.records)} records, budget {args.budget}, k_max {args.k_max}")
    print(f"{'family':<14} {'samples':>8} {'ratio':>8} {'Mix<=5':>8} {'seconds':>8}")
    for family in FAMILIES:
        kdist = KDistribution(family=family, k_max=args.k_max)
        started = time.perf_counter()
        _, report = run(dataset, config, kdist, registry)
        elapsed = time.perf_counter() - started
        print(f"{family:<14} {report.samples:>8} {report.count_reduction_ratio:>8.4f} "
              f"{report.mix_le_5:>8.2%} {elapsed:>8.2f}")


if __name__ == "__main__":
    main()
