"""Timing tables for every manifold kind and option."""

import argparse

from qmanopt.bench import BenchConfig, format_table, run_bench
from qmanopt.manifolds import all_descriptors


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="16,32,64")
    parser.add_argument("--reps", type=int, default=20)
    args = parser.parse_args()
    sizes = tuple(int(s) for s in args.sizes.split(","))

    for desc in all_descriptors():
        rows = run_bench(BenchConfig(desc.kind, sizes, args.reps, 0, desc.metric, desc.retraction))
        print(f"\n{desc.kind} metric={desc.metric} retraction={desc.retraction}")
        print(format_table(rows))


if __name__ == "__main__":
    main()
