"""Decompose random two-qubit unitaries over several seeds and summarize convergence."""

import argparse

import numpy as np

from qmanopt.apps.gate_decomposition import run_gate_decomposition
from qmanopt.cli import load_target
from qmanopt.serialization import trace_rows, write_trace


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--iters", type=int, default=2000)
    parser.add_argument("--lr", type=float, default=0.2)
    parser.add_argument("--trace-prefix", help="write one CSV trace per seed with this prefix")
    args = parser.parse_args()

    finals = []
    for seed in range(args.seeds):
        result = run_gate_decomposition(load_target("random", seed), iters=args.iters, lr=args.lr, seed=seed)
        finals.append(result.final_distance)
        if args.trace_prefix:
            rows = trace_rows(result.losses, result.residuals, result.distances, result.wall_ms)
            write_trace(f"{args.trace_prefix}{seed}.csv", rows)
        print(f"seed {seed}: distance {result.final_distance:.3e}  "
              f"residual {max(result.residuals):.1e}  {result.wall_ms[-1] / 1e3:.2f} s")
    print(f"median final distance {np.median(finals):.3e}")


if __name__ == "__main__":
    main()
