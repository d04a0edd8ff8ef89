"""Channel tomography by maximum likelihood; prints J every few iterations."""

import argparse

from qmanopt.apps.tomography import run_tomography
from qmanopt.serialization import trace_rows, write_trace


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--qubits", type=int, default=1)
    parser.add_argument("--rank", type=int, default=2)
    parser.add_argument("--samples", type=int, default=100_000)
    parser.add_argument("--exact-probs", action="store_true")
    parser.add_argument("--lr", type=float, default=0.07)
    parser.add_argument("--iters", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--every", type=int, default=100)
    parser.add_argument("--out", help="CSV trace path")
    args = parser.parse_args()

    def report(it, result):
        if it % args.every == 0:
            print(f"iter {it:5d}  loss {result.losses[-1]:.6f}  J {result.distances[-1]:.4f}")

    result = run_tomography(n_qubits=args.qubits, rank=args.rank, samples=args.samples,
                            exact_probs=args.exact_probs, lr=args.lr, iters=args.iters,
                            seed=args.seed, callback=report)
    if args.out:
        write_trace(args.out, trace_rows(result.losses, result.residuals, result.distances, result.wall_ms))
    print(f"final J {result.final_distance:.4f}, max trace residual {max(result.residuals):.1e}")


if __name__ == "__main__":
    main()
