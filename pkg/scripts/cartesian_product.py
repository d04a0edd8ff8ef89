"""Joint optimization over density and Choi variables with two optimizers."""

import argparse

import numpy as np

from qmanopt.apps.product import ProductConfig, run_product_example


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=200)
    parser.add_argument("--lr", type=float, default=0.01)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    result = run_product_example(ProductConfig(steps=args.steps, lr=args.lr, seed=args.seed))
    for it in range(0, len(result.losses), max(1, args.steps // 10)):
        print(f"step {it:4d}  loss {result.losses[it]:.6e}")
    tail = np.diff(result.losses[-51:])
    print(f"final loss {result.losses[-1]:.6e}, max residual {max(result.residuals):.1e}, "
          f"non-increasing over last 50 steps: {bool(np.all(tail <= 0))}")


if __name__ == "__main__":
    main()
