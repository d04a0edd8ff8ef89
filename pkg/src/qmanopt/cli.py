"""Command-line entry point: ``qmanopt {gate-decomp,channel-tomo,manifold-check,bench}``.

Exit codes: 0 success, 1 tolerance unmet, 2 configuration or validation
error, 3 numerical degeneracy.  The default seed is read from the
``QMANOPT_SEED`` environment variable (0 when unset).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DegeneracyError
from .manifolds import KINDS, ManifoldDescriptor, Stiefel, all_descriptors, make_manifold

EXIT_OK, EXIT_TOL, EXIT_CONFIG, EXIT_DEGENERATE = 0, 1, 2, 3
SEED_ENV = "QMANOPT_SEED"


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigurationError(f"{SEED_ENV} must be an integer, got {raw!r}") from exc


def _emit(record: dict, stream=None) -> None:
    print(json.dumps(record, sort_keys=True), file=stream or sys.stdout)


def _write_trace(args, result, metric) -> None:
    if args.out is None:
        return
    from .serialization import trace_rows, write_trace

    wall = None if args.no_timing else result.wall_ms
    write_trace(args.out, trace_rows(result.losses, result.residuals, metric, wall))


# gate-decomp


def load_target(source: str, seed: int) -> np.ndarray:
    if source == "random":
        child = np.random.SeedSequence(seed).spawn(1)[0]
        return Stiefel().random((4, 4), child)
    from .serialization import load_tensor

    try:
        target = load_tensor(source)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read target file {source!r}: {exc}") from exc
    if target.shape != (4, 4):
        raise ConfigurationError(f"target must be 4x4, got {target.shape}")
    if np.linalg.norm(target.conj().T @ target - np.eye(4)) >= 1e-8:
        raise ConfigurationError("target matrix is not unitary")
    return target


def cmd_gate_decomp(args) -> int:
    from .apps.gate_decomposition import run_gate_decomposition

    if args.iters < 0:
        raise ConfigurationError("iters must be non-negative")
    target = load_target(args.target, args.seed)
    result = run_gate_decomposition(
        target, iters=args.iters, lr=args.lr, seed=args.seed, amsgrad=not args.no_amsgrad
    )
    _write_trace(args, result, result.distances)
    if args.save_point:
        from .serialization import save_tensor

        save_tensor(args.save_point, result.u)
    ok = result.final_distance < args.tol
    _emit({
        "command": "gate-decomp",
        "seed": args.seed,
        "iterations": args.iters,
        "final_distance": result.final_distance,
        "max_constraint_residual": max(result.residuals),
        "tol": args.tol,
        "passed": ok,
    })
    return EXIT_OK if ok else EXIT_TOL


# channel-tomo


def cmd_channel_tomo(args) -> int:
    from .apps.tomography import run_tomography

    if args.iters < 0 or args.samples < 1 or args.qubits < 1:
        raise ConfigurationError("iters must be >= 0, samples and qubits >= 1")
    tol = args.tol if args.tol is not None else (0.02 if args.exact_probs else 0.1)
    result = run_tomography(
        n_qubits=args.qubits,
        rank=args.rank,
        samples=args.samples,
        exact_probs=args.exact_probs,
        n_states=args.n_states,
        lr=args.lr,
        iters=args.iters,
        seed=args.seed,
    )
    _write_trace(args, result, result.distances)
    if args.save_choi:
        from .serialization import save_tensor

        save_tensor(args.save_choi, result.choi)
    ok = result.final_distance < tol
    _emit({
        "command": "channel-tomo",
        "seed": args.seed,
        "qubits": args.qubits,
        "rank": args.rank,
        "exact_probs": args.exact_probs,
        "final_distance": result.final_distance,
        "final_loss": result.losses[-1],
        "max_constraint_residual": max(result.residuals),
        "tol": tol,
        "passed": ok,
    })
    return EXIT_OK if ok else EXIT_TOL


# manifold-check


def _descriptors(args) -> list:
    if args.manifold == "all":
        if args.metric or args.retraction:
            raise ConfigurationError("--metric/--retraction need a single --manifold kind")
        return all_descriptors()
    if args.manifold not in KINDS:
        raise ConfigurationError(f"unknown manifold kind {args.manifold!r}")
    if args.metric or args.retraction:
        make_manifold(args.manifold, args.metric, args.retraction)
        return [ManifoldDescriptor(args.manifold, args.metric, args.retraction)]
    return [d for d in all_descriptors() if d.kind == args.manifold]


def cmd_manifold_check(args) -> int:
    from .diagnostics import run_suite
    from .serialization import format_records

    if args.trials < 1:
        raise ConfigurationError("trials must be at least 1")
    reports = run_suite(
        _descriptors(args), n=args.n, p=args.p, r=args.r, m=args.m,
        trials=args.trials, seed=args.seed,
    )
    text = format_records(r.to_record() for r in reports)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_TOL


# bench


def _sizes(text: str) -> tuple:
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise ConfigurationError(f"--sizes must be a comma list of integers, got {text!r}") from exc


def cmd_bench(args) -> int:
    from .bench import BenchConfig, format_table, run_bench
    from .serialization import format_records

    config = BenchConfig(args.manifold, _sizes(args.sizes), args.reps, args.seed,
                         args.metric, args.retraction)
    rows = run_bench(config)
    print(format_table(rows))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(format_records(rows))
    return EXIT_OK


# parser


def build_parser() -> argparse.ArgumentParser:
    seed = default_seed()
    parser = argparse.ArgumentParser(prog="qmanopt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gate-decomp", help="decompose a two-qubit gate into local unitaries and CNOTs")
    g.add_argument("--seed", type=int, default=seed)
    g.add_argument("--lr", type=float, default=0.2)
    g.add_argument("--iters", type=int, default=2000)
    g.add_argument("--target", default="random",
                   help="'random' for a Haar target, or a path to a serialized 4x4 unitary")
    g.add_argument("--out", help="trace CSV path")
    g.add_argument("--save-point", help="write the final local unitaries as a serialized tensor")
    g.add_argument("--tol", type=float, default=1e-4)
    g.add_argument("--no-amsgrad", action="store_true", help="plain Adam second moment")
    g.add_argument("--no-timing", action="store_true", help="leave wall_time_ms empty")
    g.set_defaults(func=cmd_gate_decomp)

    t = sub.add_parser("channel-tomo", help="maximum-likelihood channel tomography")
    t.add_argument("--qubits", type=int, default=1)
    t.add_argument("--rank", type=int, default=2)
    t.add_argument("--samples", type=int, default=100_000)
    t.add_argument("--exact-probs", action="store_true",
                   help="fit the expected likelihood under exact outcome probabilities")
    t.add_argument("--n-states", type=int, default=100, help="input states in exact mode")
    t.add_argument("--lr", type=float, default=0.07)
    t.add_argument("--iters", type=int, default=1000)
    t.add_argument("--seed", type=int, default=seed)
    t.add_argument("--out", help="trace CSV path")
    t.add_argument("--save-choi", help="write the estimated Choi matrix as a serialized tensor")
    t.add_argument("--tol", type=float, default=None, help="default 0.1 sampled, 0.02 exact")
    t.add_argument("--no-timing", action="store_true", help="leave wall_time_ms empty")
    t.set_defaults(func=cmd_channel_tomo)

    c = sub.add_parser("manifold-check", help="run the diagnostics suite")
    c.add_argument("--manifold", default="all", help=f"one of {sorted(KINDS)} or 'all'")
    c.add_argument("--metric")
    c.add_argument("--retraction")
    c.add_argument("--n", type=int, default=4)
    c.add_argument("--p", type=int, default=2)
    c.add_argument("--r", type=int, default=2)
    c.add_argument("--m", type=int, default=3)
    c.add_argument("--trials", type=int, default=100)
    c.add_argument("--seed", type=int, default=seed)
    c.add_argument("--out", help="JSON-lines report path (default stdout)")
    c.set_defaults(func=cmd_manifold_check)

    b = sub.add_parser("bench", help="time manifold primitives")
    b.add_argument("--manifold", default="stiefel")
    b.add_argument("--metric")
    b.add_argument("--retraction")
    b.add_argument("--sizes", default="16,32,64")
    b.add_argument("--reps", type=int, default=20)
    b.add_argument("--seed", type=int, default=seed)
    b.add_argument("--out", help="JSON-lines path for the timing records")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[list] = None) -> int:
    try:
        parser = build_parser()
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except DegeneracyError as exc:
        print(f"numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
