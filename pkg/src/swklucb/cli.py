"""Command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 runtime failure. Diagnostics go to
stderr; data goes to files or stdout.
"""

import argparse
import json
import sys

from ._validation import ValidationError
from .bounds import regret_bound
from .config import ConfigError, load_config
from .corruption import CorruptionScheme, ldp_epsilon, staircase_matrix, verify_ldp
from .environment import generate_instance
from .experiment import emit, resolve_jobs, resolved_window, run_experiment
from .policies import default_window

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


def _cmd_run(args):
    config = load_config(args.config)
    if args.seeds is not None:
        config = config.replace(replications=args.seeds)
    if args.out is not None:
        config = config.replace(output_path=args.out)
    result = run_experiment(config, jobs=resolve_jobs(args.jobs))
    for path in emit(result):
        print(f"wrote {path}", file=sys.stderr)
    print("policy,final_mean_regret,final_std_regret")
    for name, curve in result.curves.items():
        print(f"{name},{curve.mean[-1]:.6g},{curve.std[-1]:.6g}")


def _cmd_ldp_design(args):
    matrix = staircase_matrix(args.epsilon)
    eps = ldp_epsilon(matrix)
    print(f"p00 = {matrix.p00:.12g}")
    print(f"p11 = {matrix.p11:.12g}")
    print(f"epsilon = {eps:.12g}")
    print(f"verified = {str(verify_ldp(matrix, args.epsilon)).lower()}")


def _cmd_bound(args):
    config = load_config(args.config)
    env = config.environment
    window = args.window
    if window is None:
        windows = [resolved_window(p, env) for p in config.policies if p["policy"] == "sw-klucb-cf"]
        window = windows[0] if windows else default_window(env.horizon, env.n_changes)
    report = regret_bound(env, window)
    print(json.dumps(report.to_dict(), indent=2))


def _cmd_validate(args):
    config = load_config(args.config)
    env = config.environment
    print(f"valid: K={env.n_arms} T={env.horizon} segments={env.n_changes} "
          f"policies={len(config.policies)}")


def _cmd_gen(args):
    schemes = None
    if args.epsilon is not None:
        schemes = (CorruptionScheme.staircase(args.epsilon),) * args.arms
    env = generate_instance(args.arms, args.horizon, args.changes, args.gap, args.seed,
                            schemes=schemes)
    print(json.dumps(env.to_dict(), indent=2))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="swklucb",
        description="Sliding-window KL-UCB for locally private, non-stationary bandits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a config and write regret curves")
    p.add_argument("config")
    p.add_argument("--out", help="output directory (overrides output.path)")
    p.add_argument("--seeds", type=int, help="number of replications (overrides replications)")
    p.add_argument("--jobs", type=int, help="worker processes (default: $SWKLUCB_JOBS or 1)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("ldp-design", help="print the optimal epsilon-LDP binary channel")
    p.add_argument("--epsilon", type=float, required=True)
    p.set_defaults(func=_cmd_ldp_design)

    p = sub.add_parser("bound", help="print the itemized regret bound of a config's environment")
    p.add_argument("config")
    p.add_argument("--window", type=int, help="window size (default: the config's SW policy)")
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("validate", help="check a config against the schema and invariants")
    p.add_argument("config")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("gen", help="emit a random piecewise-stationary environment")
    p.add_argument("--arms", type=int, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--changes", type=int, required=True)
    p.add_argument("--gap", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--epsilon", type=float, help="use the staircase channel for every arm")
    p.set_defaults(func=_cmd_gen)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        args.func(args)
    except ConfigError as exc:
        for path, message in exc.errors:
            print(f"error: {path or '<root>'}: {message}", file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
