# main.py
import sys
import platform

if platform.system() == 'Windows':
    import io
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding='utf-8', errors='replace')
    sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding='utf-8', errors='replace')

import argparse
from typing import List, Optional

import config
from experiments.sweep import cmd_compare, cmd_dump_topology, cmd_run
from utils.exceptions import ConfigError, UsageError

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Decentralized learning simulator: Chisme, gossip learning, DFL, CosSimDFL, FedAvg and local baselines."
    )
    parser.add_argument(
        "command",
        choices=["run", "compare", "dump-topology"],
        help="'run' one experiment, 'compare' a sweep of experiments, or 'dump-topology' of an experiment."
    )
    parser.add_argument("--config", required=True, help="Experiment YAML (run, dump-topology) or sweep YAML (compare).")
    parser.add_argument("--seed", type=int, default=None, help="Override the master seed.")
    parser.add_argument("--paradigm", type=str, default=None, help="Override the paradigm (or restrict a sweep to one).")
    parser.add_argument("--out", type=str, default=None, help=f"Output directory (default: {config.OUT_DIR}).")
    parser.add_argument("--jobs", type=int, default=None, help="Worker processes for 'compare'.")
    parser.add_argument(
        "--loss-threshold",
        type=float,
        default=None,
        help="Mean loss below which a run counts as converged in summary.csv."
    )
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs is not None and args.jobs < 1:
        print("[ERROR] --jobs must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "run":
            return cmd_run(args.config, seed=args.seed, paradigm=args.paradigm, out=args.out)
        if args.command == "compare":
            return cmd_compare(args.config, out=args.out, jobs=args.jobs, loss_threshold=args.loss_threshold,
                               seed=args.seed, paradigm=args.paradigm)
        return cmd_dump_topology(args.config, out=args.out, seed=args.seed)
    except ConfigError as e:
        print(e.format(), file=sys.stderr)
        return EXIT_CONFIG
    except UsageError as e:
        # Overrides that break the config (e.g. an unknown --paradigm) are config errors too.
        print(f"{args.config}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:
        print(f"[ERROR] An error occurred during the run: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
