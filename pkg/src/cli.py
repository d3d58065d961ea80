import argparse
import json
import logging
import sys
from typing import Any, Dict, List, NoReturn, Optional, Sequence

import numpy as np
import pandas as pd

from .exceptions import ConfigError, MixMOBOError
from .harness import (
    RunConfig,
    cmd_report,
    cmd_run,
    session_ask,
    session_init,
    session_result,
    session_status,
    session_tell,
)
from .optimizer import ParetoSet
from .space import MixedVector
from .utils import load_json, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USER_ERROR = 1
EXIT_INTERNAL_ERROR = 2


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma-separated integers, got '{text}'")


def _name_list(text: str) -> List[str]:
    return [v.strip().upper() for v in text.split(",") if v.strip()]


class CliArgumentParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the user-error code"""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USER_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = CliArgumentParser(
        prog="mixmobo",
        description="MixMOBO - Mixed-variable multi-objective Bayesian optimization",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Benchmark campaign with 10 replicates
  mixmobo run --benchmark styblinski --budget 250 --init 50 --replicates 10

  # External black box through a session file
  mixmobo session init --state s.json --space space.json
  mixmobo session ask --state s.json
  mixmobo session tell --state s.json --values values.json

  # Summary table at chosen evaluation counts
  mixmobo report results/styblinski --checkpoints 50,150,250
        """,
    )
    parser.add_argument("--log-level", default="INFO", help="Logging level (default: INFO)")
    parser.add_argument("--out", type=str, help="Output directory (default: $MIXMOBO_OUTPUT_DIR)")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run a seeded benchmark campaign")
    run.add_argument("--config", type=str, help="JSON run-config file")
    run.add_argument("--benchmark", type=str, help="Benchmark name")
    _add_budget_flags(run)
    run.add_argument("--seeds", type=_int_list, help="Comma-separated replicate seeds")
    run.add_argument("--replicates", type=int, help="Number of replicates (default: 10)")
    run.add_argument(
        "--workers", type=int, help="Parallel replicate workers, 0 for every CPU (default: 1)"
    )

    session = commands.add_parser("session", help="File-backed ask/tell session")
    steps = session.add_subparsers(dest="step", required=True)
    init = steps.add_parser("init", help="Create a session state file")
    init.add_argument("--state", required=True, help="Session state file")
    init.add_argument("--space", type=str, help="JSON space document")
    init.add_argument("--config", type=str, help="JSON optimizer config document")
    init.add_argument("--benchmark", type=str, help="Use a benchmark's space and campaign settings")
    init.add_argument("--seed", type=int, default=0, help="Replicate seed (default: 0)")
    _add_budget_flags(init)
    for name in ("ask", "status", "result"):
        steps.add_parser(name).add_argument("--state", required=True, help="Session state file")
    tell = steps.add_parser("tell", help="Report observed values for the outstanding ask")
    tell.add_argument("--state", required=True, help="Session state file")
    tell.add_argument(
        "--values",
        required=True,
        help='JSON file: [[f1, ...], ...] or {"points": [...], "values": [[...], ...]}',
    )

    report = commands.add_parser("report", help="Summarize campaign directories")
    report.add_argument("paths", nargs="+", help="Campaign directories written by run")
    report.add_argument("--checkpoints", type=_int_list, help="Evaluation indices to report")
    report.add_argument("--output", type=str, help="Long-format plot-data CSV path")
    return parser


def _add_budget_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--budget", type=int, help="Total evaluations per run (default: 250)")
    parser.add_argument("--init", type=int, help="Initial random samples (default: 50)")
    parser.add_argument("--q", type=int, help="Batch points per epoch (default: 1)")
    parser.add_argument("--eta", type=float, help="HedgeMO learning rate (default: 1.0)")
    parser.add_argument("--acquisitions", type=_name_list, help="Portfolio, e.g. EI,PI,UCB,SMC")
    parser.add_argument("--noise-var", type=float, help="Observation noise variance")


def _run_config(args: argparse.Namespace) -> RunConfig:
    overrides = {
        "benchmark": args.benchmark,
        "budget": args.budget,
        "n_init": args.init,
        "batch_size": args.q,
        "eta": args.eta,
        "acquisitions": args.acquisitions,
        "noise_variance": args.noise_var,
        "output_dir": args.out,
        "seeds": getattr(args, "seeds", None),
        "replicates": getattr(args, "replicates", None),
        "workers": getattr(args, "workers", None),
    }
    config_file = args.config if args.command == "run" else None
    return RunConfig.from_sources(config_file, overrides)


def points_frame(points: Sequence[MixedVector], values: Optional[Any] = None) -> pd.DataFrame:
    """Tabulate points as x* (continuous), o* (ordinal index) and c* (categorical index) columns"""
    rows = []
    for p in points:
        row: Dict[str, Any] = {f"x{i}": v for i, v in enumerate(p.continuous_values)}
        row.update({f"o{i}": v for i, v in enumerate(p.ordinal_indices)})
        row.update({f"c{i}": v for i, v in enumerate(p.categorical_indices)})
        rows.append(row)
    frame = pd.DataFrame(rows)
    if values is not None:
        values = np.atleast_2d(np.asarray(values, dtype=float))
        for k in range(values.shape[1]):
            frame[f"f{k + 1}"] = values[:, k]
    return frame


def print_run_summary(summary: Dict[str, Any]) -> None:
    """Print campaign summary to console"""
    print(f"\n{'='*60}")
    print(f"CAMPAIGN SUMMARY: {summary['benchmark']}")
    print(f"{'='*60}")
    print(f"\nMetric: {summary['metric']}")
    print(f"Global optimum: {summary['global_optimum']:.6g}")
    print(f"Random-sampling optimum: {summary['random_optimum']:.6g}")
    print("\nFinal Normalized Reward:")
    for method, stats in summary["final_reward"].items():
        print(f"  {method:<8} {stats['mean']:+.4f} +/- {stats['std']:.4f}")
    print(f"\nResults: {summary['directory']}")
    print(f"\n{'='*60}\n")


def print_pareto(pareto: ParetoSet) -> None:
    print(f"\n{'='*60}")
    print(f"PARETO SET ({len(pareto.points)} points)")
    print(f"{'='*60}")
    print(points_frame(pareto.points, pareto.values).to_string(index=False))
    print(f"\n{'='*60}\n")


def _read_tell_document(path: str) -> Dict[str, Any]:
    doc = load_json(path)
    if isinstance(doc, list):
        return {"points": None, "values": doc}
    if not isinstance(doc, dict) or "values" not in doc:
        raise ConfigError(f"{path} must hold a list of value rows or a {{points, values}} object")
    points = doc.get("points")
    return {
        "points": None if points is None else [MixedVector.from_dict(p) for p in points],
        "values": doc["values"],
    }


def handle_session(args: argparse.Namespace) -> None:
    if args.step == "init":
        if args.benchmark:
            session_init(args.state, run_config=_run_config(args), seed=args.seed)
        elif args.space:
            config_doc = load_json(args.config) if args.config else None
            session_init(args.state, space_doc=load_json(args.space), config_doc=config_doc)
        else:
            raise ConfigError("session init needs --space or --benchmark")
        print(f"Session initialized: {args.state}")
    elif args.step == "ask":
        points = session_ask(args.state)
        print(points_frame(points).to_string(index=False))
        print(json.dumps([p.to_dict() for p in points]))
    elif args.step == "tell":
        doc = _read_tell_document(args.values)
        optimizer = session_tell(args.state, doc["values"], doc["points"])
        print(f"Recorded: epoch {optimizer.state.epoch}, {optimizer.n_evaluations} evaluations")
    elif args.step == "status":
        print(json.dumps(session_status(args.state), indent=2))
    elif args.step == "result":
        print_pareto(session_result(args.state))


def main(argv: Optional[List[str]] = None) -> None:
    """Main CLI entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    setup_logging(args.log_level, args.out)

    try:
        if args.command == "run":
            print_run_summary(cmd_run(_run_config(args)))
        elif args.command == "session":
            handle_session(args)
        elif args.command == "report":
            summary = cmd_report(args.paths, args.checkpoints, args.output)
            print(f"\n{'='*60}")
            print("REPORT")
            print(f"{'='*60}")
            print(summary.to_string(index=False))
            print(f"\n{'='*60}\n")
    except (MixMOBOError, FileNotFoundError, json.JSONDecodeError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        sys.exit(EXIT_USER_ERROR)
    except KeyboardInterrupt:
        logger.error("Interrupted, partial results kept")
        sys.exit(EXIT_USER_ERROR)
    except Exception as e:
        logger.error(f"Internal error: {e}", exc_info=True)
        sys.exit(EXIT_INTERNAL_ERROR)
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
