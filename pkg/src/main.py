"""Main entry point for the density-dependent elasticity solver."""

import argparse
import logging
from pathlib import Path
from typing import List, Optional

from .config.run_config import RunConfig, load_config
from .config.settings import Config
from .core.errors import ConfigError, FemError, OutputError
from .services.examples import EXAMPLE_IDS
from .utils.helpers import format_convergence_table, format_extrema_table
from .workflow import convergence_study, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_OUTPUT = 4


def build_parser() -> argparse.ArgumentParser:
    """Subcommands converge, run and sweep."""
    parser = argparse.ArgumentParser(
        prog="density-fem",
        description=(
            "Finite-element solver for elastic solids with density-dependent moduli"
        ),
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="log debug output")
    sub = parser.add_subparsers(dest="command", required=True)

    converge = sub.add_parser(
        "converge", help="manufactured-solution convergence study"
    )
    converge.add_argument("--cycles", type=int, default=Config.CONVERGENCE_CYCLES)
    converge.add_argument("--out", default=Config.DEFAULT_OUTPUT_DIR)

    commands = (
        ("run", "run an example or config, one beta after the other"),
        ("sweep", "run the beta list concurrently"),
    )
    for name, help_text in commands:
        cmd = sub.add_parser(name, help=help_text)
        source = cmd.add_mutually_exclusive_group()
        source.add_argument("--example", choices=EXAMPLE_IDS)
        source.add_argument("--config", type=Path)
        cmd.add_argument(
            "--beta", type=float, action="append", help="repeat for several values"
        )
        cmd.add_argument("--refine", type=int)
        cmd.add_argument("--out")
        if name == "sweep":
            cmd.add_argument("--workers", type=int, default=Config.MAX_WORKERS)

    return parser


def setup_logging(verbose: bool) -> None:
    """Root logging at INFO, or DEBUG when verbose."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Config file or defaults, with command-line flags on top."""
    config = load_config(args.config) if args.config else RunConfig()
    return config.with_overrides(
        example=args.example,
        betas=args.beta,
        refinements=args.refine,
        output_dir=args.out,
    )


def display_convergence(rows) -> None:
    """Display the convergence table."""
    print("=" * 60)
    print("📊 Convergence study:")
    print(format_convergence_table(rows))


def display_run_results(results) -> None:
    """Display the outcome of every beta."""
    print("=" * 60)
    print("📊 Final Results:")
    for state in results:
        report = state["report"]
        print(
            f"  beta={state['beta']:g}: {report.iterations} Newton iterations, "
            f"{len(state['files'])} files"
        )
        print(format_extrema_table(state["extrema"]))
        print()


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run, and map failures onto exit codes."""
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)

    try:
        if args.command == "converge":
            print(f"🚀 Convergence study with {args.cycles} cycles")
            output_path = Path(args.out) / "convergence.csv"
            rows = convergence_study(args.cycles, output_path=output_path)
            display_convergence(rows)
            return EXIT_OK

        config = resolve_config(args)
        workers = args.workers if args.command == "sweep" else 1
        betas = ", ".join(f"{b:g}" for b in config.betas)
        print(
            f"🚀 Example {config.problem.name}: betas {betas} "
            f"on {config.refinements} refinements"
        )
        results = run_sweep(config, max_workers=workers)
        display_run_results(results)
        print(f"✅ Results written to {config.output_dir}")
        return EXIT_OK

    except ConfigError as e:
        print(f"❌ Configuration error: {e}")
        return EXIT_CONFIG
    except OutputError as e:
        print(f"❌ Output error: {e}")
        return EXIT_OUTPUT
    except FemError as e:
        print(f"❌ Solver failed: {e}")
        return EXIT_SOLVER


if __name__ == "__main__":
    exit(main())
