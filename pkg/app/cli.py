"""
Command-line entry point.

    python -m app.cli bounds --system hydrogen --Z 1 --format json
    python -m app.cli decompose --system box1d --L 1 --n2 512
    python -m app.cli fit-q --system box1d --N 8 --C 1.6449
    python -m app.cli eval --density rho.txt

Exit status: 0 on completion (violated bounds included), 2 on configuration,
parse or IO errors, 3 when --strict is set and the solver does not converge.
"""
from pathlib import Path
from typing import Any, Dict, List, Optional
import argparse
import json
import logging
import sys

from pydantic import ValidationError

from app.commands import create_registry, execute
from ofke.config import RunConfig
from ofke.errors import ConvergenceError, OfkeError
from ofke.reports import render

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

COMMANDS = ["eval", "bounds", "decompose", "fit-q", "solve"]
SYSTEMS = ["hydrogen", "box1d", "harm1d", "gauss3d"]


def _common_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)

    source = parent.add_argument_group("input")
    source.add_argument("--system", action="append", choices=SYSTEMS,
                        help="Built-in reference system (repeatable for fit-q)")
    source.add_argument("--Z", type=float, help="Nuclear charge (hydrogen)")
    source.add_argument("--L", type=float, help="Box length (box1d)")
    source.add_argument("--N", type=int, help="Particle number (box1d, harm1d); family size for fit-q")
    source.add_argument("--omega", type=float, help="Oscillator frequency (harm1d, gauss3d)")
    source.add_argument("--density", help="Density file in the ofke-density v1 format")
    source.add_argument("--config", help="JSON file holding a complete run configuration")

    grid = parent.add_argument_group("grid")
    grid.add_argument("--grid-n", type=int, help="Grid point count override")
    grid.add_argument("--grid-rmax", type=float, help="Radial extent override (Bohr)")
    grid.add_argument("--n2", type=int, help="Points per axis of the pair grid (decompose)")

    coeffs = parent.add_argument_group("coefficients")
    coeffs.add_argument("--C", type=float, help="Prefactor of the combined functional (default c_f_sq/2)")
    coeffs.add_argument("--q", type=float, help="Weizsacker weight in [0, 1] (default 1)")
    coeffs.add_argument("--c-lt", type=float, help="Lieb-Thirring constant (default 9.11)")
    coeffs.add_argument("--c-1d", type=float, help="1D upper-bound coefficient (default pi^2/2)")
    coeffs.add_argument("--c-my", type=float, help="March-Young 1D constant (no default)")
    coeffs.add_argument("--c-pg", type=float, help="Pathak-Gadre constant (no default)")

    solver = parent.add_argument_group("solver")
    solver.add_argument("--max-iterations", type=int, help="Solver iteration cap (default 5000)")
    solver.add_argument("--step", type=float, help="Initial gradient step (default 1e-3)")
    solver.add_argument("--tolerance", type=float, help="Energy-change tolerance (default 1e-10)")

    output = parent.add_argument_group("output")
    output.add_argument("--format", choices=["json", "csv", "text"], help="Report format (default json)")
    output.add_argument("--out", help="Write the report here instead of stdout")
    output.add_argument("--strict", action="store_true", help="Non-convergence exits with status 3")
    output.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Logging level on stderr")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ofke",
        description="Orbital-free kinetic-energy functionals: evaluation, bounds, decomposition, fitting",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    parent = _common_options()
    helps = {
        "eval": "Evaluate every functional on a system or density file",
        "bounds": "Check lower <= exact <= upper <= Zumbach",
        "decompose": "Two-particle Weizsacker + information decomposition",
        "fit-q": "Least-squares fit of the Weizsacker weight q",
        "solve": "Minimize the combined energy functional (harm1d)",
    }
    for name in COMMANDS:
        subparsers.add_parser(name, parents=[parent], help=helps[name])
    return parser


def _present(pairs: Dict[str, Any]) -> Dict[str, Any]:
    return {key: value for key, value in pairs.items() if value is not None}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """
    Build a RunConfig from parsed arguments.

    With --config the file supplies the base settings and any flag given on
    the command line overrides the matching file entry.

    Raises:
        pydantic.ValidationError: On invalid or conflicting options
        OSError, ValueError: When the --config file cannot be read or parsed
    """
    data: Dict[str, Any] = {}
    if args.config:
        data = json.loads(Path(args.config).read_text())
        if not isinstance(data, dict):
            raise ValueError(f"{args.config}: config must be a JSON object")

    params = _present({"Z": args.Z, "L": args.L, "N": args.N, "omega": args.omega})
    if args.system or args.density:
        data.pop("systems", None)
        data.pop("density", None)
    if args.system:
        data["systems"] = [{"name": name, **params} for name in args.system]
    elif params and data.get("systems"):
        data["systems"] = [{**spec, **params} for spec in data["systems"]]
    if args.density:
        data["density"] = args.density

    data.update(_present({
        "grid_n": args.grid_n,
        "grid_rmax": args.grid_rmax,
        "n2": args.n2,
        "format": args.format,
        "out": args.out,
    }))
    data["command"] = args.command
    if args.strict:
        data["strict"] = True
    data["coefficients"] = {**data.get("coefficients", {}), **_present({
        "C": args.C,
        "q": args.q,
        "c_lt": args.c_lt,
        "c_1d": args.c_1d,
        "c_my": args.c_my,
        "c_pg": args.c_pg,
    })}
    data["solver"] = {**data.get("solver", {}), **_present({
        "max_iterations": args.max_iterations,
        "step": args.step,
        "tolerance": args.tolerance,
    })}
    return RunConfig.model_validate(data)


def run(config: RunConfig) -> str:
    """Execute ``config`` and return the rendered report."""
    header, results = execute(config, create_registry())
    text = render(config.format, header, results)
    if config.out:
        Path(config.out).write_text(text)
        logger.info(f"Wrote {config.format} report to {config.out}")
    return text


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, args.log_level),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    try:
        config = config_from_args(args)
        text = run(config)
    except ConvergenceError as e:
        logger.error(f"Numerical failure: {e}")
        print(f"ofke: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValidationError as e:
        logger.error(f"Invalid configuration: {e}")
        print(f"ofke: invalid configuration:\n{e}", file=sys.stderr)
        return EXIT_USAGE
    except (OfkeError, ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"ofke: {e}", file=sys.stderr)
        return EXIT_USAGE

    if not config.out:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
