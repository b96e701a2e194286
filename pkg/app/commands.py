"""
Command handlers shared by the CLI and the HTTP service.

Each handler takes a validated RunConfig and the registry and returns a list
of report records (plain dicts in a fixed key order), one per evaluated input.
"""
from pathlib import Path
from typing import Any, Dict, List, Tuple
import logging

import numpy as np

from ofke import __version__
from ofke.bounds import pathak_gadre_check, verify_chain
from ofke.config import (
    RunConfig,
    SystemSpec,
    default_grid_spec,
    pair_grid_spec,
    solve_grid_spec,
)
from ofke.density_io import load_density_file
from ofke.errors import ConvergenceError, DomainError
from ofke.functionals import combined_q, march_young_1d, tf_integral, weizsacker
from ofke.grid import Measure, ScalarField, make_square_grid
from ofke.pair import pair_from_levels, verify_decomposition
from ofke.registry import Registry, register_builtin_systems
from ofke.systems import DensityField, ReferenceSystem
from ofke.variational import fit_q, minimize_energy

logger = logging.getLogger(__name__)

PAIR_LEVELS = {"box1d": (1, 2), "harm1d": (0, 1)}

Record = Dict[str, Any]


def _evaluate_density(name: str, params: Dict[str, float], rho: DensityField, t_exact, config: RunConfig) -> Record:
    coeffs = config.coefficients
    breakdown = combined_q(rho, coeffs.C, coeffs.q)
    line = rho.grid.measure == Measure.LINE_1D

    march_young = None
    if line and coeffs.c_my is not None:
        march_young = march_young_1d(rho, coeffs.c_my)

    pathak_gadre = None
    if not line and coeffs.c_pg is not None:
        pathak_gadre = pathak_gadre_check(rho, coeffs.c_pg).model_dump()

    return {
        "system": name,
        "params": params,
        "measure": rho.grid.measure.value,
        "n_particles": rho.n_particles,
        "tf_integral": tf_integral(rho),
        "weizsacker": weizsacker(rho),
        "weizsacker_direct": weizsacker(rho, form="direct"),
        "combined": {"C": coeffs.C, "q": coeffs.q, **breakdown.model_dump(exclude={"info_term"})},
        "march_young": march_young,
        "pathak_gadre": pathak_gadre,
        "t_exact": t_exact,
    }


def _build(config: RunConfig, registry: Registry, spec: SystemSpec) -> ReferenceSystem:
    return registry.build_system(spec, grid_n=config.grid_n, grid_rmax=config.grid_rmax)


def eval_command(config: RunConfig, registry: Registry) -> List[Record]:
    if config.density is not None:
        rho = load_density_file(config.density)
        return [_evaluate_density(Path(config.density).name, {}, rho, None, config)]

    system = _build(config, registry, config.systems[0])
    return [_evaluate_density(system.name, system.params, system.density, system.t_exact, config)]


def bounds_command(config: RunConfig, registry: Registry) -> List[Record]:
    system = _build(config, registry, config.systems[0])
    return [verify_chain(system, config.coefficients).model_dump()]


def decompose_command(config: RunConfig, registry: Registry) -> List[Record]:
    spec = config.systems[0]
    if spec.name not in PAIR_LEVELS:
        raise DomainError(f"decompose supports {', '.join(PAIR_LEVELS)}, got '{spec.name}'")

    g1 = pair_grid_spec(spec, config.n2).build()
    g2 = make_square_grid(g1)
    pair = pair_from_levels(spec.name, PAIR_LEVELS[spec.name], g1, L=spec.L, omega=spec.omega)
    report = verify_decomposition(pair, g2, g1)
    return [report.model_dump()]


def expand_family(spec: SystemSpec) -> List[SystemSpec]:
    """Particle-number family N = 1..spec.N; single systems stay single."""
    if spec.name in ("hydrogen", "gauss3d"):
        return [spec]
    return [spec.model_copy(update={"N": n}) for n in range(1, spec.N + 1)]


def fit_q_command(config: RunConfig, registry: Registry) -> List[Record]:
    specs = [member for spec in config.systems for member in expand_family(spec)]
    systems = [_build(config, registry, spec) for spec in specs]
    return [fit_q(systems, config.coefficients.C).model_dump()]


def solve_command(config: RunConfig, registry: Registry) -> List[Record]:
    spec = config.systems[0]
    if spec.name != "harm1d":
        raise DomainError(f"solve supports harm1d only, got '{spec.name}'")

    coeffs = config.coefficients
    g = solve_grid_spec(spec, config.grid_n).build()
    v_ext = ScalarField(0.5 * spec.omega ** 2 * g.nodes ** 2, g)
    result = minimize_energy(v_ext, float(spec.N), coeffs.C, coeffs.q, g, config.solver)

    if not result.converged and config.strict:
        raise ConvergenceError(
            f"Solver did not converge in {result.iterations} iterations (E={result.energy:.12g})"
        )

    return [{
        "system": spec.name,
        "params": spec.params(),
        "C": coeffs.C,
        "q": coeffs.q,
        "energy": result.energy,
        "converged": result.converged,
        "iterations": result.iterations,
        "n_particles": float(np.sum(g.weights * result.density.values)),
    }]


def input_grids(config: RunConfig) -> List[Dict[str, Any]]:
    """Grid descriptions echoed into the report header."""
    if config.density is not None:
        return []
    if config.command == "decompose":
        return [pair_grid_spec(spec, config.n2).model_dump() for spec in config.systems]
    if config.command == "solve":
        return [solve_grid_spec(spec, config.grid_n).model_dump() for spec in config.systems]
    specs = config.systems
    if config.command == "fit-q":
        specs = [member for spec in specs for member in expand_family(spec)]
    return [default_grid_spec(spec, config.grid_n, config.grid_rmax).model_dump() for spec in specs]


def report_header(config: RunConfig) -> Dict[str, Any]:
    header: Dict[str, Any] = {
        "tool": "ofke",
        "version": __version__,
        "command": config.command,
        "units": "hartree",
        "coefficients": config.coefficients.model_dump(),
        "grids": input_grids(config),
    }
    if config.density is not None:
        header["density"] = config.density
    if config.command == "solve":
        header["solver"] = config.solver.model_dump()
    return header


def create_registry() -> Registry:
    """
    Registry with the built-in systems and every command.

    Returns:
        Registry ready for execute()
    """
    registry = register_builtin_systems(Registry())
    registry.register_command("eval", eval_command)
    registry.register_command("bounds", bounds_command)
    registry.register_command("decompose", decompose_command)
    registry.register_command("fit-q", fit_q_command)
    registry.register_command("solve", solve_command)
    logger.info("Registered all commands")
    return registry


def execute(config: RunConfig, registry: Registry) -> Tuple[Dict[str, Any], List[Record]]:
    """Run ``config`` and return (header, results)."""
    logger.info(f"Running command {config.command}")
    handler = registry.get_command(config.command)
    results = handler(config, registry)
    logger.info(f"Command {config.command} completed with {len(results)} result(s)")
    return report_header(config), results
