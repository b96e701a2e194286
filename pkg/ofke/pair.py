"""
Two-particle decomposition of the kinetic energy.

For an antisymmetric pair state theta(x1, x2) built from two orbitals,

    T_multivariate = T_W[rho] + (1/8) int rho(x1) I(x1) dx1,

where rho(x) = 2 int theta^2(x, y) dy and I is the Fisher information of the
conditional density f(x2 | x1) = 2 theta^2(x1, x2) / rho(x1) with respect to
the conditioning coordinate x1. Axis 0 of every 2D array is x1, axis 1 is x2.
"""
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple
import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ofke.errors import DomainError, UsageError
from ofke.functionals import DENSITY_THRESHOLD, weizsacker
from ofke.grid import Grid, Measure, ScalarField, derivative, partial
from ofke.systems import DensityField, box_orbitals, density_from_values, hermite_functions

logger = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-8
NORM_TOL = 1e-6
ZERO_NORM = 1e-12


@dataclass(frozen=True, eq=False)
class PairState:
    """Antisymmetrized product of two real orbitals on a shared line grid."""
    orbital_a: ScalarField
    orbital_b: ScalarField
    name: str = "pair"

    def __post_init__(self):
        if self.orbital_a.grid.measure != Measure.LINE_1D:
            raise DomainError("Pair orbitals must live on a line1d grid")
        if not self.orbital_a.grid.matches(self.orbital_b.grid):
            raise UsageError("Pair orbitals must share one grid")

    @property
    def grid(self) -> Grid:
        return self.orbital_a.grid

    def theta(self) -> np.ndarray:
        """theta[i, j] = (a(x_i) b(x_j) - b(x_i) a(x_j)) / sqrt(2)."""
        a = self.orbital_a.values
        b = self.orbital_b.values
        return (np.outer(a, b) - np.outer(b, a)) / math.sqrt(2.0)


def box_pair(L: float, g1: Grid, levels: Tuple[int, int] = (1, 2)) -> PairState:
    """Two box orbitals (default n = 1, 2) on a grid spanning [0, L]."""
    if L <= 0:
        raise DomainError(f"Box length must be positive, got L={L}")
    a, b = box_orbitals(levels, L, g1.nodes)
    return PairState(ScalarField(a, g1), ScalarField(b, g1), name="box1d")


def harmonic_pair(g1: Grid, levels: Tuple[int, int] = (0, 1), omega: float = 1.0) -> PairState:
    """Two oscillator eigenfunctions (default n = 0, 1)."""
    if omega <= 0:
        raise DomainError(f"Frequency must be positive, got omega={omega}")
    table = hermite_functions(g1.nodes, max(levels) + 1, omega)
    return PairState(ScalarField(table[levels[0]], g1), ScalarField(table[levels[1]], g1), name="harm1d")


def _check_square(p: PairState, g2: Grid) -> None:
    if g2.measure != Measure.SQUARE_2D:
        raise DomainError(f"Pair integrals need a square2d grid, got {g2.measure.value}")
    if not np.array_equal(g2.nodes, p.grid.nodes):
        raise UsageError("Square grid axis does not match the orbital grid")
    if not np.allclose(g2.weights, np.outer(p.grid.weights, p.grid.weights), rtol=1e-12, atol=0.0):
        raise UsageError("Square grid weights are not the product of the orbital grid weights")


def _norm(theta: np.ndarray, g2: Grid) -> float:
    return float(np.sum(g2.weights * theta ** 2))


def _row_density(theta: np.ndarray, g1: Grid) -> np.ndarray:
    # rho(x1) = 2 int theta^2(x1, x2) dx2
    return 2.0 * (theta ** 2) @ g1.weights


def multivariate_kinetic(p: PairState, g2: Grid) -> float:
    """
    1/2 sum_i int |d_i theta|^2, computed as int int (d theta / d x1)^2.

    Raises:
        DomainError: If theta does not vanish on the boundary of the square
    """
    _check_square(p, g2)
    theta = p.theta()
    edge = max(
        np.max(np.abs(theta[0, :])),
        np.max(np.abs(theta[-1, :])),
        np.max(np.abs(theta[:, 0])),
        np.max(np.abs(theta[:, -1])),
    )
    if edge > BOUNDARY_TOL:
        raise DomainError(f"Pair state does not vanish on the boundary (max |theta| = {edge:.3g})")
    slope = partial(theta, g2, axis=0)
    return float(np.sum(g2.weights * slope ** 2))


def pair_density(p: PairState, g2: Grid) -> DensityField:
    """One-electron density rho(x) = 2 int theta^2(x, y) dy on the orbital grid."""
    _check_square(p, g2)
    return density_from_values(_row_density(p.theta(), p.grid), p.grid)


def _information(p: PairState, g2: Grid, threshold: float) -> Tuple[float, float]:
    _check_square(p, g2)
    g1 = p.grid
    theta = p.theta()
    if _norm(theta, g2) < ZERO_NORM:
        raise DomainError("Pair state has zero norm")

    rho = _row_density(theta, g1)
    drho = derivative(ScalarField(rho, g1), g1).values
    slope = partial(theta, g2, axis=0)

    rows = rho >= threshold
    integrand = np.zeros_like(theta)
    # rho |d1 f|^2 / f with f = 2 theta^2 / rho, without dividing by f
    integrand[rows] = (slope[rows] - theta[rows] * (drho[rows] / (2.0 * rho[rows]))[:, None]) ** 2
    info = float(np.sum(g2.weights * integrand))

    conditional = np.zeros_like(theta)
    conditional[rows] = 2.0 * theta[rows] ** 2 / rho[rows][:, None]
    masked = conditional < threshold
    masked_mass = float(np.sum(g2.weights[masked] * theta[masked] ** 2))
    return info, masked_mass


def information_term(p: PairState, g2: Grid, threshold: float = DENSITY_THRESHOLD) -> float:
    """
    (1/8) int int rho(x1) |d f(x2|x1) / d x1|^2 / f(x2|x1) dx2 dx1.

    Rows where rho(x1) < threshold are excluded.

    Raises:
        DomainError: If theta is identically zero
    """
    return _information(p, g2, threshold)[0]


class DecompositionReport(BaseModel):
    """Both sides of the pair decomposition and their difference."""
    model_config = ConfigDict(frozen=True)

    system: str
    grid: Dict[str, int] = Field(..., description="Points per axis: n1 (density), n2 (pair)")
    multivariate: float = Field(..., description="int int (d theta / d x1)^2")
    weizsacker: float = Field(..., description="T_W of the pair density")
    info: float = Field(..., description="Information term")
    residual: float = Field(..., description="multivariate - weizsacker - info")
    masked_mass: float = Field(..., ge=0.0, description="int int theta^2 where f < threshold")

    @property
    def relative_residual(self) -> float:
        return abs(self.residual) / self.multivariate if self.multivariate else abs(self.residual)


def verify_decomposition(
    p: PairState,
    g2: Grid,
    g1: Grid,
    threshold: float = DENSITY_THRESHOLD,
) -> DecompositionReport:
    """
    Evaluate T_multivariate, T_W[rho] and the information term for ``p``.

    Raises:
        DomainError: If the pair state is not normalized within 1e-6
        UsageError: If ``g1`` is not the orbital grid
    """
    if not g1.matches(p.grid):
        raise UsageError("g1 must be the grid the pair orbitals live on")
    _check_square(p, g2)

    norm = _norm(p.theta(), g2)
    if abs(norm - 1.0) > NORM_TOL:
        raise DomainError(f"Pair state norm is {norm:.10g}, expected 1")

    multivariate = multivariate_kinetic(p, g2)
    tw = weizsacker(pair_density(p, g2))
    info, masked_mass = _information(p, g2, threshold)
    residual = multivariate - tw - info

    report = DecompositionReport(
        system=p.name,
        grid={"n1": g1.n_axis, "n2": g2.n_axis},
        multivariate=multivariate,
        weizsacker=tw,
        info=info,
        residual=residual,
        masked_mass=masked_mass,
    )
    logger.info(
        f"Decomposition {p.name} on {g2.n_axis}^2: T={multivariate:.8g} "
        f"T_W={tw:.8g} info={info:.8g} rel.residual={report.relative_residual:.3g}"
    )
    return report


def pair_from_levels(name: str, levels: Sequence[int], g1: Grid, **params: float) -> PairState:
    """Build a named built-in pair state (``box1d`` or ``harm1d``)."""
    if name == "box1d":
        return box_pair(params.get("L", 1.0), g1, tuple(levels))
    if name == "harm1d":
        return harmonic_pair(g1, tuple(levels), params.get("omega", 1.0))
    raise DomainError(f"No pair state for system '{name}'")
