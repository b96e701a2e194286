"""
Discretization, quadrature and differentiation primitives.

Every other module evaluates its integrals and gradients through the helpers
defined here, so a density, its orbitals and the functionals built on them all
share one quadrature rule and one set of finite-difference stencils.

All quantities are in Hartree atomic units.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Callable
import logging
import math

import numpy as np
from scipy import sparse

from ofke.errors import DomainError, UsageError

logger = logging.getLogger(__name__)


class Measure(str, Enum):
    """Integration measure attached to a grid."""
    LINE_1D = "line1d"
    RADIAL_3D = "radial3d"
    SQUARE_2D = "square2d"


def _readonly(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Grid:
    """
    Immutable mesh with quadrature weights.

    For SQUARE_2D grids ``nodes`` holds the (shared) axis coordinates and
    ``weights`` is the 2D tensor-product weight array.
    """
    nodes: np.ndarray
    weights: np.ndarray
    measure: Measure
    spacing: float

    def __post_init__(self):
        nodes = _readonly(self.nodes)
        weights = _readonly(self.weights)

        if nodes.ndim != 1 or nodes.size < 3:
            raise DomainError(f"Grid needs at least 3 nodes per axis, got {nodes.size}")
        if not np.all(np.diff(nodes) > 0):
            raise DomainError("Grid nodes must be strictly increasing")
        if not np.all(weights > 0):
            raise DomainError("Grid weights must be positive")

        expected = (nodes.size, nodes.size) if self.measure == Measure.SQUARE_2D else (nodes.size,)
        if weights.shape != expected:
            raise DomainError(f"Weights shape {weights.shape} does not match {expected}")

        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "measure", Measure(self.measure))

    @property
    def shape(self):
        return self.weights.shape

    @property
    def n_axis(self) -> int:
        return int(self.nodes.size)

    @property
    def is_uniform(self) -> bool:
        return bool(np.allclose(np.diff(self.nodes), self.spacing, rtol=1e-9, atol=0.0))

    def matches(self, other: "Grid") -> bool:
        if self is other:
            return True
        return (
            self.measure == other.measure
            and self.shape == other.shape
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real values sampled on the nodes of a grid."""
    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        values = _readonly(self.values)
        if values.shape != self.grid.shape:
            raise UsageError(
                f"Field of shape {values.shape} does not fit grid of shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("Field values must be finite")
        object.__setattr__(self, "values", values)


def sample(func: Callable[[np.ndarray], np.ndarray], g: Grid) -> ScalarField:
    """Evaluate ``func`` on the grid nodes."""
    return ScalarField(np.asarray(func(g.nodes), dtype=float), g)


def make_uniform_grid(a: float, b: float, n: int, rule: str = "trapezoid") -> Grid:
    """
    Build an equally spaced LINE_1D grid including both endpoints.

    Args:
        a: Left endpoint (Bohr)
        b: Right endpoint (Bohr)
        n: Number of nodes, at least 3
        rule: "trapezoid" (default) or "simpson" (odd n only)

    Returns:
        Grid with composite quadrature weights

    Raises:
        DomainError: If n < 3, b <= a or the rule is unusable
    """
    if not (math.isfinite(a) and math.isfinite(b)) or b <= a:
        raise DomainError(f"Uniform grid needs a < b, got a={a}, b={b}")
    if n < 3:
        raise DomainError(f"Uniform grid needs n >= 3, got n={n}")

    nodes = np.linspace(a, b, n)
    h = (b - a) / (n - 1)

    if rule == "trapezoid":
        weights = np.full(n, h)
        weights[0] = weights[-1] = h / 2.0
    elif rule == "simpson":
        if n % 2 == 0:
            raise DomainError(f"Simpson rule needs an odd node count, got n={n}")
        weights = np.full(n, 2.0)
        weights[1::2] = 4.0
        weights[0] = weights[-1] = 1.0
        weights *= h / 3.0
    else:
        raise DomainError(f"Unknown quadrature rule '{rule}'")

    return Grid(nodes=nodes, weights=weights, measure=Measure.LINE_1D, spacing=h)


def make_radial_grid(r_max: float, n: int) -> Grid:
    """
    Build a RADIAL_3D grid on (0, r_max] with nodes offset by half a step.

    Nodes are r_i = (i - 1/2) h with h = r_max / n, so r = 0 is never sampled.
    Weights carry the 4 pi r^2 Jacobian.
    """
    if not math.isfinite(r_max) or r_max <= 0:
        raise DomainError(f"Radial grid needs r_max > 0, got {r_max}")
    if n < 3:
        raise DomainError(f"Radial grid needs n >= 3, got n={n}")

    h = r_max / n
    nodes = (np.arange(1, n + 1) - 0.5) * h
    weights = 4.0 * np.pi * nodes ** 2 * h
    return Grid(nodes=nodes, weights=weights, measure=Measure.RADIAL_3D, spacing=h)


def make_square_grid(axis: Grid) -> Grid:
    """Tensor-product SQUARE_2D grid from a LINE_1D axis grid."""
    if axis.measure != Measure.LINE_1D:
        raise DomainError(f"Square grid needs a line1d axis, got {axis.measure.value}")
    weights = np.outer(axis.weights, axis.weights)
    return Grid(nodes=axis.nodes, weights=weights, measure=Measure.SQUARE_2D, spacing=axis.spacing)


def make_grid_from_nodes(nodes: np.ndarray, measure: Measure) -> Grid:
    """
    Grid on arbitrary strictly increasing nodes with trapezoid weights.

    Used for density files whose coordinates are not one of the canonical meshes.
    """
    nodes = np.asarray(nodes, dtype=float)
    measure = Measure(measure)
    if measure == Measure.SQUARE_2D:
        raise DomainError("Cannot build a square grid from a node list")
    if nodes.size < 3:
        raise DomainError(f"Grid needs at least 3 nodes, got {nodes.size}")
    steps = np.diff(nodes)
    if not np.all(steps > 0):
        raise DomainError("Grid nodes must be strictly increasing")
    if measure == Measure.RADIAL_3D and nodes[0] <= 0:
        raise DomainError("Radial nodes must be positive")

    weights = np.empty_like(nodes)
    weights[0] = steps[0] / 2.0
    weights[-1] = steps[-1] / 2.0
    weights[1:-1] = (nodes[2:] - nodes[:-2]) / 2.0
    if measure == Measure.RADIAL_3D:
        weights = weights * 4.0 * np.pi * nodes ** 2

    return Grid(nodes=nodes, weights=weights, measure=measure, spacing=float(np.mean(steps)))


def _check_field(f: ScalarField, g: Grid) -> None:
    if not f.grid.matches(g):
        raise UsageError("Field does not live on the given grid")


def integrate(f: ScalarField, g: Grid) -> float:
    """Quadrature sum of ``f`` under the measure of ``g``."""
    _check_field(f, g)
    return float(np.sum(g.weights * f.values))


def _stencil_coordinates(g: Grid):
    return g.spacing if g.is_uniform else g.nodes


def derivative(f: ScalarField, g: Grid) -> ScalarField:
    """
    First derivative (d/dx or d/dr) by second-order finite differences.

    Central differences in the interior, one-sided second-order stencils at
    the two ends.
    """
    _check_field(f, g)
    if g.measure == Measure.SQUARE_2D:
        raise DomainError("Use partial() for square grids")
    if g.n_axis < 3:
        raise DomainError("Derivative needs at least 3 nodes")
    values = np.gradient(f.values, _stencil_coordinates(g), edge_order=2)
    return ScalarField(values, g)


def partial(values: np.ndarray, g: Grid, axis: int) -> np.ndarray:
    """Derivative of a 2D array along one axis of a SQUARE_2D grid."""
    if g.measure != Measure.SQUARE_2D:
        raise DomainError(f"partial() needs a square2d grid, got {g.measure.value}")
    if values.shape != g.shape:
        raise UsageError(f"Array of shape {values.shape} does not fit grid {g.shape}")
    return np.gradient(values, _stencil_coordinates(g), axis=axis, edge_order=2)


def laplacian(f: ScalarField, g: Grid) -> ScalarField:
    """
    Laplacian of a line or spherically symmetric field.

    LINE_1D applies the first-derivative stencil twice; RADIAL_3D uses
    r^-2 d/dr (r^2 df/dr).
    """
    first = derivative(f, g)
    if g.measure == Measure.LINE_1D:
        return derivative(first, g)
    r = g.nodes
    flux = derivative(ScalarField(r ** 2 * first.values, g), g)
    return ScalarField(flux.values / r ** 2, g)


def derivative_matrix(g: Grid) -> sparse.csr_matrix:
    """
    Sparse matrix D with D @ f.values == derivative(f, g).values on uniform grids.
    """
    if g.measure == Measure.SQUARE_2D:
        raise DomainError("derivative_matrix() is defined for line1d and radial3d grids")
    if not g.is_uniform:
        raise DomainError("derivative_matrix() needs a uniform grid")

    n = g.n_axis
    inv = 1.0 / (2.0 * g.spacing)
    matrix = sparse.diags([-inv, inv], [-1, 1], shape=(n, n), format="lil")
    matrix[0, :3] = np.array([-3.0, 4.0, -1.0]) * inv
    matrix[n - 1, n - 3:] = np.array([1.0, -4.0, 3.0]) * inv
    return matrix.tocsr()


def constant(g: Grid, value: float = 0.0) -> ScalarField:
    return ScalarField(np.full(g.shape, value, dtype=float), g)
