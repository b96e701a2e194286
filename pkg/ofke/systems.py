"""
Analytic reference systems: densities, orbitals and exact kinetic energies.

Every built-in system is spinless (occupancy 1 per orbital) and carries its
closed-form kinetic energy, which is the ground truth for the bound checks
and for fitting the Weizsacker weight.
"""
from dataclasses import dataclass
from typing import Dict, Optional, Tuple
import logging
import math

import numpy as np

from ofke.errors import DomainError
from ofke.grid import Grid, Measure, ScalarField, derivative, integrate

logger = logging.getLogger(__name__)

NORMALIZATION_RTOL = 1e-6
ORTHONORMALITY_TOL = 1e-6
HARMONIC_EDGE_DENSITY = 1e-12


@dataclass(frozen=True, eq=False)
class DensityField:
    """
    Nonnegative one-electron density with its particle number.

    The quadrature integral of the density must equal ``n_particles`` within
    ``rtol`` (relative; absolute when n_particles is 0).
    """
    field: ScalarField
    n_particles: float
    rtol: float = NORMALIZATION_RTOL

    def __post_init__(self):
        if self.n_particles < 0 or not math.isfinite(self.n_particles):
            raise DomainError(f"Particle number must be finite and >= 0, got {self.n_particles}")
        if np.any(self.field.values < 0):
            raise DomainError("Density has negative values")

        total = integrate(self.field, self.field.grid)
        scale = abs(self.n_particles) or 1.0
        if abs(total - self.n_particles) > self.rtol * scale:
            raise DomainError(
                f"Density integrates to {total:.10g}, expected N={self.n_particles} "
                f"(rtol={self.rtol})"
            )

    @property
    def grid(self) -> Grid:
        return self.field.grid

    @property
    def values(self) -> np.ndarray:
        return self.field.values


def density_from_values(
    values: np.ndarray,
    g: Grid,
    n_particles: Optional[float] = None,
    rtol: float = NORMALIZATION_RTOL,
) -> DensityField:
    """
    Wrap raw samples as a DensityField.

    Args:
        values: Density samples, one per node
        g: Grid the samples live on
        n_particles: Declared particle number; defaults to the quadrature integral
        rtol: Relative normalization tolerance

    Returns:
        Validated DensityField
    """
    scalar = ScalarField(np.asarray(values, dtype=float), g)
    if n_particles is None:
        n_particles = max(integrate(scalar, g), 0.0)
    return DensityField(field=scalar, n_particles=float(n_particles), rtol=rtol)


@dataclass(frozen=True, eq=False)
class OrbitalSet:
    """Real single-particle orbitals; occupancy defaults to 1 per orbital."""
    orbitals: Tuple[ScalarField, ...]
    occupancy: Tuple[float, ...] = ()

    def __post_init__(self):
        orbitals = tuple(self.orbitals)
        if not orbitals:
            raise DomainError("OrbitalSet needs at least one orbital")
        occupancy = tuple(self.occupancy) or tuple(1.0 for _ in orbitals)
        if len(occupancy) != len(orbitals):
            raise DomainError("One occupancy per orbital is required")
        object.__setattr__(self, "orbitals", orbitals)
        object.__setattr__(self, "occupancy", occupancy)

    @property
    def grid(self) -> Grid:
        return self.orbitals[0].grid

    def density_values(self) -> np.ndarray:
        return sum(occ * phi.values ** 2 for occ, phi in zip(self.occupancy, self.orbitals))

    def overlap_matrix(self, g: Grid) -> np.ndarray:
        count = len(self.orbitals)
        overlap = np.empty((count, count))
        for i, phi_i in enumerate(self.orbitals):
            for j, phi_j in enumerate(self.orbitals):
                overlap[i, j] = float(np.sum(g.weights * phi_i.values * phi_j.values))
        return overlap

    def check_orthonormal(self, g: Grid, tol: float = ORTHONORMALITY_TOL) -> None:
        deviation = np.max(np.abs(self.overlap_matrix(g) - np.eye(len(self.orbitals))))
        if deviation > tol:
            raise DomainError(f"Orbitals are not orthonormal (max deviation {deviation:.3g})")


@dataclass(frozen=True, eq=False)
class ReferenceSystem:
    """Named analytic system with its density, orbitals and exact kinetic energy."""
    name: str
    params: Dict[str, float]
    density: DensityField
    orbitals: Optional[OrbitalSet] = None
    t_exact: Optional[float] = None

    def label(self) -> str:
        inner = ",".join(f"{key}={value:g}" for key, value in self.params.items())
        return f"{self.name}({inner})"


def _require_measure(g: Grid, measure: Measure, system: str) -> None:
    if g.measure != measure:
        raise DomainError(f"{system} needs a {measure.value} grid, got {g.measure.value}")


def _system_from_orbitals(
    name: str,
    params: Dict[str, float],
    orbital_values,
    g: Grid,
    t_exact: float,
) -> ReferenceSystem:
    orbitals = OrbitalSet(tuple(ScalarField(values, g) for values in orbital_values))
    density = density_from_values(orbitals.density_values(), g, n_particles=float(len(orbital_values)))
    logger.info(f"Built reference system {name} {params} with t_exact={t_exact:.10g}")
    return ReferenceSystem(name=name, params=params, density=density, orbitals=orbitals, t_exact=t_exact)


def hydrogenic(Z: float, g: Grid) -> ReferenceSystem:
    """
    Hydrogen-like 1s state: rho = (Z^3/pi) exp(-2 Z r), N = 1, T = Z^2/2.

    Raises:
        DomainError: If Z <= 0 or the grid is not radial
    """
    if Z <= 0:
        raise DomainError(f"Nuclear charge must be positive, got Z={Z}")
    _require_measure(g, Measure.RADIAL_3D, "hydrogenic")
    phi = math.sqrt(Z ** 3 / math.pi) * np.exp(-Z * g.nodes)
    return _system_from_orbitals("hydrogen", {"Z": float(Z)}, [phi], g, Z ** 2 / 2.0)


def gaussian_3d(omega: float, g: Grid) -> ReferenceSystem:
    """Ground state of the 3D isotropic oscillator: rho = (w/pi)^{3/2} exp(-w r^2), T = 3w/4."""
    if omega <= 0:
        raise DomainError(f"Frequency must be positive, got omega={omega}")
    _require_measure(g, Measure.RADIAL_3D, "gaussian_3d")
    phi = (omega / math.pi) ** 0.75 * np.exp(-0.5 * omega * g.nodes ** 2)
    return _system_from_orbitals("gauss3d", {"omega": float(omega)}, [phi], g, 0.75 * omega)


def box_orbitals(levels, L: float, x: np.ndarray) -> np.ndarray:
    """Hard-wall box eigenfunctions sqrt(2/L) sin(n pi x / L), one row per level."""
    x = np.asarray(x, dtype=float)
    return np.array([math.sqrt(2.0 / L) * np.sin(n * math.pi * x / L) for n in levels])


def box_fermions_1d(N: int, L: float, g: Grid) -> ReferenceSystem:
    """
    N spinless fermions in a hard-wall box [0, L].

    Orbitals sqrt(2/L) sin(n pi x / L), n = 1..N; T = sum n^2 pi^2 / (2 L^2).
    """
    if N < 1 or int(N) != N:
        raise DomainError(f"Particle count must be a positive integer, got N={N}")
    if L <= 0:
        raise DomainError(f"Box length must be positive, got L={L}")
    _require_measure(g, Measure.LINE_1D, "box_fermions_1d")
    edge_tol = 1e-9 * L
    if abs(g.nodes[0]) > edge_tol or abs(g.nodes[-1] - L) > edge_tol:
        raise DomainError(
            f"Grid [{g.nodes[0]:g}, {g.nodes[-1]:g}] does not cover the box [0, {L:g}]"
        )

    N = int(N)
    levels = np.arange(1, N + 1)
    orbitals = list(box_orbitals(levels, L, g.nodes))
    t_exact = float(np.sum(levels ** 2)) * math.pi ** 2 / (2.0 * L ** 2)
    return _system_from_orbitals("box1d", {"N": float(N), "L": float(L)}, orbitals, g, t_exact)


def hermite_functions(x: np.ndarray, count: int, omega: float = 1.0) -> np.ndarray:
    """
    Normalized oscillator eigenfunctions psi_0..psi_{count-1} on ``x``.

    Uses the three-term recurrence on the normalized functions,
    psi_{n+1} = sqrt(2/(n+1)) xi psi_n - sqrt(n/(n+1)) psi_{n-1}, xi = sqrt(omega) x.
    """
    if count < 1:
        raise DomainError(f"Need at least one Hermite function, got {count}")
    xi = math.sqrt(omega) * np.asarray(x, dtype=float)
    out = np.empty((count, xi.size))
    out[0] = omega ** 0.25 * math.pi ** -0.25 * np.exp(-0.5 * xi ** 2)
    if count > 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for n in range(1, count - 1):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * xi * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def harmonic_fermions_1d(N: int, g: Grid, omega: float = 1.0) -> ReferenceSystem:
    """
    N spinless fermions in the oscillator v = omega^2 x^2 / 2.

    T = omega * sum_n (n/2 + 1/4) = omega N^2 / 4 (virial: half the eigenvalue sum).

    Raises:
        DomainError: If the grid is too narrow for the density to vanish at its edges
    """
    if N < 1 or int(N) != N:
        raise DomainError(f"Particle count must be a positive integer, got N={N}")
    if omega <= 0:
        raise DomainError(f"Frequency must be positive, got omega={omega}")
    _require_measure(g, Measure.LINE_1D, "harmonic_fermions_1d")

    N = int(N)
    orbitals = hermite_functions(g.nodes, N, omega)
    edge_density = float(np.max(np.sum(orbitals[:, [0, -1]] ** 2, axis=0)))
    if edge_density >= HARMONIC_EDGE_DENSITY:
        raise DomainError(
            f"Grid [{g.nodes[0]:g}, {g.nodes[-1]:g}] too narrow for N={N}: "
            f"edge density {edge_density:.3g}"
        )
    t_exact = omega * N ** 2 / 4.0
    return _system_from_orbitals("harm1d", {"N": float(N), "omega": float(omega)}, list(orbitals), g, t_exact)


def exact_kinetic_from_orbitals(s: OrbitalSet, g: Grid) -> float:
    """
    Slater-determinant kinetic energy 1/2 sum_i int |grad phi_i|^2.

    On radial grids the orbitals are taken as spherically symmetric, so
    |grad phi|^2 = (d phi / dr)^2.
    """
    s.check_orthonormal(g)
    total = 0.0
    for occ, phi in zip(s.occupancy, s.orbitals):
        slope = derivative(phi, g)
        total += occ * integrate(ScalarField(slope.values ** 2, g), g)
    return 0.5 * total
