"""
Configuration models: coefficients, solver options, grids and run configuration.

All models are pydantic; run configurations reject unknown keys so a typo in
a JSON config or an API request fails loudly instead of silently using a
default.
"""
from typing import Dict, List, Literal, Optional
import logging
import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ofke.functionals import C_1D, C_F_SQ, C_LT, C_TF_1D
from ofke.grid import Grid, make_radial_grid, make_uniform_grid

logger = logging.getLogger(__name__)

DEFAULT_RADIAL_RMAX = 30.0
DEFAULT_RADIAL_POINTS = 20000
DEFAULT_BOX_POINTS = 8192
DEFAULT_HARMONIC_EXTENT = 12.0
DEFAULT_HARMONIC_POINTS = 16384
DEFAULT_PAIR_POINTS = 512
DEFAULT_PAIR_HARMONIC_EXTENT = 7.0
DEFAULT_SOLVE_EXTENT = 8.0
DEFAULT_SOLVE_POINTS = 321

SystemName = Literal["hydrogen", "box1d", "harm1d", "gauss3d"]
CommandName = Literal["eval", "bounds", "decompose", "fit-q", "solve"]


class Coefficients(BaseModel):
    """
    Functional coefficients.

    ``C`` defaults to c_f_sq / 2 (taking any c_f_sq override into account).
    ``c_my`` and ``c_pg`` have no published value and stay unset unless given.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    c_f_sq: float = Field(default=C_F_SQ, gt=0, description="C_F^2 = (3 pi^2)^{2/3}")
    c_lt: float = Field(default=C_LT, gt=0, description="Lieb-Thirring constant (9.11 or 9.578)")
    c_lt_1d: float = Field(default=C_TF_1D, gt=0, description="1D lower-bound coefficient of int rho^3")
    c_1d: float = Field(default=C_1D, gt=0, description="1D upper-bound coefficient of int rho^3")
    c_my: Optional[float] = Field(default=None, ge=0, description="March-Young 1D constant")
    c_pg: Optional[float] = Field(default=None, gt=0, description="Pathak-Gadre constant")
    C: float = Field(default=C_F_SQ / 2.0, ge=0, description="Prefactor of the combined functional")
    q: float = Field(default=1.0, ge=0, le=1, description="Weizsacker weight of the combined functional")

    @model_validator(mode="before")
    @classmethod
    def _default_prefactor(cls, data):
        if isinstance(data, dict) and data.get("C") is None:
            data = {key: value for key, value in data.items() if key != "C"}
            data["C"] = data.get("c_f_sq", C_F_SQ) / 2.0
        return data


class SolverOptions(BaseModel):
    """Options of the projected-gradient energy minimizer."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    max_iterations: int = Field(default=5000, gt=0, description="Iteration cap")
    step: float = Field(default=1e-3, gt=0, description="Initial (and maximum) gradient step")
    tolerance: float = Field(default=1e-10, gt=0, description="Energy-change convergence threshold (Hartree)")
    max_backtracks: int = Field(default=60, gt=0, description="Step halvings tried per iteration")
    projection: Literal["renormalize"] = Field(
        default="renormalize",
        description="Normalization-preserving projection applied after each step",
    )


class GridSpec(BaseModel):
    """Serializable description of a grid."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["uniform", "radial"]
    points: int = Field(..., ge=3)
    start: float = 0.0
    stop: float = 1.0
    r_max: float = DEFAULT_RADIAL_RMAX
    rule: Literal["trapezoid", "simpson"] = "trapezoid"

    def build(self) -> Grid:
        if self.kind == "radial":
            return make_radial_grid(self.r_max, self.points)
        return make_uniform_grid(self.start, self.stop, self.points, rule=self.rule)


class SystemSpec(BaseModel):
    """A built-in reference system and its parameters."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: SystemName
    Z: float = Field(default=1.0, gt=0)
    L: float = Field(default=1.0, gt=0)
    N: int = Field(default=1, ge=1)
    omega: float = Field(default=1.0, gt=0)

    def params(self) -> Dict[str, float]:
        if self.name == "hydrogen":
            return {"Z": self.Z}
        if self.name == "gauss3d":
            return {"omega": self.omega}
        if self.name == "box1d":
            return {"N": float(self.N), "L": self.L}
        return {"N": float(self.N), "omega": self.omega}


def default_grid_spec(
    spec: SystemSpec,
    grid_n: Optional[int] = None,
    grid_rmax: Optional[float] = None,
) -> GridSpec:
    """Documented default grid of a built-in system, with optional overrides."""
    if spec.name in ("hydrogen", "gauss3d"):
        return GridSpec(
            kind="radial",
            r_max=grid_rmax or DEFAULT_RADIAL_RMAX,
            points=grid_n or DEFAULT_RADIAL_POINTS,
        )
    if spec.name == "box1d":
        return GridSpec(kind="uniform", start=0.0, stop=spec.L, points=grid_n or DEFAULT_BOX_POINTS)
    extent = DEFAULT_HARMONIC_EXTENT / math.sqrt(spec.omega)
    return GridSpec(kind="uniform", start=-extent, stop=extent, points=grid_n or DEFAULT_HARMONIC_POINTS)


def pair_grid_spec(spec: SystemSpec, n2: int) -> GridSpec:
    """Axis grid of the two-particle decomposition."""
    if spec.name == "box1d":
        return GridSpec(kind="uniform", start=0.0, stop=spec.L, points=n2)
    extent = DEFAULT_PAIR_HARMONIC_EXTENT / math.sqrt(spec.omega)
    return GridSpec(kind="uniform", start=-extent, stop=extent, points=n2)


def solve_grid_spec(spec: SystemSpec, grid_n: Optional[int] = None) -> GridSpec:
    """Grid used by the variational solver for the 1D oscillator."""
    extent = DEFAULT_SOLVE_EXTENT / math.sqrt(spec.omega)
    return GridSpec(kind="uniform", start=-extent, stop=extent, points=grid_n or DEFAULT_SOLVE_POINTS)


class RunConfig(BaseModel):
    """
    Complete description of one CLI or API run.

    Exactly one input source is allowed: built-in systems or a density file.
    """
    model_config = ConfigDict(extra="forbid")

    command: CommandName = Field(..., description="Operation to run")
    systems: List[SystemSpec] = Field(default_factory=list, description="Built-in systems")
    density: Optional[str] = Field(default=None, description="Path of an ofke-density v1 file")
    grid_n: Optional[int] = Field(default=None, ge=3, description="Override of the grid point count")
    grid_rmax: Optional[float] = Field(default=None, gt=0, description="Override of the radial extent")
    n2: int = Field(default=DEFAULT_PAIR_POINTS, ge=3, description="Points per axis of the pair grid")
    coefficients: Coefficients = Field(default_factory=Coefficients)
    solver: SolverOptions = Field(default_factory=SolverOptions)
    format: Literal["json", "csv", "text"] = Field(default="json", description="Report format")
    out: Optional[str] = Field(default=None, description="Output path; stdout when absent")
    strict: bool = Field(default=False, description="Numerical failures become nonzero exits")

    @model_validator(mode="after")
    def _one_input_source(self) -> "RunConfig":
        has_systems = bool(self.systems)
        has_file = self.density is not None
        if has_systems == has_file:
            raise ValueError("exactly one input source is required: --system or --density")
        if has_file and self.command != "eval":
            raise ValueError(f"command '{self.command}' needs a built-in system, not a density file")
        if self.command != "fit-q" and len(self.systems) > 1:
            raise ValueError(f"command '{self.command}' takes a single system")
        return self
