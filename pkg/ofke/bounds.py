"""
Rigorous and approximate bounds on the kinetic energy and their verification.

    lower (Lieb-Thirring)   (C_LT / 2) int rho^{5/3}
    upper (TF + W)          (C_F^2 / 2) int rho^{5/3} + T_W
    Zumbach                 [1 + C_Zu N^{2/3}] T_W

A violated inequality is a finding, not an error: verify_chain always
returns a BoundReport and records the outcome in its ``chain_ok`` flags.
"""
from typing import Dict, List, Optional
import json
import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ofke import reports
from ofke.config import Coefficients
from ofke.errors import DomainError
from ofke.functionals import C_1D, C_F_SQ, C_LT, C_TF_1D, tf_integral, weizsacker
from ofke.grid import Measure
from ofke.systems import DensityField, ReferenceSystem

logger = logging.getLogger(__name__)

C_ZU = 15.0 * (4.0 * math.pi) ** 2 * (3.0 / 5.0) * (1.0 / 5.0) ** (2.0 / 3.0)


class BoundReport(BaseModel):
    """Outcome of checking lower <= exact <= upper <= Zumbach for one system."""
    model_config = ConfigDict(frozen=True)

    system: str = Field(..., description="System name")
    params: Dict[str, float] = Field(default_factory=dict, description="System parameters")
    t_exact: float = Field(..., description="Exact kinetic energy (Hartree)")
    lower_lt: float = Field(..., description="Lieb-Thirring lower bound")
    upper_tfw: float = Field(..., description="TF + Weizsacker upper bound")
    zumbach: Optional[float] = Field(default=None, description="Zumbach bound; null in 1D")
    margin_lower: float = Field(..., description="t_exact - lower_lt")
    margin_upper: float = Field(..., description="upper_tfw - t_exact")
    chain_ok: List[Optional[bool]] = Field(
        ...,
        min_length=3,
        max_length=3,
        description="lower <= exact, exact <= upper, upper <= zumbach (null when not applicable)",
    )

    @model_validator(mode="after")
    def _margins_consistent(self) -> "BoundReport":
        scale = max(1.0, abs(self.t_exact), abs(self.lower_lt), abs(self.upper_tfw))
        if abs(self.margin_lower - (self.t_exact - self.lower_lt)) > 1e-9 * scale:
            raise ValueError("margin_lower does not match t_exact - lower_lt")
        if abs(self.margin_upper - (self.upper_tfw - self.t_exact)) > 1e-9 * scale:
            raise ValueError("margin_upper does not match upper_tfw - t_exact")
        if self.chain_ok[0] != (self.margin_lower >= 0) or self.chain_ok[1] != (self.margin_upper >= 0):
            raise ValueError("chain_ok flags disagree with the margins")
        if (self.zumbach is None) != (self.chain_ok[2] is None):
            raise ValueError("third chain flag must be null exactly when zumbach is null")
        return self

    def to_json(self) -> str:
        return reports.dumps(self.model_dump())

    @classmethod
    def from_json(cls, text: str) -> "BoundReport":
        return cls.model_validate(json.loads(text))


class PathakGadreCheck(BaseModel):
    """int rho^{5/3} <= c_pg N^{2/3} T_W evaluated for a caller-supplied c_pg."""
    model_config = ConfigDict(frozen=True)

    lhs: float
    rhs: float
    holds: bool


def _require_radial(rho: DensityField, what: str) -> None:
    if rho.grid.measure != Measure.RADIAL_3D:
        raise DomainError(f"{what} is a 3D bound, got a {rho.grid.measure.value} density")


def upper_bound_tfw(rho: DensityField, c_f_sq: float = C_F_SQ, c_1d: float = C_1D) -> float:
    """
    TF + Weizsacker upper bound.

    3D: (c_f_sq / 2) int rho^{5/3} + T_W. 1D: c_1d int rho^3 + T_W.
    """
    coeff = c_1d if rho.grid.measure == Measure.LINE_1D else c_f_sq / 2.0
    return coeff * tf_integral(rho) + weizsacker(rho)


def lower_bound_lieb_thirring(rho: DensityField, c_lt: float = C_LT) -> float:
    """(c_lt / 2) int rho^{5/3} on a radial density."""
    _require_radial(rho, "lower_bound_lieb_thirring")
    if c_lt <= 0:
        raise DomainError(f"Lieb-Thirring constant must be positive, got {c_lt}")
    return 0.5 * c_lt * tf_integral(rho)


def lower_bound_1d(rho: DensityField, c_lt_1d: float = C_TF_1D) -> float:
    """c_lt_1d int rho^3 on a line density."""
    if rho.grid.measure != Measure.LINE_1D:
        raise DomainError(f"lower_bound_1d needs a line1d density, got {rho.grid.measure.value}")
    if c_lt_1d <= 0:
        raise DomainError(f"1D lower-bound constant must be positive, got {c_lt_1d}")
    return c_lt_1d * tf_integral(rho)


def zumbach_bound(rho: DensityField, N: float) -> float:
    """[1 + C_Zu N^{2/3}] T_W for N >= 1."""
    _require_radial(rho, "zumbach_bound")
    if N < 1:
        raise DomainError(f"Zumbach bound needs N >= 1, got N={N}")
    return (1.0 + C_ZU * N ** (2.0 / 3.0)) * weizsacker(rho)


def pathak_gadre_check(rho: DensityField, c_pg: float) -> PathakGadreCheck:
    """Compare int rho^{5/3} with c_pg N^{2/3} T_W; no default c_pg exists."""
    _require_radial(rho, "pathak_gadre_check")
    if c_pg is None or c_pg <= 0:
        raise DomainError(f"Pathak-Gadre constant must be supplied and positive, got {c_pg}")
    lhs = tf_integral(rho)
    rhs = c_pg * rho.n_particles ** (2.0 / 3.0) * weizsacker(rho)
    return PathakGadreCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs)


def _degenerate_report(sys: ReferenceSystem) -> BoundReport:
    line = sys.density.grid.measure == Measure.LINE_1D
    return BoundReport(
        system=sys.name,
        params=sys.params,
        t_exact=0.0,
        lower_lt=0.0,
        upper_tfw=0.0,
        zumbach=None if line else 0.0,
        margin_lower=0.0,
        margin_upper=0.0,
        chain_ok=[True, True, None if line else True],
    )


def verify_chain(sys: ReferenceSystem, coeffs: Optional[Coefficients] = None) -> BoundReport:
    """
    Evaluate every bound for ``sys`` and compare against its exact kinetic energy.

    Radial densities use the Lieb-Thirring lower bound and the Zumbach
    comparison; line densities use the 1D lower bound and skip Zumbach.

    Raises:
        DomainError: If the system has no exact kinetic energy
    """
    coeffs = coeffs or Coefficients()
    if sys.t_exact is None:
        raise DomainError(f"System {sys.name} has no exact kinetic energy to compare against")

    rho = sys.density
    if rho.n_particles == 0 and not np.any(rho.values):
        logger.info(f"Degenerate zero density for {sys.name}; reporting zeros")
        return _degenerate_report(sys)

    t_exact = float(sys.t_exact)
    upper = upper_bound_tfw(rho, c_f_sq=coeffs.c_f_sq, c_1d=coeffs.c_1d)

    zumbach = None
    third = None
    if rho.grid.measure == Measure.LINE_1D:
        lower = lower_bound_1d(rho, coeffs.c_lt_1d)
    else:
        lower = lower_bound_lieb_thirring(rho, coeffs.c_lt)
        if rho.n_particles >= 1:
            zumbach = zumbach_bound(rho, rho.n_particles)
            third = upper <= zumbach

    margin_lower = t_exact - lower
    margin_upper = upper - t_exact
    chain_ok = [margin_lower >= 0, margin_upper >= 0, third]
    if not all(flag is not False for flag in chain_ok):
        logger.warning(f"Bound chain violated for {sys.label()}: {chain_ok}")

    logger.info(
        f"Bounds for {sys.label()}: {lower:.8g} <= {t_exact:.8g} <= {upper:.8g}"
        + (f" <= {zumbach:.8g}" if zumbach is not None else "")
    )
    return BoundReport(
        system=sys.name,
        params=sys.params,
        t_exact=t_exact,
        lower_lt=lower,
        upper_tfw=upper,
        zumbach=zumbach,
        margin_lower=margin_lower,
        margin_upper=margin_upper,
        chain_ok=chain_ok,
    )
