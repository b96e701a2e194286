"""
Kinetic-energy density functionals evaluated term by term.

Thomas-Fermi-like terms (int rho^{5/3} in 3D, int rho^3 in 1D), the
Weizsacker term (1/8) int |grad rho|^2 / rho, the one-dimensional
March-Young form, the N-dependent Gazquez-Robles form and the one-parameter
combination C int rho^{5/3} + q T_W together with its functional derivative.
"""
from typing import Optional
import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ofke.errors import DomainError
from ofke.grid import Measure, ScalarField, derivative, integrate, laplacian
from ofke.systems import DensityField

logger = logging.getLogger(__name__)

C_F_SQ = (3.0 * math.pi ** 2) ** (2.0 / 3.0)
C_LT = 9.11
C_LT_NUMERIC = 9.578
C_1D = math.pi ** 2 / 2.0
C_TF_1D = math.pi ** 2 / 6.0
DENSITY_THRESHOLD = 1e-14


class FunctionalBreakdown(BaseModel):
    """Per-term values of a functional evaluation (Hartree)."""
    model_config = ConfigDict(frozen=True)

    tf_term: float = Field(..., ge=0.0, description="Thomas-Fermi-like term")
    weizsacker_term: float = Field(..., ge=0.0, description="(Weighted) Weizsacker term")
    info_term: Optional[float] = Field(default=None, description="Information term, when evaluated")
    total: float = Field(..., description="Sum of the present terms")

    @model_validator(mode="after")
    def _total_is_sum(self) -> "FunctionalBreakdown":
        parts = self.tf_term + self.weizsacker_term + (self.info_term or 0.0)
        if abs(self.total - parts) > 1e-12 * max(1.0, abs(parts)):
            raise ValueError(f"total {self.total} is not the sum of its terms {parts}")
        return self


def _require_evaluable(rho: DensityField) -> None:
    if rho.grid.measure == Measure.SQUARE_2D:
        raise DomainError("Functionals are evaluated on line1d or radial3d densities")
    if np.any(rho.values < 0):
        raise DomainError("Density has negative values")


def _require_line(rho: DensityField, what: str) -> None:
    if rho.grid.measure != Measure.LINE_1D:
        raise DomainError(f"{what} needs a line1d density, got {rho.grid.measure.value}")


def _power_integral(rho: DensityField, power: float) -> float:
    return integrate(ScalarField(rho.values ** power, rho.grid), rho.grid)


def tf_exponent(rho: DensityField) -> float:
    """Exponent of the Thomas-Fermi-like integrand: 3 on lines, 5/3 otherwise."""
    return 3.0 if rho.grid.measure == Measure.LINE_1D else 5.0 / 3.0


def tf_integral(rho: DensityField) -> float:
    """Dimension-appropriate TF integral: int rho^3 in 1D, int rho^{5/3} in 3D."""
    _require_evaluable(rho)
    return _power_integral(rho, tf_exponent(rho))


def thomas_fermi_3d(rho: DensityField, coeff: float = C_F_SQ / 2.0) -> float:
    """
    coeff * int rho^{5/3}.

    Line densities are accepted but the 5/3 power is then only a formal
    analogue; use tf_1d for the one-dimensional Thomas-Fermi term.
    """
    _require_evaluable(rho)
    if coeff <= 0:
        raise DomainError(f"TF coefficient must be positive, got {coeff}")
    if rho.grid.measure == Measure.LINE_1D:
        logger.debug("thomas_fermi_3d evaluated on a line1d density")
    return coeff * _power_integral(rho, 5.0 / 3.0)


def weizsacker(rho: DensityField, form: str = "sqrt", threshold: float = DENSITY_THRESHOLD) -> float:
    """
    Weizsacker term (1/8) int |grad rho|^2 / rho.

    Args:
        rho: Density on a line1d or radial3d grid
        form: "sqrt" evaluates 1/2 int |grad sqrt(rho)|^2; "direct" evaluates
            the quotient, masking nodes where rho < threshold
        threshold: Masking threshold for the direct form

    Returns:
        Non-negative value in Hartree
    """
    _require_evaluable(rho)
    g = rho.grid

    if form == "sqrt":
        slope = derivative(ScalarField(np.sqrt(rho.values), g), g).values
        return 0.5 * integrate(ScalarField(slope ** 2, g), g)

    if form == "direct":
        slope = derivative(rho.field, g).values
        mask = rho.values >= threshold
        integrand = np.zeros_like(slope)
        integrand[mask] = slope[mask] ** 2 / rho.values[mask]
        return integrate(ScalarField(integrand, g), g) / 8.0

    raise DomainError(f"Unknown Weizsacker form '{form}'")


def tf_1d(rho: DensityField, coeff: float = C_1D) -> float:
    """coeff * int rho^3 (P_F proportional to rho in one dimension)."""
    _require_evaluable(rho)
    _require_line(rho, "tf_1d")
    if coeff <= 0:
        raise DomainError(f"1D TF coefficient must be positive, got {coeff}")
    return coeff * _power_integral(rho, 3.0)


def march_young_1d(rho: DensityField, c_my: float) -> float:
    """
    c_my * int rho^{3/2} + int |grad rho|^2 / rho.

    Implemented exactly as the form is usually quoted: exponent 3/2 and an
    unweighted gradient term, i.e. 8 * T_W. ``c_my`` has no default.
    """
    _require_evaluable(rho)
    _require_line(rho, "march_young_1d")
    if c_my is None or c_my < 0:
        raise DomainError(f"March-Young constant must be supplied and >= 0, got {c_my}")
    return c_my * _power_integral(rho, 1.5) + 8.0 * weizsacker(rho)


def gazquez_robles(rho: DensityField, c1: float, c0: float) -> float:
    """c1 (1 - c0 / N^{1/3}) int rho^{5/3} + T_W; both constants caller-supplied."""
    _require_evaluable(rho)
    if rho.n_particles <= 0:
        raise DomainError("Gazquez-Robles form needs N > 0")
    if c1 <= 0:
        raise DomainError(f"c1 must be positive, got {c1}")
    prefactor = c1 * (1.0 - c0 / rho.n_particles ** (1.0 / 3.0))
    return prefactor * _power_integral(rho, 5.0 / 3.0) + weizsacker(rho)


def _check_cq(C: float, q: float) -> None:
    if C < 0:
        raise DomainError(f"C must be >= 0, got {C}")
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"q must lie in [0, 1], got {q}")


def combined_q(rho: DensityField, C: float, q: float) -> FunctionalBreakdown:
    """
    T_q[rho] = C * int rho^p + q * T_W with p = 5/3 (3D) or 3 (1D).
    """
    _check_cq(C, q)
    tf_term = C * tf_integral(rho)
    weizsacker_term = q * weizsacker(rho)
    return FunctionalBreakdown(
        tf_term=tf_term,
        weizsacker_term=weizsacker_term,
        total=tf_term + weizsacker_term,
    )


def functional_derivative_combined(
    rho: DensityField,
    C: float,
    q: float,
    threshold: float = DENSITY_THRESHOLD,
) -> ScalarField:
    """
    delta T_q / delta rho = p C rho^{p-1} + q [ |grad rho|^2 / (8 rho^2) - lap(rho) / (4 rho) ].

    The Weizsacker part is set to zero where rho < threshold; on radial grids
    the Laplacian is the spherically symmetric one.
    """
    _check_cq(C, q)
    _require_evaluable(rho)
    g = rho.grid
    p = tf_exponent(rho)
    values = rho.values

    potential = p * C * values ** (p - 1.0)

    if q > 0:
        slope = derivative(rho.field, g).values
        curvature = laplacian(rho.field, g).values
        mask = values >= threshold
        bohm = np.zeros_like(values)
        bohm[mask] = (
            slope[mask] ** 2 / (8.0 * values[mask] ** 2)
            - curvature[mask] / (4.0 * values[mask])
        )
        potential = potential + q * bohm

    return ScalarField(potential, g)
