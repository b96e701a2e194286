"""
Fitting the Weizsacker weight q and minimizing the combined energy functional.

    T_q[rho] = C int rho^p + q T_W[rho],   E[rho] = T_q[rho] + int v_ext rho

q is fitted by least squares against exact kinetic energies of reference
systems. The minimizer parametrizes rho = chi^2, takes gradient steps on chi
with backtracking and rescales chi after every step so that int rho = N.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ofke.config import SolverOptions
from ofke.errors import DomainError
from ofke.functionals import combined_q, tf_integral, weizsacker
from ofke.grid import Grid, Measure, ScalarField, derivative_matrix, integrate
from ofke.systems import DensityField, ReferenceSystem, density_from_values

logger = logging.getLogger(__name__)

DEGENERATE_DESIGN = 1e-30
STEP_GROWTH = 1.25


class SystemFit(BaseModel):
    """Model prediction for one reference system at the fitted q."""
    model_config = ConfigDict(frozen=True)

    name: str
    t_exact: float
    t_model: float
    error: float = Field(..., description="t_model - t_exact")


class QFitResult(BaseModel):
    """Least-squares estimate of q for a fixed prefactor C."""
    model_config = ConfigDict(frozen=True)

    q_star: float = Field(..., ge=0.0, le=1.0, description="Fitted Weizsacker weight")
    C: float = Field(..., description="Prefactor used for the TF-like term")
    rms_error: float = Field(..., ge=0.0)
    rms_at_q0: float = Field(..., ge=0.0)
    rms_at_q1: float = Field(..., ge=0.0)
    per_system: List[SystemFit] = Field(default_factory=list)

    @model_validator(mode="after")
    def _optimal_on_interval(self) -> "QFitResult":
        best_end = min(self.rms_at_q0, self.rms_at_q1)
        if self.rms_error > best_end * (1.0 + 1e-9) + 1e-15:
            raise ValueError("rms_error exceeds the error at an endpoint of [0, 1]")
        return self


def _rms(residuals: np.ndarray) -> float:
    return float(np.sqrt(np.mean(residuals ** 2)))


def fit_q_from_terms(
    names: Sequence[str],
    t_exact: Sequence[float],
    tf: Sequence[float],
    tw: Sequence[float],
    C: float,
) -> QFitResult:
    """
    Closed-form least squares for q in t_exact ~ C tf + q tw, clamped to [0, 1].

    Raises:
        DomainError: For an empty input, an all-zero Weizsacker column, or
            fewer than two systems
    """
    if not names:
        raise DomainError("fit_q needs at least one system")
    t = np.asarray(t_exact, dtype=float)
    tf = np.asarray(tf, dtype=float)
    tw = np.asarray(tw, dtype=float)
    if not (t.size == tf.size == tw.size == len(names)):
        raise DomainError("Names and term arrays must have equal length")

    denom = float(np.sum(tw ** 2))
    if denom < DEGENERATE_DESIGN:
        raise DomainError("q is unidentifiable: every Weizsacker term is zero")
    if len(names) < 2:
        raise DomainError("fit_q needs at least two systems")

    target = t - C * tf
    q_star = min(max(float(np.sum(target * tw)) / denom, 0.0), 1.0)

    model = C * tf + q_star * tw
    per_system = [
        SystemFit(name=name, t_exact=float(te), t_model=float(tm), error=float(tm - te))
        for name, te, tm in zip(names, t, model)
    ]
    result = QFitResult(
        q_star=q_star,
        C=C,
        rms_error=_rms(model - t),
        rms_at_q0=_rms(C * tf - t),
        rms_at_q1=_rms(C * tf + tw - t),
        per_system=per_system,
    )
    logger.info(f"Fitted q*={q_star:.8g} for C={C:.8g} over {len(names)} systems (rms {result.rms_error:.3g})")
    return result


def scan_q(
    t_exact: Sequence[float],
    tf: Sequence[float],
    tw: Sequence[float],
    C: float,
    step: float = 1e-4,
) -> float:
    """Grid search for the q in [0, 1] minimizing the squared residuals."""
    if step <= 0 or step > 1:
        raise DomainError(f"Scan step must lie in (0, 1], got {step}")
    t = np.asarray(t_exact, dtype=float)
    target = t - C * np.asarray(tf, dtype=float)
    tw = np.asarray(tw, dtype=float)
    qs = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    cost = np.sum((target[None, :] - qs[:, None] * tw[None, :]) ** 2, axis=1)
    return float(qs[np.argmin(cost)])


def fit_q(systems: Sequence[ReferenceSystem], C: float) -> QFitResult:
    """
    Fit q against the exact kinetic energies of ``systems``.

    Raises:
        DomainError: If the list is empty, a system lacks t_exact, or the
            fit is degenerate
    """
    if not systems:
        raise DomainError("fit_q needs at least one system")
    missing = [s.label() for s in systems if s.t_exact is None]
    if missing:
        raise DomainError(f"Systems without exact kinetic energy: {', '.join(missing)}")

    names = [s.label() for s in systems]
    t_exact = [float(s.t_exact) for s in systems]
    tf = [tf_integral(s.density) for s in systems]
    tw = [weizsacker(s.density) for s in systems]
    return fit_q_from_terms(names, t_exact, tf, tw, C)


def energy_functional(rho: DensityField, v_ext: ScalarField, C: float, q: float) -> float:
    """E[rho] = T_q[rho] + int v_ext rho."""
    potential = integrate(ScalarField(v_ext.values * rho.values, rho.grid), rho.grid)
    return combined_q(rho, C, q).total + potential


@dataclass(frozen=True, eq=False)
class SolveResult:
    """Final iterate of minimize_energy."""
    density: DensityField
    energy: float
    converged: bool
    iterations: int
    energy_history: Tuple[float, ...]


class _ChiEnergy:
    """E(chi) and its weighted gradient for rho = chi^2 on a fixed grid."""

    def __init__(self, v: np.ndarray, g: Grid, C: float, q: float, p: float):
        self.v = v
        self.w = g.weights
        self.D = derivative_matrix(g)
        self.C = C
        self.q = q
        self.p = p

    def energy(self, chi: np.ndarray) -> float:
        slope = self.D @ chi
        tf = self.C * np.sum(self.w * np.abs(chi) ** (2.0 * self.p))
        tw = 0.5 * self.q * np.sum(self.w * slope ** 2)
        return float(tf + tw + np.sum(self.w * self.v * chi ** 2))

    def gradient(self, chi: np.ndarray) -> np.ndarray:
        slope = self.D @ chi
        tf = 2.0 * self.p * self.C * np.abs(chi) ** (2.0 * self.p - 1.0) * np.sign(chi)
        tw = self.q * (self.D.T @ (self.w * slope)) / self.w
        return tf + tw + 2.0 * self.v * chi


def _normalize(chi: np.ndarray, w: np.ndarray, N: float) -> np.ndarray:
    return chi * math.sqrt(N / float(np.sum(w * chi ** 2)))


def minimize_energy(
    v_ext: ScalarField,
    N: float,
    C: float,
    q: float,
    g: Grid,
    opts: Optional[SolverOptions] = None,
    initial: Optional[DensityField] = None,
) -> SolveResult:
    """
    Minimize E[rho] over densities with int rho = N.

    Args:
        v_ext: External potential on ``g``
        N: Particle number (> 0)
        C: TF-like prefactor (>= 0)
        q: Weizsacker weight in [0, 1]
        g: Uniform line1d or radial3d grid
        opts: Solver options
        initial: Starting density; defaults to one proportional to exp(-(v - min v))

    Returns:
        SolveResult; ``converged`` is False when max_iterations was reached
    """
    opts = opts or SolverOptions()
    if N <= 0:
        raise DomainError(f"Particle number must be positive, got N={N}")
    if C < 0:
        raise DomainError(f"C must be >= 0, got {C}")
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"q must lie in [0, 1], got {q}")
    if g.measure == Measure.SQUARE_2D:
        raise DomainError("minimize_energy works on line1d or radial3d grids")
    if not v_ext.grid.matches(g):
        raise DomainError("v_ext must live on the solver grid")

    v = v_ext.values
    w = g.weights
    p = 3.0 if g.measure == Measure.LINE_1D else 5.0 / 3.0
    functional = _ChiEnergy(v, g, C, q, p)

    if initial is None:
        chi = np.exp(-0.5 * (v - np.min(v)))
    else:
        if not initial.grid.matches(g):
            raise DomainError("Initial density must live on the solver grid")
        chi = np.sqrt(initial.values)
    chi = _normalize(chi, w, N)

    energy = functional.energy(chi)
    history = [energy]
    step = opts.step
    converged = False
    iterations = 0

    for iterations in range(1, opts.max_iterations + 1):
        direction = functional.gradient(chi)
        trial_step = step
        for _ in range(opts.max_backtracks):
            trial = _normalize(chi - trial_step * direction, w, N)
            trial_energy = functional.energy(trial)
            if trial_energy <= energy:
                break
            trial_step *= 0.5
        else:
            logger.info(f"Backtracking exhausted at iteration {iterations}; energy {energy:.12g} is stationary")
            converged = True
            break

        change = energy - trial_energy
        chi, energy = trial, trial_energy
        history.append(energy)
        step = min(trial_step * STEP_GROWTH, opts.step)
        logger.debug(f"iteration {iterations}: E={energy:.12g} dE={change:.3g} step={trial_step:.3g}")

        if change < opts.tolerance:
            converged = True
            break

    if converged:
        logger.info(f"Solver converged after {iterations} iterations: E={energy:.12g}")
    else:
        logger.warning(f"Solver stopped at max_iterations={opts.max_iterations}: E={energy:.12g}")

    density = density_from_values(chi ** 2, g, n_particles=N)
    return SolveResult(
        density=density,
        energy=energy_functional(density, v_ext, C, q),
        converged=converged,
        iterations=iterations,
        energy_history=tuple(history),
    )
