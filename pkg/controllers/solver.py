# Equilibrium solver: damped Newton iteration on the tangential criterion

# Import requirements
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from models.equilibria import (
    EquilibriumRecord, MassVector, angular_velocity_consistency, angular_velocity_squared,
    residual_from_angles
)
from models.errors import UndeterminedAngularVelocityError, SingularityError, ValidationError
from models.geometry import PolarConfiguration, SpaceSpec, solve_z_block

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SolverOptions:
    """Newton iteration settings"""
    max_iterations: int = 200
    tolerance: float = 1e-12
    max_halvings: int = 30
    fd_step: float = 1e-7
    consistency_tolerance: float = 1e-10
    # Only used on the great circle, where the balance leaves A free
    great_circle_angular_velocity: Optional[float] = None


@dataclass(frozen=True)
class NoSolution:
    """Diagnostics of a solve that did not produce a relative equilibrium"""
    reason: str
    iterations: int
    residual_norm: float
    alphas: Tuple[float, ...]


def _reduced_residual(x, masses, r, sigma):
    full = np.concatenate(([0.0], x))
    residual = residual_from_angles(masses, full, r, sigma)
    return residual[1:], residual


def _jacobian(x, f0, masses, r, sigma, fd_step):
    """Forward differences, falling back to backward ones next to a singular pair"""
    jac = np.empty((f0.size, x.size))
    for col in range(x.size):
        h = fd_step * max(1.0, abs(x[col]))
        shifted = x.copy()
        try:
            shifted[col] = x[col] + h
            jac[:, col] = (_reduced_residual(shifted, masses, r, sigma)[0] - f0) / h
        except SingularityError:
            shifted[col] = x[col] - h
            jac[:, col] = (f0 - _reduced_residual(shifted, masses, r, sigma)[0]) / h
    return jac


def _newton_direction(jac, f0):
    try:
        return np.linalg.solve(jac, -f0)
    except np.linalg.LinAlgError:
        # Singular Jacobian: least-squares step instead
        return np.linalg.lstsq(jac, -f0, rcond=None)[0]


def solve_equilibrium(masses: MassVector, r: float, space: SpaceSpec,
                      initial_alphas: Sequence[float],
                      options: Optional[SolverOptions] = None) -> Union[EquilibriumRecord, NoSolution]:
    """
    Find angles balancing the tangential criterion at radius r

    The first angle is pinned to zero and Newton's method runs on F_2..F_n
    with a finite-difference Jacobian. Each step is halved until the residual
    decreases and no pair becomes singular.

    Args:
        masses (MassVector): Body masses
        r (float): Common radius
        space (SpaceSpec): Target space
        initial_alphas (sequence): Starting angles, pairwise distinct
        options (SolverOptions): Iteration settings

    Returns:
        EquilibriumRecord on success, NoSolution otherwise
    """
    options = options or SolverOptions()
    alphas0 = np.asarray(initial_alphas, dtype=float)
    if alphas0.size != len(masses):
        raise ValidationError(f"{alphas0.size} initial angles for {len(masses)} masses")
    if alphas0.size < 2:
        raise ValidationError("an equilibrium needs at least two bodies")
    z_block = solve_z_block(r, space)
    great_circle = not any(z_block)
    if great_circle and options.great_circle_angular_velocity is None:
        raise UndeterminedAngularVelocityError(
            "great-circle configuration needs a user supplied angular velocity")

    m = masses.as_array()
    sigma = space.sigma
    x = alphas0[1:] - alphas0[0]
    try:
        f_red, f_full = _reduced_residual(x, m, r, sigma)
    except SingularityError as exc:
        raise ValidationError(f"initial angles are not pairwise distinct: {exc}") from exc

    iterations = 0
    while True:
        residual_norm = float(np.max(np.abs(f_full)))
        logger.debug("iteration %d: |F|_inf = %.3e", iterations, residual_norm)
        if residual_norm <= options.tolerance:
            break
        if iterations >= options.max_iterations:
            return NoSolution("maximum iterations reached", iterations, residual_norm,
                              tuple(np.concatenate(([0.0], x))))
        jac = _jacobian(x, f_red, m, r, sigma, options.fd_step)
        direction = _newton_direction(jac, f_red)
        merit = float(np.dot(f_red, f_red))
        damping = 1.0
        for _ in range(options.max_halvings + 1):
            trial = x + damping * direction
            try:
                trial_red, trial_full = _reduced_residual(trial, m, r, sigma)
            except SingularityError:
                logger.debug("step %.3g hits a singular pair, halving", damping)
            else:
                if np.dot(trial_red, trial_red) < merit:
                    x, f_red, f_full = trial, trial_red, trial_full
                    break
            damping *= 0.5
        else:
            return NoSolution("damping underflow", iterations, residual_norm,
                              tuple(np.concatenate(([0.0], x))))
        iterations += 1

    cfg = PolarConfiguration(r, np.mod(np.concatenate(([0.0], x)), TWO_PI), z_block)
    if great_circle:
        angular_velocity = float(options.great_circle_angular_velocity)
    else:
        spread = angular_velocity_consistency(masses, cfg, space)
        if spread > options.consistency_tolerance:
            logger.info("criterion root at r=%.6g is not balanced: A^2 spread %.3e", r, spread)
            return NoSolution(f"angular velocity inconsistent across bodies ({spread:.3e})",
                              iterations, residual_norm, cfg.alphas)
        a_squared = np.mean([angular_velocity_squared(masses, cfg, space, i) for i in range(cfg.n)])
        angular_velocity = float(np.sqrt(a_squared))
    logger.info("converged at r=%.6g after %d iterations, A=%.12g", r, iterations, angular_velocity)
    return EquilibriumRecord(space, masses, cfg, angular_velocity, residual_norm, True, iterations)
