# Simulation controller for integrating the curved n-body equations of motion

# Import requirements
import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from models.equilibria import MassVector
from models.errors import (
    InvalidConfigurationError, NBodyError, NumericalFailureError, SingularityError, ValidationError
)
from models.geometry import (
    PolarConfiguration, SpaceSpec, embed_polar, normalize_to_manifold,
    pairwise_euclidean_distance, rotate_plane, tangent_project
)

logger = logging.getLogger(__name__)


@dataclass
class AmbientState:
    """
    Phase state of n bodies: positions q_i on the manifold and velocities q_i'

    positions and velocities are arrays of shape (n, k+1).
    """
    positions: np.ndarray
    velocities: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        self.velocities = np.atleast_2d(np.asarray(self.velocities, dtype=float))
        if self.positions.shape != self.velocities.shape:
            raise ValidationError(
                f"positions {self.positions.shape} and velocities {self.velocities.shape} differ")
        self.time = float(self.time)

    @property
    def n(self) -> int:
        return self.positions.shape[0]


@dataclass
class IntegrationConfig:
    """Fixed-step integration settings and the state tolerances"""
    step_size: float
    t_end: float
    projection_enabled: bool = True
    output_stride: int = 100
    tol_manifold: float = 1e-9
    tol_tangent: float = 1e-9
    tol_singularity: float = 1e-10

    def __post_init__(self):
        problems = []
        if not self.step_size > 0:
            problems.append(f"step_size must be positive, got {self.step_size}")
        if not self.t_end > 0:
            problems.append(f"t_end must be positive, got {self.t_end}")
        if self.step_size > 0 and self.t_end > 0 and not self.step_size < self.t_end:
            problems.append(f"step_size {self.step_size} must be below t_end {self.t_end}")
        if int(self.output_stride) != self.output_stride or self.output_stride < 1:
            problems.append(f"output_stride must be a positive integer, got {self.output_stride}")
        for name in ('tol_manifold', 'tol_tangent', 'tol_singularity'):
            if not getattr(self, name) > 0:
                problems.append(f"{name} must be positive")
        if problems:
            raise ValidationError("; ".join(problems))


def validate_state(state: AmbientState, space: SpaceSpec, cfg: IntegrationConfig) -> None:
    """Raise if positions leave the manifold, velocities are not tangent, or a pair is singular"""
    w = space.weights
    q, v = state.positions, state.velocities
    if q.shape[1] != space.ambient_dim:
        raise ValidationError(f"states in k={space.k} need {space.ambient_dim} coordinates")
    drift = np.abs(np.sum(q * q * w, axis=1) - space.sigma)
    if np.any(drift > cfg.tol_manifold):
        raise InvalidConfigurationError(
            f"body {int(np.argmax(drift))} is off the manifold by {drift.max():.3g}")
    if space.sigma == -1 and np.any(q[:, -1] <= 0):
        raise InvalidConfigurationError("hyperboloid points must lie on the upper sheet")
    tangency = np.abs(np.sum(q * v * w, axis=1))
    if np.any(tangency > cfg.tol_tangent):
        raise InvalidConfigurationError(
            f"velocity of body {int(np.argmax(tangency))} is not tangent ({tangency.max():.3g})")
    _gram_denominators(q, space.sigma, w, cfg.tol_singularity)


def _gram_denominators(q, sigma, w, tol_singularity):
    gram = (q * w) @ q.T
    denom = sigma - sigma * gram ** 2
    off = ~np.eye(q.shape[0], dtype=bool)
    singular = off & (denom <= tol_singularity)
    if singular.any():
        i, j = np.argwhere(singular)[0]
        kind = "collision" if sigma * gram[i, j] > 0 else "antipodal singularity"
        raise SingularityError(f"{kind} between bodies {i} and {j}", pair=(int(i), int(j)))
    return gram, np.where(off, denom, 1.0), off


def _acceleration(q, v, m, sigma, w, tol_singularity):
    gram, denom, off = _gram_denominators(q, sigma, w, tol_singularity)
    coef = np.where(off, m[None, :] / denom ** 1.5, 0.0)
    gravity = coef @ q - sigma * np.sum(coef * gram, axis=1)[:, None] * q
    speed2 = np.sum(v * v * w, axis=1)
    return gravity - sigma * speed2[:, None] * q


def acceleration(state: AmbientState, masses: MassVector, space: SpaceSpec,
                 tol_singularity: float = 1e-10) -> np.ndarray:
    """
    Right-hand side of the equations of motion for every body

    q_i'' = sum_j m_j (q_j - sigma (q_i.q_j) q_i) / (sigma - sigma (q_i.q_j)^2)^(3/2)
            - sigma (q_i'.q_i') q_i

    Returns:
        numpy.ndarray: Accelerations, shape (n, k+1)

    Raises:
        SingularityError: if sigma - sigma (q_i.q_j)^2 <= tol_singularity for a pair
    """
    if len(masses) != state.n:
        raise ValidationError(f"{len(masses)} masses for {state.n} bodies")
    return _acceleration(state.positions, state.velocities, masses.as_array(),
                         space.sigma, space.weights, tol_singularity)


def initial_state_from_equilibrium(cfg: PolarConfiguration, angular_velocity: float,
                                   space: SpaceSpec) -> AmbientState:
    """Positions from the polar shape, velocities A J Q_i in the rotation plane"""
    positions = embed_polar(cfg, space)
    alphas = np.asarray(cfg.alphas, dtype=float)
    velocities = np.zeros_like(positions)
    velocities[:, 0] = -angular_velocity * cfg.r * np.sin(alphas)
    velocities[:, 1] = angular_velocity * cfg.r * np.cos(alphas)
    return AmbientState(positions, velocities, 0.0)


def rotating_solution(cfg: PolarConfiguration, angular_velocity: float, space: SpaceSpec,
                      t: float) -> AmbientState:
    """Closed-form rigidly rotating state at time t"""
    state0 = initial_state_from_equilibrium(cfg, angular_velocity, space)
    angle = angular_velocity * t
    return AmbientState(rotate_plane(angle, state0.positions),
                        rotate_plane(angle, state0.velocities), t)


def _rk4(q, v, h, m, space, tol_singularity):
    sigma, w = space.sigma, space.weights
    k1q, k1v = v, _acceleration(q, v, m, sigma, w, tol_singularity)
    k2q = v + 0.5 * h * k1v
    k2v = _acceleration(q + 0.5 * h * k1q, k2q, m, sigma, w, tol_singularity)
    k3q = v + 0.5 * h * k2v
    k3v = _acceleration(q + 0.5 * h * k2q, k3q, m, sigma, w, tol_singularity)
    k4q = v + h * k3v
    k4v = _acceleration(q + h * k3q, k4q, m, sigma, w, tol_singularity)
    q_new = q + (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
    v_new = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return q_new, v_new


def _advance(state, h, masses, space, cfg):
    q, v = _rk4(state.positions, state.velocities, h, masses.as_array(), space, cfg.tol_singularity)
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(v))):
        raise NumericalFailureError("non-finite state after RK4 step", time=state.time)
    if cfg.projection_enabled:
        q = normalize_to_manifold(q, space)
        v = tangent_project(q, v, space)
    return AmbientState(q, v, state.time + h)


def step(state: AmbientState, masses: MassVector, space: SpaceSpec,
         cfg: IntegrationConfig) -> AmbientState:
    """
    One classical RK4 step of size cfg.step_size

    With projection enabled, positions are rescaled onto the manifold and
    velocities re-projected onto the tangent space afterwards.
    """
    if len(masses) != state.n:
        raise ValidationError(f"{len(masses)} masses for {state.n} bodies")
    return _advance(state, cfg.step_size, masses, space, cfg)


def simulate(state0: AmbientState, masses: MassVector, space: SpaceSpec,
             cfg: IntegrationConfig) -> List[AmbientState]:
    """
    Integrate from state0 to state0.time + t_end with equal fixed steps

    The number of steps is round(t_end / step_size) and the step is adjusted so
    the run ends exactly at t_end. Samples are the initial state, every
    output_stride-th step and the final state.

    Returns:
        list: Sampled AmbientState objects in time order

    Raises:
        SingularityError, NumericalFailureError: with .time set to the failing step
    """
    if len(masses) != state0.n:
        raise ValidationError(f"{len(masses)} masses for {state0.n} bodies")
    validate_state(state0, space, cfg)
    n_steps = max(1, int(round(cfg.t_end / cfg.step_size)))
    h = cfg.t_end / n_steps
    logger.info("Integrating %d bodies for %d steps of %.3g", state0.n, n_steps, h)

    series = [state0]
    state = state0
    for index in range(1, n_steps + 1):
        try:
            state = _advance(state, h, masses, space, cfg)
        except NBodyError as exc:
            exc.time = state.time
            logger.error("Integration aborted at t=%.17g: %s", state.time, exc)
            raise
        # Pin sample times to the grid instead of accumulating h
        state.time = state0.time + (cfg.t_end if index == n_steps else index * h)
        if index % cfg.output_stride == 0 or index == n_steps:
            series.append(state)
    return series


def rigidity_drift(series: Sequence[AmbientState], reference: AmbientState) -> float:
    """Largest change of any pairwise distance over the series, relative to reference"""
    if not series:
        raise ValidationError("rigidity drift needs at least one sample")
    d0 = pairwise_euclidean_distance(reference.positions)
    return max(float(np.max(np.abs(pairwise_euclidean_distance(s.positions) - d0)))
               for s in series)


def total_energy(state: AmbientState, masses: MassVector, space: SpaceSpec) -> float:
    """
    Conserved energy 1/2 sum m_i (q_i'.q_i') - U

    U = sum_{i<j} m_i m_j sigma (q_i.q_j) / (sigma - sigma (q_i.q_j)^2)^(1/2) is the
    force function whose constrained gradient flow gives the equations of motion.
    """
    m = masses.as_array()
    w = space.weights
    q, v = state.positions, state.velocities
    kinetic = 0.5 * float(np.sum(m * np.sum(v * v * w, axis=1)))
    gram, denom, off = _gram_denominators(q, space.sigma, w, 0.0)
    upper = np.triu(off, 1)
    pair = np.outer(m, m) * space.sigma * gram / np.sqrt(denom)
    return kinetic - float(np.sum(pair[upper]))
