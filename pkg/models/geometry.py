# Geometry of the constant-curvature spaces M_sigma^k embedded in R^(k+1)

# Import requirements
import logging
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from models.errors import InfeasibleRadiusError, InvalidConfigurationError, ValidationError

logger = logging.getLogger(__name__)

# Tolerance on |q.q - sigma| when validating states and configurations
TOL_MANIFOLD = 1e-9


@dataclass(frozen=True)
class SpaceSpec:
    """
    Curvature sign and manifold dimension

    sigma = +1 gives the unit sphere S^k, sigma = -1 the upper sheet of the
    hyperboloid model of H^k. Points live in R^(k+1).
    """
    sigma: int
    k: int = 2

    def __post_init__(self):
        if self.sigma not in (1, -1):
            raise ValidationError(f"sigma must be +1 or -1, got {self.sigma!r}")
        if int(self.k) != self.k or self.k < 2:
            raise ValidationError(f"k must be an integer >= 2, got {self.k!r}")

    @property
    def ambient_dim(self) -> int:
        return self.k + 1

    @property
    def weights(self) -> np.ndarray:
        """Diagonal of the sigma-weighted bilinear form"""
        w = np.ones(self.k + 1)
        w[-1] = self.sigma
        return w


@dataclass(frozen=True)
class PolarConfiguration:
    """
    Shape coordinates of a rigidly rotating configuration

    Body i sits at (r cos alpha_i, r sin alpha_i, Z) at time zero; every body
    shares the radius r and the trailing block Z (length k - 1).
    """
    r: float
    alphas: Tuple[float, ...]
    z_block: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, 'r', float(self.r))
        object.__setattr__(self, 'alphas', tuple(float(a) for a in self.alphas))
        object.__setattr__(self, 'z_block', tuple(float(z) for z in self.z_block))

    @property
    def n(self) -> int:
        return len(self.alphas)

    def with_alphas(self, alphas: Sequence[float]) -> 'PolarConfiguration':
        return PolarConfiguration(self.r, tuple(alphas), self.z_block)

    def z_is_zero(self) -> bool:
        return not any(self.z_block)


def _as_coords(x, space: SpaceSpec) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != space.ambient_dim:
        raise ValidationError(
            f"expected {space.ambient_dim} ambient coordinates, got shape {x.shape}")
    return x


def sigma_inner(x, y, space: SpaceSpec):
    """
    Sigma-weighted inner product x_1 y_1 + ... + x_k y_k + sigma x_{k+1} y_{k+1}

    Works on single points or on stacks of points along the last axis.

    Args:
        x: Ambient coordinates, shape (..., k+1)
        y: Ambient coordinates, shape (..., k+1)
        space (SpaceSpec): The space the points belong to

    Returns:
        float or numpy.ndarray: The inner product(s)
    """
    x = _as_coords(x, space)
    y = _as_coords(y, space)
    result = np.sum(x * y * space.weights, axis=-1)
    return float(result) if np.ndim(result) == 0 else result


def z_block_square(z_block: Sequence[float], space: SpaceSpec) -> float:
    """Z.Z with the sigma weight on the last entry"""
    z = np.asarray(z_block, dtype=float)
    if z.size == 0:
        return 0.0
    return float(np.sum(z[:-1] ** 2) + space.sigma * z[-1] ** 2)


def solve_z_block(r: float, space: SpaceSpec) -> Tuple[float, ...]:
    """
    Canonical trailing block for a radius: zeros except a nonnegative last entry

    Args:
        r (float): Common radius of the rotating block
        space (SpaceSpec): Target space

    Returns:
        tuple: z_block of length k - 1 closing r^2 + Z.Z = sigma
    """
    if not r > 0:
        raise ValidationError(f"radius must be positive, got {r}")
    if space.sigma == 1 and r > 1:
        raise InfeasibleRadiusError(f"radius {r} exceeds 1 on the sphere")
    last = np.sqrt(1.0 - r * r) if space.sigma == 1 else np.sqrt(1.0 + r * r)
    return (0.0,) * (space.k - 2) + (float(last),)


def validate_configuration(cfg: PolarConfiguration, space: SpaceSpec) -> None:
    """Raise if cfg cannot be embedded in the given space"""
    if not cfg.r > 0:
        raise ValidationError(f"radius must be positive, got {cfg.r}")
    if space.sigma == 1 and cfg.r > 1:
        raise InfeasibleRadiusError(f"radius {cfg.r} exceeds 1 on the sphere")
    if len(cfg.z_block) != space.k - 1:
        raise ValidationError(
            f"z_block must have {space.k - 1} entries for k={space.k}, got {len(cfg.z_block)}")
    closure = cfg.r ** 2 + z_block_square(cfg.z_block, space)
    if abs(closure - space.sigma) > TOL_MANIFOLD:
        raise InvalidConfigurationError(
            f"r^2 + Z.Z = {closure!r} does not close to sigma = {space.sigma}")
    if space.sigma == -1 and not cfg.z_block[-1] > 0:
        raise InvalidConfigurationError("hyperboloid points must lie on the upper sheet")


def embed_polar(cfg: PolarConfiguration, space: SpaceSpec) -> np.ndarray:
    """
    Ambient coordinates q_i(0) = (r cos alpha_i, r sin alpha_i, Z)

    Returns:
        numpy.ndarray: Positions, shape (n, k+1)
    """
    validate_configuration(cfg, space)
    alphas = np.asarray(cfg.alphas, dtype=float)
    points = np.empty((alphas.size, space.ambient_dim))
    points[:, 0] = cfg.r * np.cos(alphas)
    points[:, 1] = cfg.r * np.sin(alphas)
    points[:, 2:] = np.asarray(cfg.z_block, dtype=float)
    return points


def rotate_plane(t_angle: float, point) -> np.ndarray:
    """Apply the planar rotation T(t_angle) to the first two coordinates"""
    point = np.asarray(point, dtype=float)
    c, s = np.cos(t_angle), np.sin(t_angle)
    rotated = point.copy()
    rotated[..., 0] = c * point[..., 0] - s * point[..., 1]
    rotated[..., 1] = s * point[..., 0] + c * point[..., 1]
    return rotated


def pairwise_euclidean_distance(points) -> np.ndarray:
    """
    Symmetric matrix of ambient Euclidean distances ||q_i - q_j||

    This is the norm the minimum-distance bound is stated in, not the geodesic one.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return squareform(pdist(points))


def tangent_project(point, vector, space: SpaceSpec) -> np.ndarray:
    """
    Remove the normal component: v - sigma (q.v) q

    Accepts stacks of points and vectors along the leading axes.
    """
    point = _as_coords(point, space)
    vector = _as_coords(vector, space)
    coeff = np.sum(point * vector * space.weights, axis=-1)
    return vector - space.sigma * np.asarray(coeff)[..., None] * point


def normalize_to_manifold(points, space: SpaceSpec) -> np.ndarray:
    """Rescale each point so that q.q = sigma"""
    points = _as_coords(points, space)
    norms = np.sum(points * points * space.weights, axis=-1)
    scale = np.sqrt(space.sigma / norms)
    return points * np.asarray(scale)[..., None]


def manifold_drift(points, space: SpaceSpec) -> float:
    """Largest |q.q - sigma| over a stack of points"""
    points = _as_coords(points, space)
    return float(np.max(np.abs(np.sum(points * points * space.weights, axis=-1) - space.sigma)))
