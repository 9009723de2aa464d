# Relative-equilibrium criterion and angular-velocity balance for rotating configurations

# Import requirements
import logging
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from models.errors import UndeterminedAngularVelocityError, SingularityError, ValidationError
from models.geometry import (
    PolarConfiguration, SpaceSpec, embed_polar, sigma_inner, solve_z_block,
    validate_configuration
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi

# Pair kernel guards: u = 1 - cos(delta) and, on the sphere, 2 - r^2 u
TOL_KERNEL = 1e-12


@dataclass(frozen=True)
class MassVector:
    """Positive point masses m_1..m_n"""
    values: Tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(m) for m in self.values)
        if not values:
            raise ValidationError("at least one mass is required")
        bad = [i for i, m in enumerate(values) if not (np.isfinite(m) and m > 0)]
        if bad:
            raise ValidationError(f"masses must be finite and positive, offending indices {bad}")
        object.__setattr__(self, 'values', values)

    def __len__(self):
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class EquilibriumRecord:
    """A solved relative equilibrium with its solver diagnostics"""
    space: SpaceSpec
    masses: MassVector
    cfg: PolarConfiguration
    angular_velocity: float
    residual_norm: float
    converged: bool = True
    iterations: int = 0

    def to_json_dict(self) -> dict:
        return {
            'sigma': self.space.sigma,
            'k': self.space.k,
            'masses': list(self.masses.values),
            'r': self.cfg.r,
            'alphas': list(self.cfg.alphas),
            'z_block': list(self.cfg.z_block),
            'angular_velocity': self.angular_velocity,
            'residual_norm': self.residual_norm,
            'converged': self.converged,
            'iterations': self.iterations,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> 'EquilibriumRecord':
        expected = {'sigma', 'k', 'masses', 'r', 'alphas', 'z_block', 'angular_velocity',
                    'residual_norm', 'converged', 'iterations'}
        missing = expected - set(data)
        unknown = set(data) - expected
        if missing or unknown:
            raise ValidationError(
                f"record fields mismatch: missing {sorted(missing)}, unknown {sorted(unknown)}")
        space = SpaceSpec(int(data['sigma']), int(data['k']))
        masses = MassVector(data['masses'])
        cfg = PolarConfiguration(data['r'], data['alphas'], data['z_block'])
        if len(masses) != cfg.n:
            raise ValidationError(f"{len(masses)} masses for {cfg.n} angles")
        validate_configuration(cfg, space)
        return cls(space, masses, cfg, float(data['angular_velocity']),
                   float(data['residual_norm']), bool(data['converged']),
                   int(data['iterations']))


def _stable_u(delta):
    # 2 sin^2(delta/2) == 1 - cos(delta) without cancellation at small delta
    return 2.0 * np.sin(0.5 * np.asarray(delta, dtype=float)) ** 2


def pair_kernel(delta_alpha: float, r: float, space: SpaceSpec) -> Tuple[float, float]:
    """
    Kernel of the tangential criterion for one pair

    Args:
        delta_alpha (float): Angle difference alpha_i - alpha_j
        r (float): Common radius
        space (SpaceSpec): Target space

    Returns:
        tuple: (u, denom) with u = 1 - cos(delta_alpha) and
            denom = u^(3/2) (2 - sigma r^2 u)^(3/2)
    """
    u = float(_stable_u(delta_alpha))
    if u <= TOL_KERNEL:
        raise SingularityError(f"coincident angles (delta={delta_alpha!r})")
    radial = 2.0 - space.sigma * r * r * u
    if radial <= TOL_KERNEL:
        raise SingularityError(f"antipodal singularity (delta={delta_alpha!r}, r={r!r})")
    return u, u ** 1.5 * radial ** 1.5


def _pair_matrices(alphas: np.ndarray, r: float, sigma: int):
    """Angle differences, u and radial factor for every ordered pair, with singularity checks"""
    delta = alphas[:, None] - alphas[None, :]
    u = _stable_u(delta)
    radial = 2.0 - sigma * r * r * u
    n = alphas.size
    off = ~np.eye(n, dtype=bool)
    coincident = off & (u <= TOL_KERNEL)
    if coincident.any():
        i, j = np.argwhere(coincident)[0]
        raise SingularityError(f"bodies {i} and {j} have coincident angles", pair=(int(i), int(j)))
    antipodal = off & (radial <= TOL_KERNEL)
    if antipodal.any():
        i, j = np.argwhere(antipodal)[0]
        raise SingularityError(f"bodies {i} and {j} are antipodal on the sphere",
                               pair=(int(i), int(j)))
    # Diagonal entries are placeholders, masked out by callers
    u = np.where(off, u, 1.0)
    radial = np.where(off, radial, 1.0)
    return delta, u, radial, off


def residual_from_angles(masses: np.ndarray, alphas: np.ndarray, r: float, sigma: int) -> np.ndarray:
    """Unvalidated criterion residual, the solver's inner loop"""
    delta, u, radial, off = _pair_matrices(np.asarray(alphas, dtype=float), r, sigma)
    terms = np.where(off, masses[None, :] * np.sin(delta) / (u * radial) ** 1.5, 0.0)
    return terms.sum(axis=1)


def criterion_residual(masses: MassVector, cfg: PolarConfiguration, space: SpaceSpec) -> np.ndarray:
    """
    Tangential criterion F_i for every body

    F_i = sum_j m_j sin(a_i - a_j) / [(1 - cos(a_i - a_j))^(3/2) (2 - sigma r^2 (1 - cos(a_i - a_j)))^(3/2)]

    All F_i vanish exactly when the configuration balances in the rotation direction.
    """
    if len(masses) != cfg.n:
        raise ValidationError(f"{len(masses)} masses for {cfg.n} bodies")
    validate_configuration(cfg, space)
    return residual_from_angles(masses.as_array(), np.asarray(cfg.alphas), cfg.r, space.sigma)


def denominator_identity_check(alpha_i: float, alpha_j: float, r: float, space: SpaceSpec) -> float:
    """
    |(sigma - sigma (q_i.q_j)^2) - r^2 u (2 - sigma r^2 u)| for the embedded pair

    Zero in exact arithmetic; the left side comes from ambient coordinates.
    """
    cfg = PolarConfiguration(r, (alpha_i, alpha_j), solve_z_block(r, space))
    q = embed_polar(cfg, space)
    x = sigma_inner(q[0], q[1], space)
    ambient = space.sigma - space.sigma * x * x
    u = float(_stable_u(alpha_i - alpha_j))
    reduced = r * r * u * (2.0 - space.sigma * r * r * u)
    return abs(ambient - reduced)


def _require_nonzero_z(cfg: PolarConfiguration):
    if cfg.z_is_zero():
        raise UndeterminedAngularVelocityError(
            "angular velocity is not determined by the balance when Z = 0 (great circle)")


def _check_body_index(cfg: PolarConfiguration, body_index: int):
    if not 0 <= body_index < cfg.n:
        raise ValidationError(f"body index {body_index} out of range for {cfg.n} bodies")


def angular_velocity_squared(masses: MassVector, cfg: PolarConfiguration, space: SpaceSpec,
                             body_index: int) -> float:
    """
    A^2 balancing the trailing-block equation at one body

    Closed form A^2 = sum_j m_j / (r^3 u_ij^(1/2) (2 - sigma r^2 u_ij)^(3/2)).

    Raises:
        UndeterminedAngularVelocityError: if Z = 0
    """
    validate_configuration(cfg, space)
    _require_nonzero_z(cfg)
    _check_body_index(cfg, body_index)
    m = masses.as_array()
    _, u, radial, off = _pair_matrices(np.asarray(cfg.alphas), cfg.r, space.sigma)
    row = np.where(off[body_index], m / (u[body_index] ** 0.5 * radial[body_index] ** 1.5), 0.0)
    return float(row.sum() / cfg.r ** 3)


def angular_velocity_squared_ambient(masses: MassVector, cfg: PolarConfiguration, space: SpaceSpec,
                                     body_index: int) -> float:
    """
    A^2 from sigma A^2 r^2 = sum_j m_j (1 - sigma q_i.q_j) / (sigma - sigma (q_i.q_j)^2)^(3/2)

    Evaluated literally on embedded coordinates.
    """
    validate_configuration(cfg, space)
    _require_nonzero_z(cfg)
    _check_body_index(cfg, body_index)
    sigma = space.sigma
    q = embed_polar(cfg, space)
    total = 0.0
    for j, m_j in enumerate(masses.values):
        if j == body_index:
            continue
        x = sigma_inner(q[body_index], q[j], space)
        denom = sigma - sigma * x * x
        if denom <= 0:
            raise SingularityError(f"bodies {body_index} and {j} are singular", pair=(body_index, j))
        total += m_j * (1.0 - sigma * x) / denom ** 1.5
    return total / (sigma * cfg.r ** 2)


def angular_velocity_consistency(masses: MassVector, cfg: PolarConfiguration, space: SpaceSpec) -> float:
    """Spread of the per-body A^2 values relative to the largest one; 0 at an equilibrium"""
    if cfg.n < 2:
        raise ValidationError("consistency needs at least two bodies")
    values = np.array([angular_velocity_squared(masses, cfg, space, i) for i in range(cfg.n)])
    return float((values.max() - values.min()) / values.max())


def canonicalize(record: EquilibriumRecord) -> EquilibriumRecord:
    """
    Canonical form: angles in [0, 2 pi) sorted ascending with the first at 0

    Every body is tried as the anchor and the smallest (masses, angles)
    sequence wins, so relabeling or rotating the bodies gives the same result.
    Ties in angle are broken by mass, then by original index.
    """
    alphas = np.asarray(record.cfg.alphas, dtype=float)
    masses = record.masses.as_array()
    best = None
    for anchor in range(alphas.size):
        shifted = np.mod(alphas - alphas[anchor], TWO_PI)
        shifted[anchor] = 0.0
        shifted[shifted >= TWO_PI] = 0.0
        order = sorted(range(alphas.size), key=lambda i: (shifted[i], masses[i], i))
        key = (tuple(masses[order]), tuple(shifted[order]))
        if best is None or key < best:
            best = key
    canon_masses, canon_alphas = best
    return replace(record,
                   masses=MassVector(canon_masses),
                   cfg=record.cfg.with_alphas(canon_alphas))
