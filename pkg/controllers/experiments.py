# Experiments controller: equilibrium sweeps and the minimum-distance / boundedness probes

# Import requirements
import logging
from dataclasses import dataclass, field, replace
from multiprocessing import Pool
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import bisect

from controllers.solver import NoSolution, SolverOptions, solve_equilibrium
from controllers.verification import VerificationOptions, all_passed, verify_record
from models.equilibria import (
    EquilibriumRecord, MassVector, angular_velocity_squared, canonicalize, pair_kernel,
    residual_from_angles
)
from models.errors import InvariantViolationError, NBodyError, SingularityError, ValidationError
from models.geometry import (
    PolarConfiguration, SpaceSpec, embed_polar, pairwise_euclidean_distance, solve_z_block
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SweepSpec:
    """
    Grid of radii and multi-start seeds to search for equilibria

    seed_policy "random" draws every start uniformly with a minimum circular
    separation; "polygon" uses the regular polygon as the first start at each
    radius and random draws for the rest.
    """
    space: SpaceSpec
    masses: MassVector
    r_grid: Tuple[float, ...]
    starts: int = 8
    seed: int = 0
    seed_policy: str = 'random'
    min_separation: float = 0.1
    angular_velocity: Optional[float] = None
    dedup_tolerance: float = 1e-8
    threads: int = 1
    solver: SolverOptions = field(default_factory=SolverOptions)
    verification: VerificationOptions = field(default_factory=VerificationOptions)

    def __post_init__(self):
        object.__setattr__(self, 'r_grid', tuple(float(r) for r in self.r_grid))
        if self.seed_policy not in ('random', 'polygon'):
            raise ValidationError(f"unknown seed policy {self.seed_policy!r}")
        if self.starts < 1:
            raise ValidationError("at least one start per radius is required")
        if self.threads < 1:
            raise ValidationError("threads must be a positive integer")
        for r in self.r_grid:
            solve_z_block(r, self.space)


@dataclass
class Catalog:
    """Retained equilibria in grid order plus the failed or rejected solves"""
    records: List[EquilibriumRecord] = field(default_factory=list)
    failures: List[dict] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, index):
        return self.records[index]


@dataclass
class ProbeReport:
    """
    Result of a probe; every verdict is empirical evidence, not a proof

    table holds the plot-ready rows, the remaining fields depend on the probe.
    """
    kind: str
    table: pd.DataFrame
    status: str = 'ok'
    empirical: bool = True
    global_min: Optional[float] = None
    witness: Optional[EquilibriumRecord] = None
    witness_id: Optional[int] = None
    solved_r: Optional[float] = None
    bracket: Optional[Tuple[float, float]] = None
    decreasing: Optional[bool] = None
    tail_ratio: Optional[float] = None
    limit: Optional[float] = None
    converged_ratios: Optional[bool] = None
    diverging: Optional[bool] = None


def regular_polygon(n: int) -> np.ndarray:
    return TWO_PI * np.arange(n) / n


def random_angles(rng: np.random.Generator, n: int, min_separation: float,
                  max_tries: int = 10000) -> np.ndarray:
    """Uniform angles whose circular gaps all exceed min_separation"""
    if n * min_separation >= TWO_PI:
        raise ValidationError(f"{n} angles cannot keep a separation of {min_separation}")
    for _ in range(max_tries):
        draw = rng.uniform(0.0, TWO_PI, n)
        ordered = np.sort(draw)
        gaps = np.diff(np.concatenate((ordered, [ordered[0] + TWO_PI])))
        if gaps.min() >= min_separation:
            return draw
    raise ValidationError("could not draw separated starting angles")


def _starting_points(spec: SweepSpec) -> List[Tuple[float, int, np.ndarray]]:
    rng = np.random.default_rng(spec.seed)
    n = len(spec.masses)
    points = []
    for r in spec.r_grid:
        for start in range(spec.starts):
            if spec.seed_policy == 'polygon' and start == 0:
                alphas = regular_polygon(n)
            else:
                alphas = random_angles(rng, n, spec.min_separation)
            points.append((r, start, alphas))
    return points


def _solve_work_item(item):
    masses, r, space, alphas, options = item
    try:
        return solve_equilibrium(masses, r, space, alphas, options)
    except NBodyError as exc:
        return NoSolution(str(exc), 0, float('nan'), tuple(alphas))


def _verify_work_item(item):
    record, options = item
    try:
        return verify_record(record, options)
    except NBodyError as exc:
        logger.info("verification raised: %s", exc)
        return None


def _run_parallel(func, items, threads):
    if threads > 1 and len(items) > 1:
        with Pool(processes=min(threads, len(items))) as pool:
            return pool.map(func, items)
    return [func(item) for item in items]


def same_equilibrium(a: EquilibriumRecord, b: EquilibriumRecord, tolerance: float = 1e-8) -> bool:
    """Canonical records match when r, masses and every angle agree"""
    if a.cfg.n != b.cfg.n or not np.isclose(a.cfg.r, b.cfg.r, rtol=1e-12, atol=1e-15):
        return False
    if a.masses.values != b.masses.values:
        return False
    return bool(np.all(np.abs(np.subtract(a.cfg.alphas, b.cfg.alphas)) <= tolerance))


def sweep_equilibria(spec: SweepSpec) -> Catalog:
    """
    Multi-start search over the radius grid

    Every converged solve is canonicalized and deduplicated in grid order, then
    certified with verify_record. Failures never abort the sweep.

    Returns:
        Catalog: Verified unique records and the failures
    """
    solver_options = spec.solver
    if spec.angular_velocity is not None:
        solver_options = replace(solver_options,
                                 great_circle_angular_velocity=spec.angular_velocity)
    starts = _starting_points(spec)
    logger.info("Sweeping %d radii x %d starts", len(spec.r_grid), spec.starts)
    items = [(spec.masses, r, spec.space, alphas, solver_options) for r, _, alphas in starts]
    results = _run_parallel(_solve_work_item, items, spec.threads)

    catalog = Catalog()
    candidates = []
    for (r, start, _), result in zip(starts, results):
        if isinstance(result, NoSolution):
            catalog.failures.append({'r': r, 'start': start, 'reason': result.reason})
            continue
        canon = canonicalize(result)
        if not any(same_equilibrium(canon, kept, spec.dedup_tolerance) for kept in candidates):
            candidates.append(canon)

    verdicts = _run_parallel(_verify_work_item,
                             [(record, spec.verification) for record in candidates], spec.threads)
    for record, checks in zip(candidates, verdicts):
        if checks is not None and all_passed(checks):
            catalog.records.append(record)
        else:
            failed = [c.name for c in checks if not c.passed] if checks else ['verification error']
            logger.info("rejected record at r=%.6g: %s", record.cfg.r, ", ".join(failed))
            catalog.failures.append({'r': record.cfg.r, 'start': None,
                                     'reason': 'failed ' + ', '.join(failed)})
    logger.info("Sweep kept %d records, %d failures", len(catalog.records), len(catalog.failures))
    return catalog


def min_distance_probe(catalog: Sequence[EquilibriumRecord]) -> ProbeReport:
    """
    Smallest ambient distance between bodies over a catalog

    The global minimum is the empirical witness for a uniform lower bound.

    Raises:
        InvariantViolationError: if any record has coincident bodies
    """
    rows = []
    for record_id, record in enumerate(catalog):
        distances = pairwise_euclidean_distance(embed_polar(record.cfg, record.space))
        off = ~np.eye(record.cfg.n, dtype=bool)
        rows.append({'record_id': record_id, 'r': record.cfg.r, 'n': record.cfg.n,
                     'min_distance': float(distances[off].min())})
    table = pd.DataFrame(rows, columns=['record_id', 'r', 'n', 'min_distance'])
    if table.empty:
        return ProbeReport('min_distance', table, status='empty-catalog')
    bad = table[table['min_distance'] <= 0.0]
    if not bad.empty:
        logger.error("coincident bodies in records %s", list(bad['record_id']))
        raise InvariantViolationError(
            f"records {list(bad['record_id'])} have coincident bodies")
    witness_id = int(table['min_distance'].idxmin())
    report = ProbeReport('min_distance', table,
                         global_min=float(table['min_distance'].iloc[witness_id]),
                         witness=catalog[witness_id], witness_id=witness_id)
    logger.info("empirical minimum distance %.17g (record %d)", report.global_min, witness_id)
    return report


def _family_a_squared(masses, space, family, options):
    n = len(masses)

    def polygon(r):
        cfg = PolarConfiguration(r, regular_polygon(n), solve_z_block(r, space))
        return angular_velocity_squared(masses, cfg, space, 0)

    # Criterion roots only; A^2 is the mean over the bodies
    root_options = replace(options, consistency_tolerance=np.inf)

    def solver(r):
        result = solve_equilibrium(masses, r, space, regular_polygon(n), root_options)
        if isinstance(result, NoSolution):
            return float('nan')
        return result.angular_velocity ** 2

    if family == 'polygon':
        return polygon
    if family == 'solver':
        return solver
    raise ValidationError(f"unknown family {family!r}, expected 'polygon' or 'solver'")


def boundedness_probe(masses: MassVector, space: SpaceSpec, a_fixed: float,
                      family: str = 'polygon', r_search: Tuple[float, float] = (0.1, 10.0),
                      grid_points: int = 100, options: Optional[SolverOptions] = None) -> ProbeReport:
    """
    Scan A^2(r) for a configuration family and invert A^2(r) = a_fixed^2

    On the hyperboloid A^2(r) decreases to zero, so the radii reachable at a
    fixed angular velocity stay bounded. The first grid bracket with a sign
    change is refined by bisection to 1e-12.
    """
    if not a_fixed > 0:
        raise ValidationError(f"angular velocity must be positive, got {a_fixed}")
    lo, hi = float(r_search[0]), float(r_search[1])
    if not 0 < lo < hi:
        raise ValidationError(f"invalid radius interval {r_search}")
    if space.sigma == 1 and hi >= 1:
        raise ValidationError("on the sphere the search interval must stay below r = 1")
    a_squared = _family_a_squared(masses, space, family, options or SolverOptions())

    grid = np.linspace(lo, hi, grid_points)
    values = np.array([a_squared(r) for r in grid])
    table = pd.DataFrame({'r': grid, 'a_squared': values})
    finite = values[np.isfinite(values)]
    decreasing = bool(finite.size > 1 and np.all(np.diff(finite) < 0))
    tail_ratio = float(finite[-1] / finite[0]) if finite.size else None
    report = ProbeReport('boundedness', table, decreasing=decreasing, tail_ratio=tail_ratio)
    if finite.size == 0:
        report.status = 'no-equilibria-in-family'
        logger.info("no %s-family equilibria on [%g, %g]", family, lo, hi)
        return report

    target = a_fixed ** 2
    gap = values - target
    for i in range(grid.size - 1):
        if not (np.isfinite(gap[i]) and np.isfinite(gap[i + 1])):
            continue
        if gap[i] == 0.0:
            report.solved_r, report.bracket = float(grid[i]), (float(grid[i]), float(grid[i]))
            break
        if gap[i] * gap[i + 1] < 0:
            report.bracket = (float(grid[i]), float(grid[i + 1]))
            report.solved_r = float(bisect(lambda r: a_squared(r) - target,
                                           grid[i], grid[i + 1], xtol=1e-12))
            break
    else:
        if np.isfinite(gap[-1]) and gap[-1] == 0.0:
            report.solved_r, report.bracket = float(grid[-1]), (float(grid[-1]), float(grid[-1]))
    if report.solved_r is None:
        report.status = 'no-solution-in-range'
        logger.info("A^2 = %.6g is not reached on [%g, %g]", target, lo, hi)
    return report


def default_delta_grid(start: float = 0.1, halvings: int = 10) -> np.ndarray:
    return start * 0.5 ** np.arange(halvings + 1)


def cluster_blowup_probe(masses: MassVector, r: float, space: SpaceSpec,
                         delta_grid: Sequence[float], far_angle: float = 4.0 * np.pi / 3.0) -> ProbeReport:
    """
    Residual of body 1 while body 2 approaches it at angle delta

    A third body, if present, sits at far_angle. The pair term grows like
    delta^-2, so near-coincident configurations cannot balance.
    """
    deltas = np.asarray(delta_grid, dtype=float)
    if deltas.size == 0 or np.any(deltas <= 0) or np.any(np.diff(deltas) >= 0):
        raise ValidationError("delta grid must be positive and strictly decreasing")
    if len(masses) not in (2, 3):
        raise ValidationError("the cluster probe uses two or three bodies")
    solve_z_block(r, space)
    m = masses.as_array()
    rows = []
    for delta in deltas:
        alphas = [0.0, delta] + ([far_angle] if m.size == 3 else [])
        try:
            _, denom = pair_kernel(-delta, r, space)
            residual = residual_from_angles(m, np.asarray(alphas), r, space.sigma)
        except SingularityError as exc:
            logger.info("stopping cluster probe at delta=%g: %s", delta, exc)
            break
        rows.append({'delta': delta, 'pair_term': abs(m[1] * np.sin(delta) / denom),
                     'residual': abs(float(residual[0]))})
    table = pd.DataFrame(rows, columns=['delta', 'pair_term', 'residual'])
    table['ratio'] = table['residual'] / table['residual'].shift(1)

    report = ProbeReport('cluster_blowup', table)
    if len(table) < 2:
        report.status = 'too-few-terms'
        return report
    ratios = table['ratio'].dropna()
    halving = np.allclose(deltas[1:len(table)] / deltas[:len(table) - 1], 0.5)
    if len(ratios) >= 3 and halving:
        report.converged_ratios = bool(np.all(np.abs(ratios.iloc[-3:] / 4.0 - 1.0) <= 0.05))
    report.diverging = bool(np.all(np.diff(table['residual'].to_numpy()) > 0))
    return report


def large_radius_probe(delta: float, r_grid: Sequence[float]) -> ProbeReport:
    """
    Rescaled pair term r^3 |f(delta)| on the hyperboloid as r grows

    Its limit sin(delta) / u^3 is nonzero, so clusters cannot escape to
    infinity while balancing either.
    """
    space = SpaceSpec(-1, 2)
    rows = []
    for r in r_grid:
        _, denom = pair_kernel(delta, r, space)
        rows.append({'r': float(r), 'scaled_term': r ** 3 * abs(np.sin(delta)) / denom})
    table = pd.DataFrame(rows, columns=['r', 'scaled_term'])
    u = 1.0 - np.cos(delta)
    report = ProbeReport('large_radius', table, limit=float(abs(np.sin(delta)) / u ** 3))
    report.status = 'ok' if table.empty or table['scaled_term'].min() > 0 else 'vanishing'
    return report
