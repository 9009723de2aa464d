# Unit Testing the sweep and probe experiments
# The sweeps certify every kept record dynamically, so this module takes a while

# Import requirements
import unittest
from unittest.mock import patch

import numpy as np

from controllers.experiments import (
    Catalog, SweepSpec, boundedness_probe, cluster_blowup_probe, default_delta_grid,
    large_radius_probe, min_distance_probe, random_angles, regular_polygon, sweep_equilibria
)
from controllers.solver import NoSolution, SolverOptions, solve_equilibrium
from models.equilibria import (
    EquilibriumRecord, MassVector, angular_velocity_squared, angular_velocity_squared_ambient,
    canonicalize
)
from models.errors import InfeasibleRadiusError, InvariantViolationError, ValidationError
from models.geometry import PolarConfiguration, SpaceSpec, solve_z_block

SPHERE = SpaceSpec(1, 2)
HYPERBOLOID = SpaceSpec(-1, 2)
TRIANGLE = np.array([0.0, 2 * np.pi / 3, 4 * np.pi / 3])
UNEQUAL_R_GRID = (0.2, 0.35, 0.5, 0.65, 0.8)


def record(r, alphas, masses=None, space=SPHERE):
    masses = MassVector(masses or [1.0] * len(alphas))
    return EquilibriumRecord(space, masses, PolarConfiguration(r, alphas, solve_z_block(r, space)),
                             1.0, 0.0)


def pair_a_squared(r):
    return 1.0 / (4 * r ** 3 * (1 + r * r) ** 1.5)


class TestStartingAngles(unittest.TestCase):

    def test_random_angles_are_separated(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            ordered = np.sort(random_angles(rng, 5, 0.3))
            gaps = np.diff(np.concatenate((ordered, [ordered[0] + 2 * np.pi])))
            self.assertGreaterEqual(gaps.min(), 0.3)

    def test_impossible_separation(self):
        with self.assertRaises(ValidationError):
            random_angles(np.random.default_rng(0), 10, 1.0)

    def test_regular_polygon(self):
        np.testing.assert_allclose(regular_polygon(3), TRIANGLE)


class TestSweep(unittest.TestCase):

    def test_triangle_at_every_radius(self):
        spec = SweepSpec(SPHERE, MassVector([1.0, 1.0, 1.0]), (0.3, 0.5, 0.7), starts=4, seed=1)
        catalog = sweep_equilibria(spec)
        for r in spec.r_grid:
            matches = [rec for rec in catalog if rec.cfg.r == r and
                       np.max(np.abs(np.subtract(rec.cfg.alphas, TRIANGLE))) <= 1e-8]
            self.assertEqual(len(matches), 1, r)
        for rec in catalog:
            values = [angular_velocity_squared(rec.masses, rec.cfg, rec.space, i) for i in range(3)]
            self.assertLessEqual((max(values) - min(values)) / max(values), 1e-10)
            ambient = angular_velocity_squared_ambient(rec.masses, rec.cfg, rec.space, 0)
            self.assertLessEqual(abs(ambient - values[0]), 1e-12 * values[0])

    def test_antipodal_pair(self):
        spec = SweepSpec(HYPERBOLOID, MassVector([2.0, 2.0]), (0.5, 1.0), starts=3, seed=4)
        catalog = sweep_equilibria(spec)
        self.assertEqual([rec.cfg.r for rec in catalog], [0.5, 1.0])
        for rec in catalog:
            np.testing.assert_allclose(rec.cfg.alphas, [0.0, np.pi], atol=1e-10)

    def test_polygon_seed_policy(self):
        spec = SweepSpec(SPHERE, MassVector([1.0] * 4), (0.5,), starts=1, seed_policy='polygon')
        catalog = sweep_equilibria(spec)
        self.assertEqual(len(catalog), 1)
        np.testing.assert_allclose(catalog[0].cfg.alphas, regular_polygon(4), atol=1e-12)

    def test_empty_grid(self):
        catalog = sweep_equilibria(SweepSpec(SPHERE, MassVector([1.0, 1.0]), ()))
        self.assertEqual(len(catalog), 0)
        self.assertEqual(catalog.failures, [])

    def test_deterministic_for_a_seed(self):
        spec = SweepSpec(SPHERE, MassVector([1.0, 1.0, 1.0]), (0.4,), starts=3, seed=9)
        first, second = sweep_equilibria(spec), sweep_equilibria(spec)
        self.assertEqual(first.records, second.records)
        self.assertEqual(first.failures, second.failures)

    def test_worker_pool_matches_serial(self):
        serial = SweepSpec(SPHERE, MassVector([1.0, 1.0, 1.0]), (0.4, 0.6), starts=2, seed=5)
        parallel = SweepSpec(SPHERE, MassVector([1.0, 1.0, 1.0]), (0.4, 0.6), starts=2, seed=5,
                             threads=2)
        self.assertEqual(sweep_equilibria(serial).records, sweep_equilibria(parallel).records)

    def test_unequal_masses_are_reported_as_failures(self):
        spec = SweepSpec(SPHERE, MassVector([1.0, 3.0]), (0.5,), starts=2)
        catalog = sweep_equilibria(spec)
        self.assertEqual(len(catalog), 0)
        self.assertEqual(len(catalog.failures), 2)

    def test_invalid_specs(self):
        with self.assertRaises(InfeasibleRadiusError):
            SweepSpec(SPHERE, MassVector([1.0, 1.0]), (0.5, 1.5))
        with self.assertRaises(ValidationError):
            SweepSpec(SPHERE, MassVector([1.0, 1.0]), (0.5,), seed_policy='grid')


class TestMinDistanceProbe(unittest.TestCase):

    def test_antipodal_pair(self):
        report = min_distance_probe([record(0.5, [0.0, np.pi])])
        self.assertAlmostEqual(report.global_min, 1.0, places=14)
        self.assertEqual(report.witness_id, 0)
        self.assertTrue(report.empirical)

    def test_triangle(self):
        report = min_distance_probe([record(0.5, TRIANGLE)])
        self.assertAlmostEqual(report.global_min, np.sqrt(0.75), places=14)
        self.assertEqual(list(report.table.columns), ['record_id', 'r', 'n', 'min_distance'])

    def test_empty_catalog(self):
        report = min_distance_probe(Catalog())
        self.assertEqual(report.status, 'empty-catalog')
        self.assertIsNone(report.global_min)

    def test_coincident_bodies_violate_the_bound(self):
        space = SPHERE
        bad = EquilibriumRecord(space, MassVector([1.0, 1.0]),
                                PolarConfiguration(0.5, [1.0, 1.0], solve_z_block(0.5, space)), 1.0, 0.0)
        with self.assertRaises(InvariantViolationError):
            min_distance_probe([record(0.5, TRIANGLE), bad])

    def test_equal_mass_sweep_witness(self):
        spec = SweepSpec(SPHERE, MassVector([1.0, 1.0, 1.0]), (0.1, 0.3, 0.5, 0.7, 0.9),
                         starts=2, seed=2)
        catalog = sweep_equilibria(spec)
        report = min_distance_probe(catalog)
        self.assertGreater(report.global_min, 0.0)
        self.assertEqual(report.witness.cfg.r, 0.1)
        self.assertAlmostEqual(report.global_min, 0.1 * np.sqrt(3), places=10)

    def test_random_mass_draws(self):
        rng = np.random.default_rng(6)
        root_options = SolverOptions(consistency_tolerance=np.inf)
        roots = []
        for draw in range(10):
            masses = MassVector(rng.uniform(0.5, 2.0, 3))
            start_rng = np.random.default_rng(draw)
            for r in UNEQUAL_R_GRID:
                for _ in range(2):
                    result = solve_equilibrium(masses, r, SPHERE, random_angles(start_rng, 3, 0.1),
                                               root_options)
                    if isinstance(result, EquilibriumRecord):
                        roots.append(canonicalize(result))
        self.assertGreater(len(roots), 0)
        report = min_distance_probe(roots)
        self.assertEqual(report.status, 'ok')
        self.assertTrue((report.table['min_distance'] > 0).all())
        self.assertGreater(report.global_min, 0.0)
        self.assertEqual(report.global_min, report.table['min_distance'].min())
        self.assertIs(report.witness, roots[report.witness_id])

    def test_unequal_masses_have_no_fixed_radius_equilibria(self):
        rng = np.random.default_rng(6)
        for draw in range(2):
            masses = MassVector(rng.uniform(0.5, 2.0, 3))
            catalog = sweep_equilibria(SweepSpec(SPHERE, masses, UNEQUAL_R_GRID, starts=2, seed=draw))
            self.assertEqual(len(catalog), 0)
            self.assertEqual(len(catalog.failures), 10)
            for failure in catalog.failures:
                self.assertTrue(failure['reason'].startswith('angular velocity inconsistent'))
        self.assertEqual(min_distance_probe(catalog).status, 'empty-catalog')


class TestBoundednessProbe(unittest.TestCase):

    def test_recovers_radius(self):
        report = boundedness_probe(MassVector([1.0, 1.0]), HYPERBOLOID, np.sqrt(pair_a_squared(0.5)))
        self.assertEqual(report.status, 'ok')
        self.assertAlmostEqual(report.solved_r, 0.5, delta=1e-10)
        self.assertTrue(report.decreasing)
        self.assertLess(report.tail_ratio, 1e-3)
        np.testing.assert_allclose(report.table['a_squared'], pair_a_squared(report.table['r']),
                                   rtol=1e-12)

    def test_doubling_radius_lowers_a_squared(self):
        report = boundedness_probe(MassVector([1.0, 1.0]), HYPERBOLOID, 1.0, r_search=(0.05, 5.0))
        for r in np.linspace(0.1, 2.5, 25):
            self.assertLess(pair_a_squared(2 * r), pair_a_squared(r))
        self.assertTrue(report.decreasing)

    def test_unreachable_angular_velocity(self):
        report = boundedness_probe(MassVector([1.0, 1.0]), HYPERBOLOID, 1e6, r_search=(1.0, 10.0))
        self.assertEqual(report.status, 'no-solution-in-range')
        self.assertIsNone(report.solved_r)

    def test_solver_family_matches_closed_form(self):
        masses = MassVector([1.0, 1.0, 1.0])
        polygon = boundedness_probe(masses, HYPERBOLOID, 1.0, r_search=(0.5, 2.0), grid_points=5)
        solved = boundedness_probe(masses, HYPERBOLOID, 1.0, family='solver',
                                   r_search=(0.5, 2.0), grid_points=5)
        np.testing.assert_allclose(solved.table['a_squared'], polygon.table['a_squared'], rtol=1e-10)

    def test_solver_family_unequal_pair(self):
        report = boundedness_probe(MassVector([1.0, 2.0]), HYPERBOLOID, 1.0, family='solver',
                                   r_search=(0.2, 5.0), grid_points=10)
        r = report.table['r']
        # Criterion root (0, pi); per-body A^2 are 2/D and 1/D
        expected = 1.5 / (r ** 3 * np.sqrt(2.0) * (2 + 2 * r * r) ** 1.5)
        np.testing.assert_allclose(report.table['a_squared'], expected, rtol=1e-12)
        self.assertEqual(report.status, 'ok')
        self.assertTrue(report.decreasing)
        solved = report.solved_r
        self.assertAlmostEqual(1.5 / (solved ** 3 * np.sqrt(2.0) * (2 + 2 * solved ** 2) ** 1.5),
                               1.0, places=8)

    @patch('controllers.experiments.solve_equilibrium',
           return_value=NoSolution('maximum iterations reached', 1, 1.0, (0.0, 1.0, 2.0)))
    def test_family_without_equilibria(self, mock_solve):
        report = boundedness_probe(MassVector([1.0, 1.0, 2.0]), HYPERBOLOID, 1.0, family='solver',
                                   r_search=(0.2, 5.0), grid_points=10)
        self.assertEqual(mock_solve.call_count, 10)
        self.assertEqual(report.status, 'no-equilibria-in-family')
        self.assertIsNone(report.solved_r)
        self.assertIsNone(report.tail_ratio)
        self.assertFalse(report.decreasing)

    def test_invalid_requests(self):
        with self.assertRaises(ValidationError):
            boundedness_probe(MassVector([1.0, 1.0]), SPHERE, 1.0, r_search=(0.1, 1.5))
        with self.assertRaises(ValidationError):
            boundedness_probe(MassVector([1.0, 1.0]), HYPERBOLOID, 0.0)
        with self.assertRaises(ValidationError):
            boundedness_probe(MassVector([1.0, 1.0]), HYPERBOLOID, 1.0, family='spiral')


class TestClusterProbes(unittest.TestCase):

    def test_pair_term_near_collision(self):
        report = cluster_blowup_probe(MassVector([1.0, 1.0]), 0.5, SPHERE, [1e-3])
        self.assertGreaterEqual(report.table['pair_term'].iloc[0], 9e5)

    def test_halving_ratios_approach_four(self):
        report = cluster_blowup_probe(MassVector([1.0, 1.0, 1.0]), 0.5, SPHERE, default_delta_grid())
        self.assertEqual(len(report.table), 11)
        self.assertTrue(report.converged_ratios)
        self.assertTrue(report.diverging)
        self.assertAlmostEqual(report.table['ratio'].iloc[-1], 4.0, delta=0.2)

    def test_no_cluster_is_finite(self):
        report = cluster_blowup_probe(MassVector([1.0, 1.0]), 0.5, SPHERE, [np.pi])
        self.assertTrue(np.isfinite(report.table['residual'].iloc[0]))
        self.assertLess(report.table['residual'].iloc[0], 1.0)

    def test_all_singular_grid_gives_no_verdict(self):
        report = cluster_blowup_probe(MassVector([1.0, 1.0]), 0.5, SPHERE, [1e-7, 1e-8])
        self.assertTrue(report.table.empty)
        self.assertEqual(report.status, 'too-few-terms')
        self.assertIsNone(report.diverging)
        self.assertIsNone(report.converged_ratios)

    def test_rejects_increasing_grid(self):
        with self.assertRaises(ValidationError):
            cluster_blowup_probe(MassVector([1.0, 1.0]), 0.5, SPHERE, [0.01, 0.1])

    def test_large_radius_limit(self):
        delta = 0.5
        report = large_radius_probe(delta, np.geomspace(1.0, 1e3, 7))
        self.assertEqual(report.status, 'ok')
        self.assertAlmostEqual(report.limit, np.sin(delta) / (1 - np.cos(delta)) ** 3, places=10)
        self.assertAlmostEqual(report.table['scaled_term'].iloc[-1] / report.limit, 1.0, delta=1e-4)
        self.assertEqual(list(report.table.columns), ['r', 'scaled_term'])


if __name__ == '__main__':
    unittest.main()
