# Unit Testing record certification

# Import requirements
import unittest
from dataclasses import replace

import numpy as np

from controllers.verification import (
    VerificationOptions, all_passed, rigidity_over_period, verify_record
)
from models.equilibria import EquilibriumRecord, MassVector
from models.geometry import PolarConfiguration, SpaceSpec, solve_z_block

SPHERE = SpaceSpec(1, 2)


def pair_record(r=0.5):
    omega = np.sqrt(1.0 / (4 * r ** 3 * (1 - r * r) ** 1.5))
    cfg = PolarConfiguration(r, [0.0, np.pi], solve_z_block(r, SPHERE))
    return EquilibriumRecord(SPHERE, MassVector([1.0, 1.0]), cfg, omega, 0.0)


class TestVerifyRecord(unittest.TestCase):

    def test_equilibrium_passes(self):
        checks = verify_record(pair_record())
        self.assertEqual([c.name for c in checks],
                         ['criterion_residual', 'angular_velocity_consistency', 'dynamic_rigidity'])
        self.assertTrue(all_passed(checks))

    def test_perturbed_angle_fails(self):
        record = pair_record()
        perturbed = replace(record, cfg=record.cfg.with_alphas([0.0, np.pi + 0.01]))
        checks = {c.name: c for c in verify_record(perturbed)}
        self.assertFalse(checks['criterion_residual'].passed)
        self.assertGreater(checks['criterion_residual'].value, 1e-10)
        self.assertFalse(all_passed(checks.values()))

    def test_wrong_angular_velocity_breaks_rigidity(self):
        record = replace(pair_record(), angular_velocity=1.0)
        checks = {c.name: c for c in verify_record(record)}
        self.assertTrue(checks['criterion_residual'].passed)
        self.assertFalse(checks['dynamic_rigidity'].passed)

    def test_great_circle_skips_consistency(self):
        cfg = PolarConfiguration(1.0, 2 * np.pi * np.arange(3) / 3, (0.0,))
        record = EquilibriumRecord(SPHERE, MassVector([1.0, 1.0, 1.0]), cfg, 0.9, 0.0)
        checks = {c.name: c for c in verify_record(record, VerificationOptions(steps_per_period=500))}
        self.assertIsNone(checks['angular_velocity_consistency'].value)
        self.assertTrue(checks['angular_velocity_consistency'].passed)

    def test_rigidity_over_period(self):
        self.assertLessEqual(rigidity_over_period(pair_record(0.3)), 1e-6)


if __name__ == '__main__':
    unittest.main()
