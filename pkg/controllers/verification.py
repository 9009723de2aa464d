# Certification of relative equilibria against the criterion, the balance and the dynamics

# Import requirements
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from controllers.simulation import (
    IntegrationConfig, initial_state_from_equilibrium, rigidity_drift, simulate
)
from models.equilibria import EquilibriumRecord, angular_velocity_consistency, criterion_residual
from models.errors import NumericalFailureError, SingularityError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VerificationOptions:
    residual_threshold: float = 1e-10
    consistency_threshold: float = 1e-10
    rigidity_threshold: float = 1e-6
    steps_per_period: int = 1000


@dataclass(frozen=True)
class CheckResult:
    """One certification check; value is None when the check does not apply"""
    name: str
    value: Optional[float]
    threshold: float
    passed: bool


def rigidity_over_period(record: EquilibriumRecord, steps_per_period: int = 1000) -> float:
    """Integrate one period 2 pi / A from the rotating initial state and return the distance drift"""
    omega = record.angular_velocity
    period = 2.0 * np.pi / omega if omega > 0 else 1.0
    cfg = IntegrationConfig(step_size=period / steps_per_period, t_end=period,
                            output_stride=max(1, steps_per_period // 100))
    state0 = initial_state_from_equilibrium(record.cfg, omega, record.space)
    series = simulate(state0, record.masses, record.space, cfg)
    return rigidity_drift(series, state0)


def verify_record(record: EquilibriumRecord,
                  options: Optional[VerificationOptions] = None) -> List[CheckResult]:
    """
    Re-check a record: criterion residual, per-body A^2 agreement and rigid motion

    Returns:
        list: CheckResult for the residual, consistency and rigidity checks
    """
    options = options or VerificationOptions()
    checks = []

    residual = float(np.max(np.abs(criterion_residual(record.masses, record.cfg, record.space))))
    checks.append(CheckResult('criterion_residual', residual, options.residual_threshold,
                              residual <= options.residual_threshold))

    if record.cfg.z_is_zero():
        # Great circle: A is free, only the dynamics can certify it
        checks.append(CheckResult('angular_velocity_consistency', None,
                                  options.consistency_threshold, True))
    else:
        spread = angular_velocity_consistency(record.masses, record.cfg, record.space)
        checks.append(CheckResult('angular_velocity_consistency', spread,
                                  options.consistency_threshold,
                                  spread <= options.consistency_threshold))

    try:
        drift = rigidity_over_period(record, options.steps_per_period)
    except (SingularityError, NumericalFailureError) as exc:
        logger.warning("rigidity integration failed: %s", exc)
        drift = float('inf')
    checks.append(CheckResult('dynamic_rigidity', drift, options.rigidity_threshold,
                              drift <= options.rigidity_threshold))
    return checks


def all_passed(checks: List[CheckResult]) -> bool:
    return all(check.passed for check in checks)
