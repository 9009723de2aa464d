"""
Equilibrium commands: find-eq (solve or sweep) and verify
"""
import logging
from dataclasses import replace

from controllers.data_controller import load_catalog, persist_catalog
from controllers.experiments import sweep_equilibria
from controllers.solver import NoSolution, solve_equilibrium
from controllers.verification import VerificationOptions, all_passed, verify_record
from models.equilibria import canonicalize
from models.errors import NonConvergenceError, ValidationError

logger = logging.getLogger(__name__)


def format_record(record) -> str:
    """One-line summary: r, angles, A and residual"""
    angles = ", ".join(f"{a:.12g}" for a in record.cfg.alphas)
    return (f"r={record.cfg.r:.12g} angles=[{angles}] "
            f"A={record.angular_velocity:.12g} residual={record.residual_norm:.3e}")


def run_find_eq(config, out_path, seed=None) -> int:
    """
    Solve from the configured angles, or sweep when a sweep section is present

    Returns:
        int: Exit code
    """
    if config.sweep is not None:
        spec = config.sweep if seed is None else replace(config.sweep, seed=seed)
        catalog = sweep_equilibria(spec)
        records = catalog.records
        for failure in catalog.failures:
            logger.info("no equilibrium at r=%.6g (start %s): %s",
                        failure['r'], failure['start'], failure['reason'])
    else:
        if config.cfg is None:
            raise ValidationError("find-eq needs r and alphas, or a sweep section")
        result = solve_equilibrium(config.masses, config.cfg.r, config.space,
                                   config.cfg.alphas, config.solver)
        if isinstance(result, NoSolution):
            raise NonConvergenceError(
                f"no equilibrium found after {result.iterations} iterations: {result.reason} "
                f"(residual {result.residual_norm:.3e})")
        records = [canonicalize(result)]

    persist_catalog(records, out_path)
    for record in records:
        print(format_record(record))
    return 0


def run_verify(catalog_path, index, options=None) -> int:
    """
    Re-check one catalog record and print every check

    Returns:
        int: 0 when every check passes, 1 otherwise
    """
    records = load_catalog(catalog_path)
    if not 0 <= index < len(records):
        raise ValidationError(f"index {index} out of range for {len(records)} records")
    checks = verify_record(records[index], options or VerificationOptions())
    for check in checks:
        value = "n/a" if check.value is None else f"{check.value:.3e}"
        status = "PASS" if check.passed else "FAIL"
        print(f"{check.name}: {value} (threshold {check.threshold:.1e}) {status}")
    return 0 if all_passed(checks) else 1
