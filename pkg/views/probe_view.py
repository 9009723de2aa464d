"""
Probe command: minimum-distance, boundedness, cluster blow-up and large-radius probes
"""
import logging
from dataclasses import replace

import numpy as np

from controllers.data_controller import load_catalog, write_table_csv
from controllers.experiments import (
    boundedness_probe, cluster_blowup_probe, default_delta_grid, large_radius_probe,
    min_distance_probe, sweep_equilibria
)
from models.errors import ValidationError
from views.equilibria_view import format_record

logger = logging.getLogger(__name__)

# CSV columns written for each probe kind
PROBE_COLUMNS = {
    'min_distance': ['record_id', 'r', 'n', 'min_distance'],
    'boundedness': ['r', 'a_squared'],
    'cluster_blowup': ['delta', 'pair_term'],
    'large_radius': ['r', 'scaled_term'],
}


def _min_distance(config, settings, seed):
    if settings.catalog is not None:
        catalog = load_catalog(settings.catalog)
    elif config.sweep is not None:
        spec = config.sweep if seed is None else replace(config.sweep, seed=seed)
        catalog = sweep_equilibria(spec).records
    else:
        raise ValidationError("min_distance probe needs probe.catalog or a sweep section")
    report = min_distance_probe(catalog)
    if report.global_min is None:
        print("empirical minimum distance: none (empty catalog)")
    else:
        print(f"empirical minimum distance: {report.global_min:.17g} "
              f"(record {report.witness_id}: {format_record(report.witness)})")
    return report


def _boundedness(config, settings, seed):
    if settings.a_fixed is None:
        raise ValidationError("boundedness probe needs probe.a_fixed")
    report = boundedness_probe(config.masses, config.space, settings.a_fixed,
                               family=settings.family, r_search=settings.r_search,
                               grid_points=settings.grid_points, options=config.solver)
    solved = "none" if report.solved_r is None else f"{report.solved_r:.17g}"
    tail = "n/a" if report.tail_ratio is None else f"{report.tail_ratio:.3e}"
    print(f"status={report.status} decreasing={report.decreasing} "
          f"tail_ratio={tail} solved_r={solved}")
    return report


def _cluster_blowup(config, settings, seed):
    r = settings.r if settings.r is not None else (config.cfg.r if config.cfg else None)
    if r is None:
        raise ValidationError("cluster_blowup probe needs probe.r")
    deltas = settings.delta_grid if settings.delta_grid is not None else default_delta_grid()
    kwargs = {} if settings.far_angle is None else {'far_angle': settings.far_angle}
    report = cluster_blowup_probe(config.masses, r, config.space, deltas, **kwargs)
    last = report.table['ratio'].dropna()
    ratio = f"{last.iloc[-1]:.6f}" if len(last) else "n/a"
    print(f"status={report.status} diverging={report.diverging} last_ratio={ratio} "
          f"ratios_within_5pct_of_4={report.converged_ratios}")
    return report


def _large_radius(config, settings, seed):
    if settings.delta is None:
        raise ValidationError("large_radius probe needs probe.delta")
    r_grid = settings.r_grid if settings.r_grid is not None else np.geomspace(1.0, 1e3, 31)
    report = large_radius_probe(settings.delta, r_grid)
    last = "n/a" if report.table.empty else f"{report.table['scaled_term'].iloc[-1]:.17g}"
    print(f"status={report.status} limit={report.limit:.17g} last={last}")
    return report


PROBES = {
    'min_distance': _min_distance,
    'boundedness': _boundedness,
    'cluster_blowup': _cluster_blowup,
    'large_radius': _large_radius,
}


def run_probe(config, out_path, seed=None) -> int:
    """Dispatch on probe.kind and write the probe table"""
    if config.probe is None:
        raise ValidationError("probe needs a probe section")
    report = PROBES[config.probe.kind](config, config.probe, seed)
    write_table_csv(report.table[PROBE_COLUMNS[report.kind]], out_path)
    logger.info("%s probe finished with status %s (empirical)", report.kind, report.status)
    return 0
