from controllers.data_controller import load_catalog, persist_catalog, write_table_csv
from controllers.experiments import (
    boundedness_probe, cluster_blowup_probe, large_radius_probe, min_distance_probe,
    sweep_equilibria
)
from controllers.simulation import simulate, step
from controllers.solver import solve_equilibrium
from controllers.verification import verify_record

__all__ = [
    'load_catalog',
    'persist_catalog',
    'write_table_csv',
    'boundedness_probe',
    'cluster_blowup_probe',
    'large_radius_probe',
    'min_distance_probe',
    'sweep_equilibria',
    'simulate',
    'step',
    'solve_equilibrium',
    'verify_record'
]
