"""
Utilities: run configuration and plot-ready tables
"""
from utils.config import RunConfig, parse_config
from utils.tables import series_to_frame, trajectory_columns

__all__ = [
    'RunConfig',
    'parse_config',
    'series_to_frame',
    'trajectory_columns'
]
