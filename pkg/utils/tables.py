# Plot-ready tables for trajectories

import numpy as np
import pandas as pd

from models.geometry import pairwise_euclidean_distance


def trajectory_columns(n: int, ambient_dim: int) -> list:
    """
    Column headers: t, q1_x1..q1_x{k+1}, ..., then d{i}_{j} for every pair i < j
    """
    columns = ['t']
    for i in range(1, n + 1):
        columns.extend(f'q{i}_x{c}' for c in range(1, ambient_dim + 1))
    columns.extend(f'd{i}_{j}' for i in range(1, n + 1) for j in range(i + 1, n + 1))
    return columns


def series_to_frame(series) -> pd.DataFrame:
    """
    One row per sampled state: time, flattened positions and pairwise distances

    Args:
        series (list): AmbientState samples from simulate

    Returns:
        pandas.DataFrame: Trajectory table
    """
    if not series:
        return pd.DataFrame(columns=['t'])
    n, ambient_dim = series[0].positions.shape
    upper = np.triu_indices(n, 1)
    rows = []
    for state in series:
        distances = pairwise_euclidean_distance(state.positions)[upper]
        rows.append(np.concatenate(([state.time], state.positions.ravel(), distances)))
    return pd.DataFrame(rows, columns=trajectory_columns(n, ambient_dim))
