"""Dense-matrix and index-list CSV files used by the command line tools."""
from __future__ import annotations

import warnings

import numpy as np

__all__ = ["save_matrix", "load_matrix", "save_indices", "load_indices"]


def save_matrix(path, matrix):
    """One matrix row per line, comma separated, 6 significant digits."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2:
        raise ValueError("matrix must be 2-dimensional")
    np.savetxt(path, m, fmt="%.6g", delimiter=",")


def load_matrix(path):
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # empty input warns before we raise below
            m = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise ValueError(f"{path}: not a numeric CSV matrix ({exc})") from None
    if m.size == 0:
        raise ValueError(f"{path}: empty matrix")
    return m


def save_indices(path, indices):
    """One integer node index per line."""
    np.savetxt(path, np.asarray(indices, dtype=int), fmt="%d")


def load_indices(path):
    try:
        idx = np.loadtxt(path, dtype=int, ndmin=1)
    except ValueError as exc:
        raise ValueError(f"{path}: not an index list ({exc})") from None
    return idx
