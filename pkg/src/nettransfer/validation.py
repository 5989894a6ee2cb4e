"""Input validation helpers shared across the package."""
from __future__ import annotations

import numpy as np

__all__ = [
    "as_float_matrix",
    "check_prob_matrix",
    "check_adjacency",
    "check_square",
    "check_symmetric",
    "check_subset_indices",
    "check_bandwidth",
]

_SYM_ATOL = 1e-8


def as_float_matrix(m, name="matrix"):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def check_square(m, name="matrix"):
    m = as_float_matrix(m, name)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def check_symmetric(m, name="matrix", atol=_SYM_ATOL):
    m = check_square(m, name)
    if not np.allclose(m, m.T, rtol=0.0, atol=atol):
        raise ValueError(f"{name} must be symmetric")
    return m


def check_prob_matrix(m, name="probability matrix"):
    """Validate a square symmetric matrix with entries in [0, 1]."""
    m = check_symmetric(m, name)
    if m.size and (m.min() < 0.0 or m.max() > 1.0):
        raise ValueError(f"{name} entries must lie in [0, 1]")
    return m


def check_adjacency(m, name="adjacency matrix"):
    """Validate a square symmetric 0/1 matrix with a zero diagonal."""
    m = check_symmetric(m, name)
    if not np.all((m == 0.0) | (m == 1.0)):
        raise ValueError(f"{name} entries must be 0 or 1")
    if np.any(np.diag(m) != 0.0):
        raise ValueError(f"{name} must have a zero diagonal")
    return m


def check_subset_indices(indices, n, name="subset"):
    """Validate node indices: integers in [0, n), no duplicates.  Returns them sorted."""
    idx = np.asarray(indices)
    if idx.ndim != 1 or idx.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d index array")
    if not np.issubdtype(idx.dtype, np.integer):
        if np.any(idx != np.floor(idx)):
            raise ValueError(f"{name} indices must be integers")
        idx = idx.astype(int)
    idx = np.sort(idx.astype(int))
    if idx[0] < 0 or idx[-1] >= n:
        raise ValueError(f"{name} indices must lie in [0, {n})")
    if np.any(np.diff(idx) == 0):
        raise ValueError(f"{name} indices must be distinct")
    return idx


def check_bandwidth(h):
    h = float(h)
    if not 0.0 < h <= 1.0:
        raise ValueError(f"bandwidth must lie in (0, 1], got {h}")
    return h
