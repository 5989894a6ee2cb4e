"""Structural distances between nodes, and neighborhoods built from them.

The distance between nodes i and j compares rows i and j of the squared
matrix while masking the two coordinates that involve i or j themselves:

    d(i, j) = sum over l not in {i, j} of (G[i, l] - G[j, l])^2,   G = M @ M.

Working on the squared matrix compares two-step connectivity profiles, so
the distance is small for nodes that play the same structural role even
when they are not directly linked.  It applies equally to edge-probability
matrices (population version) and adjacency matrices (empirical version).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import ObservationSplit
from .validation import check_bandwidth, check_square, check_symmetric

__all__ = [
    "graph_distance_matrix",
    "graph_distance_block",
    "quantile_neighborhoods",
    "NeighborhoodIndex",
    "rankings_constant",
    "RankingsReport",
    "DEFAULT_GRID",
]

DEFAULT_GRID = (1.0, 1.5, 2.0, 3.0, 5.0, 10.0)


def graph_distance_block(matrix, columns):
    """Distances d(i, j) for all i and the given column nodes j.

    Returns an (n, len(columns)) array.  Entries where i equals the column
    node are zero.  Equivalent to the full matrix restricted to ``columns``
    but cheaper when only a few columns are needed.
    """
    m = check_symmetric(matrix, "matrix")
    cols = np.asarray(columns, dtype=int)
    g = m @ m
    sq = np.einsum("ij,ij->i", g, g)
    cross = g @ g[cols].T
    d = sq[:, None] + sq[cols][None, :] - 2.0 * cross
    # drop the two masked coordinates from each squared row difference
    gij = g[:, cols]
    diag = np.diag(g)
    d -= (diag[:, None] - gij) ** 2
    d -= (gij - diag[cols][None, :]) ** 2
    np.maximum(d, 0.0, out=d)
    d[cols, np.arange(cols.size)] = 0.0
    return d


def graph_distance_matrix(matrix):
    """Full pairwise distance matrix: symmetric, nonnegative, zero diagonal."""
    m = check_square(matrix, "matrix")
    d = graph_distance_block(m, np.arange(m.shape[0]))
    d = (d + d.T) / 2.0
    np.fill_diagonal(d, 0.0)
    return d


@dataclass
class NeighborhoodIndex:
    """Per-node neighborhoods drawn from the observed subset.

    ``sets[i]`` lists the node indices closest to i within the observed
    subset (plus i itself when i is observed), selected at quantile level
    ``bandwidth``.
    """

    bandwidth: float
    split: ObservationSplit
    sets: list

    def sizes(self):
        return np.array([s.size for s in self.sets])


def _select_neighborhoods(dist_block, split, h):
    """Bottom-quantile selection per row of an (n, n_observed) distance block.

    Candidates are the observed nodes other than the row node itself, ordered
    by distance with ties broken by ascending node index; the row node is
    appended afterwards when it is observed.
    """
    n = split.n
    subset = split.indices
    n_obs = subset.size
    take = max(1, int(np.floor(h * n_obs)))
    pos_of = split.position_of()
    sets = []
    for i in range(n):
        row = dist_block[i]
        own = pos_of.get(i)
        if own is not None:
            row = row.copy()
            row[own] = np.inf
        # stable sort on an ascending-index candidate list = index tie-break
        order = np.argsort(row, kind="stable")
        limit = take if own is None else min(take, n_obs - 1)
        chosen = subset[order[:limit]]
        if own is not None:
            chosen = np.append(chosen, i)
        sets.append(chosen)
    return NeighborhoodIndex(bandwidth=h, split=split, sets=sets)


def quantile_neighborhoods(distances, split, bandwidth):
    """Neighborhoods at a quantile level from a full distance matrix."""
    d = check_square(distances, "distances")
    if d.shape[0] != split.n:
        raise ValueError("distance matrix size does not match the split")
    h = check_bandwidth(bandwidth)
    return _select_neighborhoods(d[:, split.indices], split, h)


@dataclass
class RankingsReport:
    """Outcome of checking whether target rankings track source rankings.

    ``c_hat`` is the smallest grid multiplier that works, or None when the
    check fails at every grid value; ``witness`` then names a violating
    (row, neighbor) pair.  ``required_quantile`` is the smallest quantile
    level that would contain every source-near neighbor in the target.
    """

    bandwidth: float
    c_hat: float | None
    witness: tuple | None
    grid: tuple
    required_quantile: float


def _quantile_rank(h, n):
    return max(1, min(n - 1, int(np.floor(h * (n - 1)))))


def rankings_constant(source_dist, target_dist, bandwidth, grid=DEFAULT_GRID):
    """Smallest multiplier C in ``grid`` such that, for every node, all
    bottom-quantile source neighbors stay inside the C-times-wider bottom
    quantile of the target distances.

    Quantile membership is by value at the quantile rank, so ties at the
    threshold are included; this keeps the check invariant to how equal
    distances happen to be ordered.
    """
    dp = check_square(source_dist, "source distances")
    dq = check_square(target_dist, "target distances")
    if dp.shape != dq.shape:
        raise ValueError("distance matrices must have matching shapes")
    h = check_bandwidth(bandwidth)
    grid = tuple(float(c) for c in grid)
    if not grid:
        raise ValueError("grid must be non-empty")
    if list(grid) != sorted(grid) or grid[0] < 1.0:
        raise ValueError("grid must be ascending and start at 1 or above")

    n = dp.shape[0]
    if n < 2:
        raise ValueError("need at least two nodes")
    base_rank = _quantile_rank(h, n)

    worst_rank = 0
    witness = None
    others = np.arange(n)
    for i in range(n):
        mask = others != i
        drow_p = dp[i, mask]
        drow_q = dq[i, mask]
        nodes = others[mask]
        threshold = np.partition(drow_p, base_rank - 1)[base_rank - 1]
        members = drow_q[drow_p <= threshold]
        member_nodes = nodes[drow_p <= threshold]
        # minimal quantile rank that covers d_Q(i, j): strictly-closer count + 1
        sorted_q = np.sort(drow_q)
        ranks = np.searchsorted(sorted_q, members, side="left") + 1
        top = int(np.argmax(ranks))
        if ranks[top] > worst_rank:
            worst_rank = int(ranks[top])
            witness = (i, int(member_nodes[top]))

    required_quantile = worst_rank / (n - 1)
    for c in grid:
        if _quantile_rank(min(c * h, 1.0), n) >= worst_rank:
            return RankingsReport(
                bandwidth=h,
                c_hat=c,
                witness=None,
                grid=grid,
                required_quantile=required_quantile,
            )
    return RankingsReport(
        bandwidth=h,
        c_hat=None,
        witness=witness,
        grid=grid,
        required_quantile=required_quantile,
    )
