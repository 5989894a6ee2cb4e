"""Estimators for the edge-probability matrix of a partially observed network.

Input situation: a fully observed source graph on n nodes, plus a target
graph observed only on a subset of the nodes.  Source and target share
latent structure, so source geometry can stand in for the unobservable
target geometry.  Three routes are implemented:

- ``RowwiseTransfer``: neighborhood averaging.  Source distances rank the
  observed nodes per row; each target probability is the mean of the
  observed target block over a pair of bottom-quantile neighborhoods.
- ``BlockModelTransfer``: spectral clustering of both graphs, a community
  correspondence learned on the overlap, and block means of the target.
- ``FlipOracle``: a baseline that sees the whole target up to independent
  edge flips outside the observed block, then denoises by singular-value
  thresholding.  It needs the true matrix, so it is only available in
  simulation.

All estimators expose the scikit-learn ``fit`` idiom and leave their
result in ``prob_matrix_``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.cluster import KMeans

from .distance import _select_neighborhoods, graph_distance_block
from .models import ObservationSplit
from .validation import (
    check_adjacency,
    check_bandwidth,
    check_prob_matrix,
    check_subset_indices,
    check_symmetric,
)

__all__ = [
    "auto_bandwidth",
    "estimate_rowwise",
    "Clustering",
    "spectral_cluster",
    "CommunityMap",
    "community_map_exact",
    "community_map_lsq",
    "block_average",
    "estimate_sbm",
    "usvt",
    "oracle_estimate",
    "RowwiseTransfer",
    "BlockModelTransfer",
    "FlipOracle",
]


def auto_bandwidth(n_observed):
    """Default quantile level sqrt(log(m) / m) for m observed nodes."""
    if n_observed < 2:
        return 1.0
    return min(1.0, float(np.sqrt(np.log(n_observed) / n_observed)))


def _as_split(subset, n):
    if isinstance(subset, ObservationSplit):
        if subset.n != n:
            raise ValueError("split was built for a different node count")
        return subset
    return ObservationSplit(n=n, indices=check_subset_indices(subset, n))


def _membership_indicator(nbhd):
    """(n, n_observed) 0/1 matrix: row i marks the observed nodes in set i."""
    split = nbhd.split
    pos = split.position_of()
    u = np.zeros((split.n, split.n_observed))
    for i, nodes in enumerate(nbhd.sets):
        u[i, [pos[int(v)] for v in nodes]] = 1.0
    return u


def estimate_rowwise(source_adj, target_adj, subset, bandwidth="auto", fill_diagonal=True):
    """Neighborhood-average estimate of the full target probability matrix.

    For each node, the observed nodes are ranked by source distance and the
    bottom ``bandwidth``-quantile kept (ties broken by ascending node index;
    an observed node always joins its own neighborhood).  Entry (i, j) is
    then the mean of the observed target block over ``sets[i] x sets[j]``.
    The diagonal is averaged the same way but skips identical-pair terms;
    ``fill_diagonal=False`` leaves it at zero instead.

    Returns ``(prob_matrix, neighborhoods)``.
    """
    a_p = check_adjacency(source_adj, "source adjacency")
    n = a_p.shape[0]
    split = _as_split(subset, n)
    a_q = check_adjacency(target_adj, "target adjacency")
    if a_q.shape[0] != split.n_observed:
        raise ValueError("target adjacency size does not match the observed subset")
    if bandwidth == "auto":
        h = auto_bandwidth(split.n_observed)
    else:
        h = check_bandwidth(bandwidth)

    block = graph_distance_block(a_p, split.indices)
    nbhd = _select_neighborhoods(block, split, h)

    u = _membership_indicator(nbhd)
    sizes = u.sum(axis=1)
    totals = u @ a_q @ u.T
    qhat = totals / np.outer(sizes, sizes)
    if fill_diagonal:
        # a zero target diagonal makes sum over r != s equal the full sum
        pair_count = sizes * sizes - sizes
        diag = np.where(pair_count > 0, np.diag(totals) / np.maximum(pair_count, 1.0), 0.0)
    else:
        diag = 0.0
    np.fill_diagonal(qhat, diag)
    qhat = np.clip((qhat + qhat.T) / 2.0, 0.0, 1.0)
    return qhat, nbhd


# ---------------------------------------------------------------------------
# block-model route


@dataclass
class Clustering:
    """Hard node clustering: integer ``labels`` in [0, k)."""

    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=int)
        if labels.ndim != 1 or labels.size == 0:
            raise ValueError("labels must be a non-empty 1-d array")
        if labels.min() < 0 or labels.max() >= self.k:
            raise ValueError("labels must lie in [0, k)")
        self.labels = labels

    def onehot(self):
        z = np.zeros((self.labels.size, self.k))
        z[np.arange(self.labels.size), self.labels] = 1.0
        return z

    def counts(self):
        return np.bincount(self.labels, minlength=self.k)


def _repair_empty_clusters(embedding, labels, centers, k):
    """Move the point farthest from its centroid into each empty cluster."""
    labels = labels.copy()
    for cluster in range(k):
        if np.any(labels == cluster):
            continue
        residual = np.linalg.norm(embedding - centers[labels], axis=1)
        # never empty a singleton cluster while filling another
        sizes = np.bincount(labels, minlength=k)
        residual[sizes[labels] <= 1] = -1.0
        labels[int(np.argmax(residual))] = cluster
    return labels


def spectral_cluster(adjacency, k, seed):
    """Cluster nodes on the top-k eigenvector embedding of the adjacency.

    Eigenvectors are ranked by absolute eigenvalue; k-means uses 10
    restarts with k-means++ seeding and 100 iterations.  Deterministic for
    a fixed seed.
    """
    a = check_symmetric(adjacency, "adjacency")
    m = a.shape[0]
    if not 1 <= k <= m:
        raise ValueError(f"need 1 <= k <= {m}, got k={k}")
    eigvals, eigvecs = np.linalg.eigh(a)
    top = np.argsort(-np.abs(eigvals))[:k]
    embedding = eigvecs[:, top]
    km = KMeans(
        n_clusters=k,
        init="k-means++",
        n_init=10,
        max_iter=100,
        random_state=int(seed) % (2**32),
    )
    labels = km.fit_predict(embedding)
    labels = _repair_empty_clusters(embedding, labels, km.cluster_centers_, k)
    return Clustering(labels=labels, k=k)


@dataclass
class CommunityMap:
    """Correspondence from source communities to target communities.

    ``matrix`` is (k_source, k_target).  In ``"exact"`` mode rows are 0/1
    votes with at most one 1; ``conflicts`` counts overwritten disagreeing
    votes.  In ``"lsq"`` mode rows are real-valued least-squares weights.
    """

    matrix: np.ndarray
    mode: str
    conflicts: int = 0


def community_map_exact(source_clusters, target_clusters, split):
    """Vote-based map: each observed node links its source community to its
    target community; later votes (in sorted node order) overwrite earlier
    disagreeing ones."""
    pi = np.zeros((source_clusters.k, target_clusters.k))
    conflicts = 0
    for pos, node in enumerate(split.indices):
        row = source_clusters.labels[node]
        col = target_clusters.labels[pos]
        if pi[row].any() and pi[row, col] != 1.0:
            conflicts += 1
        pi[row] = 0.0
        pi[row, col] = 1.0
    return CommunityMap(matrix=pi, mode="exact", conflicts=conflicts)


def community_map_lsq(source_clusters, target_clusters, split):
    """Minimum-norm least-squares map between cluster indicator matrices.

    Source communities with no observed member get an all-zero row.
    """
    sel = source_clusters.onehot()[split.indices]
    pi = np.linalg.pinv(sel) @ target_clusters.onehot()
    return CommunityMap(matrix=pi, mode="lsq")


def block_average(adjacency, clustering):
    """Mean adjacency value per cluster pair, diagonal entries included."""
    a = check_symmetric(adjacency, "adjacency")
    if a.shape[0] != clustering.labels.size:
        raise ValueError("clustering does not match the adjacency size")
    counts = clustering.counts()
    if np.any(counts == 0):
        raise ValueError("every cluster must be non-empty")
    z = clustering.onehot()
    totals = z.T @ a @ z
    b = totals / np.outer(counts, counts)
    return (b + b.T) / 2.0


def estimate_sbm(
    source_adj,
    target_adj,
    subset,
    k_source=None,
    k_target=None,
    map_mode="exact",
    seed=0,
):
    """Block-model transfer estimate of the full target probability matrix.

    Both graphs are spectrally clustered (defaults: ceil(sqrt(size))
    clusters), communities are matched on the observed overlap, and target
    block means are pushed through the match.  Returns ``(prob_matrix,
    details)`` where details holds the clusterings, the community map, and
    the block means.
    """
    a_p = check_adjacency(source_adj, "source adjacency")
    n = a_p.shape[0]
    split = _as_split(subset, n)
    a_q = check_adjacency(target_adj, "target adjacency")
    n_obs = split.n_observed
    if a_q.shape[0] != n_obs:
        raise ValueError("target adjacency size does not match the observed subset")
    if map_mode not in ("exact", "lsq"):
        raise ValueError(f"unknown map_mode {map_mode!r}")
    k_p = int(np.ceil(np.sqrt(n))) if k_source is None else int(k_source)
    k_q = int(np.ceil(np.sqrt(n_obs))) if k_target is None else int(k_target)

    root = np.random.SeedSequence(int(seed) % (2**32))
    seed_p, seed_q = (int(s.generate_state(1)[0]) for s in root.spawn(2))
    clusters_p = spectral_cluster(a_p, k_p, seed_p)
    clusters_q = spectral_cluster(a_q, k_q, seed_q)

    if map_mode == "exact":
        cmap = community_map_exact(clusters_p, clusters_q, split)
    else:
        cmap = community_map_lsq(clusters_p, clusters_q, split)

    b_q = block_average(a_q, clusters_q)
    core = cmap.matrix @ b_q @ cmap.matrix.T
    core = (core + core.T) / 2.0
    qhat = np.clip(core[np.ix_(clusters_p.labels, clusters_p.labels)], 0.0, 1.0)
    details = {
        "source_clusters": clusters_p,
        "target_clusters": clusters_q,
        "community_map": cmap,
        "block_means": b_q,
    }
    return qhat, details


# ---------------------------------------------------------------------------
# corrupted-full-view baseline


def usvt(matrix, threshold_factor=2.02):
    """Universal singular-value thresholding on a symmetric [0, 1] matrix.

    Singular values below ``threshold_factor * sqrt(m)`` are zeroed; the
    reconstruction is symmetrized and clipped back to [0, 1].
    """
    m = check_prob_matrix(matrix, "matrix")
    if threshold_factor < 0:
        raise ValueError("threshold_factor must be nonnegative")
    size = m.shape[0]
    u, s, vt = np.linalg.svd(m)
    s = np.where(s >= threshold_factor * np.sqrt(size), s, 0.0)
    out = (u * s) @ vt
    return np.clip((out + out.T) / 2.0, 0.0, 1.0)


def oracle_estimate(prob_matrix, subset, p_flip, threshold_factor=2.02, seed=0):
    """Denoised estimate from a fully visible but corrupted target draw.

    A fresh graph is drawn from the true matrix; every edge variable with
    at least one endpoint outside the observed subset is flipped
    independently with probability ``p_flip``; the corrupted graph is then
    denoised by ``usvt``.  Larger ``p_flip`` with the same seed flips a
    superset of the edge variables, so corruption levels are monotonically
    coupled.  Returns ``(prob_matrix, corrupted_adjacency)``.
    """
    q = check_prob_matrix(prob_matrix, "probability matrix")
    n = q.shape[0]
    split = _as_split(subset, n)
    if not 0.0 <= p_flip <= 1.0:
        raise ValueError("p_flip must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    edge_draws = rng.random((n, n))
    flip_draws = rng.random((n, n))
    edges = edge_draws < q
    flips = flip_draws < p_flip
    observed = split.membership_mask()
    protected = np.outer(observed, observed)
    corrupted = np.where(~protected & flips, ~edges, edges)
    upper = np.triu(corrupted, k=1)
    a_corrupted = (upper | upper.T).astype(float)
    return usvt(a_corrupted, threshold_factor), a_corrupted


# ---------------------------------------------------------------------------
# scikit-learn style front ends


class RowwiseTransfer(BaseEstimator):
    """Neighborhood-averaging estimator with a quantile bandwidth.

    Parameters
    ----------
    bandwidth : float or "auto"
        Quantile level in (0, 1]; "auto" uses sqrt(log(m) / m) for m
        observed nodes.
    fill_diagonal : bool
        Average the diagonal from distinct neighborhood pairs (True) or
        leave it at zero (False).
    """

    requires_truth = False

    def __init__(self, bandwidth="auto", fill_diagonal=True):
        self.bandwidth = bandwidth
        self.fill_diagonal = fill_diagonal

    def fit(self, source_adj, target_adj, subset):
        qhat, nbhd = estimate_rowwise(
            source_adj,
            target_adj,
            subset,
            bandwidth=self.bandwidth,
            fill_diagonal=self.fill_diagonal,
        )
        self.prob_matrix_ = qhat
        self.neighborhoods_ = nbhd
        self.bandwidth_ = nbhd.bandwidth
        return self


class BlockModelTransfer(BaseEstimator):
    """Spectral block-model estimator with a learned community match."""

    requires_truth = False

    def __init__(self, k_source=None, k_target=None, map_mode="exact", random_state=0):
        self.k_source = k_source
        self.k_target = k_target
        self.map_mode = map_mode
        self.random_state = random_state

    def fit(self, source_adj, target_adj, subset):
        qhat, details = estimate_sbm(
            source_adj,
            target_adj,
            subset,
            k_source=self.k_source,
            k_target=self.k_target,
            map_mode=self.map_mode,
            seed=self.random_state if self.random_state is not None else 0,
        )
        self.prob_matrix_ = qhat
        self.source_clusters_ = details["source_clusters"]
        self.target_clusters_ = details["target_clusters"]
        self.community_map_ = details["community_map"]
        self.block_means_ = details["block_means"]
        return self


class FlipOracle(BaseEstimator):
    """Corrupted-full-view baseline; needs the true matrix, so simulation only."""

    requires_truth = True

    def __init__(self, p_flip=0.1, threshold_factor=2.02, random_state=0):
        self.p_flip = p_flip
        self.threshold_factor = threshold_factor
        self.random_state = random_state

    def fit(self, prob_matrix, subset):
        qhat, corrupted = oracle_estimate(
            prob_matrix,
            subset,
            p_flip=self.p_flip,
            threshold_factor=self.threshold_factor,
            seed=self.random_state if self.random_state is not None else 0,
        )
        self.prob_matrix_ = qhat
        self.corrupted_ = corrupted
        return self
