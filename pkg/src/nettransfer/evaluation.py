"""Accuracy metrics, error diagnostics, and the Monte Carlo experiment runner."""
from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import clone

from . import models
from .validation import check_prob_matrix, check_symmetric

__all__ = [
    "mse",
    "ErrorDecomposition",
    "error_decomposition",
    "snr",
    "MembershipCounts",
    "membership_counts",
    "TrialStats",
    "run_experiment",
    "write_results_csv",
    "write_results_json",
]


def mse(truth, estimate, include_diagonal=True):
    """Mean squared entrywise error, averaged over all n^2 positions.

    ``include_diagonal=False`` averages over the n^2 - n off-diagonal
    positions instead.
    """
    t = np.asarray(truth, dtype=float)
    e = np.asarray(estimate, dtype=float)
    if t.shape != e.shape or t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise ValueError("truth and estimate must be square matrices of equal shape")
    diff2 = (t - e) ** 2
    if include_diagonal:
        return float(diff2.mean())
    n = t.shape[0]
    if n < 2:
        raise ValueError("need at least two nodes to drop the diagonal")
    return float((diff2.sum() - np.trace(diff2)) / (n * n - n))


@dataclass
class ErrorDecomposition:
    """Averaged upper bound on the neighborhood-average estimator's error.

    ``smoothing_avg`` charges the spread of the true matrix within each
    neighborhood pair; ``bernoulli_avg`` charges the sampling noise of the
    observed target block; ``total_bound`` is twice their sum and bounds
    the realized mean squared error of the same run.
    """

    total_bound: float
    smoothing_avg: float
    bernoulli_avg: float


def error_decomposition(truth, target_adj, neighborhoods):
    """Split the neighborhood-average error bound into its two sources.

    ``truth`` is the full n x n matrix, ``target_adj`` the observed block,
    and ``neighborhoods`` the index the estimate was built with.
    """
    q = check_prob_matrix(truth, "truth")
    split = neighborhoods.split
    if q.shape[0] != split.n:
        raise ValueError("truth size does not match the neighborhood index")
    a_q = check_symmetric(target_adj, "target adjacency")
    if a_q.shape[0] != split.n_observed:
        raise ValueError("target adjacency size does not match the observed subset")

    from .estimators import _membership_indicator

    u = _membership_indicator(neighborhoods)
    sizes = u.sum(axis=1)
    scale = np.outer(sizes, sizes)
    q_obs = q[np.ix_(split.indices, split.indices)]

    smoothing = (q - (u @ q_obs @ u.T) / scale) ** 2
    bernoulli = ((u @ (q_obs - a_q) @ u.T) / scale) ** 2
    n = q.shape[0]
    smoothing_avg = float(2.0 * smoothing.sum() / n**2)
    bernoulli_avg = float(2.0 * bernoulli.sum() / n**2)
    return ErrorDecomposition(
        total_bound=smoothing_avg + bernoulli_avg,
        smoothing_avg=smoothing_avg,
        bernoulli_avg=bernoulli_avg,
    )


def snr(connectivity):
    """Separation score (p - q) / sqrt(p (1 - q)) of a block connectivity
    matrix, with p the smallest diagonal and q the largest off-diagonal
    entry.  Negative when communities are not assortative."""
    b = check_prob_matrix(connectivity, "connectivity")
    if b.shape[0] < 2:
        raise ValueError("need at least two communities")
    p = float(np.diag(b).min())
    off = b[~np.eye(b.shape[0], dtype=bool)]
    q = float(off.max())
    denom = p * (1.0 - q)
    if denom <= 0.0:
        raise ValueError("separation score undefined: p (1 - q) must be positive")
    return (p - q) / float(np.sqrt(denom))


@dataclass
class MembershipCounts:
    """How often each observed node is used by the neighborhood estimator.

    ``counts[r]`` is the number of nodes whose neighborhood contains
    observed node ``nodes[r]``; heavily reused nodes dominate many matrix
    entries at once.
    """

    nodes: np.ndarray
    counts: np.ndarray

    @property
    def max_count(self):
        return int(self.counts.max())


def membership_counts(neighborhoods):
    split = neighborhoods.split
    pos = split.position_of()
    counts = np.zeros(split.n_observed, dtype=int)
    for nodes in neighborhoods.sets:
        for v in nodes:
            counts[pos[int(v)]] += 1
    return MembershipCounts(nodes=split.indices.copy(), counts=counts)


# ---------------------------------------------------------------------------
# experiment runner


@dataclass
class TrialStats:
    """Per-estimator summary over independent trials."""

    mean: float
    two_sigma: float
    p01: float
    p99: float
    trials: int
    base_seed: int
    mses: np.ndarray


_SLOT_LATENTS = 0
_SLOT_SOURCE_NOISE = 1
_SLOT_TARGET_NOISE = 2
_SLOT_SOURCE_ADJ = 3
_SLOT_SPLIT = 4
_SLOT_TARGET_ADJ = 5
_SLOT_ESTIMATOR = 6


def _derived_seed(base_seed, trial, slot):
    """Fixed seed mixing: adding trials never changes earlier trials."""
    return int(np.random.SeedSequence((base_seed, trial, slot)).generate_state(1)[0])


def _with_trial_noise(spec, seed):
    if isinstance(spec, models.NoisyMMSB) and spec.noise_seed is None:
        return replace(spec, noise_seed=seed)
    return spec


def _check_pair(source, target):
    source_space = models.latent_space(source)
    target_space = models.latent_space(target)
    if (source_space is None) != (target_space is None):
        raise ValueError("source and target must both be latent-based or both latent-free")
    if source_space is None:
        return
    if isinstance(source, models.NoisyMMSB) != isinstance(target, models.NoisyMMSB):
        if source_space != target_space:
            raise ValueError("source and target latent spaces are incompatible")
        return
    if isinstance(source, models.NoisyMMSB):
        if target.k > source.k:
            raise ValueError("target community count cannot exceed the source's")
        return
    if source_space != target_space:
        raise ValueError("source and target latent spaces are incompatible")
    if isinstance(source, models.LatentDistanceModel) and source.dim != target.dim:
        raise ValueError("source and target latent dimensions differ")


def _run_trial(source, target, n, n_observed, prototypes, base_seed, trial):
    src = _with_trial_noise(source, _derived_seed(base_seed, trial, _SLOT_SOURCE_NOISE))
    tgt = _with_trial_noise(target, _derived_seed(base_seed, trial, _SLOT_TARGET_NOISE))

    if models.latent_space(src) is not None:
        latents = models.sample_latents(src, n, _derived_seed(base_seed, trial, _SLOT_LATENTS))
    else:
        latents = None
    p = models.build_prob_matrix(src, latents)
    q = models.build_prob_matrix(tgt, latents)
    if p.shape[0] != n or q.shape[0] != n:
        raise ValueError("latent-free specs must describe exactly n nodes")

    a_p = models.sample_adjacency(p, _derived_seed(base_seed, trial, _SLOT_SOURCE_ADJ))
    split = models.sample_target_split(n, n_observed, _derived_seed(base_seed, trial, _SLOT_SPLIT))
    a_q = models.sample_adjacency(
        models.restrict(q, split), _derived_seed(base_seed, trial, _SLOT_TARGET_ADJ)
    )

    # one shared seed per trial: randomized estimators with the same trial
    # see coupled randomness, which pairs baselines across settings
    est_seed = _derived_seed(base_seed, trial, _SLOT_ESTIMATOR)
    row = {}
    for name, proto in prototypes.items():
        est = clone(proto)
        if "random_state" in est.get_params():
            est.set_params(random_state=est_seed)
        if getattr(est, "requires_truth", False):
            est.fit(q, split)
        else:
            est.fit(a_p, a_q, split)
        row[name] = mse(q, est.prob_matrix_)
    return row


def run_experiment(source, target, n, n_observed, estimators, trials=50, base_seed=0, n_jobs=1):
    """Repeated draws of a source/target pair, scored per estimator.

    Each trial draws shared latents (for latent-based pairs), builds both
    probability matrices, samples the source graph, the observed subset,
    and the observed target block, then fits every estimator and records
    its mean squared error against the full target matrix.  Per-trial
    seeds are derived from ``(base_seed, trial)`` alone, so results do not
    depend on scheduling and earlier trials are stable when ``trials``
    grows.  Returns ``{name: TrialStats}``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not estimators:
        raise ValueError("need at least one estimator")
    _check_pair(source, target)
    prototypes = dict(estimators)

    def job(trial):
        return _run_trial(source, target, n, n_observed, prototypes, base_seed, trial)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            rows = list(pool.map(job, range(trials)))
    else:
        rows = [job(t) for t in range(trials)]

    results = {}
    for name in prototypes:
        values = np.array([row[name] for row in rows])
        results[name] = TrialStats(
            mean=float(values.mean()),
            two_sigma=float(2.0 * values.std(ddof=1)) if trials > 1 else 0.0,
            p01=float(np.percentile(values, 1)),
            p99=float(np.percentile(values, 99)),
            trials=trials,
            base_seed=base_seed,
            mses=values,
        )
    return results


_CSV_FIELDS = ("estimator", "mean", "two_sigma", "p01", "p99", "trials")


def write_results_csv(results, path):
    """One row per estimator: mean, two-sigma band, percentile band, trials."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_FIELDS)
        for name, stats in results.items():
            writer.writerow(
                [
                    name,
                    f"{stats.mean:.6g}",
                    f"{stats.two_sigma:.6g}",
                    f"{stats.p01:.6g}",
                    f"{stats.p99:.6g}",
                    stats.trials,
                ]
            )


def write_results_json(results, path):
    """Same summary as the CSV plus the raw per-trial errors."""
    payload = {}
    for name, stats in results.items():
        payload[name] = {
            "mean": stats.mean,
            "two_sigma": stats.two_sigma,
            "p01": stats.p01,
            "p99": stats.p99,
            "trials": stats.trials,
            "base_seed": stats.base_seed,
            "mses": [float(v) for v in stats.mses],
        }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
