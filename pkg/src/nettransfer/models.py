"""Generator families for networks with shared latent structure.

Every family describes a symmetric edge-probability matrix ``M`` with
``M[i, j] = f(x_i, x_j)`` for latent positions ``x_i``, except the block
model and the explicit-matrix family, which carry no latent space.  A
source/target pair built on the same latent draw gives two coupled
matrices over one node set, which is the input situation for all the
estimators in this package.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_prob_matrix, check_subset_indices

__all__ = [
    "SmoothGraphon",
    "SineGraphon",
    "NoisyMMSB",
    "LatentDistanceModel",
    "BlockModel",
    "CustomMatrix",
    "LatentSample",
    "ObservationSplit",
    "latent_space",
    "sample_latents",
    "build_prob_matrix",
    "sample_adjacency",
    "sample_target_split",
    "restrict",
    "balanced_assignment",
    "planted_block_model",
    "mmsb_connectivity",
    "project_to_simplex",
    "model_to_config",
    "model_from_config",
]

_MEMBERSHIP_TOL = 1e-9


# ---------------------------------------------------------------------------
# model specifications


@dataclass(frozen=True)
class SmoothGraphon:
    """Edge probability (x^gamma + y^gamma) / 2 for x, y uniform on [0, 1]."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")


@dataclass(frozen=True)
class SineGraphon:
    """Oscillating graphon (1 + sin(pi * (1 + 3 * (x + y - 1)))) / 2 on [0, 1]^2.

    ``transform`` builds companion variants of the same profile:

    - ``"none"``: the profile itself.
    - ``"flip"``: one minus the profile.
    - ``"fold"``: the profile evaluated after mapping each coordinate to
      max(x, 1 - x), which makes mirror-image positions indistinguishable.
    """

    transform: str = "none"

    def __post_init__(self):
        if self.transform not in ("none", "flip", "fold"):
            raise ValueError(f"unknown transform {self.transform!r}")


@dataclass(frozen=True)
class NoisyMMSB:
    """Mixed-membership block model with a perturbed connectivity matrix.

    Connectivity is ``clip((a - b) I + b 11^T + E, 0, 1)`` where ``E`` is
    symmetrized uniform noise on [-eps, eps] drawn from ``noise_seed``.
    Node latents are Dirichlet(alpha) points on the k-simplex; ``alpha``
    defaults to 1/k.  ``noise_seed=None`` means "not pinned": building a
    matrix then uses seed 0, while the experiment runner substitutes a
    per-trial seed so the perturbation is redrawn each trial.
    """

    a: float
    b: float
    eps: float
    k: int
    noise_seed: int | None = None
    alpha: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.b <= self.a <= 1.0:
            raise ValueError("need 0 <= b <= a <= 1")
        if self.eps < 0.0:
            raise ValueError("eps must be nonnegative")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.alpha is not None and self.alpha <= 0.0:
            raise ValueError("alpha must be positive")


@dataclass(frozen=True)
class LatentDistanceModel:
    """Edge probability exp(-scale * ||x - y||) for x, y uniform on the unit sphere."""

    scale: float
    dim: int

    def __post_init__(self):
        if self.scale <= 0.0:
            raise ValueError("scale must be positive")
        if self.dim < 1:
            raise ValueError("dim must be at least 1")


@dataclass
class BlockModel:
    """Stochastic block model with explicit connectivity and community assignment."""

    connectivity: np.ndarray
    assignment: np.ndarray

    def __post_init__(self):
        self.connectivity = check_prob_matrix(self.connectivity, "connectivity")
        z = np.asarray(self.assignment, dtype=int)
        if z.ndim != 1 or z.size == 0:
            raise ValueError("assignment must be a non-empty 1-d integer array")
        if z.min() < 0 or z.max() >= self.connectivity.shape[0]:
            raise ValueError("assignment labels must index connectivity rows")
        self.assignment = z

    @property
    def k(self):
        return self.connectivity.shape[0]


@dataclass
class CustomMatrix:
    """A fixed, explicitly supplied edge-probability matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = check_prob_matrix(self.matrix, "matrix")


ModelSpec = (
    SmoothGraphon
    | SineGraphon
    | NoisyMMSB
    | LatentDistanceModel
    | BlockModel
    | CustomMatrix
)


# ---------------------------------------------------------------------------
# latent draws and derived containers


@dataclass
class LatentSample:
    """Latent positions: ``points`` is (n, dim), ``space`` names the domain."""

    points: np.ndarray
    space: str

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("points must be a non-empty (n, dim) array")
        if self.space == "box":
            if pts.min() < -_MEMBERSHIP_TOL or pts.max() > 1.0 + _MEMBERSHIP_TOL:
                raise ValueError("box latents must lie in [0, 1]")
        elif self.space == "simplex":
            if pts.min() < -_MEMBERSHIP_TOL:
                raise ValueError("simplex latents must be nonnegative")
            if np.max(np.abs(pts.sum(axis=1) - 1.0)) > _MEMBERSHIP_TOL:
                raise ValueError("simplex latents must sum to 1")
        elif self.space == "sphere":
            norms = np.linalg.norm(pts, axis=1)
            if np.max(np.abs(norms - 1.0)) > _MEMBERSHIP_TOL:
                raise ValueError("sphere latents must have unit norm")
        else:
            raise ValueError(f"unknown latent space {self.space!r}")
        self.points = pts

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]


@dataclass
class ObservationSplit:
    """Which nodes of an n-node network have an observed companion network.

    ``indices`` is the sorted list of observed nodes; rows and columns of
    any matrix on the observed subnetwork follow this order.
    """

    n: int
    indices: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        self.indices = check_subset_indices(self.indices, self.n, "observed subset")

    @property
    def n_observed(self):
        return self.indices.size

    def membership_mask(self):
        mask = np.zeros(self.n, dtype=bool)
        mask[self.indices] = True
        return mask

    def position_of(self):
        """Map node index -> row position in the observed-subnetwork matrices."""
        return {int(node): pos for pos, node in enumerate(self.indices)}


# ---------------------------------------------------------------------------
# sampling


def latent_space(spec):
    """Domain tag of a family's latent space, or None for latent-free families."""
    if isinstance(spec, (SmoothGraphon, SineGraphon)):
        return "box"
    if isinstance(spec, NoisyMMSB):
        return "simplex"
    if isinstance(spec, LatentDistanceModel):
        return "sphere"
    return None


def sample_latents(spec, n, seed):
    """Draw n i.i.d. latent positions for a latent-based family."""
    if n < 1:
        raise ValueError("n must be at least 1")
    space = latent_space(spec)
    if space is None:
        raise ValueError(f"{type(spec).__name__} has no latent space")
    rng = np.random.default_rng(seed)
    if space == "box":
        pts = rng.random((n, 1))
    elif space == "simplex":
        alpha = spec.alpha if spec.alpha is not None else 1.0 / spec.k
        pts = rng.dirichlet(np.full(spec.k, alpha), size=n)
        # tiny-alpha gamma draws can underflow to an all-zero row
        bad = ~(pts.sum(axis=1) > 0.5)
        if np.any(bad):
            pts[bad] = 1.0 / spec.k
    else:
        pts = rng.standard_normal((n, spec.dim))
        norms = np.linalg.norm(pts, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        pts = pts / norms
    return LatentSample(points=pts, space=space)


def _sine_profile(total):
    return (1.0 + np.sin(np.pi * (1.0 + 3.0 * (total - 1.0)))) / 2.0


def mmsb_connectivity(spec):
    """Perturbed planted connectivity matrix of a NoisyMMSB spec."""
    k = spec.k
    seed = 0 if spec.noise_seed is None else spec.noise_seed
    noise = np.random.default_rng(seed).uniform(-spec.eps, spec.eps, size=(k, k))
    noise = (noise + noise.T) / 2.0
    base = (spec.a - spec.b) * np.eye(k) + spec.b * np.ones((k, k))
    return np.clip(base + noise, 0.0, 1.0)


def project_to_simplex(points, k):
    """Keep the first k simplex coordinates and renormalize each row.

    Rows that retain zero mass are replaced by the uniform point.
    """
    points = np.asarray(points, dtype=float)
    if points.shape[1] < k:
        raise ValueError(f"cannot project {points.shape[1]}-dim latents onto {k} coordinates")
    if points.shape[1] == k:
        return points
    head = points[:, :k].copy()
    total = head.sum(axis=1)
    keep = total > 0.0
    head[keep] /= total[keep, None]
    head[~keep] = 1.0 / k
    return head


def _finalize(m):
    m = (m + m.T) / 2.0
    return np.clip(m, 0.0, 1.0)


def build_prob_matrix(spec, latents=None):
    """Evaluate a family's edge-probability function on a latent draw.

    Latent-free families (BlockModel, CustomMatrix) take ``latents=None``;
    all others require a draw from a compatible space.  The diagonal is
    filled by the same formula as the off-diagonal entries.
    """
    if isinstance(spec, BlockModel):
        if latents is not None:
            raise ValueError("BlockModel takes no latents")
        z = spec.assignment
        return _finalize(spec.connectivity[np.ix_(z, z)])
    if isinstance(spec, CustomMatrix):
        if latents is not None:
            raise ValueError("CustomMatrix takes no latents")
        return spec.matrix.copy()

    if latents is None:
        raise ValueError(f"{type(spec).__name__} requires latents")
    space = latent_space(spec)
    if latents.space != space:
        raise ValueError(f"expected {space} latents, got {latents.space}")

    if isinstance(spec, SmoothGraphon):
        powered = latents.points[:, 0] ** spec.gamma
        return _finalize(np.add.outer(powered, powered) / 2.0)

    if isinstance(spec, SineGraphon):
        x = latents.points[:, 0]
        if spec.transform == "fold":
            x = np.maximum(x, 1.0 - x)
        m = _sine_profile(np.add.outer(x, x))
        if spec.transform == "flip":
            m = 1.0 - m
        return _finalize(m)

    if isinstance(spec, NoisyMMSB):
        weights = project_to_simplex(latents.points, spec.k)
        b = mmsb_connectivity(spec)
        return _finalize(weights @ b @ weights.T)

    if isinstance(spec, LatentDistanceModel):
        pts = latents.points
        if latents.dim != spec.dim:
            raise ValueError(f"expected dim {spec.dim} latents, got {latents.dim}")
        sq = np.einsum("ij,ij->i", pts, pts)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (pts @ pts.T)
        d2 = np.maximum((d2 + d2.T) / 2.0, 0.0)
        return _finalize(np.exp(-spec.scale * np.sqrt(d2)))

    raise TypeError(f"unknown model spec {type(spec).__name__}")


def sample_adjacency(prob, seed):
    """Draw a simple undirected graph: independent Bernoulli edges above the
    diagonal, mirrored below, zero diagonal."""
    prob = check_prob_matrix(prob, "edge probabilities")
    n = prob.shape[0]
    draws = np.random.default_rng(seed).random((n, n))
    upper = np.triu(draws < prob, k=1)
    return (upper | upper.T).astype(float)


def sample_target_split(n, n_observed, seed):
    """Pick the observed node subset uniformly at random without replacement."""
    if not 1 <= n_observed <= n:
        raise ValueError(f"need 1 <= n_observed <= n, got {n_observed} of {n}")
    idx = np.random.default_rng(seed).choice(n, size=n_observed, replace=False)
    return ObservationSplit(n=n, indices=np.sort(idx))


def restrict(matrix, split):
    """Submatrix on the observed nodes, in sorted-index order."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape[0] != split.n:
        raise ValueError("matrix size does not match the split")
    return matrix[np.ix_(split.indices, split.indices)]


def balanced_assignment(n, k):
    """Contiguous communities of near-equal size, remainder to the earliest ones."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    sizes = np.full(k, n // k, dtype=int)
    sizes[: n % k] += 1
    return np.repeat(np.arange(k), sizes)


def planted_block_model(n, k, diag, offdiag):
    """Balanced block model with constant within/between connectivity."""
    b = np.full((k, k), float(offdiag))
    np.fill_diagonal(b, float(diag))
    return BlockModel(connectivity=b, assignment=balanced_assignment(n, k))


# ---------------------------------------------------------------------------
# plain-text config round trip

_FAMILY_TAGS = {
    SmoothGraphon: "smooth_graphon",
    SineGraphon: "sine_graphon",
    NoisyMMSB: "noisy_mmsb",
    LatentDistanceModel: "latent_distance",
    BlockModel: "sbm",
    CustomMatrix: "custom",
}


def _format_matrix(m):
    return ";".join(",".join(f"{v:.10g}" for v in row) for row in np.asarray(m))


def _parse_matrix(text):
    rows = [r for r in (part.strip() for part in text.split(";")) if r]
    return np.array([[float(v) for v in r.split(",")] for r in rows])


def model_to_config(spec):
    """Flatten a spec into string key=value pairs for a config section."""
    items = {"family": _FAMILY_TAGS[type(spec)]}
    if isinstance(spec, SmoothGraphon):
        items["gamma"] = f"{spec.gamma:.10g}"
    elif isinstance(spec, SineGraphon):
        items["transform"] = spec.transform
    elif isinstance(spec, NoisyMMSB):
        items["a"] = f"{spec.a:.10g}"
        items["b"] = f"{spec.b:.10g}"
        items["eps"] = f"{spec.eps:.10g}"
        items["k"] = str(spec.k)
        if spec.noise_seed is not None:
            items["noise_seed"] = str(spec.noise_seed)
        if spec.alpha is not None:
            items["alpha"] = f"{spec.alpha:.10g}"
    elif isinstance(spec, LatentDistanceModel):
        items["scale"] = f"{spec.scale:.10g}"
        items["dim"] = str(spec.dim)
    elif isinstance(spec, BlockModel):
        items["b"] = _format_matrix(spec.connectivity)
        items["z"] = ",".join(str(v) for v in spec.assignment)
    elif isinstance(spec, CustomMatrix):
        items["matrix"] = _format_matrix(spec.matrix)
    else:
        raise TypeError(f"unknown model spec {type(spec).__name__}")
    return items


def model_from_config(items, n=None, default_k=None):
    """Rebuild a spec from config-section key=value strings.

    ``n`` enables the planted block-model shorthand (k, diag, offdiag);
    ``default_k`` fills a missing NoisyMMSB community count.
    """
    items = dict(items)
    family = items.pop("family", None)
    if family is None:
        raise ValueError("config section is missing a 'family' key")

    try:
        if family == "smooth_graphon":
            return SmoothGraphon(gamma=float(items["gamma"]))
        if family == "sine_graphon":
            return SineGraphon(transform=items.get("transform", "none"))
        if family == "noisy_mmsb":
            if "k" in items:
                k = int(items["k"])
            elif default_k is not None:
                k = int(default_k)
            else:
                raise ValueError("noisy_mmsb needs 'k' (or a default community count)")
            noise_seed = int(items["noise_seed"]) if "noise_seed" in items else None
            alpha = float(items["alpha"]) if "alpha" in items else None
            return NoisyMMSB(
                a=float(items["a"]),
                b=float(items["b"]),
                eps=float(items["eps"]),
                k=k,
                noise_seed=noise_seed,
                alpha=alpha,
            )
        if family == "latent_distance":
            return LatentDistanceModel(scale=float(items["scale"]), dim=int(items["dim"]))
        if family == "sbm":
            if "b" in items and "z" in items:
                return BlockModel(
                    connectivity=_parse_matrix(items["b"]),
                    assignment=np.array([int(v) for v in items["z"].split(",")]),
                )
            if n is None:
                raise ValueError("planted sbm shorthand needs the node count")
            return planted_block_model(
                n=n,
                k=int(items["k"]),
                diag=float(items["diag"]),
                offdiag=float(items["offdiag"]),
            )
        if family == "custom":
            return CustomMatrix(matrix=_parse_matrix(items["matrix"]))
    except KeyError as missing:
        raise ValueError(f"{family} config is missing key {missing}") from None

    raise ValueError(f"unknown model family {family!r}")
