"""Readers for real-world graph data: edge lists and timestamped contact logs.

Edge lists are whitespace-separated ``u v`` pairs, one per line; ``#``
starts a comment.  Temporal logs add a numeric timestamp: ``u v t``.
Duplicate edges collapse to one, self-loops are dropped.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LabeledGraph",
    "TemporalLog",
    "load_edge_list",
    "load_temporal_log",
    "bin_temporal",
    "intersect_nodes",
]


@dataclass
class LabeledGraph:
    """Simple undirected graph with string node labels.

    ``adjacency`` row/column order follows ``labels``.
    """

    labels: list
    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be square")
        if a.shape[0] != len(self.labels):
            raise ValueError("label count must match the adjacency size")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be distinct")
        self.adjacency = a

    @property
    def n(self):
        return len(self.labels)


@dataclass
class TemporalLog:
    """Timestamped contact events as (u, v, t) triples, self-loops removed."""

    triples: list

    def node_labels(self):
        """All labels appearing in any triple, sorted."""
        seen = set()
        for u, v, _ in self.triples:
            seen.add(u)
            seen.add(v)
        return sorted(seen)

    def timestamps(self):
        return np.array([t for _, _, t in self.triples])


def _strip_comment(line):
    return line.split("#", 1)[0].strip()


def load_edge_list(path):
    """Parse an edge-list file into a labeled adjacency matrix.

    Labels are numbered by first appearance in the file.  Malformed lines
    raise ValueError naming the offending line.
    """
    labels = []
    index = {}
    edges = set()

    def node_id(label):
        if label not in index:
            index[label] = len(labels)
            labels.append(label)
        return index[label]

    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = _strip_comment(raw)
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v', got {raw.strip()!r}")
            iu, iv = node_id(parts[0]), node_id(parts[1])
            if iu == iv:
                continue
            edges.add((min(iu, iv), max(iu, iv)))

    adjacency = np.zeros((len(labels), len(labels)))
    for iu, iv in edges:
        adjacency[iu, iv] = 1.0
        adjacency[iv, iu] = 1.0
    return LabeledGraph(labels=labels, adjacency=adjacency)


def load_temporal_log(path):
    """Parse a ``u v t`` contact log; timestamps must be finite and nonnegative."""
    triples = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = _strip_comment(raw)
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'u v t', got {raw.strip()!r}")
            try:
                t = float(parts[2])
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: timestamp {parts[2]!r} is not numeric"
                ) from None
            if not np.isfinite(t) or t < 0.0:
                raise ValueError(f"{path}:{lineno}: timestamp must be finite and nonnegative")
            if parts[0] == parts[1]:
                continue
            triples.append((parts[0], parts[1], t))
    return TemporalLog(triples=triples)


def bin_temporal(log, bins=10):
    """Split a contact log into consecutive time windows of near-equal volume.

    Window edges sit at timestamp percentiles, so each window carries about
    the same number of events; ties always land in the same window.  Every
    window's graph is over the full node set of the log, in sorted label
    order, so the outputs are directly comparable (nodes inactive in a
    window appear as zero rows).
    """
    if bins < 1:
        raise ValueError("bins must be at least 1")
    if not log.triples:
        raise ValueError("cannot bin an empty log")
    labels = log.node_labels()
    index = {lab: i for i, lab in enumerate(labels)}
    times = np.sort(log.timestamps())
    count = times.size
    # edge k is the first value past the bottom k/bins fraction of events;
    # an event belongs to the last window whose edge does not exceed it
    cut_positions = [int(np.ceil(k * count / bins)) for k in range(1, bins)]
    edges = np.array([times[p] if p < count else np.inf for p in cut_positions])

    graphs = []
    edge_sets = [set() for _ in range(bins)]
    for u, v, t in log.triples:
        window = int(np.searchsorted(edges, t, side="right"))
        iu, iv = index[u], index[v]
        edge_sets[window].add((min(iu, iv), max(iu, iv)))
    for current in edge_sets:
        adjacency = np.zeros((len(labels), len(labels)))
        for iu, iv in current:
            adjacency[iu, iv] = 1.0
            adjacency[iv, iu] = 1.0
        graphs.append(LabeledGraph(labels=list(labels), adjacency=adjacency))
    return graphs


def intersect_nodes(graphs):
    """Restrict several labeled graphs to their common nodes, sorted by label.

    Raises ValueError when no label appears in every graph.
    """
    if not graphs:
        raise ValueError("need at least one graph")
    common = set(graphs[0].labels)
    for g in graphs[1:]:
        common &= set(g.labels)
    if not common:
        raise ValueError("graphs share no node labels")
    ordered = sorted(common)
    out = []
    for g in graphs:
        lookup = {lab: i for i, lab in enumerate(g.labels)}
        keep = np.array([lookup[lab] for lab in ordered], dtype=int)
        out.append(
            LabeledGraph(labels=list(ordered), adjacency=g.adjacency[np.ix_(keep, keep)])
        )
    return out
