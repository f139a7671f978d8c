"""Graph semantics of cycle-reservoir networks.

The inter-encoder wiring is a directed graph on k nodes given by a 0/1
adjacency matrix A with A[i, j] = 1 meaning encoder i's output feeds
encoder j. Same-timestep propagation requires a DAG, so searched graphs are
repaired before use. An encoder is *valid* when it is reachable (reflexively
and transitively) from some externally-driven encoder; the system rank is
the number of valid encoders.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CyclicGraph


@dataclass
class TopologyReport:
    reachability: np.ndarray          # (k, k) uint8, reflexive transitive closure
    valid_mask: np.ndarray            # (k,) uint8
    rank: int
    eval_order: np.ndarray            # (k,) int, topological order of the repaired DAG
    removed_edges: list = field(default_factory=list)  # (src, dst) dropped by repair


def closure(adjacency: np.ndarray) -> np.ndarray:
    """Reflexive transitive closure via boolean Floyd-Warshall, O(k^3).

    R[i, j] = 1 iff j is reachable from i by a path of length >= 0 (so the
    diagonal is always 1).
    """
    a = np.asarray(adjacency, dtype=bool)
    k = a.shape[0]
    r = a | np.eye(k, dtype=bool)
    for m in range(k):
        r |= r[:, m : m + 1] & r[m : m + 1, :]
    return r.astype(np.uint8)


def rank_and_validity(adjacency: np.ndarray, driven: np.ndarray):
    """Reachability, per-encoder validity and rank for a given wiring.

    Encoder i is valid iff some driven encoder j (driven[j] == 1) satisfies
    R[j, i] == 1; rank is the number of valid encoders.
    """
    r = closure(adjacency)
    d = np.asarray(driven, dtype=np.uint8)
    valid = (d @ r > 0).astype(np.uint8)
    return r, valid, int(valid.sum())


def repair_dag(adjacency: np.ndarray):
    """Drop the minimal greedy set of edges so the graph is acyclic.

    Edges are scanned in row-major order; an edge is kept iff adding it to
    the kept set creates no directed cycle. Deterministic, and a no-op on
    DAGs. Returns (repaired adjacency, removed edge list).
    """
    a = np.asarray(adjacency, dtype=np.uint8)
    k = a.shape[0]
    kept = np.zeros((k, k), dtype=np.uint8)
    reach = np.eye(k, dtype=bool)  # closure of the kept set
    removed = []
    for i in range(k):
        for j in range(k):
            if not a[i, j] or i == j:
                continue
            if reach[j, i]:  # j already reaches i: edge i->j would close a cycle
                removed.append((i, j))
            else:
                kept[i, j] = 1
                reach |= np.outer(reach[:, i], reach[j, :])
    return kept, removed


def topo_order(adjacency: np.ndarray) -> np.ndarray:
    """Kahn's algorithm with smallest-index-first tie-breaking.

    Raises CyclicGraph if the input is not acyclic (repair must run first).
    """
    a = np.asarray(adjacency, dtype=np.uint8)
    k = a.shape[0]
    indeg = a.sum(axis=0).astype(int)
    placed = np.zeros(k, dtype=bool)
    order = []
    for _ in range(k):
        ready = [i for i in range(k) if not placed[i] and indeg[i] == 0]
        if not ready:
            raise CyclicGraph("graph contains a directed cycle")
        nxt = ready[0]
        placed[nxt] = True
        order.append(nxt)
        indeg -= a[nxt]
    return np.array(order, dtype=np.intp)


def analyze(adjacency: np.ndarray, driven: np.ndarray) -> TopologyReport:
    """Repair, close, rank and order a (possibly cyclic) searched wiring."""
    repaired, removed = repair_dag(adjacency)
    reach, valid, rank = rank_and_validity(repaired, driven)
    return TopologyReport(
        reachability=reach,
        valid_mask=valid,
        rank=rank,
        eval_order=topo_order(repaired),
        removed_edges=removed,
    ), repaired


CHAIN = "chain"
GROUPED = "grouped"


def fixed_topology(kind: str, k: int):
    """The two classical hand-crafted wirings.

    Chain: only the first encoder is driven and encoder i feeds encoder i+1
    (a deep stack). Grouped: every encoder is driven and there are no
    inter-encoder edges (parallel groups).
    """
    d = np.zeros(k, dtype=np.uint8)
    a = np.zeros((k, k), dtype=np.uint8)
    if kind == CHAIN:
        d[0] = 1
        for i in range(k - 1):
            a[i, i + 1] = 1
    elif kind == GROUPED:
        d[:] = 1
    else:
        raise ValueError(f"unknown fixed topology {kind!r}")
    return d, a
