"""Exact nearest-neighbor queries, the k-NN rule and Euclidean MSTs.

Everything here is brute force and fully deterministic: distance ties are
broken by the smaller stored index, and the MST prefers the lexicographically
smaller (u, v) pair among equal-weight edges, which makes the tree unique.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class MstEdge(NamedTuple):
    u: int
    v: int
    weight: float


@dataclass(frozen=True, eq=False)
class NeighborIndex:
    """Immutable point set with labels, queried by Euclidean distance.

    ``minority_label`` breaks k-NN vote ties; when omitted it defaults to the
    rarer label in the index (ties: lexicographically smaller).
    """

    points: np.ndarray
    labels: np.ndarray
    minority_label: str | None = None

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        labs = np.asarray([str(v) for v in self.labels], dtype=object)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("index requires a non-empty 2-D point matrix")
        if len(labs) != pts.shape[0]:
            raise ValueError("label count does not match point count")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", labs)
        if self.minority_label is None:
            values, counts = np.unique(labs.astype(str), return_counts=True)
            order = np.lexsort((values, counts))
            object.__setattr__(self, "minority_label", str(values[order[0]]))
        pts.setflags(write=False)
        labs.setflags(write=False)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def distances_to(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=np.float64)
        diff = self.points - q
        return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def _resolve_query(index: NeighborIndex, q):
    """Return (distances, excluded stored index or None) for an index or point query."""
    if isinstance(q, (int, np.integer)):
        return index.distances_to(index.points[int(q)]), int(q)
    return index.distances_to(q), None


def knn_query(index: NeighborIndex, q, k: int, exclude_self: bool = False):
    """k nearest stored points, ascending by (distance, index).

    ``q`` is either a point or the integer index of a stored point. With
    ``exclude_self`` an integer query skips its own row; a point query skips
    at most one zero-distance candidate (the lowest-index one).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    dist, self_idx = _resolve_query(index, q)
    order = np.lexsort((np.arange(index.n), dist))
    if exclude_self:
        if self_idx is not None:
            order = order[order != self_idx]
        elif dist[order[0]] == 0.0:
            order = order[1:]
    if k > len(order):
        raise ValueError(f"k={k} exceeds {len(order)} available candidates")
    top = order[:k]
    return [(int(i), float(dist[i])) for i in top]


def knn_classify(index: NeighborIndex, q, k: int) -> str:
    """Majority label of the k nearest neighbors, excluding the query itself
    when it is a member of the index; vote ties go to the minority label."""
    hits = knn_query(index, q, k, exclude_self=True)
    labels = index.labels.astype(str)
    votes: dict[str, int] = {}
    for i, _ in hits:
        votes[labels[i]] = votes.get(labels[i], 0) + 1
    best = max(votes.values())
    winners = sorted(v for v, c in votes.items() if c == best)
    if len(winners) > 1 and index.minority_label in winners:
        return str(index.minority_label)
    return str(winners[0])


def build_mst(index: NeighborIndex) -> list[MstEdge]:
    """Euclidean minimum spanning tree via Prim's algorithm.

    Candidate edges are compared by (weight, u, v) with u < v, a strict total
    order, so the returned tree is the unique MST under that order (identical
    to Kruskal's with the same comparison). Edges come back sorted by (u, v).
    """
    n = index.n
    if n < 2:
        raise ValueError("MST requires at least 2 points")
    pts = index.points
    visited = np.zeros(n, dtype=bool)
    best_w = np.full(n, np.inf)
    best_a = np.full(n, n, dtype=np.intp)  # lexicographic pair (a, b), a < b
    best_b = np.full(n, n, dtype=np.intp)
    tree_end = np.zeros(n, dtype=np.intp)  # tree endpoint of the best edge

    def relax(t: int):
        unv = np.flatnonzero(~visited)
        diff = pts[unv] - pts[t]
        d = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        na = np.minimum(unv, t)
        nb = np.maximum(unv, t)
        bw, ba, bb = best_w[unv], best_a[unv], best_b[unv]
        better = (d < bw) | ((d == bw) & ((na < ba) | ((na == ba) & (nb < bb))))
        upd = unv[better]
        best_w[upd] = d[better]
        best_a[upd] = na[better]
        best_b[upd] = nb[better]
        tree_end[upd] = t

    visited[0] = True
    relax(0)
    edges = []
    for _ in range(n - 1):
        unv = np.flatnonzero(~visited)
        w = best_w[unv]
        cand = unv[w == w.min()]
        if len(cand) > 1:
            a = best_a[cand]
            cand = cand[a == a.min()]
            if len(cand) > 1:
                b = best_b[cand]
                cand = cand[b == b.min()]
        v = int(cand[0])
        u = int(tree_end[v])
        edges.append(MstEdge(min(u, v), max(u, v), float(best_w[v])))
        visited[v] = True
        if len(edges) < n - 1:
            relax(v)
    edges.sort(key=lambda e: (e.u, e.v))
    return edges
