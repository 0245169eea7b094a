"""Multigraphs, bipartitions and exact small-instance oracles.

Vertices are 0-based internally (``0 .. n-1``); the text formats in
:mod:`streamcut.formats` are 1-based.  Bit vectors are 1-D ``uint8`` numpy
arrays with entries in {0, 1}; a bipartition is the bit vector ``x`` with
``x[u] == 0`` for ``u`` in P and ``x[u] == 1`` for ``u`` in Q.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

#: Largest vertex count accepted by :func:`max_cut_exact` (2^(n-1) assignments).
MAX_EXACT_N = 24


class SizeLimitError(ValueError):
    """An exhaustive oracle was asked to run beyond its enumeration cap."""


def as_bits(bits: Iterable[int] | np.ndarray, dim: Optional[int] = None) -> np.ndarray:
    """Validate and convert ``bits`` to a ``uint8`` 0/1 vector."""
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise ValueError("bit vector must be one-dimensional")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("bit vector entries must be 0 or 1")
    if dim is not None and arr.size != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {arr.size}")
    return arr.astype(np.uint8, copy=False)


def weight(bits: np.ndarray) -> int:
    return int(np.count_nonzero(bits))


@dataclass(frozen=True, eq=False)
class MultiGraph:
    """Undirected multigraph on ``range(n)``.

    ``edges`` is an ``(m, 2)`` array with ``u < v`` in every row, kept in
    insertion order; a repeated row is a parallel edge.
    """

    n: int
    edges: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if e.min() < 0 or e.max() >= self.n:
                raise ValueError(f"edge endpoint outside [0, {self.n})")
            if np.any(e[:, 0] == e[:, 1]):
                raise ValueError("self-loops are not allowed")
        e = np.sort(e, axis=1)
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "MultiGraph":
        return cls(n, np.array(list(edges), dtype=np.int64).reshape(-1, 2))

    @classmethod
    def empty(cls, n: int) -> "MultiGraph":
        return cls(n, np.empty((0, 2), dtype=np.int64))

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    def multiplicities(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct pairs (sorted) and their multiplicities."""
        if self.m == 0:
            return np.empty((0, 2), dtype=np.int64), np.empty(0, dtype=np.int64)
        keys, counts = np.unique(self.edges[:, 0] * self.n + self.edges[:, 1], return_counts=True)
        return np.stack([keys // self.n, keys % self.n], axis=1), counts

    def is_simple(self) -> bool:
        _, counts = self.multiplicities()
        return bool(counts.size == 0 or counts.max() == 1)

    def union(self, other: "MultiGraph") -> "MultiGraph":
        if other.n != self.n:
            raise ValueError("cannot union graphs on different vertex sets")
        return MultiGraph(self.n, np.concatenate([self.edges, other.edges]))

    def subgraph(self, mask: np.ndarray) -> "MultiGraph":
        """Edges selected by a boolean/0-1 mask over edge indices."""
        return MultiGraph(self.n, self.edges[np.asarray(mask, dtype=bool)])

    def adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR-style ``(indptr, neighbours)``; parallel edges repeat neighbours."""
        u, v = self.edges[:, 0], self.edges[:, 1]
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        order = np.argsort(src, kind="stable")
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
        return indptr, dst[order]

    def __repr__(self) -> str:
        return f"MultiGraph(n={self.n}, m={self.m})"


@dataclass(frozen=True, eq=False)
class IncidenceMatrix:
    """Edge-vertex incidence matrix over GF(2), stored as endpoint pairs.

    Row ``e`` has ones exactly in columns ``rows[e]``; row order fixes the
    edge-index/coordinate correspondence for vectors in {0,1}^r.
    """

    n: int
    rows: np.ndarray

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=np.int64).reshape(-1, 2)
        if rows.size and (np.any(rows[:, 0] == rows[:, 1]) or rows.min() < 0 or rows.max() >= self.n):
            raise ValueError("each incidence row needs two distinct columns in range")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def r(self) -> int:
        return int(self.rows.shape[0])

    def dense(self) -> np.ndarray:
        out = np.zeros((self.r, self.n), dtype=np.uint8)
        idx = np.arange(self.r)
        out[idx, self.rows[:, 0]] = 1
        out[idx, self.rows[:, 1]] = 1
        return out


def incidence(G: MultiGraph) -> IncidenceMatrix:
    return IncidenceMatrix(G.n, G.edges)


def cut_value(G: MultiGraph, x: Sequence[int] | np.ndarray) -> int:
    """Number of edges (with multiplicity) crossing the bipartition ``x``."""
    x = as_bits(x, G.n)
    if G.m == 0:
        return 0
    return int(np.count_nonzero(x[G.edges[:, 0]] != x[G.edges[:, 1]]))


def _weight_matrix(G: MultiGraph) -> np.ndarray:
    W = np.zeros((G.n, G.n), dtype=np.int64)
    if G.m:
        np.add.at(W, (G.edges[:, 0], G.edges[:, 1]), 1)
        W = W + W.T
    return W


def all_cut_values(G: MultiGraph) -> np.ndarray:
    """Cut values of all ``2^(n-1)`` bipartitions with vertex 0 in P.

    Entry ``y`` is the bipartition with ``x[u] = (y >> (u - 1)) & 1`` for
    ``u >= 1``.  Built by adding one vertex at a time, so the total work is
    O(2^n) array operations.
    """
    n = G.n
    if n > MAX_EXACT_N:
        raise SizeLimitError(f"exhaustive max-cut limited to n <= {MAX_EXACT_N}, got {n}")
    if n <= 1:
        return np.zeros(1, dtype=np.int64)
    W = _weight_matrix(G)
    dtype = np.int32 if G.m < 2**31 else np.int64
    cut = np.zeros(1, dtype=dtype)
    for j in range(1, n):
        # ones[y]: weight from j to already-placed vertices on side Q
        ones = np.zeros(1, dtype=dtype)
        for u in range(1, j):
            ones = np.concatenate([ones, ones + W[j, u]])
        total = W[j, :j].sum()
        cut = np.concatenate([cut + ones, cut + (total - ones)])
    return cut


def max_cut_exact(G: MultiGraph) -> tuple[int, np.ndarray]:
    """Exact max-cut by exhaustive search with vertex 0 fixed on side P.

    Among optimal bipartitions the lexicographically smallest ``x`` is
    returned, so the witness is deterministic.
    """
    if G.n == 0:
        return 0, np.zeros(0, dtype=np.uint8)
    cuts = all_cut_values(G)
    best = int(cuts.max())
    ties = np.flatnonzero(cuts == best).astype(np.int64)
    n = G.n
    # vertex 1 is the most significant coordinate in lexicographic order
    key = np.zeros_like(ties)
    for u in range(1, n):
        key |= ((ties >> (u - 1)) & 1) << (n - 1 - u)
    y = int(ties[np.argmin(key)])
    x = np.array([0] + [(y >> (u - 1)) & 1 for u in range(1, n)], dtype=np.uint8)
    return best, x


def is_bipartite(G: MultiGraph) -> Optional[np.ndarray]:
    """BFS 2-colouring; returns a proper bipartition or ``None``.

    Each component's smallest vertex gets colour 0, so isolated vertices
    land in P.
    """
    indptr, nbrs = G.adjacency()
    colour = np.full(G.n, -1, dtype=np.int8)
    for root in range(G.n):
        if colour[root] >= 0:
            continue
        colour[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            cu = colour[u]
            for w in nbrs[indptr[u]:indptr[u + 1]]:
                if colour[w] < 0:
                    colour[w] = 1 - cu
                    queue.append(w)
                elif colour[w] == cu:
                    return None
    return colour.astype(np.uint8)


def beta_distance(G: MultiGraph) -> Fraction:
    """Fraction of edges every bipartite subgraph must drop: ``1 - OPT/m``."""
    if G.m == 0:
        raise ValueError("beta_distance is undefined for a graph with no edges")
    value, _ = max_cut_exact(G)
    return 1 - Fraction(value, G.m)


@dataclass(frozen=True)
class ComponentCounts:
    tree: int
    unicyclic: int
    complex: int
    largest: int

    @property
    def total(self) -> int:
        return self.tree + self.unicyclic + self.complex


def component_labels(G: MultiGraph) -> tuple[int, np.ndarray]:
    if G.n == 0:
        return 0, np.zeros(0, dtype=np.int32)
    ones = np.ones(G.m, dtype=np.int8)
    adj = coo_matrix((ones, (G.edges[:, 0], G.edges[:, 1])), shape=(G.n, G.n))
    return connected_components(adj, directed=False)


def classify_components(G: MultiGraph) -> ComponentCounts:
    """Count tree / unicyclic / complex components (parallel edges count)."""
    ncomp, labels = component_labels(G)
    if ncomp == 0:
        return ComponentCounts(0, 0, 0, 0)
    sizes = np.bincount(labels, minlength=ncomp)
    edge_counts = np.bincount(labels[G.edges[:, 0]], minlength=ncomp) if G.m else np.zeros(ncomp, int)
    excess = edge_counts - sizes
    return ComponentCounts(
        tree=int(np.count_nonzero(excess == -1)),
        unicyclic=int(np.count_nonzero(excess == 0)),
        complex=int(np.count_nonzero(excess > 0)),
        largest=int(sizes.max()),
    )


def gf2_apply(M: IncidenceMatrix, x: Sequence[int] | np.ndarray) -> np.ndarray:
    """``Mx`` over GF(2): coordinate e is 1 iff edge e crosses ``x``."""
    x = as_bits(x, M.n)
    if M.r == 0:
        return np.zeros(0, dtype=np.uint8)
    return x[M.rows[:, 0]] ^ x[M.rows[:, 1]]


def gf2_apply_transpose(M: IncidenceMatrix, s: Sequence[int] | np.ndarray) -> np.ndarray:
    """``M^T s`` over GF(2): degree parities of the edge subset selected by ``s``."""
    s = as_bits(s, M.r).astype(bool)
    chosen = M.rows[s].ravel()
    return (np.bincount(chosen, minlength=M.n) & 1).astype(np.uint8)


def odd_components(G: MultiGraph) -> tuple[int, np.ndarray, np.ndarray]:
    """Component labels and, per component, whether it contains an odd cycle."""
    ncomp, labels = component_labels(G)
    indptr, nbrs = G.adjacency()
    colour = np.full(G.n, -1, dtype=np.int8)
    odd = np.zeros(ncomp, dtype=bool)
    for root in range(G.n):
        if colour[root] >= 0:
            continue
        colour[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in nbrs[indptr[u]:indptr[u + 1]]:
                if colour[w] < 0:
                    colour[w] = 1 - colour[u]
                    queue.append(w)
                elif colour[w] == colour[u]:
                    odd[labels[u]] = True
    return ncomp, labels, odd


def two_core(G: MultiGraph) -> np.ndarray:
    """Boolean mask of vertices surviving repeated removal of degree-<=1 vertices."""
    indptr, nbrs = G.adjacency()
    degree = np.diff(indptr).copy()
    alive = np.ones(G.n, dtype=bool)
    stack = [int(u) for u in np.flatnonzero(degree <= 1)]
    while stack:
        u = stack.pop()
        if not alive[u]:
            continue
        alive[u] = False
        for w in nbrs[indptr[u]:indptr[u + 1]]:
            if alive[w]:
                degree[w] -= 1
                if degree[w] == 1:
                    stack.append(int(w))
    return alive
