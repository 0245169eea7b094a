"""Random graph models, the phased hard distribution and stream orderings.

All samplers take an explicit ``numpy.random.Generator``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np

from .graph import IncidenceMatrix, MultiGraph, gf2_apply, incidence


class Case(str, Enum):
    YES = "YES"
    NO = "NO"

    @classmethod
    def parse(cls, text: "str | Case") -> "Case":
        if isinstance(text, Case):
            return text
        try:
            return cls(text.upper())
        except ValueError:
            raise ValueError(f"case label must be YES or NO, got {text!r}") from None


# ---------------------------------------------------------------------------
# Pair indexing for the C(n, 2) potential edges, in lexicographic order.


def num_pairs(n: int) -> int:
    return n * (n - 1) // 2


def pair_index(u: np.ndarray | int, v: np.ndarray | int, n: int) -> np.ndarray:
    u, v = np.minimum(u, v), np.maximum(u, v)
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


def pair_from_index(idx: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`pair_index`; returns an ``(len(idx), 2)`` array."""
    idx = np.asarray(idx, dtype=np.int64)
    b = 2 * n - 1
    u = np.floor((b - np.sqrt(float(b) ** 2 - 8.0 * idx)) / 2).astype(np.int64)
    u = np.clip(u, 0, max(n - 2, 0))
    # float rounding can be off by one in either direction
    start = u * (2 * n - u - 1) // 2
    u = np.where(start > idx, u - 1, u)
    start = u * (2 * n - u - 1) // 2
    nxt = (u + 1) * (2 * n - u - 2) // 2
    u = np.where(idx >= nxt, u + 1, u)
    start = u * (2 * n - u - 1) // 2
    v = idx - start + u + 1
    return np.stack([u, v], axis=1)


# ---------------------------------------------------------------------------
# Erdos-Renyi graphs


def sample_gnp(n: int, alpha: float, rng: np.random.Generator) -> MultiGraph:
    """Simple graph with each of the C(n,2) pairs present w.p. ``alpha / n``.

    The edge count is drawn from its binomial law and the edge set is then a
    uniform subset of that size, which is the same distribution as flipping
    every pair independently.  Edges come out in lexicographic pair order.
    """
    if n < 1:
        raise ValueError("n must be positive")
    p = alpha / n
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability alpha/n = {p} outside [0, 1]")
    N = num_pairs(n)
    if N == 0:
        return MultiGraph.empty(n)
    count = int(rng.binomial(N, p))
    if count == 0:
        return MultiGraph.empty(n)
    if count == N:
        idx = np.arange(N, dtype=np.int64)
    else:
        idx = np.sort(rng.choice(N, size=count, replace=False))
    return MultiGraph(n, pair_from_index(idx, n))


def expected_cycle_count(n: int, alpha: float) -> float:
    """Expected number of cycles in G(n, alpha/n).

    Sum over lengths j >= 3 of C(n, j) * (j-1)!/2 * p^j, evaluated as
    n!/(n-j)! * p^j / (2j) with a running product.
    """
    p = alpha / n
    total = 0.0
    falling = 1.0  # n (n-1) ... (n-j+1) p^j
    for j in range(1, n + 1):
        falling *= (n - j + 1) * p
        if j >= 3:
            term = falling / (2 * j)
            total += term
            if term < 1e-18 * max(total, 1e-300):
                break
    return total


def unicyclic_count(k: int) -> int:
    """Number of connected unicyclic graphs on ``k`` labelled vertices."""
    if k < 3:
        return 0
    s = sum(Fraction(k**j, math.factorial(j)) for j in range(k - 2))
    value = Fraction(math.factorial(k - 1), 2) * s
    if value.denominator != 1:
        raise ArithmeticError(f"non-integral unicyclic count for k={k}")
    return int(value)


# ---------------------------------------------------------------------------
# The phased hard distribution


@dataclass(frozen=True)
class HardDistParams:
    """Parameters of the phased YES/NO distribution.

    ``k = ceil(c_phase / (alpha * epsilon^2))`` unless ``k_override`` is set.
    The asymptotic analysis wants ``alpha > n^(-1/10)``; that is reported by
    :attr:`in_asymptotic_regime` but not enforced, since desk-scale sweeps
    deliberately go below it.
    """

    n: int
    epsilon: float
    alpha: float
    c_phase: float = 8.0
    k_override: Optional[int] = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.alpha * self.n < 1.0:
            raise ValueError("alpha * n must be at least 1")
        if self.c_phase <= 0:
            raise ValueError("c_phase must be positive")
        if self.k < 1:
            raise ValueError("phase count k must be at least 1")

    @property
    def k(self) -> int:
        if self.k_override is not None:
            return int(self.k_override)
        return math.ceil(self.c_phase / (self.alpha * self.epsilon**2) - 1e-9)

    @property
    def in_asymptotic_regime(self) -> bool:
        return self.alpha > self.n ** (-0.1)


@dataclass(frozen=True, eq=False)
class PhasedInstance:
    params: HardDistParams
    case_label: Case
    x: Optional[np.ndarray]
    phases: tuple[np.ndarray, ...]
    union: MultiGraph

    @property
    def phase_sizes(self) -> list[int]:
        return [int(p.shape[0]) for p in self.phases]


def random_bits(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 2, size=n, dtype=np.uint8)


def sample_phase(
    n: int, alpha: float, case: Case, x: Optional[np.ndarray], rng: np.random.Generator
) -> np.ndarray:
    """One phase graph: G(n, alpha/n) filtered by ``x`` (YES) or by coin flips (NO)."""
    g = sample_gnp(n, alpha, rng).edges
    if case is Case.YES:
        keep = x[g[:, 0]] != x[g[:, 1]]
    else:
        keep = rng.random(g.shape[0]) < 0.5
    return np.ascontiguousarray(g[keep])


def sample_hard(params: HardDistParams, case_label: Case | str, rng: np.random.Generator) -> PhasedInstance:
    case = Case.parse(case_label)
    x = random_bits(params.n, rng) if case is Case.YES else None
    phases = tuple(sample_phase(params.n, params.alpha, case, x, rng) for _ in range(params.k))
    union = MultiGraph(params.n, np.concatenate(phases) if phases else np.empty((0, 2)))
    return PhasedInstance(params, case, x, phases, union)


# ---------------------------------------------------------------------------
# Streams


@dataclass(frozen=True, eq=False)
class EdgeStream:
    """Finite ordered edge sequence.

    ``ordering_tag`` is ``canonical``, ``uniform``, ``iid`` or ``adversarial``.
    ``phase_sizes`` records segment boundaries when the ordering has them.
    """

    n: int
    items: np.ndarray
    ordering_tag: str
    case_label: Optional[Case] = None
    seed: Optional[int] = None
    phase_sizes: Optional[tuple[int, ...]] = None
    source: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        items = np.asarray(self.items, dtype=np.int64).reshape(-1, 2)
        items.setflags(write=False)
        object.__setattr__(self, "items", items)

    def __len__(self) -> int:
        return int(self.items.shape[0])

    def __iter__(self):
        for u, v in self.items:
            yield int(u), int(v)

    def segments(self) -> list[np.ndarray]:
        if self.phase_sizes is None:
            return [self.items]
        bounds = np.cumsum((0,) + tuple(self.phase_sizes))
        return [self.items[a:b] for a, b in zip(bounds[:-1], bounds[1:])]


def canonical_stream(instance: PhasedInstance, rng: np.random.Generator, seed: Optional[int] = None) -> EdgeStream:
    """Phases in order 1..k, each independently shuffled."""
    parts = [p[rng.permutation(p.shape[0])] for p in instance.phases]
    items = np.concatenate(parts) if parts else np.empty((0, 2), dtype=np.int64)
    return EdgeStream(
        instance.params.n,
        items,
        "canonical",
        instance.case_label,
        seed,
        tuple(instance.phase_sizes),
    )


def uniform_stream(instance: PhasedInstance, rng: np.random.Generator, seed: Optional[int] = None) -> EdgeStream:
    """Uniformly random permutation of the union multiset."""
    e = instance.union.edges
    return EdgeStream(instance.params.n, e[rng.permutation(e.shape[0])], "uniform", instance.case_label, seed)


def multiplicity_histogram(G: MultiGraph) -> dict[int, int]:
    """Map multiplicity -> number of distinct pairs with that multiplicity."""
    _, counts = G.multiplicities()
    values, freq = np.unique(counts, return_counts=True)
    return {int(a): int(b) for a, b in zip(values, freq)}


def collision_fraction(
    instance: PhasedInstance,
    trials: int,
    rng: np.random.Generator,
    window: Optional[float] = None,
) -> float:
    """Fraction of uniform orderings that put two copies of an edge within ``window``.

    ``window`` defaults to ``4 * alpha * n`` positions.  Only the positions of
    repeated edges matter, so each trial draws those positions directly as a
    uniform injection into ``range(m)``.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    p = instance.params
    if window is None:
        window = 4 * p.alpha * p.n
    G = instance.union
    pairs, counts = G.multiplicities()
    dup = counts >= 2
    if not dup.any():
        return 0.0
    group = np.repeat(np.arange(int(dup.sum())), counts[dup])
    copies = group.size
    hits = 0
    for _ in range(trials):
        pos = rng.choice(G.m, size=copies, replace=False)
        order = np.lexsort((pos, group))
        g, q = group[order], pos[order]
        same = g[1:] == g[:-1]
        if np.any(same & (np.diff(q) <= window)):
            hits += 1
    return hits / trials


# ---------------------------------------------------------------------------
# i.i.d. edge streams


def _sample_bipartite_pairs(x: np.ndarray, length: int, rng: np.random.Generator) -> np.ndarray:
    P = np.flatnonzero(x == 0)
    Q = np.flatnonzero(x == 1)
    if P.size == 0 or Q.size == 0:
        raise ValueError("complete bipartite graph over this bipartition has no edges")
    u = P[rng.integers(0, P.size, size=length)]
    v = Q[rng.integers(0, Q.size, size=length)]
    return np.sort(np.stack([u, v], axis=1), axis=1)


def iid_stream(
    params: HardDistParams,
    case_label: Case | str,
    length: int,
    rng: np.random.Generator,
    x: Optional[np.ndarray] = None,
) -> EdgeStream:
    """``length`` independent uniform edges of K_{P,Q} (YES) or K_n (NO).

    In the YES case the bipartition is drawn uniformly unless ``x`` is given.
    """
    case = Case.parse(case_label)
    n = params.n
    if case is Case.YES:
        if x is None:
            x = random_bits(n, rng)
        items = _sample_bipartite_pairs(x, length, rng)
    else:
        N = num_pairs(n)
        if N == 0:
            raise ValueError("complete graph on one vertex has no edges")
        items = pair_from_index(rng.integers(0, N, size=length), n)
    return EdgeStream(n, items, "iid", case, source={"x": x})


@dataclass(frozen=True, eq=False)
class IidPhaseCounts:
    """Per-phase sample counts ``T_1..T_k`` and their source sizes."""

    counts: np.ndarray
    source_sizes: np.ndarray
    x: Optional[np.ndarray]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def iid_phase_counts(
    params: HardDistParams,
    case_label: Case | str,
    rng: np.random.Generator,
    x: Optional[np.ndarray] = None,
) -> IidPhaseCounts:
    """Draw T_i ~ Bin(|P||Q|, alpha/n) (YES) or Bin(|E'_i|, alpha/n) (NO).

    In the NO case each ``E'_i`` keeps every edge of K_n with probability 1/2
    independently, so ``|E'_i| ~ Bin(C(n,2), 1/2)``.
    """
    case = Case.parse(case_label)
    n, k, p = params.n, params.k, params.alpha / params.n
    if case is Case.YES:
        if x is None:
            x = random_bits(n, rng)
        ones = int(x.sum())
        sizes = np.full(k, ones * (n - ones), dtype=np.int64)
    else:
        sizes = rng.binomial(num_pairs(n), 0.5, size=k).astype(np.int64)
    counts = rng.binomial(sizes, p).astype(np.int64)
    return IidPhaseCounts(counts, sizes, x)


def iid_phased_stream(
    params: HardDistParams, case_label: Case | str, rng: np.random.Generator
) -> EdgeStream:
    """``T = sum T_i`` i.i.d. samples split into phase segments of sizes ``T_i``."""
    case = Case.parse(case_label)
    pc = iid_phase_counts(params, case, rng)
    base = iid_stream(params, case, pc.total, rng, x=pc.x)
    return EdgeStream(
        params.n, base.items, "iid", case, phase_sizes=tuple(int(t) for t in pc.counts), source={"x": pc.x}
    )


def phases_with_duplicates(stream: EdgeStream) -> int:
    """Number of phase segments that contain some edge more than once."""
    hits = 0
    for seg in stream.segments():
        if seg.shape[0] > 1 and np.unique(seg[:, 0] * stream.n + seg[:, 1]).size < seg.shape[0]:
            hits += 1
    return hits


# ---------------------------------------------------------------------------
# Communication-problem instances


@dataclass(frozen=True, eq=False)
class BhhInstance:
    """Hidden hypermatching instance.

    ``blocks`` is an ``(n/t, t)`` array; each row is one hyperedge with its
    vertices sorted ascending.
    """

    n: int
    t: int
    x: np.ndarray
    blocks: np.ndarray
    w: np.ndarray
    case_label: Case

    def parities(self) -> np.ndarray:
        return (self.x[self.blocks].sum(axis=1) & 1).astype(np.uint8)


def sample_bhh(n: int, t: int, case_label: Case | str, rng: np.random.Generator) -> BhhInstance:
    case = Case.parse(case_label)
    if t < 1 or n < 1 or n % (2 * t):
        raise ValueError(f"n must be a positive multiple of 2t (n={n}, t={t})")
    x = random_bits(n, rng)
    blocks = np.sort(rng.permutation(n).reshape(n // t, t), axis=1)
    parity = (x[blocks].sum(axis=1) & 1).astype(np.uint8)
    w = parity if case is Case.YES else parity ^ 1
    return BhhInstance(n, t, x, blocks, w, case)


@dataclass(frozen=True, eq=False)
class BhpInstance:
    n: int
    alpha: float
    x: np.ndarray
    G: MultiGraph
    M: IncidenceMatrix
    w: np.ndarray
    case_label: Case


def sample_bhp(n: int, alpha: float, case_label: Case | str, rng: np.random.Generator) -> BhpInstance:
    case = Case.parse(case_label)
    if not 0.0 < alpha < n:
        raise ValueError("alpha must lie in (0, n)")
    x = random_bits(n, rng)
    G = sample_gnp(n, alpha, rng)
    M = incidence(G)
    w = gf2_apply(M, x) if case is Case.YES else random_bits(M.r, rng)
    return BhpInstance(n, alpha, x, G, M, w, case)


# ---------------------------------------------------------------------------


def chernoff_tail(mu: float, delta: float, side: str) -> float:
    """Bernoulli-sum tail bound: upper exp(-d^2/(2mu+2d)), lower exp(-d^2/(2mu))."""
    if mu <= 0 or delta < 0:
        raise ValueError("need mu > 0 and delta >= 0")
    if side == "upper":
        return math.exp(-(delta**2) / (2 * mu + 2 * delta))
    if side == "lower":
        return math.exp(-(delta**2) / (2 * mu))
    raise ValueError("side must be 'upper' or 'lower'")
