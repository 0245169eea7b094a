"""Exact small-n oracles: boolean Fourier analysis, p_M, and TVD identities.

Points of {0,1}^n are encoded as integers with coordinate ``u`` at bit ``u``.
Fourier coefficients use the normalization
``f_hat(v) = 2^-n * sum_x f(x) * (-1)^(x.v)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .distributions import sample_gnp
from .graph import IncidenceMatrix, MultiGraph, SizeLimitError, incidence

MAX_FOURIER_N = 20
MAX_SOLUTION_R = 20


def popcount(values: np.ndarray) -> np.ndarray:
    return np.bitwise_count(np.asarray(values, dtype=np.uint64)).astype(np.int64)


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class IndicatorSet:
    """A non-empty subset of {0,1}^n given by its membership table."""

    n: int
    members: np.ndarray

    def __post_init__(self) -> None:
        if self.n > MAX_FOURIER_N:
            raise SizeLimitError(f"indicator tables limited to n <= {MAX_FOURIER_N}")
        members = np.asarray(self.members, dtype=bool)
        if members.shape != (2**self.n,):
            raise ValueError(f"membership table must have length 2^{self.n}")
        if not members.any():
            raise ValueError("indicator set must be non-empty")
        members.setflags(write=False)
        object.__setattr__(self, "members", members)

    @classmethod
    def from_points(cls, n: int, points: Sequence[int]) -> "IndicatorSet":
        members = np.zeros(2**n, dtype=bool)
        members[np.asarray(points, dtype=np.int64)] = True
        return cls(n, members)

    @classmethod
    def full(cls, n: int) -> "IndicatorSet":
        return cls(n, np.ones(2**n, dtype=bool))

    @classmethod
    def subcube(cls, n: int, fixed: dict[int, int]) -> "IndicatorSet":
        """Points agreeing with ``fixed`` (coordinate -> bit)."""
        x = np.arange(2**n)
        keep = np.ones(2**n, dtype=bool)
        for u, b in fixed.items():
            keep &= ((x >> u) & 1) == b
        return cls(n, keep)

    @classmethod
    def random(cls, n: int, size: int, rng: np.random.Generator) -> "IndicatorSet":
        if not 1 <= size <= 2**n:
            raise ValueError("size must lie in 1..2^n")
        return cls.from_points(n, rng.choice(2**n, size=size, replace=False))

    @property
    def size(self) -> int:
        return int(np.count_nonzero(self.members))

    @property
    def points(self) -> np.ndarray:
        return np.flatnonzero(self.members)

    @property
    def deficiency(self) -> float:
        """``n - log2 |A|``: how many bits short of the whole cube the set is."""
        return self.n - math.log2(self.size)


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform of a length-2^d vector."""
    out = np.array(values, dtype=np.float64)
    size = out.size
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < size:
        blocks = out.reshape(-1, 2, h)
        lo, hi = blocks[:, 0, :].copy(), blocks[:, 1, :]
        blocks[:, 0, :] += hi
        blocks[:, 1, :] = lo - hi
        h *= 2
    return out


@dataclass(frozen=True, eq=False)
class FourierTable:
    n: int
    coeffs: np.ndarray

    def parseval_gap(self, A: IndicatorSet) -> float:
        """``|sum f_hat^2 - 2^-n |A||`` (zero up to rounding)."""
        return abs(float(np.sum(self.coeffs**2)) - A.size / 2**self.n)


def indicator_fourier(A: IndicatorSet) -> FourierTable:
    return FourierTable(A.n, fwht(A.members.astype(np.float64)) / 2**A.n)


# ---------------------------------------------------------------------------
# p_M and the transpose map


def _check_rows(M: IncidenceMatrix) -> None:
    if M.r > MAX_SOLUTION_R:
        raise SizeLimitError(f"enumeration over 2^r limited to r <= {MAX_SOLUTION_R}, got r={M.r}")


def edge_images(M: IncidenceMatrix, points: np.ndarray) -> np.ndarray:
    """Integer encoding of ``Mx`` for each integer-encoded ``x``."""
    z = np.zeros(points.size, dtype=np.int64)
    for e, (u, v) in enumerate(M.rows):
        z |= (((points >> u) ^ (points >> v)) & 1) << e
    return z


def transpose_images(M: IncidenceMatrix) -> np.ndarray:
    """``M^T s`` (integer-encoded over n bits) for every ``s`` in 0..2^r-1."""
    _check_rows(M)
    img = np.zeros(1, dtype=np.int64)
    for u, v in M.rows:
        img = np.concatenate([img, img ^ ((1 << int(u)) | (1 << int(v)))])
    return img


def p_M_exact(A: IndicatorSet, M: IncidenceMatrix) -> np.ndarray:
    """Law of ``Mx`` for ``x`` uniform on ``A``, as a table over {0,1}^r."""
    if M.n != A.n:
        raise ValueError("incidence matrix and indicator set disagree on n")
    _check_rows(M)
    z = edge_images(M, A.points)
    return np.bincount(z, minlength=2**M.r) / A.size


def fourier_identity_check(A: IndicatorSet, M: IncidenceMatrix) -> float:
    """Max deviation between p_M's Fourier table and the rescaled ``f_hat(M^T s)``."""
    p = p_M_exact(A, M)
    lhs = fwht(p) / 2**M.r
    rhs = (2**A.n / (A.size * 2**M.r)) * indicator_fourier(A).coeffs[transpose_images(M)]
    return float(np.max(np.abs(lhs - rhs)))


def tvd(p: Sequence, q: Sequence) -> float | Fraction:
    """Half the l1 distance; exact when given Fractions."""
    p, q = np.asarray(p), np.asarray(q)
    if p.shape != q.shape:
        raise ValueError("distributions live on different outcome spaces")
    return np.abs(p - q).sum() / 2


def tvd_max_event(p: Sequence, q: Sequence) -> float | Fraction:
    """``max_E p(E) - q(E)``, attained by ``E = {p > q}``."""
    p, q = np.asarray(p), np.asarray(q)
    if p.shape != q.shape:
        raise ValueError("distributions live on different outcome spaces")
    diff = p - q
    return diff[diff > 0].sum()


@dataclass(frozen=True)
class BoundChain:
    tvd_squared: float
    scaled_l2: float
    fourier_sum: float

    def holds(self, tol: float = 1e-10) -> bool:
        return self.tvd_squared <= self.scaled_l2 + tol and abs(self.scaled_l2 - self.fourier_sum) <= tol


def tvd_bound_chain(A: IndicatorSet, M: IncidenceMatrix) -> BoundChain:
    """``tvd(p_M, U)^2 <= 2^r ||p_M - U||^2 = 2^{2n}/|A|^2 * sum_{s != 0} f_hat(M^T s)^2``."""
    p = p_M_exact(A, M)
    uniform = np.full(p.size, 1.0 / p.size)
    f_hat = indicator_fourier(A).coeffs[transpose_images(M)[1:]]
    return BoundChain(
        float(tvd(p, uniform)) ** 2,
        float(p.size * np.sum((p - uniform) ** 2)),
        float(4.0**A.n / A.size**2 * np.sum(f_hat**2)),
    )


@dataclass(frozen=True)
class WeightMass:
    ell: int
    mass: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.mass <= self.bound


def weight_range(A: IndicatorSet) -> range:
    """Admissible weight levels ``1 .. floor(4 * deficiency)``."""
    return range(1, math.floor(4 * A.deficiency + 1e-12) + 1)


def weight_mass_check(A: IndicatorSet, ell: int, table: Optional[FourierTable] = None) -> WeightMass:
    """Normalized Fourier mass on weight-``ell`` characters against ``(4*sqrt2*c'/ell)^ell``."""
    if ell not in weight_range(A):
        raise ValueError(f"ell={ell} outside 1..floor(4c') for c'={A.deficiency:.4f}")
    table = table if table is not None else indicator_fourier(A)
    level = popcount(np.arange(2**A.n)) == ell
    mass = 4.0**A.n / A.size**2 * float(np.sum(table.coeffs[level] ** 2))
    bound = (4 * math.sqrt(2) * A.deficiency / ell) ** ell
    return WeightMass(ell, mass, bound)


# ---------------------------------------------------------------------------
# Solutions of M^T s = v


def _bits_to_int(bits: Sequence[int]) -> int:
    return sum(int(b) << i for i, b in enumerate(bits))


def degree_parity_masks(M: IncidenceMatrix, s_values: np.ndarray) -> np.ndarray:
    """Odd-degree vertex set of each edge subset, computed vertex by vertex."""
    s_values = np.asarray(s_values, dtype=np.uint64)
    out = np.zeros(s_values.size, dtype=np.int64)
    for u in range(M.n):
        incident = np.flatnonzero((M.rows[:, 0] == u) | (M.rows[:, 1] == u))
        mask = np.uint64(sum(1 << int(e) for e in incident))
        out |= (popcount(s_values & mask) & 1) << u
    return out


@dataclass(frozen=True)
class Decomposition:
    paths: tuple[tuple[int, ...], ...]
    cycles: tuple[tuple[int, ...], ...]


def _split_trail(vertices: list[int], edges: list[int], cycles: list) -> tuple[list[int], list[int]]:
    """Peel closed sub-walks off a trail, leaving a simple path."""
    path_v: list[int] = []
    path_e: list[int] = []
    where: dict[int, int] = {}
    for i, u in enumerate(vertices):
        if u in where:
            cut = where[u]
            cycles.append(tuple(path_e[cut:]))
            for w in path_v[cut + 1:]:
                del where[w]
            path_v = path_v[: cut + 1]
            path_e = path_e[:cut]
        else:
            where[u] = len(path_v)
            path_v.append(u)
        if i < len(edges):
            path_e.append(edges[i])
    return path_v, path_e


def decompose_paths_cycles(M: IncidenceMatrix, s: Sequence[int] | np.ndarray) -> Decomposition:
    """Split the edges selected by ``s`` into simple paths and simple cycles.

    Paths join distinct odd-degree vertices; cycles are edge-id tuples.  Raises
    if the selection does not decompose, which cannot happen for a graph.
    """
    chosen = [e for e in range(M.r) if s[e]]
    incident: dict[int, list[int]] = {}
    for e in chosen:
        u, v = (int(a) for a in M.rows[e])
        incident.setdefault(u, []).append(e)
        incident.setdefault(v, []).append(e)
    used: set[int] = set()
    remaining = {u: len(es) for u, es in incident.items()}
    odd = {u for u, d in remaining.items() if d % 2}

    def walk(start: int, stop) -> tuple[list[int], list[int]]:
        verts, eids, cur = [start], [], start
        while True:
            nxt = next((e for e in incident[cur] if e not in used), None)
            if nxt is None:
                raise RuntimeError("walk stuck")
            used.add(nxt)
            a, b = (int(x) for x in M.rows[nxt])
            remaining[a] -= 1
            remaining[b] -= 1
            cur = b if a == cur else a
            verts.append(cur)
            eids.append(nxt)
            if stop(cur):
                return verts, eids

    paths, cycles = [], []
    while odd:
        a = min(odd)
        verts, eids = walk(a, lambda u, a=a: u != a and u in odd)
        odd.discard(a)
        odd.discard(verts[-1])
        pv, _ = _split_trail(verts, eids, cycles)
        paths.append(tuple(pv))
    for u in sorted(incident):
        while remaining[u] > 0:
            verts, eids = walk(u, lambda w, u=u: w == u)
            _, leftover = _split_trail(verts, eids, cycles)
            if leftover:
                cycles.append(tuple(leftover))
    if len(used) != len(chosen):
        raise RuntimeError("decomposition missed edges")
    return Decomposition(tuple(paths), tuple(cycles))


def certify_decomposition(M: IncidenceMatrix, s: np.ndarray, v: np.ndarray, dec: Decomposition) -> bool:
    """Paths pair up supp(v) and, with the cycles, use every chosen edge once."""
    ends = sorted(u for p in dec.paths for u in (p[0], p[-1]))
    if ends != sorted(np.flatnonzero(v).tolist()):
        return False
    if any(len(set(p)) != len(p) for p in dec.paths):
        return False
    cycle_edges = [e for c in dec.cycles for e in c]
    for c in dec.cycles:
        ends_deg: dict[int, int] = {}
        for e in c:
            for x in M.rows[e]:
                ends_deg[int(x)] = ends_deg.get(int(x), 0) + 1
        if any(d != 2 for d in ends_deg.values()):
            return False
    path_edges = sum(len(p) - 1 for p in dec.paths)
    chosen = int(np.count_nonzero(s))
    return path_edges + len(cycle_edges) == chosen and len(set(cycle_edges)) == len(cycle_edges)


@dataclass(frozen=True, eq=False)
class SolutionSet:
    v: np.ndarray
    solutions: np.ndarray
    parity_certified: bool

    @property
    def count(self) -> int:
        return int(self.solutions.size)

    def as_bits(self, r: int) -> np.ndarray:
        return ((self.solutions[:, None] >> np.arange(r)) & 1).astype(np.uint8)


def solutions_of(M: IncidenceMatrix, v: Sequence[int] | np.ndarray, images: Optional[np.ndarray] = None) -> SolutionSet:
    """All ``s`` in {0,1}^r with ``M^T s = v``, by exhaustive enumeration.

    ``parity_certified`` records that every solution's odd-degree vertex set,
    recomputed independently, is exactly supp(v).
    """
    v = np.asarray(v, dtype=np.uint8)
    if v.size != M.n:
        raise ValueError(f"dimension mismatch: expected {M.n}, got {v.size}")
    images = transpose_images(M) if images is None else images
    target = _bits_to_int(v)
    sols = np.flatnonzero(images == target)
    certified = bool(np.all(degree_parity_masks(M, sols) == target))
    return SolutionSet(v, sols, certified)


def cycle_space_dimension(G: MultiGraph) -> int:
    from .graph import component_labels

    ncomp, _ = component_labels(G)
    return G.m - G.n + int(ncomp)


def is_forest_selection(M: IncidenceMatrix, s: Sequence[int] | np.ndarray) -> bool:
    """True iff the selected edges contain no cycle (parallel pairs count)."""
    parent = list(range(M.n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in np.flatnonzero(np.asarray(s)):
        a, b = find(int(M.rows[e, 0])), find(int(M.rows[e, 1]))
        if a == b:
            return False
        parent[a] = b
    return True


def path_type_count(M: IncidenceMatrix, v: Sequence[int] | np.ndarray) -> int:
    """Number of acyclic solutions of ``M^T s = v``."""
    sols = solutions_of(M, v)
    return sum(is_forest_selection(M, row) for row in sols.as_bits(M.r))


def expected_path_count(n: int, alpha: float) -> float:
    """Expected number of simple paths between two fixed vertices of G(n, alpha/n)."""
    p = alpha / n
    total, falling = 0.0, 1.0
    for q in range(n - 1):
        total += falling * p ** (q + 1)
        falling *= n - 2 - q
    return total


def _unit_sum(n: int, ell: int) -> np.ndarray:
    v = np.zeros(n, dtype=np.uint8)
    v[:ell] = 1
    return v


def representation_count_mc(
    n: int,
    alpha: float,
    ell: int,
    trials: int,
    rng: np.random.Generator,
    v: Optional[np.ndarray] = None,
) -> float:
    """Mean number of acyclic solutions of ``M^T s = v`` over G ~ G(n, alpha/n)."""
    if ell < 2 or ell % 2:
        raise ValueError("ell must be an even integer >= 2")
    v = _unit_sum(n, ell) if v is None else np.asarray(v, dtype=np.uint8)
    if alpha == 0:
        return 0.0
    total = 0
    for _ in range(trials):
        total += path_type_count(incidence(sample_gnp(n, alpha, rng)), v)
    return total / trials


def representation_count_coupled(
    n: int,
    alphas: Sequence[float],
    ell: int,
    trials: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Mean acyclic-solution counts on a grid of alphas, all graphs sharing one uniform per pair.

    The graph for a larger alpha contains the graph for a smaller one, so the
    per-trial counts (and the means) are non-decreasing along the grid.
    """
    if ell < 2 or ell % 2:
        raise ValueError("ell must be an even integer >= 2")
    alphas = list(alphas)
    v = _unit_sum(n, ell)
    u, w = np.triu_indices(n, k=1)
    totals = np.zeros(len(alphas))
    for _ in range(trials):
        draw = rng.random(u.size)
        for i, a in enumerate(alphas):
            keep = draw < a / n
            M = IncidenceMatrix(n, np.stack([u[keep], w[keep]], axis=1))
            totals[i] += path_type_count(M, v)
    return totals / trials


# ---------------------------------------------------------------------------
# Distinguishing and post-processing identities


def likelihood_test_advantage(p: Sequence, q: Sequence) -> tuple:
    """Advantage of "YES iff p(w) > q(w)" on the equal-prior mixture, and tvd/2.

    Exact for Fraction inputs.
    """
    p, q = np.asarray(p), np.asarray(q)
    if p.shape != q.shape:
        raise ValueError("distributions live on different outcome spaces")
    yes = p > q
    correct = (p[yes].sum() + q[~yes].sum()) / 2
    return correct - Fraction(1, 2) if p.dtype == object else float(correct) - 0.5, tvd(p, q) / 2


def conditional_tvd_check(joint1: np.ndarray, joint2: np.ndarray, tol: float = 1e-12) -> tuple[float, float]:
    """``tvd(joint1, joint2)`` versus ``E_X tvd(Y1 | X, Y2 | X)`` for a shared X-marginal (rows)."""
    joint1, joint2 = np.asarray(joint1, dtype=float), np.asarray(joint2, dtype=float)
    if joint1.shape != joint2.shape:
        raise ValueError("joint tables differ in shape")
    px = joint1.sum(axis=1)
    if np.max(np.abs(px - joint2.sum(axis=1))) > tol:
        raise ValueError("joints must share the same X-marginal")
    lhs = float(tvd(joint1.ravel(), joint2.ravel()))
    rhs = 0.0
    for x in np.flatnonzero(px > 0):
        rhs += px[x] * float(tvd(joint1[x] / px[x], joint2[x] / px[x]))
    return lhs, rhs


def pushforward(px: np.ndarray, pw: np.ndarray, f: np.ndarray, outcomes: Optional[int] = None) -> np.ndarray:
    """Law of ``f(X, W)`` for independent X, W; ``f`` is an integer table of shape (|X|, |W|)."""
    f = np.asarray(f, dtype=np.int64)
    size = int(f.max()) + 1 if outcomes is None else outcomes
    return np.bincount(f.ravel(), weights=np.outer(px, pw).ravel(), minlength=size)


def postprocessing_check(X: np.ndarray, Y: np.ndarray, W: np.ndarray, f: np.ndarray) -> tuple[float, float]:
    """``(tvd(f(X,W), f(Y,W)), tvd(X, Y))``."""
    X, Y, W = (np.asarray(a, dtype=float) for a in (X, Y, W))
    f = np.asarray(f, dtype=np.int64)
    if f.shape != (X.size, W.size) or X.shape != Y.shape:
        raise ValueError("f must be a table over (X outcomes, W outcomes)")
    size = int(f.max()) + 1
    return float(tvd(pushforward(X, W, f, size), pushforward(Y, W, f, size))), float(tvd(X, Y))


def l2_distance_trend(
    n: int,
    alpha: float,
    fixed_counts: Sequence[int],
    trials: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Mean of ``2^r ||p_M - U_r||^2`` for subcube sets with 0..c fixed coordinates.

    The same graphs are used for every entry, and a subcube with more fixed
    coordinates is a subset of one with fewer.
    """
    totals = np.zeros(len(fixed_counts))
    for _ in range(trials):
        M = incidence(sample_gnp(n, alpha, rng))
        for i, c in enumerate(fixed_counts):
            A = IndicatorSet.subcube(n, {u: 0 for u in range(c)})
            totals[i] += tvd_bound_chain(A, M).scaled_l2
    return totals / trials
