"""Reductions to streaming MAX-CUT.

Two constructions live here:

* the hypermatching gadget, which turns a BHH instance into a graph on
  ``4n`` vertices whose max-cut is ``4n`` (YES) or ``4n - n/t`` (NO);
* the phase-simulation protocol, which turns a finite-state streaming
  algorithm for the phased distribution into a one-way protocol for D-BHP.

Gadget vertex layout: block ``i`` owns ``a_i = 4i``, ``b_i = 4i+1``,
``c_i = 4i+2`` and ``d_i = 4i+3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .distributions import (
    BhhInstance,
    BhpInstance,
    Case,
    EdgeStream,
    HardDistParams,
    num_pairs,
    pair_index,
    sample_phase,
)
from .fourier import tvd
from .graph import MultiGraph, odd_components, two_core
from .streaming import FiniteStateAutomaton

A, B, C, D = 0, 1, 2, 3


def vertex(i: int | np.ndarray, role: int) -> int | np.ndarray:
    """Gadget vertex id of ``role`` (0..3 for a, b, c, d) in block ``i``."""
    return 4 * i + role


# ---------------------------------------------------------------------------
# Hypermatching gadget


def bhh_alice_edges(x: Sequence[int] | np.ndarray) -> np.ndarray:
    """Three edges per block: (a,b), (c,d) and (a,d) if x_i = 0 else (a,c)."""
    x = np.asarray(x, dtype=np.int64)
    i = np.arange(x.size)
    third = np.where(x == 0, vertex(i, D), vertex(i, C))
    rows = np.stack(
        [
            np.stack([vertex(i, A), vertex(i, B)], axis=1),
            np.stack([vertex(i, C), vertex(i, D)], axis=1),
            np.stack([vertex(i, A), third], axis=1),
        ],
        axis=1,
    )
    return rows.reshape(-1, 2)


def bhh_bob_edges(blocks: np.ndarray, w: Sequence[int] | np.ndarray) -> np.ndarray:
    """``t`` edges per hyperedge ``j_1 < ... < j_t``.

    Chain edges ``(d_{j_{s-1}}, a_{j_s})`` for s = 2..t, then a closing edge
    from ``d_{j_t}`` back to ``a_{j_1}`` (w = 0) or ``b_{j_1}`` (w = 1).
    """
    blocks = np.sort(np.asarray(blocks, dtype=np.int64), axis=1)
    w = np.asarray(w, dtype=np.int64)
    if blocks.shape[0] != w.size:
        raise ValueError("need one label per hyperedge")
    chain = np.stack([vertex(blocks[:, :-1], D), vertex(blocks[:, 1:], A)], axis=2)
    closing = np.stack(
        [vertex(blocks[:, -1], D), np.where(w == 0, vertex(blocks[:, 0], A), vertex(blocks[:, 0], B))],
        axis=1,
    )
    rows = np.concatenate([chain, closing[:, None, :]], axis=1)
    return rows.reshape(-1, 2)


@dataclass(frozen=True, eq=False)
class GadgetGraph:
    base_n: int
    t: int
    alice_edges: np.ndarray
    bob_edges: np.ndarray
    blocks: np.ndarray
    case_label: Optional[Case] = None

    @property
    def n_vertices(self) -> int:
        return 4 * self.base_n

    @property
    def m(self) -> int:
        return int(self.alice_edges.shape[0] + self.bob_edges.shape[0])

    @property
    def graph(self) -> MultiGraph:
        return MultiGraph(self.n_vertices, np.concatenate([self.alice_edges, self.bob_edges]))

    def adversarial_stream(self, seed: Optional[int] = None) -> EdgeStream:
        """Alice's edges then Bob's, each in construction order."""
        return EdgeStream(
            self.n_vertices,
            np.concatenate([self.alice_edges, self.bob_edges]),
            "adversarial",
            self.case_label,
            seed,
            (int(self.alice_edges.shape[0]), int(self.bob_edges.shape[0])),
        )


def bhh_build(instance: BhhInstance) -> GadgetGraph:
    return GadgetGraph(
        instance.n,
        instance.t,
        bhh_alice_edges(instance.x),
        bhh_bob_edges(instance.blocks, instance.w),
        np.sort(instance.blocks, axis=1),
        instance.case_label,
    )


@dataclass(frozen=True)
class GadgetStructure:
    components: int
    vertices_per_component: tuple[int, ...]
    edges_per_component: tuple[int, ...]
    odd_cycles: int
    max_cut: int


def gadget_structure(gadget: GadgetGraph) -> GadgetStructure:
    """Per-component census and the closed-form max-cut.

    Every component must be unicyclic; its max-cut is its edge count, minus
    one when the cycle is odd.
    """
    G = gadget.graph
    ncomp, labels, odd = odd_components(G)
    sizes = np.bincount(labels, minlength=ncomp)
    edges = np.bincount(labels[G.edges[:, 0]], minlength=ncomp)
    if np.any(edges != sizes):
        raise ValueError("gadget component is not unicyclic")
    return GadgetStructure(
        int(ncomp),
        tuple(int(s) for s in sizes),
        tuple(int(e) for e in edges),
        int(odd.sum()),
        G.m - int(odd.sum()),
    )


def gadget_max_cut(gadget: GadgetGraph) -> int:
    return gadget_structure(gadget).max_cut


def gadget_cycle_lengths(gadget: GadgetGraph) -> np.ndarray:
    """Length of the cycle through each hyperedge, in hyperedge order."""
    G = gadget.graph
    _, labels = odd_components(G)[:2]
    core = two_core(G)
    per_component = np.bincount(labels[core], minlength=labels.max() + 1)
    return per_component[labels[vertex(gadget.blocks[:, 0], A)]]


def bhh_decide(maxcut_estimate: float | int | Fraction, n: int, t: int) -> Case:
    """YES iff the estimate is strictly above ``(1 - 1/(4t)) * 4n``."""
    threshold = Fraction(4 * n) - Fraction(n, t)
    return Case.YES if Fraction(maxcut_estimate) > threshold else Case.NO


# ---------------------------------------------------------------------------
# Algorithm-state distributions over the phased distribution


@dataclass(frozen=True, eq=False)
class StateDistribution:
    phase: int
    case_label: Case
    probs: np.ndarray
    trials: int
    counts: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if np.any(self.probs < 0) or abs(float(self.probs.sum()) - 1.0) > 1e-9:
            raise ValueError("state distribution must be non-negative and sum to 1")

    @property
    def num_states(self) -> int:
        return int(self.probs.size)


_CHUNK = 1 << 15


def _pair_endpoints(n: int) -> tuple[np.ndarray, np.ndarray]:
    u, v = np.triu_indices(n, k=1)
    return u.astype(np.int64), v.astype(np.int64)


def _check_automaton(alg: FiniteStateAutomaton, params: HardDistParams) -> None:
    if not isinstance(alg, FiniteStateAutomaton):
        raise TypeError("state-distribution estimates need a FiniteStateAutomaton")
    if alg.n != params.n:
        raise ValueError(f"automaton built for n={alg.n}, distribution has n={params.n}")


def _run_phase_batch(
    alg: FiniteStateAutomaton,
    states: np.ndarray,
    alpha: float,
    case: Case,
    xs: Optional[np.ndarray],
    rng: np.random.Generator,
) -> np.ndarray:
    """Advance a batch of runs by one phase, each edge set in uniform order.

    Every pair is present independently with probability alpha/n and then
    filtered by crossing ``xs`` (YES) or a fair coin (NO); sorting the pairs
    by i.i.d. keys gives a uniform order of the survivors.
    """
    n = alg.n
    u, v = _pair_endpoints(n)
    T, N = states.size, u.size
    present = rng.random((T, N)) < alpha / n
    if case is Case.YES:
        present &= xs[:, u] != xs[:, v]
    else:
        present &= rng.random((T, N)) < 0.5
    order = np.argsort(rng.random((T, N)), axis=1)
    rows = np.arange(T)
    for pos in range(N):
        pair = order[:, pos]
        states = alg.step_many(states, pair, present[rows, pair])
    return states


def state_trajectories(
    alg: FiniteStateAutomaton,
    params: HardDistParams,
    case_label: Case | str,
    trials: int,
    rng: np.random.Generator,
    phases: Optional[int] = None,
) -> np.ndarray:
    """Counts of the automaton state after each prefix of phases.

    Returns an array of shape ``(phases + 1, states)``; row ``j`` is the state
    histogram after phases 1..j over ``trials`` independent instances.
    """
    _check_automaton(alg, params)
    case = Case.parse(case_label)
    phases = params.k if phases is None else phases
    S = alg.num_states
    counts = np.zeros((phases + 1, S), dtype=np.int64)
    done = 0
    while done < trials:
        T = min(_CHUNK, trials - done)
        xs = rng.integers(0, 2, size=(T, params.n), dtype=np.int64) if case is Case.YES else None
        states = np.zeros(T, dtype=np.int64)
        counts[0] += np.bincount(states, minlength=S)
        for j in range(1, phases + 1):
            states = _run_phase_batch(alg, states, params.alpha, case, xs, rng)
            counts[j] += np.bincount(states, minlength=S)
        done += T
    return counts


def estimate_state_distribution(
    alg: FiniteStateAutomaton,
    params: HardDistParams,
    case_label: Case | str,
    phase: int,
    trials: int,
    rng: np.random.Generator,
) -> StateDistribution:
    if not 0 <= phase <= params.k:
        raise ValueError(f"phase must lie in 0..{params.k}")
    case = Case.parse(case_label)
    counts = state_trajectories(alg, params, case, trials, rng, phases=phase)[phase]
    return StateDistribution(phase, case, counts / trials, trials, counts)


@dataclass(frozen=True)
class InformativeIndexReport:
    tvds: tuple[Fraction, ...]
    j_star: int
    delta: Fraction
    c_dist: Fraction
    trials: int

    @property
    def k(self) -> int:
        return len(self.tvds) - 1

    @property
    def increments(self) -> tuple[Fraction, ...]:
        return tuple(b - a for a, b in zip(self.tvds[:-1], self.tvds[1:]))

    @property
    def telescopes(self) -> bool:
        return sum(self.increments, Fraction(0)) == self.tvds[-1] - self.tvds[0]

    @property
    def max_increment(self) -> Fraction:
        return max(self.increments)


def _count_tvd(a: np.ndarray, b: np.ndarray, trials: int) -> Fraction:
    return Fraction(int(np.abs(a - b).sum()), 2 * trials)


def find_informative_index(
    alg: FiniteStateAutomaton,
    params: HardDistParams,
    trials: int,
    rng: np.random.Generator,
    c_dist: Optional[Fraction] = None,
) -> InformativeIndexReport:
    """Empirical TVD curve between YES and NO state laws and the hybrid index.

    TVDs are exact rationals of the empirical counts, so the increments
    telescope exactly.  ``j*`` is the smallest ``j`` in ``0..k-1`` with
    ``tvd(j+1) >= c_dist * (j+1) / k``; by construction its increment is at
    least ``c_dist / k``.  ``c_dist`` defaults to the final TVD.
    """
    yes_rng, no_rng = rng.spawn(2)
    yes = state_trajectories(alg, params, Case.YES, trials, yes_rng)
    no = state_trajectories(alg, params, Case.NO, trials, no_rng)
    tvds = tuple(_count_tvd(yes[j], no[j], trials) for j in range(params.k + 1))
    k = params.k
    c = tvds[-1] if c_dist is None else Fraction(c_dist)
    j_star = 0
    if c > 0:
        j_star = next(j for j in range(k) if tvds[j + 1] >= c * (j + 1) / k)
    return InformativeIndexReport(tvds, j_star, tvds[j_star + 1] - tvds[j_star], c, trials)


@dataclass(frozen=True, eq=False)
class ReferenceTables:
    yes: StateDistribution
    no: StateDistribution

    def decide(self, state: int) -> Case:
        """Likelihood rule; ties (including unseen states) go to NO."""
        return Case.YES if self.yes.probs[state] > self.no.probs[state] else Case.NO

    def tvd(self) -> float:
        return tvd(self.yes.probs, self.no.probs)


def _smoothed(counts: np.ndarray, trials: int) -> np.ndarray:
    # pseudo-count 1/S per state: additive 1/(trials*S) before renormalising
    S = counts.size
    return (counts + 1.0 / S) / (trials + 1.0)


def reference_tables(
    alg: FiniteStateAutomaton,
    params: HardDistParams,
    j_star: int,
    trials: int,
    rng: np.random.Generator,
    smoothing: bool = True,
) -> ReferenceTables:
    """Tables for S~Y (one more YES phase) and S~N (one NO phase) after j* YES phases."""
    _check_automaton(alg, params)
    S = alg.num_states
    yes_counts = np.zeros(S, dtype=np.int64)
    no_counts = np.zeros(S, dtype=np.int64)
    done = 0
    while done < trials:
        T = min(_CHUNK, trials - done)
        xs = rng.integers(0, 2, size=(T, params.n), dtype=np.int64)
        states = np.zeros(T, dtype=np.int64)
        for _ in range(j_star):
            states = _run_phase_batch(alg, states, params.alpha, Case.YES, xs, rng)
        yes_counts += np.bincount(_run_phase_batch(alg, states, params.alpha, Case.YES, xs, rng), minlength=S)
        no_counts += np.bincount(_run_phase_batch(alg, states, params.alpha, Case.NO, None, rng), minlength=S)
        done += T
    if smoothing:
        py, pn = _smoothed(yes_counts, trials), _smoothed(no_counts, trials)
    else:
        py, pn = yes_counts / trials, no_counts / trials
    return ReferenceTables(
        StateDistribution(j_star + 1, Case.YES, py, trials, yes_counts),
        StateDistribution(j_star + 1, Case.NO, pn, trials, no_counts),
    )


# ---------------------------------------------------------------------------
# The two-party protocol.  Alice sees only x; Bob sees only (G, w).


def _feed(alg: FiniteStateAutomaton, state: int, edges: np.ndarray, rng: np.random.Generator) -> int:
    idx = pair_index(edges[:, 0], edges[:, 1], alg.n)
    for pair in idx[rng.permutation(idx.size)]:
        state = alg.step(state, int(pair))
    return state


def alice_step(
    alg: FiniteStateAutomaton, x: np.ndarray, j_star: int, alpha: float, rng: np.random.Generator
) -> int:
    """Run ``j_star`` simulated YES phases on private ``x``; return the state."""
    state = alg.init(alg.n)
    for _ in range(j_star):
        state = _feed(alg, state, sample_phase(alg.n, alpha, Case.YES, x, rng), rng)
    return state


def bob_step(
    alg: FiniteStateAutomaton,
    state: int,
    G: MultiGraph,
    w: np.ndarray,
    tables: ReferenceTables,
    rng: np.random.Generator,
) -> Case:
    """Feed the edges with ``w_e = 1`` in random order, then apply the likelihood rule."""
    kept = G.edges[np.asarray(w, dtype=bool)]
    return tables.decide(_feed(alg, state, kept, rng))


def dbhp_protocol_run(
    alg: FiniteStateAutomaton,
    j_star: int,
    bhp: BhpInstance,
    tables: ReferenceTables,
    rng: np.random.Generator,
) -> Case:
    state = alice_step(alg, bhp.x, j_star, bhp.alpha, rng)
    return bob_step(alg, state, bhp.G, bhp.w, tables, rng)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdvantageEstimate:
    advantage: float
    radius: float
    correct: int
    trials: int


def advantage_estimate(
    decider: Callable[[object, np.random.Generator], Case],
    sampler: Callable[[np.random.Generator], tuple[object, Case]],
    trials: int,
    rng: np.random.Generator,
    z: float = 1.96,
) -> AdvantageEstimate:
    """Empirical ``Pr[correct] - 1/2`` with a normal-approximation radius."""
    if trials < 1:
        raise ValueError("trials must be positive")
    correct = 0
    for _ in range(trials):
        instance, truth = sampler(rng)
        if Case.parse(decider(instance, rng)) is truth:
            correct += 1
    rate = correct / trials
    radius = z * math.sqrt(max(rate * (1 - rate), 1.0 / trials) / trials)
    return AdvantageEstimate(rate - 0.5, radius, correct, trials)
