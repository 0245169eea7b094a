"""Single-pass streaming algorithms with measured state size.

An algorithm is an object with ``init(n)``, ``process(state, edge)``,
``finish(state)`` and ``state_bits(state)``.  :func:`run` folds a stream
through it and records the peak serialized state size; exceeding a declared
budget is flagged, not enforced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

import numpy as np

from .distributions import Case, num_pairs, pair_index
from .graph import MAX_EXACT_N, MultiGraph, SizeLimitError, is_bipartite, max_cut_exact

Edge = tuple[int, int]

#: Largest explicit automaton accepted by :class:`FiniteStateAutomaton`.
MAX_STATES = 2**12


def _bits_for(count: int) -> int:
    """Bits needed to write one of ``count`` values."""
    return max(1, math.ceil(math.log2(count))) if count > 1 else 1


class StreamAlgorithm:
    name = "abstract"

    def init(self, n: int) -> Any:
        raise NotImplementedError

    def process(self, state: Any, edge: Edge) -> Any:
        raise NotImplementedError

    def finish(self, state: Any) -> Any:
        raise NotImplementedError

    def state_bits(self, state: Any) -> int:
        raise NotImplementedError

    def params(self) -> dict:
        return {}


@dataclass
class RunResult:
    output: Any
    peak_bits: int
    budget_bits: Optional[int] = None
    budget_exceeded: bool = False
    final_state: Any = None


def run(
    alg: StreamAlgorithm,
    stream: Iterable[Edge],
    n: int,
    budget_bits: Optional[int] = None,
) -> RunResult:
    state = alg.init(n)
    peak = alg.state_bits(state)
    for u, v in stream:
        state = alg.process(state, (int(u), int(v)))
        peak = max(peak, alg.state_bits(state))
    exceeded = budget_bits is not None and peak > budget_bits
    return RunResult(alg.finish(state), peak, budget_bits, exceeded, state)


# ---------------------------------------------------------------------------


class EdgeCount(StreamAlgorithm):
    """Count edges and report ``m / 2``: always within [OPT/2, OPT]."""

    name = "edge-count"

    def init(self, n: int) -> int:
        return 0

    def process(self, state: int, edge: Edge) -> int:
        return state + 1

    def finish(self, state: int) -> float:
        return state / 2

    def state_bits(self, state: int) -> int:
        return max(1, int(state).bit_length())


def alg_edge_count() -> EdgeCount:
    return EdgeCount()


# ---------------------------------------------------------------------------


@dataclass
class WalkState:
    n: int
    length: int
    position: list[int]
    steps: list[int]
    even: list[set[int]]
    odd: list[set[int]]
    at: dict[int, list[int]] = field(default_factory=dict)
    odd_cycle: bool = False

    @property
    def walkers(self) -> int:
        return len(self.position)


class RandomWalkTester(StreamAlgorithm):
    """Bipartiteness tester that runs random walks on an i.i.d. edge stream.

    Each walker sits on a vertex and steps across the next stream edge
    incident on it, for at most ``L`` steps.  Vertices are filed by the parity
    of the step at which they were reached; a vertex in both files is an
    odd-cycle witness and the output becomes NO.  Bipartite inputs can never
    produce a witness.  A walk of length L touches at most L+1 vertices, so
    the parity sets are stored exactly.
    """

    name = "random-walk"

    def __init__(self, walkers: Optional[int], length: Optional[int], rng: np.random.Generator):
        self.walkers = walkers
        self.length = length
        self.rng = rng

    def resolved(self, n: int) -> tuple[int, int]:
        W = self.walkers if self.walkers is not None else math.ceil(math.sqrt(n))
        L = self.length if self.length is not None else math.ceil(math.log(max(n, 2)) ** 2)
        return W, L

    def init(self, n: int) -> WalkState:
        W, L = self.resolved(n)
        starts = [int(s) for s in self.rng.integers(0, n, size=W)]
        at: dict[int, list[int]] = {}
        for i, s in enumerate(starts):
            at.setdefault(s, []).append(i)
        return WalkState(n, L, starts, [0] * W, [{s} for s in starts], [set() for _ in starts], at)

    def process(self, state: WalkState, edge: Edge) -> WalkState:
        u, v = edge
        movers = [(i, v) for i in state.at.get(u, ())] + [(i, u) for i in state.at.get(v, ())]
        for i, dest in movers:
            if state.steps[i] >= state.length:
                continue
            src = state.position[i]
            state.at[src].remove(i)
            if not state.at[src]:
                del state.at[src]
            state.position[i] = dest
            state.steps[i] += 1
            state.at.setdefault(dest, []).append(i)
            mine, other = (state.even[i], state.odd[i]) if state.steps[i] % 2 == 0 else (state.odd[i], state.even[i])
            mine.add(dest)
            if dest in other:
                state.odd_cycle = True
        return state

    def finish(self, state: WalkState) -> Case:
        return Case.NO if state.odd_cycle else Case.YES

    def state_bits(self, state: WalkState) -> int:
        vbits = _bits_for(state.n)
        sbits = _bits_for(state.length + 1)
        stored = sum(len(a) + len(b) for a, b in zip(state.even, state.odd))
        return state.walkers * (vbits + sbits) + stored * vbits + 1

    def params(self) -> dict:
        return {"walkers": self.walkers, "length": self.length}


def alg_random_walk_tester(
    W: Optional[int] = None, L: Optional[int] = None, rng: Optional[np.random.Generator] = None
) -> RandomWalkTester:
    return RandomWalkTester(W, L, rng if rng is not None else np.random.default_rng())


# ---------------------------------------------------------------------------


def reservoir_step(reservoir: list, item: Any, seen: int, draw: Optional[int], size: int) -> None:
    """Algorithm R update for the ``seen``-th item (1-based).

    ``draw`` is a uniform integer in ``[0, seen)``; it is ignored while the
    reservoir is filling.
    """
    if len(reservoir) < size:
        reservoir.append(item)
    elif draw is not None and draw < size:
        reservoir[draw] = item


@dataclass
class ReservoirState:
    n: int
    seen: int
    sample: list


class ReservoirMaxCut(StreamAlgorithm):
    """Uniform edge reservoir; estimate = exact max-cut of the sample times m/s.

    A simplified stand-in for a cut sparsifier, not one: it only preserves
    cuts in expectation.  Exact once the reservoir holds the whole stream.
    """

    name = "reservoir"

    def __init__(self, size: int, rng: np.random.Generator):
        if size < 1:
            raise ValueError("reservoir size must be positive")
        self.size = size
        self.rng = rng

    def init(self, n: int) -> ReservoirState:
        if min(n, 2 * self.size) > MAX_EXACT_N:
            raise SizeLimitError(
                f"reservoir of {self.size} edges on n={n} may touch more than {MAX_EXACT_N} vertices"
            )
        return ReservoirState(n, 0, [])

    def process(self, state: ReservoirState, edge: Edge) -> ReservoirState:
        state.seen += 1
        draw = int(self.rng.integers(0, state.seen)) if state.seen > self.size else None
        reservoir_step(state.sample, edge, state.seen, draw, self.size)
        return state

    def finish(self, state: ReservoirState) -> float:
        if state.seen == 0:
            return 0.0
        edges = np.array(state.sample, dtype=np.int64)
        touched, relabeled = np.unique(edges, return_inverse=True)
        sample = MultiGraph(touched.size, relabeled.reshape(-1, 2))
        value, _ = max_cut_exact(sample)
        return value * state.seen / len(state.sample)

    def state_bits(self, state: ReservoirState) -> int:
        return len(state.sample) * 2 * _bits_for(state.n) + max(1, state.seen.bit_length())

    def params(self) -> dict:
        return {"size": self.size}


def alg_reservoir_maxcut(s: int, rng: Optional[np.random.Generator] = None) -> ReservoirMaxCut:
    return ReservoirMaxCut(s, rng if rng is not None else np.random.default_rng())


# ---------------------------------------------------------------------------


class FiniteStateAutomaton(StreamAlgorithm):
    """Deterministic automaton over the C(n,2) edge alphabet.

    ``table[state, pair]`` is the next state (``-1`` = undefined) where
    ``pair`` is the lexicographic index of the edge; state 0 is initial.
    """

    def __init__(self, n: int, table: np.ndarray, outputs: Sequence[Any], name: str = "automaton"):
        table = np.asarray(table, dtype=np.int64)
        if table.ndim != 2 or table.shape[1] != num_pairs(n):
            raise ValueError(f"table must have shape (states, {num_pairs(n)})")
        states = table.shape[0]
        if states > MAX_STATES:
            raise SizeLimitError(f"automaton has {states} states, cap is {MAX_STATES}")
        if table.max(initial=0) >= states or table.min(initial=0) < -1:
            raise ValueError("transition targets must be states or -1")
        if len(outputs) != states:
            raise ValueError("need one output per state")
        self.n = n
        self.table = table
        self.outputs = list(outputs)
        self.name = name

    @property
    def num_states(self) -> int:
        return self.table.shape[0]

    def init(self, n: int) -> int:
        if n != self.n:
            raise ValueError(f"automaton built for n={self.n}, stream has n={n}")
        return 0

    def step(self, state: int, pair: int) -> int:
        nxt = int(self.table[state, pair])
        if nxt < 0:
            raise KeyError(f"undefined transition from state {state} on edge index {pair}")
        return nxt

    def process(self, state: int, edge: Edge) -> int:
        return self.step(state, int(pair_index(edge[0], edge[1], self.n)))

    def step_many(self, states: np.ndarray, pairs: np.ndarray, active: np.ndarray) -> np.ndarray:
        """Vectorised step of many runs; inactive runs keep their state."""
        nxt = self.table[states, pairs]
        if np.any(active & (nxt < 0)):
            raise KeyError("undefined transition in batched run")
        return np.where(active, nxt, states)

    def finish(self, state: int) -> Any:
        return self.outputs[state]

    def state_bits(self, state: int) -> int:
        return _bits_for(self.num_states)

    def params(self) -> dict:
        return {"states": self.num_states}


def alg_finite_state(n: int, table: np.ndarray, outputs: Sequence[Any], name: str = "automaton") -> FiniteStateAutomaton:
    return FiniteStateAutomaton(n, table, outputs, name)


def identity_automaton(n: int) -> FiniteStateAutomaton:
    """One state; ignores its input."""
    return FiniteStateAutomaton(n, np.zeros((1, num_pairs(n)), dtype=np.int64), [Case.YES], "identity")


def edge_count_automaton(n: int, capacity: int) -> FiniteStateAutomaton:
    """State = number of edges seen, modulo ``capacity``."""
    s = np.arange(capacity)
    table = np.repeat(((s + 1) % capacity)[:, None], num_pairs(n), axis=1)
    return FiniteStateAutomaton(n, table, list(range(capacity)), f"count-mod-{capacity}")


def crossing_parity_automaton(n: int, x: Sequence[int]) -> FiniteStateAutomaton:
    """State = parity of the number of edges crossing the fixed bipartition ``x``."""
    x = np.asarray(x, dtype=np.int64)
    pairs = np.array([(u, v) for u in range(n) for v in range(u + 1, n)], dtype=np.int64).reshape(-1, 2)
    crosses = (x[pairs[:, 0]] ^ x[pairs[:, 1]]) if pairs.size else np.zeros(0, np.int64)
    table = np.stack([crosses, 1 - crosses])
    return FiniteStateAutomaton(n, table, [0, 1], "crossing-parity")


def noncrossing_counter_automaton(n: int, x: Sequence[int], cap: int) -> FiniteStateAutomaton:
    """Saturating count of edges that do not cross a planted bipartition ``x``."""
    x = np.asarray(x, dtype=np.int64)
    pairs = np.array([(u, v) for u in range(n) for v in range(u + 1, n)], dtype=np.int64).reshape(-1, 2)
    same = x[pairs[:, 0]] == x[pairs[:, 1]]
    s = np.arange(cap)
    table = np.where(same[None, :], np.minimum(s + 1, cap - 1)[:, None], s[:, None])
    outputs = [Case.YES] + [Case.NO] * (cap - 1)
    return FiniteStateAutomaton(n, table, outputs, f"noncrossing-{cap}")


def seen_pairs_automaton(n: int, counter: int = 1) -> FiniteStateAutomaton:
    """Remembers which vertex pairs have appeared, plus an edge count mod ``counter``.

    State ``mask * counter + c``.  The output is YES iff the seen pairs form a
    bipartite graph.  With n = 4 and counter = 4 this is a 256-state machine.
    """
    N = num_pairs(n)
    if (2**N) * counter > MAX_STATES:
        raise SizeLimitError("seen-pairs automaton too large")
    masks = np.arange(2**N)
    c = np.arange(counter)
    pair_bits = 1 << np.arange(N)
    next_mask = masks[:, None] | pair_bits[None, :]
    table = (next_mask[:, None, :] * counter + ((c + 1) % counter)[None, :, None]).reshape(-1, N)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    outputs = []
    for mask in masks:
        G = MultiGraph.from_edges(n, [pairs[i] for i in range(N) if mask >> i & 1])
        verdict = Case.YES if is_bipartite(G) is not None else Case.NO
        outputs.extend([verdict] * counter)
    return FiniteStateAutomaton(n, table, outputs, f"seen-pairs-x{counter}")


ALGORITHMS: dict[str, Callable[..., StreamAlgorithm]] = {
    "edge-count": lambda rng=None, **kw: alg_edge_count(),
    "random-walk": lambda rng=None, walkers=None, length=None, **kw: alg_random_walk_tester(walkers, length, rng),
    "reservoir": lambda rng=None, size=64, **kw: alg_reservoir_maxcut(size, rng),
}
