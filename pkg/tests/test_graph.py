from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import naive_max_cut
from streamcut.graph import (
    MultiGraph,
    SizeLimitError,
    all_cut_values,
    as_bits,
    beta_distance,
    classify_components,
    cut_value,
    gf2_apply,
    gf2_apply_transpose,
    incidence,
    is_bipartite,
    max_cut_exact,
    odd_components,
    two_core,
    weight,
)
from streamcut.distributions import sample_gnp

TRIANGLE = MultiGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
K4 = MultiGraph.from_edges(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])


def cycle(L: int) -> MultiGraph:
    return MultiGraph.from_edges(L, [(i, (i + 1) % L) for i in range(L)])


@st.composite
def multigraphs(draw, max_n=8, max_m=16):
    n = draw(st.integers(2, max_n))
    m = draw(st.integers(0, max_m))
    edges = []
    for _ in range(m):
        u = draw(st.integers(0, n - 1))
        v = draw(st.integers(0, n - 2))
        edges.append((u, v + (v >= u)))
    return MultiGraph.from_edges(n, edges)


def test_construction_rejects_bad_edges():
    with pytest.raises(ValueError):
        MultiGraph.from_edges(3, [(0, 0)])
    with pytest.raises(ValueError):
        MultiGraph.from_edges(3, [(0, 3)])
    G = MultiGraph.from_edges(3, [(2, 0)])
    assert G.edges.tolist() == [[0, 2]]
    with pytest.raises(ValueError):
        G.edges[0, 0] = 1


def test_bits_validation():
    with pytest.raises(ValueError, match="dimension mismatch"):
        as_bits([0, 1], 3)
    with pytest.raises(ValueError):
        as_bits([0, 2])
    assert weight(as_bits([1, 0, 1])) == 2


def test_cut_value_examples():
    assert cut_value(TRIANGLE, [0, 0, 1]) == 2
    assert cut_value(MultiGraph.empty(4), [0, 1, 1, 0]) == 0
    assert cut_value(MultiGraph.from_edges(2, [(0, 1)] * 3), [0, 1]) == 3
    with pytest.raises(ValueError):
        cut_value(TRIANGLE, [0, 1])


def test_max_cut_examples():
    assert max_cut_exact(cycle(5))[0] == 4
    assert max_cut_exact(K4)[0] == 4


def test_max_cut_matches_independent_enumeration_on_seeded_gnp():
    rng = np.random.default_rng(7)
    G = sample_gnp(8, 4.0, rng)
    value, witness = max_cut_exact(G)
    assert value == naive_max_cut(8, G.edges.tolist())
    assert cut_value(G, witness) == value
    assert witness[0] == 0


def test_witness_is_lexicographically_smallest():
    # path 0-1-2: optimal x are 010 and 101; vertex 0 fixed to P leaves 010
    G = MultiGraph.from_edges(3, [(0, 1), (1, 2)])
    assert max_cut_exact(G)[1].tolist() == [0, 1, 0]
    # empty graph: every x ties, smallest is all zeros
    assert max_cut_exact(MultiGraph.empty(4))[1].tolist() == [0, 0, 0, 0]
    # C4 with a chord-free layout: 0101 is the only optimum with x0 = 0
    assert max_cut_exact(cycle(4))[1].tolist() == [0, 1, 0, 1]


def test_size_limit():
    with pytest.raises(SizeLimitError):
        all_cut_values(MultiGraph.empty(25))


@given(multigraphs())
def test_max_cut_against_oracle(G):
    value, x = max_cut_exact(G)
    assert value == naive_max_cut(G.n, G.edges.tolist())
    assert cut_value(G, x) == value
    assert 2 * value >= G.m


@given(multigraphs(max_n=7))
def test_all_cut_values_indexing(G):
    cuts = all_cut_values(G)
    for y in range(0, cuts.size, max(1, cuts.size // 7)):
        x = [0] + [(y >> (u - 1)) & 1 for u in range(1, G.n)]
        assert cuts[y] == cut_value(G, x)


def test_is_bipartite_examples():
    x = is_bipartite(cycle(4))
    assert x is not None and cut_value(cycle(4), x) == 4
    assert is_bipartite(cycle(5)) is None
    forest = MultiGraph.from_edges(6, [(0, 1), (1, 2), (3, 4)])
    assert is_bipartite(forest) is not None


@given(multigraphs())
def test_bipartite_iff_max_cut_is_m(G):
    if G.m == 0:
        return
    x = is_bipartite(G)
    assert (x is not None) == (max_cut_exact(G)[0] == G.m)
    if x is not None:
        assert cut_value(G, x) == G.m


@pytest.mark.parametrize("L", range(3, 10))
def test_cycle_max_cut(L):
    assert max_cut_exact(cycle(L))[0] == (L if L % 2 == 0 else L - 1)


def test_beta_distance_examples():
    assert beta_distance(cycle(4)) == 0
    assert beta_distance(cycle(5)) == Fraction(1, 5)
    assert beta_distance(K4) == Fraction(1, 3)
    # two parallel edges are bipartite
    assert beta_distance(MultiGraph.from_edges(2, [(0, 1), (0, 1)])) == 0
    with pytest.raises(ValueError):
        beta_distance(MultiGraph.empty(3))


@given(multigraphs())
def test_beta_distance_range(G):
    if G.m:
        assert 0 <= beta_distance(G) <= Fraction(1, 2)


def test_classify_examples():
    path = MultiGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert (classify_components(path).tree, classify_components(path).unicyclic) == (1, 0)
    c = classify_components(TRIANGLE)
    assert (c.tree, c.unicyclic, c.complex) == (0, 1, 0)
    c = classify_components(K4)
    assert (c.tree, c.unicyclic, c.complex) == (0, 0, 1)
    # parallel pair is a unicyclic component
    assert classify_components(MultiGraph.from_edges(3, [(0, 1), (0, 1)])).unicyclic == 1


@given(multigraphs())
def test_classify_totals(G):
    counts = classify_components(G)
    from streamcut.graph import component_labels

    assert counts.total == component_labels(G)[0]
    assert 1 <= counts.largest <= G.n


def test_gf2_examples():
    M = incidence(MultiGraph.from_edges(2, [(0, 1)]))
    assert gf2_apply(M, [1, 0]).tolist() == [1]
    M = incidence(TRIANGLE)
    assert gf2_apply(M, [1, 0, 0]).tolist() == [1, 0, 1]
    assert gf2_apply(M, [0, 0, 0]).tolist() == [0, 0, 0]
    assert gf2_apply_transpose(M, [1, 1, 1]).tolist() == [0, 0, 0]
    assert gf2_apply_transpose(M, [0, 0, 0]).tolist() == [0, 0, 0]
    path = incidence(MultiGraph.from_edges(3, [(0, 1), (1, 2)]))
    assert gf2_apply_transpose(path, [1, 1]).tolist() == [1, 0, 1]


@given(multigraphs(), st.data())
def test_gf2_properties(G, data):
    M = incidence(G)
    x = np.array(data.draw(st.lists(st.integers(0, 1), min_size=G.n, max_size=G.n)), dtype=np.uint8)
    s = np.array(data.draw(st.lists(st.integers(0, 1), min_size=G.m, max_size=G.m)), dtype=np.uint8)
    assert weight(gf2_apply(M, x)) == cut_value(G, x)
    assert weight(gf2_apply_transpose(M, s)) % 2 == 0
    # adjointness over GF(2): <Mx, s> = <x, M^T s>
    assert int(gf2_apply(M, x) @ s) % 2 == int(x @ gf2_apply_transpose(M, s)) % 2
    assert np.array_equal(M.dense().T.astype(int) @ s % 2, gf2_apply_transpose(M, s))


def test_odd_components_and_core():
    G = MultiGraph.from_edges(8, [(0, 1), (1, 2), (0, 2), (2, 3), (4, 5), (5, 6), (6, 7), (7, 4)])
    ncomp, labels, odd = odd_components(G)
    assert ncomp == 2
    assert odd[labels[0]] and not odd[labels[4]]
    assert two_core(G).tolist() == [True, True, True, False, True, True, True, True]
