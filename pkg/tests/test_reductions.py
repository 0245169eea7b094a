from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from streamcut.distributions import BhhInstance, Case, HardDistParams, num_pairs, sample_bhh, sample_bhp
from streamcut.fourier import likelihood_test_advantage
from streamcut.graph import is_bipartite, max_cut_exact
from streamcut.reductions import (
    A, B, C, D,
    advantage_estimate,
    alice_step,
    bhh_alice_edges,
    bhh_bob_edges,
    bhh_build,
    bhh_decide,
    bob_step,
    dbhp_protocol_run,
    estimate_state_distribution,
    find_informative_index,
    gadget_cycle_lengths,
    gadget_max_cut,
    gadget_structure,
    reference_tables,
    state_trajectories,
    vertex,
)
from streamcut.rng import substream
from streamcut.streaming import edge_count_automaton, identity_automaton, seen_pairs_automaton


def test_alice_edges():
    e = bhh_alice_edges([0, 1])
    assert e.shape == (6, 2)
    a0, b0, c0, d0 = (vertex(0, r) for r in (A, B, C, D))
    a1, b1, c1, d1 = (vertex(1, r) for r in (A, B, C, D))
    assert e[:3].tolist() == [[a0, b0], [c0, d0], [a0, d0]]
    assert e[3:].tolist() == [[a1, b1], [c1, d1], [a1, c1]]


def test_bob_edges_chain_and_closing():
    blocks = np.array([[2, 0, 1], [3, 5, 4]])
    e = bhh_bob_edges(blocks, [0, 1])
    assert e.shape == (6, 2)
    assert e[:3].tolist() == [[vertex(0, D), vertex(1, A)], [vertex(1, D), vertex(2, A)], [vertex(2, D), vertex(0, A)]]
    assert e[5].tolist() == [vertex(5, D), vertex(3, B)]


def test_t2_cycle_lengths_follow_parity_formula():
    x = np.array([0, 1, 1, 1], dtype=np.uint8)
    blocks = np.array([[0, 1], [2, 3]])
    for w in ([0, 0], [1, 0], [0, 1], [1, 1]):
        inst = BhhInstance(4, 2, x, blocks, np.array(w, dtype=np.uint8), Case.YES)
        lengths = gadget_cycle_lengths(bhh_build(inst))
        expected = 4 + np.array(w) + x[blocks].sum(axis=1)
        assert lengths.tolist() == expected.tolist()


@pytest.mark.parametrize("n,t", [(4, 2), (8, 2), (6, 3), (8, 4), (240, 4)])
def test_gadget_structure_and_closed_form(n, t):
    rng = np.random.default_rng(n * 10 + t)
    for case in Case:
        for _ in range(5):
            inst = sample_bhh(n, t, case, rng)
            g = bhh_build(inst)
            st_ = gadget_structure(g)
            assert g.m == 4 * n
            assert st_.components == n // t
            assert set(st_.vertices_per_component) == {4 * t}
            assert set(st_.edges_per_component) == {4 * t}
            lengths = gadget_cycle_lengths(g)
            assert np.array_equal(lengths % 2 == 0, inst.parities() == inst.w)
            expected = 4 * n if case is Case.YES else 4 * n - n // t
            assert st_.max_cut == expected
            assert (is_bipartite(g.graph) is not None) == (case is Case.YES)


@pytest.mark.parametrize("n,t", [(4, 2), (6, 3)])
def test_closed_form_matches_exhaustive_search(n, t):
    rng = np.random.default_rng(5)
    for case in Case:
        for _ in range(2 if n * 4 > 20 else 6):
            g = bhh_build(sample_bhh(n, t, case, rng))
            assert gadget_max_cut(g) == max_cut_exact(g.graph)[0]


def test_adversarial_stream_order():
    g = bhh_build(sample_bhh(8, 2, "no", np.random.default_rng(0)))
    s = g.adversarial_stream()
    assert s.phase_sizes == (24, 8)
    assert np.array_equal(s.segments()[0], g.alice_edges)
    assert np.array_equal(s.segments()[1], g.bob_edges)


def test_decide_examples():
    assert bhh_decide(8 * 4, 8, 2) is Case.YES
    for t in (2, 3, 4, 5):
        n = 12 * t
        assert bhh_decide(4 * n - n // t, n, t) is Case.NO
        assert bhh_decide(Fraction(4 * n) * (1 - Fraction(1, 4 * t)), n, t) is Case.NO
        assert bhh_decide(4 * n - n / t + 0.5, n, t) is Case.YES


SMALL = HardDistParams(4, 0.5, 0.9, c_phase=2.0)


def test_phase_zero_is_point_mass():
    alg = seen_pairs_automaton(4, 4)
    d = estimate_state_distribution(alg, SMALL, "yes", 0, 100, np.random.default_rng(0))
    assert d.probs[0] == 1.0 and d.probs.sum() == 1.0


def _exact_count_law(params, case, j, capacity):
    n, p = params.n, params.alpha / params.n
    law = np.zeros(capacity)
    if case is Case.YES:
        for ones in range(n + 1):
            weight = stats.binom.pmf(ones, n, 0.5)
            total = j * ones * (n - ones)
            pmf = stats.binom.pmf(np.arange(total + 1), total, p)
            np.add.at(law, np.arange(total + 1) % capacity, weight * pmf)
    else:
        total = j * num_pairs(n)
        pmf = stats.binom.pmf(np.arange(total + 1), total, p / 2)
        np.add.at(law, np.arange(total + 1) % capacity, pmf)
    return law


@pytest.mark.parametrize("case", list(Case))
def test_edge_count_state_law_matches_binomial_mixture(case):
    params = HardDistParams(6, 0.5, 0.8, k_override=5)
    alg = edge_count_automaton(6, 5)
    for j in (1, 3, 5):
        d = estimate_state_distribution(alg, params, case, j, 100_000, substream(0, "law", case.value, j))
        exact = _exact_count_law(params, case, j, 5)
        assert 0.5 * np.abs(d.probs - exact).sum() <= 0.01


def test_independent_estimates_agree():
    alg = edge_count_automaton(4, 4)
    a = estimate_state_distribution(alg, SMALL, "no", 3, 100_000, substream(1, "a"))
    b = estimate_state_distribution(alg, SMALL, "no", 3, 100_000, substream(1, "b"))
    assert 0.5 * np.abs(a.probs - b.probs).sum() <= 0.02


def test_state_cap_and_type_checks():
    with pytest.raises(TypeError):
        state_trajectories(object(), SMALL, "yes", 10, np.random.default_rng(0))
    with pytest.raises(ValueError):
        state_trajectories(edge_count_automaton(5, 2), SMALL, "yes", 10, np.random.default_rng(0))


def test_informative_index_oblivious():
    rep = find_informative_index(identity_automaton(4), SMALL, 1000, np.random.default_rng(0))
    assert all(v == 0 for v in rep.tvds) and rep.delta == 0 and rep.j_star == 0
    assert rep.telescopes


def test_informative_index_hybrid_guarantee():
    rep = find_informative_index(seen_pairs_automaton(4, 4), SMALL, 5000, np.random.default_rng(2))
    assert rep.telescopes
    assert rep.delta >= rep.c_dist / rep.k
    assert sum(rep.increments) == rep.tvds[-1]


def test_reference_tables_smoothing_and_ties():
    alg = seen_pairs_automaton(4, 4)
    tables = reference_tables(alg, SMALL, 1, 2000, np.random.default_rng(3))
    assert np.all(tables.yes.probs > 0) and abs(tables.yes.probs.sum() - 1) < 1e-9
    unseen = int(np.flatnonzero((tables.yes.counts == 0) & (tables.no.counts == 0))[0])
    assert tables.decide(unseen) is Case.NO


def test_protocol_roles_are_separated():
    alg = seen_pairs_automaton(4, 4)
    tables = reference_tables(alg, SMALL, 1, 2000, np.random.default_rng(4))
    rng = np.random.default_rng(5)
    x = np.array([0, 1, 0, 1], dtype=np.uint8)
    state = alice_step(alg, x, 3, SMALL.alpha, rng)
    # Alice's simulated phases only use edges crossing x
    mask = state // 4
    pairs = [(u, v) for u in range(4) for v in range(u + 1, 4)]
    assert all(x[pairs[i][0]] != x[pairs[i][1]] for i in range(6) if mask >> i & 1)
    bhp = sample_bhp(4, SMALL.alpha, "yes", rng)
    assert bob_step(alg, state, bhp.G, bhp.w, tables, rng) in (Case.YES, Case.NO)


def test_protocol_advantage_tracks_table_distance():
    alg = seen_pairs_automaton(4, 4)
    rep = find_informative_index(alg, SMALL, 20_000, substream(6, "idx"))
    tables = reference_tables(alg, SMALL, rep.j_star, 50_000, substream(6, "tab"))
    exact_adv, half_tvd = likelihood_test_advantage(tables.yes.probs, tables.no.probs)
    assert exact_adv == pytest.approx(half_tvd)

    def sampler(r):
        case = Case.YES if r.random() < 0.5 else Case.NO
        return sample_bhp(4, SMALL.alpha, case, r), case

    est = advantage_estimate(lambda b, r: dbhp_protocol_run(alg, rep.j_star, b, tables, r), sampler, 3000, substream(6, "run"))
    assert est.advantage >= half_tvd - 0.05


def test_advantage_estimate_examples():
    rng = np.random.default_rng(0)

    def bhh_sampler(r):
        case = Case.YES if r.random() < 0.5 else Case.NO
        return sample_bhh(24, 3, case, r), case

    exact = advantage_estimate(lambda inst, r: bhh_decide(gadget_max_cut(bhh_build(inst)), 24, 3), bhh_sampler, 300, rng)
    assert exact.advantage == 0.5
    guess = advantage_estimate(lambda inst, r: Case.YES if r.random() < 0.5 else Case.NO, bhh_sampler, 4000, rng)
    assert abs(guess.advantage) <= 2 * guess.radius
