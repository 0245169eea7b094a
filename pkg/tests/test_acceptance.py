"""End-to-end acceptance criteria; each test prints one PASS/FAIL line."""

import math
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from streamcut.distributions import Case, HardDistParams, canonical_stream, iid_stream, sample_hard
from streamcut.experiments import ExperimentConfig, run_experiment
from streamcut.fourier import conditional_tvd_check, likelihood_test_advantage, postprocessing_check, tvd
from streamcut.graph import MAX_EXACT_N, is_bipartite, max_cut_exact
from streamcut.rng import substream
from streamcut.streaming import alg_edge_count, alg_random_walk_tester, run

pytestmark = pytest.mark.acceptance


@contextmanager
def criterion(number: int, title: str, limit_s: float):
    start = time.perf_counter()
    details: dict = {}
    ok = False
    try:
        yield details
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        ok = ok and elapsed < limit_s
        extra = " ".join(f"{k}={v}" for k, v in details.items())
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'} {title} ({elapsed:.1f}s < {limit_s:.0f}s) {extra}".rstrip()
        ACCEPTANCE_LINES.append(line)
        print(line)
    assert elapsed < limit_s, f"runtime {elapsed:.1f}s over {limit_s}s"


def _failed(result):
    return sorted(name for name, ok in result.contracts.items() if not ok)


def test_01_gadget_exactness():
    with criterion(1, "gadget max-cut exact and decisions correct", 60) as d:
        res = run_experiment(ExperimentConfig("bhh", n=240, t=(2, 3, 4), trials=1000))
        d["instances"] = len(res.rows)
        assert len(res.rows) == 3 * 2 * 1000
        assert all(r["correct"] and r["max_cut"] == r["expected"] for r in res.rows)
        assert not _failed(res), _failed(res)


def test_02_gap():
    eps = 0.3
    with criterion(2, "YES ratio 1, NO mean ratio decreasing and <= 0.80", 300) as d:
        yes = run_experiment(ExperimentConfig("gap", n=10_000, eps=eps, c_phase=8.0, trials=3, case="yes"))
        assert yes.contracts["yes_ratio_is_one"]
        assert all(r["ratio"] == 1.0 for r in yes.rows)
        means = {}
        for n in (12, 16, 20):
            no = run_experiment(ExperimentConfig("gap", n=n, eps=eps, c_phase=8.0, trials=200, case="no"))
            means[n] = no.summary["mean_ratio_no"]
        d.update({f"mean{n}": f"{v:.4f}" for n, v in means.items()})
        assert means[12] > means[16] > means[20]
        assert means[20] <= 0.80


def test_03_cycles():
    with criterion(3, "Pr[cycle] within 30% of expected count, scaled flat", 300) as d:
        res = run_experiment(ExperimentConfig("cycles", n=10_000, alpha=(0.05, 0.1, 0.2), trials=10_000))
        d["ratios"] = ";".join(f"{r['ratio']:.3f}" for r in res.rows)
        d["flatness"] = f"{res.summary['flatness']:.3f}"
        assert all(r["trials_run"] >= 10_000 for r in res.rows)
        assert all(abs(r["ratio"] - 1) <= 0.3 for r in res.rows)
        assert res.summary["flatness"] <= 3
        assert not _failed(res), _failed(res)


def _fourier_run():
    return run_experiment(ExperimentConfig("fourier", n=12, trials=200))


@pytest.fixture(scope="module")
def fourier_result():
    start = time.perf_counter()
    res = _fourier_run()
    return res, time.perf_counter() - start


def _rows(res, check):
    return [r for r in res.rows if r["check"] == check]


def test_04_fourier_identity_and_chain(fourier_result):
    res, base = fourier_result
    with criterion(4, "Fourier identity, Parseval and Cauchy-Schwarz chain", 60 - base) as d:
        cases = {r["trial"] for r in _rows(res, "identity")}
        d["cases"] = len(cases)
        assert len(cases) >= 200
        assert all(r["dim"] <= 12 and r["rows"] <= 8 for r in _rows(res, "identity"))
        for check in ("identity", "parseval", "chain_cauchy_schwarz", "chain_parseval"):
            assert all(r["pass"] for r in _rows(res, check)), check
        assert max(r["value"] for r in _rows(res, "identity")) <= 1e-10


def test_05_weight_mass(fourier_result):
    res, base = fourier_result
    with criterion(5, "weight-level Fourier mass bound, zero violations", 60 - base) as d:
        rows = _rows(res, "weight_mass")
        sets = {r["trial"] for r in rows}
        d["sets"] = len(sets)
        d["levels"] = len(rows)
        assert len(sets) >= 100
        assert all(r["value"] <= r["reference"] for r in rows)


def test_06_solution_structure(fourier_result):
    res, base = fourier_result
    with criterion(6, "solution cosets: parity, size, odd weights empty", 60 - base) as d:
        checks = ("solutions_parity", "solutions_coset_size", "solutions_odd_weight_empty", "solutions_decomposition")
        graphs = {r["trial"] for r in _rows(res, checks[0])}
        d["graphs"] = len(graphs)
        assert len(graphs) >= 100
        assert all(r["rows"] <= 14 for r in _rows(res, checks[0]))
        for check in checks:
            assert all(r["pass"] for r in _rows(res, check)), check


def test_07_distinguishing_identities():
    rng = substream(0, "acceptance", "identities")
    with criterion(7, "likelihood test, conditional TVD, post-processing", 60) as d:
        for _ in range(200):
            size = int(rng.integers(1, 9))
            a, b = rng.integers(0, 50, size=(2, size)) + 1
            p = np.array([Fraction(int(v), int(a.sum())) for v in a], dtype=object)
            q = np.array([Fraction(int(v), int(b.sum())) for v in b], dtype=object)
            adv, half = likelihood_test_advantage(p, q)
            assert adv == half == tvd(p, q) / 2
        worst_cond = worst_post = 0.0
        for _ in range(200):
            nx, ny, nw, nout = (int(v) for v in rng.integers(1, 5, size=4))
            px = rng.dirichlet(np.ones(nx))
            j1 = px[:, None] * rng.dirichlet(np.ones(ny), size=nx)
            j2 = px[:, None] * rng.dirichlet(np.ones(ny), size=nx)
            lhs, rhs = conditional_tvd_check(j1, j2)
            worst_cond = max(worst_cond, abs(lhs - rhs))
            X, Y, W = rng.dirichlet(np.ones(nx)), rng.dirichlet(np.ones(nx)), rng.dirichlet(np.ones(nw))
            after, before = postprocessing_check(X, Y, W, rng.integers(0, nout, size=(nx, nw)))
            worst_post = max(worst_post, after - before)
        d["cond_gap"] = f"{worst_cond:.1e}"
        d["post_excess"] = f"{worst_post:.1e}"
        assert worst_cond <= 1e-10
        assert worst_post <= 1e-10


def test_08_ordering():
    n = 10_000
    with criterion(8, "no triple edges at alpha=1/ln n, collision fraction flat", 300) as d:
        tail = run_experiment(ExperimentConfig("ordering", n=n, alpha=(1 / math.log(n),), trials=10_000))
        d["mult3"] = tail.rows[0]["mult3_instances"]
        assert tail.rows[0]["instances"] == 10_000
        assert tail.rows[0]["mult3_instances"] == 0
        grid = run_experiment(ExperimentConfig("ordering", n=n, alpha=(0.02, 0.05, 0.1), trials=2_000))
        d["flatness"] = f"{grid.summary['flatness']:.3f}"
        assert grid.summary["flatness"] <= 3


def test_09_streaming_algorithms():
    with criterion(9, "edge-count bounds, walk tester one-sided and detects triangles", 120) as d:
        checked = 0
        for n in (8, 12, 16, 20, 2_000):
            params = HardDistParams(n, 0.3, 0.5, k_override=6)
            for case in Case:
                for i in range(5):
                    rng = substream(0, "acceptance", "edge-count", n, case.value, i)
                    inst = sample_hard(params, case, rng)
                    G = inst.union
                    if n <= MAX_EXACT_N:
                        opt = max_cut_exact(G)[0]
                    elif is_bipartite(G) is not None:
                        opt = G.m
                    else:
                        continue
                    out = run(alg_edge_count(), canonical_stream(inst, rng), n).output
                    assert opt / 2 <= out <= opt
                    checked += 1
        d["edge_count_instances"] = checked

        false_no = 0
        params = HardDistParams(200, 0.3, 0.5)
        for i in range(1000):
            rng = substream(0, "acceptance", "walk-yes", i)
            stream = iid_stream(params, "yes", 2_000, rng)
            false_no += run(alg_random_walk_tester(rng=rng), stream, 200).output is Case.NO
        d["false_no"] = false_no
        assert false_no == 0

        triangle = np.array([(0, 1), (1, 2), (0, 2)])
        hits = 0
        for i in range(100):
            rng = substream(0, "acceptance", "walk-triangle", i)
            stream = triangle[rng.integers(0, 3, size=300)]
            hits += run(alg_random_walk_tester(W=2, L=16, rng=rng), stream.tolist(), 3).output is Case.NO
        d["triangle_hits"] = hits
        assert hits >= 90


def test_10_protocol_advantage():
    with criterion(10, "informative index telescopes, protocol advantage >= tvd/2 - 0.05", 300) as d:
        res = run_experiment(ExperimentConfig("advantage", trials=10_000))
        entry = res.summary["seen-pairs-x4"]
        report, est = entry["report"], entry["advantage"]
        d["states"] = 256
        d["j_star"] = report.j_star
        d["advantage"] = f"{est.advantage:.4f}"
        d["target"] = f"{float(entry['table_tvd']) / 2 - 0.05:.4f}"
        assert est.trials == 10_000
        assert report.telescopes
        assert sum(report.increments) == report.tvds[-1] - report.tvds[0]
        assert est.advantage >= entry["table_tvd"] / 2 - 0.05
        assert not _failed(res), _failed(res)
