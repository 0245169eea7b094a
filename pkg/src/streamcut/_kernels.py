"""Compiled inner loops for large Monte Carlo sweeps."""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True)
def _find(parent: np.ndarray, a: int) -> int:
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


@numba.njit(cache=True)
def _splitmix(state: np.ndarray) -> np.uint64:
    state[0] += np.uint64(0x9E3779B97F4A7C15)
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@numba.njit(cache=True)
def _below(state: np.ndarray, bound: np.uint64) -> np.int64:
    # Lemire multiply-shift; bias < bound / 2^32, negligible for bound <= 2^24
    hi = _splitmix(state) >> np.uint64(32)
    return np.int64((hi * np.uint64(bound)) >> np.uint64(32))


@numba.njit(cache=True)
def _cycle_trials(n: int, p: float, trials: int, seed: int) -> np.ndarray:
    """Per-trial flags for G(n, p): bit 0 = has a cycle, bit 1 = has a complex component.

    Edges are ``Binomial(C(n,2), p)`` uniform distinct pairs; a draw that
    repeats a pair is redrawn.  Union-find tracks surplus edges per root.
    """
    np.random.seed(seed)
    state = np.empty(1, dtype=np.uint64)
    state[0] = np.uint64(seed) * np.uint64(0x2545F4914F6CDD1D)
    N = n * (n - 1) // 2
    parent = np.arange(n)
    surplus = np.zeros(n, dtype=np.int64)
    cap = 64
    us = np.empty(cap, dtype=np.int64)
    vs = np.empty(cap, dtype=np.int64)
    out = np.zeros(trials, dtype=np.int8)
    for t in range(trials):
        K = np.random.binomial(N, p)
        if K > cap:
            cap = 2 * K
            us = np.empty(cap, dtype=np.int64)
            vs = np.empty(cap, dtype=np.int64)
        while True:
            flag = 0
            done = 0
            duplicate = False
            for i in range(K):
                u = _below(state, n)
                v = _below(state, n - 1)
                if v >= u:
                    v += 1
                if u > v:
                    u, v = v, u
                us[i] = u
                vs[i] = v
                done = i + 1
                a = _find(parent, u)
                b = _find(parent, v)
                if a == b:
                    for j in range(i):
                        if us[j] == u and vs[j] == v:
                            duplicate = True
                            break
                    if duplicate:
                        break
                    surplus[a] += 1
                    flag |= 1
                    if surplus[a] >= 2:
                        flag |= 2
                else:
                    parent[a] = b
                    surplus[b] += surplus[a]
                    if surplus[b] >= 2:
                        flag |= 2
            for j in range(done):
                parent[us[j]] = us[j]
                parent[vs[j]] = vs[j]
                surplus[us[j]] = 0
                surplus[vs[j]] = 0
            if not duplicate:
                out[t] = flag
                break
    return out


def cycle_trials(n: int, alpha: float, trials: int, seed: int) -> np.ndarray:
    """Run ``trials`` independent G(n, alpha/n) draws; return the per-trial flag array."""
    if n < 2 or trials < 0:
        raise ValueError("need n >= 2 and trials >= 0")
    if n > 2**24:
        raise ValueError("vertex count too large for the compiled sampler")
    return _cycle_trials(n, alpha / n, trials, seed % (2**32))
