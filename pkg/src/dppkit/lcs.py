"""Longest common substring of two sampled prefixes and the growth-rate
experiment that tracks mean M_n / ln(n) against (2/ln 2) / dim2.

M_n is computed exactly by building a suffix automaton over x's prefix and
scanning it with y's prefix (linear time); a quadratic dynamic-programming
oracle validates the automaton on small inputs.

The experiment reports both normalizations, mean M_n / ln(n) and
log(M_n) / log(n); the former is the one with a finite limiting target,
the latter is kept for reference output.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import dimension, sampler
from .symbol import Symbol

LOG2 = math.log(2.0)


def _prefix_bits(x, n: int) -> list[int]:
    if isinstance(x, sampler.BinarySequence):
        x = x.bits
    if isinstance(x, str):
        if any(ch not in "01" for ch in x):
            raise ValueError("sequences must be binary")
        bits = [1 if ch == "1" else 0 for ch in x]
    else:
        bits = np.asarray(x).astype(np.int64).tolist()
        if any(b not in (0, 1) for b in bits):
            raise ValueError("sequences must be binary")
    if len(bits) < n:
        raise ValueError(f"sequence of length {len(bits)} shorter than n = {n}")
    return bits[:n]


def lcs_length(x, y, n: int | None = None) -> int:
    """Exact length of the longest common substring of x[:n] and y[:n]."""
    if n is None:
        n = min(len(x), len(y))
    if n < 1:
        raise ValueError("lcs_length: need n >= 1")
    xs = _prefix_bits(x, n)
    ys = _prefix_bits(y, n)

    # suffix automaton of xs over the binary alphabet
    sa_len = [0]
    sa_link = [-1]
    sa_next = [[-1, -1]]
    last = 0
    for ch in xs:
        cur = len(sa_len)
        sa_len.append(sa_len[last] + 1)
        sa_link.append(-1)
        sa_next.append([-1, -1])
        p = last
        while p != -1 and sa_next[p][ch] == -1:
            sa_next[p][ch] = cur
            p = sa_link[p]
        if p == -1:
            sa_link[cur] = 0
        else:
            q = sa_next[p][ch]
            if sa_len[p] + 1 == sa_len[q]:
                sa_link[cur] = q
            else:
                clone = len(sa_len)
                sa_len.append(sa_len[p] + 1)
                sa_link.append(sa_link[q])
                sa_next.append(sa_next[q].copy())
                while p != -1 and sa_next[p][ch] == q:
                    sa_next[p][ch] = clone
                    p = sa_link[p]
                sa_link[q] = clone
                sa_link[cur] = clone
        last = cur

    # scan ys, tracking the longest suffix of the scanned part that occurs in xs
    v = 0
    length = 0
    best = 0
    for ch in ys:
        while v and sa_next[v][ch] == -1:
            v = sa_link[v]
            length = sa_len[v]
        if sa_next[v][ch] != -1:
            v = sa_next[v][ch]
            length += 1
            if length > best:
                best = length
        else:
            v = 0
            length = 0
    return best


def lcs_length_dp(x, y, n: int | None = None) -> int:
    """Quadratic dynamic-programming oracle for lcs_length."""
    if n is None:
        n = min(len(x), len(y))
    xs = np.asarray(_prefix_bits(x, n))
    ys = np.asarray(_prefix_bits(y, n))
    prev = np.zeros(n + 1, dtype=np.int32)
    cur = np.zeros(n + 1, dtype=np.int32)
    best = 0
    for xi in xs:
        cur[0] = 0
        np.add(prev[:-1], 1, out=cur[1:])
        cur[1:] *= ys == xi
        best = max(best, int(cur.max()))
        prev, cur = cur, prev
    return best


@dataclass(frozen=True)
class LcsExperimentRow:
    """Monte Carlo summary of M_n at one prefix length."""

    n: int
    trials: int
    mean_Mn: float
    std_Mn: float
    ratio: float            # mean_Mn / ln(n)
    ratio_loglog: float     # mean over trials of log(M_n) / log(n)
    target: float           # (2/ln 2) / dim2


def _trial_seeds(seed: int, n_index: int, trial: int) -> tuple[int, int]:
    ss = np.random.SeedSequence(entropy=int(seed) & (2 ** 64 - 1),
                                spawn_key=(n_index, trial))
    a, b = ss.generate_state(2, dtype=np.uint64)
    return int(a), int(b)


def rate_experiment(sym: Symbol, n_grid, trials: int, seed: int,
                    dim2: float | None = None, threads: int = 1,
                    dim2_nmax: int = 12) -> list[LcsExperimentRow]:
    """Mean growth of M_n over independent sampled pairs, per n in n_grid.

    The target column divides 2/ln 2 by ``dim2`` (the certified finite-N
    lower bound from the dimension module when not supplied).  Trial t of
    row j derives its two sampling seeds from SeedSequence((seed, (j, t))),
    so results are independent of execution order and thread count.
    """
    ns = [int(v) for v in n_grid]
    if not ns or any(v < 2 for v in ns):
        raise ValueError("rate_experiment: n_grid must contain integers >= 2")
    if trials < 1:
        raise ValueError("rate_experiment: need trials >= 1")
    if dim2 is None:
        dim2 = dimension.dim_q_estimate(sym, 2, dim2_nmax).fekete_lower
    target = (2.0 / LOG2) / dim2

    def one_trial(n_index: int, n: int, trial: int) -> int:
        sx, sy = _trial_seeds(seed, n_index, trial)
        x = sampler.sample_prefix(sym, n, sx)
        y = sampler.sample_prefix(sym, n, sy)
        return lcs_length(x.bits, y.bits, n)

    rows = []
    for j, n in enumerate(ns):
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futs = [pool.submit(one_trial, j, n, t) for t in range(trials)]
                values = np.array([f.result() for f in futs], dtype=float)
        else:
            values = np.array([one_trial(j, n, t) for t in range(trials)], dtype=float)
        logs = np.log(np.maximum(values, 1.0)) / math.log(n)
        rows.append(
            LcsExperimentRow(
                n=n,
                trials=trials,
                mean_Mn=float(values.mean()),
                std_Mn=float(values.std(ddof=1)) if trials > 1 else 0.0,
                ratio=float(values.mean() / math.log(n)),
                ratio_loglog=float(logs.mean()),
                target=target,
            )
        )
    return rows
