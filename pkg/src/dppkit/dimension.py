"""Moment sums S_N^(q) = sum over length-N words of mu([word])^q, their
subset-determinant and parity-tuple oracles, Fekete-certified dimension
lower bounds, and quadrature bounds on the correlation dimension.

For one-sided symbols (f >= 1/2 or f <= 1/2) S_N is sub-multiplicative, so
-log2 S_N is superadditive and every finite-N estimate

    estimate_N = -log2(S_N) / ((q-1) N)

is a certified lower bound on the limiting dimension; the supremum over
computed N is reported as ``fekete_lower``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import toeplitz
from .measure import PrefixState
from .mixing import SizeCapError
from .symbol import Symbol, g_coeff_fn, one_sidedness, require_range

SNQ_CAP = 22
SIGMA_CAP = 18
WALSH_CAP_BITS = 20
DEFAULT_BETA_POINTS = 41
SUBTREE_DEPTH = 4

LOG2 = math.log(2.0)


# -- S_N^{(q)} via depth-first prefix-tree traversal -------------------------


def _dfs_accumulate(state: PrefixState, n_max: int, q: float, sums: np.ndarray, comp: np.ndarray) -> None:
    """Add exp(q * log mu) for every descendant prefix, Kahan-compensated per level."""
    for bit in (0, 1):
        child = state.extend(bit)
        level = child.length - 1
        term = math.exp(q * child.log_prob)
        y = term - comp[level]
        t = sums[level] + y
        comp[level] = (t - sums[level]) - y
        sums[level] = t
        if child.length < n_max:
            _dfs_accumulate(child, n_max, q, sums, comp)


def _subtree_roots(root: PrefixState, depth: int) -> list[PrefixState]:
    states = [root]
    for _ in range(depth):
        states = [s.extend(b) for s in states for b in (0, 1)]
    return states


def s_n_q_table(sym: Symbol, n_max: int, q: float, threads: int = 1) -> np.ndarray:
    """log2 S_N^(q) for N = 1..n_max, in one traversal of the prefix tree."""
    if n_max < 1 or n_max > SNQ_CAP:
        raise SizeCapError(f"s_n_q_table: need 1 <= n_max <= {SNQ_CAP}")
    if q <= 1:
        raise ValueError("s_n_q_table: need q > 1")
    require_range(sym)
    root = PrefixState.root(sym, n_max)
    sums = np.zeros(n_max)
    comp = np.zeros(n_max)
    split = min(SUBTREE_DEPTH, n_max)
    if threads > 1 and n_max > split:
        roots = _subtree_roots(root, split)
        for st in roots:
            level = st.length - 1
            sums[level] += math.exp(q * st.log_prob)
        partials = []
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = [
                pool.submit(_subtree_job, st, n_max, q) for st in roots
            ]
            partials = [f.result() for f in futs]
        # deterministic reduction: subtree index order
        for ps, pc in partials:
            sums += ps
        # levels above the split need their interior prefixes too
        for st in _all_interior(root, split):
            level = st.length - 1
            sums[level] += math.exp(q * st.log_prob)
    else:
        _dfs_accumulate(root, n_max, q, sums, comp)
    return np.log2(sums)


def _subtree_job(state: PrefixState, n_max: int, q: float):
    sums = np.zeros(n_max)
    comp = np.zeros(n_max)
    if state.length < n_max:
        _dfs_accumulate(state, n_max, q, sums, comp)
    return sums, comp


def _all_interior(root: PrefixState, depth: int) -> list[PrefixState]:
    out = []
    frontier = [root]
    for _ in range(depth - 1):
        frontier = [s.extend(b) for s in frontier for b in (0, 1)]
        out.extend(frontier)
    return out


def s_n_q(sym: Symbol, N: int, q: float, threads: int = 1) -> float:
    """log2 S_N^(q)."""
    return float(s_n_q_table(sym, N, q, threads)[N - 1])


def s_n_q_direct(sym: Symbol, N: int, q: float) -> float:
    """log2 S_N^(q) via one batched determinant per word (oracle route)."""
    from .measure import cylinder_log_probs_direct

    logs = cylinder_log_probs_direct(sym, N)
    finite = logs[logs > -math.inf]
    return float(np.log2(np.sum(np.exp(q * finite))))


# -- subset-determinant and parity-tuple oracles -----------------------------


def subset_dets(sym: Symbol, N: int) -> np.ndarray:
    """det T_J(g) for every J subset of [N], indexed by bitmask.

    Entries lie in [-1, 1] since the spectrum of every window of g is
    contained in [-1, 1]; the empty subset contributes 1.
    """
    if not (1 <= N <= SIGMA_CAP):
        raise SizeCapError(f"subset determinants: need 1 <= N <= {SIGMA_CAP}")
    require_range(sym)
    tg = toeplitz.build_T(g_coeff_fn(sym), np.arange(1, N + 1))
    masks = np.arange(2 ** N, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(N)[None, :]) & 1
    popcount = bits.sum(axis=1)
    out = np.empty(2 ** N)
    out[0] = 1.0  # empty subset convention
    for size in range(1, N + 1):
        group = np.nonzero(popcount == size)[0]
        stack = np.empty((group.size, size, size), dtype=tg.dtype)
        for row, m in enumerate(group):
            ix = np.nonzero(bits[m])[0]
            stack[row] = tg[np.ix_(ix, ix)]
        dets = np.linalg.det(stack)
        out[group] = dets.real if np.iscomplexobj(dets) else dets
    return out


def sigma_n_2(sym: Symbol, N: int) -> float:
    """Sum over subsets J of [N] of det^2 T_J(g); equals 2^N S_N^(2)."""
    a = subset_dets(sym, N)
    return float(np.sum(a * a))


def walsh_tuple_coefficient(masks: "list[int]", N: int) -> int:
    """1 iff every position appears an even number of times across the tuple."""
    for k in range(N):
        if sum((m >> k) & 1 for m in masks) % 2:
            return 0
    return 1


def sigma_n_q_walsh(sym: Symbol, N: int, q: int) -> float:
    """Brute-force sum over q-tuples of subsets weighted by the parity
    coefficient; oracle-grade only (cost 2^((q-1)N) tuple folds)."""
    if q < 2 or int(q) != q:
        raise ValueError("sigma_n_q_walsh: need integer q >= 2")
    if q * N > WALSH_CAP_BITS:
        raise SizeCapError(f"sigma_n_q_walsh: 2^(q*N) exceeds 2^{WALSH_CAP_BITS}")
    a = subset_dets(sym, N)
    masks = np.arange(2 ** N, dtype=np.int64)
    # fold the tuple sum one subset at a time; the parity coefficient is 1
    # exactly when the running xor of the masks closes to the empty set
    acc = a.copy()
    xor = np.bitwise_xor.outer(masks, masks)
    for _ in range(q - 2):
        acc = np.bincount(xor.ravel(), weights=(acc[:, None] * a[None, :]).ravel(), minlength=2 ** N)
    return float(np.sum(acc * a))


# -- dimension estimates ------------------------------------------------------


@dataclass(frozen=True)
class SNQTable:
    """Per-N moment sums and raw dimension estimates."""

    q: float
    N: np.ndarray
    log2_S_N: np.ndarray
    estimate_N: np.ndarray


@dataclass(frozen=True)
class DimensionEstimate:
    """Finite-N dimension estimates with a Fekete-certified lower bound.

    ``certified`` is True when the symbol is one-sided around 1/2 and q is
    an integer >= 2, the regime where sub-multiplicativity makes
    ``fekete_lower`` a true lower bound.  Quadrature bounds on the
    correlation dimension are attached for q = 2.
    """

    q: float
    table: SNQTable
    fekete_lower: float
    last_estimate: float
    certified: bool
    szego_lower: float | None
    szego_upper: float | None


def dim_q_estimate(sym: Symbol, q: float, n_max: int, threads: int = 1,
                   beta_grid=None) -> DimensionEstimate:
    log2s = s_n_q_table(sym, n_max, q, threads)
    ns = np.arange(1, n_max + 1)
    est = -log2s / ((q - 1.0) * ns)
    table = SNQTable(q, ns, log2s, est)
    certified = one_sidedness(sym) != 0 and q >= 2 and float(q).is_integer()
    lower = None
    upper = None
    if q == 2:
        lower = corr_dim_szego_lower(sym)
        upper = corr_dim_szego_upper(sym, beta_grid)
    return DimensionEstimate(
        q=q,
        table=table,
        fekete_lower=float(est.max()),
        last_estimate=float(est[-1]),
        certified=certified,
        szego_lower=lower,
        szego_upper=upper,
    )


@dataclass(frozen=True)
class SubmultRow:
    M: int
    N: int
    log2_S_M: float
    log2_S_N: float
    log2_S_MN: float

    @property
    def margin(self) -> float:
        """log2 S_M + log2 S_N - log2 S_{M+N}; >= 0 under one-sidedness."""
        return self.log2_S_M + self.log2_S_N - self.log2_S_MN


@dataclass(frozen=True)
class SubmultReport:
    q: float
    hypothesis_ok: bool
    rows: list


def submult_check(sym: Symbol, q: float, pairs, threads: int = 1) -> SubmultReport:
    """Evaluate log2 S_{M+N} <= log2 S_M + log2 S_N on the given (M, N) pairs.

    Evaluates regardless of the one-sidedness hypothesis; ``hypothesis_ok``
    records whether the margins are certified to be non-negative.
    """
    pairs = [(int(m), int(n)) for m, n in pairs]
    if not pairs or any(m < 1 or n < 1 for m, n in pairs):
        raise ValueError("submult_check: pairs must contain positive integers")
    top = max(m + n for m, n in pairs)
    log2s = s_n_q_table(sym, top, q, threads)
    rows = [
        SubmultRow(m, n, float(log2s[m - 1]), float(log2s[n - 1]), float(log2s[m + n - 1]))
        for m, n in pairs
    ]
    return SubmultReport(q, one_sidedness(sym) != 0, rows)


# -- quadrature bounds on the correlation dimension ---------------------------


def corr_dim_szego_lower(sym: Symbol, grid: int = toeplitz.SZEGO_GRID) -> float:
    """(1/log 2) * integral of log(2 / (1 + g^2)), g = 2f - 1; always <= 1."""
    g = 2.0 * sym.values_on_grid(grid) - 1.0
    integral = float(np.mean(np.log(2.0 / (1.0 + g * g))))
    return integral / LOG2


def _upper_bound_at_beta(g: np.ndarray, beta: float, clamp: float = toeplitz.SZEGO_CLAMP):
    vals = (1.0 + beta * g) ** 2 / (1.0 + beta * beta)
    clamped = bool(np.any(vals < clamp))
    integral = float(np.mean(np.log(np.maximum(vals, clamp))))
    return 1.0 - integral / LOG2, clamped


def corr_dim_szego_upper(sym: Symbol, beta_grid=None, grid: int = toeplitz.SZEGO_GRID,
                         refine: bool = True) -> float:
    """min over beta in [-1,1] of 1 - (1/log 2) integral log((1+beta*g)^2/(1+beta^2)).

    Every beta yields a valid upper bound; a grid scan plus bounded scalar
    refinement returns a near-optimal one.  Betas whose integrand needed
    clamping are skipped (clamping would spoil validity); beta = 0 always
    gives the safe value 1.
    """
    if beta_grid is None:
        beta_grid = np.linspace(-1.0, 1.0, DEFAULT_BETA_POINTS)
    betas = np.asarray(beta_grid, dtype=float)
    if betas.size == 0 or np.any(np.abs(betas) > 1.0):
        raise ValueError("beta grid must be non-empty within [-1, 1]")
    g = 2.0 * sym.values_on_grid(grid) - 1.0
    best = 1.0  # beta = 0
    best_beta = 0.0
    for beta in betas:
        val, clamped = _upper_bound_at_beta(g, float(beta))
        if not clamped and val < best:
            best, best_beta = val, float(beta)
    if refine:
        lo = max(-1.0, best_beta - 0.1)
        hi = min(1.0, best_beta + 0.1)

        def objective(beta: float) -> float:
            val, clamped = _upper_bound_at_beta(g, beta)
            return math.inf if clamped else val

        res = minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-10})
        if res.fun < best:
            best = float(res.fun)
    return best
