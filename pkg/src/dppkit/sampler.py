"""Exact sequential sampling of process prefixes by chain-rule conditionals.

Bit k is drawn by comparing one uniform variate against the conditional
P(x_k = 1 | x_0..x_{k-1}) produced by the incremental prefix factorization,
so a prefix of length n consumes exactly n uniforms from a PCG64 stream
seeded with the trajectory seed.  Multi-trajectory runs give trajectory i
the stream seed ^ i.

The factorization keeps only a trailing window of the inverse state, which
is exact when the symbol is band-limited and the window covers the
bandwidth; for symbols with fast-decaying coefficients the automatic window
drops only coefficients below 1e-16.  Symbols without a usable decay run
with the full state (quadratic cost per step) under a length cap, or with
an explicit approximate window chosen by the caller.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .measure import ConditioningError, PrefixState, cylinder_log_probs_direct
from .mixing import SizeCapError
from .symbol import Symbol, require_range

WINDOW_COEFF_TOL = 1e-16
AUTO_WINDOW_CAP = 4096
EXACT_LENGTH_CAP = 2048


@dataclass(frozen=True)
class BinarySequence:
    """A sampled prefix with its RNG provenance."""

    bits: np.ndarray
    seed: int
    symbol_fingerprint: str

    def __len__(self) -> int:
        return self.bits.size

    def to01(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def to_hex(self) -> str:
        return np.packbits(self.bits).tobytes().hex()


def _auto_window(sym: Symbol, n: int) -> int | None:
    bw = sym.effective_bandwidth(tol=WINDOW_COEFF_TOL, cap=AUTO_WINDOW_CAP)
    if bw is not None:
        return bw
    if n > EXACT_LENGTH_CAP:
        raise SizeCapError(
            f"no usable coefficient decay: exact sampling caps at n = {EXACT_LENGTH_CAP}; "
            "pass an explicit window for approximate sampling"
        )
    return None


def sample_prefix(sym: Symbol, n: int, seed: int, window: "int | None | str" = "auto") -> BinarySequence:
    """Sample the first n coordinates of the one-sided process.

    Same (seed, symbol, n) always yields identical bits; trajectories are
    strictly sequential internally.
    """
    if n < 1:
        raise ValueError("sample_prefix: need n >= 1")
    require_range(sym)
    if window == "auto":
        window = _auto_window(sym, n)
    rng = np.random.Generator(np.random.PCG64(seed))
    uni = rng.random(n)
    bits = np.empty(n, dtype=np.uint8)
    if window == 0:
        # conditionals are constant: i.i.d. Bernoulli(fhat(0)) fast path
        p1 = 0.5 * (1.0 + (2.0 * sym.fhat0 - 1.0))
        np.less(uni, p1, out=bits.view(bool))
    else:
        state = PrefixState.root(sym, n if window is None else 0, window=window)
        for k in range(n):
            p1 = state.conditional_one()
            bit = 1 if uni[k] < p1 else 0
            bits[k] = bit
            state = state.extend(bit)
    return BinarySequence(bits, int(seed), sym.fingerprint)


def sample_many(sym: Symbol, n: int, count: int, seed: int,
                window: "int | None | str" = "auto") -> list[BinarySequence]:
    """Independent trajectories; trajectory i uses stream seed ^ i."""
    if count < 1:
        raise ValueError("sample_many: need count >= 1")
    return [sample_prefix(sym, n, int(seed) ^ i, window) for i in range(count)]


@dataclass(frozen=True)
class CylinderFitReport:
    """Chi-square goodness of fit of sampled word frequencies against the
    exact cylinder probabilities of ``model`` (the sampling symbol itself
    unless a deliberate mismatch is being tested)."""

    word_len: int
    n_samples: int
    statistic: float
    dof: int
    p_value: float
    counts: np.ndarray
    expected: np.ndarray


def empirical_cylinder_test(sym: Symbol, word_len: int, n_samples: int, seed: int,
                            model: Symbol | None = None) -> CylinderFitReport:
    """Sample one trajectory, split it into disjoint length-``word_len``
    windows, and chi-square the window histogram against exact probabilities.

    Disjoint windows of a fast-mixing process are close enough to independent
    for the test sizes used here; fixed seeds make the check reproducible.
    """
    if not (1 <= word_len <= 6):
        raise ValueError("empirical_cylinder_test: need 1 <= word_len <= 6")
    if n_samples < 100:
        raise ValueError("empirical_cylinder_test: need n_samples >= 100")
    model = sym if model is None else model
    traj = sample_prefix(sym, word_len * n_samples, seed)
    windows = traj.bits.reshape(n_samples, word_len)
    codes = windows @ (1 << np.arange(word_len))
    counts = np.bincount(codes, minlength=2 ** word_len).astype(float)
    expected = np.exp(cylinder_log_probs_direct(model, word_len)) * n_samples
    if np.any(expected < 5.0):
        raise ConditioningError("expected cell counts below 5; increase n_samples")
    statistic = float(np.sum((counts - expected) ** 2 / expected))
    dof = 2 ** word_len - 1
    p_value = float(stats.chi2.sf(statistic, dof))
    return CylinderFitReport(word_len, n_samples, statistic, dof, p_value, counts, expected)
