"""Symbols on the circle: [0,1]-valued functions held as Fourier data.

Every downstream module consumes a symbol only through its Fourier
coefficients fhat(n); pointwise evaluation exists for range checks and
quadrature.  Coefficients satisfy fhat(-n) = conj(fhat(n)) exactly for
every family (symbols are real-valued).
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

RANGE_TOL = 1e-10
RANGE_GRID = 4096
QUAD_GRID = 16384
DEFAULT_TRUNCATION = 100_000

FAMILIES = (
    "constant",
    "raised_cosine",
    "poisson",
    "trig_poly",
    "power_decay",
    "arc_indicator",
)

_FAMILY_PARAMS = {
    "constant": ("a",),
    "raised_cosine": ("a", "b"),
    "poisson": ("c", "r"),
    "power_decay": ("a", "c", "p", "cutoff"),
    "arc_indicator": ("alpha", "beta"),
}


class SymbolSpecError(ValueError):
    """Malformed symbol specification (bad family, params, or coefficients)."""


class HypothesisError(ValueError):
    """A theorem hypothesis (range, contraction margin, one-sidedness) fails."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise SymbolSpecError(msg)


@dataclass(frozen=True, eq=False)
class Symbol:
    """A symbol f: T -> [0,1], specified by family plus parameters.

    Use the classmethod constructors (``Symbol.constant`` etc.) or
    :func:`symbol_from_json`; the raw constructor performs no validation.
    ``table`` holds the coefficients fhat(n) for n >= 0 (trig_poly only).
    """

    family: str
    params: dict = field(default_factory=dict)
    table: np.ndarray | None = None

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, a: float) -> "Symbol":
        _require(math.isfinite(a), "constant: a must be finite")
        return cls("constant", {"a": float(a)})

    @classmethod
    def raised_cosine(cls, a: float, b: float) -> "Symbol":
        """f(t) = a + b*cos(2*pi*t)."""
        _require(math.isfinite(a) and math.isfinite(b), "raised_cosine: non-finite parameter")
        return cls("raised_cosine", {"a": float(a), "b": float(b)})

    @classmethod
    def poisson(cls, c: float, r: float) -> "Symbol":
        """f(t) = c*(1-r^2)/(1-2r*cos(2*pi*t)+r^2); fhat(n) = c*r^|n|."""
        _require(math.isfinite(c) and math.isfinite(r), "poisson: non-finite parameter")
        _require(abs(r) < 1, "poisson: need |r| < 1")
        return cls("poisson", {"c": float(c), "r": float(r)})

    @classmethod
    def trig_poly(cls, coeffs: "np.ndarray | list[complex]") -> "Symbol":
        """Band-limited symbol from the coefficients fhat(0..B); fhat(-n) = conj(fhat(n))."""
        table = np.asarray(coeffs, dtype=complex).ravel().copy()
        _require(table.size >= 1, "trig_poly: need at least fhat(0)")
        _require(bool(np.all(np.isfinite(table))), "trig_poly: non-finite coefficient")
        _require(abs(table[0].imag) == 0.0, "trig_poly: fhat(0) must be real")
        return cls("trig_poly", {}, table)

    @classmethod
    def power_decay(cls, a: float, c: float, p: float, cutoff: int) -> "Symbol":
        """fhat(0) = a, fhat(n) = c/|n|^p for 1 <= |n| <= cutoff."""
        _require(all(math.isfinite(v) for v in (a, c, p)), "power_decay: non-finite parameter")
        _require(float(cutoff).is_integer() and int(cutoff) >= 1,
                 "power_decay: cutoff must be an integer >= 1")
        _require(p > 0, "power_decay: need p > 0")
        return cls("power_decay", {"a": float(a), "c": float(c), "p": float(p), "cutoff": int(cutoff)})

    @classmethod
    def arc_indicator(cls, alpha: float, beta: float) -> "Symbol":
        """Indicator of the arc [alpha, beta) on [0,1)."""
        _require(math.isfinite(alpha) and math.isfinite(beta), "arc_indicator: non-finite endpoint")
        _require(0.0 <= alpha < beta <= 1.0, "arc_indicator: need 0 <= alpha < beta <= 1")
        return cls("arc_indicator", {"alpha": float(alpha), "beta": float(beta)})

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], bandwidth: int | None = None,
                      grid: int = QUAD_GRID) -> "Symbol":
        """Trig-poly approximation of a user-supplied pointwise symbol.

        Coefficients come from trapezoid quadrature (an FFT on a uniform
        ``grid``); exact for band-limited inputs with bandwidth < grid/2.
        """
        t = np.arange(grid) / grid
        vals = np.asarray(fn(t), dtype=float)
        _require(vals.shape == (grid,), "from_function: fn must map a grid to a real grid")
        c = np.fft.rfft(vals) / grid
        bw = grid // 2 - 1 if bandwidth is None else int(bandwidth)
        _require(0 <= bw < grid // 2, "from_function: bandwidth out of range for grid")
        c = c[: bw + 1]
        c[0] = c[0].real
        return cls.trig_poly(c)

    # -- coefficients ---------------------------------------------------

    def coeff(self, n: int) -> complex:
        """Fourier coefficient fhat(n)."""
        return complex(self.coeffs(np.array([n]))[0])

    def coeffs(self, ns) -> np.ndarray:
        """Vectorized fhat over an integer array."""
        ns = np.asarray(ns)
        a = np.abs(ns)
        fam, p = self.family, self.params
        if fam == "constant":
            return np.where(ns == 0, p["a"], 0.0).astype(complex)
        if fam == "raised_cosine":
            out = np.where(ns == 0, p["a"], 0.0) + np.where(a == 1, p["b"] / 2.0, 0.0)
            return out.astype(complex)
        if fam == "poisson":
            return (p["c"] * np.float_power(p["r"], a)).astype(complex)
        if fam == "power_decay":
            out = np.where(ns == 0, p["a"], 0.0).astype(float)
            mask = (a >= 1) & (a <= p["cutoff"])
            out = out + np.where(mask, p["c"] * np.float_power(np.maximum(a, 1), -p["p"]), 0.0)
            return out.astype(complex)
        if fam == "trig_poly":
            tab = self.table
            out = np.zeros(ns.shape, dtype=complex)
            mask = a < tab.size
            vals = tab[a[mask]]
            out[mask] = np.where(ns[mask] >= 0, vals, np.conj(vals))
            return out
        if fam == "arc_indicator":
            al, be = p["alpha"], p["beta"]
            out = np.full(ns.shape, be - al, dtype=complex)
            nz = ns != 0
            nn = ns[nz].astype(float)
            out[nz] = (np.exp(-2j * np.pi * nn * al) - np.exp(-2j * np.pi * nn * be)) / (2j * np.pi * nn)
            return out
        raise SymbolSpecError(f"unknown family {fam!r}")

    @cached_property
    def fhat0(self) -> float:
        return self.coeff(0).real

    @cached_property
    def bandwidth(self) -> int | None:
        """Exact bandwidth for band-limited families, else None."""
        fam = self.family
        if fam == "constant":
            return 0
        if fam == "raised_cosine":
            return 1 if self.params["b"] != 0.0 else 0
        if fam == "trig_poly":
            nz = np.nonzero(self.table)[0]
            return int(nz[-1]) if nz.size else 0
        if fam == "power_decay":
            return int(self.params["cutoff"]) if self.params["c"] != 0.0 else 0
        if fam == "poisson":
            return 0 if self.params["r"] == 0.0 or self.params["c"] == 0.0 else None
        return None

    def effective_bandwidth(self, tol: float = 1e-16, cap: int = 4096) -> int | None:
        """Smallest B with |fhat(n)| <= tol for all n > B, or None if > cap."""
        bw = self.bandwidth
        if bw is not None:
            return bw
        if self.family == "poisson":
            c, r = abs(self.params["c"]), abs(self.params["r"])
            if c <= tol:
                return 0
            b = int(math.ceil(math.log(tol / c) / math.log(r))) if r > 0 else 0
            return b if b <= cap else None
        mags = np.abs(self.coeffs(np.arange(cap + 1)))
        above = np.nonzero(mags > tol)[0]
        if above.size == 0:
            return 0
        # arc_indicator tails decay like 1/n: never below tol within cap
        return None if self.family == "arc_indicator" else int(above[-1])

    @cached_property
    def has_real_coeffs(self) -> bool:
        """True when every fhat(n) is real (even symbol); enables a real fast path."""
        if self.family == "trig_poly":
            return bool(np.all(self.table.imag == 0.0))
        return self.family != "arc_indicator"

    # -- pointwise values ----------------------------------------------

    def eval(self, t) -> np.ndarray | float:
        """Pointwise f(t) for t in [0,1); vectorized."""
        scalar = np.isscalar(t)
        t = np.atleast_1d(np.asarray(t, dtype=float)) % 1.0
        fam, p = self.family, self.params
        if fam == "constant":
            out = np.full(t.shape, p["a"])
        elif fam == "raised_cosine":
            out = p["a"] + p["b"] * np.cos(2 * np.pi * t)
        elif fam == "poisson":
            c, r = p["c"], p["r"]
            out = c * (1 - r * r) / (1 - 2 * r * np.cos(2 * np.pi * t) + r * r)
        elif fam == "arc_indicator":
            out = ((t >= p["alpha"]) & (t < p["beta"])).astype(float)
        else:
            out = self._eval_series(t)
        return float(out[0]) if scalar else out

    def _eval_series(self, t: np.ndarray) -> np.ndarray:
        bw = self.bandwidth
        out = np.full(t.shape, self.fhat0)
        chunk = 512
        for lo in range(1, bw + 1, chunk):
            ns = np.arange(lo, min(lo + chunk, bw + 1))
            cs = self.coeffs(ns)
            phases = np.exp(2j * np.pi * np.outer(t, ns))
            out = out + 2.0 * (phases @ cs).real
        return out

    def values_on_grid(self, m: int = RANGE_GRID) -> np.ndarray:
        """f at t_k = k/m, k = 0..m-1 (exact Fourier synthesis for coefficient families)."""
        fam = self.family
        if fam in ("constant", "raised_cosine", "poisson", "arc_indicator"):
            return np.asarray(self.eval(np.arange(m) / m), dtype=float)
        bw = self.bandwidth
        big = m
        while big < 2 * bw + 2:
            big += m
        c = np.zeros(big // 2 + 1, dtype=complex)
        c[: bw + 1] = self.coeffs(np.arange(bw + 1))
        vals = np.fft.irfft(c * big, n=big)
        return vals[:: big // m]

    # -- range information ----------------------------------------------

    @cached_property
    def _extrema(self) -> tuple[float, float]:
        fam, p = self.family, self.params
        if fam == "constant":
            return p["a"], p["a"]
        if fam == "raised_cosine":
            return p["a"] - abs(p["b"]), p["a"] + abs(p["b"])
        if fam == "poisson":
            c, r = p["c"], abs(p["r"])
            lo, hi = c * (1 - r) / (1 + r), c * (1 + r) / (1 - r)
            return (lo, hi) if c >= 0 else (hi, lo)
        if fam == "arc_indicator":
            width = p["beta"] - p["alpha"]
            return (1.0, 1.0) if width >= 1.0 else (0.0, 1.0)
        vals = self.values_on_grid(RANGE_GRID)
        return float(vals.min()), float(vals.max())

    @property
    def f_min(self) -> float:
        return self._extrema[0]

    @property
    def f_max(self) -> float:
        return self._extrema[1]

    @property
    def range_ok(self) -> bool:
        """Whether min/max of f lie in [0 - tol, 1 + tol]."""
        return self.f_min >= -RANGE_TOL and self.f_max <= 1.0 + RANGE_TOL

    # -- identity ---------------------------------------------------------

    def spec_dict(self) -> dict:
        """Canonical JSON-able specification (round-trips through symbol_from_json)."""
        if self.family == "trig_poly":
            coeffs = [
                {"n": int(n), "re": float(c.real), "im": float(c.imag)}
                for n, c in enumerate(self.table)
            ]
            return {"family": "trig_poly", "coeffs": coeffs}
        return {"family": self.family, "params": dict(self.params)}

    @cached_property
    def fingerprint(self) -> str:
        blob = json.dumps(self.spec_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        if self.family == "trig_poly":
            return f"Symbol.trig_poly(<{self.table.size} coeffs>)"
        args = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"Symbol.{self.family}({args})"


# -- operations ------------------------------------------------------------


def require_range(sym: Symbol) -> None:
    """Raise HypothesisError unless 0 <= f <= 1 within tolerance."""
    if not sym.range_ok:
        raise HypothesisError(
            f"symbol range [{sym.f_min:.6g}, {sym.f_max:.6g}] leaves [0,1]"
        )


def contraction_margin(sym: Symbol) -> float:
    """tau = min(inf f, 1 - sup f); a non-positive value means the margin hypothesis fails."""
    return min(sym.f_min, 1.0 - sym.f_max)


def one_sidedness(sym: Symbol, tol: float = 1e-9) -> int:
    """+1 if f >= 1/2, -1 if f <= 1/2, 0 otherwise."""
    if sym.f_min >= 0.5 - tol:
        return 1
    if sym.f_max <= 0.5 + tol:
        return -1
    return 0


@dataclass(frozen=True)
class TailSum:
    """Partial sum of n*|fhat(n)|^2 over cutoff_ell < n <= truncation_n.

    ``remainder_bound`` bounds the dropped tail beyond the truncation when
    the family's decay gives one (band-limited: 0; geometric / power with
    p > 1: closed form; otherwise None and the sum is flagged approximate).
    ``symmetric`` doubles the sum to cover negative frequencies.
    """

    cutoff_ell: int
    truncation_n: int
    value: float
    remainder_bound: float | None
    symmetric: bool = False

    @property
    def exact(self) -> bool:
        return self.remainder_bound == 0.0

    @property
    def certified_total(self) -> float | None:
        """Upper bound on the full infinite sum, when available."""
        if self.remainder_bound is None:
            return None
        return self.value + self.remainder_bound


def _tail_remainder(sym: Symbol, truncation: int) -> float | None:
    """Bound on sum_{n > truncation} n |fhat(n)|^2, or None when unknown."""
    bw = sym.bandwidth
    if bw is not None:
        return 0.0 if truncation >= bw else _power_remainder(sym, truncation)
    if sym.family == "poisson":
        c, r = sym.params["c"], abs(sym.params["r"])
        x = r * r
        if x == 0.0:
            return 0.0
        t = truncation
        # sum_{n>t} n x^n = x^{t+1} ((t+1) - t x) / (1-x)^2
        return c * c * x ** (t + 1) * ((t + 1) - t * x) / (1 - x) ** 2
    return None


def _power_remainder(sym: Symbol, truncation: int) -> float | None:
    if sym.family != "power_decay":
        return None
    c, p, cutoff = sym.params["c"], sym.params["p"], sym.params["cutoff"]
    if truncation >= cutoff:
        return 0.0
    if p <= 1.0:
        return None
    # sum_{t < n <= cutoff} c^2 n^{1-2p} <= c^2 integral_t^inf x^{1-2p} dx
    return c * c * truncation ** (2 - 2 * p) / (2 * p - 2)


def tail_sum(sym: Symbol, ell: int, truncation: int = DEFAULT_TRUNCATION,
             symmetric: bool = False) -> TailSum:
    """Sum of n*|fhat(n)|^2 for ell < n <= truncation (doubled when symmetric)."""
    if not (0 <= ell < truncation):
        raise ValueError("tail_sum: need 0 <= ell < truncation")
    bw = sym.bandwidth
    hi = truncation if bw is None else min(truncation, bw)
    if hi <= ell:
        value = 0.0
    else:
        ns = np.arange(ell + 1, hi + 1)
        value = float(np.sum(ns * np.abs(sym.coeffs(ns)) ** 2))
    rem = _tail_remainder(sym, truncation)
    if symmetric:
        value *= 2.0
        rem = None if rem is None else 2.0 * rem
    return TailSum(int(ell), int(truncation), value, rem, symmetric)


@dataclass(frozen=True)
class TailDecay:
    """Fitted polynomial decay of ell -> tail_sum(ell).

    kind is "exponent" (tail ~ C * ell^-exponent), "exact_bandwidth"
    (tails vanish beyond the bandwidth) or "super_polynomial" (local
    log-log slopes keep steepening, e.g. geometric decay).
    """

    kind: str
    exponent: float | None


def tail_decay_exponent(sym: Symbol, ell_grid, truncation: int = DEFAULT_TRUNCATION) -> TailDecay:
    """Least-squares decay exponent of the tail sums over ell_grid."""
    ells = [int(e) for e in ell_grid]
    if len(ells) < 3 or any(b <= a for a, b in zip(ells, ells[1:])):
        raise ValueError("tail_decay_exponent: need >= 3 strictly increasing cutoffs")
    tails = np.array([tail_sum(sym, e, truncation).value for e in ells])
    if np.all(tails == 0.0):
        return TailDecay("exact_bandwidth", None)
    if np.any(tails <= 0.0):
        raise ValueError("tail_decay_exponent: some tail sums vanish on the grid")
    x, y = np.log(ells), np.log(tails)
    local = np.diff(y) / np.diff(x)
    mags = -local
    if np.all(mags[1:] > 1.5 * mags[:-1]):
        return TailDecay("super_polynomial", None)
    slope = np.polyfit(x, y, 1)[0]
    return TailDecay("exponent", float(-slope))


def complement(sym: Symbol) -> Symbol:
    """The symbol 1 - f (exact for families closed under complement,
    a machine-precision trig_poly truncation otherwise)."""
    fam, p = sym.family, sym.params
    if fam == "constant":
        return Symbol.constant(1.0 - p["a"])
    if fam == "raised_cosine":
        return Symbol.raised_cosine(1.0 - p["a"], -p["b"])
    if fam == "trig_poly":
        tab = -sym.table.copy()
        tab[0] = 1.0 - sym.table[0]
        return Symbol.trig_poly(tab)
    if fam == "power_decay":
        return Symbol.power_decay(1.0 - p["a"], -p["c"], p["p"], p["cutoff"])
    bw = sym.effective_bandwidth(tol=1e-18, cap=8192)
    if bw is None:
        raise SymbolSpecError(f"complement of {fam} symbol is not representable")
    tab = -sym.coeffs(np.arange(bw + 1))
    tab[0] = 1.0 - sym.fhat0
    return Symbol.trig_poly(tab)


def g_coeff_fn(sym: Symbol) -> Callable[[np.ndarray], np.ndarray]:
    """Coefficient lookup for g = 2f - 1 (ghat(n) = 2 fhat(n) - delta_0)."""

    def ghat(ns):
        ns = np.asarray(ns)
        return 2.0 * sym.coeffs(ns) - (ns == 0)

    return ghat


# -- JSON ingestion ----------------------------------------------------------


def symbol_from_json(spec) -> Symbol:
    """Build a Symbol from a JSON object / JSON text per the external schema.

    Accepted shapes: {"family": <name>, "params": {...}} and
    {"family": "trig_poly", "coeffs": [{"n": 0, "re": 0.5, "im": 0.0}, ...]}
    with only n >= 0 entries (Hermitian completion is implied).
    """
    if isinstance(spec, (str, bytes)):
        spec = json.loads(spec)
    if not isinstance(spec, dict):
        raise SymbolSpecError("symbol spec must be a JSON object")
    family = spec.get("family")
    if family not in FAMILIES:
        raise SymbolSpecError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if family == "trig_poly":
        extra = set(spec) - {"family", "coeffs"}
        _require(not extra, f"unknown fields in trig_poly spec: {sorted(extra)}")
        entries = spec.get("coeffs")
        _require(isinstance(entries, list) and entries, "trig_poly: 'coeffs' must be a non-empty list")
        seen: dict[int, complex] = {}
        for ent in entries:
            _require(isinstance(ent, dict), "trig_poly: each coefficient must be an object")
            extra = set(ent) - {"n", "re", "im"}
            _require(not extra, f"unknown fields in coefficient entry: {sorted(extra)}")
            n = ent.get("n")
            _require(isinstance(n, int) and not isinstance(n, bool), "coefficient index n must be an integer")
            _require(n >= 0, f"coefficient index n={n} rejected: only n >= 0 accepted")
            _require(n not in seen, f"duplicate coefficient index n={n}")
            re = ent.get("re", 0.0)
            im = ent.get("im", 0.0)
            _require(isinstance(re, (int, float)) and isinstance(im, (int, float)),
                     "coefficient re/im must be numbers")
            if n == 0:
                _require(im == 0.0, "fhat(0) must be real (im = 0)")
            seen[n] = complex(re, im)
        table = np.zeros(max(seen) + 1, dtype=complex)
        for n, c in seen.items():
            table[n] = c
        return Symbol.trig_poly(table)

    extra = set(spec) - {"family", "params"}
    _require(not extra, f"unknown fields in symbol spec: {sorted(extra)}")
    params = spec.get("params")
    _require(isinstance(params, dict), "'params' must be an object")
    expected = _FAMILY_PARAMS[family]
    _require(set(params) == set(expected),
             f"{family}: expected params {sorted(expected)}, got {sorted(params)}")
    for k, v in params.items():
        _require(isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v),
                 f"{family}: parameter {k} must be a finite number")
    ctor = getattr(Symbol, family)
    return ctor(**{k: params[k] for k in expected})
