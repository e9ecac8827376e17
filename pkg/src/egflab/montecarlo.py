"""How often is a random unipotent matrix a substitution matrix?

Entries below the diagonal are drawn uniformly from [1..r].  The matrix
passes the exact test when it is the matrix of some f -> g * (f o phi);
columns 0 and 1 are free (2n-3 entries) and every other entry is then
determined, which gives the counting bound r^{2n-3}/r^{n(n-1)/2} and makes
an exhaustive scan over just the free parameters feasible.

Randomness is pinned to numpy's Philox bit generator keyed by the seed.
Philox emits 4 raw 64-bit words per counter block and advance(k) skips k
blocks, so each trial owns ceil(m/4) whole blocks (m = n(n-1)/2 entries);
results therefore depend only on (seed, trial index), never on chunking or
worker count.  An entry is 1 + word mod r, whose bias (r not dividing 2^64)
is below 2^-59 for every r used here.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb, isqrt
from operator import index
from os import environ

import numpy as np
from numpy.random import Philox

from ._backend import kernels
from .errors import DomainError, ResourceLimitError
from .riordan import (
    TriMatrix,
    is_substitution_with_prefunction,
    matrix_from_pair,
    pair_from_matrix,
)
from .series import _q

DEFAULT_BUDGET = 10**6
BUDGET_ENV = "EGFLAB_BUDGET"

_WORDS_PER_BLOCK = 4
_CHUNK = 4096


@dataclass(frozen=True)
class ExperimentSpec:
    """One sampling experiment: n x n matrices, entries in [1..r] (or
    [0..r-1] with zero_based), `drawings` trials from the stream keyed by
    `seed`, judged by the exact or the eps-tolerance test."""

    n: int
    r: int
    drawings: int
    seed: int
    mode: str = "exact"
    eps: Fraction = Fraction(0)
    zero_based: bool = False

    def __post_init__(self):
        try:
            n = index(self.n)
            r = index(self.r)
            d = index(self.drawings)
            s = index(self.seed)
        except TypeError as e:
            raise DomainError("n, r, drawings, seed must be integers") from e
        if n < 2:
            raise DomainError("matrix size must be >= 2")
        if r < 1:
            raise DomainError("entry range must be >= 1")
        if d < 1:
            raise DomainError("need at least one drawing")
        if not 0 <= s < 2**64:
            raise DomainError("seed must fit in 64 bits")
        if self.mode not in ("exact", "tolerance"):
            raise DomainError(f"unknown mode {self.mode!r}")
        eps = _q(self.eps)
        if eps < 0:
            raise DomainError("tolerance must be >= 0")
        if self.mode == "exact" and eps != 0:
            raise DomainError("eps only applies to tolerance mode")
        for name, v in (("n", n), ("r", r), ("drawings", d), ("seed", s), ("eps", eps)):
            object.__setattr__(self, name, v)

    def to_json_obj(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "drawings": self.drawings,
            "seed": self.seed,
            "mode": self.mode,
            "eps": str(self.eps),
            "zero_based": self.zero_based,
        }


@dataclass(frozen=True)
class ExperimentResult:
    spec: ExperimentSpec
    hits: int
    estimate: Fraction
    wilson_low: Fraction
    wilson_high: Fraction
    bound_value: Fraction
    elapsed_ms: float

    def to_json_obj(self, with_timing: bool = True) -> dict:
        obj = {
            "schema": "egflab.experiment/1",
            "spec": self.spec.to_json_obj(),
            "hits": self.hits,
            "estimate": str(self.estimate),
            "wilson95": [str(self.wilson_low), str(self.wilson_high)],
            "bound": str(self.bound_value),
        }
        if with_timing:
            obj["elapsed_ms"] = round(self.elapsed_ms, 3)
        return obj

    def canonical_json(self) -> bytes:
        """The deterministic payload: everything but the timing."""
        return json.dumps(
            self.to_json_obj(with_timing=False), sort_keys=True, separators=(",", ":")
        ).encode()


def _entry_count(n: int) -> int:
    return n * (n - 1) // 2


def _blocks_per_trial(n: int) -> int:
    m = _entry_count(n)
    return (m + _WORDS_PER_BLOCK - 1) // _WORDS_PER_BLOCK


def trial_words(seed: int, trial: int, count: int, n):
    """Raw words for `count` consecutive trials starting at `trial`, shape
    (count, n(n-1)/2); identical for any chunking of the trial range."""
    bpt = _blocks_per_trial(n)
    bg = Philox(key=seed)
    bg.advance(trial * bpt)
    raw = bg.random_raw(count * bpt * _WORDS_PER_BLOCK)
    return raw.reshape(count, bpt * _WORDS_PER_BLOCK)[:, : _entry_count(n)]


def word_stream(seed: int, trial: int, n: int):
    """Iterator over the raw 64-bit words one trial consumes."""
    return iter(int(w) for w in trial_words(seed, trial, 1, n)[0])


def sample_unipotent(n: int, r: int, stream, zero_based: bool = False) -> TriMatrix:
    """Unitriangular matrix whose strictly-lower entries, in row-major
    order, are 1 + word mod r (word mod r if zero_based) for successive
    words drawn from `stream`."""
    if n < 2:
        raise DomainError("matrix size must be >= 2")
    if r < 1:
        raise DomainError("entry range must be >= 1")
    lo = 0 if zero_based else 1
    rows = []
    for i in range(n):
        rows.append(tuple(Fraction(lo + next(stream) % r) for _ in range(i)))
    return TriMatrix(n, tuple(rows))


def _entries_array(spec: ExperimentSpec, start: int, count: int):
    words = trial_words(spec.seed, start, count, spec.n)
    vals = (words % np.uint64(spec.r)).astype(np.int64)
    if not spec.zero_based:
        vals += 1
    return vals


def _matrix_from_flat(flat, n: int) -> TriMatrix:
    rows, pos = [], 0
    for i in range(n):
        rows.append(tuple(Fraction(int(x)) for x in flat[pos : pos + i]))
        pos += i
    return TriMatrix(n, tuple(rows))


def sample_matrix(spec: ExperimentSpec, trial: int) -> TriMatrix:
    """The matrix of one trial, straight from the pinned stream."""
    return _matrix_from_flat(_entries_array(spec, trial, 1)[0], spec.n)


def exact_test(m: TriMatrix) -> bool:
    return is_substitution_with_prefunction(m)


def tolerance_margin(m: TriMatrix) -> Fraction:
    """Smallest eps at which m passes the tolerance test: the largest
    |entry - predicted| / max(1, |predicted|) over the determined entries
    (columns >= 2), with (g, phi) read off columns 0 and 1."""
    if m.size <= 3:
        return Fraction(0)
    pred = matrix_from_pair(pair_from_matrix(m), m.size)
    worst = Fraction(0)
    one = Fraction(1)
    for i in range(3, m.size):
        for k in range(2, i):
            p = pred.rows[i][k]
            gap = abs(m.rows[i][k] - p) / max(one, abs(p))
            if gap > worst:
                worst = gap
    return worst


def tolerance_test(m: TriMatrix, eps) -> bool:
    """Accept when every determined entry is within eps (relative to the
    predicted entry, absolute below magnitude 1); eps = 0 is the exact
    test."""
    e = _q(eps)
    if e < 0:
        raise DomainError("tolerance must be >= 0")
    return tolerance_margin(m) <= e


_Z95 = Fraction(49, 25)
_SQRT_SCALE = 10**12


def _sqrt_bounds(x: Fraction):
    # rational bracket of sqrt(x), outward by at most 2e-12
    q = x.numerator * _SQRT_SCALE * _SQRT_SCALE // x.denominator
    return Fraction(isqrt(q), _SQRT_SCALE), Fraction(isqrt(q + 1) + 1, _SQRT_SCALE)


def wilson_interval(hits, draws: int):
    """95% Wilson score interval as exact rationals, rounded outward
    (z = 49/25; the irrational square root is bracketed, not evaluated)."""
    if draws < 1:
        raise DomainError("need at least one draw")
    phat = Fraction(hits, draws)
    if not 0 <= phat <= 1:
        raise DomainError("hit count outside [0, draws]")
    z2 = _Z95 * _Z95
    denom = 1 + z2 / draws
    center = phat + z2 / (2 * draws)
    arg = phat * (1 - phat) / draws + z2 / (4 * draws * draws)
    _, shi = _sqrt_bounds(arg)
    lo = (center - _Z95 * shi) / denom
    hi = (center + _Z95 * shi) / denom
    return max(Fraction(0), lo), min(Fraction(1), hi)


def _chunk_hits(spec: ExperimentSpec, start: int, count: int) -> int:
    vals = _entries_array(spec, start, count)
    if spec.mode == "exact":
        return kernels.batch_exact_test(vals.reshape(-1), spec.n, count)
    hits = 0
    for t in range(count):
        if tolerance_margin(_matrix_from_flat(vals[t], spec.n)) <= spec.eps:
            hits += 1
    return hits


def _chunk_worker(args) -> int:
    return _chunk_hits(*args)


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ExperimentResult:
    """Run the experiment; hits and the derived fields depend only on the
    spec (chunk boundaries are fixed, workers only schedule chunks).  The
    elapsed time is measured, reported, and excluded from the deterministic
    payload."""
    if workers < 1:
        raise DomainError("need at least one worker")
    t0 = time.perf_counter()
    chunks = [
        (start, min(_CHUNK, spec.drawings - start))
        for start in range(0, spec.drawings, _CHUNK)
    ]
    if workers == 1 or len(chunks) == 1:
        hits = sum(_chunk_hits(spec, s, c) for s, c in chunks)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(_chunk_worker, [(spec, s, c) for s, c in chunks]))
    estimate = Fraction(hits, spec.drawings)
    lo, hi = wilson_interval(hits, spec.drawings)
    elapsed = (time.perf_counter() - t0) * 1000.0
    return ExperimentResult(spec, hits, estimate, lo, hi, bound(spec.n, spec.r), elapsed)


def bound(n: int, r: int) -> Fraction:
    """r^{2n-3} free parameters over r^{n(n-1)/2} matrices, exactly."""
    if n < 2:
        raise DomainError("matrix size must be >= 2")
    if r < 1:
        raise DomainError("entry range must be >= 1")
    return Fraction(r ** (2 * n - 3), r ** (_entry_count(n)))


def _budget(budget) -> int:
    if budget is not None:
        return index(budget)
    env = environ.get(BUDGET_ENV)
    return int(env) if env else DEFAULT_BUDGET


def _egf_mul(a, b, order):
    return [
        sum(comb(i, j) * a[j] * b[i - j] for j in range(i + 1)) for i in range(order + 1)
    ]


def _induced_in_range(g, col1, n, r, lo) -> bool:
    """g: EGF ints [1, g_1, ...]; col1: entries M[i,1] for i = 2..; checks
    every determined entry M[i,k], k >= 2, against [lo..lo+r-1].  Integer
    throughout: phi^k/k! keeps integer coefficients for integer phi."""
    order = n - 1
    phi = [0, 1] + [0] * (order - 1)
    for i in range(2, order + 1):
        phi[i] = col1[i - 2] - sum(comb(i, j) * phi[j] * g[i - j] for j in range(1, i))
    bk = phi[:]
    for k in range(2, order):
        nxt = _egf_mul(bk, phi, order)
        for i in range(order + 1):
            assert nxt[i] % k == 0
            nxt[i] //= k
        bk = nxt
        col = _egf_mul(g, bk, order)
        for i in range(k + 1, order + 1):
            if not lo <= col[i] <= lo + r - 1:
                return False
    return True


def _scan_hits(n: int, r: int, reduced: bool, lo: int) -> int:
    """Count free-parameter assignments whose determined entries all land
    in the sampling range.  The reduced scan drops g_{n-2}, g_{n-1} and
    M[n-1,1]: no determined entry M[i,k] (k >= 2, i <= n-1) reads them,
    since it needs g only up to i-k <= n-3 and phi only up to i-1 <= n-2."""
    vals = range(lo, lo + r)
    ng = n - 3 if reduced else n - 1
    nc = n - 3 if reduced else n - 2
    pad = [0] * ((n - 1) - ng)
    hits = 0
    for gs in product(vals, repeat=ng):
        g = [1, *gs, *pad]
        for cs in product(vals, repeat=nc):
            col1 = list(cs) + [0] * ((n - 2) - nc)
            if _induced_in_range(g, col1, n, r, lo):
                hits += 1
    return hits


def exhaustive_probability(
    n: int, r: int, budget=None, reduced=None, zero_based: bool = False
) -> Fraction:
    """Exact probability that a uniform [1..r] unipotent matrix passes the
    exact test, by scanning the free parameters: hits / r^{n(n-1)/2}.

    The full scan visits r^{2n-3} assignments; the reduced scan visits
    r^{2n-6} and multiplies by r^3 for the three parameters no determined
    entry depends on.  reduced=None picks the full scan when it fits the
    budget (default 10^6, or the EGFLAB_BUDGET variable), else the reduced
    one; the chosen scan must fit the budget."""
    if n < 2:
        raise DomainError("matrix size must be >= 2")
    if r < 1:
        raise DomainError("entry range must be >= 1")
    if n <= 3:
        return Fraction(1)
    cap = _budget(budget)
    full_cases = r ** (2 * n - 3)
    if reduced is None:
        reduced = full_cases > cap
    cases = r ** (2 * n - 6) if reduced else full_cases
    if cases > cap:
        raise ResourceLimitError(f"scan of {cases} cases exceeds budget {cap}")
    lo = 0 if zero_based else 1
    hits = _scan_hits(n, r, reduced, lo)
    if reduced:
        hits *= r**3
    return Fraction(hits, r ** _entry_count(n))


def conjecture_table(ns, rs, budget=None):
    """Rows (n, r, p_exact, bound, ratio): evidence for how sharply the
    counting bound tracks the exact probability.  No verdict, just data."""
    rows = []
    for n in ns:
        for r in rs:
            p = exhaustive_probability(n, r, budget=budget)
            b = bound(n, r)
            rows.append((n, r, p, b, p / b))
    return rows


def acceptance_margins(spec: ExperimentSpec, workers: int = 1) -> list:
    """Sorted minimal accepting tolerances, one per trial of the spec's
    sample.  hits(eps) for any eps is then a binary search away."""
    if workers < 1:
        raise DomainError("need at least one worker")
    chunks = [
        (start, min(_CHUNK, spec.drawings - start))
        for start in range(0, spec.drawings, _CHUNK)
    ]
    if workers == 1 or len(chunks) == 1:
        out = []
        for s, c in chunks:
            out.extend(_margin_chunk((spec, s, c)))
    else:
        out = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_margin_chunk, [(spec, s, c) for s, c in chunks]):
                out.extend(part)
    out.sort()
    return out


def _margin_chunk(args) -> list:
    spec, start, count = args
    vals = _entries_array(spec, start, count)
    return [
        tolerance_margin(_matrix_from_flat(vals[t], spec.n)) for t in range(count)
    ]


def epsilon_sweep(spec: ExperimentSpec, eps_values, workers: int = 1):
    """Tolerance acceptance over one shared sample: rows (eps, hits,
    estimate), monotone in eps by construction."""
    margins = acceptance_margins(spec, workers=workers)
    rows = []
    for eps in eps_values:
        e = _q(eps)
        if e < 0:
            raise DomainError("tolerance must be >= 0")
        hits = _count_at_most(margins, e)
        rows.append((e, hits, Fraction(hits, spec.drawings)))
    return rows


def eps_for_rate(spec: ExperimentSpec, target, workers: int = 1) -> Fraction:
    """Smallest eps at which the sample's acceptance rate reaches `target`
    (the exact order statistic of the margins)."""
    t = _q(target)
    if not 0 < t <= 1:
        raise DomainError("target rate must be in (0, 1]")
    margins = acceptance_margins(spec, workers=workers)
    need = -((-t.numerator * spec.drawings) // t.denominator)  # ceil
    return margins[need - 1]


def _count_at_most(sorted_vals, x) -> int:
    lo, hi = 0, len(sorted_vals)
    while lo < hi:
        mid = (lo + hi) // 2
        if sorted_vals[mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    return lo
