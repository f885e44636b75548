"""Weak (t,r)-design construction and exact certification.

A family S_1..S_m of t-subsets of [d] is a weak (t,r)-design when every
prefix overlap sum ``sum_{j<i} 2^{|S_j ∩ S_i|}`` is at most ``r*m``.  Two
constructions are provided:

* :func:`greedy_basic_design` — derandomized greedy (method of conditional
  expectations) on a universe of size ``d = t * ceil(t / ln r)``, certifying
  ``r_certified <= r_target``.
* :func:`block_design` — the r=1 composition: set indices are partitioned
  into geometrically shrinking blocks, each block running the greedy
  construction with budget 2 on its own disjoint universe, so cross-block
  overlaps contribute exactly 2^0 = 1 each.

Certification is always exact (big integers / rationals), independent of how
the sets were produced.  Greedy candidate scoring uses floating point with
exact tie resolution; the final per-set budget check is exact, so a scoring
error can never produce an invalid certified design.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from mpmath import mp, mpf

from .errors import ConstructionError, ParameterError, VerificationError

SERIAL_MAGIC = b"WDSN"
SERIAL_VERSION = 1


@dataclass(frozen=True)
class DesignCertificate:
    """Exact per-index overlap sums plus the tight r they certify."""

    overlap_sums: tuple  # sum_{j<i} 2^{|S_j cap S_i|}, big integers
    r_certified: Fraction  # max overlap sum / m
    checked_r: Fraction | None = None
    violating_index: int | None = None  # first i (0-based) exceeding checked_r * m
    method: str = ""
    block_layout: tuple = ()

    @property
    def ok(self) -> bool:
        return self.violating_index is None


@dataclass(frozen=True)
class WeakDesign:
    t: int
    d: int
    m: int
    sets: tuple  # m sorted tuples of distinct indices in [0, d)
    r_certified: Fraction
    method: str = "explicit"
    block_layout: tuple = ()

    def __post_init__(self):
        if len(self.sets) != self.m:
            raise ParameterError("set count does not match m")
        for s in self.sets:
            if len(s) != self.t or len(set(s)) != self.t:
                raise ParameterError("each set must hold t distinct indices")
            if s and (min(s) < 0 or max(s) >= self.d):
                raise ParameterError("set index outside universe")

    @classmethod
    def from_sets(cls, d: int, sets: Sequence[Sequence[int]], method: str = "explicit"):
        tsets = tuple(tuple(sorted(s)) for s in sets)
        t = len(tsets[0]) if tsets else 0
        sums = overlap_sums(tsets)
        r_cert = Fraction(max(sums), len(tsets)) if tsets else Fraction(0)
        return cls(t=t, d=d, m=len(tsets), sets=tsets, r_certified=r_cert, method=method)


def overlap_sums(sets: Sequence[Sequence[int]]) -> tuple:
    """Exact prefix overlap sums, one per set, as big integers."""
    fsets = [frozenset(s) for s in sets]
    sums = []
    for i, si in enumerate(fsets):
        sums.append(sum(1 << len(sj & si) for sj in fsets[:i]))
    return tuple(sums)


def verify_design(design: WeakDesign, r: Fraction | int) -> DesignCertificate:
    """Recompute every overlap sum exactly and check them against r*m.

    Returns the certificate; ``violating_index`` names the first failing set
    (the certificate is still fully populated on failure).
    """
    r = Fraction(r)
    sums = overlap_sums(design.sets)
    r_cert = Fraction(max(sums), design.m) if sums else Fraction(0)
    violating = None
    for i, s in enumerate(sums):
        if s > r * design.m:
            violating = i
            break
    return DesignCertificate(
        overlap_sums=sums,
        r_certified=r_cert,
        checked_r=r,
        violating_index=violating,
        method=design.method,
        block_layout=design.block_layout,
    )


def ceil_div_ln(t: int, r: Fraction) -> int:
    """ceil(t / ln r), evaluated with enough precision that the ceiling is
    exact (interval evaluation, precision doubled until the bounds agree)."""
    if r <= 1:
        raise ParameterError("r must be > 1")
    r = Fraction(r)
    dps = 40
    while dps <= 10000:
        mp.dps = dps
        lo = mpf(t) / (mp.log(mpf(r.numerator)) - mp.log(mpf(r.denominator)))
        # directed rounding surrogate: widen by one ulp on each side
        eps = mp.mpf(2) ** (int(mp.mag(lo)) - mp.prec + 4)
        clo, chi = mp.ceil(lo - eps), mp.ceil(lo + eps)
        if clo == chi:
            return int(clo)
        dps *= 2
    raise ConstructionError("could not resolve ceil(t/ln r) exactly")


@lru_cache(maxsize=None)
def _expected_weight_exact(n_remaining: int, picks: int, available: int) -> Fraction:
    """E[2^H] for H ~ Hypergeometric(n_remaining, available, picks), exact."""
    if picks < 0 or available < 0:
        raise ParameterError("negative hypergeometric parameter")
    total = math.comb(n_remaining, picks)
    acc = 0
    for h in range(max(0, picks - (n_remaining - available)), min(available, picks) + 1):
        acc += math.comb(available, h) * math.comb(n_remaining - available, picks - h) * (1 << h)
    return Fraction(acc, total)


def expected_overlap_weight(
    partial: Sequence[int], fixed: Sequence[int], d: int, t: int
) -> Fraction:
    """E[2^{|S ∩ fixed|}] over uniform t-subsets S of [d] containing `partial`.

    Exact rational; the kernel of the derandomized greedy choice.
    """
    pset, fset = frozenset(partial), frozenset(fixed)
    if len(pset) > t:
        raise ParameterError("partial larger than t")
    for idx in pset | fset:
        if not 0 <= idx < d:
            raise ParameterError("index outside universe")
    o = len(pset & fset)
    n_remaining = d - len(pset)
    picks = t - len(pset)
    available = len(fset - pset)
    return (1 << o) * _expected_weight_exact(n_remaining, picks, available)


@lru_cache(maxsize=None)
def _weight_table_float(n_remaining: int, picks: int, t: int) -> np.ndarray:
    """w[a] ~= E[2^H], H ~ Hypergeom(n_remaining, a, picks), a = 0..t."""

    def logc(n, k):
        if k < 0 or k > n:
            return -math.inf
        return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)

    out = np.empty(t + 1)
    lden = logc(n_remaining, picks)
    for a in range(t + 1):
        lo = max(0, picks - (n_remaining - a))
        hi = min(a, picks)
        if lo > hi:
            out[a] = 0.0
            continue
        term = math.exp(logc(a, lo) + logc(n_remaining - a, picks - lo) - lden + lo * math.log(2))
        acc = term
        for h in range(lo, hi):
            term *= 2.0 * (a - h) * (picks - h) / ((h + 1) * (n_remaining - a - picks + h + 1))
            acc += term
        out[a] = acc
    return out


def _score_deltas(d: int, t: int, step: int) -> np.ndarray:
    """Marginal greedy cost, indexed by a previous set's current overlap o,
    of picking one of its elements at elemental step `step` (0-based)."""
    n_remaining = d - step - 1
    picks = t - step - 1
    w = _weight_table_float(n_remaining, picks, t)
    o = np.arange(t)
    # delta[o] = 2^(o+1) * w[t-o-1] - 2^o * w[t-o]
    return np.ldexp(w[t - 1 - o], o + 1) - np.ldexp(w[t - o], o)


def greedy_basic_design(t: int, m: int, r_target: Fraction | float) -> WeakDesign:
    """Weak design with d = t*ceil(t/ln r_target) and r_certified <= r_target.

    Sets are built one element at a time, each element chosen to minimize the
    exact conditional expectation of the prefix overlap sum under uniform
    completion; ties break to the lowest index.  Every finished set's overlap
    sum is re-checked exactly against the budget.
    """
    if t < 1 or m < 1:
        raise ParameterError("t and m must be >= 1")
    r_target = Fraction(r_target).limit_denominator(10**12) if not isinstance(
        r_target, Fraction
    ) else r_target
    if r_target <= 1:
        raise ParameterError("r_target must be > 1")
    d = t * ceil_div_ln(t, r_target)
    sets = _greedy_sets(t, m, d, r_target, universe_offset=0)
    design = WeakDesign.from_sets(d, sets, method=f"greedy(r={r_target})")
    return WeakDesign(
        t=t,
        d=d,
        m=m,
        sets=design.sets,
        r_certified=design.r_certified,
        method=design.method,
    )


def _greedy_sets(t, m, d, r_target, universe_offset):
    """Core greedy loop on universe [0, d); returns sets shifted by offset."""
    budget = r_target * m
    sets: list[tuple] = []
    fsets: list[frozenset] = []
    elems_np: list[np.ndarray] = []  # per previous set: its elements
    covered = np.zeros(d, dtype=bool)  # union of all previous sets
    for i in range(m):
        overlaps = [0] * i
        chosen: list[int] = []
        chosen_mask = np.zeros(d, dtype=bool)
        for step in range(t):
            scores = np.zeros(d)
            if i:
                deltas = _score_deltas(d, t, step)
                for j in range(i):
                    scores[elems_np[j]] += deltas[overlaps[j]]
            scores[chosen_mask] = np.inf
            e = _argmin_with_exact_ties(
                scores, d, t, step, chosen, fsets, overlaps, covered
            )
            chosen.append(e)
            chosen_mask[e] = True
            for j in range(i):
                if e in fsets[j]:
                    overlaps[j] += 1
        new = frozenset(chosen)
        exact_sum = sum(1 << len(fs & new) for fs in fsets)
        if exact_sum > budget:
            raise ConstructionError(
                f"greedy overlap budget violated at set {i}: {exact_sum} > {budget}"
            )
        fsets.append(new)
        sets.append(tuple(sorted(chosen)))
        elems_np.append(np.array(sets[-1], dtype=np.intp))
        covered[elems_np[-1]] = True
    return [tuple(x + universe_offset for x in s) for s in sets]


def _argmin_with_exact_ties(scores, d, t, step, chosen, fsets, overlaps, covered):
    """First index attaining the float minimum; near-ties are re-scored with
    exact rationals so the winner (lowest index among exact minima) does not
    depend on rounding.

    Candidates outside every previous set share the exact delta 0, so only
    covered candidates plus the lowest uncovered one need exact scoring.
    """
    e = int(np.argmin(scores))
    best = scores[e]
    tol = 1e-9 * (abs(best) + 1e-30)
    near = np.flatnonzero(scores <= best + tol)
    if len(near) == 1 or not fsets:
        return e
    near_covered = near[covered[near]]
    near_free = near[~covered[near]]
    near = list(near_covered[:256]) + list(near_free[:1])
    if len(near_covered) > 256:
        # pathological tie cloud; fall back to the float winner
        return e
    # exact conditional expectation restricted to candidate-dependent terms
    n_remaining = d - step - 1
    picks = t - step - 1
    pset = frozenset(chosen)

    def exact_delta(cand):
        acc = Fraction(0)
        for j, fs in enumerate(fsets):
            if cand in fs:
                o = overlaps[j]
                acc += (1 << (o + 1)) * _expected_weight_exact(
                    n_remaining, picks, len(fs - pset) - 1
                ) - (1 << o) * _expected_weight_exact(n_remaining, picks, len(fs - pset))
        return acc

    best_key = None
    for cand in near:
        key = (exact_delta(int(cand)), int(cand))
        if best_key is None or key < best_key:
            best_key = key
    return best_key[1]


def block_layout(m: int) -> tuple:
    """Block sizes ceil(m/2), ceil(m/4), ..., truncated to sum to m."""
    sizes, total, b = [], 0, 1
    while total < m:
        size = min((m + (1 << b) - 1) // (1 << b), m - total)
        sizes.append(size)
        total += size
        b += 1
    return tuple(sizes)


def block_design(t: int, m: int) -> WeakDesign:
    """Weak (t,1)-design: greedy blocks with budget 2 on disjoint universes.

    Total d is at most t*ceil(t/ln 2)*ceil(log2(4m)), matching the r=1
    construction's parameter shape.
    """
    if t < 1 or m < 1:
        raise ParameterError("t and m must be >= 1")
    layout = block_layout(m)
    d_block = t * ceil_div_ln(t, Fraction(2))
    all_sets: list[tuple] = []
    offset = 0
    prev_count = 0
    for size in layout:
        # remaining-mass argument: earlier cross-block sets each contribute
        # 2^0 and the within-block greedy sum is at most 2*(size-1)
        if prev_count + 2 * (size - 1) > m:
            raise ConstructionError("block layout violates the r=1 mass budget")
        if size == 1:
            block_sets = [tuple(range(offset, offset + t))]
        else:
            block_sets = _greedy_sets(t, size, d_block, Fraction(2), offset)
        all_sets.extend(block_sets)
        prev_count += size
        offset += d_block
    design = WeakDesign.from_sets(offset, all_sets, method="block")
    if design.r_certified > 1:
        raise ConstructionError(
            f"block design certification failed: r = {design.r_certified}"
        )
    return WeakDesign(
        t=t,
        d=offset,
        m=m,
        sets=design.sets,
        r_certified=design.r_certified,
        method="block",
        block_layout=layout,
    )


def block_design_length_bound(t: int, m: int) -> int:
    """Upper bound t*ceil(t/ln 2)*ceil(log2(4m)) on block_design's d."""
    return t * ceil_div_ln(t, Fraction(2)) * math.ceil(math.log2(4 * m))


def serialize_design(design: WeakDesign) -> bytes:
    """Versioned binary format: header + m sorted u32-LE index arrays."""
    r = design.r_certified
    head = SERIAL_MAGIC + struct.pack(
        "<IIIIQQ",
        SERIAL_VERSION,
        design.t,
        design.m,
        design.d,
        r.numerator,
        r.denominator,
    )
    body = b"".join(
        struct.pack(f"<{design.t}I", *s) for s in design.sets
    )
    return head + body


def deserialize_design(data: bytes) -> WeakDesign:
    if data[:4] != SERIAL_MAGIC:
        raise ParameterError("bad design magic")
    version, t, m, d, num, den = struct.unpack_from("<IIIIQQ", data, 4)
    if version != SERIAL_VERSION:
        raise ParameterError(f"unsupported design version {version}")
    off = 4 + struct.calcsize("<IIIIQQ")
    need = off + 4 * t * m
    if len(data) != need:
        raise ParameterError("design payload length mismatch")
    sets = []
    for i in range(m):
        sets.append(struct.unpack_from(f"<{t}I", data, off + 4 * t * i))
    try:
        design = WeakDesign.from_sets(d, sets, method="deserialized")
    except ParameterError as exc:
        # a well-formed header with inconsistent sets means the payload
        # was corrupted, not that the caller passed bad parameters
        raise VerificationError(f"stored sets are inconsistent: {exc}") from exc
    stored = Fraction(num, den)
    if design.r_certified != stored:
        raise VerificationError(
            f"stored r_certified {stored} does not match recomputation "
            f"{design.r_certified}",
        )
    return WeakDesign(
        t=t, d=d, m=m, sets=design.sets, r_certified=stored, method="deserialized"
    )
