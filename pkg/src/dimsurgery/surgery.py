"""Per-chunk modification plans and their application.

A plan assigns every chunk a target proxy dimension t_j and a change-density
budget delta_j, following one of five strategies:

  randomize      push every chunk to dimension 1 within 1/2 + eps - g(s_j)
  weak_srandom   buffered raise M(s_j, eps_j) with halving eps from the
                 slack schedule; keeps a complexity buffer above s
  raise_case1    raise toward t with the flat budget g(t) - g(s)
  raise_case2    raise along the chord through (s, t) and (1, 1)
  lower          quantize each chunk onto block codebooks of rate ~ s

Application walks chunks left to right, re-estimating each chunk against the
already-constructed prefix; the per-chunk change budget is a hard constraint
(asserted on exact bit counts), target attainment is best-effort search.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .bitseq import BitSequence
from .dimension import (
    chunk_boundary,
    default_tail_start,
    sequence_dim,
    sequence_distance,
)
from .entropy import (
    CASE1,
    bound_curves,
    buffer_schedule,
    case_select,
    chord_line,
    entropy_inv,
    raise_profile,
    tail_average_floor,
)
from .hamming import (
    Codebook,
    _dense_greedy,
    _expand_once,
    _lazy_greedy,
    ball_offsets,
    ball_volume,
    best_subcode,
    greedy_cover,
)

RANDOMIZE = "randomize"
WEAK_SRANDOM = "weak_srandom"
RAISE_CASE1 = "raise_case1"
RAISE_CASE2 = "raise_case2"
LOWER = "lower"

EPS_MIN = 1e-3
DEFAULT_BLOCK_LEN = 20
QUANTIZER_RATE_SLACK = 0.045  # extra code rate (bits per bit) for block quantizers


class PlanInvariantError(RuntimeError):
    """A constructed plan failed one of its arithmetic invariants."""


@dataclass(frozen=True)
class PlanEntry:
    j: int
    s_j: float
    t_j: float
    delta_j: float
    eps_j: float


@dataclass
class SurgeryPlan:
    strategy: str
    s: float
    t: float
    seed: int
    entries: list[PlanEntry]

    def deltas(self) -> np.ndarray:
        return np.array([e.delta_j for e in self.entries])

    def to_text(self) -> str:
        lines = [f"{self.strategy} {self.s:.12g} {self.t:.12g} {self.seed}"]
        for e in self.entries:
            lines.append(f"{e.j} {e.s_j:.12g} {e.delta_j:.12g} {e.t_j:.12g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SurgeryPlan":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        strategy, s, t, seed = lines[0].split()
        entries = []
        for ln in lines[1:]:
            j, s_j, delta_j, t_j = ln.split()
            # the wire format carries the applied radii; eps is already folded in
            entries.append(PlanEntry(j=int(j), s_j=float(s_j), t_j=float(t_j),
                                     delta_j=float(delta_j), eps_j=0.0))
        return cls(strategy=strategy, s=float(s), t=float(t), seed=int(seed),
                   entries=entries)


def default_eps_seq(count: int, eps_min: float = EPS_MIN) -> list[float]:
    """Slowly vanishing slack: eps_j = max(eps_min, 1/ceil(log2(j+2))).

    Decays slower than the modulus of continuity of entropy_inv at 1 (which
    is ~sqrt(1/j)), so 1/j target rounding always fits inside one eps.
    """
    return [max(eps_min, 1.0 / math.ceil(math.log2(j + 2))) for j in range(1, count + 1)]


def _round_up_to_grid(value: float, j: int) -> float:
    """Round up to the nearest fraction k/j, clamped into [0, 1]."""
    return min(1.0, math.ceil(value * j - 1e-9) / j)


def _planned_distance_tail_max(deltas: np.ndarray, tail_start: int) -> float:
    js = np.arange(1, len(deltas) + 1, dtype=np.float64)
    n_next = js * (js + 1) * (2 * js + 1) / 6.0
    series = np.cumsum(deltas * js ** 2) / n_next
    idx = min(max(0, tail_start - 2), len(series) - 1)
    return float(series[idx:].max())


def plan_randomize(s_seq, eps_seq=None, seed: int = 0) -> SurgeryPlan:
    """Full-randomize plan: t_j = 1, delta_j = 1/2 + eps_j - g(s_j) + 1/j."""
    s_list = [float(v) for v in s_seq]
    eps = list(eps_seq) if eps_seq is not None else default_eps_seq(len(s_list))
    if len(eps) != len(s_list):
        raise ValueError("eps_seq length mismatch")
    entries = []
    for j, (s_j, e_j) in enumerate(zip(s_list, eps), start=1):
        delta = 0.5 + e_j - entropy_inv(s_j) + 1.0 / j
        entries.append(PlanEntry(j=j, s_j=s_j, t_j=1.0,
                                 delta_j=min(1.0, max(0.0, delta)), eps_j=e_j))
    return SurgeryPlan(strategy=RANDOMIZE, s=tail_average_floor(s_list), t=1.0,
                       seed=seed, entries=entries)


def plan_weak_srandom(s_seq, c: float, seed: int = 0) -> SurgeryPlan:
    """Buffered raise: eps from the slack schedule, delta_j = 2 eps_j,
    t_j = M(s_j, eps_j) rounded up to granularity 1/j.

    Re-checks the buffer inequality sum t_i i^2 - c j^2 > s n_j - b on the
    rounded targets before returning.
    """
    s_list = [float(v) for v in s_seq]
    count = len(s_list)
    eps, b = buffer_schedule(c, s_list, horizon=count)
    s_sur = tail_average_floor(s_list)
    entries = []
    for j, (s_j, e_j) in enumerate(zip(s_list, eps), start=1):
        t_j = _round_up_to_grid(raise_profile(s_j, e_j), j)
        entries.append(PlanEntry(j=j, s_j=s_j, t_j=t_j,
                                 delta_j=min(1.0, 2.0 * e_j), eps_j=e_j))
    js = np.arange(1, count + 1, dtype=np.float64)
    n_j = (js - 1) * js * (2 * js - 1) / 6.0
    t_prefix = np.cumsum(np.array([e.t_j for e in entries]) * js ** 2)
    if not np.all(t_prefix - c * js ** 2 > s_sur * n_j - b):
        raise PlanInvariantError("rounded targets broke the buffer inequality")
    return SurgeryPlan(strategy=WEAK_SRANDOM, s=s_sur, t=float("nan"),
                       seed=seed, entries=entries)


def plan_raise(s_seq, s: float, t: float, eps_seq=None, seed: int = 0,
               tail_start: int | None = None) -> SurgeryPlan:
    """Raise-to-t plan for a sequence of chunk dims with tail floor >= s.

    Strategy picked by case_select: Case 1 uses the flat budget
    delta_i = g(t)-g(s) + eps_i with targets M(s_i, delta); Case 2 follows
    the chord through (s, t) and (1, 1) with delta_i = g(t_i)-g(s_i)+eps_i.
    Asserts, arithmetically from the plan alone: the Case-2 chord invariant,
    and planned aggregate distance <= (g(t)-g(s)) + max eps + 1/tail_start.
    """
    if not 0.0 <= s < t <= 1.0:
        raise ValueError(f"need 0 <= s < t <= 1, got s={s}, t={t}")
    s_list = [float(v) for v in s_seq]
    if t == 1.0:
        return plan_randomize(s_list, eps_seq, seed)
    count = len(s_list)
    eps = list(eps_seq) if eps_seq is not None else default_eps_seq(count)
    if len(eps) != count:
        raise ValueError("eps_seq length mismatch")
    case = case_select(s, t)
    delta = entropy_inv(t) - entropy_inv(s)
    entries = []
    if case == CASE1:
        strategy = RAISE_CASE1
        for j, (s_j, e_j) in enumerate(zip(s_list, eps), start=1):
            t_j = _round_up_to_grid(raise_profile(s_j, delta), j)
            entries.append(PlanEntry(j=j, s_j=s_j, t_j=t_j,
                                     delta_j=min(1.0, delta + e_j), eps_j=e_j))
    else:
        strategy = RAISE_CASE2
        line = chord_line(s, t)
        for j, (s_j, e_j) in enumerate(zip(s_list, eps), start=1):
            t_j = _round_up_to_grid(line(s_j), j)
            d_j = entropy_inv(t_j) - entropy_inv(s_j) + e_j
            entries.append(PlanEntry(j=j, s_j=s_j, t_j=t_j,
                                     delta_j=min(1.0, max(0.0, d_j)), eps_j=e_j))
        for e in entries:
            if e.t_j < line(e.s_j) - 1e-9:
                raise PlanInvariantError(
                    f"chunk {e.j}: target {e.t_j} fell below the chord {line(e.s_j)}")
    ts = default_tail_start(count) if tail_start is None else tail_start
    ts = min(ts, count + 1)
    planned = _planned_distance_tail_max(np.array([e.delta_j for e in entries]), ts)
    budget = bound_curves(s, t).raise_ + max(eps) + 1.0 / ts
    if planned > budget + 1e-12:
        raise PlanInvariantError(
            f"planned aggregate distance {planned:.6f} exceeds bound budget {budget:.6f}")
    return SurgeryPlan(strategy=strategy, s=s, t=t, seed=seed, entries=entries)


# ---------------------------------------------------------------------------
# Block quantizers for the lower strategy.
# ---------------------------------------------------------------------------

def _covering_radius(n: int, words: np.ndarray) -> int:
    reached = np.zeros(1 << n, dtype=bool)
    reached[np.asarray(words, dtype=np.int64)] = True
    radius = 0
    while not reached.all():
        reached = _expand_once(reached, n)
        radius += 1
    return radius


@functools.lru_cache(maxsize=128)
def quantizer_codebook(block_len: int, target_s: float) -> Codebook:
    """Rate-limited greedy quantizer: ~2^((s+slack) L) words picked by greedy
    ball coverage at the distortion radius g(1-s) L; `radius` is the exact
    covering radius, so nearest-codeword distance is always <= radius."""
    if not 1 <= block_len <= 22:
        raise ValueError("block quantizers capped at 22 bits")
    space = 1 << block_len
    m = max(1, int(2.0 ** ((target_s + QUANTIZER_RATE_SLACK) * block_len)))
    if m >= space:
        words = np.arange(space, dtype=np.int64)
        return Codebook(n=block_len, radius=0, words=words, coverage_fraction=1.0)
    r_star = max(1, round(float(entropy_inv(1.0 - target_s)) * block_len))
    r_star = min(r_star, block_len)
    offsets = ball_offsets(block_len, r_star)
    uncovered = np.ones(space, dtype=bool)
    if len(offsets) * 256 >= space:
        chosen = _dense_greedy(block_len, r_star, offsets, uncovered, picks=m)
    else:
        chosen = _lazy_greedy(block_len, offsets, np.arange(space), uncovered, picks=m)
    words = np.array(chosen, dtype=np.int64)
    radius = _covering_radius(block_len, words)
    return Codebook(n=block_len, radius=radius, words=words, coverage_fraction=1.0)


def lower_cover_provider(target_s: float):
    """Length-indexed cache of block quantizers at code rate ~ target_s."""
    cache: dict[int, Codebook] = {}

    def provider(block_len: int) -> Codebook:
        if block_len not in cache:
            cache[block_len] = quantizer_codebook(block_len, target_s)
        return cache[block_len]

    return provider


def _bits_to_word(bits: np.ndarray) -> int:
    return int((bits.astype(np.int64) << np.arange(bits.size, dtype=np.int64)).sum())


def _word_to_bits(word: int, n: int) -> np.ndarray:
    return ((word >> np.arange(n, dtype=np.int64)) & 1).astype(np.uint8)


def lower_chunk(chunk, target_s: float, cover: Codebook) -> np.ndarray:
    """Replace a chunk by its nearest codeword (ties to the lowest index).

    The cover's word length must equal the chunk length; callers are expected
    to hand in a codebook of rate about target_s (log2|cover| <= target_s n
    up to a log-sized allowance), which bounds the output's index rate.
    """
    bits = chunk.bits if isinstance(chunk, BitSequence) else np.asarray(chunk, dtype=np.uint8)
    if cover.n != bits.size:
        raise ValueError(f"cover word length {cover.n} != chunk length {bits.size}")
    w = _bits_to_word(bits)
    words = np.asarray(cover.words, dtype=np.int64)
    idx = int(np.argmin(np.bitwise_count(words ^ w)))
    return _word_to_bits(int(words[idx]), bits.size)


def plan_lower(n_chunks: int, target_s: float, cover_provider,
               block_len: int = DEFAULT_BLOCK_LEN, seed: int = 0) -> SurgeryPlan:
    """Lower-to-s plan: per-chunk budget = worst block covering-radius ratio.

    The nearest-codeword step can never exceed the covering radius of the
    block codebook, so the per-chunk budget is exact, not statistical.
    """
    entries = []
    for j in range(1, n_chunks + 1):
        size = j * j
        lens = [block_len] * (size // block_len)
        if size % block_len:
            lens.append(size % block_len)
        delta = max(cover_provider(L).radius / L for L in lens)
        entries.append(PlanEntry(j=j, s_j=float("nan"), t_j=target_s,
                                 delta_j=delta, eps_j=0.0))
    return SurgeryPlan(strategy=LOWER, s=target_s, t=target_s, seed=seed,
                       entries=entries)


# ---------------------------------------------------------------------------
# Chunk-local search.
# ---------------------------------------------------------------------------

GREEDY = "greedy"
RANDOM_FILL = "random_fill"
STEEPEST = "steepest"

_RANDOM_FILL_ATTEMPTS = 16
_STEEPEST_EVAL_FACTOR = 10


def _flips_toward_half(bits: np.ndarray):
    ones = int(np.count_nonzero(bits))
    size = bits.size
    if 2 * ones < size:
        return np.flatnonzero(bits == 0), size // 2 - ones
    if 2 * ones > size:
        return np.flatnonzero(bits == 1), ones - (size + 1) // 2
    return np.empty(0, dtype=np.int64), 0


def raise_chunk(chunk, context, radius: float, est, searcher: str = GREEDY,
                seed: int | tuple = 0, target: float | None = None) -> np.ndarray:
    """Search for a nearby chunk with a higher estimate.

    Hard constraint: output differs from the input on at most
    floor(radius * len) bits.  The estimate never decreases (the original is
    returned if no candidate improves on it).  With `target` set, searchers
    stop as soon as the estimate reaches it, keeping the distance spent
    minimal rather than exhausting the budget.

    greedy        flip minority-value bits toward 1/2 frequency (binary
                  search on the flip count when a target is given)
    random_fill   overwrite a random budget-sized subset with coin bits,
                  redrawing until the estimate is non-decreasing
    steepest      best-single-flip hill climbing, 10*len evaluation cap
    """
    if not 0.0 <= radius <= 1.0:
        raise ValueError(f"radius must lie in [0, 1], got {radius}")
    bits = chunk.bits if isinstance(chunk, BitSequence) else np.asarray(chunk, dtype=np.uint8)
    budget = int(math.floor(radius * bits.size + 1e-9))
    base = est.estimate(bits, context)
    if budget == 0 or (target is not None and base >= target):
        return bits.copy()
    rng = np.random.default_rng(seed)

    if searcher == GREEDY:
        pool, need = _flips_toward_half(bits)
        k_max = min(budget, need)
        order = rng.permutation(pool)

        def candidate(k: int) -> np.ndarray:
            out = bits.copy()
            out[order[:k]] ^= 1
            return out

        k = k_max
        if target is not None and k_max > 0:
            best = candidate(k_max)
            if est.estimate(best, context) >= target:
                lo, hi = 0, k_max
                while lo < hi:
                    mid = (lo + hi) // 2
                    if est.estimate(candidate(mid), context) >= target:
                        hi = mid
                    else:
                        lo = mid + 1
                k = lo
        result = candidate(k)
        return result if est.estimate(result, context) >= base else bits.copy()

    if searcher == RANDOM_FILL:
        best, best_val = bits.copy(), base
        for _ in range(_RANDOM_FILL_ATTEMPTS):
            out = bits.copy()
            pos = rng.choice(bits.size, size=budget, replace=False)
            out[pos] = rng.integers(0, 2, size=budget, dtype=np.uint8)
            val = est.estimate(out, context)
            if val > best_val:
                best, best_val = out, val
            if best_val >= (target if target is not None else base):
                break
        return best

    if searcher == STEEPEST:
        current, cur_val = bits.copy(), base
        flipped = np.zeros(bits.size, dtype=bool)
        dist = 0
        evals = 0
        cap = _STEEPEST_EVAL_FACTOR * bits.size
        while evals < cap and (target is None or cur_val < target):
            best_pos, best_val = -1, cur_val
            for pos in range(bits.size):
                if dist >= budget and not flipped[pos]:
                    continue  # can only unflip once the budget is exhausted
                current[pos] ^= 1
                val = est.estimate(current, context)
                current[pos] ^= 1
                evals += 1
                if val > best_val:
                    best_pos, best_val = pos, val
                if evals >= cap:
                    break
            if best_pos < 0:
                break
            current[best_pos] ^= 1
            flipped[best_pos] = not flipped[best_pos]
            dist += 1 if flipped[best_pos] else -1
            cur_val = best_val
        return current

    raise ValueError(f"unknown searcher {searcher!r}")


# ---------------------------------------------------------------------------
# Plan application.
# ---------------------------------------------------------------------------

@dataclass
class ChunkOutcome:
    j: int
    s_j: float
    delta_planned: float
    delta_achieved: float
    t_planned: float
    t_achieved: float


@dataclass
class SurgeryReport:
    plan: SurgeryPlan
    outcomes: list[ChunkOutcome]
    dim_before: float
    dim_after: float
    distance: float
    codebook_rate: float | None = None   # lower runs: index bits per sequence bit
    extras: dict = field(default_factory=dict)


def apply_plan(x, plan: SurgeryPlan, est, searcher: str = GREEDY,
               cover_provider=None, block_len: int = DEFAULT_BLOCK_LEN,
               tail_start: int | None = None):
    """Apply a surgery plan chunk by chunk, left to right.

    Per chunk: re-estimate s_j from the input and its prefix, modify within
    the plan's budget (raise_chunk against the constructed prefix, or
    nearest-codeword quantization per block for lower plans), and record
    planned vs achieved values.  The per-chunk achieved distance is asserted
    against the budget on exact bit counts.
    """
    bx = x.bits if isinstance(x, BitSequence) else np.asarray(x, dtype=np.uint8)
    count = len(plan.entries)
    if count == 0:
        return BitSequence(bx.copy()), SurgeryReport(
            plan=plan, outcomes=[], dim_before=float("nan"),
            dim_after=float("nan"), distance=0.0)
    if chunk_boundary(count + 1) > bx.size:
        raise ValueError(
            f"plan covers {chunk_boundary(count + 1)} bits, sequence has {bx.size}")
    if plan.strategy == LOWER and cover_provider is None:
        cover_provider = lower_cover_provider(plan.t)

    y = bx.copy()
    outcomes = []
    index_bits_total = 0.0
    for entry in plan.entries:
        j = entry.j
        lo, hi = chunk_boundary(j), chunk_boundary(j + 1)
        x_chunk = bx[lo:hi]
        s_j = est.estimate(x_chunk, bx[:lo])
        if plan.strategy == LOWER:
            y_chunk = np.empty_like(x_chunk)
            pos = 0
            while pos < x_chunk.size:
                width = min(block_len, x_chunk.size - pos)
                cover = cover_provider(width)
                y_chunk[pos:pos + width] = lower_chunk(
                    x_chunk[pos:pos + width], entry.t_j, cover)
                index_bits_total += math.log2(len(cover.words))
                pos += width
        else:
            y_chunk = raise_chunk(x_chunk, y[:lo], entry.delta_j, est,
                                  searcher=searcher, seed=(plan.seed, j),
                                  target=entry.t_j)
        mismatches = int(np.count_nonzero(x_chunk != y_chunk))
        budget_bits = int(math.floor(entry.delta_j * x_chunk.size + 1e-9))
        if mismatches > budget_bits:
            raise RuntimeError(
                f"chunk {j}: achieved {mismatches} flips over budget {budget_bits}")
        y[lo:hi] = y_chunk
        outcomes.append(ChunkOutcome(
            j=j, s_j=s_j, delta_planned=entry.delta_j,
            delta_achieved=mismatches / x_chunk.size,
            t_planned=entry.t_j,
            t_achieved=est.estimate(y_chunk, y[:lo])))

    used = chunk_boundary(count + 1)
    ts = tail_start if tail_start is not None else min(default_tail_start(count), count)
    dim_before = sequence_dim(bx[:used], est, ts).tail_min
    dim_after = sequence_dim(y[:used], est, ts).tail_min
    distance = sequence_distance(bx[:used], y[:used], ts).tail_max
    report = SurgeryReport(
        plan=plan, outcomes=outcomes, dim_before=dim_before,
        dim_after=dim_after, distance=distance,
        codebook_rate=(index_bits_total / used if plan.strategy == LOWER else None))
    return BitSequence(y), report


# ---------------------------------------------------------------------------
# Tight pair construction.
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=32)
def _cached_cover(block_len: int, radius: int) -> Codebook:
    return greedy_cover(block_len, radius)


@functools.lru_cache(maxsize=32)
def _cached_subcode(block_len: int, radius: int, m: int) -> Codebook:
    return best_subcode(_cached_cover(block_len, radius), m)


@dataclass
class TightPairReport:
    s: float
    t: float
    block_len: int
    subcode_size: int
    draw_radius: int
    x_rate: float               # log2 |D| / L
    y_rate: float               # log2(|D| * V(L, r_draw)) / L
    distance: float             # measured tail max
    expected_distance: float    # mean ball weight / L


def build_tight_pair(s: float, t: float, chunks: int, seed: int,
                     block_len: int = DEFAULT_BLOCK_LEN):
    """Construct (X, Y) with X on a rate-s subcode, Y = X + a random ball
    offset, realizing distance about g(t - s) with Y-rate about t.

    Per block: X takes a random word of D = best_subcode(C, 2^(sL)) for a
    greedy cover C at radius ~ g(t-s) L, and Y adds a uniform offset from
    the smallest ball whose index rate tops up the Y description to
    (t - 0.03) L bits.  The finite-block log-size allowance lands on the
    draw radius, so the measured distance sits within the fat-block
    tolerance of g(t - s) rather than strictly below it.
    """
    if not 0.0 <= s < t <= 1.0:
        raise ValueError(f"need 0 <= s < t <= 1, got s={s}, t={t}")
    L = block_len
    m = max(1, round(2.0 ** (s * L)))
    want_bits = (t - 0.03) * L
    r_draw = 0
    while r_draw < L and math.log2(m * ball_volume(L, r_draw)) < want_bits:
        r_draw += 1
    # the cover radius must reach the draw radius so Y stays inside the
    # subcode's covered region
    r_cov = max(1, round(float(entropy_inv(t - s)) * L), r_draw)
    base = _cached_cover(L, r_cov)
    m = min(len(base.words), m)
    sub = _cached_subcode(L, r_cov, m)
    offsets = ball_offsets(L, r_draw)
    pop = np.bitwise_count(offsets.astype(np.int64))
    expected_distance = float(pop.mean()) / L

    rng = np.random.default_rng(seed)
    total = chunk_boundary(chunks + 1)
    xb = np.zeros(total, dtype=np.uint8)
    yb = np.zeros(total, dtype=np.uint8)
    words = np.asarray(sub.words, dtype=np.int64)
    for j in range(1, chunks + 1):
        lo, hi = chunk_boundary(j), chunk_boundary(j + 1)
        pos = lo
        while pos + L <= hi:
            w = int(words[rng.integers(0, len(words))])
            off = int(offsets[rng.integers(0, len(offsets))])
            xb[pos:pos + L] = _word_to_bits(w, L)
            yb[pos:pos + L] = _word_to_bits(w ^ off, L)
            pos += L
        # remainder bits (< L) are copied zeros on both sides: zero distance,
        # zero rate, and a vanishing share of every tail chunk
    x, y = BitSequence(xb), BitSequence(yb)
    ts = min(default_tail_start(chunks), chunks)
    dist = sequence_distance(x, y, ts).tail_max if chunks >= 2 else 0.0
    report = TightPairReport(
        s=s, t=t, block_len=L, subcode_size=m, draw_radius=r_draw,
        x_rate=math.log2(m) / L,
        y_rate=math.log2(m * ball_volume(L, r_draw)) / L,
        distance=dist, expected_distance=expected_distance)
    return x, y, report
