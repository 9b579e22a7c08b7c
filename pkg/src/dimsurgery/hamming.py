"""Hamming-space combinatorics on {0,1}^n for desk-scale n.

Words are plain Python ints: bit i of the int is sequence position i.  Exact
ball volumes, canonical extremal spheres centred at 0^n / 1^n and their
distance law, brute-force set distances, far-point counts, and covering
codes built by greedy set cover (meeting the Delsarte-Piret size bound).

Space-sized tables (2^n booleans) cap the exhaustive routines; each guard is
noted on the operation it protects.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .entropy import entropy

MAX_EXHAUSTIVE_N = 22     # one byte per word for cover tables
MAX_FAR_COUNT_N = 20
MAX_PAIRWISE_PRODUCT = 1 << 30


def ball_volume(n: int, k: int):
    """V(n, k) = sum_{i<=k} C(n, i), exactly (arbitrary precision)."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    return sum(math.comb(n, i) for i in range(k + 1))


def check_volume_entropy_bounds(n: int, r: float) -> bool:
    """True iff H(r) n - 2 log2 n <= log2 V(n, floor(rn)) <= H(r) n.

    The explicit constant 2 on the log term is safe for n >= 4 (Stirling
    gives ~0.5 log n); this check exists to catch gross volume bugs.
    """
    if not 0.0 < r < 0.5:
        raise ValueError(f"need 0 < r < 1/2, got {r}")
    k = int(math.floor(r * n + 1e-9))
    log_v = math.log2(ball_volume(n, k))
    hn = entropy(r) * n
    return hn - 2.0 * math.log2(n) <= log_v <= hn + 1e-9


# ---------------------------------------------------------------------------
# Colexicographic subset machinery (canonical partial-layer order).
# ---------------------------------------------------------------------------

def colex_combinations(n: int, k: int):
    """Yield the k-subsets of {0..n-1} as ascending tuples, in colex order."""
    if k == 0:
        yield ()
        return
    for top in range(k - 1, n):
        for rest in colex_combinations(top, k - 1):
            yield rest + (top,)


def colex_rank(subset) -> int:
    """Colex rank of a k-subset given as an ascending iterable."""
    return sum(math.comb(c, i + 1) for i, c in enumerate(subset))


def colex_unrank(rank: int, n: int, k: int) -> tuple:
    """Inverse of colex_rank for k-subsets of {0..n-1}."""
    out = [0] * k
    m = n
    while k > 0:
        m -= 1
        offset = math.comb(m, k)
        if rank >= offset:
            rank -= offset
            k -= 1
            out[k] = m
    return tuple(out)


# ---------------------------------------------------------------------------
# Harper spheres.
# ---------------------------------------------------------------------------

ZERO = "zero"
ONE = "one"


@dataclass(frozen=True)
class SphereDescriptor:
    """Canonical extremal sphere: a full ball plus a colex prefix of the next layer."""

    n: int
    center: str                 # ZERO or ONE
    inner_radius: int           # k: the full ball has radius k (in bits)
    partial_layer: int          # how many weight-(k+1) words are included
    layer_order: str = "colex"

    @property
    def size(self):
        return ball_volume(self.n, self.inner_radius) + self.partial_layer


def sphere_for_size(n: int, size, center: str = ZERO) -> SphereDescriptor:
    """The canonical sphere of exactly `size` words centred at 0^n or 1^n."""
    if center not in (ZERO, ONE):
        raise ValueError(f"center must be {ZERO!r} or {ONE!r}")
    if not 1 <= size <= (1 << n):
        raise ValueError(f"size {size} out of range for n={n}")
    vol = 1
    k = 0
    while vol <= size:
        nxt = vol + math.comb(n, k + 1) if k < n else None
        if k == n or nxt > size:
            break
        vol = nxt
        k += 1
    return SphereDescriptor(n=n, center=center, inner_radius=k,
                            partial_layer=size - vol)


def sphere_words(desc: SphereDescriptor) -> np.ndarray:
    """Materialize a sphere as a word array (exhaustive; needs modest n)."""
    n = desc.n
    if n > MAX_EXHAUSTIVE_N:
        raise ValueError(f"sphere materialization capped at n={MAX_EXHAUSTIVE_N}")
    ball = np.flatnonzero(popcount_table(n) <= desc.inner_radius).astype(np.int64)
    extra = []
    if desc.partial_layer:
        gen = colex_combinations(n, desc.inner_radius + 1)
        for _, subset in zip(range(desc.partial_layer), gen):
            extra.append(sum(1 << i for i in subset))
    words = np.concatenate([ball, np.asarray(extra, dtype=np.int64)]) if extra else ball
    if desc.center == ONE:
        words = words ^ ((1 << n) - 1)
    return words


@lru_cache(maxsize=None)
def _disjoint_rank_prefix_min(n: int, a: int, b: int):
    """prefix_min[i]: over the first i+1 colex a-subsets S, the least colex rank
    of a b-subset disjoint from S.  None when a + b > n (no disjoint pair)."""
    if a + b > n:
        return None
    mins = np.empty(math.comb(n, a), dtype=np.int64)
    for i, s in enumerate(colex_combinations(n, a)):
        s_set = set(s)
        z = []
        for e in range(n):
            if e not in s_set:
                z.append(e)
                if len(z) == b:
                    break
        mins[i] = colex_rank(z)
    return np.minimum.accumulate(mins)


def opposite_sphere_distance_bits(n: int, size_a, size_b) -> int:
    """Min Hamming distance (bits) between the canonical spheres of the given
    sizes centred at 0^n and 1^n.

    Full-ball pairs realize n - a - b by nested supports; partial layers add
    candidates one bit closer, the joint partial-partial candidate requiring
    an exact disjoint-support search restricted to the two boundary layers.
    """
    da = sphere_for_size(n, size_a, ZERO)
    db = sphere_for_size(n, size_b, ONE)
    ka, pa = da.inner_radius, da.partial_layer
    kb, pb = db.inner_radius, db.partial_layer
    best = n - ka - kb
    if pa > 0:
        best = min(best, n - (ka + 1) - kb)
    if pb > 0:
        best = min(best, n - ka - (kb + 1))
    if pa > 0 and pb > 0:
        table = _disjoint_rank_prefix_min(n, ka + 1, kb + 1)
        if table is not None and table[pa - 1] < pb:
            best = min(best, n - (ka + 1) - (kb + 1))
    return max(0, best)


def opposite_sphere_distance(n: int, size_a, size_b) -> float:
    """Normalized form of opposite_sphere_distance_bits."""
    return opposite_sphere_distance_bits(n, size_a, size_b) / n


# ---------------------------------------------------------------------------
# Brute-force distances (the definitional oracle).
# ---------------------------------------------------------------------------

def _min_distance_bits(words_a, words_b) -> int:
    a = np.asarray(list(words_a), dtype=np.int64)
    b = np.asarray(list(words_b), dtype=np.int64)
    if a.size == 0 or b.size == 0:
        raise ValueError("sets must be nonempty")
    if a.size * b.size > MAX_PAIRWISE_PRODUCT:
        raise ValueError("pairwise product exceeds the desk-scale guard")
    best = np.iinfo(np.int64).max
    step = max(1, (1 << 22) // max(1, b.size))
    for i in range(0, a.size, step):
        block = a[i:i + step, None] ^ b[None, :]
        best = min(best, int(np.bitwise_count(block).min()))
        if best == 0:
            break
    return best


def brute_force_set_distance(n: int, words_a, words_b) -> float:
    """Exact min pairwise normalized distance between two word sets (double loop)."""
    return _min_distance_bits(words_a, words_b) / n


# ---------------------------------------------------------------------------
# Harper verification.
# ---------------------------------------------------------------------------

@dataclass
class HarperReport:
    n: int
    trials: int
    checked: int = 0
    failures: list = field(default_factory=list)
    tightest_gap: int | None = None
    tightest_sizes: tuple | None = None

    @property
    def ok(self) -> bool:
        return not self.failures


def _log_uniform_size(rng, n: int) -> int:
    return max(1, min(1 << n, int(2.0 ** rng.uniform(0.0, n))))


def verify_harper(n: int, trials: int, seed: int) -> HarperReport:
    """Check d(A, B) <= d(A_hat, B_hat) on random and adversarial set pairs.

    Distances are compared as exact integer bit counts; any violation is a
    genuine counterexample (an implementation bug) and is recorded.
    """
    if n > 14:
        raise ValueError("exhaustive verification capped at n=14")
    rng = np.random.default_rng(seed)
    report = HarperReport(n=n, trials=trials)
    space = 1 << n

    def check(words_a, words_b):
        d_ab = _min_distance_bits(words_a, words_b)
        d_sphere = opposite_sphere_distance_bits(n, len(words_a), len(words_b))
        gap = d_sphere - d_ab
        if gap < 0:
            report.failures.append(
                {"sizes": (len(words_a), len(words_b)),
                 "d_ab_bits": d_ab, "d_sphere_bits": d_sphere})
        if report.tightest_gap is None or gap < report.tightest_gap:
            report.tightest_gap = gap
            report.tightest_sizes = (len(words_a), len(words_b))
        report.checked += 1

    for _ in range(trials):
        sa = _log_uniform_size(rng, n)
        sb = _log_uniform_size(rng, n)
        a = rng.choice(space, size=sa, replace=False)
        b = rng.choice(space, size=sb, replace=False)
        check(a, b)

    # adversarial families: antipodal balls, canonical spheres with split
    # layers (both should meet the sphere bound with equality), and overfull
    # pairs that force intersection.
    for ka in range(0, n + 1, max(1, n // 3)):
        for kb in range(0, n + 1, max(1, n // 3)):
            a = sphere_words(sphere_for_size(n, ball_volume(n, ka), ZERO))
            b = sphere_words(sphere_for_size(n, ball_volume(n, kb), ONE))
            check(a, b)
    for k in range(0, n - 1):
        layer = math.comb(n, k + 1)
        for part in {1, layer // 2, layer - 1} - {0}:
            size = ball_volume(n, k) + part
            a = sphere_words(sphere_for_size(n, size, ZERO))
            b = sphere_words(sphere_for_size(n, size, ONE))
            check(a, b)
    big = space // 2 + 1
    a = rng.choice(space, size=big, replace=False)
    b = rng.choice(space, size=big, replace=False)
    check(a, b)
    return report


def _expand_once(reached: np.ndarray, n: int) -> np.ndarray:
    out = reached.copy()
    for b in range(n):
        out |= reached.reshape(-1, 2, 1 << b)[:, ::-1, :].reshape(reached.shape)
    return out


def harper_far_count(n: int, words_a, eps: float) -> int:
    """Exact number of words at normalized distance > eps from the set A.

    BFS over the cube from A out to radius floor(eps * n); everything not
    reached is far.  Capped at n=20 (one bool per word).
    """
    if n > MAX_FAR_COUNT_N:
        raise ValueError(f"far count capped at n={MAX_FAR_COUNT_N}")
    words = np.asarray(list(words_a), dtype=np.int64)
    if words.size == 0:
        raise ValueError("A must be nonempty")
    radius = int(math.floor(eps * n + 1e-9))
    reached = np.zeros(1 << n, dtype=bool)
    reached[words] = True
    for _ in range(radius):
        reached = _expand_once(reached, n)
    return int((1 << n) - np.count_nonzero(reached))


# ---------------------------------------------------------------------------
# Covering codes.
# ---------------------------------------------------------------------------

@dataclass
class Codebook:
    """A set of n-bit words with a covering-radius claim.

    `words` keeps construction order (nearest-word ties resolve to the lowest
    index), `coverage_fraction` is the measured fraction of the space within
    `radius` of some word.
    """

    n: int
    radius: int
    words: np.ndarray
    coverage_fraction: float

    def to_text(self) -> str:
        total = 4 * ((self.n + 3) // 4)
        lines = [f"{self.n} {self.radius} {len(self.words)}"]
        for w in self.words:
            v = 0
            for i in range(self.n):
                v = (v << 1) | ((int(w) >> i) & 1)
            v <<= total - self.n
            lines.append(f"{v:0{total // 4}x}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Codebook":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        n, radius, count = (int(x) for x in lines[0].split())
        total = 4 * ((n + 3) // 4)
        words = np.empty(count, dtype=np.int64)
        for idx, ln in enumerate(lines[1:count + 1]):
            v = int(ln.strip(), 16)
            w = 0
            for i in range(n):
                w |= ((v >> (total - 1 - i)) & 1) << i
            words[idx] = w
        book = cls(n=n, radius=radius, words=words, coverage_fraction=0.0)
        book.coverage_fraction = measure_coverage(book)
        return book


def popcount_table(n: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint32)).astype(np.uint8)


def ball_offsets(n: int, r: int) -> np.ndarray:
    """All xor-offsets within Hamming distance r (the ball around 0)."""
    return np.flatnonzero(popcount_table(n) <= r)


def coverage_table(book: Codebook) -> np.ndarray:
    """Bool table over the whole space: within `radius` of some codeword."""
    n = book.n
    if n > MAX_EXHAUSTIVE_N:
        raise ValueError(f"exhaustive coverage capped at n={MAX_EXHAUSTIVE_N}")
    reached = np.zeros(1 << n, dtype=bool)
    reached[np.asarray(book.words, dtype=np.int64)] = True
    for _ in range(book.radius):
        reached = _expand_once(reached, n)
    return reached


def measure_coverage(book: Codebook, samples: int = 100_000, seed: int = 0) -> float:
    """Coverage fraction: exact for n <= 22, sampled beyond."""
    if book.n <= MAX_EXHAUSTIVE_N:
        return float(np.count_nonzero(coverage_table(book))) / float(1 << book.n)
    rng = np.random.default_rng(seed)
    pts = rng.integers(0, 1 << book.n, size=samples, dtype=np.int64)
    words = np.asarray(book.words, dtype=np.int64)
    hit = 0
    step = max(1, (1 << 22) // max(1, len(words)))
    for i in range(0, samples, step):
        block = pts[i:i + step, None] ^ words[None, :]
        hit += int(np.count_nonzero(np.bitwise_count(block).min(axis=1) <= book.radius))
    return hit / samples


def delsarte_piret_bound(n: int, r: int) -> float:
    """Upper bound 1 + n 2^n ln2 / V(n, r) on the covering number kappa(n, r)."""
    return 1.0 + n * (1 << n) * math.log(2.0) / float(ball_volume(n, r))


def _flip_sum(arr: np.ndarray, n: int) -> np.ndarray:
    """sum_b arr[x ^ (1<<b)] for every x, via strided views."""
    out = np.zeros_like(arr)
    for b in range(n):
        out += arr.reshape(-1, 2, 1 << b)[:, ::-1, :].reshape(arr.shape)
    return out


def _marginals_by_shells(uncovered: np.ndarray, n: int, r: int) -> np.ndarray:
    """For every word x, the count |ball(x, r) & uncovered|, exactly.

    Shell counts N_d(x) = #{u uncovered : d(u,x) = d} satisfy
    sum_b N_d(x^b) = (d+1) N_{d+1}(x) + (n-d+1) N_{d-1}(x); integer DP up the
    shells costs r*n contiguous passes, independent of the ball volume.
    """
    n_prev = np.zeros(uncovered.shape, dtype=np.int64)
    n_cur = uncovered.astype(np.int64)
    total = n_cur.copy()
    for d in range(r):
        s = _flip_sum(n_cur, n)
        n_next = (s - (n - d + 1) * n_prev) // (d + 1)
        n_prev, n_cur = n_cur, n_next
        total += n_cur
    return total


def _dense_greedy(n: int, r: int, offsets: np.ndarray, uncovered: np.ndarray,
                  picks: int | None = None) -> list[int]:
    """Greedy max-coverage with full marginal recomputation each step; wins
    when the cover is tiny and balls are a sizable fraction of the space."""
    chosen: list[int] = []
    remaining = int(np.count_nonzero(uncovered))
    while remaining > 0 and (picks is None or len(chosen) < picks):
        marg = _marginals_by_shells(uncovered, n, r)
        word = int(np.argmax(marg))
        hood = word ^ offsets
        gained = int(np.count_nonzero(uncovered[hood]))
        uncovered[hood] = False
        remaining -= gained
        chosen.append(word)
    return chosen


def _incremental_greedy(n: int, offsets: np.ndarray, uncovered: np.ndarray,
                        picks: int | None = None) -> list[int]:
    """Greedy max-coverage over the whole space with an exact marginal table.

    Every point gets covered exactly once, so the total table-update work is
    bounded by 2^n * |ball|; each step is an argmax over the table.  Same
    choices (first-index ties) as the heap route.
    """
    space = 1 << n
    if int(np.count_nonzero(uncovered)) != space:
        raise ValueError("incremental backend expects a fully uncovered space")
    marg = np.full(space, len(offsets), dtype=np.int32)
    chosen: list[int] = []
    remaining = space
    while remaining > 0 and (picks is None or len(chosen) < picks):
        word = int(np.argmax(marg))
        hood = word ^ offsets
        newly = hood[uncovered[hood]]
        uncovered[newly] = False
        remaining -= newly.size
        chosen.append(word)
        for i in range(0, newly.size, 1024):
            idx = (newly[i:i + 1024, None] ^ offsets[None, :]).ravel()
            marg -= np.bincount(idx, minlength=space).astype(np.int32)
    return chosen


def _lazy_greedy(n: int, offsets: np.ndarray, candidates: np.ndarray,
                 uncovered: np.ndarray, picks: int | None):
    """Lazy greedy max-coverage: repeatedly pick the candidate covering the most
    uncovered words.  Mutates `uncovered`; returns the chosen words in order.

    Heap entries are packed ints; stale bounds stay valid because marginals
    only shrink, so every accept is a true argmax.  Ties resolve to the first
    candidate that clears the remaining stale bounds (not necessarily the
    lowest word, unlike the exact-table backends).
    """
    v_max = len(offsets)
    shift = n + 1
    # key = (v_max - bound) << shift | word; every bound starts at v_max
    heap = [int(w) for w in candidates]
    heapq.heapify(heap)
    chosen: list[int] = []
    remaining = int(np.count_nonzero(uncovered))
    word_mask = (1 << shift) - 1
    while remaining > 0 and heap and (picks is None or len(chosen) < picks):
        key = heapq.heappop(heap)
        word = key & word_mask
        hood = word ^ offsets
        m = int(np.count_nonzero(uncovered[hood]))
        next_bound = v_max - (heap[0] >> shift) if heap else -1
        if m >= next_bound:
            chosen.append(word)
            uncovered[hood] = False
            remaining -= m
        elif m > 0:
            heapq.heappush(heap, ((v_max - m) << shift) | word)
    if picks is not None and len(chosen) < picks:
        # coverage exhausted early: pad with the best remaining candidates
        while heap and len(chosen) < picks:
            chosen.append(heapq.heappop(heap) & word_mask)
    return chosen


def greedy_cover(n: int, r: int) -> Codebook:
    """Greedy covering code: each step adds the word covering the most
    currently-uncovered words, until everything is covered.

    The result is verified exhaustively and its size asserted against the
    Delsarte-Piret bound (which textbook greedy always meets strictly).
    """
    if n > MAX_EXHAUSTIVE_N:
        raise ValueError(f"greedy cover capped at n={MAX_EXHAUSTIVE_N}")
    if not 0 <= r <= n:
        raise ValueError(f"need 0 <= r <= n, got r={r}")
    space = 1 << n
    if r >= n:
        book = Codebook(n=n, radius=r, words=np.array([0], dtype=np.int64),
                        coverage_fraction=1.0)
    elif r == 0:
        book = Codebook(n=n, radius=0, words=np.arange(space, dtype=np.int64),
                        coverage_fraction=1.0)
    else:
        offsets = ball_offsets(n, r)
        uncovered = np.ones(space, dtype=bool)
        # three greedy backends (argmax ties may break differently, the
        # selection per (n, r) is fixed, so the op stays deterministic):
        # lazy heap for many-step covers with tiny balls, shells DP for tiny
        # covers with huge balls, incremental marginal table in between
        est_steps = n * space * math.log(2.0) / len(offsets)
        if est_steps > 8000 and n < 19:
            chosen = _lazy_greedy(n, offsets, np.arange(space), uncovered, picks=None)
        elif len(offsets) * 32 > space:
            chosen = _dense_greedy(n, r, offsets, uncovered)
        else:
            chosen = _incremental_greedy(n, offsets, uncovered, picks=None)
        book = Codebook(n=n, radius=r, words=np.array(chosen, dtype=np.int64),
                        coverage_fraction=1.0)
    if not bool(coverage_table(book).all()):
        raise RuntimeError("greedy cover failed its own coverage check")
    if not len(book.words) < delsarte_piret_bound(n, r):
        raise RuntimeError(
            f"greedy cover size {len(book.words)} violates the Delsarte-Piret "
            f"bound {delsarte_piret_bound(n, r):.2f} at (n={n}, r={r})")
    return book


def random_cover(n: int, r: int, size: int, seed: int) -> Codebook:
    """Codebook of `size` distinct pseudo-random words with measured coverage.

    Scalable surrogate for greedy_cover at large n; coverage is exact for
    n <= 22 and sampled (1e5 points) beyond.  Deterministic given seed.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    if n > 62:
        raise ValueError("words are packed in int64; n capped at 62")
    size = min(size, 1 << n)
    rng = np.random.default_rng(seed)
    if n <= MAX_EXHAUSTIVE_N:
        words = rng.choice(1 << n, size=size, replace=False).astype(np.int64)
    else:
        seen: set[int] = set()
        while len(seen) < size:
            draw = rng.integers(0, 1 << n, size=size - len(seen), dtype=np.int64)
            seen.update(int(x) for x in draw)
        words = np.fromiter(seen, dtype=np.int64, count=size)
    book = Codebook(n=n, radius=r, words=words, coverage_fraction=0.0)
    book.coverage_fraction = measure_coverage(book, seed=seed + 1)
    return book


def best_subcode(book: Codebook, m: int) -> Codebook:
    """Greedy max-coverage subcode of size m from a covering code.

    Asserts the provable greedy coverage (1 - (1 - 1/|C|)^m) 2^n via exact
    integer arithmetic.  The stronger existential (m/|C|) 2^n bound is a
    property of the best subcode, not of greedy; callers measure it.
    """
    c = len(book.words)
    if not 1 <= m <= c:
        raise ValueError(f"need 1 <= m <= |C|={c}, got {m}")
    n = book.n
    if n > MAX_EXHAUSTIVE_N:
        raise ValueError(f"subcode selection capped at n={MAX_EXHAUSTIVE_N}")
    offsets = ball_offsets(n, book.radius)
    uncovered = np.ones(1 << n, dtype=bool)
    chosen = _lazy_greedy(n, offsets, np.asarray(book.words), uncovered, picks=m)
    covered = (1 << n) - int(np.count_nonzero(uncovered))
    # covered >= 2^n (1 - (1-1/c)^m)  <=>  uncovered * c^m <= 2^n (c-1)^m
    if ((1 << n) - covered) * c ** m > (1 << n) * (c - 1) ** m:
        raise RuntimeError("greedy subcode fell below its provable coverage bound")
    return Codebook(n=n, radius=book.radius,
                    words=np.array(chosen, dtype=np.int64),
                    coverage_fraction=covered / float(1 << n))
