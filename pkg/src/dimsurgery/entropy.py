"""Binary entropy calculus: H, its [0,1/2] inverse branch, the raise profile
M(s, eps) = H(min(1/2, H^{-1}(s) + eps)), bound curves between dimensions,
line constructions for the two raise strategies, and numeric verification of
the convexity/concavity facts those strategies rest on.

All scalar inputs named like probabilities/dimensions live in [0, 1]; the
entropy-facing functions also accept numpy arrays and vectorize elementwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

LN2 = math.log(2.0)

# Bisection iteration count for the entropy inverse.  55 halvings of [0, 1/2]
# put the bracket width near 1.4e-17, which keeps |H(Hinv(y)) - y| below
# ~6e-15 even where H' blows up (y -> 0).  A 1e-13 bracket is NOT enough for
# a 1e-12 round-trip guarantee near zero.
_INV_ITERS = 55


def _require_unit(value, name: str) -> None:
    arr = np.asarray(value, dtype=float)
    if arr.size == 0:
        return
    if np.any(np.isnan(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


def _entropy_raw(p: np.ndarray) -> np.ndarray:
    # log1p keeps (1-p)*log2(1-p) accurate for small p; the where() guards
    # produce exact zeros at the endpoints without NaN intermediates.
    a = np.where(p > 0.0, p, 1.0)
    left = a * (np.log(a) / LN2)
    b = np.where(p < 1.0, p, 0.0)
    right = (1.0 - b) * (np.log1p(-b) / LN2)
    return -(left + right)


def entropy(p):
    """Binary entropy H(p) = -p log2 p - (1-p) log2(1-p), with H(0)=H(1)=0."""
    _require_unit(p, "p")
    arr = np.asarray(p, dtype=float)
    out = _entropy_raw(arr)
    return float(out) if arr.ndim == 0 else out


def _entropy_inv_scalar(y: float) -> float:
    if y >= 1.0:
        return 0.5
    if y <= 0.0:
        return 0.0
    lo, hi = 0.0, 0.5
    for _ in range(_INV_ITERS):
        mid = 0.5 * (lo + hi)
        if mid <= 0.0:
            h = 0.0
        else:
            h = -(mid * math.log2(mid) + (1.0 - mid) * math.log1p(-mid) / LN2)
        if h < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def entropy_inv(y):
    """Inverse of H on the branch mapping [0, 1] onto [0, 1/2].

    Bisection; monotone nondecreasing, entropy_inv(0) = 0 and
    entropy_inv(1) = 0.5 exactly, and |entropy(entropy_inv(y)) - y| <= 1e-12
    everywhere on [0, 1].
    """
    _require_unit(y, "y")
    arr = np.asarray(y, dtype=float)
    if arr.ndim == 0:
        return _entropy_inv_scalar(float(arr))
    lo = np.zeros_like(arr)
    hi = np.full_like(arr, 0.5)
    for _ in range(_INV_ITERS):
        mid = 0.5 * (lo + hi)
        # midpoints stay strictly inside (0, 1/2), so no endpoint guards needed
        h = -(mid * np.log2(mid) + (1.0 - mid) * (np.log1p(-mid) / LN2))
        go_right = h < arr
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)
    out = 0.5 * (lo + hi)
    out = np.where(arr >= 1.0, 0.5, out)
    out = np.where(arr <= 0.0, 0.0, out)
    return out


def entropy_deriv(p):
    """H'(p) = log2((1-p)/p) for p in (0, 1); infinite slope at the endpoints."""
    arr = np.asarray(p, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError(f"p must lie strictly inside (0, 1), got {p!r}")
    out = np.log2((1.0 - arr) / arr)
    return float(out) if arr.ndim == 0 else out


def raise_profile(s, eps):
    """M(s, eps) = H(min(1/2, H^{-1}(s) + eps)).

    The largest dimension reachable from dimension s by changing an eps
    density of bits.  Nondecreasing in both arguments, M(s, 0) = s, and
    M(s, eps) = 1 once H^{-1}(s) + eps >= 1/2.
    """
    _require_unit(s, "s")
    _require_unit(eps, "eps")
    g = np.asarray(entropy_inv(s), dtype=float)
    x = np.minimum(0.5, g + np.asarray(eps, dtype=float))
    out = _entropy_raw(np.asarray(x, dtype=float))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class BoundCurves:
    """The three distance bounds between a dimension-s and a dimension-t sequence."""

    naive: float   # H^{-1}(t - s): symmetric-difference counting bound
    raise_: float  # H^{-1}(t) - H^{-1}(s): cost of raising s up to t
    lower: float   # H^{-1}(1 - s): cost of lowering an arbitrary sequence to s


def bound_curves(s: float, t: float) -> BoundCurves:
    """Evaluate all three bound curves at (s, t); requires s <= t."""
    _require_unit(s, "s")
    _require_unit(t, "t")
    if s > t:
        raise ValueError(f"need s <= t, got s={s}, t={t}")
    return BoundCurves(
        naive=entropy_inv(t - s),
        raise_=entropy_inv(t) - entropy_inv(s),
        lower=entropy_inv(1.0 - s),
    )


@dataclass(frozen=True)
class LineFn:
    """Affine function x -> slope*x + intercept."""

    slope: float
    intercept: float

    def __call__(self, x):
        if np.ndim(x):
            return self.slope * np.asarray(x, dtype=float) + self.intercept
        return self.slope * float(x) + self.intercept


CASE1 = "case1"
CASE2 = "case2"


def _weighted_inv_slope(x: float) -> float:
    # (1-x) * g'(x) with g = entropy_inv; g'(x) = 1/H'(g(x)).  Limit 0 at x=0.
    if x == 0.0:
        return 0.0
    return (1.0 - x) / entropy_deriv(entropy_inv(x))


_CASE_TIE_TOL = 1e-9


def case_select(s: float, t: float) -> str:
    """Pick the raise strategy for the pair s < t (both strictly inside [0,1)).

    Returns CASE1 iff (1-s)g'(s) <= (1-t)g'(t) with g = entropy_inv.  Both
    strategies are valid under a non-strict inequality, so near-ties (within
    1e-9) also resolve to CASE1.
    """
    _require_unit(s, "s")
    _require_unit(t, "t")
    if not s < t or t >= 1.0:
        raise ValueError(f"need 0 <= s < t < 1, got s={s}, t={t}")
    return CASE1 if _weighted_inv_slope(s) <= _weighted_inv_slope(t) + _CASE_TIE_TOL else CASE2


def tangent_line(s: float, delta: float) -> LineFn:
    """Tangent line to r(x) = raise_profile(x, delta) at x = s.

    Slope g'(s)/g'(t) with t = M(s, delta).  Requires g(s) + delta < 1/2
    (otherwise r is flat at 1 near s and has no informative tangent).
    """
    _require_unit(s, "s")
    _require_unit(delta, "delta")
    g_s = entropy_inv(s)
    if g_s + delta >= 0.5:
        raise ValueError(f"raise profile saturates at (s={s}, delta={delta}); no tangent")
    value = raise_profile(s, delta)
    if delta == 0.0:
        slope = 1.0
    elif s == 0.0:
        slope = 0.0
    else:
        slope = entropy_deriv(g_s + delta) / entropy_deriv(g_s)
    return LineFn(slope=slope, intercept=value - slope * s)


def chord_line(s: float, t: float) -> LineFn:
    """The line through (s, t) and (1, 1): x -> (1-t)/(1-s) x + (t-s)/(1-s)."""
    _require_unit(s, "s")
    _require_unit(t, "t")
    if s >= 1.0:
        raise ValueError("chord line undefined at s = 1")
    return LineFn(slope=(1.0 - t) / (1.0 - s), intercept=(t - s) / (1.0 - s))


def drop_profile(x, line: LineFn):
    """p(x) = g(line(x)) - g(x) with g = entropy_inv; line(x) must stay in [0,1]."""
    _require_unit(x, "x")
    y = line(x)
    _require_unit(y, "line(x)")
    out = np.asarray(entropy_inv(y)) - np.asarray(entropy_inv(x))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Numeric verification of the shape facts behind the two raise strategies.
# ---------------------------------------------------------------------------

# Central second differences use this step; tolerances are on the raw
# (undivided) differences, so float noise sits ~8 orders below them.
_D2_STEP = 1e-4
_D2_TOL = 1e-6


@dataclass(frozen=True)
class ConvexityReport:
    """Outcome of a grid check of a convex-then-concave (or concave) shape claim."""

    inflection: float | None
    grid_step: float
    sign_pattern_ok: bool
    worst_violation: float


def _f_aux(y):
    """f(y) = y(1-y) log2(1/y - 1); sign proxy for the curvature of the raise profile."""
    y = np.asarray(y, dtype=float)
    return y * (1.0 - y) * np.log2(1.0 / y - 1.0)


def _f_aux_d2(y):
    """f''(y) = -(1-2y)/(ln2 (y - y^2)) - 2 log2(1/y - 1)."""
    y = np.asarray(y, dtype=float)
    return -(1.0 - 2.0 * y) / (LN2 * (y - y * y)) - 2.0 * np.log2(1.0 / y - 1.0)


def verify_convexity_lemma(delta: float, grid_step: float = 1e-3,
                           tol: float = _D2_TOL) -> ConvexityReport:
    """Check that r(x) = raise_profile(x, delta) is convex then concave on (0, 1).

    Locates the unique sign change z of w(y) = f(y+delta) - f(y) on
    (0, 1/2 - delta) by grid scan plus bisection, checks f'' < 0 on (0, 1/2),
    and checks the raw second differences of r: >= -tol left of the
    inflection H(z), <= +tol right of it.
    """
    if not 0.0 < delta < 0.5:
        raise ValueError(f"delta must lie in (0, 1/2), got {delta}")
    if grid_step <= 0.0:
        raise ValueError("grid_step must be positive")

    hi = 0.5 - delta
    ys = np.arange(grid_step, hi, grid_step)
    ys = ys[(ys > 0.0) & (ys < hi)]
    w = _f_aux(ys + delta) - _f_aux(ys)
    signs = np.sign(w)
    changes = np.flatnonzero(np.diff(signs < 0))
    single_change = len(changes) == 1 and signs[0] > 0 and signs[-1] < 0

    inflection = None
    if single_change:
        a, b = ys[changes[0]], ys[changes[0] + 1]
        for _ in range(80):
            mid = 0.5 * (a + b)
            if _f_aux(mid + delta) - _f_aux(mid) > 0:
                a = mid
            else:
                b = mid
        z_y = 0.5 * (a + b)
        inflection = float(entropy(z_y))  # back to x-space: x = H(y)

    interior = np.arange(grid_step, 0.5, grid_step)
    interior = interior[(interior > 0.0) & (interior < 0.5)]
    f_dd_ok = bool(np.all(_f_aux_d2(interior) < 0.0))

    worst = 0.0
    d2_ok = True
    if inflection is not None:
        h = _D2_STEP
        xs = np.arange(grid_step, 1.0, grid_step)
        xs = xs[(xs - h > 0.0) & (xs + h < 1.0)]
        stencil = np.concatenate([xs - h, xs, xs + h])
        r = raise_profile(stencil, delta)
        m = len(xs)
        d2 = r[2 * m:] - 2.0 * r[m:2 * m] + r[:m]
        convex_side = xs < inflection
        viol = np.maximum(np.where(convex_side, -d2, d2) - tol, 0.0)
        worst = float(viol.max(initial=0.0))
        d2_ok = worst == 0.0

    return ConvexityReport(
        inflection=inflection,
        grid_step=grid_step,
        sign_pattern_ok=single_change and f_dd_ok and d2_ok,
        worst_violation=worst,
    )


def _h_aux(y):
    """h(y) = ln(2-2y) - y(2-3y+2y^2) ln(1/y - 1); appears under p''(x) <= 0."""
    y = np.asarray(y, dtype=float)
    return np.log(2.0 - 2.0 * y) - y * (2.0 - 3.0 * y + 2.0 * y * y) * np.log(1.0 / y - 1.0)


def _h_aux_d2(y):
    """h''(y) = (3(1-y)y ln(1/y-1) + (1-2y)) / (2y(1-y)(1-2y))."""
    y = np.asarray(y, dtype=float)
    num = 3.0 * (1.0 - y) * y * np.log(1.0 / y - 1.0) + (1.0 - 2.0 * y)
    den = 2.0 * y * (1.0 - y) * (1.0 - 2.0 * y)
    return num / den


def verify_concavity_lemma(grid_step: float = 2e-3, tol: float = _D2_TOL,
                           h_tol: float = 1e-9) -> ConvexityReport:
    """Check that p(x) = g(a x + 1 - a) - g(x) is concave for every slope a in (0, 1].

    Grid check of raw second differences of p over an (a, x) grid, plus the
    independent route: h'' >= -h_tol on a grid and h(1/2) = h'(1/2) = 0.
    """
    if grid_step <= 0.0:
        raise ValueError("grid_step must be positive")
    n = max(4, round(1.0 / grid_step))
    a_grid = np.linspace(0.0, 1.0, n + 1)[1:]
    xs = np.linspace(0.0, 1.0, n + 2)[1:-1]

    h = _D2_STEP
    x_stencil = np.concatenate([xs - h, xs, xs + h])
    g_x = np.asarray(entropy_inv(x_stencil))

    worst = 0.0
    ok = True
    for a in a_grid:
        ell = a * x_stencil + (1.0 - a)
        g_l = np.asarray(entropy_inv(np.clip(ell, 0.0, 1.0)))
        p = g_l - g_x
        m = len(xs)
        d2 = p[2 * m:] - 2.0 * p[m:2 * m] + p[:m]
        v = float(np.max(d2 - tol, initial=0.0))
        if v > 0.0:
            ok = False
            worst = max(worst, v)

    y_grid = np.linspace(0.0, 1.0, n + 2)[1:-1]
    y_grid = y_grid[np.abs(y_grid - 0.5) > 1e-9]
    h_dd = _h_aux_d2(y_grid)
    h_ok = bool(np.all(h_dd >= -h_tol))
    if not h_ok:
        worst = max(worst, float(np.max(-h_dd - h_tol)))

    u = 1e-4
    center_ok = abs(float(_h_aux(0.5))) <= 1e-12
    deriv_ok = abs(float(_h_aux(0.5 + u) - _h_aux(0.5 - u)) / (2 * u)) <= 1e-7

    return ConvexityReport(
        inflection=None,
        grid_step=grid_step,
        sign_pattern_ok=ok and h_ok and center_ok and deriv_ok,
        worst_violation=worst,
    )


def uplift_gap(eps: float, grid_step: float = 1e-4) -> float:
    """Largest d >= 0 (to grid precision) with M(x, eps) >= d + (1-d)x on [0, 1].

    Grid minimization of phi(x) = (M(x, eps) - x)/(1 - x), refined locally
    around the grid argmin, then shaved by a 1e-9 guard so the affine lower
    bound holds at off-grid points too.  Positive for eps > 0, nondecreasing
    in eps, and 0 at eps = 0.
    """
    _require_unit(eps, "eps")
    if eps == 0.0:
        return 0.0
    xs = np.arange(0.0, 1.0, grid_step)
    phi = (np.asarray(raise_profile(xs, eps)) - xs) / (1.0 - xs)
    i = int(np.argmin(phi))
    lo = max(0.0, xs[i] - 2.0 * grid_step)
    hi = min(1.0 - grid_step, xs[i] + 2.0 * grid_step)
    res = minimize_scalar(
        lambda x: (raise_profile(float(x), eps) - x) / (1.0 - x),
        bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-12},
    )
    d = min(float(phi[i]), float(res.fun)) - 1e-9
    return max(0.0, d)


class ScheduleError(RuntimeError):
    """A slack schedule cannot be built (tail average of the input is too high)."""


def tail_average_floor(s_seq, tail_start: int | None = None) -> float:
    """Finite liminf surrogate of the quadratically weighted chunk averages.

    Minimum over boundaries j >= tail_start (default: half the horizon) of
    (1/n_j) sum_{i<j} s_i i^2, clamped to [0, 1].
    """
    s_arr = np.asarray(list(s_seq), dtype=float)
    horizon = len(s_arr)
    if horizon < 2:
        raise ValueError("need at least two chunk values")
    _require_unit(s_arr, "s_seq")
    js = np.arange(1, horizon + 1)
    w = js.astype(float) ** 2
    n = (js - 1) * js * (2 * js - 1) / 6.0
    avg = np.cumsum(s_arr * w)[:-1] / n[1:]          # A_j for j = 2..horizon
    start = max(1, horizon // 2) if tail_start is None else max(2, tail_start)
    return float(min(1.0, np.min(avg[start - 2:]) if start - 2 < len(avg) else avg[-1]))


def buffer_schedule(c: float, s_seq, horizon: int,
                    grid_step: float = 1e-4):
    """Halving slack schedule eps_1=1, eps_{j} in {eps_{j-1}, eps_{j-1}/2} and a
    constant b such that for every j <= horizon

        sum_{i<=j} M(s_i, eps_i) i^2  -  c j^2  >  s n_j - b,

    where s is the tail-minimum surrogate of (1/n_j) sum_{i<j} s_i i^2.

    eps halves at j only once j clears a threshold N_eps computed by direct
    scan from the affine uplift bound of uplift_gap; b absorbs every j up to
    the first threshold.  The inequality is re-checked for the whole horizon
    before returning.  Raises ScheduleError when the surrogate s is 1 (no
    headroom; use a full randomize plan instead).
    """
    if c < 0:
        raise ValueError("c must be nonnegative")
    s_arr = np.asarray(list(s_seq), dtype=float)
    if len(s_arr) < horizon:
        raise ValueError(f"need at least horizon={horizon} chunk dims, got {len(s_arr)}")
    _require_unit(s_arr, "s_seq")
    s_arr = s_arr[:horizon]

    js = np.arange(1, horizon + 1)
    w = js.astype(float) ** 2
    n = (js - 1) * js * (2 * js - 1) / 6.0          # n_j
    prefix = np.cumsum(s_arr * w)                    # sum_{i<=j} s_i i^2
    s_sur = tail_average_floor(s_arr)
    if s_sur >= 1.0 - 1e-12:
        raise ScheduleError("tail average is 1; no buffer headroom")

    uplift_cache: dict[float, float] = {}
    thresh_cache: dict[float, int] = {}

    def threshold(eps: float) -> int:
        if eps in thresh_cache:
            return thresh_cache[eps]
        d = uplift_cache.get(eps)
        if d is None:
            d = uplift_gap(eps, grid_step)
            uplift_cache[eps] = d
        if d <= 0.0:
            thresh_cache[eps] = horizon  # never adopted inside the horizon
            return horizon
        delta = 0.5 * d * (1.0 - s_sur) / (2.0 - d)
        ok = (prefix >= (s_sur - delta) * n) & (delta * n > c * w)
        bad = np.flatnonzero(~ok)
        t = int(bad[-1] + 1) if len(bad) else 0
        thresh_cache[eps] = t
        return t

    eps = np.empty(horizon)
    eps[0] = 1.0
    for j in range(2, horizon + 1):
        half = eps[j - 2] / 2.0
        eps[j - 1] = half if j > threshold(half) else eps[j - 2]

    m_prefix = np.cumsum(np.asarray(raise_profile(s_arr, eps)) * w)
    n1 = min(threshold(1.0), horizon)
    b = 1.0
    if n1 >= 1:
        b = max(1.0, float(np.max(s_sur * n[:n1] + c * w[:n1] - m_prefix[:n1])) + 1.0)

    if not np.all(m_prefix - c * w > s_sur * n - b):
        raise ScheduleError("internal: schedule failed its own inequality check")
    return eps.tolist(), b
