"""Standard-Gaussian CDF primitives and a monotone root finder.

Everything else in this package reduces to evaluating the standard normal
CDF accurately (including deep in the lower tail, in log space) and to
inverting monotone scalar functions built from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

from .errors import BracketingError, DomainError

_SQRT2 = math.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Below this point the erfc route is replaced by the tail series.  erfc is
# still normal (no subnormal loss) at t = -30, and the series truncation
# error there is ~1e-21 relative, far below the 1e-12 tail requirement.
_TAIL_SERIES_CUTOFF = -30.0


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def std_gaussian_cdf(t: float) -> float:
    """Standard normal CDF, accurate to about 1e-15 absolute error.

    Evaluated through the complementary error function so both tails
    stay accurate; underflows to 0.0 for t below roughly -38.
    """
    t = _check_finite("t", t)
    return 0.5 * math.erfc(-t / _SQRT2)


def log_std_gaussian_cdf(t: float) -> float:
    """Natural log of the standard normal CDF.

    The direct CDF underflows near t = -38, so the lower tail is computed
    from the complementary error function and, deeper down, from the
    asymptotic expansion of the Mills ratio.  Relative error stays below
    1e-12 throughout the tail.
    """
    t = _check_finite("t", t)
    if t >= 0.0:
        # 1 - Phi(t) is tiny here; log1p keeps full precision.
        return math.log1p(-0.5 * math.erfc(t / _SQRT2))
    if t > _TAIL_SERIES_CUTOFF:
        return math.log(0.5 * math.erfc(-t / _SQRT2))
    return _log_cdf_tail_series(t)


def _log_cdf_tail_series(t: float) -> float:
    # Phi(t) = phi(s)/s * sum_k (-1)^k (2k-1)!!/s^(2k) with s = -t >= 30.
    s = -t
    inv_s2 = 1.0 / (s * s)
    term = 1.0
    total = 1.0
    for k in range(1, 11):
        term *= -(2 * k - 1) * inv_s2
        total += term
    return -0.5 * s * s - math.log(s) - _LOG_SQRT_2PI + math.log(total)


@dataclass(frozen=True)
class BisectionOutcome:
    """Result of a bracketed bisection run.

    ``root`` is the endpoint of the final bracket at which the function
    value is on the <= target side, so callers that need a conservative
    answer can use it directly.
    """

    root: float
    iterations: int
    bracket_low: float
    bracket_high: float


Direction = Literal["increasing", "decreasing"]


def bracket_and_bisect(
    g: Callable[[float], float],
    target: float,
    direction: Direction = "increasing",
    tolerance: float = 1e-12,
    *,
    value_tolerance: float | None = None,
    max_doublings: int = 64,
) -> BisectionOutcome:
    """Solve g(x) = target for monotone g on [0, inf).

    The bracket is found by doubling from 1 (1, 2, 4, ... 2**k) until g
    crosses the target, so g is never evaluated outside [0, 2**k].  If the
    crossing already happens at or before x = 0 the root clamps to 0 with
    zero iterations.

    Args:
      g: monotone function of one nonnegative float.
      target: level to solve for.
      direction: whether g is "increasing" or "decreasing".
      tolerance: final bracket width.  When the bracket collapses to
        adjacent floats before reaching it, the achievable width is kept.
      value_tolerance: optional extra stopping requirement on
        ``target - g(root)``; bisection continues until the gap is at most
        this (or float resolution is exhausted).
      max_doublings: cap on the bracketing exponent k.

    Returns:
      BisectionOutcome with ``g(root) <= target`` (up to the sign frozen
      by the final bracket) and ``|root - x*| <= max(tolerance, width)``.

    Raises:
      DomainError: on invalid tolerance/direction.
      BracketingError: if g never crosses target up to 2**max_doublings.
    """
    if direction not in ("increasing", "decreasing"):
        raise DomainError(f"direction must be 'increasing' or 'decreasing', got {direction!r}")
    tolerance = float(tolerance)
    if not tolerance > 0.0 or not math.isfinite(tolerance):
        raise DomainError(f"tolerance must be positive and finite, got {tolerance!r}")
    if value_tolerance is not None and not value_tolerance > 0.0:
        raise DomainError(f"value_tolerance must be positive, got {value_tolerance!r}")
    increasing = direction == "increasing"

    g0 = g(0.0)
    # Feasible side is g(x) <= target.  For increasing g the feasible set is
    # an initial segment whose supremum is wanted; for decreasing g it is a
    # final segment whose infimum is wanted.  Either way a crossing at or
    # below 0 clamps the answer to 0.
    if increasing and g0 >= target:
        return BisectionOutcome(root=0.0, iterations=0, bracket_low=0.0, bracket_high=0.0)
    if not increasing and g0 <= target:
        return BisectionOutcome(root=0.0, iterations=0, bracket_low=0.0, bracket_high=0.0)

    hi = 1.0
    g_hi = g(hi)
    doublings = 0
    while (g_hi <= target) if increasing else (g_hi > target):
        doublings += 1
        if doublings > max_doublings:
            raise BracketingError(
                f"no crossing of target={target!r} found up to x=2**{max_doublings}"
            )
        hi *= 2.0
        g_hi = g(hi)
    if doublings == 0:
        lo, g_lo = 0.0, g0
    else:
        lo = hi / 2.0
        g_lo = None  # known to be on the feasible side; value refreshed lazily

    # Invariant: for increasing g, g(lo) <= target < g(hi); for decreasing g,
    # g(lo) > target >= g(hi).  The feasible endpoint is lo when increasing,
    # hi when decreasing.
    def feasible_gap() -> float:
        nonlocal g_lo
        if increasing:
            if g_lo is None:
                g_lo = g(lo)
            return target - g_lo
        return target - g_hi

    iterations = 0
    while True:
        width_ok = (hi - lo) <= tolerance
        gap_ok = value_tolerance is None or abs(feasible_gap()) <= value_tolerance
        if width_ok and gap_ok:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # float resolution exhausted
        g_mid = g(mid)
        iterations += 1
        # The infeasible side (g > target) sits at lo for decreasing g and at
        # hi for increasing g; this update preserves that in both cases.
        if (g_mid <= target) == increasing:
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid

    root = lo if increasing else hi
    return BisectionOutcome(root=root, iterations=iterations, bracket_low=lo, bracket_high=hi)
