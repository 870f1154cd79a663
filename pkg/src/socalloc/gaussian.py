"""Scalar probability functions for the standard Gaussian.

Provides the CDF, its inverse, the mean-excess function

    mean_excess(z) = pdf(z) / (1 - CDF(z)) - z,

its inverse, and the safety coefficient that merges a confidence level
and a normalized conditional-expectation cap into a single number of
standard deviations of slack.

The upper tail 1 - CDF(z) is always evaluated through ``math.erfc`` so
there is no catastrophic cancellation for large z; beyond z = 30 the
mean excess switches to an asymptotic expansion because erfc itself
underflows near z ~ 37.
"""

from __future__ import annotations

import math

from .errors import ConfigError, DomainError

SQRT_2 = math.sqrt(2.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

#: Value of the mean-excess function at zero, sqrt(2/pi).  The safety
#: coefficient is strictly positive exactly when the confidence level
#: exceeds 1/2 or the normalized cap is below this constant.
MEAN_EXCESS_AT_ZERO = math.sqrt(2.0 / math.pi)

# Above this point pdf/survival is evaluated by series expansion; the two
# branches agree to ~4e-11 absolute at the seam.
_TAIL_CUTOFF = 30.0


def _require_finite(x: float, name: str) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


def std_normal_pdf(z: float) -> float:
    """Density of the standard normal at z."""
    z = _require_finite(z, "z")
    return INV_SQRT_2PI * math.exp(-0.5 * z * z)


def std_normal_cdf(z: float) -> float:
    """Cumulative distribution function of the standard normal.

    Evaluated as erfc(-z/sqrt(2))/2, which is accurate in both tails.

    Raises
    ------
    DomainError
        If z is NaN or infinite.
    """
    z = _require_finite(z, "z")
    return 0.5 * math.erfc(-z / SQRT_2)


def std_normal_sf(z: float) -> float:
    """Upper tail 1 - CDF(z), computed without subtraction."""
    z = _require_finite(z, "z")
    return 0.5 * math.erfc(z / SQRT_2)


def std_normal_quantile(p: float) -> float:
    """Inverse CDF of the standard normal.

    Safeguarded Newton iteration against ``std_normal_cdf``: a bisection
    bracket is maintained and any Newton step leaving it falls back to
    the midpoint.  The result x satisfies CDF(x) = p to well below 1e-9.

    Raises
    ------
    DomainError
        If p is not strictly inside (0, 1).
    """
    p = float(p)
    if not (0.0 < p < 1.0) or not math.isfinite(p):
        raise DomainError(f"p must be in (0, 1), got {p!r}")

    lo, hi = -40.0, 40.0  # CDF saturates to 0/1 well inside this range
    x = 0.0
    for _ in range(200):
        f = std_normal_cdf(x) - p
        if f > 0.0:
            hi = x
        elif f < 0.0:
            lo = x
        else:
            return x
        df = std_normal_pdf(x)
        if df > 0.0:
            x_new = x - f / df
        else:
            x_new = 0.5 * (lo + hi)
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-15 * max(1.0, abs(x_new)):
            return x_new
        x = x_new
    return x


def _mean_excess_tail(z: float) -> float:
    # pdf/sf - z for large z via the Mills-ratio expansion:
    # 1/z - 2/z^3 + 10/z^5 - 74/z^7 + O(1/z^9).
    u = 1.0 / (z * z)
    return z * (u - 2.0 * u * u + 10.0 * u ** 3 - 74.0 * u ** 4)


def mean_excess(z: float) -> float:
    """Expected overshoot of a standard normal above z, given overshoot.

    Equals pdf(z)/(1 - CDF(z)) - z.  Strictly decreasing, equal to
    sqrt(2/pi) at zero, asymptotic to 1/z as z grows and to -z as z
    falls.

    Raises
    ------
    DomainError
        If z is NaN or infinite.
    """
    z = _require_finite(z, "z")
    if z > _TAIL_CUTOFF:
        return _mean_excess_tail(z)
    return std_normal_pdf(z) / std_normal_sf(z) - z


def mean_excess_inverse(gamma_tilde: float) -> float:
    """Solve mean_excess(z) = gamma_tilde for z.

    Monotone root finding: the bracket is grown geometrically from zero
    in the correct direction, then tightened by Newton steps (using
    d/dz mean_excess = (mean_excess + z) * mean_excess - 1) with
    bisection as the safeguard.  The result satisfies
    |mean_excess(z) - gamma_tilde| <= 1e-12 * max(1, gamma_tilde).

    Raises
    ------
    DomainError
        If gamma_tilde is not a finite positive number.
    """
    g = float(gamma_tilde)
    if not (g > 0.0) or not math.isfinite(g):
        raise DomainError(f"gamma_tilde must be positive, got {gamma_tilde!r}")

    if g == MEAN_EXCESS_AT_ZERO:
        return 0.0
    if g < MEAN_EXCESS_AT_ZERO:
        lo, hi = 0.0, 1.0
        while mean_excess(hi) > g:
            lo, hi = hi, 2.0 * hi
    else:
        lo, hi = -1.0, 0.0
        while mean_excess(lo) < g:
            lo, hi = 2.0 * lo, lo

    tol = 1e-12 * max(1.0, g)
    x = 0.5 * (lo + hi)
    for _ in range(200):
        f = mean_excess(x) - g
        if abs(f) <= tol:
            return x
        if f > 0.0:  # mean_excess decreasing: value too high means x too low
            lo = x
        else:
            hi = x
        slope = (mean_excess(x) + x) * mean_excess(x) - 1.0
        if slope < 0.0:
            x_new = x - f / slope
        else:
            x_new = 0.5 * (lo + hi)
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-16 * max(1.0, abs(x_new)):
            return x_new
        x = x_new
    return x


def safety_coefficient(eta: float | None = None,
                       gamma_tilde: float | None = None) -> float:
    """Standard deviations of slack implied by the risk targets.

    The confidence level ``eta`` contributes quantile(eta); the
    normalized conditional-expectation cap ``gamma_tilde`` contributes
    mean_excess_inverse(gamma_tilde).  With both present the binding
    (larger) requirement wins.

    Raises
    ------
    ConfigError
        If neither target is given.
    DomainError
        If eta is outside (0, 1) or gamma_tilde is not positive.
    """
    if eta is None and gamma_tilde is None:
        raise ConfigError("need at least one of eta, gamma_tilde")
    branches = []
    if eta is not None:
        branches.append(std_normal_quantile(eta))
    if gamma_tilde is not None:
        branches.append(mean_excess_inverse(gamma_tilde))
    return max(branches)
