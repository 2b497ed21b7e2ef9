"""Chi-square upper-tail probabilities.

The survival function of a chi-square distribution with ``df`` degrees of
freedom at ``x`` is the regularized upper incomplete gamma function
Q(df/2, x/2).  Q is computed the classic two-regime way: the lower-gamma
power series where it converges fast (x < a + 1) and a modified Lentz
continued fraction for the upper gamma elsewhere.  Both regimes iterate to
relative machine precision, which is far tighter than any tolerance used by
the analysis layer.
"""

from __future__ import annotations

import math

_EPS = 2.220446049250313e-16  # float64 machine epsilon
_TINY = 1e-300
_MAX_ITER = 10_000


def _gamma_q_series(a: float, x: float) -> float:
    """Q(a, x) = 1 - P(a, x) with P from the lower-gamma power series (x < a+1)."""
    term = 1.0 / a
    total = term
    n = a
    for _ in range(_MAX_ITER):
        n += 1.0
        term *= x / n
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    log_prefactor = a * math.log(x) - x - math.lgamma(a)
    p = total * math.exp(log_prefactor)
    return 1.0 - p


def _gamma_q_continued_fraction(a: float, x: float) -> float:
    """Q(a, x) via the Lentz continued fraction (x >= a+1)."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    log_prefactor = a * math.log(x) - x - math.lgamma(a)
    return h * math.exp(log_prefactor)


def regularized_gamma_q(a: float, x: float) -> float:
    """The regularized upper incomplete gamma function Q(a, x), a > 0, x >= 0."""
    if a <= 0.0:
        raise ValueError(f"shape parameter must be positive, got {a}")
    if x < 0.0:
        raise ValueError(f"argument must be non-negative, got {x}")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return _gamma_q_series(a, x)
    return _gamma_q_continued_fraction(a, x)


def chi2_sf(statistic: float, df: int) -> float:
    """P(X >= statistic) for X chi-square with ``df`` degrees of freedom."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    if statistic < 0.0:
        raise ValueError(f"chi-square statistic must be >= 0, got {statistic}")
    return regularized_gamma_q(df / 2.0, statistic / 2.0)
