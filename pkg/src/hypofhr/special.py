"""Survival functions for the normal, chi-square(1) and Student t laws.

Normal and chi-square(1) tails use the complementary error function
directly; the t tail is the regularized incomplete beta evaluated by
``scipy.special.stdtr``, which accepts fractional degrees of freedom
(needed for Welch-Satterthwaite df).
"""

from __future__ import annotations

import math

from scipy import special as _sp

_SQRT2 = math.sqrt(2.0)


def normal_sf(x: float) -> float:
    """P(Z > x) for a standard normal Z."""
    return 0.5 * math.erfc(x / _SQRT2)


def normal_two_sided(z: float) -> float:
    return math.erfc(abs(z) / _SQRT2)


def chisq1_sf(x: float) -> float:
    """P(X > x) for X ~ chi-square with one degree of freedom."""
    if x <= 0:
        return 1.0
    return math.erfc(math.sqrt(0.5 * x))


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) for a, b > 0 and 0 <= x <= 1."""
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    return float(_sp.betainc(a, b, min(max(x, 0.0), 1.0)))


def student_t_sf(x: float, df: float) -> float:
    """P(T > x) for T ~ Student t with ``df`` (possibly fractional) degrees of freedom."""
    if not df > 0:
        raise ValueError("df must be positive")
    # stdtr is the lower tail; P(T > x) = P(T < -x) by symmetry
    return float(_sp.stdtr(df, -x))


def student_t_two_sided(t: float, df: float) -> float:
    return min(1.0, 2.0 * student_t_sf(abs(t), df))
