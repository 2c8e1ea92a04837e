"""Certified exact numerics on integer fixed point.

Everything here produces *enclosures*: a value is represented by a pair
(lo, hi) of integers at a global decimal scale, with lo <= true*SCALE <= hi
guaranteed by construction.  Series are summed in exact rational arithmetic
with explicit tail bounds, then rounded outward onto the fixed-point grid.
All downstream density/constant computations stay rigorous without any
floating point.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

SCALE_DIGITS = 80
SCALE = 10**SCALE_DIGITS


def fix_down(x: Fraction | int) -> int:
    """Largest grid point <= x."""
    if isinstance(x, int):
        return x * SCALE
    return (x.numerator * SCALE) // x.denominator


def fix_up(x: Fraction | int) -> int:
    """Smallest grid point >= x."""
    if isinstance(x, int):
        return x * SCALE
    return -((-x.numerator * SCALE) // x.denominator)


def to_fraction(a: int) -> Fraction:
    return Fraction(a, SCALE)


def mul_down(a: int, b: int) -> int:
    return (a * b) // SCALE


def mul_up(a: int, b: int) -> int:
    return -((-(a * b)) // SCALE)


def div_down(a: int, b: int) -> int:
    # a, b at scale; result at scale.  Requires b > 0.
    return (a * SCALE) // b


def div_up(a: int, b: int) -> int:
    return -((-(a * SCALE)) // b)


def pow_interval(lo: int, hi: int, n: int) -> tuple[int, int]:
    """(lo, hi)^n with directed rounding; requires 0 <= lo <= hi."""
    if lo < 0:
        raise ValueError("pow_interval requires a nonnegative interval")
    rl, rh = SCALE, SCALE
    for _ in range(n):
        rl = mul_down(rl, lo)
        rh = mul_up(rh, hi)
    return rl, rh


def _atanh_enclosure(x: Fraction, terms: int) -> tuple[Fraction, Fraction]:
    """atanh(x) for 0 <= x < 1/2 with a certified geometric tail."""
    if not 0 <= x < Fraction(1, 2):
        raise ValueError("argument out of the supported range")
    total = Fraction(0)
    xx = x * x
    power = x
    for i in range(terms):
        total += power / (2 * i + 1)
        power *= xx
    # tail: sum_{i>=terms} x^(2i+1)/(2i+1) <= power/((2*terms+1)*(1-x^2))
    tail = power / ((2 * terms + 1) * (1 - xx))
    return total, total + tail


@lru_cache(maxsize=None)
def log2_enclosure() -> tuple[Fraction, Fraction]:
    # ln 2 = 2 atanh(1/3); 3^-(2K+1) < 1e-82 at K=87
    lo, hi = _atanh_enclosure(Fraction(1, 3), 87)
    return 2 * lo, 2 * hi


@lru_cache(maxsize=None)
def log_interval(n: int) -> tuple[int, int]:
    """Fixed-point enclosure of ln(n) for integer n >= 1."""
    if n < 1:
        raise ValueError("log_interval requires n >= 1")
    if n == 1:
        return 0, 0
    # reduce n / 2^k into [2/3, 4/3] so the atanh argument stays <= 1/5
    k = 0
    m = Fraction(n)
    while m > Fraction(4, 3):
        m /= 2
        k += 1
    x = (m - 1) / (m + 1)
    neg = x < 0
    # 5^-(2K+1) < 1e-82 at K=59
    alo, ahi = _atanh_enclosure(abs(x), 59)
    if neg:
        mlo, mhi = -2 * ahi, -2 * alo
    else:
        mlo, mhi = 2 * alo, 2 * ahi
    l2lo, l2hi = log2_enclosure()
    return fix_down(k * l2lo + mlo), fix_up(k * l2hi + mhi)


@lru_cache(maxsize=None)
def pi_squared_interval() -> tuple[int, int]:
    """Enclosure of pi^2 via pi^2/18 = sum 1/(n^2 C(2n,n)).

    Term ratio is n^2/((2n+1)(2n+2)) < 1/4, so the tail after N terms is
    below 4/3 of the next term.
    """
    total = Fraction(0)
    n = 1
    term = Fraction(1, 2)
    while True:
        total += term
        n += 1
        term = Fraction(1, n * n * comb(2 * n, n))
        if term < Fraction(1, 10 ** (SCALE_DIGITS + 5)):
            break
    tail = term * Fraction(4, 3)
    return fix_down(18 * total), fix_up(18 * (total + tail))


@lru_cache(maxsize=None)
def e_interval() -> tuple[int, int]:
    """Enclosure of e = sum 1/k!, tail after K terms below 2/(K+1)!."""
    K = 62
    total = sum(Fraction(1, factorial(k)) for k in range(K + 1))
    return fix_down(total), fix_up(total + Fraction(2, factorial(K + 1)))


def decimal_string_down(a: int, digits: int) -> str:
    """Render a fixed-point value in [0, 10) truncated to `digits` decimals."""
    if digits > SCALE_DIGITS:
        raise ValueError("requested digits exceed working precision")
    q = a // 10 ** (SCALE_DIGITS - digits)
    s = str(q).rjust(digits + 1, "0")
    return s[:-digits] + "." + s[-digits:]
