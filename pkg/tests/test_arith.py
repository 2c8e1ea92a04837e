from __future__ import annotations

import random
from fractions import Fraction
from math import isqrt, log, prod

import pytest

from divmatch import arith
from divmatch.errors import CapacityError, DomainError, RangeError


def test_factorize_basics():
    assert arith.factorize(1).factors == ()
    assert arith.factorize(12).factors == ((2, 2), (3, 1))
    assert arith.factorize(97).factors == ((97, 1),)
    f = arith.factorize(2**10 * 3**5 * 7)
    assert f.factors == ((2, 10), (3, 5), (7, 1))
    assert f.tau == 11 * 6 * 2
    assert f.omega == 3
    assert f.rad == 42
    with pytest.raises(DomainError):
        arith.factorize(0)


def test_factored_integer_helpers():
    f = arith.FactoredInteger.from_factors([(3, 2), (2, 1)])
    assert f.value == 18
    assert f.factors == ((2, 1), (3, 2))
    assert f.valuation(3) == 2 and f.valuation(5) == 0
    g = f.times(arith.factorize(12))
    assert g.value == 216 and g.factors == ((2, 3), (3, 3))
    assert not f.is_squarefree
    assert arith.factorize(30).is_squarefree


def test_divisors():
    assert arith.divisors(12) == [1, 2, 3, 4, 6, 12]
    assert arith.divisors(1) == [1]
    assert arith.divisors(arith.factorize(49)) == [1, 7, 49]
    squarefree_23 = prod(arith.PRIMES.first(23))  # tau = 2^23 > default limit
    with pytest.raises(CapacityError):
        arith.divisors(squarefree_23)


def _spf_sieve(bound: int) -> list[int]:
    spf = list(range(bound + 1))
    for p in range(2, isqrt(bound) + 1):
        if spf[p] == p:
            for m in range(p * p, bound + 1, p):
                if spf[m] == m:
                    spf[m] = p
    return spf


def test_factorize_and_divisors_against_sieve():
    # independent smallest-prime-factor oracle; exhaustive small range plus
    # a seeded sample of the full 1e6 range
    bound = 10**6
    spf = _spf_sieve(bound)

    def oracle(n: int) -> list[tuple[int, int]]:
        out = []
        while n > 1:
            p = spf[n]
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    for n in range(1, 20001):
        f = arith.factorize(n)
        assert f.factors == tuple(oracle(n))
        assert prod(p**e for p, e in f.factors) == n
    rng = random.Random(20260815)
    for n in rng.sample(range(20001, bound + 1), 3000):
        f = arith.factorize(n)
        assert f.factors == tuple(oracle(n))
    for n in range(1, 3001):
        divs = arith.divisors(n)
        assert len(divs) == arith.factorize(n).tau
        assert all(n % d == 0 for d in divs)
        assert divs == sorted(set(divs))


def test_prime_table():
    assert arith.PRIMES.first(10) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert arith.PRIMES.nth(1000) == 7919
    assert arith.PRIMES.up_to(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert arith.PRIMES.is_prime(2**13 - 1)
    assert not arith.PRIMES.is_prime(2**11 - 1)
    for i in range(2, 2000):
        assert arith.PRIMES.nth(i) > i * log(i)
    with pytest.raises(RangeError):
        arith.PRIMES.nth(0)


def test_classify_tight_structure():
    c = arith.classify(18)
    assert c.is_m_number
    assert c.tight_primes == (2, 3)
    assert c.tight_part.value == 18 and c.rest_part.value == 1
    assert c.r == 6

    c = arith.classify(135)  # 3^3 * 5: v_3 = 3 >= 3
    assert not c.is_m_number

    c = arith.classify(8)
    assert not c.is_m_number

    c = arith.classify(2 * 3**2 * 5**4 * 7**6)
    assert c.is_m_number
    assert c.tight_primes == (2, 3, 5, 7)
    assert c.r == 2 * 3 * 5 * 7

    c = arith.classify(1)
    assert c.is_m_number and c.r == 1 and c.tight_primes == ()

    c = arith.classify(300)  # 2^2*3*5^2: v_2 = 2 >= 2
    assert not c.is_m_number

    c = arith.classify(2 * 5**2 * 11)
    assert c.is_m_number
    assert c.tight_primes == (2,)
    assert c.rest_part.value == 5**2 * 11


def test_classify_m_density_sample():
    # M-numbers have density ~0.722; check the exact count on [1, 20000]
    count = sum(1 for n in range(1, 20001) if arith.classify(n).is_m_number)
    lo = 20000 * 0.71
    hi = 20000 * 0.74
    assert lo < count < hi


def test_alpha():
    assert arith.alpha_partial_product(3) == Fraction(13, 18)
    lo, hi = arith.alpha_interval(Fraction(1, 100))
    assert hi - lo <= Fraction(1, 100)
    assert lo <= Fraction("0.72199023441955") <= hi
    assert arith.alpha_digits(14) == "0.72199023441955"
    a = arith.alpha(Fraction(1, 10**12))
    assert abs(a - Fraction("0.721990234419551")) < Fraction(1, 10**10)
    with pytest.raises(RangeError):
        arith.alpha_interval(Fraction(1, 10**31))


def test_reciprocal_prime_sum():
    assert arith.reciprocal_prime_sum(1, 2) == Fraction(5, 6)
    assert arith.reciprocal_prime_sum(3, 3) == Fraction(1, 5)
    # the sum feeding the many-factor verifier at ell=49, j=4
    s = arith.reciprocal_prime_sum(5, 49)
    assert s < Fraction(93, 100)
    with pytest.raises(RangeError):
        arith.reciprocal_prime_sum(3, 2)


def test_strong_density_bound():
    b = arith.strong_density_bound()
    assert b.density.startswith("0.221640")
    assert Fraction(b.tail_bound) < Fraction("0.000331239")
    assert Fraction(b.lower) > Fraction("0.2213")
    assert Fraction(b.boosted) >= Fraction("0.3694")
    assert b.boost_factor == Fraction(3, 2) * Fraction(10, 9) * Fraction(
        626, 625
    ) * (1 + Fraction(1, 7**6))
