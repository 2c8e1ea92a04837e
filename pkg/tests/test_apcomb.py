import random
from fractions import Fraction
from math import gcd

import pytest

from divmatch import apcomb
from divmatch.errors import DomainError, ValidationError


def interval(a, b):
    return apcomb.make_ap(a, 1, b - a + 1)


def test_make_ap_basics():
    s = apcomb.make_ap(1, 1, 12)
    assert s.k == 1
    assert s.elements() == list(range(1, 13))
    assert s.size == 12

    odds = apcomb.make_ap(1, 2, 8)
    assert odds.elements() == [1, 3, 5, 7, 9, 11, 13, 15]

    empty = apcomb.make_ap(5, 3, 0)
    assert empty.size == 0 and empty.elements() == []

    with pytest.raises(DomainError):
        apcomb.make_ap(1, 0, 5)
    with pytest.raises(DomainError):
        apcomb.make_ap(1, -2, 5)
    with pytest.raises(DomainError):
        apcomb.make_ap(1, 1, -1)


def test_union():
    odds = apcomb.make_ap(1, 2, 5)
    evens = apcomb.make_ap(2, 2, 5)
    both = apcomb.union(odds, evens)
    assert both.k == 2
    assert both.elements() == list(range(1, 11))
    assert both.size == 10

    # an empty progression still counts toward k
    padded = apcomb.union(both, apcomb.make_ap(99, 7, 0))
    assert padded.k == 3
    assert padded.elements() == list(range(1, 11))

    with pytest.raises(ValidationError) as exc:
        apcomb.union(apcomb.make_ap(1, 3, 3), apcomb.make_ap(2, 2, 2))
    assert exc.value.witness == 4


def test_difference():
    s = interval(1, 12)
    thirds = apcomb.restrict(s, apcomb.multiples_of(3))
    d = apcomb.difference(s, thirds)
    assert d.k == 2
    assert d.elements() == [1, 2, 4, 5, 7, 8, 10, 11]
    assert d.size == 8

    padded = apcomb.difference(d, apcomb.make_ap(4, 5, 0))
    assert padded.k == 3
    assert padded.elements() == [1, 2, 4, 5, 7, 8, 10, 11]

    with pytest.raises(ValidationError) as exc:
        apcomb.difference(interval(1, 6), apcomb.make_ap(7, 1, 1))
    assert exc.value.witness == 7


def test_count_divisible():
    res = apcomb.count_divisible(interval(1, 12), 3)
    assert res["count"] == 4
    assert res["theta"] == 0
    assert res["bound_applies"]

    # a single progression of the odd numbers below 2^25: |theta| <= 1
    odds = apcomb.make_ap(1, 2, 2**24)
    res = apcomb.count_divisible(odds, 7)
    assert res["bound_applies"]
    assert abs(res["count"] - Fraction(2**24, 7)) <= 1
    # independent exact value: odd multiples of 7 below 2^25
    assert res["count"] == len(range(7, 2**25, 14))

    s = apcomb.difference(interval(1, 10), apcomb.make_ap(5, 5, 2))
    res = apcomb.count_divisible(s, 5)
    assert res["count"] == 0
    assert res["theta"] == Fraction(-8, 5)
    assert not res["bound_applies"]
    assert abs(res["theta"]) <= s.k

    with pytest.raises(DomainError):
        apcomb.count_divisible(s, 0)


def test_restrict():
    s = interval(1, 12)
    low = apcomb.restrict(s, apcomb.at_most(7))
    assert low.k == 1
    assert low.elements() == list(range(1, 8))

    odds = apcomb.make_ap(1, 2, 8)
    thirds = apcomb.restrict(odds, apcomb.multiples_of(3))
    assert thirds.k == 1
    assert thirds.elements() == [3, 9, 15]
    assert thirds.terms == ((1, 3, 6, 3),)

    s2 = apcomb.difference(s, apcomb.make_ap(3, 3, 4))
    high = apcomb.restrict(s2, apcomb.greater_than(10))
    assert high.k == 2
    assert high.elements() == [11]

    with pytest.raises(DomainError):
        apcomb.multiples_of(0)
    with pytest.raises(DomainError):
        apcomb.restrict(s, ("weird", 3))


def test_membership_and_extremes():
    s = apcomb.difference(interval(1, 30), apcomb.make_ap(5, 5, 6))
    assert 4 in s and 5 not in s and 30 not in s and 29 in s
    assert s.min_element() == 1
    assert s.max_element() == 29
    empty = apcomb.restrict(s, apcomb.at_most(0))
    assert empty.min_element() is None and empty.max_element() is None
    assert apcomb.count_at_most(s, 10) == 8
    assert apcomb.intersection_count(s, interval(25, 40)) == 4


def test_honesty_check():
    s = apcomb.difference(interval(1, 100), apcomb.make_ap(7, 7, 14))
    assert apcomb.is_honest(s)
    # tampering: subtract a progression that was never a subset
    bogus = apcomb.APCombination(
        terms=s.terms + ((-1, 3, 1, 5),), k=s.k + 1
    )
    assert not apcomb.is_honest(bogus)
    with pytest.raises(ValidationError):
        bogus.elements()


def _random_combination(rng, d):
    """Build a combination via the public ops, mirrored by a brute set."""
    def coprime_step(hi):
        while True:
            q = rng.randint(1, hi)
            if gcd(q, d) == 1:
                return q

    start = rng.randint(-50, 50)
    step = coprime_step(6)
    length = rng.randint(0, 400)
    s = apcomb.make_ap(start, step, length)
    mirror = set(range(start, start + length * step, step)) if length else set()
    k_budget = 1 + min(63, int(2 ** rng.uniform(0, 6)))
    for _ in range(rng.randint(1, 6)):
        if s.k >= k_budget:
            break
        op = rng.randrange(4)
        if op == 0 and s.size:
            z = rng.randint(min(mirror), max(mirror))
            pred = apcomb.at_most(z) if rng.random() < 0.5 else apcomb.greater_than(z)
            s = apcomb.restrict(s, pred)
            mirror = {x for x in mirror if (x <= z) == (pred[0] == "le")}
        elif op == 1:
            m = coprime_step(9)
            s = apcomb.restrict(s, apcomb.multiples_of(m))
            mirror = {x for x in mirror if x % m == 0}
        elif op == 2 and s.k * 2 <= k_budget and s.size:
            m = coprime_step(9)
            peel = apcomb.restrict(s, apcomb.multiples_of(m))
            s = apcomb.difference(s, peel)
            mirror = {x for x in mirror if x % m != 0}
        else:
            base = (s.max_element() or 0) + rng.randint(1, 10)
            q = coprime_step(6)
            n = rng.randint(0, 50)
            s = apcomb.union(s, apcomb.make_ap(base, q, n))
            mirror |= set(range(base, base + n * q, q)) if n else set()
    return s, mirror


def test_randomized_constructions():
    rng = random.Random(20260815)
    trials = 10**4
    for trial in range(trials):
        d = rng.randint(1, 100)
        s, mirror = _random_combination(rng, d)
        assert s.k <= 64
        assert s.size == len(mirror)
        res = apcomb.count_divisible(s, d)
        assert res["count"] == sum(1 for x in mirror if x % d == 0)
        assert abs(res["count"] - Fraction(s.size, d)) <= s.k
        assert res["bound_applies"]
        if trial % 37 == 0:
            assert s.elements(limit=10**5) == sorted(mirror)
            assert apcomb.is_honest(s)
            z = rng.randint(-100, 3000)
            assert apcomb.count_at_most(s, z) == sum(1 for x in mirror if x <= z)
