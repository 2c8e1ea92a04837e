"""Signed arithmetic-progression combinations with exact counting.

An APCombination is a set built from arithmetic progressions by disjoint
unions and subset differences, stored as its construction history (signed
constituents) together with the complexity budget k.  The budget is what
the divisibility-count error bound is about: the number of multiples of d
in S differs from |S|/d by at most k whenever every constituent step is
coprime to d.

All set-level checks (disjointness, subset, honesty of a deserialized
term list) are exact at every scale: intersections of two signed
combinations reduce to pairwise progression intersections (CRT plus range
overlap), and witnesses for violated preconditions are located by binary
search on exact prefix counts, so nothing ever needs to be materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import CapacityError, DomainError, ValidationError

# each term is (sign, start, step, length) with sign in {+1, -1}
Term = tuple[int, int, int, int]

DEFAULT_MATERIALIZE_LIMIT = 2**22


@dataclass(frozen=True)
class APCombination:
    terms: tuple[Term, ...]
    k: int

    @property
    def size(self) -> int:
        return sum(sign * length for sign, _, _, length in self.terms)

    def elements(self, limit: int | None = DEFAULT_MATERIALIZE_LIMIT) -> list[int]:
        """Materialize the set (small instances and tests)."""
        work = sum(length for _, _, _, length in self.terms)
        if limit is not None and work > limit:
            raise CapacityError(f"materializing {work} constituent elements exceeds {limit}")
        counts: dict[int, int] = {}
        for sign, start, step, length in self.terms:
            for i in range(length):
                x = start + i * step
                counts[x] = counts.get(x, 0) + sign
        bad = [x for x, c in counts.items() if c not in (0, 1)]
        if bad:
            raise ValidationError("signed terms do not resolve to a set", witness=min(bad))
        return sorted(x for x, c in counts.items() if c == 1)

    def __contains__(self, x: int) -> bool:
        return contains(self, x)

    def min_element(self) -> int | None:
        if self.size == 0:
            return None
        lo = min(start for sign, start, _, length in self.terms if sign > 0 and length)
        hi = _max_value(self)
        return _first_element_above(self, lo - 1, hi)

    def max_element(self) -> int | None:
        if self.size == 0:
            return None
        lo, hi = _min_value(self), _max_value(self)
        # binary search the largest z with |S ∩ (z, hi]| >= 1
        total = self.size
        a, b = lo, hi
        while a < b:
            mid = (a + b + 1) // 2
            if total - count_at_most(self, mid - 1) >= 1:
                a = mid
            else:
                b = mid - 1
        return a


def make_ap(start: int, step: int, length: int) -> APCombination:
    """A single progression {start + i*step : 0 <= i < length}."""
    if step <= 0:
        raise DomainError("step must be a positive integer")
    if length < 0:
        raise DomainError("length must be nonnegative")
    return APCombination(terms=((1, start, step, length),), k=1)


def _ap_common(t1: Term, t2: Term) -> tuple[int, int, int]:
    """Intersection of two progressions as (first, step, count)."""
    _, a1, q1, n1 = t1
    _, a2, q2, n2 = t2
    if n1 == 0 or n2 == 0:
        return 0, 1, 0
    g = gcd(q1, q2)
    if (a2 - a1) % g:
        return 0, 1, 0
    step = q1 // g * q2
    # solve a1 + i*q1 ≡ a2 (mod q2)
    m = q2 // g
    i0 = ((a2 - a1) // g * pow(q1 // g, -1, m)) % m if m > 1 else 0
    first = a1 + i0 * q1
    lo = max(a1, a2)
    hi = min(a1 + (n1 - 1) * q1, a2 + (n2 - 1) * q2)
    if first < lo:
        first += -((first - lo) // step) * step
    if first > hi:
        return 0, 1, 0
    return first, step, (hi - first) // step + 1


def _ap_pair_count(t1: Term, t2: Term, z: int | None = None) -> int:
    first, step, count = _ap_common(t1, t2)
    if count and z is not None:
        if z < first:
            return 0
        count = min(count, (z - first) // step + 1)
    return count


def intersection_count(s1: APCombination, s2: APCombination, z: int | None = None) -> int:
    """|S1 ∩ S2| (optionally restricted to elements <= z), exact.

    Sound because validated combinations have honest 0/1 signed-indicator
    decompositions, so the product of the two indicators expands to signed
    pairwise progression intersections.
    """
    return sum(
        t1[0] * t2[0] * _ap_pair_count(t1, t2, z)
        for t1 in s1.terms
        for t2 in s2.terms
    )


def count_at_most(s: APCombination, z: int) -> int:
    """|{x in S : x <= z}|, exact."""
    total = 0
    for sign, start, step, length in s.terms:
        if length == 0 or z < start:
            continue
        total += sign * min(length, (z - start) // step + 1)
    return total


def contains(s: APCombination, x: int) -> bool:
    val = 0
    for sign, start, step, length in s.terms:
        if length and start <= x <= start + (length - 1) * step and (x - start) % step == 0:
            val += sign
    return val == 1


def _min_value(s: APCombination) -> int:
    starts = [start for sign, start, _, length in s.terms if length]
    return min(starts) if starts else 0


def _max_value(s: APCombination) -> int:
    tops = [start + (length - 1) * step for sign, start, step, length in s.terms if length]
    return max(tops) if tops else 0


def _first_element_above(s: APCombination, z0: int, hi: int) -> int | None:
    """Smallest element of S exceeding z0, via binary search on prefix counts."""
    base = count_at_most(s, z0)
    if count_at_most(s, hi) - base < 1:
        return None
    a, b = z0 + 1, hi
    while a < b:
        mid = (a + b) // 2
        if count_at_most(s, mid) - base >= 1:
            b = mid
        else:
            a = mid + 1
    return a


def _overlap_witness(s1: APCombination, s2: APCombination) -> int:
    """Some element of S1 ∩ S2, assuming the intersection is nonempty."""
    lo = max(_min_value(s1), _min_value(s2)) - 1
    hi = min(_max_value(s1), _max_value(s2))
    a, b = lo + 1, hi
    while a < b:
        mid = (a + b) // 2
        if intersection_count(s1, s2, mid) >= 1:
            b = mid
        else:
            a = mid + 1
    return a


def _escape_witness(s1: APCombination, s2: APCombination) -> int:
    """Some element of S2 not in S1, assuming one exists."""
    lo = _min_value(s2) - 1
    hi = _max_value(s2)
    a, b = lo + 1, hi
    while a < b:
        mid = (a + b) // 2
        if count_at_most(s2, mid) - intersection_count(s1, s2, mid) >= 1:
            b = mid
        else:
            a = mid + 1
    return a


def union(s1: APCombination, s2: APCombination) -> APCombination:
    """Disjoint union; k adds. Raises with a witness element on overlap."""
    if intersection_count(s1, s2) != 0:
        raise ValidationError(
            "union operands overlap", witness=_overlap_witness(s1, s2)
        )
    return APCombination(terms=s1.terms + s2.terms, k=s1.k + s2.k)


def difference(s1: APCombination, s2: APCombination) -> APCombination:
    """Subset difference; k adds. Raises with a witness element if S2 ⊄ S1."""
    if intersection_count(s1, s2) != s2.size:
        raise ValidationError(
            "difference operand is not a subset",
            witness=_escape_witness(s1, s2),
        )
    negated = tuple((-sign, start, step, length) for sign, start, step, length in s2.terms)
    return APCombination(terms=s1.terms + negated, k=s1.k + s2.k)


def count_divisible(s: APCombination, d: int) -> dict:
    """Exact count of elements divisible by d, with the error-bound fields.

    Returns {"count", "bound_applies", "theta"}; theta = count - |S|/d and
    |theta| <= k is asserted whenever every constituent step is coprime to d.
    """
    if d <= 0:
        raise DomainError("d must be a positive integer")
    count = 0
    for sign, start, step, length in s.terms:
        count += sign * _multiples_length(start, step, length, d)
    theta = Fraction(count) - Fraction(s.size, d)
    bound_applies = all(gcd(step, d) == 1 for _, _, step, _ in s.terms)
    if bound_applies and abs(theta) > s.k:
        raise AssertionError("divisibility-count error bound violated")
    return {"count": count, "bound_applies": bound_applies, "theta": theta}


def _multiples_length(start: int, step: int, length: int, m: int) -> int:
    if length == 0:
        return 0
    g = gcd(step, m)
    if start % g:
        return 0
    mm = m // g
    if mm == 1:
        return length
    i0 = ((-start // g) * pow(step // g, -1, mm)) % mm
    if i0 >= length:
        return 0
    return 1 + (length - 1 - i0) // mm


def at_most(z: int) -> tuple[str, int]:
    return ("le", z)


def greater_than(z: int) -> tuple[str, int]:
    return ("gt", z)


def multiples_of(m: int) -> tuple[str, int]:
    if m <= 0:
        raise DomainError("modulus must be positive")
    return ("mult", m)


def restrict(s: APCombination, predicate: tuple[str, int]) -> APCombination:
    """Intersect with {x <= z}, {x > z}, or the multiples of m, termwise.

    The same predicate applies to every constituent, so the signed
    decomposition stays honest; k is unchanged.
    """
    kind, arg = predicate
    new_terms = []
    for sign, start, step, length in s.terms:
        if kind == "le":
            if length and arg >= start:
                length = min(length, (arg - start) // step + 1)
            else:
                length = 0
            new_terms.append((sign, start, step, length))
        elif kind == "gt":
            skip = 0
            if length and arg >= start:
                skip = min(length, (arg - start) // step + 1)
            new_terms.append((sign, start + skip * step, step, length - skip))
        elif kind == "mult":
            m = arg
            g = gcd(step, m)
            mm = m // g
            if length == 0 or start % g:
                new_terms.append((sign, start, step * mm, 0))
                continue
            if mm == 1:
                new_terms.append((sign, start, step, length))
                continue
            i0 = ((-start // g) * pow(step // g, -1, mm)) % mm
            new_len = 0 if i0 >= length else 1 + (length - 1 - i0) // mm
            new_terms.append((sign, start + i0 * step, step * mm, new_len))
        else:
            raise DomainError(f"unknown predicate {kind!r}")
    return APCombination(terms=tuple(new_terms), k=s.k)


def is_honest(s: APCombination) -> bool:
    """Exact check that the signed terms resolve to a 0/1 indicator.

    With f = signed sum of constituent indicators, f(x)^2 - f(x) >= 0 for
    every integer value, so sum_x (f^2 - f) = |S cap S| - |S| vanishes iff
    f is everywhere 0 or 1.  Used when validating deserialized data.
    """
    return all(step > 0 and length >= 0 for _, _, step, length in s.terms) and (
        intersection_count(s, s) == s.size
    )
