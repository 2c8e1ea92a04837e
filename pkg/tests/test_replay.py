"""Tests for the two proof replays."""

import dataclasses
import json
import pathlib
from fractions import Fraction
from math import comb, factorial, isqrt

import pytest

from divmatch.arith import PRIMES
from divmatch.census import census_row, gcd_counts
from divmatch.errors import DomainError, RangeError, ValidationError
from divmatch.replay import (
    FEW_MAX,
    anchor_inequality,
    j_choice,
    kbar,
    reciprocal_window,
    replay_few,
    validate_few_certificate,
    validate_sqfr_certificate,
    verify_all_few,
    verify_sqfr,
)

DATA = pathlib.Path(__file__).parent / "data"


def test_j_choice():
    assert j_choice(45) == 4
    assert j_choice(46) == 3
    assert j_choice(47) == 3
    assert j_choice(48) == 3
    assert j_choice(49) == 4
    assert j_choice(52) == 5
    assert j_choice(67) == 4
    assert j_choice(68) == 8
    assert j_choice(100) == 10
    assert j_choice(2048) == 45
    with pytest.raises(RangeError):
        j_choice(44)


def test_kbar_against_direct_products():
    assert kbar(10, 0) == 4  # 2*3*5*7 = 210 <= 1024 < 210*11
    for ell, j in ((45, 4), (52, 5), (192, 13), (300, 17)):
        k = kbar(ell, j)
        prod = 1
        for i in range(j + 1, j + k + 1):
            prod *= PRIMES.nth(i)
        assert prod <= 2**ell
        assert prod * PRIMES.nth(j + k + 1) > 2**ell
    with pytest.raises(RangeError):
        kbar(0, 3)


def test_reciprocal_window_exact():
    assert reciprocal_window(0, 3) == Fraction(1, 2) + Fraction(1, 3) + Fraction(1, 5)
    assert reciprocal_window(2, 4) == Fraction(1, 5) + Fraction(1, 7)
    assert reciprocal_window(3, 3) == 0
    # the tightest case across the verified range stays below 93/100
    worst = max(
        reciprocal_window(j_choice(ell), ell) for ell in range(45, 130)
    )
    assert worst < Fraction(93, 100)
    assert worst > Fraction(92, 100)  # and 93/100 is not slack by much


def test_anchor_inequality():
    assert anchor_inequality()
    assert Fraction(93, 50) ** 4 / 24 < Fraction(1, 2)


def test_verify_sqfr_spot_values():
    cert = verify_sqfr(45)
    assert cert.j == 4 and cert.kbar == 9
    assert cert.valid
    assert [k for k, *_ in cert.per_k] == list(range(4, 10))
    assert len(cert.case_records) == 9
    assert {case for _, case, *_ in cert.case_records} == {
        "unique-triple", "two-triples", "unique-pair", "two-pairs",
        "three-pairs", "unique-prime", "two-primes", "three-primes",
        "four-or-more",
    }
    # every stored rational re-evaluates to the formula it encodes
    for k, _, (num, den), ok in cert.per_k:
        lhs = Fraction(93, 50) ** k / factorial(k) + comb(45 - 4, k) * Fraction(
            2
        ) ** (2 * 4 - 1 + k - 45)
        assert Fraction(num, den) == lhs
        assert ok == (lhs < 1)
    for _, _, lhs, ok in cert.case_records:
        assert ok and lhs < 1


def test_verify_sqfr_all_ells():
    for ell in list(range(45, 70)) + [128, 192, 256, 512, 1024, 2047, 2048]:
        cert = verify_sqfr(ell)
        assert cert.valid, (ell, cert.failures())
        assert cert.f_ok and cert.f_bound < Fraction(93, 100)
    with pytest.raises(RangeError):
        verify_sqfr(44)
    with pytest.raises(RangeError):
        verify_sqfr(2049)
    assert verify_sqfr(3000, cap=3000).valid


def test_power_tail_margin_at_192():
    # at ell = 192 every tail exponent sits below -1.03, checked in integers
    j = j_choice(192)
    assert j == 13
    kb = kbar(192, j)
    assert kb < 0.185 * 192
    for k in range(4, kb + 1):
        # 2^(2j-1+k-192) C(179, k) < 2^(-1.03), raised to the 100th power
        e = 100 * (2 * j - 1 + k - 192) + 103
        assert e < 0
        assert comb(179, k) ** 100 < 2 ** (-e)


def test_sqfr_certificate_tampering():
    cert = verify_sqfr(60)
    validate_sqfr_certificate(cert)
    wrong_f = dataclasses.replace(cert, f_bound=cert.f_bound + 1)
    with pytest.raises(ValidationError):
        validate_sqfr_certificate(wrong_f)
    k, rule, (num, den), ok = cert.per_k[0]
    rows = ((k, rule, (num + 1, den), ok),) + cert.per_k[1:]
    with pytest.raises(ValidationError):
        validate_sqfr_certificate(dataclasses.replace(cert, per_k=rows))
    short = dataclasses.replace(cert, per_k=cert.per_k[:-1])
    with pytest.raises(ValidationError):
        validate_sqfr_certificate(short)
    # scaling a stored fraction keeps its value and stays acceptable
    scaled = ((k, rule, (num * 7, den * 7), ok),) + cert.per_k[1:]
    validate_sqfr_certificate(dataclasses.replace(cert, per_k=scaled))


def test_replay_few_24_odd_transcript():
    row = census_row(24, "odd")
    g = gcd_counts(24, "odd", (105, 15, 21, 3, 5))
    cert = replay_few(24, "odd", row, g)
    assert cert.valid
    shown = cert.displayed()
    expected = [
        "88,525 < 131,072",
        "485,129 < 1,048,576",
        "568,858 < 2,097,152",
        "2,151,882 < 3,145,728",
        "6,377,708 < 7,340,032",
        "12,741,251 < 14,680,064",
    ]
    positions = [shown.index(s) for s in expected]
    assert positions == sorted(positions)
    by_k = {s.k: s for s in cert.steps}
    assert by_k[1].rung == "x3-then-more-primes"
    assert "6,334,949 < 8,388,608" in shown  # the x3 pivot itself
    assert by_k[0].closed and by_k[0].comparisons == ()
    assert cert.used_entries() == {105, 15, 21, 3, 5, "x3"}
    validate_few_certificate(cert, row, g)


def test_replay_few_small_ells():
    row = census_row(3, "odd")
    g = gcd_counts(3, "odd", (3,))
    cert = replay_few(3, "odd", row, g)
    assert cert.valid
    assert cert.used_entries() == {3}
    by_k = {s.k: s for s in cert.steps}
    assert by_k[2].rung == "count-vs-neighborhood" and len(by_k[2].comparisons) == 1
    assert by_k[1].rung == "unique-then-more-primes"

    # strictness: at ell = 5 (odd) the pair count equals the bound exactly,
    # so the count-only rung must fail and pull in the gcd_15 column
    row5 = census_row(5, "odd")
    assert row5.at_least(2) == 2 ** (5 - 2)
    g5 = gcd_counts(5, "odd", (15, 3))
    cert5 = replay_few(5, "odd", row5, g5)
    assert cert5.valid
    assert 15 in cert5.used_entries()
    first = {s.k: s for s in cert5.steps}[2].comparisons[0]
    assert not first.ok and first.display() == "8 >= 8"


def test_replay_few_missing_entry_named():
    row = census_row(24, "odd")
    g = gcd_counts(24, "odd", (15, 21, 3, 5))
    with pytest.raises(DomainError, match="gcd_105"):
        replay_few(24, "odd", row, g)


def test_replay_few_range_and_mismatch():
    with pytest.raises(RangeError):
        replay_few(45, "odd", census_row(44, "odd"), gcd_counts(44, "odd", ()))
    with pytest.raises(RangeError):
        replay_few(2, "odd", census_row(3, "odd"), gcd_counts(3, "odd", ()))
    row, g = census_row(10, "odd"), gcd_counts(10, "full", (3,))
    with pytest.raises(DomainError):
        replay_few(10, "odd", row, g)


def test_few_certificate_tampering():
    row = census_row(12, "full")
    g = gcd_counts(12, "full", (105, 15, 21, 3, 5))
    cert = replay_few(12, "full", row, g)
    validate_few_certificate(cert, row, g)
    step = cert.steps[-2]
    bad_cmp = dataclasses.replace(step.comparisons[0], lhs=step.comparisons[0].lhs + 1)
    bad_step = dataclasses.replace(
        step, comparisons=(bad_cmp,) + step.comparisons[1:]
    )
    tampered = dataclasses.replace(
        cert, steps=cert.steps[:-2] + (bad_step, cert.steps[-1])
    )
    with pytest.raises(ValidationError):
        validate_few_certificate(tampered, row, g)


def test_verify_all_few_and_published_blanks():
    out = verify_all_few()
    assert out["pass"]
    assert set(out["odd"]) == set(out["full"]) == set(range(3, FEW_MAX + 1))

    # the consulted gcd/x3 columns reproduce the published blank pattern
    ref = json.loads((DATA / "reference_tables.json").read_text())
    order = ["105", "15", "21", "3", "x3", "5"]
    for mode in ("odd", "full"):
        table = ref[f"gcd_{mode}"]
        for ell, cert in out[mode].items():
            assert cert.valid, (mode, ell)
            used = cert.used_entries()
            got = {c for c in order if (int(c) if c != "x3" else c) in used}
            published = {
                c for c, cell in zip(order, table[str(ell)]) if cell != ""
            }
            assert got == published, (mode, ell)


def test_isqrt_matches_float_intuition():
    for ell in (68, 100, 196, 2048):
        assert j_choice(ell) == isqrt(ell) == int(ell**0.5)
