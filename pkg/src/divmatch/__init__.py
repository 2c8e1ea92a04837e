"""Exact coprime matchings between divisor sets and integer intervals.

Core entry points are re-exported here; see the README for the CLI.
"""

from .apcomb import (
    APCombination,
    count_divisible,
    difference,
    intersection_count,
    make_ap,
    union,
)
from .arith import (
    FactoredInteger,
    MClassification,
    PrimeTable,
    PRIMES,
    alpha,
    alpha_digits,
    alpha_interval,
    alpha_partial_product,
    classify,
    divisors,
    factorize,
    reciprocal_prime_sum,
    strong_density_bound,
)
from .census import (
    CensusRow,
    GcdCounts,
    census_row,
    format_count,
    format_row,
    gcd_counts,
    monotone_majorize_check,
)
from .errors import (
    CapacityError,
    ConstructionError,
    DomainError,
    RangeError,
    ValidationError,
)
from .matcher import (
    HallWitness,
    MatchingCertificate,
    PrimePowerObstruction,
    compose_even_odd,
    coprime_matching,
    decide_strong,
    halve_matching,
    is_matchable,
    match_via_partition,
    mp_matching,
    prime_boost,
    quick_nonmatchable,
    strong_fill,
    sweep_m_numbers,
    validate_matching,
)
from .partition import (
    PartitionCertificate,
    build_m_partition,
    build_partition,
    validate_partition,
)
from .replay import (
    FewCertificate,
    SqfrCertificate,
    replay_few,
    validate_few_certificate,
    validate_sqfr_certificate,
    verify_all_few,
    verify_sqfr,
)

__all__ = [
    "APCombination",
    "count_divisible",
    "difference",
    "intersection_count",
    "make_ap",
    "union",
    "FactoredInteger",
    "MClassification",
    "PrimeTable",
    "PRIMES",
    "alpha",
    "alpha_digits",
    "alpha_interval",
    "alpha_partial_product",
    "classify",
    "divisors",
    "factorize",
    "reciprocal_prime_sum",
    "strong_density_bound",
    "CensusRow",
    "GcdCounts",
    "census_row",
    "format_count",
    "format_row",
    "gcd_counts",
    "monotone_majorize_check",
    "CapacityError",
    "ConstructionError",
    "DomainError",
    "RangeError",
    "ValidationError",
    "HallWitness",
    "MatchingCertificate",
    "PrimePowerObstruction",
    "compose_even_odd",
    "coprime_matching",
    "decide_strong",
    "halve_matching",
    "is_matchable",
    "match_via_partition",
    "mp_matching",
    "prime_boost",
    "quick_nonmatchable",
    "strong_fill",
    "sweep_m_numbers",
    "validate_matching",
    "PartitionCertificate",
    "build_m_partition",
    "build_partition",
    "validate_partition",
    "FewCertificate",
    "SqfrCertificate",
    "replay_few",
    "validate_few_certificate",
    "validate_sqfr_certificate",
    "verify_all_few",
    "verify_sqfr",
]
