"""Partitions of an interval into divisor-indexed coprime blocks.

build_partition splits an interval of length L into 2^j equal blocks, one
per divisor v of the product of j given primes (the smallest being 2),
with every element of block v coprime to v.  build_m_partition does the
analogous job for an M-number: tight primes are peeled off all at once by
a residue-class stage mod r, and each remaining small prime with exponent
a is handled by an (a+1)-way cutoff split instead of a binary one.

Blocks are APCombination values, so the resulting certificate carries
exact divisibility-count error bounds: for d coprime to every constituent
step, each block holds |block|/d elements divisible by d up to the
certificate's error budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

from . import apcomb
from .apcomb import APCombination
from .arith import FactoredInteger, PRIMES, classify, divisors, factorize
from .errors import ConstructionError, DomainError, ValidationError


@dataclass(frozen=True)
class PartitionCertificate:
    """A verified-on-construction partition of an interval.

    blocks maps each index divisor v to the APCombination of its
    elements; every element of blocks[v] is coprime to v.  step_modulus
    is the integer every constituent step divides, which is what makes
    the error budget meaningful for d coprime to it.
    """

    interval_start: int
    interval_length: int
    block_size: int
    error_budget: int
    step_modulus: int
    blocks: dict[int, APCombination] = field(compare=False)

    @property
    def modulus_divisors(self) -> list[int]:
        return sorted(self.blocks)

    @property
    def interval(self) -> tuple[int, int]:
        return (self.interval_start, self.interval_length)


def _nonmultiple_prefix_count(
    block: APCombination, thin: APCombination, z: int, floor: int
) -> int:
    """#{x in block : floor < x <= z, x not in thin}."""
    return (
        apcomb.count_at_most(block, z)
        - apcomb.count_at_most(thin, z)
        - apcomb.count_at_most(block, floor)
        + apcomb.count_at_most(thin, floor)
    )


def _least_cutoff(
    block: APCombination,
    thin: APCombination,
    target: int,
    floor: int,
    hi: int,
) -> int:
    """Least z with exactly `target` non-multiples of the thinning prime
    in block ∩ (floor, z].  The count increases in unit steps, so the
    least z reaching `target` attains it exactly."""
    if _nonmultiple_prefix_count(block, thin, hi, floor) < target:
        raise ConstructionError(
            "not enough elements coprime to the splitting prime to fill a block"
        )
    a, b = floor + 1, hi
    while a < b:
        mid = (a + b) // 2
        if _nonmultiple_prefix_count(block, thin, mid, floor) >= target:
            b = mid
        else:
            a = mid + 1
    return a


def _split_block(
    block: APCombination, p: int, ways: int, target: int, hi: int
) -> list[APCombination]:
    """Split a block into `ways-1` cutoff blocks of non-multiples of p,
    each of size target, plus the remainder (which absorbs the
    p-multiples).  Returns [remainder, peel_1, ..., peel_{ways-1}]."""
    thin = apcomb.restrict(block, apcomb.multiples_of(p))
    floor = _min_of(block) - 1
    peels = []
    prev = floor
    for _ in range(ways - 1):
        z = _least_cutoff(block, thin, target, prev, hi)
        zone = apcomb.restrict(
            apcomb.restrict(block, apcomb.greater_than(prev)), apcomb.at_most(z)
        )
        zone_mult = apcomb.restrict(
            apcomb.restrict(thin, apcomb.greater_than(prev)), apcomb.at_most(z)
        )
        peels.append(apcomb.difference(zone, zone_mult))
        prev = z
    remainder = apcomb.union(
        apcomb.restrict(thin, apcomb.at_most(prev)),
        apcomb.restrict(block, apcomb.greater_than(prev)),
    )
    if remainder.size != target:
        raise ConstructionError("remainder block has the wrong size")
    return [remainder] + peels


def _min_of(s: APCombination) -> int:
    m = s.min_element()
    if m is None:
        raise ConstructionError("empty block cannot be split")
    return m


def build_partition(primes, interval: tuple[int, int]) -> PartitionCertificate:
    """Partition an interval into 2^j coprime blocks, one per divisor of
    the product of the given primes (which must start at 2)."""
    primes = list(primes)
    j = len(primes)
    if j == 0:
        raise DomainError("at least one prime is required")
    if primes != sorted(set(primes)) or primes[0] != 2 or not all(
        PRIMES.is_prime(p) for p in primes
    ):
        raise DomainError("primes must be distinct, increasing, and start at 2")
    start, length = interval
    if length % (1 << j):
        raise DomainError(f"interval length must be divisible by 2^{j}")
    if length < 4**j:
        raise DomainError(f"interval length must be at least 4^{j}")
    end = start + length - 1

    first_even = start if start % 2 == 0 else start + 1
    first_odd = start if start % 2 == 1 else start + 1
    blocks: dict[int, APCombination] = {
        1: apcomb.make_ap(first_even, 2, length // 2),
        2: apcomb.make_ap(first_odd, 2, length // 2),
    }
    for i, p in enumerate(primes[1:], start=2):
        target = length >> i
        new_blocks: dict[int, APCombination] = {}
        for v in sorted(blocks):
            remainder, peel = _split_block(blocks[v], p, 2, target, end)
            new_blocks[v] = remainder
            new_blocks[p * v] = peel
        blocks = new_blocks

    cert = PartitionCertificate(
        interval_start=start,
        interval_length=length,
        block_size=length >> j,
        error_budget=1 << (j - 1),
        step_modulus=prod(primes),
        blocks=blocks,
    )
    _check_sizes(cert)
    return cert


def _crt_residue(dt: FactoredInteger, tight_primes) -> int:
    """rho(d) in [0, r): the residue with rho ≡ v_p(d) mod p per tight p."""
    rho, mod = 0, 1
    for p in tight_primes:
        want = dt.valuation(p) % p
        t = ((want - rho) * pow(mod, -1, p)) % p
        rho += mod * t
        mod *= p
    return rho


def build_m_partition(n, j: int) -> PartitionCertificate:
    """Partition [1, tau(n)] into blocks indexed by the divisors of
    tight_part * (smooth part of rest_part up to the j-th odd prime)."""
    if j < 0:
        raise DomainError("j must be nonnegative")
    cls = classify(n)
    if not cls.is_m_number:
        raise DomainError(f"{cls.n.value} has a prime p with v_p >= p")
    r = cls.r
    n_r = cls.rest_part

    smooth: list[tuple[int, int]] = []
    for i in range(1, j + 1):
        p = PRIMES.nth(i + 1)  # the i-th odd prime
        a = n_r.valuation(p)
        if a:
            smooth.append((p, a))
    m_j = FactoredInteger.from_factors(smooth)
    n_prime = FactoredInteger.from_factors(
        (p, e - m_j.valuation(p)) for p, e in n_r.factors
    )
    if n_prime.tau < 4**j * r**j:
        raise DomainError(
            "too few divisors outside the smooth part for this j"
        )

    tau_rest = n_r.tau
    end = r * tau_rest  # = tau(n)
    blocks: dict[int, APCombination] = {}
    for dt in divisors(cls.tight_part):
        rho = _crt_residue(factorize(dt), cls.tight_primes)
        first = rho if rho >= 1 else r
        blocks[dt] = apcomb.make_ap(first, r, tau_rest)

    size = tau_rest
    for p, a in smooth:
        size //= a + 1
        new_blocks: dict[int, APCombination] = {}
        for v in sorted(blocks):
            parts = _split_block(blocks[v], p, a + 1, size, end)
            new_blocks[v] = parts[0]
            for t, peel in enumerate(parts[1:], start=1):
                new_blocks[p**t * v] = peel
        blocks = new_blocks

    cert = PartitionCertificate(
        interval_start=1,
        interval_length=end,
        block_size=n_prime.tau,
        error_budget=prod(2 * a for _, a in smooth),
        step_modulus=r * m_j.value,
        blocks=blocks,
    )
    _check_sizes(cert)
    return cert


def _check_sizes(cert: PartitionCertificate) -> None:
    for v, block in cert.blocks.items():
        if block.size != cert.block_size:
            raise ConstructionError(f"block {v} has size {block.size}")


def validate_partition(cert: PartitionCertificate) -> None:
    """Re-check every invariant from the certificate alone (no trust in
    the construction path); raises ValidationError with a witness."""
    blocks = cert.blocks
    n_blocks = len(blocks)
    if n_blocks == 0:
        raise ValidationError("certificate has no blocks")
    if cert.block_size * n_blocks != cert.interval_length:
        raise ValidationError("block sizes do not tile the interval length")
    lo = cert.interval_start
    hi = cert.interval_start + cert.interval_length - 1
    for v, block in blocks.items():
        if v <= 0:
            raise ValidationError("block index must be positive", witness=v)
        if not apcomb.is_honest(block):
            raise ValidationError(
                "block is not a valid signed combination", witness=v
            )
        if block.size != cert.block_size:
            raise ValidationError("block has the wrong size", witness=v)
        if block.k > cert.error_budget:
            raise ValidationError("block complexity exceeds the budget", witness=v)
        for _, _, step, length in block.terms:
            if length and cert.step_modulus % step:
                raise ValidationError(
                    "constituent step does not divide the modulus", witness=v
                )
        mn, mx = block.min_element(), block.max_element()
        if mn is None or mn < lo or mx > hi:
            raise ValidationError("block leaves the interval", witness=v)
        for p, _ in factorize(v).factors:
            if apcomb.count_divisible(block, p)["count"]:
                raise ValidationError(
                    "block contains an element sharing a factor with its index",
                    witness=v,
                )
    keys = sorted(blocks)
    for a in range(n_blocks):
        for b in range(a + 1, n_blocks):
            if apcomb.intersection_count(blocks[keys[a]], blocks[keys[b]]):
                raise ValidationError(
                    "blocks overlap", witness=(keys[a], keys[b])
                )
    # disjoint blocks of total size L inside an interval of length L tile it
