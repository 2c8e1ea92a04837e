"""Exact gcd census over power-of-two intervals.

For n the product of the first ``ell`` odd primes, count how often
``omega(gcd(s, n))`` takes each value as s ranges over an interval:

* ``odd`` mode: odd s in [1, 2^(ell+1)]  (2^ell integers),
* ``full`` mode: all s in [1, 2^ell].

Counts are computed exactly by inclusion-exclusion over squarefree
divisors v of n with v <= N: with S_m the sum of A(v) = #{s : v | s}
over the v with omega(v) = m,

    c_i = sum_{m >= i} (-1)^(m-i) C(m, i) S_m.

The divisor enumeration is a depth-first search over primes in
increasing order, pruned as soon as the partial product exceeds N.
A numba kernel does the heavy rows; a pure-Python walk of the same
tree is used when numba is unavailable or DIVMATCH_NO_NUMBA is set.
Both paths return exact integers, and every row is checked against
the identity sum_i c_i = 2^ell before it is returned.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import comb, gcd

import numpy as np

from .arith import PRIMES, factorize
from .errors import CapacityError, ConstructionError, DomainError, RangeError

MIN_ELL = 3
MAX_ELL = 46
MODES = ("odd", "full")

# Display order of the gcd-count columns, mirroring the shipped tables.
GCD_COLUMNS = (105, 15, 21, 3, "x3", 5)


def _require_mode(mode: str) -> None:
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")


def _require_ell(ell: int) -> None:
    if not (MIN_ELL <= ell <= MAX_ELL):
        raise RangeError(f"ell must lie in [{MIN_ELL}, {MAX_ELL}], got {ell}")


def interval_bound(ell: int, mode: str) -> int:
    """Right endpoint N of the counted interval."""
    _require_mode(mode)
    return 1 << (ell + 1) if mode == "odd" else 1 << ell


def modulus_primes(ell: int) -> list:
    """The first ell odd primes (the prime support of the modulus n)."""
    return [PRIMES.nth(i) for i in range(2, ell + 2)]


def count_multiples(v: int, N: int, mode: str) -> int:
    """A(v): number of counted s in [1, N] divisible by v."""
    _require_mode(mode)
    if v < 1:
        raise DomainError("v must be a positive integer")
    if mode == "odd":
        if v % 2 == 0:
            raise DomainError("odd mode counts odd s only; even v never divides")
        return (N // v + 1) // 2
    return N // v


def omega_max(ell: int, mode: str) -> int:
    """Largest k such that the product of the k smallest odd primes <= N."""
    _require_ell(ell)
    N = interval_bound(ell, mode)
    prod, k = 1, 0
    for p in modulus_primes(ell):
        prod *= p
        if prod > N:
            break
        k += 1
    return k


@dataclass(frozen=True)
class CensusRow:
    ell: int
    mode: str
    N: int
    c: tuple
    omega_max: int

    def at_least(self, i: int) -> int:
        """c_{>=i}: number of counted s with omega(gcd(s, n)) >= i."""
        return sum(self.c[i:]) if i <= self.omega_max else 0


@dataclass(frozen=True)
class GcdCounts:
    ell: int
    mode: str
    entries: dict
    x3: int


# ---------------------------------------------------------------------------
# Divisor-sum kernels


def _use_numba() -> bool:
    return not os.environ.get("DIVMATCH_NO_NUMBA")


_numba_kernel = None


def _get_numba_kernel():
    global _numba_kernel
    if _numba_kernel is not None:
        return _numba_kernel
    from numba import njit

    @njit(nogil=True, cache=False)
    def kernel(primes, v0, N, odd_mode):
        k = primes.shape[0]
        S = np.zeros(k + 1, np.int64)
        idx = np.zeros(k + 2, np.int64)
        val = np.zeros(k + 2, np.int64)
        q = N // v0
        if odd_mode:
            q = (q + 1) // 2
        S[0] += q
        val[0] = v0
        idx[0] = 0
        depth = 0
        while depth >= 0:
            j = idx[depth]
            if j >= k:
                depth -= 1
                continue
            idx[depth] = j + 1
            nv = val[depth] * primes[j]
            if nv > N:
                # primes ascend, so every later sibling overflows too
                depth -= 1
                continue
            q = N // nv
            if odd_mode:
                q = (q + 1) // 2
            S[depth + 1] += q
            val[depth + 1] = nv
            idx[depth + 1] = j + 1
            depth += 1
        return S

    _numba_kernel = kernel
    return kernel


def _sums_python(primes, v0: int, N: int, odd_mode: bool) -> list:
    S = [0] * (len(primes) + 1)
    k = len(primes)

    def walk(start, v, m):
        q = N // v
        S[m] += (q + 1) // 2 if odd_mode else q
        for j in range(start, k):
            nv = v * primes[j]
            if nv > N:
                break
            walk(j + 1, nv, m + 1)

    walk(0, v0, 0)
    return S


def _sums_serial(primes, v0: int, N: int, odd_mode: bool) -> list:
    if v0 > N:
        return [0] * (len(primes) + 1)
    if _use_numba():
        kernel = _get_numba_kernel()
        arr = np.asarray(primes, dtype=np.int64)
        out = kernel(arr, v0, N, odd_mode)
        return [int(x) for x in out]
    return _sums_python(list(primes), v0, N, odd_mode)


def _subset_sums(primes, v0: int, N: int, odd_mode: bool, threads=None) -> list:
    """S[m] = sum of A(v0 * w) over squarefree w from `primes`, omega(w)=m.

    Only terms with v0 * w <= N contribute (the rest vanish anyway).
    With threads > 1 the DFS forest is split at depth two into disjoint
    subtrees; exact integer addition is associative, so the merged result
    is identical to the serial one.
    """
    primes = list(primes)
    if v0 > N:
        return [0] * (len(primes) + 1)
    if not threads or threads <= 1 or len(primes) < 3:
        return _sums_serial(primes, v0, N, odd_mode)

    S = [0] * (len(primes) + 1)

    def a(v):
        q = N // v
        return (q + 1) // 2 if odd_mode else q

    jobs = []
    S[0] += a(v0)
    for i, p in enumerate(primes):
        v1 = v0 * p
        if v1 > N:
            break
        S[1] += a(v1)
        for j in range(i + 1, len(primes)):
            v2 = v1 * primes[j]
            if v2 > N:
                break
            jobs.append((v2, j + 1))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(_sums_serial, primes[j:], v2, N, odd_mode)
            for v2, j in jobs
        ]
        for fut in futures:
            for m, x in enumerate(fut.result()):
                S[2 + m] += x
    return S


def _counts_from_sums(S) -> list:
    """Inclusion-exclusion: c_i = sum_{m>=i} (-1)^(m-i) C(m,i) S_m."""
    top = max((m for m, s in enumerate(S) if s), default=0)
    out = []
    for i in range(top + 1):
        ci = sum(
            (-1) ** (m - i) * comb(m, i) * S[m] for m in range(i, top + 1)
        )
        if ci < 0:
            raise ConstructionError(f"negative count c_{i} = {ci}")
        out.append(ci)
    return out


# ---------------------------------------------------------------------------
# Public operations


def census_row(ell: int, mode: str, threads=None) -> CensusRow:
    """Exact counts c_0..c_{omega_max} for the given row."""
    _require_ell(ell)
    N = interval_bound(ell, mode)
    odd_mode = mode == "odd"
    primes = modulus_primes(ell)
    S = _subset_sums(primes, 1, N, odd_mode, threads)
    c = _counts_from_sums(S)
    wmax = len(c) - 1
    if wmax != omega_max(ell, mode):
        raise ConstructionError("omega_max mismatch against greedy bound")
    if sum(c) != 1 << ell:
        raise ConstructionError(f"row sum != 2^{ell}")
    return CensusRow(ell=ell, mode=mode, N=N, c=tuple(c), omega_max=wmax)


def _restricted_at_least_3(ell: int, N: int, odd_mode: bool, threads) -> int:
    """#{counted s : 3 does not divide s and omega(gcd(s, n)) >= 3}."""
    pool = modulus_primes(ell)[1:]  # drop the prime 3
    S_all = _subset_sums(pool, 1, N, odd_mode, threads)
    S_div3 = _subset_sums(pool, 3, N, odd_mode, threads)
    S = [a - b for a, b in zip(S_all, S_div3)]
    c = _counts_from_sums(S)
    return sum(c[3:])


def gcd_counts(ell: int, mode: str, ds, threads=None) -> GcdCounts:
    """Exact gcd_d for each requested d, plus the auxiliary count x3.

    gcd_d counts the s in scope with gcd(s, n) exactly d; x3 counts the
    s divisible by 3 together with the s (coprime to 3) whose gcd with n
    has at least three prime factors.
    """
    _require_ell(ell)
    _require_mode(mode)
    N = interval_bound(ell, mode)
    odd_mode = mode == "odd"
    primes = modulus_primes(ell)
    prime_set = set(primes)

    entries = {}
    for d in ds:
        f = factorize(d)
        if not f.is_squarefree or any(p not in prime_set for p, _ in f.factors):
            raise DomainError(
                f"d={d} is not a squarefree product of primes of the modulus"
            )
        pool = [p for p in primes if d % p != 0]
        S = _subset_sums(pool, d, N, odd_mode, threads)
        entries[d] = sum((-1) ** m * s for m, s in enumerate(S))

    x3 = count_multiples(3, N, mode) + _restricted_at_least_3(
        ell, N, odd_mode, threads
    )
    return GcdCounts(ell=ell, mode=mode, entries=entries, x3=x3)


def _direct_counts(primes, ell: int, mode: str) -> list:
    """c_i by walking the whole interval; only for small ell."""
    N = interval_bound(ell, mode)
    size = N // 2 if mode == "odd" else N
    marks = np.zeros(size, dtype=np.uint8)
    for p in primes:
        if mode == "odd":
            # s = 2t + 1 is divisible by odd p iff t = (p-1)/2 (mod p)
            marks[(p - 1) // 2 :: p] += 1
        else:
            marks[p - 1 :: p] += 1
    counts = np.bincount(marks)
    return [int(x) for x in counts]


def monotone_majorize_check(u: int, ell: int) -> bool:
    """Whether the smallest-prime modulus majorizes u, by direct enumeration.

    u must be an odd squarefree integer with exactly ell prime factors; n
    is the product of the ell smallest odd primes. Counting odd s in
    [1, 2^(ell+1)], checks the suffix domination c_{>=i}(u) <= c_{>=i}(n)
    for every i >= 1 (replacing u's primes with smaller ones only
    increases how many s share at least i primes with the modulus; the
    i = 0 suffix is 2^ell on both sides).
    """
    _require_ell(ell)
    if ell > 20:
        raise CapacityError("direct enumeration supported only for ell <= 20")
    f = factorize(u)
    if u % 2 == 0 or not f.is_squarefree or f.omega != ell:
        raise DomainError("u must be odd and squarefree with ell prime factors")
    cu = _direct_counts(sorted(p for p, _ in f.factors), ell, "odd")
    cn = _direct_counts(modulus_primes(ell), ell, "odd")
    width = max(len(cu), len(cn))
    cu += [0] * (width - len(cu))
    cn += [0] * (width - len(cn))
    return all(
        sum(cu[i:]) <= sum(cn[i:]) for i in range(1, width)
    )


# ---------------------------------------------------------------------------
# Display formatting


def format_count(value: int, sigfigs: int | None = 3) -> str:
    """Exact decimal digits below 10^8, scientific notation above.

    Large values are rounded to `sigfigs` significant digits, to
    nearest with halves away from zero; the mantissa renormalizes
    across a power of ten (99,960,000,000 renders as "1.00e11").
    `sigfigs=None` disables rounding entirely (exact decimal string).
    """
    if value < 0:
        raise DomainError("counts are nonnegative")
    if sigfigs is None or value < 10**8:
        return str(value)
    digits = len(str(value))
    exp = digits - 1
    scale = 10 ** max(digits - sigfigs, 0)
    mant = (value + scale // 2) // scale
    if mant >= 10**sigfigs:
        mant //= 10
        exp += 1
    return f"{mant // 10 ** (sigfigs - 1)}.{mant % 10 ** (sigfigs - 1):0{sigfigs - 1}d}e{exp}"


def format_row(row, sigfigs: int | None = 3) -> list:
    """Display cells for a census or gcd-count row.

    CensusRow -> [ell, omega_max, c_0..c_6, c_{>=7}] with blanks where
    the row has no such count. GcdCounts -> [ell, gcd_105, gcd_15,
    gcd_21, gcd_3, x3, gcd_5] with blanks for unrequested divisors.
    """
    if isinstance(row, CensusRow):
        cells = [str(row.ell), str(row.omega_max)]
        for i in range(7):
            cells.append(
                format_count(row.c[i], sigfigs) if i <= row.omega_max else ""
            )
        tail = row.at_least(7)
        cells.append(format_count(tail, sigfigs) if row.omega_max >= 7 else "")
        return cells
    if isinstance(row, GcdCounts):
        cells = [str(row.ell)]
        for col in GCD_COLUMNS:
            if col == "x3":
                cells.append(format_count(row.x3, sigfigs))
            elif col in row.entries:
                cells.append(format_count(row.entries[col], sigfigs))
            else:
                cells.append("")
        return cells
    raise DomainError(f"cannot format {type(row).__name__}")
