"""Coprime bipartite matchings with verifiable certificates.

The central question: given equal-size lists of positive integers, is
there a bijection pairing each element of one with a coprime element of
the other?  Exact maximum flow on signature classes decides this.  Two
integers are adjacent iff they share no prime, and only primes dividing
elements on both sides matter, so vertices collapse into classes by
their support masks over those primes.  At maximum flow, either the
matching is perfect (expanded to explicit pairs) or the residual cut
yields a set S with |N(S)| < |S|, a Hall-condition violation.

On top of that sit the number-theoretic routes: a fast divisor-count
obstruction for non-matchable numbers, an explicit product formula for
the tower numbers prod q^(q-1), constructive matching through interval
partitions, transformations between matchings (halving, even/odd
composition, filling in a prime power, boosting by a huge prime), and a
residue-class decision procedure for the stronger property that every
coprime arithmetic progression of the right length can be matched.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from math import gcd, isqrt, prod

import numpy as np

from .arith import FactoredInteger, PRIMES, classify, divisors, factorize
from .errors import CapacityError, DomainError, ValidationError
from .partition import build_m_partition, build_partition

DEFAULT_SIDE_LIMIT = 1 << 20
_INF = 1 << 60


# ---------------------------------------------------------------------------
# certificates and witnesses


@dataclass(frozen=True)
class MatchingCertificate:
    """A claimed coprime bijection, pairs of (divisor, target)."""

    pairs: tuple[tuple[int, int], ...]
    domain_descriptor: dict
    codomain_descriptor: dict


@dataclass(frozen=True)
class HallWitness:
    """A set S on one side with fewer than |S| coprime neighbors."""

    side: str
    S: tuple[int, ...]
    neighborhood_size: int


@dataclass(frozen=True)
class PrimePowerObstruction:
    """Proof of non-matchability from a prime power p^p dividing n.

    With r = tau mod p, the targets coprime to p number at most
    r(p+1)/(p+1)... concretely: tau > r(p+1) leaves too few targets for
    the divisors not divisible by p to absorb the interval.
    """

    p: int
    exponent: int
    tau: int
    r: int


def descriptor_members(desc: dict) -> list[int]:
    kind = desc.get("kind")
    if kind == "divisors":
        return divisors(desc["n"], limit=None)
    if kind == "ap":
        first, step, length = desc["first"], desc["step"], desc["length"]
        return [first + i * step for i in range(length)]
    if kind == "list":
        return list(desc["values"])
    raise DomainError(f"unknown descriptor kind {kind!r}")


def validate_matching(cert: MatchingCertificate) -> None:
    """Re-check bijection and pairwise coprimality from scratch."""
    lefts = [d for d, _ in cert.pairs]
    rights = [t for _, t in cert.pairs]
    if len(set(lefts)) != len(lefts):
        raise ValidationError("a divisor appears twice")
    if len(set(rights)) != len(rights):
        raise ValidationError("a target appears twice")
    for d, t in cert.pairs:
        if gcd(d, t) != 1:
            raise ValidationError("pair is not coprime", witness=(d, t))
    if set(lefts) != set(descriptor_members(cert.domain_descriptor)):
        raise ValidationError("domain does not match its descriptor")
    if set(rights) != set(descriptor_members(cert.codomain_descriptor)):
        raise ValidationError("codomain does not match its descriptor")


def validate_hall_witness(witness: HallWitness, left, right) -> None:
    """Check |N(S)| = neighborhood_size < |S| against the coprime graph."""
    own, other = (left, right) if witness.side == "left" else (right, left)
    members = set(witness.S)
    if len(members) != len(witness.S) or not members <= set(own):
        raise ValidationError("witness set is not a subset of its side")
    neighborhood = {t for t in other if any(gcd(s, t) == 1 for s in members)}
    if len(neighborhood) != witness.neighborhood_size:
        raise ValidationError(
            f"neighborhood has size {len(neighborhood)}, "
            f"claimed {witness.neighborhood_size}"
        )
    if witness.neighborhood_size >= len(members):
        raise ValidationError("witness does not violate the Hall condition")


def validate_obstruction(obs: PrimePowerObstruction, n: int | FactoredInteger) -> None:
    f = factorize(n)
    if not PRIMES.is_prime(obs.p) or f.valuation(obs.p) != obs.exponent:
        raise ValidationError("exponent does not match the integer")
    if obs.exponent < obs.p:
        raise ValidationError("prime power is not large enough to obstruct")
    if obs.tau != f.tau or obs.r != obs.tau % obs.p:
        raise ValidationError("divisor counts do not match")
    if obs.tau <= obs.r * (obs.p + 1):
        raise ValidationError("claimed obstruction inequality fails")


# ---------------------------------------------------------------------------
# class-level maximum flow


class _Dinic:
    def __init__(self, n: int):
        self.graph: list[list[list[int]]] = [[] for _ in range(n)]

    def add(self, u: int, v: int, cap: int) -> None:
        self.graph[u].append([v, cap, len(self.graph[v])])
        self.graph[v].append([u, 0, len(self.graph[u]) - 1])

    def _levels(self, s: int, t: int) -> list[int]:
        level = [-1] * len(self.graph)
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v, cap, _ in self.graph[u]:
                if cap > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level

    def _push(self, u: int, t: int, f: int, level, it) -> int:
        if u == t:
            return f
        while it[u] < len(self.graph[u]):
            edge = self.graph[u][it[u]]
            v, cap, rev = edge
            if cap > 0 and level[v] == level[u] + 1:
                pushed = self._push(v, t, min(f, cap), level, it)
                if pushed:
                    edge[1] -= pushed
                    self.graph[v][rev][1] += pushed
                    return pushed
            it[u] += 1
        return 0

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while True:
            level = self._levels(s, t)
            if level[t] < 0:
                return flow
            it = [0] * len(self.graph)
            while True:
                pushed = self._push(s, t, _INF, level, it)
                if not pushed:
                    break
                flow += pushed

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v, cap, _ in self.graph[u]:
                if cap > 0 and v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen


def _class_flow(left_counts: dict[int, int], right_counts: dict[int, int]):
    """Max flow between signature classes; edge iff masks are disjoint.

    Returns (flow, edge_flow, reachable_left, reachable_right); the two
    reachability sets describe the source side of the minimum cut and
    are only meaningful when flow < total.
    """
    lmasks = sorted(left_counts)
    rmasks = sorted(right_counts)
    ln, rn = len(lmasks), len(rmasks)
    source, sink = ln + rn, ln + rn + 1
    dinic = _Dinic(ln + rn + 2)
    for i, m in enumerate(lmasks):
        dinic.add(source, i, left_counts[m])
    for j, m in enumerate(rmasks):
        dinic.add(ln + j, sink, right_counts[m])
    left_edges: list[list[int]] = []
    for i, lm in enumerate(lmasks):
        row = []
        for j, rm in enumerate(rmasks):
            if lm & rm == 0:
                row.append(len(dinic.graph[i]))
                dinic.add(i, ln + j, _INF)
        left_edges.append(row)
    flow = dinic.max_flow(source, sink)
    edge_flow: dict[tuple[int, int], int] = {}
    for i, lm in enumerate(lmasks):
        for eidx in left_edges[i]:
            v, cap, _ = dinic.graph[i][eidx]
            pushed = _INF - cap
            if pushed:
                edge_flow[(lm, rmasks[v - ln])] = pushed
    reach = dinic.reachable(source)
    reach_left = {lmasks[i] for i in range(ln) if i in reach}
    reach_right = {rmasks[j] for j in range(rn) if ln + j in reach}
    return flow, edge_flow, reach_left, reach_right


def _match_groups(left_groups: dict[int, list[int]], right_groups: dict[int, list[int]]):
    """Either ("match", pairs) or ("hall", S, neighborhood_size)."""
    left_counts = {m: len(v) for m, v in left_groups.items()}
    right_counts = {m: len(v) for m, v in right_groups.items()}
    total = sum(left_counts.values())
    flow, edge_flow, reach_left, reach_right = _class_flow(left_counts, right_counts)
    if flow == total:
        lpool = {m: sorted(v) for m, v in left_groups.items()}
        rpool = {m: sorted(v) for m, v in right_groups.items()}
        pairs = []
        for (lm, rm), f in sorted(edge_flow.items()):
            for _ in range(f):
                pairs.append((lpool[lm].pop(), rpool[rm].pop()))
        return "match", pairs
    members = sorted(x for m in reach_left for x in left_groups[m])
    neighborhood = sum(len(right_groups[m]) for m in reach_right)
    return "hall", members, neighborhood


def _masks_for(values, primes) -> dict[int, list[int]]:
    """Group values by their divisibility mask over the given primes."""
    groups: dict[int, list[int]] = defaultdict(list)
    if not primes:
        groups[0] = list(values)
        return groups
    arr = np.asarray(list(values), dtype=np.int64)
    masks = np.zeros(arr.shape, dtype=np.int64)
    for i, p in enumerate(primes):
        masks |= (arr % p == 0).astype(np.int64) << i
    for v, m in zip(arr.tolist(), masks.tolist()):
        groups[m].append(v)
    return groups


def _interval_mask_counts(primes, m: int) -> dict[int, int]:
    """Mask -> count over the interval [1, m], by sieving."""
    masks = np.zeros(m + 1, dtype=np.int64)
    for i, p in enumerate(primes):
        masks[p::p] |= np.int64(1 << i)
    counts = np.bincount(masks[1:])
    return {mask: int(c) for mask, c in enumerate(counts.tolist()) if c}


def _interval_mask_groups(primes, m: int) -> dict[int, list[int]]:
    masks = np.zeros(m + 1, dtype=np.int64)
    for i, p in enumerate(primes):
        masks[p::p] |= np.int64(1 << i)
    order = np.argsort(masks[1:], kind="stable") + 1
    groups: dict[int, list[int]] = {}
    sorted_masks = masks[order]
    start = 0
    while start < m:
        mask = int(sorted_masks[start])
        end = start
        while end < m and sorted_masks[end] == mask:
            end += 1
        groups[mask] = order[start:end].tolist()
        start = end
    return groups


def _divisor_mask_counts(factors, primes) -> dict[int, int]:
    """Mask -> count of divisors, over the listed primes only.

    Divisors are counted with the multiplicity coming from exponent
    choices: primes outside the mask list multiply every class equally.
    """
    index = {p: i for i, p in enumerate(primes)}
    outside = prod(e + 1 for p, e in factors if p not in index)
    counts = {0: outside}
    for p, e in factors:
        if p not in index:
            continue
        bit = 1 << index[p]
        new: dict[int, int] = {}
        for m, c in counts.items():
            new[m] = new.get(m, 0) + c  # exponent 0
            new[m | bit] = new.get(m | bit, 0) + c * e  # exponents 1..e
        counts = new
    return counts


# ---------------------------------------------------------------------------
# core operations


def coprime_matching(left, right, limit: int = DEFAULT_SIDE_LIMIT):
    """Perfect coprime matching between two lists, or a Hall witness.

    Exactly one of the two outcomes is returned; both are re-validated
    before being handed back.
    """
    left = list(left)
    right = list(right)
    if len(left) != len(right):
        raise DomainError("sides must have equal size")
    if len(left) > limit:
        raise CapacityError(f"side size {len(left)} exceeds limit {limit}")
    if len(set(left)) != len(left) or len(set(right)) != len(right):
        raise DomainError("elements must be distinct within each side")
    if any(x <= 0 for x in left) or any(x <= 0 for x in right):
        raise DomainError("elements must be positive integers")
    lsupport = set()
    for v in set(left):
        lsupport.update(p for p, _ in factorize(v).factors)
    rsupport = set()
    for v in set(right):
        rsupport.update(p for p, _ in factorize(v).factors)
    primes = sorted(lsupport & rsupport)
    outcome = _match_groups(_masks_for(left, primes), _masks_for(right, primes))
    if outcome[0] == "match":
        cert = MatchingCertificate(
            pairs=tuple(sorted(outcome[1])),
            domain_descriptor={"kind": "list", "values": tuple(sorted(left))},
            codomain_descriptor={"kind": "list", "values": tuple(sorted(right))},
        )
        validate_matching(cert)
        return cert
    witness = HallWitness(side="left", S=tuple(outcome[1]), neighborhood_size=outcome[2])
    validate_hall_witness(witness, left, right)
    return witness


def quick_nonmatchable(n: int | FactoredInteger) -> PrimePowerObstruction | None:
    """Fast negative test: the smallest prime p with p^p | n whose
    divisor count satisfies tau > (tau mod p)(p+1) proves n is not
    matchable; returns None when inconclusive."""
    f = factorize(n)
    tau = f.tau
    for p, e in f.factors:
        if e >= p:
            r = tau % p
            if tau > r * (p + 1):
                return PrimePowerObstruction(p=p, exponent=e, tau=tau, r=r)
    return None


def is_matchable(n: int | FactoredInteger, limit: int = DEFAULT_SIDE_LIMIT) -> dict:
    """Decide matchability of n with verifiable evidence.

    Pipeline: divisor-count obstruction, then the constructive partition
    route for M-numbers with tight primes, then exhaustive matching of
    the divisors against [1, tau(n)].
    """
    f = factorize(n)
    obstruction = quick_nonmatchable(f)
    if obstruction is not None:
        return {"matchable": False, "evidence": obstruction}
    tau = f.tau
    if tau > limit:
        raise CapacityError(f"tau={tau} exceeds limit {limit}")
    cls = classify(f)
    if cls.is_m_number and cls.r > 1:
        built = match_via_partition(f)
        if isinstance(built, MatchingCertificate):
            return {"matchable": True, "evidence": built}
        # a block-level failure is not conclusive; fall through
    primes = [p for p, _ in f.factors if p <= tau]
    left_groups = _divisor_groups(f, primes)
    right_groups = _interval_mask_groups(primes, tau)
    outcome = _match_groups(left_groups, right_groups)
    if outcome[0] == "match":
        cert = MatchingCertificate(
            pairs=tuple(sorted(outcome[1])),
            domain_descriptor={"kind": "divisors", "n": f.value},
            codomain_descriptor={"kind": "ap", "first": 1, "step": 1, "length": tau},
        )
        validate_matching(cert)
        return {"matchable": True, "evidence": cert}
    witness = HallWitness(side="left", S=tuple(outcome[1]), neighborhood_size=outcome[2])
    validate_hall_witness(witness, divisors(f, limit=None), range(1, tau + 1))
    return {"matchable": False, "evidence": witness}


def _divisor_groups(f: FactoredInteger, primes) -> dict[int, list[int]]:
    index = {p: i for i, p in enumerate(primes)}
    groups: dict[int, list[int]] = defaultdict(list)
    for d in divisors(f, limit=None):
        mask = 0
        for p, i in index.items():
            if d % p == 0:
                mask |= 1 << i
        groups[mask].append(d)
    return groups


def mp_matching(p: int, limit: int = DEFAULT_SIDE_LIMIT) -> MatchingCertificate:
    """The explicit matching for the tower number prod_{q<=p} q^(q-1):
    position j receives the divisor prod q^(j mod q)."""
    if not PRIMES.is_prime(p):
        raise DomainError(f"{p} is not prime")
    qs = PRIMES.up_to(p)
    tau = prod(qs)
    if tau > limit:
        raise CapacityError(f"tau={tau} exceeds limit {limit}")
    n = prod(q ** (q - 1) for q in qs)
    pairs = []
    for j in range(1, tau + 1):
        psi = prod(q ** (j % q) for q in qs)
        pairs.append((psi, j))
    cert = MatchingCertificate(
        pairs=tuple(sorted(pairs)),
        domain_descriptor={"kind": "divisors", "n": n},
        codomain_descriptor={"kind": "ap", "first": 1, "step": 1, "length": tau},
    )
    validate_matching(cert)
    return cert


def halve_matching(cert: MatchingCertificate) -> MatchingCertificate:
    """From a matching for 2n (n odd) to one for n: odd divisors keep
    half their (necessarily even) targets."""
    validate_matching(cert)
    two_n = max(d for d, _ in cert.pairs)
    count = len(cert.pairs)
    if two_n % 4 == 0 or two_n % 2:
        raise ValidationError("certificate is not for twice an odd number")
    n = two_n // 2
    if set(d for d, _ in cert.pairs) != set(divisors(two_n, limit=None)):
        raise ValidationError("certificate domain is not the divisor set")
    if set(t for _, t in cert.pairs) != set(range(1, count + 1)):
        raise ValidationError("certificate codomain is not an initial interval")
    halved = []
    for d, t in cert.pairs:
        if d % 2:
            if t % 2:
                raise ValidationError(
                    "odd divisor holds an odd target", witness=(d, t)
                )
            halved.append((d, t // 2))
    out = MatchingCertificate(
        pairs=tuple(sorted(halved)),
        domain_descriptor={"kind": "divisors", "n": n},
        codomain_descriptor={"kind": "ap", "first": 1, "step": 1, "length": count // 2},
    )
    validate_matching(out)
    return out


def compose_even_odd(
    odd_cert: MatchingCertificate, interval_cert: MatchingCertificate
) -> MatchingCertificate:
    """Combine a matching of D(u) to the odd integers in [1, 2 tau(u)]
    with one of D(u) to [1, tau(u)] into a matching for 2u."""
    validate_matching(odd_cert)
    validate_matching(interval_cert)
    u = max(d for d, _ in interval_cert.pairs)
    if u % 2 == 0:
        raise ValidationError("base integer must be odd")
    divs = set(divisors(u, limit=None))
    tau = len(divs)
    if {d for d, _ in interval_cert.pairs} != divs or {
        d for d, _ in odd_cert.pairs
    } != divs:
        raise ValidationError("certificates do not share the divisor domain")
    if {t for _, t in interval_cert.pairs} != set(range(1, tau + 1)):
        raise ValidationError("interval certificate must cover [1, tau]")
    if {t for _, t in odd_cert.pairs} != set(range(1, 2 * tau, 2)):
        raise ValidationError("odd certificate must cover the odd integers")
    pairs = [(2 * d, t) for d, t in odd_cert.pairs]
    pairs += [(d, 2 * t) for d, t in interval_cert.pairs]
    out = MatchingCertificate(
        pairs=tuple(sorted(pairs)),
        domain_descriptor={"kind": "divisors", "n": 2 * u},
        codomain_descriptor={"kind": "ap", "first": 1, "step": 1, "length": 2 * tau},
    )
    validate_matching(out)
    return out


def default_partition_depth(n: int | FactoredInteger) -> int:
    """Largest j (capped by the square root of the count of non-tight
    prime factors) whose partition hypothesis holds."""
    cls = classify(n)
    ell = cls.rest_part.omega
    for j in range(isqrt(ell) if ell else 0, -1, -1):
        tau_prime = _smooth_complement_tau(cls, j)
        if tau_prime >= 4**j * cls.r**j:
            return j
    return 0


def _smooth_split(cls, j: int):
    bound = PRIMES.nth(j + 1) if j else 2
    smooth = [(p, e) for p, e in cls.rest_part.factors if p <= bound]
    return smooth


def _smooth_complement_tau(cls, j: int) -> int:
    return cls.rest_part.tau // prod(e + 1 for _, e in _smooth_split(cls, j))


def match_via_partition(n: int | FactoredInteger, j: int | None = None,
                        limit: int = DEFAULT_SIDE_LIMIT):
    """Assemble a full matching from per-block matchings of a partition.

    Even squarefree integers go through the binary interval partition on
    their j smallest primes; everything else goes through the M-number
    partition (residue classes for tight primes, multiway splits for
    repeated small primes).  Each block indexed by d gets a coprime
    matching of the divisors of the residual part; the pair (e, a) in
    block d becomes (d*e, a).  Returns the block's HallWitness if some
    block cannot be matched (a diagnostic; the underlying results say
    this cannot happen when the partition hypotheses hold with room to
    spare).
    """
    f = factorize(n)
    cls = classify(f)
    if not cls.is_m_number:
        raise DomainError(f"{cls.n.value} has a prime p with v_p >= p")
    if f.is_squarefree and f.value % 2 == 0 and f.omega >= 2:
        return _match_squarefree_even(f, j, limit)
    if j is None:
        j = default_partition_depth(cls.n)
    cert = build_m_partition(cls.n, j)
    smooth = dict(_smooth_split(cls, j))
    n_prime = FactoredInteger.from_factors(
        (p, e) for p, e in cls.rest_part.factors if p not in smooth
    )
    return _assemble_from_blocks(f, n_prime, cert, limit)


def _match_squarefree_even(f: FactoredInteger, j: int | None, limit: int):
    ell = f.omega
    if j is None:
        j = max(1, min(isqrt(ell), ell // 2))
    primes_j = [p for p, _ in f.factors[:j]]
    if len(primes_j) < j:
        raise DomainError(f"{f.value} has fewer than {j} prime factors")
    cert = build_partition(primes_j, (1, f.tau))
    n_prime = FactoredInteger.from_factors(f.factors[j:])
    return _assemble_from_blocks(f, n_prime, cert, limit)


def _assemble_from_blocks(f: FactoredInteger, n_prime: FactoredInteger,
                          cert, limit: int):
    if cert.block_size > limit:
        raise CapacityError(f"block size {cert.block_size} exceeds limit {limit}")
    divs = divisors(n_prime, limit=None)
    primes = [p for p, _ in n_prime.factors if p <= cert.interval_length]
    left_groups = _divisor_groups(n_prime, primes)
    pairs = []
    for d in sorted(cert.blocks):
        elements = cert.blocks[d].elements()
        outcome = _match_groups(left_groups, _masks_for(elements, primes))
        if outcome[0] == "hall":
            witness = HallWitness(
                side="left", S=tuple(outcome[1]), neighborhood_size=outcome[2]
            )
            validate_hall_witness(witness, divs, elements)
            return witness
        pairs.extend((d * e, a) for e, a in outcome[1])
    out = MatchingCertificate(
        pairs=tuple(sorted(pairs)),
        domain_descriptor={"kind": "divisors", "n": f.value},
        codomain_descriptor={
            "kind": "ap", "first": 1, "step": 1, "length": f.tau,
        },
    )
    validate_matching(out)
    return out


# ---------------------------------------------------------------------------
# strong matchability


def _representative_ap(a0: int, q0: int, modulus: int) -> tuple[int, int]:
    """A genuine coprime progression (first, step) in the residue class."""
    q = q0 if q0 else modulus
    for s in range(4 * modulus + 2):
        a = a0 + s * modulus
        if a >= 1 and gcd(a, q) == 1:
            return a, q
    raise DomainError("no coprime representative exists for this class")


def decide_strong(n: int | FactoredInteger, work_limit: int = 20_000_000) -> dict:
    """Is every coprime progression of length tau(n) coprimely matchable
    to the divisors of n?

    Residue classes (a0, q0) mod rad(n) with gcd(a0, q0, rad(n)) = 1 are
    exactly the classes realized by coprime progressions, and the
    adjacency structure only depends on the class, so one matching per
    class (on an explicit representative) decides the property.
    """
    f = factorize(n)
    radical = f.rad
    tau = f.tau
    if radical * radical * tau > work_limit:
        raise CapacityError("radical too large for class enumeration")
    primes = [p for p, _ in f.factors]
    divs = divisors(f, limit=None)
    left_groups = _divisor_groups(f, primes)
    certs: dict[tuple[int, int], MatchingCertificate] = {}
    for a0 in range(radical):
        for q0 in range(radical):
            if gcd(gcd(a0, q0), radical) != 1:
                continue
            first, step = _representative_ap(a0, q0, radical)
            targets = [first + k * step for k in range(tau)]
            outcome = _match_groups(left_groups, _masks_for(targets, primes))
            if outcome[0] == "hall":
                witness = HallWitness(
                    side="left", S=tuple(outcome[1]), neighborhood_size=outcome[2]
                )
                validate_hall_witness(witness, divs, targets)
                return {
                    "strong": False,
                    "witness": {
                        "class": (a0, q0),
                        "progression": (first, step),
                        "hall": witness,
                    },
                }
            cert = MatchingCertificate(
                pairs=tuple(sorted(outcome[1])),
                domain_descriptor={"kind": "divisors", "n": f.value},
                codomain_descriptor={
                    "kind": "ap", "first": first, "step": step, "length": tau,
                },
            )
            validate_matching(cert)
            certs[(a0, q0)] = cert
    return {"strong": True, "witness": certs}


def strong_fill(n: int | FactoredInteger, p: int, first: int, step: int,
                certs) -> MatchingCertificate:
    """Matchings of D(n) to the p stride-subsequences of a coprime
    progression of length p*tau(n) combine into a matching for
    p^(p-1) * n on the whole progression."""
    f = factorize(n)
    if not PRIMES.is_prime(p):
        raise DomainError(f"{p} is not prime")
    if f.value % p == 0:
        raise DomainError("the prime must not divide n")
    if step <= 0 or gcd(first, step) != 1:
        raise DomainError("a coprime progression requires gcd(first, step) = 1")
    tau = f.tau
    certs = list(certs)
    if len(certs) != p:
        raise DomainError(f"expected {p} sub-progression matchings")
    divs = tuple(sorted(divisors(f, limit=None)))
    for idx, cert in enumerate(certs):
        expected = MatchingCertificate(
            pairs=cert.pairs,
            domain_descriptor={"kind": "divisors", "n": f.value},
            codomain_descriptor={
                "kind": "ap",
                "first": first + idx * step,
                "step": p * step,
                "length": tau,
            },
        )
        validate_matching(expected)
    # the one subsequence whose terms are all divisible by p, if any
    j0 = 1
    if step % p:
        shift = (-first * pow(step, -1, p)) % p  # index with term ≡ 0 (mod p)
        j0 = shift + 1
    pairs = list(certs[j0 - 1].pairs)
    exponents = range(1, p)
    others = [jj for jj in range(1, p + 1) if jj != j0]
    for k, jj in zip(exponents, others):
        pairs.extend((p**k * d, t) for d, t in certs[jj - 1].pairs)
    out = MatchingCertificate(
        pairs=tuple(sorted(pairs)),
        domain_descriptor={"kind": "divisors", "n": p ** (p - 1) * f.value},
        codomain_descriptor={
            "kind": "ap", "first": first, "step": step, "length": p * tau,
        },
    )
    validate_matching(out)
    return out


def prime_boost(n: int | FactoredInteger, p: int, first: int, step: int,
                certs) -> MatchingCertificate:
    """For p > 2 tau(n) not dividing n: matchings of D(n) to both halves
    of a coprime progression of length 2 tau(n) combine into a matching
    for p*n, sending p*D(n) to a half free of p-multiples."""
    f = factorize(n)
    if not PRIMES.is_prime(p):
        raise DomainError(f"{p} is not prime")
    if f.value % p == 0:
        raise DomainError("the prime must not divide n")
    tau = f.tau
    if p <= 2 * tau:
        raise DomainError("the prime must exceed twice the divisor count")
    if step <= 0 or gcd(first, step) != 1:
        raise DomainError("a coprime progression requires gcd(first, step) = 1")
    certs = list(certs)
    if len(certs) != 2:
        raise DomainError("expected matchings for the two halves")
    for idx, cert in enumerate(certs):
        expected = MatchingCertificate(
            pairs=cert.pairs,
            domain_descriptor={"kind": "divisors", "n": f.value},
            codomain_descriptor={
                "kind": "ap",
                "first": first + idx * tau * step,
                "step": step,
                "length": tau,
            },
        )
        validate_matching(expected)
    # at most one term of the whole progression is divisible by p
    boosted_half = 1
    if step % p:
        hit = (-first * pow(step, -1, p)) % p
        if tau <= hit < 2 * tau:
            boosted_half = 0
    plain_half = 1 - boosted_half
    pairs = [(p * d, t) for d, t in certs[boosted_half].pairs]
    pairs += list(certs[plain_half].pairs)
    out = MatchingCertificate(
        pairs=tuple(sorted(pairs)),
        domain_descriptor={"kind": "divisors", "n": p * f.value},
        codomain_descriptor={
            "kind": "ap", "first": first, "step": step, "length": 2 * tau,
        },
    )
    validate_matching(out)
    return out


# ---------------------------------------------------------------------------
# bulk sweeps


def _spf_sieve(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    untouched = np.nonzero(spf == 0)[0]
    spf[untouched] = untouched
    return spf


_decision_cache: dict[tuple, bool] = {}


def _profile_matchable(tau: int, profile: tuple[tuple[int, int], ...]) -> bool:
    """Decision for the class of integers with the given divisor count
    and small-prime exponent profile (primes <= tau only; larger primes
    cannot divide any target and never block an edge)."""
    key = (tau, profile)
    cached = _decision_cache.get(key)
    if cached is not None:
        return cached
    primes = [p for p, _ in profile]
    right = _interval_mask_counts(primes, tau)
    left = _divisor_mask_counts(profile, primes)
    scale = tau // sum(left.values())
    left = {m: c * scale for m, c in left.items()}
    flow, _, _, _ = _class_flow(left, right)
    verdict = flow == tau
    _decision_cache[key] = verdict
    return verdict


def sweep_m_numbers(bound: int, tau_limit: int = 1024) -> dict:
    """Decide matchability for every M-number up to the bound (with
    divisor count at most tau_limit); returns counts and any failures."""
    spf = _spf_sieve(max(bound, 4))
    total = 0
    skipped = 0
    failures: list[int] = []
    for n in range(1, bound + 1):
        m = n
        factors = []
        is_m = True
        while m > 1:
            p = int(spf[m])
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            if e >= p:
                is_m = False
                break
            factors.append((p, e))
        if not is_m:
            continue
        tau = prod(e + 1 for _, e in factors)
        if tau > tau_limit:
            skipped += 1
            continue
        total += 1
        profile = tuple((p, e) for p, e in factors if p <= tau)
        if not _profile_matchable(tau, profile):
            failures.append(n)
    return {
        "count": total,
        "matchable": total - len(failures),
        "failures": failures,
        "over_limit": skipped,
    }
