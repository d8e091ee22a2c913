"""Almost-periodic almost-palindromic (APAP) structure of delta sequences.

A sequence on [-N, N-1] is APAP with period p when it repeats with period p
away from indices congruent to -1 or 0 mod p, adjacent entries at every
multiple of p cancel each other, and the block at indices 1..p-2 is a
palindrome.  Everything here uses only addition, negation and equality of
entries, never rank, so the checks work for entries in any abelian group.

The module also covers the interaction of two such structures on one
sequence: the gcd reduction, and the number-theoretic equivalence relation
behind it, with an independent union-find closure oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CertificationError, HypothesisError, PreconditionError
from .exact_linalg import SymMat
from .quasihom import DeltaSeq

__all__ = [
    "ApapStructure",
    "GcdReduction",
    "is_apap",
    "apap_violation",
    "structure_of",
    "block_sum",
    "consecutive_sum_check",
    "residue_1_to_q",
    "equiv_related",
    "EquivClosure",
    "equiv_closure_oracle",
    "gcd_reduce",
    "minimal_apap_period",
    "divisors",
]


def divisors(x: int) -> list[int]:
    """All positive divisors of x >= 1, ascending."""
    if x < 1:
        raise PreconditionError("divisors expects a positive integer")
    small = [d for d in range(1, math.isqrt(x) + 1) if x % d == 0]
    large = [x // d for d in reversed(small) if d * d != x]
    return small + large


def _check_period(d: DeltaSeq, p: int) -> None:
    if not 2 <= p <= d.N:
        raise PreconditionError(
            f"period must satisfy 2 <= p <= N = {d.N}, got {p}"
        )


def apap_violation(d: DeltaSeq, p: int) -> tuple[int, int] | None:
    """First violated APAP condition as (condition, index), or None.

    Conditions quantify over in-range indices only; an index set that is
    empty for this window makes its condition vacuously true.  Condition 1
    is periodicity, 2 is cancellation at multiples of p, 3 is the
    palindromic block.
    """
    _check_period(d, p)
    lo, hi = -d.N, d.N - 1
    # 1: d(i+p) = d(i) whenever i is not congruent to -1 or 0 mod p
    for i in range(lo, hi - p + 1):
        if i % p in (0, p - 1):
            continue
        if d.entry(i + p) != d.entry(i):
            return (1, i)
    # 2: d(j-1) + d(j) = 0 at every multiple j of p with both indices in range
    first = -((-lo - 1) // p) * p  # smallest multiple of p with j-1 >= lo
    for j in range(first, hi + 1, p):
        if j - 1 < lo:
            continue
        if not (d.entry(j - 1) + d.entry(j)).is_zero():
            return (2, j)
    # 3: d(p-1-i) = d(i) for i = 1..p-2
    for i in range(1, p - 1):
        if d.entry(p - 1 - i) != d.entry(i):
            return (3, i)
    return None


def is_apap(d: DeltaSeq, p: int) -> bool:
    """True iff all three APAP conditions hold at period p over the range."""
    return apap_violation(d, p) is None


@dataclass(frozen=True)
class ApapStructure:
    """Materialized APAP data: period, palindromic block, block sum, and the
    cancellation pair at each in-range multiple of the period."""

    p: int
    block: tuple[SymMat, ...]  # entries at indices 1..p-2; empty for p = 2
    block_sum: SymMat
    cancellation_pairs: tuple[tuple[int, SymMat, SymMat], ...]  # (j, d(j-1), d(j))

    def pair_at(self, j: int) -> tuple[SymMat, SymMat] | None:
        for jj, left, right in self.cancellation_pairs:
            if jj == j:
                return left, right
        return None


def structure_of(d: DeltaSeq, p: int) -> ApapStructure:
    """Extract the APAP structure at period p; the sequence must pass is_apap."""
    violation = apap_violation(d, p)
    if violation is not None:
        cond, idx = violation
        raise PreconditionError(
            f"sequence is not APAP with period {p}: condition {cond} fails at "
            f"index {idx}"
        )
    block = tuple(d.entry(i) for i in range(1, p - 1))
    total = SymMat.zero(d.n)
    for b in block:
        total = total + b
    lo, hi = -d.N, d.N - 1
    first = -((-lo - 1) // p) * p
    pairs = tuple(
        (j, d.entry(j - 1), d.entry(j))
        for j in range(first, hi + 1, p)
        if j - 1 >= lo
    )
    return ApapStructure(p=p, block=block, block_sum=total, cancellation_pairs=pairs)


def block_sum(s: ApapStructure) -> SymMat:
    """Sum of the palindromic block entries (zero for an empty block)."""
    return s.block_sum


def consecutive_sum_check(d: DeltaSeq, p: int, k: int) -> bool:
    """Every in-range sum of k*p consecutive entries whose first index is not
    a multiple of p must equal k times the block sum."""
    if k < 0:
        raise PreconditionError("k must be non-negative")
    violation = apap_violation(d, p)
    if violation is not None:
        cond, idx = violation
        raise PreconditionError(
            f"consecutive_sum_check requires an APAP sequence: condition "
            f"{cond} fails at index {idx} for period {p}"
        )
    if k == 0:
        return True  # empty sums are zero, and so is 0 * block sum
    target = structure_of(d, p).block_sum.scale(k)
    lo, hi = -d.N, d.N - 1
    span = k * p
    for start in range(lo, hi - span + 2):
        if start % p == 0:
            continue
        acc = SymMat.zero(d.n)
        for i in range(start, start + span):
            acc = acc + d.entry(i)
        if acc != target:
            return False
    return True


def residue_1_to_q(a: int, q: int) -> int:
    """The unique representative of a mod q inside {1, ..., q}."""
    if q < 1:
        raise PreconditionError("modulus must be positive")
    return (a - 1) % q + 1


def _check_pq(p: int, q: int) -> None:
    if not 2 <= q < p:
        raise PreconditionError(f"need 2 <= q < p, got q = {q}, p = {p}")


def equiv_related(x: int, y: int, p: int, q: int) -> bool:
    """Closed form of the generated equivalence: with g = gcd(p, q), x and y
    are related iff x = y mod g or x + y = -1 mod g."""
    _check_pq(p, q)
    g = math.gcd(p, q)
    return (x - y) % g == 0 or (x + y + 1) % g == 0


class EquivClosure:
    """Union-find closure of the three generating relations on [-L, L].

    Generators: x ~ x + q;  x ~ q-1-x for x in [0, q-1];  x ~ p-1-x for x in
    [0, p-1].  Chains may wander outside a small interval, so answers are
    trusted only on the central third of [-L, L].
    """

    def __init__(self, p: int, q: int, L: int):
        _check_pq(p, q)
        if L < 3 * math.lcm(p, q):
            raise PreconditionError(
                f"interval radius {L} too small: need at least 3*lcm(p, q) = "
                f"{3 * math.lcm(p, q)}"
            )
        self.p = p
        self.q = q
        self.L = L
        self.trusted = L // 3
        size = 2 * L + 1
        self._parent = list(range(size))
        for x in range(-L, L - q + 1):
            self._union(x, x + q)
        for x in range(0, q):
            self._union(x, q - 1 - x)
        for x in range(0, p):
            self._union(x, p - 1 - x)

    def _find(self, i: int) -> int:
        parent = self._parent
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:  # path compression
            parent[i], i = root, parent[i]
        return root

    def _union(self, x: int, y: int) -> None:
        ri, rj = self._find(x + self.L), self._find(y + self.L)
        if ri != rj:
            self._parent[rj] = ri

    def related(self, x: int, y: int) -> bool:
        if abs(x) > self.trusted or abs(y) > self.trusted:
            raise PreconditionError(
                f"closure on [-{self.L}, {self.L}] is only trusted for "
                f"|x| <= {self.trusted}"
            )
        return self._find(x + self.L) == self._find(y + self.L)

    def classes(self) -> list[list[int]]:
        """Equivalence classes restricted to the trusted central third."""
        groups: dict[int, list[int]] = {}
        for x in range(-self.trusted, self.trusted + 1):
            groups.setdefault(self._find(x + self.L), []).append(x)
        return sorted(groups.values(), key=lambda cls: cls[0])


def equiv_closure_oracle(x: int, y: int, p: int, q: int, L: int) -> bool:
    """Membership in the brute-force closure; see EquivClosure for reuse."""
    return EquivClosure(p, q, L).related(x, y)


@dataclass(frozen=True)
class GcdReduction:
    """Outcome of reducing two periodic structures on one sequence.

    For g = gcd(p, q) > 1 the sequence is APAP with period g and ``structure``
    holds the reduced data.  For g = 1 every entry equals the common value up
    to a sign and ``constant`` holds that value.
    """

    g: int
    structure: ApapStructure | None
    constant: SymMat | None


def gcd_reduce(d: DeltaSeq, p: int, q: int) -> GcdReduction:
    """Reduce an APAP structure of period p against partial q-periodicity.

    Hypotheses checked before anything else: the sequence is APAP with
    period p; entries 1..p-q-2 repeat with step q (condition 1); entries
    1..q-2 are palindromic around q-1 (condition 2); entries q-1 and q
    cancel (condition 3).  A failed hypothesis raises HypothesisError naming
    the condition and index.

    With g = gcd(p, q) > 1 the result certifies that the sequence is APAP
    with period g and that the entries at indices congruent to 0 or -1 mod g
    inside [1, q] are zero.  With g = 1 it certifies that every entry in the
    range equals the common value up to a sign.
    """
    _check_pq(p, q)
    violation = apap_violation(d, p)
    if violation is not None:
        cond, idx = violation
        raise PreconditionError(
            f"gcd_reduce requires an APAP sequence: condition {cond} fails at "
            f"index {idx} for period {p}"
        )
    for i in range(1, p - q - 1):
        if d.entry(i) != d.entry(i + q):
            raise HypothesisError(
                1, i, f"q-periodicity fails: entry({i}) != entry({i + q})"
            )
    for i in range(1, q - 1):
        if d.entry(i) != d.entry(q - 1 - i):
            raise HypothesisError(
                2, i, f"q-palindromicity fails: entry({i}) != entry({q - 1 - i})"
            )
    if not (d.entry(q - 1) + d.entry(q)).is_zero():
        raise HypothesisError(
            3, q - 1, f"q-cancellation fails: entry({q - 1}) + entry({q}) != 0"
        )

    g = math.gcd(p, q)
    if g > 1:
        inner = apap_violation(d, g)
        if inner is not None:
            cond, idx = inner
            raise CertificationError(
                f"reduction to period {g} failed: APAP condition {cond} "
                f"violated at index {idx}"
            )
        for i in range(1, q + 1):
            if i % g in (0, g - 1) and not d.entry(i).is_zero():
                raise CertificationError(
                    f"reduction to period {g} failed: entry({i}) should be "
                    f"zero but is not"
                )
        return GcdReduction(g=g, structure=structure_of(d, g), constant=None)

    common = SymMat.zero(d.n)
    for i in d.indices():
        if not d.entry(i).is_zero():
            common = d.entry(i)
            break
    neg = -common
    for i in d.indices():
        e = d.entry(i)
        if e != common and e != neg:
            raise CertificationError(
                f"constant-up-to-sign certification failed at index {i}"
            )
    return GcdReduction(g=1, structure=None, constant=common)


def minimal_apap_period(d: DeltaSeq, p0: int) -> int:
    """Smallest divisor p >= 2 of p0 at which the sequence is APAP."""
    violation = apap_violation(d, p0)
    if violation is not None:
        cond, idx = violation
        raise PreconditionError(
            f"minimal_apap_period requires an APAP sequence at p0 = {p0}: "
            f"condition {cond} fails at index {idx}"
        )
    for p in divisors(p0):
        if p >= 2 and is_apap(d, p):
            return p
    return p0  # unreachable: p0 itself passed above
