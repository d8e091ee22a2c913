"""Finite windows of maps Z -> Sym(n x n, Q) and their difference sequences.

A window holds f(x) for every integer x in [-N, N].  The delta sequence
holds the consecutive differences d(i) = f(i+1) - f(i) for i in [-N, N-1].
Verification of the defect bound comes in two equivalent forms: a direct
scan over all pairs (x, y), and a scan over windowed sums of the delta
sequence.  All verdicts are window-scoped and every report carries N.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import FormatError, PreconditionError
from .exact_linalg import (
    SymMat,
    matrix_from_literal,
    matrix_to_literal,
    rank,
)

__all__ = [
    "QuasiHomWindow",
    "DeltaSeq",
    "DefectReport",
    "normalize",
    "delta",
    "reconstruct",
    "verify_direct",
    "verify_delta_form",
    "window_from_payload",
    "window_to_payload",
]


@dataclass(frozen=True)
class QuasiHomWindow:
    """Total map x -> f(x) on the integer interval [-N, N]."""

    n: int
    N: int
    values: tuple[SymMat, ...]  # index x + N

    def __post_init__(self) -> None:
        if self.N < 1:
            raise ValueError("window radius must be positive")
        if len(self.values) != 2 * self.N + 1:
            raise ValueError(
                f"window of radius {self.N} needs {2 * self.N + 1} values, "
                f"got {len(self.values)}"
            )
        if any(v.n != self.n for v in self.values):
            raise ValueError("all window matrices must share the same dimension")

    @classmethod
    def from_function(cls, n: int, radius: int, func) -> "QuasiHomWindow":
        return cls(n, radius, tuple(func(x) for x in range(-radius, radius + 1)))

    def value(self, x: int) -> SymMat:
        if not -self.N <= x <= self.N:
            raise PreconditionError(f"x = {x} outside window [-{self.N}, {self.N}]")
        return self.values[x + self.N]

    def xs(self) -> range:
        return range(-self.N, self.N + 1)

    def restrict(self, radius: int) -> "QuasiHomWindow":
        if not 1 <= radius <= self.N:
            raise PreconditionError(f"cannot restrict radius {self.N} to {radius}")
        lo = self.N - radius
        return QuasiHomWindow(self.n, radius, self.values[lo : lo + 2 * radius + 1])


@dataclass(frozen=True)
class DeltaSeq:
    """Total map i -> d(i) on [-N, N-1]: consecutive differences of a window."""

    n: int
    N: int
    entries: tuple[SymMat, ...]  # index i + N

    def __post_init__(self) -> None:
        if self.N < 1:
            raise ValueError("delta range radius must be positive")
        if len(self.entries) != 2 * self.N:
            raise ValueError(
                f"delta sequence of radius {self.N} needs {2 * self.N} entries, "
                f"got {len(self.entries)}"
            )
        if any(e.n != self.n for e in self.entries):
            raise ValueError("all delta matrices must share the same dimension")

    @classmethod
    def from_function(cls, n: int, radius: int, func) -> "DeltaSeq":
        return cls(n, radius, tuple(func(i) for i in range(-radius, radius)))

    def entry(self, i: int) -> SymMat:
        if not -self.N <= i <= self.N - 1:
            raise PreconditionError(
                f"i = {i} outside delta range [-{self.N}, {self.N - 1}]"
            )
        return self.entries[i + self.N]

    def indices(self) -> range:
        return range(-self.N, self.N)

    def restrict(self, radius: int) -> "DeltaSeq":
        if not 1 <= radius <= self.N:
            raise PreconditionError(f"cannot restrict radius {self.N} to {radius}")
        lo = self.N - radius
        return DeltaSeq(self.n, radius, self.entries[lo : lo + 2 * radius])

    def mirror(self) -> "DeltaSeq":
        """The reflected sequence i -> d(-1-i); the range maps onto itself."""
        return DeltaSeq(
            self.n, self.N, tuple(self.entry(-1 - i) for i in self.indices())
        )


@dataclass(frozen=True)
class DefectReport:
    """Result of the direct defect scan over a window.

    ``c_measured`` is the maximum defect rank over all checked pairs;
    ``witness`` is the lexicographically smallest pair attaining it.
    """

    c_measured: int
    witness: tuple[int, int] | None
    pair_count: int
    window_N: int
    bound: int

    @property
    def satisfied(self) -> bool:
        return self.c_measured <= self.bound

    def to_payload(self) -> dict:
        return {
            "c_measured": self.c_measured,
            "witness": list(self.witness) if self.witness is not None else None,
            "pair_count": self.pair_count,
            "window_N": self.window_N,
            "bound": self.bound,
            "satisfied": self.satisfied,
        }


# -- operations --------------------------------------------------------------


def normalize(f: QuasiHomWindow) -> tuple[QuasiHomWindow, SymMat]:
    """Shift f by a multiple of x so the result vanishes at 1.

    Returns (g, C) with C = -f(1) and g(x) = f(x) + x*C.  The defect
    rank of every pair is unchanged, since the correction is additive in x.
    """
    c = -f.value(1)
    g = QuasiHomWindow(
        f.n, f.N, tuple(f.value(x) + c.scale(x) for x in f.xs())
    )
    return g, c


def delta(g: QuasiHomWindow) -> DeltaSeq:
    """Consecutive differences d(i) = g(i+1) - g(i) on [-N, N-1]."""
    return DeltaSeq(
        g.n,
        g.N,
        tuple(g.value(i + 1) - g.value(i) for i in range(-g.N, g.N)),
    )


def reconstruct(d: DeltaSeq) -> QuasiHomWindow:
    """The unique window g with g(1) = 0 whose difference sequence is ``d``.

    g(x) telescopes to the sum of d(1..x-1) for x >= 1 and to minus the sum
    of d(x..0) for x <= 0.
    """
    n, radius = d.n, d.N
    values: dict[int, SymMat] = {1: SymMat.zero(n)}
    acc = SymMat.zero(n)
    for x in range(2, radius + 1):
        acc = acc + d.entry(x - 1)
        values[x] = acc
    acc = SymMat.zero(n)
    for x in range(0, -radius - 1, -1):
        acc = acc - d.entry(x)
        values[x] = acc
    return QuasiHomWindow(
        n, radius, tuple(values[x] for x in range(-radius, radius + 1))
    )


def verify_direct(f: QuasiHomWindow, c: int = 1) -> DefectReport:
    """Scan every pair (x, y) with x, y, x+y all inside the window and report
    the maximum rank of f(x+y) - f(x) - f(y), with a witness pair."""
    if c < 0:
        raise PreconditionError("defect bound must be non-negative")
    radius = f.N
    vals = f.values
    best = 0
    witness: tuple[int, int] | None = None
    pair_count = 0
    for x in range(-radius, radius + 1):
        vx = vals[x + radius]
        lo = max(-radius, -radius - x)
        hi = min(radius, radius - x)
        for y in range(lo, hi + 1):
            pair_count += 1
            defect = vals[x + y + radius] - vx - vals[y + radius]
            if defect.is_zero():
                r = 0
            else:
                r = rank(defect)
            if r > best:
                best = r
                witness = (x, y)
    return DefectReport(
        c_measured=best,
        witness=witness,
        pair_count=pair_count,
        window_N=radius,
        bound=c,
    )


def verify_delta_form(d: DeltaSeq, c: int) -> bool:
    """Check the two windowed-sum inequality families on the delta sequence.

    Family one compares the sum of d(1..k) with the sum of d(z-k..z); family
    two compares the sum of d(-k..0) with the sum of d(z-k+1..z).  A (k, z)
    pair is checked exactly when every touched index lies inside the range;
    nothing is extrapolated.  Returns True iff every checked difference has
    rank at most ``c``.
    """
    if c < 0:
        raise PreconditionError("defect bound must be non-negative")
    n, radius = d.n, d.N
    lo, hi = -radius, radius - 1

    # prefix[t] = sum of entries at indices < lo + t;  sum(a..b) uses two reads
    prefix = [SymMat.zero(n)]
    for e in d.entries:
        prefix.append(prefix[-1] + e)

    def seg(a: int, b: int) -> SymMat:
        # sum of d(a..b); empty when a == b + 1
        return prefix[b - lo + 1] - prefix[a - lo]

    def ok(m: SymMat) -> bool:
        return m.is_zero() or rank(m) <= c

    # family one: indices {1..k} and {z-k..z}
    for k in range(0, hi + 1):
        left = seg(1, k)
        for z in range(lo + k, hi + 1):
            if not ok(left - seg(z - k, z)):
                return False
    # family two: indices {-k..0} and {z-k+1..z}
    if not ok(d.entry(0)):  # the k = 0 case, independent of z
        return False
    for k in range(1, radius + 1):
        left = seg(-k, 0)
        for z in range(lo + k - 1, hi + 1):
            if not ok(left - seg(z - k + 1, z)):
                return False
    return True


# -- window files -------------------------------------------------------------


def window_to_payload(f: QuasiHomWindow) -> dict:
    return {
        "n": f.n,
        "N": f.N,
        "values": {str(x): matrix_to_literal(f.value(x)) for x in f.xs()},
    }


def window_from_payload(obj: object) -> QuasiHomWindow:
    """Parse and validate a window payload; any missing x, extra key, or
    malformed matrix is a hard error."""
    if not isinstance(obj, dict):
        raise FormatError("window payload must be a JSON object")
    missing = {"n", "N", "values"} - set(obj)
    if missing:
        raise FormatError(f"window payload missing keys: {sorted(missing)}")
    n, radius, values = obj["n"], obj["N"], obj["values"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise FormatError(f"field 'n' must be a positive integer, got {n!r}")
    if not isinstance(radius, int) or isinstance(radius, bool) or radius < 1:
        raise FormatError(f"field 'N' must be a positive integer, got {radius!r}")
    if not isinstance(values, dict):
        raise FormatError("field 'values' must be an object keyed by x")
    expected = {str(x) for x in range(-radius, radius + 1)}
    present = set(values)
    if present != expected:
        gaps = sorted(expected - present, key=int)
        extra = sorted(present - expected)
        detail = []
        if gaps:
            detail.append(f"missing x: {gaps}")
        if extra:
            detail.append(f"unexpected keys: {extra}")
        raise FormatError("window values incomplete: " + "; ".join(detail))
    mats = []
    for x in range(-radius, radius + 1):
        try:
            m = matrix_from_literal(values[str(x)])
        except FormatError as exc:
            raise FormatError(f"value at x = {x}: {exc}") from exc
        if m.n != n:
            raise FormatError(
                f"value at x = {x} has dimension {m.n}, expected {n}"
            )
        mats.append(m)
    return QuasiHomWindow(n, radius, tuple(mats))
