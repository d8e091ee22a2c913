"""Deterministic generators for windows and delta sequences, plus the
rank-bound fuzzing harness.

Families:

* ``hom``: exact homomorphisms x -> x*A0 (defect zero).
* ``line_perturbed``: x -> x*A0 + eps(x) * v v^T for an arbitrary integer
  function eps; the defect is a multiple of v v^T, so the bound one holds by
  construction.
* ``periodic_apap``: propose a fully periodic delta sequence (palindromic
  block plus cycling cancellation pairs), reconstruct the window, then keep
  it only if the direct defect scan accepts it.  Rejections are returned as
  data with the witness pair.
* ``apap_candidate``: window-wide APAP delta sequences engineered so the
  third independent line first appears at index m = k*p - 1; used to
  exercise the structured detection path with verification bypassed.

Every generator is a pure function of its GenSpec, so any fuzz finding can
be replayed from the serialized spec.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import FormatError, InconclusiveWindowError, PreconditionError
from .exact_linalg import SymMat, Subspace
from .quasihom import (
    DefectReport,
    DeltaSeq,
    QuasiHomWindow,
    reconstruct,
    verify_direct,
)
from .apap import residue_1_to_q
from .approximator import KIND_STRUCTURED, approximate

__all__ = [
    "GenSpec",
    "PeriodicProposal",
    "FuzzReport",
    "gen_rank1_sym",
    "random_symmetric",
    "gen_homomorphism",
    "gen_line_perturbed",
    "periodic_delta",
    "gen_periodic_apap",
    "structured_candidate",
    "gen_apap_candidate",
    "fuzz_theorem",
    "replay",
    "FAMILIES",
    "VERIFIED_FAMILIES",
]

FAMILIES = ("hom", "line_perturbed", "periodic_apap", "apap_candidate")
VERIFIED_FAMILIES = ("hom", "line_perturbed", "periodic_apap")

_COEFFS = (
    Fraction(1),
    Fraction(-1),
    Fraction(2),
    Fraction(-2),
    Fraction(3),
    Fraction(1, 2),
    Fraction(-1, 2),
    Fraction(3, 2),
)


def _rng(*parts: object) -> random.Random:
    return random.Random(":".join(str(p) for p in parts))


@dataclass(frozen=True)
class GenSpec:
    """Deterministic recipe for one generated input."""

    family: str
    n: int
    N: int
    seed: int
    period: int | None = None  # periodic_apap / apap_candidate
    k: int | None = None  # apap_candidate: third line lands at m = k*p - 1
    pattern: str | None = None  # line_perturbed: random | constant | linear
    cycle_len: int | None = None  # periodic_apap: cancellation values cycled

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise PreconditionError(f"unknown family {self.family!r}")
        if self.n < 1 or self.N < 1:
            raise PreconditionError("n and N must be positive")

    def to_payload(self) -> dict:
        payload: dict = {
            "family": self.family,
            "n": self.n,
            "N": self.N,
            "seed": self.seed,
        }
        for key in ("period", "k", "pattern", "cycle_len"):
            value = getattr(self, key)
            if value is not None:
                payload[key] = value
        return payload

    @classmethod
    def from_payload(cls, obj: object) -> "GenSpec":
        if not isinstance(obj, dict):
            raise FormatError("generator spec must be a JSON object")
        allowed = {"family", "n", "N", "seed", "period", "k", "pattern", "cycle_len"}
        unknown = set(obj) - allowed
        if unknown:
            raise FormatError(f"generator spec has unknown keys: {sorted(unknown)}")
        missing = {"family", "n", "N", "seed"} - set(obj)
        if missing:
            raise FormatError(f"generator spec missing keys: {sorted(missing)}")
        try:
            return cls(**obj)
        except (TypeError, PreconditionError) as exc:
            raise FormatError(f"bad generator spec: {exc}") from exc


# -- basic samplers ------------------------------------------------------------


def gen_rank1_sym(n: int, seed: object) -> SymMat:
    """c * v v^T with a nonzero integer vector v and a nonzero small rational
    c: rank exactly one, deterministic in the seed."""
    if n < 1:
        raise PreconditionError("dimension must be positive")
    rng = _rng("rank1", n, seed)
    while True:
        v = [rng.randint(-3, 3) for _ in range(n)]
        if any(v):
            break
    return SymMat.outer(v, rng.choice(_COEFFS))


def random_symmetric(n: int, seed: object, bound: int = 4) -> SymMat:
    """Random symmetric matrix with small integer and half-integer entries."""
    rng = _rng("sym", n, seed)
    count = n * (n + 1) // 2
    upper = tuple(
        Fraction(rng.randint(-bound, bound), rng.choice((1, 1, 1, 2)))
        for _ in range(count)
    )
    return SymMat(n, upper)


def _independent_lines(n: int, count: int, rng: random.Random) -> list[list[int]]:
    """Nonzero integer vectors spanning a ``count``-dimensional space."""
    if count > n:
        raise PreconditionError(f"cannot fit {count} independent lines in Q^{n}")
    while True:
        vecs = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(count)]
        if Subspace.from_vectors(n, vecs).dim == count:
            return vecs


# -- window families -----------------------------------------------------------


def gen_homomorphism(spec: GenSpec) -> QuasiHomWindow:
    """f(x) = x * A0 for a sampled symmetric A0; the defect is exactly zero."""
    base = random_symmetric(spec.n, ("hom", spec.seed))
    return QuasiHomWindow.from_function(
        spec.n, spec.N, lambda x: base.scale(x)
    )


def gen_line_perturbed(spec: GenSpec) -> QuasiHomWindow:
    """f(x) = x * A0 + eps(x) * v v^T; passes the defect bound one by
    construction, which is asserted at generation time."""
    rng = _rng("line", spec.seed, spec.n, spec.N)
    base = random_symmetric(spec.n, ("line-base", spec.seed))
    line = gen_rank1_sym(spec.n, ("line-dir", spec.seed))
    pattern = spec.pattern or rng.choice(("random", "random", "constant", "linear"))
    if pattern == "constant":
        const = rng.randint(-3, 3)
        eps = {x: const for x in range(-spec.N, spec.N + 1)}
    elif pattern == "linear":
        slope = rng.randint(-3, 3)
        eps = {x: slope * x for x in range(-spec.N, spec.N + 1)}
    elif pattern == "random":
        eps = {x: rng.randint(-3, 3) for x in range(-spec.N, spec.N + 1)}
    else:
        raise PreconditionError(f"unknown perturbation pattern {pattern!r}")
    window = QuasiHomWindow.from_function(
        spec.n, spec.N, lambda x: base.scale(x) + line.scale(eps[x])
    )
    report = verify_direct(window, 1)
    assert report.satisfied, "line-perturbed window must verify by construction"
    return window


# -- periodic proposals ----------------------------------------------------------


def periodic_delta(
    n: int,
    radius: int,
    p: int,
    block: list[SymMat],
    pair_cycle: list[SymMat],
) -> DeltaSeq:
    """Fully periodic delta sequence: ``block`` fills positions 1..p-2 of
    each period and the cancellation value at the t-th multiple of p cycles
    through ``pair_cycle`` (entry tp-1 gets the value, entry tp its negative).
    The block list must already be palindromic.
    """
    if p < 2 or p > radius:
        raise PreconditionError(f"period must satisfy 2 <= p <= N = {radius}")
    if len(block) != p - 2:
        raise PreconditionError(f"block must have p - 2 = {p - 2} entries")
    if not pair_cycle:
        raise PreconditionError("need at least one cancellation value")
    for idx in range(p - 2):
        if block[idx] != block[p - 3 - idx]:
            raise PreconditionError("block list must be palindromic")

    def gamma(t: int) -> SymMat:
        return pair_cycle[(t - 1) % len(pair_cycle)]

    def entry(i: int) -> SymMat:
        r = i % p
        if 1 <= r <= p - 2:
            return block[r - 1]
        if r == p - 1:
            return gamma((i + 1) // p)
        return -gamma(i // p)

    return DeltaSeq.from_function(n, radius, entry)


@dataclass(frozen=True)
class PeriodicProposal:
    """A proposed periodic window: either accepted (window set) or rejected
    with the defect report that disqualified it."""

    spec: GenSpec
    seq: DeltaSeq
    window: QuasiHomWindow | None
    rejection: DefectReport | None

    @property
    def accepted(self) -> bool:
        return self.window is not None


def gen_periodic_apap(spec: GenSpec) -> PeriodicProposal:
    """Propose a periodic delta shape, reconstruct, and verify at bound one.

    Many parameter choices fail verification; the rejection is returned as
    data together with its witness, never raised.
    """
    rng = _rng("papap", spec.seed, spec.n, spec.N)
    p = spec.period or rng.randint(2, max(2, min(8, spec.N)))
    if not 2 <= p <= spec.N:
        raise PreconditionError(f"period {p} does not fit window radius {spec.N}")
    cycle_len = spec.cycle_len or rng.choice((1, 1, 1, 2))
    simple = rng.random() < 0.7
    if simple:
        # one line for the block, one for every cancellation value
        u = gen_rank1_sym(spec.n, ("papap-u", spec.seed))
        v = gen_rank1_sym(spec.n, ("papap-v", spec.seed))
        half = [u.scale(rng.choice((1, 1, 2))) for _ in range((p - 2 + 1) // 2)]
        pair_cycle = [v.scale(rng.choice((1, -1, 2))) for _ in range(cycle_len)]
    else:
        half = [
            gen_rank1_sym(spec.n, ("papap-b", spec.seed, idx))
            for idx in range((p - 2 + 1) // 2)
        ]
        pair_cycle = [
            gen_rank1_sym(spec.n, ("papap-c", spec.seed, idx))
            for idx in range(cycle_len)
        ]
    block = half + list(reversed(half[: (p - 2) // 2]))
    seq = periodic_delta(spec.n, spec.N, p, block, pair_cycle)
    window = reconstruct(seq)
    report = verify_direct(window, 1)
    if report.satisfied:
        return PeriodicProposal(spec=spec, seq=seq, window=window, rejection=None)
    return PeriodicProposal(spec=spec, seq=seq, window=None, rejection=report)


# -- planted structured candidates ------------------------------------------------


def structured_candidate(spec: GenSpec) -> tuple[DeltaSeq, int, int]:
    """Window-wide APAP sequence whose third independent line first appears
    at index m = k*p - 1, so the period divides m + 1.

    Returns (sequence, p, m).  The sequence is APAP with period p over the
    whole range, satisfies the reflection identities around m, and its line
    span reaches dimension three exactly at m.  These are synthetic: they
    exercise detection, not the defect bound, so callers bypass verification.
    """
    rng = _rng("cand", spec.seed, spec.n, spec.N)
    p = spec.period or rng.choice((2, 3, 3, 4, 5))
    k = spec.k or (5 if p == 2 else rng.randint(3, 4))
    if p == 2 and k < 5:
        raise PreconditionError("period 2 needs k >= 5 to fit two lines before m")
    if p >= 3 and k < 3:
        raise PreconditionError("need k >= 3 so a second line appears before m")
    m = k * p - 1
    if spec.N < m + 2:
        raise PreconditionError(
            f"radius {spec.N} too small for planted m = {m}; need N >= {m + 2}"
        )
    if p >= 3:
        u, v, w = (SymMat.outer(vec) for vec in _independent_lines(spec.n, 3, rng))
        # palindromic block on one line, positive coefficients so no pair of
        # adjacent entries can cancel at a smaller candidate period
        half = [rng.randint(1, 3) for _ in range((p - 2 + 1) // 2)]
        coeffs = half + list(reversed(half[: (p - 2) // 2]))
        block = [u.scale(c) for c in coeffs]
        # antisymmetric cancellation values on the second line:
        # base[k - s] = -base[s], with a forced zero middle for even k
        base: dict[int, SymMat] = {}
        for s in range(1, k // 2 + 1):
            if 2 * s == k:
                base[s] = SymMat.zero(spec.n)
            else:
                c = rng.choice((1, 2))
                base[s] = v.scale(c)
                base[k - s] = v.scale(-c)
        w_val = w.scale(rng.choice((1, 2)))
    else:
        # no block at period 2: both early lines live in the base values
        line1, line2, w_line = (
            SymMat.outer(vec) for vec in _independent_lines(spec.n, 3, rng)
        )
        block = []
        base = {}
        for s in range(1, k // 2 + 1):
            if 2 * s == k:
                base[s] = SymMat.zero(spec.n)
            else:
                src = line1 if s % 2 == 1 else line2
                c = rng.choice((1, 2))
                base[s] = src.scale(c)
                base[k - s] = src.scale(-c)
        w_val = w_line.scale(rng.choice((1, 2)))

    def nu(s: int) -> SymMat:
        r = residue_1_to_q(s, k)
        return base[r] if r <= k - 1 else w_val

    def gamma(t: int) -> SymMat:
        if t == 0:
            return SymMat.zero(spec.n)
        return nu(t) if t > 0 else -nu(-t)

    def entry(i: int) -> SymMat:
        r = i % p
        if 1 <= r <= p - 2:
            return block[r - 1]
        if r == p - 1:
            return gamma((i + 1) // p)
        return -gamma(i // p)

    return DeltaSeq.from_function(spec.n, spec.N, entry), p, m


def gen_apap_candidate(spec: GenSpec) -> DeltaSeq:
    seq, _, _ = structured_candidate(spec)
    return seq


# -- inputs for the gcd reduction ---------------------------------------------


def gcd_reduction_input(
    n: int, radius: int, g: int, a: int, b: int, seed: object
) -> tuple[DeltaSeq, int, int]:
    """Sequence that is APAP with period p = a*g and satisfies the partial
    q-periodicity hypotheses for q = b*g, with gcd(p, q) = g > 1.

    Shape: a palindromic block on one line at residues 1..g-2 mod g, zeros at
    residues 0 and g-1, except that each multiple of p carries a free
    cancellation pair.  Returns (sequence, p, q).
    """
    if g < 2 or b < 1 or a <= b:
        raise PreconditionError("need g >= 2 and a > b >= 1")
    import math as _math

    if _math.gcd(a, b) != 1:
        raise PreconditionError("a and b must be coprime so gcd(p, q) = g")
    p, q = a * g, b * g
    if radius < p:
        raise PreconditionError(f"radius {radius} too small for period {p}")
    rng = _rng("gcdin", seed, n, radius, g, a, b)
    u_vec, v_vec = _independent_lines(n, 2, rng)
    u = SymMat.outer(u_vec)
    half = [rng.randint(1, 3) for _ in range((g - 2 + 1) // 2)]
    coeffs = half + list(reversed(half[: (g - 2) // 2]))
    block = [u.scale(c) for c in coeffs]
    pair_values: dict[int, SymMat] = {}

    def gamma(t: int) -> SymMat:
        if t not in pair_values:
            local = _rng("gcdin-pair", seed, t)
            pair_values[t] = SymMat.outer(v_vec, local.choice((1, -1, 2)))
        return pair_values[t]

    def entry(i: int) -> SymMat:
        r = i % g
        if 1 <= r <= g - 2:
            return block[r - 1]
        if (i + 1) % p == 0:
            return gamma((i + 1) // p)
        if i % p == 0:
            return -gamma(i // p)
        return SymMat.zero(n)

    return DeltaSeq.from_function(n, radius, entry), p, q


def gcd_coprime_input(
    n: int, radius: int, p: int, seed: object, q: int | None = None
) -> tuple[DeltaSeq, int, int]:
    """Sequence that is APAP with period p and satisfies the q-hypotheses for
    a q coprime to p, so every entry equals a common value up to a sign.

    Supported shapes: q = p - 1 (constant block, first pair flipped) and, for
    odd p, q = p - 2 (alternating block).  Returns (sequence, p, q).
    """
    if q is None:
        q = p - 1
    if not 2 <= q < p:
        raise PreconditionError("need 2 <= q < p")
    if q not in (p - 1, p - 2) or (q == p - 2 and p % 2 == 0):
        raise PreconditionError(
            "supported coprime shapes: q = p-1, or q = p-2 with odd p"
        )
    if radius < p:
        raise PreconditionError(f"radius {radius} too small for period {p}")
    rng = _rng("gcd1", seed, n, radius, p, q)
    common = gen_rank1_sym(n, ("gcd1-line", seed))
    if q == p - 1:
        block_signs = [1] * (p - 2)
    else:
        block_signs = [1 if i % 2 == 1 else -1 for i in range(1, p - 1)]
    pair_signs: dict[int, int] = {}

    def ensure_sign(t: int) -> int:
        if t not in pair_signs:
            if t == 1 and q == p - 1:
                pair_signs[t] = -1  # forced by the q-cancellation hypothesis
            else:
                pair_signs[t] = _rng("gcd1-sign", seed, t).choice((1, -1))
        return pair_signs[t]

    def entry(i: int) -> SymMat:
        r = i % p
        if 1 <= r <= p - 2:
            return common.scale(block_signs[r - 1])
        if r == p - 1:
            return common.scale(ensure_sign((i + 1) // p))
        return common.scale(-ensure_sign(i // p))

    seq = DeltaSeq.from_function(n, radius, entry)
    return seq, p, q


# -- fuzzing ---------------------------------------------------------------------


@dataclass(frozen=True)
class FuzzReport:
    """Aggregated result of a fuzz run; ``violations`` is expected empty."""

    trials: int
    accepted: int
    rejected: int
    violations: tuple[dict, ...]
    structured_count: int
    inconclusive_count: int
    master_seed: int

    def to_payload(self) -> dict:
        return {
            "trials": self.trials,
            "accepted": self.accepted,
            "rejected": self.rejected,
            "violations": list(self.violations),
            "structured_count": self.structured_count,
            "inconclusive_count": self.inconclusive_count,
            "master_seed": self.master_seed,
        }


def _fuzz_spec(master_seed: int, index: int, n_range, N_range) -> GenSpec:
    rng = _rng("fuzz", master_seed, index)
    family = rng.choice(VERIFIED_FAMILIES)
    return GenSpec(
        family=family,
        n=rng.randint(*n_range),
        N=rng.randint(*N_range),
        seed=master_seed * 1_000_003 + index,
    )


def _run_trial(spec: GenSpec) -> dict:
    """One fuzz trial; returns a small result record."""
    if spec.family == "periodic_apap":
        proposal = gen_periodic_apap(spec)
        if not proposal.accepted:
            return {"status": "rejected"}
        window = proposal.window
    elif spec.family == "hom":
        window = gen_homomorphism(spec)
    elif spec.family == "line_perturbed":
        window = gen_line_perturbed(spec)
    else:
        raise PreconditionError(f"family {spec.family!r} is not fuzzable")
    try:
        cert = approximate(window)
    except InconclusiveWindowError as exc:
        return {"status": "inconclusive", "required_N": exc.required_n}
    record = {
        "status": "ok",
        "max_rank": cert.max_rank,
        "structured": cert.finding is not None
        and cert.finding.kind == KIND_STRUCTURED,
    }
    if cert.max_rank > 2:
        record["status"] = "violation"
    return record


def fuzz_theorem(
    trials: int,
    n_range: tuple[int, int] = (1, 5),
    N_range: tuple[int, int] = (5, 25),
    master_seed: int = 0,
    threads: int = 1,
) -> FuzzReport:
    """Run verify -> approximate -> certify over sampled specs and record any
    input whose certificate exceeds rank two (none are expected)."""
    if trials < 0:
        raise PreconditionError("trial count must be non-negative")
    specs = [_fuzz_spec(master_seed, i, n_range, N_range) for i in range(trials)]
    if threads > 1 and trials > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_run_trial, specs))
    else:
        records = [_run_trial(spec) for spec in specs]

    accepted = rejected = structured = inconclusive = 0
    violations: list[dict] = []
    for spec, record in zip(specs, records):
        status = record["status"]
        if status == "rejected":
            rejected += 1
            continue
        if status == "inconclusive":
            inconclusive += 1
            continue
        accepted += 1
        if record.get("structured"):
            structured += 1
        if status == "violation":
            violations.append(
                {"spec": spec.to_payload(), "max_rank": record["max_rank"]}
            )
    return FuzzReport(
        trials=trials,
        accepted=accepted,
        rejected=rejected,
        violations=tuple(violations),
        structured_count=structured,
        inconclusive_count=inconclusive,
        master_seed=master_seed,
    )


def replay(spec: GenSpec) -> dict:
    """Regenerate the input for a serialized spec and re-run the pipeline."""
    if spec.family == "apap_candidate":
        seq, p, m = structured_candidate(spec)
        from .approximator import detect_structure

        finding = detect_structure(seq, skip_verify=True)
        return {
            "spec": spec.to_payload(),
            "planted": {"p": p, "m": m},
            "finding": finding.to_payload(),
        }
    record = _run_trial(spec)
    return {"spec": spec.to_payload(), "result": record}
