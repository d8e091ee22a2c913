"""Structure detection and the rank-2 approximation pipeline."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from qhom import (
    DeltaSeq,
    InconclusiveWindowError,
    NotQuasihomError,
    PreconditionError,
    QuasiHomWindow,
    Subspace,
    SymMat,
    approximate,
    certify,
    delta,
    detect_structure,
    find_minimal_m,
    image,
    line_of,
    normalize,
    rank,
    reconstruct,
    subspace_sum,
    verify_direct,
    vm_dim,
)
from qhom.approximator import (
    KIND_DEGENERATE,
    KIND_INCONCLUSIVE,
    KIND_NOT_QUASIHOM,
    KIND_STRUCTURED,
    palindromic_equalities,
)
from qhom.generators import (
    GenSpec,
    gen_homomorphism,
    gen_line_perturbed,
    gen_rank1_sym,
    periodic_delta,
    random_symmetric,
    structured_candidate,
)


def _zero_seq(n=3, radius=6):
    return DeltaSeq.from_function(n, radius, lambda i: SymMat.zero(n))


def _seq_with(n, radius, values: dict[int, SymMat]):
    return DeltaSeq.from_function(
        n, radius, lambda i: values.get(i, SymMat.zero(n))
    )


# -- lines -----------------------------------------------------------------------


def test_line_of_zero_entry():
    assert line_of(_zero_seq(), 0).is_zero()


def test_line_of_rank_one_entry_and_scaling_invariance():
    v = [1, 2, 0]
    d1 = _seq_with(3, 4, {1: SymMat.outer(v)})
    d3 = _seq_with(3, 4, {1: SymMat.outer(v, 3)})
    line = Subspace.from_vectors(3, [v])
    assert line_of(d1, 1) == line
    assert line_of(d3, 1) == line


def test_line_of_rejects_rank_two_entries():
    d = _seq_with(3, 4, {2: SymMat.diag([1, 1, 0])})
    with pytest.raises(PreconditionError, match="rank >= 2"):
        line_of(d, 2)


# -- vm_dim / find_minimal_m --------------------------------------------------------


def test_vm_dim_zero_sequence():
    d = _zero_seq(radius=6)
    for m in range(1, 6):
        assert vm_dim(d, m) == 0


def test_vm_dim_two_coordinate_lines():
    d = _seq_with(3, 5, {1: SymMat.outer([1, 0, 0]), -2: SymMat.outer([0, 1, 0])})
    assert vm_dim(d, 1) == 2


def test_vm_dim_excludes_center_indices():
    # lines at -1 and 0 never count
    d = _seq_with(
        3, 5, {0: SymMat.outer([1, 0, 0]), -1: SymMat.outer([0, 1, 0])}
    )
    for m in range(1, 5):
        assert vm_dim(d, m) == 0


def test_vm_dim_period3_example_caps_at_two():
    d = periodic_delta(3, 9, 3, [SymMat.outer([1, 0, 0])], [SymMat.outer([0, 1, 0])])
    for m in range(2, 9):
        assert vm_dim(d, m) == 2


def test_vm_dim_range_check():
    with pytest.raises(PreconditionError):
        vm_dim(_zero_seq(radius=4), 4)


def test_find_minimal_m_degenerate():
    assert find_minimal_m(_zero_seq()) is None


def test_find_minimal_m_three_staggered_lines():
    d = _seq_with(
        3,
        6,
        {
            1: SymMat.outer([1, 0, 0]),
            2: SymMat.outer([0, 1, 0]),
            3: SymMat.outer([0, 0, 1]),
        },
    )
    assert find_minimal_m(d) == 3


def test_line_perturbed_windows_stay_degenerate():
    for seed in range(6):
        spec = GenSpec(family="line_perturbed", n=4, N=8, seed=seed)
        g, _ = normalize(gen_line_perturbed(spec))
        assert find_minimal_m(delta(g)) is None


# -- detect_structure -----------------------------------------------------------------


def test_detect_zero_is_degenerate():
    finding = detect_structure(_zero_seq(), skip_verify=False)
    assert finding.kind == KIND_DEGENERATE
    assert not finding.unverified


def test_detect_structured_candidate_with_planted_period():
    spec = GenSpec(family="apap_candidate", n=3, N=12, seed=11, period=3, k=3)
    seq, p, m = structured_candidate(spec)
    finding = detect_structure(seq, skip_verify=True)
    assert finding.kind == KIND_STRUCTURED
    assert finding.unverified
    assert (finding.p, finding.m) == (p, m)
    assert (m + 1) % finding.p == 0
    assert dict(finding.line_dims)[m] >= 3


def test_detect_inconclusive_when_window_too_small():
    spec = GenSpec(family="apap_candidate", n=3, N=14, seed=4, period=3, k=4)
    seq, p, m = structured_candidate(spec)  # m = 11, needs N >= 13
    small = seq.restrict(m + 1)
    finding = detect_structure(small, skip_verify=True)
    assert finding.kind == KIND_INCONCLUSIVE
    assert finding.required_N == m + 2


def test_detect_not_quasihom_on_failed_verification():
    # two independent pairs: the delta form fails at bound one
    d = periodic_delta(2, 8, 2, [], [SymMat.outer([1, 0]), SymMat.outer([0, 1])])
    finding = detect_structure(d, skip_verify=False)
    assert finding.kind == KIND_NOT_QUASIHOM
    assert finding.reason is not None


def test_detect_mirror_invariance():
    for seed in (0, 1, 2):
        spec = GenSpec(family="apap_candidate", n=3, N=14, seed=seed, period=3, k=4)
        seq, _, _ = structured_candidate(spec)
        a = detect_structure(seq, skip_verify=True)
        b = detect_structure(seq.mirror(), skip_verify=True)
        assert (a.kind, a.p, a.m) == (b.kind, b.p, b.m)


# -- approximate -----------------------------------------------------------------------


def test_approximate_recovers_exact_homomorphism():
    a0 = SymMat.from_rows([[1, 2, 0], [2, -1, 1], [0, 1, 3]])
    f = QuasiHomWindow.from_function(3, 5, lambda x: a0.scale(x))
    cert = approximate(f)
    assert cert.A == a0
    assert cert.max_rank == 0
    assert cert.p == "degenerate"
    assert cert.bound_satisfied


def test_approximate_parity_perturbation():
    e1 = SymMat.outer([1, 0])
    e2 = SymMat.outer([0, 1])
    f = QuasiHomWindow.from_function(2, 10, lambda x: e1.scale(x) + e2.scale(x % 2))
    cert = approximate(f)
    assert cert.bound_satisfied
    for x, r in cert.per_x_rank:
        assert r == rank(f.value(x) - cert.A.scale(x))
        assert r <= 2


def test_approximate_period3_fixture_shape():
    b = SymMat.outer([1, 0, 0])
    a = SymMat.outer([0, 1, 0])
    f = reconstruct(periodic_delta(3, 10, 3, [b], [a]))
    assert verify_direct(f, 1).satisfied
    cert = approximate(f)
    assert cert.p == "degenerate"  # the two lines span dimension 2 only
    assert cert.A == f.value(1)  # normalization-transported zero
    assert cert.max_rank <= 2
    assert any(r == 2 for _, r in cert.per_x_rank)


def test_approximate_rejects_defective_window():
    d = periodic_delta(2, 8, 2, [], [SymMat.outer([1, 0]), SymMat.outer([0, 1])])
    f = reconstruct(d)
    with pytest.raises(NotQuasihomError) as info:
        approximate(f)
    report = info.value.report
    assert report is not None and report.c_measured == 2
    x, y = report.witness
    assert rank(f.value(x + y) - f.value(x) - f.value(y)) == report.c_measured


def test_approximate_inconclusive_names_required_radius():
    spec = GenSpec(family="apap_candidate", n=3, N=14, seed=4, period=3, k=4)
    seq, _, m = structured_candidate(spec)
    f = reconstruct(seq.restrict(m + 1))
    with pytest.raises(InconclusiveWindowError) as info:
        approximate(f, skip_verify=True)
    assert info.value.required_n == m + 2


def test_approximate_structured_candidate_end_to_end():
    spec = GenSpec(family="apap_candidate", n=3, N=14, seed=9, period=3, k=4)
    seq, p, m = structured_candidate(spec)
    f = reconstruct(seq)
    cert = approximate(f, skip_verify=True)
    assert cert.p == p
    # A = g(p-1)/p on the normalized window (here already normalized)
    assert cert.A == f.value(p - 1).scale(Fraction(1, p))
    assert cert.finding is not None and cert.finding.kind == KIND_STRUCTURED


def test_structured_residuals_have_rank_one_at_period_multiples():
    # at window points divisible by the period the residual collapses to a
    # single difference entry
    for seed in (3, 8):
        spec = GenSpec(family="apap_candidate", n=3, N=14, seed=seed, period=3, k=4)
        seq, p, _ = structured_candidate(spec)
        f = reconstruct(seq)
        cert = approximate(f, skip_verify=True)
        for x, r in cert.per_x_rank:
            if x % p == 0:
                assert r <= 1, (seed, x, r)


# -- certify ---------------------------------------------------------------------------


def test_certify_homomorphism_at_zero_bound():
    a0 = SymMat.diag([1, -1, 2])
    f = QuasiHomWindow.from_function(3, 6, lambda x: a0.scale(x))
    cert = certify(f, a0, 0)
    assert cert.bound_satisfied
    assert all(r == 0 for _, r in cert.per_x_rank)
    assert cert.p is None


def test_certify_wrong_matrix_fails_at_large_x():
    a0 = SymMat.diag([1, 0, 0, 0])
    wrong = a0 + SymMat.diag([0, 1, 1, 1])  # drifts by a rank-3 step each x
    f = QuasiHomWindow.from_function(4, 6, lambda x: a0.scale(x))
    cert = certify(f, wrong, 2)
    assert not cert.bound_satisfied
    ranks = dict(cert.per_x_rank)
    assert ranks[6] == 3 and ranks[-6] == 3
    assert ranks[0] == 0


def test_certify_dimension_mismatch():
    f = QuasiHomWindow.from_function(2, 3, lambda x: SymMat.zero(2))
    with pytest.raises(PreconditionError):
        certify(f, SymMat.zero(3), 2)


def test_certify_agrees_with_approximate():
    for seed in range(4):
        spec = GenSpec(family="line_perturbed", n=3, N=9, seed=seed)
        f = gen_line_perturbed(spec)
        cert = approximate(f)
        again = certify(f, cert.A, 2)
        assert again.per_x_rank == cert.per_x_rank
        assert again.bound_satisfied


# -- structural identities ---------------------------------------------------------------


def test_palindromic_equalities_on_candidates():
    rng = random.Random("pal")
    for trial in range(8):
        p = rng.choice((2, 3, 4, 5))
        k = 5 if p == 2 else rng.randint(3, 4)
        spec = GenSpec(
            family="apap_candidate",
            n=rng.randint(3, 5),
            N=k * p + 1 + rng.randint(1, 4),
            seed=trial,
            period=p,
            k=k,
        )
        seq, _, m = structured_candidate(spec)
        assert palindromic_equalities(seq, m) == []


def test_palindromic_equalities_reports_violations():
    d = _seq_with(
        3,
        6,
        {
            1: SymMat.outer([1, 0, 0]),
            2: SymMat.outer([0, 1, 0]),
            3: SymMat.outer([0, 0, 1]),
        },
    )
    assert palindromic_equalities(d, 3)


def test_center_entries_cancel_on_candidates():
    spec = GenSpec(family="apap_candidate", n=3, N=12, seed=2, period=3, k=3)
    seq, _, _ = structured_candidate(spec)
    assert (seq.entry(0) + seq.entry(-1)).is_zero()


def test_block_span_stays_within_two_dimensions():
    for seed in range(5):
        spec = GenSpec(family="apap_candidate", n=4, N=14, seed=seed, period=4, k=3)
        seq, p, _ = structured_candidate(spec)
        span = Subspace.zero(seq.n)
        total = SymMat.zero(seq.n)
        for i in range(1, p - 1):
            span = subspace_sum(span, image(seq.entry(i)))
            total = total + seq.entry(i)
        assert span.dim <= 2
        assert rank(total) <= 2
