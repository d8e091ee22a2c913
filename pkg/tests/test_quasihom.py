"""Windows, delta sequences, normalization, reconstruction, verification."""

from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings

from qhom import (
    DeltaSeq,
    FormatError,
    QuasiHomWindow,
    SymMat,
    delta,
    normalize,
    rank,
    reconstruct,
    verify_delta_form,
    verify_direct,
    window_from_payload,
    window_to_payload,
)
from qhom.generators import gen_rank1_sym, periodic_delta, random_symmetric

from .strategies import delta_seqs, windows_zero_at_one


def _hom_window(n, radius, a):
    return QuasiHomWindow.from_function(n, radius, lambda x: a.scale(x))


# -- normalize -------------------------------------------------------------------


def test_normalize_exact_homomorphism_to_zero():
    a = SymMat.diag([1, 0])
    g, c = normalize(_hom_window(2, 5, a))
    assert c == -a
    assert all(g.value(x).is_zero() for x in g.xs())


def test_normalize_identity_when_already_zero_at_one():
    f = QuasiHomWindow.from_function(2, 4, lambda x: SymMat.zero(2))
    g, c = normalize(f)
    assert c.is_zero()
    assert g == f


def test_normalize_line_perturbed_symbolic():
    # f(x) = x * v v^T + eps(x) * w w^T with eps(1) = 1
    v = SymMat.outer([1, 0])
    w = SymMat.outer([0, 1])
    eps = {x: (x * x) % 5 for x in range(-6, 7)}
    eps[1] = 1
    f = QuasiHomWindow.from_function(2, 6, lambda x: v.scale(x) + w.scale(eps[x]))
    g, c = normalize(f)
    assert c == -(v + w)
    for x in f.xs():
        assert g.value(x) == w.scale(eps[x] - x)


@given(windows_zero_at_one())
@settings(max_examples=60, deadline=None)
def test_normalize_preserves_defect_ranks(g0):
    # shift by an arbitrary linear part, then normalize back
    shift = random_symmetric(g0.n, "normshift")
    f = QuasiHomWindow.from_function(
        g0.n, g0.N, lambda x: g0.value(x) + shift.scale(x)
    )
    g, c = normalize(f)
    assert g.value(1).is_zero()
    rng = random.Random(17)
    for _ in range(10):
        x = rng.randint(-f.N, f.N)
        y = rng.randint(max(-f.N, -f.N - x), min(f.N, f.N - x))
        df = f.value(x + y) - f.value(x) - f.value(y)
        dg = g.value(x + y) - g.value(x) - g.value(y)
        assert rank(df) == rank(dg)


def test_normalize_transport_of_approximant():
    f = QuasiHomWindow.from_function(
        2, 5, lambda x: SymMat.diag([x, 2 * x]) + SymMat.outer([1, 1], x % 3)
    )
    g, c = normalize(f)
    a = SymMat.diag([1, 2])
    a_shift = a + c
    for x in f.xs():
        assert rank(f.value(x) - a.scale(x)) == rank(g.value(x) - a_shift.scale(x))


# -- delta / reconstruct ------------------------------------------------------------


def test_delta_of_zero_window():
    d = delta(QuasiHomWindow.from_function(2, 4, lambda x: SymMat.zero(2)))
    assert all(d.entry(i).is_zero() for i in d.indices())


def test_delta_of_homomorphism_is_constant():
    a = SymMat.diag([1, -2])
    d = delta(_hom_window(2, 4, a))
    assert all(d.entry(i) == a for i in d.indices())


def test_delta_alternates_for_parity_window():
    w = SymMat.outer([0, 1])
    f = QuasiHomWindow.from_function(2, 5, lambda x: w.scale(x % 2))
    d = delta(f)
    for i in d.indices():
        expected = w if i % 2 == 0 else -w
        assert d.entry(i) == expected


def test_reconstruct_zero_and_constant():
    d0 = DeltaSeq.from_function(2, 4, lambda i: SymMat.zero(2))
    assert all(reconstruct(d0).value(x).is_zero() for x in range(-4, 5))
    a = SymMat.diag([2, 1])
    d1 = DeltaSeq.from_function(2, 4, lambda i: a)
    g = reconstruct(d1)
    for x in g.xs():
        assert g.value(x) == a.scale(x - 1)


@given(delta_seqs())
@settings(max_examples=80, deadline=None)
def test_reconstruct_round_trips(d):
    g = reconstruct(d)
    assert g.value(1).is_zero()
    assert delta(g) == d


@given(windows_zero_at_one())
@settings(max_examples=60, deadline=None)
def test_delta_then_reconstruct_is_identity(g):
    assert reconstruct(delta(g)) == g


# -- verify_direct --------------------------------------------------------------------


def test_verify_homomorphism_has_zero_defect():
    report = verify_direct(_hom_window(3, 5, SymMat.diag([1, 2, 3])), 0)
    assert report.c_measured == 0
    assert report.satisfied
    assert report.witness is None
    # all pairs (x, y) with x, y, x+y in range
    assert report.pair_count == sum(
        1
        for x in range(-5, 6)
        for y in range(-5, 6)
        if -5 <= x + y <= 5
    )


def test_verify_line_perturbed_is_at_most_one():
    rng = random.Random(3)
    a = SymMat.diag([1, 0, 2])
    w = SymMat.outer([1, 1, 0])
    eps = {x: rng.randint(-3, 3) for x in range(-8, 9)}
    f = QuasiHomWindow.from_function(3, 8, lambda x: a.scale(x) + w.scale(eps[x]))
    report = verify_direct(f, 1)
    assert report.c_measured <= 1


def test_verify_period_two_counterexample_rank_two_witness():
    # independent cancellation pairs: APAP shape but not within the bound
    b1 = SymMat.outer([1, 0])
    b2 = SymMat.outer([0, 1])
    f = reconstruct(periodic_delta(2, 8, 2, [], [b1, b2]))
    assert f.value(2) == b1
    assert f.value(4) == b2
    report = verify_direct(f, 1)
    assert report.c_measured == 2
    assert not report.satisfied
    x, y = report.witness
    assert rank(f.value(x + y) - f.value(x) - f.value(y)) == 2
    # the defect at (2, 2) is f(4) - 2 f(2) = b2 - 2 b1, visibly rank two
    assert rank(f.value(4) - f.value(2).scale(2)) == 2


def test_verify_witness_is_lexicographically_first():
    b1 = SymMat.outer([1, 0])
    b2 = SymMat.outer([0, 1])
    f = reconstruct(periodic_delta(2, 6, 2, [], [b1, b2]))
    report = verify_direct(f, 1)
    x0, y0 = report.witness
    for x in range(-f.N, f.N + 1):
        for y in range(max(-f.N, -f.N - x), min(f.N, f.N - x) + 1):
            if (x, y) == (x0, y0):
                return
            defect = f.value(x + y) - f.value(x) - f.value(y)
            assert rank(defect) < report.c_measured
    raise AssertionError("witness not reached in scan order")


# -- verify_delta_form ------------------------------------------------------------------


def test_delta_form_zero_sequence():
    d = DeltaSeq.from_function(2, 4, lambda i: SymMat.zero(2))
    assert verify_delta_form(d, 0)


def test_delta_form_constant_sequence():
    # constant differences reconstruct to g(x) = (x-1)*A, whose defect is
    # constantly A; the check must agree with that, not with x -> x*A
    a = SymMat.diag([1, 2])
    d = DeltaSeq.from_function(2, 4, lambda i: a)
    g = reconstruct(d)
    defects = {
        rank(g.value(x + y) - g.value(x) - g.value(y))
        for x in range(-2, 3)
        for y in range(-2, 3)
    }
    assert defects == {rank(a)}
    assert not verify_delta_form(d, rank(a) - 1)
    assert verify_delta_form(d, rank(a))
    # a normalized exact homomorphism has zero differences and passes at 0
    zero_d = delta(normalize(_hom_window(2, 4, a))[0])
    assert all(zero_d.entry(i).is_zero() for i in zero_d.indices())
    assert verify_delta_form(zero_d, 0)


def test_delta_form_detects_rank_one_entries():
    # bound 0 fails as soon as any single entry is nonzero
    d = DeltaSeq.from_function(2, 3, lambda i: gen_rank1_sym(2, i))
    assert not verify_delta_form(d, 0)


@given(windows_zero_at_one(max_n=3, max_radius=5))
@settings(max_examples=100, deadline=None)
def test_delta_form_agrees_with_direct_scan(g):
    d = delta(g)
    for c in (0, 1, 2):
        assert verify_delta_form(d, c) == verify_direct(g, c).satisfied


def test_delta_form_k0_specialization():
    # passing at bound c forces every single entry to rank <= c
    b = SymMat.outer([1, 0, 0])
    a = SymMat.outer([0, 1, 0])
    d = periodic_delta(3, 9, 3, [b], [a])
    g = reconstruct(d)
    assert verify_delta_form(d, 1)
    assert all(rank(d.entry(i)) <= 1 for i in d.indices())
    assert verify_direct(g, 1).satisfied


# -- window payloads -----------------------------------------------------------------


def test_window_payload_round_trip():
    f = _hom_window(2, 3, SymMat.from_rows([[1, 2], [2, -1]]))
    blob = json.dumps(window_to_payload(f))
    assert window_from_payload(json.loads(blob)) == f


def test_window_payload_missing_x_is_hard_error():
    payload = window_to_payload(_hom_window(2, 3, SymMat.diag([1, 1])))
    del payload["values"]["0"]
    with pytest.raises(FormatError, match="missing x"):
        window_from_payload(payload)


def test_window_payload_extra_key_is_hard_error():
    payload = window_to_payload(_hom_window(2, 2, SymMat.diag([1, 1])))
    payload["values"]["99"] = payload["values"]["0"]
    with pytest.raises(FormatError, match="unexpected"):
        window_from_payload(payload)


def test_window_payload_asymmetric_matrix_is_hard_error():
    payload = window_to_payload(_hom_window(2, 2, SymMat.diag([1, 1])))
    payload["values"]["1"] = [[1, 2], [3, 4]]
    with pytest.raises(FormatError, match="x = 1"):
        window_from_payload(payload)


def test_window_payload_dimension_mismatch():
    payload = window_to_payload(_hom_window(2, 2, SymMat.diag([1, 1])))
    payload["values"]["1"] = [[1]]
    with pytest.raises(FormatError, match="dimension"):
        window_from_payload(payload)


def test_window_restrict_and_mirror():
    f = _hom_window(2, 5, SymMat.diag([1, 2]))
    small = f.restrict(3)
    assert small.N == 3
    assert all(small.value(x) == f.value(x) for x in small.xs())
    d = delta(f)
    mirrored = d.mirror()
    assert all(mirrored.entry(i) == d.entry(-1 - i) for i in d.indices())
    assert mirrored.mirror() == d
