"""Hypothesis strategies shared by the property tests."""

from __future__ import annotations

import hypothesis.strategies as st

from qhom import DeltaSeq, QuasiHomWindow, SymMat, reconstruct
from qhom.generators import gen_rank1_sym


@st.composite
def sym_mats(draw, n: int | None = None, max_n: int = 4, bound: int = 3) -> SymMat:
    dim = n if n is not None else draw(st.integers(1, max_n))
    count = dim * (dim + 1) // 2
    entries = draw(
        st.lists(st.integers(-bound, bound), min_size=count, max_size=count)
    )
    return SymMat.from_upper(dim, entries)


@st.composite
def sym_mat_pairs(draw, max_n: int = 4) -> tuple[SymMat, SymMat]:
    dim = draw(st.integers(1, max_n))
    return draw(sym_mats(n=dim)), draw(sym_mats(n=dim))


@st.composite
def delta_seqs(draw, max_n: int = 3, max_radius: int = 5) -> DeltaSeq:
    """Mixed sequences: rank-one entries, zeros, and occasional junk."""
    dim = draw(st.integers(1, max_n))
    radius = draw(st.integers(1, max_radius))
    entries = []
    for i in range(-radius, radius):
        kind = draw(st.integers(0, 3))
        if kind == 0:
            entries.append(SymMat.zero(dim))
        elif kind <= 2:
            entries.append(gen_rank1_sym(dim, draw(st.integers(0, 10**6))))
        else:
            entries.append(draw(sym_mats(n=dim, bound=2)))
    return DeltaSeq(dim, radius, tuple(entries))


@st.composite
def windows_zero_at_one(draw, max_n: int = 3, max_radius: int = 5) -> QuasiHomWindow:
    return reconstruct(draw(delta_seqs(max_n=max_n, max_radius=max_radius)))
