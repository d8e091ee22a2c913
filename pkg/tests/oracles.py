"""Independent oracles used to cross-check the library.

Everything here deliberately avoids the library's elimination code: the
determinant is a permutation sum, rank is a brute-force search over all
square minors, and membership is a rank comparison.  Slow, but an
independent path for small sizes.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from qhom import SymMat


def det_permutation(rows: list[list[Fraction]]) -> Fraction:
    """Determinant as the signed permutation sum."""
    k = len(rows)
    total = Fraction(0)
    for perm in itertools.permutations(range(k)):
        sign = 1
        for i in range(k):
            for j in range(i + 1, k):
                if perm[i] > perm[j]:
                    sign = -sign
        term = Fraction(1)
        for i in range(k):
            term *= Fraction(rows[i][perm[i]])
        total += sign * term
    return total


def oracle_rank(rows: list[list]) -> int:
    """Largest k such that some k x k minor is nonzero."""
    if not rows:
        return 0
    n_rows, n_cols = len(rows), len(rows[0])
    for k in range(min(n_rows, n_cols), 0, -1):
        for ri in itertools.combinations(range(n_rows), k):
            for ci in itertools.combinations(range(n_cols), k):
                sub = [[rows[i][j] for j in ci] for i in ri]
                if det_permutation(sub) != 0:
                    return k
    return 0


def oracle_rank_sym(m: SymMat) -> int:
    return oracle_rank(m.rows())


def oracle_member(vector, rows: list[list]) -> bool:
    """Is the vector in the row span?  Rank comparison, no elimination."""
    base = [list(r) for r in rows]
    return oracle_rank(base + [list(vector)]) == oracle_rank(base)


def mat_vec(m: SymMat, v) -> list[Fraction]:
    return [
        sum((m.entry(i, j) * Fraction(v[j]) for j in range(m.n)), Fraction(0))
        for i in range(m.n)
    ]
