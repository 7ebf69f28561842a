"""Extreme rays of the flux cone ker(N) ∩ R^r_{>=0}.

The enumeration is a double description pass over the rows of N, starting
from the nonnegative orthant and using a combinatorial (rank) adjacency test.
Columns are returned primitive and sorted lexicographically.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import flint
import numpy as np

IntVec = tuple[int, ...]


def _rows(M) -> list[list[int]]:
    return [[int(v) for v in row] for row in np.asarray(M, dtype=object).tolist()]


def exact_rank(M) -> int:
    rows = _rows(M)
    if not rows or not rows[0]:
        return 0
    return flint.fmpq_mat(rows).rank()


def _column_rank(rows: list[list[int]], cols: Sequence[int]) -> int:
    if not cols or not rows:
        return 0
    return flint.fmpq_mat([[row[j] for j in cols] for row in rows]).rank()


def nullspace(M) -> list[list[Fraction]]:
    """Basis of the right kernel of an integer matrix, as Fraction vectors."""
    rows = _rows(M)
    if not rows:
        return []
    ncols = len(rows[0])
    R, rank = flint.fmpq_mat(rows).rref()
    pivots = []
    for i in range(rank):
        for j in range(ncols):
            if R[i, j] != 0:
                pivots.append(j)
                break
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            c = R[i, f]
            v[p] = -Fraction(int(c.p), int(c.q))
        basis.append(v)
    return basis


def primitive(vec: Iterable) -> IntVec:
    """Scale a rational vector to coprime integers (sign preserved)."""
    fr = [Fraction(v) for v in vec]
    den = 1
    for v in fr:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in fr]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g == 0:
        return tuple(ints)
    return tuple(v // g for v in ints)


def support(vec: Sequence[int]) -> frozenset[int]:
    return frozenset(i for i, v in enumerate(vec) if v != 0)


@dataclass(frozen=True)
class ExtremeMatrix:
    """Primitive extreme vectors of the flux cone, one tuple per column."""

    columns: tuple[IntVec, ...]
    source_rank: int
    n_reactions: int

    @property
    def m(self) -> int:
        return len(self.columns)

    @property
    def r(self) -> int:
        return self.n_reactions

    def matrix(self) -> np.ndarray:
        """The r x m integer matrix E."""
        if not self.columns:
            return np.zeros((self.n_reactions, 0), dtype=np.int64)
        return np.array(self.columns, dtype=np.int64).T

    def rows(self) -> list[list[int]]:
        return [[c[i] for c in self.columns] for i in range(self.n_reactions)]

    def to_json(self) -> dict:
        return {
            "reactions": self.n_reactions,
            "rank": self.source_rank,
            "ordering": "primitive integer columns, ascending lexicographic",
            "columns": [list(c) for c in self.columns],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ExtremeMatrix":
        return cls(tuple(tuple(c) for c in doc["columns"]), doc["rank"], doc["reactions"])

    @classmethod
    def from_columns(cls, columns: Iterable[Sequence], n_reactions: int, source_rank: int = -1) -> "ExtremeMatrix":
        cols = tuple(sorted({primitive(c) for c in columns}))
        return cls(cols, source_rank, n_reactions)


def extreme_rays(N) -> ExtremeMatrix:
    """Double description over the equalities of N, starting from the orthant."""
    rows = _rows(N)
    if not rows:
        raise ValueError("empty stoichiometric matrix")
    r = len(rows[0])
    rays: list[IntVec] = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    processed: list[list[int]] = []
    for row in rows:
        if not any(row):
            continue
        vals = [sum(a * b for a, b in zip(row, y)) for y in rays]
        zero = [y for y, v in zip(rays, vals) if v == 0]
        pos = [(y, v) for y, v in zip(rays, vals) if v > 0]
        neg = [(y, v) for y, v in zip(rays, vals) if v < 0]
        processed.append(row)
        new: list[IntVec] = []
        for (p, vp), (q, vq) in itertools.product(pos, neg):
            joint = sorted(support(p) | support(q))
            # p and q adjacent in the previous cone iff their joint face is 2-dimensional
            prev = processed[:-1]
            if _column_rank(prev, joint) != len(joint) - 2:
                continue
            combo = [vp * b - vq * a for a, b in zip(p, q)]
            new.append(primitive(combo))
        rays = sorted(set(zero) | set(new))
    return ExtremeMatrix(tuple(sorted(rays)), exact_rank(rows), r)


def is_extreme(N, y: Sequence[int]) -> bool:
    rows = _rows(N)
    if any(v < 0 for v in y) or not any(y):
        return False
    if any(sum(a * b for a, b in zip(row, y)) for row in rows):
        return False
    s = sorted(support(y))
    return _column_rank(rows, s) == len(s) - 1


def brute_force_rays(N) -> ExtremeMatrix:
    """Oracle: enumerate supports S with a one-dimensional, strictly positive kernel of N[:, S]."""
    import sympy

    M = sympy.Matrix(_rows(N))
    r = M.cols
    found = []
    for size in range(1, r + 1):
        for S in itertools.combinations(range(r), size):
            sub = M[:, list(S)]
            ker = sub.nullspace()
            if len(ker) != 1:
                continue
            v = list(ker[0])
            if all(x > 0 for x in v) or all(x < 0 for x in v):
                full = [Fraction(0)] * r
                for j, x in zip(S, v):
                    x = abs(sympy.Rational(x))
                    full[j] = Fraction(int(x.p), int(x.q))
                found.append(primitive(full))
    return ExtremeMatrix.from_columns(found, r, int(M.rank()))


def has_zero_row(E: ExtremeMatrix) -> bool:
    return any(all(c[i] == 0 for c in E.columns) for i in range(E.n_reactions))


def match_columns(E: ExtremeMatrix, target: Sequence[Sequence]) -> list[int] | None:
    """Permutation perm with E.columns[perm[j]] ∝ target column j, or None.

    ``target`` is given as a list of columns (each of length r).
    """
    prim = [primitive(c) for c in target]
    if len(prim) != E.m:
        return None
    index = {c: i for i, c in enumerate(E.columns)}
    perm = []
    for c in prim:
        if c not in index:
            return None
        perm.append(index[c])
    return perm if len(set(perm)) == len(perm) else None


def columns_of(matrix_rows: Sequence[Sequence]) -> list[tuple]:
    """Transpose a row-major matrix literal into its list of columns."""
    return [tuple(col) for col in zip(*matrix_rows)]


def lift_extreme_matrix(E_reduced: ExtremeMatrix, forward: int, backward: int) -> ExtremeMatrix:
    """Expected extreme matrix of G from that of G' = G minus the backward reaction.

    Each column of E' gets a zero inserted at ``backward``; the extra column is
    the reversible-pair cycle with ones at ``forward`` and ``backward``.
    """
    r = E_reduced.n_reactions + 1
    if not 0 <= backward < r:
        raise ValueError("backward index out of range")
    cols = [c[:backward] + (0,) + c[backward:] for c in E_reduced.columns]
    cyc = [0] * r
    cyc[forward] = cyc[backward] = 1
    cols.append(tuple(cyc))
    return ExtremeMatrix.from_columns(cols, r, E_reduced.source_rank)


def verify_reduction_structure(
    E_G: ExtremeMatrix, E_Gp: ExtremeMatrix, motif_reactions: tuple[int, int]
) -> tuple[bool, list[int] | None]:
    """Check E_G = [E' with a zero row at the backward reaction | E_m] up to scaling and order.

    ``motif_reactions`` = (forward index, backward index) in G.  Returns the
    verdict and the permutation taking the expected block columns to E_G.
    """
    forward, backward = motif_reactions
    if E_G.n_reactions != E_Gp.n_reactions + 1:
        raise ValueError("dimension mismatch: G must have exactly one more reaction than G'")
    expected = [c[:backward] + (0,) + c[backward:] for c in E_Gp.columns]
    cyc = [0] * E_G.n_reactions
    cyc[forward] = cyc[backward] = 1
    expected.append(tuple(cyc))
    perm = match_columns(E_G, expected)
    return perm is not None, perm
