"""Convex-parameter Jacobians, reduced characteristic polynomials and Hurwitz determinants."""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .conecalc import ExtremeMatrix, exact_rank, extreme_rays, has_zero_row
from .netmodel import Network, reactant_matrix, stoichiometric_matrix
from .polycore import SignStatus, SignVerdict, SparsePoly, VarTable, sign_verdict


def convex_table(n: int, m: int, extra: Sequence[str] = ()) -> VarTable:
    """Variables h1..hn, l1..lm followed by any extras."""
    return VarTable(tuple(f"h{i + 1}" for i in range(n)) + tuple(f"l{j + 1}" for j in range(m)) + tuple(extra))


@dataclass(frozen=True)
class PolyMatrix:
    table: VarTable
    entries: tuple[tuple[SparsePoly, ...], ...]

    def __post_init__(self):
        n = len(self.entries)
        if any(len(row) != n for row in self.entries):
            raise ValueError("PolyMatrix must be square")

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def eval(self, point) -> list[list[Fraction]]:
        return [[e.eval(point) for e in row] for row in self.entries]

    def substitute_many(self, mapping) -> "PolyMatrix":
        return PolyMatrix(self.table, tuple(tuple(e.substitute_many(mapping) for e in row) for row in self.entries))

    def submatrix(self, idx: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix(self.table, tuple(tuple(self.entries[i][j] for j in idx) for i in idx))

    def to_json(self) -> list:
        return [[str(e) for e in row] for row in self.entries]


@dataclass(frozen=True)
class CharPoly:
    """z^s + a_1 z^{s-1} + ... + a_s; ``coeffs`` holds a_0 = 1 through a_s."""

    table: VarTable
    coeffs: tuple[SparsePoly, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def a(self, i: int) -> SparsePoly:
        return self.coeffs[i]

    def eval(self, point) -> list[Fraction]:
        return [c.eval(point) for c in self.coeffs]

    def substitute_many(self, mapping) -> "CharPoly":
        return CharPoly(self.table, tuple(c.substitute_many(mapping) for c in self.coeffs))

    def to_table(self, table: VarTable) -> "CharPoly":
        return CharPoly(table, tuple(c.to_table(table) for c in self.coeffs))

    def to_json(self) -> dict:
        return {"degree": self.degree, "coefficients": [str(c) for c in self.coeffs]}


def convex_jacobian(N, B, E: ExtremeMatrix, table: VarTable | None = None) -> PolyMatrix:
    """J(h, l) = N diag(E l) B^T diag(h) with symbolic h and l."""
    N = np.asarray(N, dtype=object)
    B = np.asarray(B, dtype=object)
    n, r = N.shape
    if B.shape != (n, r) or E.n_reactions != r:
        raise ValueError(f"dimension mismatch: N {N.shape}, B {B.shape}, E has {E.n_reactions} rows")
    if has_zero_row(E):
        warnings.warn("extreme matrix has a zero row; J(h,l) does not cover all steady-state Jacobians")
    m = E.m
    if table is None:
        table = convex_table(n, m)
    h = [table.var(f"h{i + 1}") for i in range(n)]
    l = [table.var(f"l{j + 1}") for j in range(m)]
    zero = table.zero()
    flux = []
    for j in range(r):
        f = zero
        for k, col in enumerate(E.columns):
            if col[j]:
                f = f + col[j] * l[k]
        flux.append(f)
    rows = []
    for i in range(n):
        row = []
        for k in range(n):
            acc = zero
            for j in range(r):
                if N[i, j] and B[k, j]:
                    acc = acc + int(N[i, j] * B[k, j]) * flux[j]
            row.append(acc * h[k] if acc else zero)
        rows.append(tuple(row))
    return PolyMatrix(table, tuple(rows))


def berkowitz(M: PolyMatrix) -> list[SparsePoly]:
    """Coefficients of det(zI - M), highest power first, without divisions."""
    table = M.table
    one = table.one()
    zero = table.zero()
    c = [one]
    for r in range(1, M.n + 1):
        a_rr = M[r - 1, r - 1]
        R = [M[r - 1, j] for j in range(r - 1)]
        S = [M[i, r - 1] for i in range(r - 1)]
        # first column of the Toeplitz factor: 1, -a_rr, -R S, -R A S, ...
        col = [one, -a_rr]
        v = S
        for _ in range(r - 1):
            col.append(-sum((x * y for x, y in zip(R, v)), zero))
            v = [sum((M[i, j] * v[j] for j in range(r - 1)), zero) for i in range(r - 1)]
        new = []
        for i in range(r + 1):
            acc = zero
            for j in range(min(i, r - 1) + 1):
                if i - j < len(col) and j < len(c):
                    acc = acc + col[i - j] * c[j]
            new.append(acc)
        c = new
    return c


def char_poly(J: PolyMatrix, s: int) -> CharPoly:
    full = berkowitz(J)
    n = J.n
    for k in range(s + 1, n + 1):
        if not full[k].is_zero():
            raise ArithmeticError(f"coefficient of z^{n - k} does not vanish; rank {s} is inconsistent")
    return CharPoly(J.table, tuple(full[: s + 1]))


def det_laplace(M: Sequence[Sequence], zero, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None):
    """Determinant by memoized Laplace expansion along rows; zero entries are skipped."""
    rows = list(range(len(M))) if rows is None else list(rows)
    cols = list(range(len(M))) if cols is None else list(cols)
    k = len(rows)
    memo: dict[int, object] = {}

    def rec(depth: int, free: int):
        if depth == k:
            return None  # stands for 1
        if free in memo:
            return memo[free]
        acc = zero
        sign = 1
        for pos in range(k):
            bit = 1 << pos
            if not free & bit:
                continue
            e = M[rows[depth]][cols[pos]]
            if e != 0:
                sub = rec(depth + 1, free & ~bit)
                term = e if sub is None else e * sub
                acc = acc + term if sign > 0 else acc - term
            sign = -sign
        memo[free] = acc
        return acc

    res = rec(0, (1 << k) - 1)
    return res


def principal_minor_sums(J: PolyMatrix) -> list[SparsePoly]:
    """Characteristic coefficients via signed sums of principal minors (Laplace path)."""
    n = J.n
    zero = J.table.zero()
    out = [J.table.one()]
    for i in range(1, n + 1):
        acc = zero
        for S in itertools.combinations(range(n), i):
            acc = acc + det_laplace(J.entries, zero, S, S)
        out.append(acc if i % 2 == 0 else -acc)
    return out


def numeric_char_poly(A: Sequence[Sequence]) -> list[Fraction]:
    """det(zI - A) coefficients by Faddeev-LeVerrier over exact rationals."""
    n = len(A)
    A = [[Fraction(x) for x in row] for row in A]
    coeffs = [Fraction(1)]
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        c_prev = coeffs[-1]
        # M_k = A M_{k-1} + c_{k-1} I
        Mk = [[sum(A[i][t] * Mk[t][j] for t in range(n)) + (c_prev if i == j else 0) for j in range(n)] for i in range(n)]
        AM = [[sum(A[i][t] * Mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        coeffs.append(-sum(AM[i][i] for i in range(n)) / k)
    return coeffs


# ---------------------------------------------------------------- Hurwitz determinants

def hurwitz_entries(coeffs: Sequence, i: int, zero=0) -> list[list]:
    """H_i with (k, l) entry a_{2k-l} (1-based), zero outside 0..s."""
    s = len(coeffs) - 1
    return [[coeffs[2 * k - l] if 0 <= 2 * k - l <= s else zero for l in range(1, i + 1)] for k in range(1, i + 1)]


@lru_cache(maxsize=None)
def generic_table(s: int) -> VarTable:
    return VarTable(tuple(f"A{i}" for i in range(1, s + 1)))


@lru_cache(maxsize=None)
def generic_hurwitz_template(s: int, i: int) -> SparsePoly:
    """det(H_i) of the generic monic z^s + A1 z^{s-1} + ... + As, as a polynomial in A1..As."""
    T = generic_table(s)
    coeffs = [T.one()] + [T.var(f"A{k}") for k in range(1, s + 1)]
    H = hurwitz_entries(coeffs, i, 0)
    return det_laplace(H, T.zero())


def specialize_template(template: SparsePoly, p: CharPoly) -> SparsePoly:
    return template.compose(list(p.coeffs[1:]), p.table)


@dataclass(frozen=True)
class HurwitzSet:
    """det(H_1) .. det(H_{s-1}) expanded; det(H_s) kept as the product a_s * det(H_{s-1})."""

    dets: tuple[SparsePoly, ...]
    verdicts: tuple[SignVerdict, ...]
    a_s: SparsePoly

    @property
    def s(self) -> int:
        return len(self.dets) + 1

    def det(self, i: int) -> SparsePoly:
        """det(H_i), 1-based; i = s expands the product."""
        if i == self.s:
            return self.a_s * self.dets[-1] if self.dets else self.a_s
        return self.dets[i - 1]

    def verdict(self, i: int) -> SignVerdict | None:
        """Sign verdict of det(H_i); for i = s only when the factors settle it."""
        if i < self.s:
            return self.verdicts[i - 1]
        a = sign_verdict(self.a_s)
        d = self.verdicts[-1] if self.verdicts else SignVerdict(SignStatus.ALL_POSITIVE)
        if a.status is SignStatus.ZERO or d.status is SignStatus.ZERO:
            return SignVerdict(SignStatus.ZERO)
        signs = {SignStatus.ALL_POSITIVE: 1, SignStatus.ALL_NEGATIVE: -1}
        if a.status in signs and d.status in signs:
            pos = signs[a.status] * signs[d.status] > 0
            return SignVerdict(SignStatus.ALL_POSITIVE if pos else SignStatus.ALL_NEGATIVE)
        return None

    def to_json(self, table: VarTable, include_polys: bool = False) -> list:
        out = []
        for i, (d, v) in enumerate(zip(self.dets, self.verdicts), start=1):
            item = {"index": i, "terms": len(d), "verdict": v.to_json(table)}
            if include_polys:
                item["poly"] = str(d)
            out.append(item)
        last = self.verdict(self.s)
        out.append({
            "index": self.s,
            "factored": f"a{self.s}*det(H{self.s - 1})",
            "verdict": last.to_json(table) if last else None,
        })
        return out


def hurwitz_set(p: CharPoly) -> HurwitzSet:
    s = p.degree
    if s < 1:
        raise ValueError("degree must be at least 1")
    dets = tuple(specialize_template(generic_hurwitz_template(s, i), p) for i in range(1, s))
    return HurwitzSet(dets, tuple(sign_verdict(d) for d in dets), p.coeffs[s])


def hurwitz_direct(p: CharPoly, i: int) -> SparsePoly:
    """det(H_i) by Laplace expansion of the polynomial matrix itself (oracle path)."""
    zero = p.table.zero()
    return det_laplace(hurwitz_entries(list(p.coeffs), i, 0), zero)


# ---------------------------------------------------------------- pipeline

@dataclass(frozen=True)
class ConvexModel:
    """Everything the spectral pipeline derives from a network."""

    net: Network
    N: np.ndarray
    B: np.ndarray
    E: ExtremeMatrix
    rank: int
    J: PolyMatrix
    charpoly: CharPoly

    @property
    def table(self) -> VarTable:
        return self.J.table


def convex_model(net: Network, E: ExtremeMatrix | None = None, table: VarTable | None = None) -> ConvexModel:
    N = stoichiometric_matrix(net)
    B = reactant_matrix(net)
    if E is None:
        E = extreme_rays(N)
    s = exact_rank(N)
    J = convex_jacobian(N, B, E, table)
    return ConvexModel(net, N, B, E, s, J, char_poly(J, s))


def reversible_pair_rays(net: Network, E: ExtremeMatrix) -> list[int]:
    """Indices of rays supported exactly on a pair of mutually reverse reactions."""
    out = []
    for k, col in enumerate(E.columns):
        supp = [j for j, v in enumerate(col) if v]
        if len(supp) != 2:
            continue
        a, b = (net.reactions[j] for j in supp)
        if a.reactant == b.product and a.product == b.reactant:
            out.append(k)
    return out


@dataclass
class PreclusionReport:
    verdict: str  # Precluded, Inconclusive, OutOfScope
    rank: int
    n_rays: int
    hurwitz: HurwitzSet | None
    a_s_verdict: SignVerdict | None
    obligations: list[str] = field(default_factory=list)
    sub_verdicts: dict[str, dict] = field(default_factory=dict)
    table: VarTable | None = None

    def to_json(self) -> dict:
        doc = {
            "verdict": self.verdict,
            "rank": self.rank,
            "rays": self.n_rays,
            "obligations": self.obligations,
            "subVerdicts": self.sub_verdicts,
        }
        if self.hurwitz is not None:
            doc["hurwitz"] = self.hurwitz.to_json(self.table)
            doc["lastCoefficient"] = self.a_s_verdict.to_json(self.table)
        return doc


def _precludes(verdicts: Sequence[SignVerdict], s: int) -> bool:
    return all(v.positive for v in verdicts[: s - 1])


def preclusion_by_positivity(net: Network, E: ExtremeMatrix | None = None, model: ConvexModel | None = None) -> PreclusionReport:
    """Positivity of det(H_1) .. det(H_{s-1}) precludes purely imaginary pairs.

    Sub-verdicts repeat the test with every nonempty set of reversible-pair
    ray parameters set to zero (making those pairs irreversible).
    """
    model = model or convex_model(net, E)
    s = model.rank
    if s < 2:
        return PreclusionReport("OutOfScope", s, model.E.m, None, None,
                                ["rank below 2: no pair of eigenvalues to test"], table=model.table)
    hs = hurwitz_set(model.charpoly)
    a_s = sign_verdict(model.charpoly.coeffs[s])
    ok = _precludes(hs.verdicts, s)
    report = PreclusionReport("Precluded" if ok else "Inconclusive", s, model.E.m, hs, a_s, table=model.table)
    if not ok:
        first_bad = next(i for i, v in enumerate(hs.verdicts[: s - 1], start=1) if not v.positive)
        if first_bad == s - 1:
            report.obligations.append(f"a{s}>0 => det(H{s - 1})>0")
        else:
            report.obligations.append(f"det(H{first_bad}) not sign-definite by coefficients")
    pair_rays = reversible_pair_rays(net, model.E)
    for size in range(1, len(pair_rays) + 1):
        for sub in itertools.combinations(pair_rays, size):
            names = [f"l{k + 1}" for k in sub]
            zero = {n: 0 for n in names}
            vs = [sign_verdict(d.substitute_many(zero)) for d in hs.dets[: s - 1]]
            report.sub_verdicts["=".join(names) + "=0"] = {
                "precluded": _precludes(vs, s),
                "statuses": [v.status.value for v in vs],
            }
    return report
