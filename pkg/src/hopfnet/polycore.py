"""Exact sparse multivariate polynomials over the rationals.

Ring arithmetic is delegated to FLINT's ``fmpq_mpoly`` (via python-flint);
this module owns the named-variable tables, coefficient collection, the
sign-preserving rational substitutions used by the case prover, the text
format, and the quadratic extension ``QuadExt`` used for square roots.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

import flint

Rational = Union[int, Fraction]


def to_fraction(c) -> Fraction:
    if isinstance(c, flint.fmpq):
        return Fraction(int(c.p), int(c.q))
    if isinstance(c, flint.fmpz):
        return Fraction(int(c))
    return Fraction(c)


def _to_fmpq(c) -> flint.fmpq:
    if isinstance(c, flint.fmpq):
        return c
    c = Fraction(c)
    return flint.fmpq(c.numerator, c.denominator)


@dataclass(frozen=True)
class VarTable:
    """Ordered, duplicate-free variable names; polynomials over one table share a ring."""

    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise ValueError("variable names must be unique")

    @classmethod
    def of(cls, *groups: Iterable[str]) -> "VarTable":
        return cls(tuple(n for g in groups for n in ([g] if isinstance(g, str) else g)))

    @cached_property
    def ctx(self):
        return flint.fmpq_mpoly_ctx.get(self.names, "deglex")

    @cached_property
    def _index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"variable {name!r} not in table") from None

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def extend(self, *names: str) -> "VarTable":
        return VarTable(self.names + tuple(n for n in names if n not in self))

    def var(self, name: str) -> "SparsePoly":
        return SparsePoly.var(self, name)

    def vars(self, *names: str) -> list["SparsePoly"]:
        return [self.var(n) for n in names]

    def zero(self) -> "SparsePoly":
        return SparsePoly(self)

    def one(self) -> "SparsePoly":
        return SparsePoly.constant(self, 1)


class SparsePoly:
    """Immutable polynomial over a ``VarTable`` with exact rational coefficients."""

    __slots__ = ("table", "raw")

    def __init__(self, table: VarTable, raw=None):
        self.table = table
        self.raw = table.ctx.from_dict({}) if raw is None else raw

    # -- construction
    @classmethod
    def constant(cls, table: VarTable, value: Rational) -> "SparsePoly":
        return cls(table, table.ctx.constant(_to_fmpq(value)))

    @classmethod
    def var(cls, table: VarTable, name: str) -> "SparsePoly":
        return cls(table, table.ctx.gens()[table.index(name)])

    @classmethod
    def from_terms(cls, table: VarTable, terms: Mapping[Sequence[int], Rational]) -> "SparsePoly":
        data = {}
        for exps, c in terms.items():
            if len(exps) != len(table):
                raise ValueError("exponent vector length does not match the variable table")
            if c:
                data[tuple(exps)] = _to_fmpq(c)
        return cls(table, table.ctx.from_dict(data))

    @classmethod
    def parse(cls, text: str, table: VarTable) -> "SparsePoly":
        return parse_poly(text, table)

    # -- arithmetic
    def _lift(self, other) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            if other.table != self.table:
                raise ValueError("variable table mismatch")
            return other
        if isinstance(other, (int, Fraction, flint.fmpq, flint.fmpz)):
            return SparsePoly.constant(self.table, other)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return SparsePoly(self.table, self.raw + o.raw)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return SparsePoly(self.table, self.raw - o.raw)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return SparsePoly(self.table, o.raw - self.raw)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return SparsePoly(self.table, self.raw * o.raw)

    __rmul__ = __mul__

    def __neg__(self):
        return SparsePoly(self.table, -self.raw)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        return SparsePoly(self.table, self.raw ** k)

    def __truediv__(self, other):
        """Division by a nonzero rational, or exact division by a polynomial."""
        if isinstance(other, (int, Fraction)):
            return SparsePoly(self.table, self.raw / _to_fmpq(other))
        o = self._lift(other)
        try:
            return SparsePoly(self.table, self.raw / o.raw)
        except Exception as exc:
            raise ArithmeticError("polynomial division is not exact") from exc

    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return self.table == other.table and self.raw == other.raw
        if isinstance(other, (int, Fraction)):
            return self.raw == self._lift(other).raw
        return NotImplemented

    def __hash__(self):
        return hash((self.table.names, str(self.raw)))

    def __bool__(self):
        return not self.raw.is_zero()

    def __len__(self):
        return len(self.raw)

    # -- inspection
    def is_zero(self) -> bool:
        return self.raw.is_zero()

    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return {tuple(e): to_fraction(c) for e, c in self.raw.to_dict().items()}

    def coefficients(self) -> list[Fraction]:
        return [to_fraction(c) for c in self.raw.coeffs()]

    def degree(self, name: str) -> int:
        if self.is_zero():
            return -1
        return int(self.raw.degrees()[self.table.index(name)])

    def total_degree(self) -> int:
        return -1 if self.is_zero() else int(self.raw.total_degree())

    def variables(self) -> list[str]:
        if self.is_zero():
            return []
        return [n for n, d in zip(self.table.names, self.raw.degrees()) if d > 0]

    # -- evaluation and substitution
    def eval(self, point: Sequence[Rational] | Mapping[str, Rational]) -> Fraction:
        """Exact value at a rational point (full-length sequence or name mapping)."""
        if isinstance(point, Mapping):
            used = self.variables()
            missing = [n for n in used if n not in point]
            if missing:
                raise KeyError(f"no value for {missing}")
            vals = [_to_fmpq(point.get(n, 0)) for n in self.table.names]
        else:
            if len(point) != len(self.table):
                raise ValueError("point length does not match the variable table")
            vals = [_to_fmpq(v) for v in point]
        return to_fraction(self.raw(*vals))

    def eval_generic(self, values: Mapping[str, object], one=1):
        """Evaluate with arbitrary ring elements (e.g. ``QuadExt``) supporting + and *."""
        idx = [self.table.index(n) for n in self.variables()]
        powers: dict[tuple[int, int], object] = {}

        def power(i, e):
            key = (i, e)
            if key not in powers:
                base = values[self.table.names[i]]
                acc = one
                for _ in range(e):
                    acc = acc * base
                powers[key] = acc
            return powers[key]

        total = 0 * one
        for exps, c in self.raw.to_dict().items():
            term = one * to_fraction(c)
            for i in idx:
                if exps[i]:
                    term = term * power(i, exps[i])
            total = total + term
        return total

    def substitute(self, name: str, replacement: "SparsePoly | Rational") -> "SparsePoly":
        return self.substitute_many({name: replacement})

    def substitute_many(self, mapping: Mapping[str, "SparsePoly | Rational"]) -> "SparsePoly":
        """Simultaneous substitution of polynomials for variables."""
        gens = list(self.table.ctx.gens())
        for name, rep in mapping.items():
            gens[self.table.index(name)] = self._lift(rep).raw
        return SparsePoly(self.table, self.raw.compose(*gens))

    def compose(self, values: Sequence["SparsePoly"], table: VarTable) -> "SparsePoly":
        """Substitute values[i] (polynomials over ``table``) for the i-th variable of self."""
        if len(values) != len(self.table):
            raise ValueError("need one value per variable")
        raws = []
        for v in values:
            if not isinstance(v, SparsePoly):
                v = SparsePoly.constant(table, v)
            elif v.table != table:
                raise ValueError("variable table mismatch")
            raws.append(v.raw)
        return SparsePoly(table, self.raw.compose(*raws, ctx=table.ctx))

    def to_table(self, table: VarTable) -> "SparsePoly":
        """Re-express over another table; every variable in use must exist there."""
        if table == self.table:
            return self
        for n in self.variables():
            if n not in table:
                raise ValueError(f"variable {n!r} missing from target table")
        tgens = table.ctx.gens()
        zero = table.ctx.from_dict({})
        args = [tgens[table.index(n)] if n in table else zero for n in self.table.names]
        return SparsePoly(table, self.raw.compose(*args, ctx=table.ctx))

    # -- collection
    def coefficients_in(self, name: str) -> list["SparsePoly"]:
        """[c_0, c_1, ..., c_d] with self = sum c_k * name^k."""
        i = self.table.index(name)
        parts: dict[int, dict] = {}
        for exps, c in self.raw.to_dict().items():
            k = exps[i]
            e = list(exps)
            e[i] = 0
            parts.setdefault(k, {})[tuple(e)] = c
        d = max(parts, default=-1)
        ctx = self.table.ctx
        return [SparsePoly(self.table, ctx.from_dict(parts.get(k, {}))) for k in range(d + 1)]

    def collect(self, names: Sequence[str]) -> dict[tuple[int, ...], "SparsePoly"]:
        """Map exponent-vector over ``names`` to its coefficient polynomial."""
        idx = [self.table.index(n) for n in names]
        parts: dict[tuple[int, ...], dict] = {}
        for exps, c in self.raw.to_dict().items():
            key = tuple(exps[i] for i in idx)
            e = list(exps)
            for i in idx:
                e[i] = 0
            parts.setdefault(key, {})[tuple(e)] = c
        ctx = self.table.ctx
        return {k: SparsePoly(self.table, ctx.from_dict(v)) for k, v in sorted(parts.items())}

    def monomial(self, exps: Mapping[str, int]) -> "SparsePoly":
        e = [0] * len(self.table)
        for n, k in exps.items():
            e[self.table.index(n)] = k
        return SparsePoly(self.table, self.table.ctx.from_dict({tuple(e): 1}))

    # -- text form
    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in graded lexicographic order (highest first, ties broken by table index)."""
        return sorted(self.terms().items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        s = str(self)
        if len(s) > 120:
            s = s[:117] + "..."
        return f"SparsePoly({s})"

    def to_json(self) -> list:
        return [[list(e), str(c)] for e, c in self.sorted_terms()]


def format_poly(p: SparsePoly) -> str:
    names = p.table.names
    out = []
    for exps, c in p.sorted_terms():
        mono = "*".join(
            names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(exps) if e
        )
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        out.append((sign, body))
    if not out:
        return "0"
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


_TERM_RE = re.compile(r"([+-]?)\s*([^+-]+)")
_FACTOR_RE = re.compile(r"^(?:(\d+)(?:/(\d+))?|([A-Za-z_][A-Za-z0-9_]*)(?:\^(\d+))?)$")


def parse_poly(text: str, table: VarTable) -> SparsePoly:
    """Parse the text form ``3/2*h1^2*l3 - h2*l1`` (no parentheses)."""
    src = text.replace(" ", "")
    if not src:
        raise ValueError("empty polynomial text")
    if src == "0":
        return table.zero()
    terms: dict[tuple[int, ...], Fraction] = {}
    pos = 0
    while pos < len(src):
        m = _TERM_RE.match(src, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial near {src[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        coef = Fraction(sign)
        exps = [0] * len(table)
        for factor in m.group(2).split("*"):
            f = _FACTOR_RE.match(factor)
            if not f:
                raise ValueError(f"bad factor {factor!r}")
            if f.group(1):
                coef *= Fraction(int(f.group(1)), int(f.group(2) or 1))
            else:
                exps[table.index(f.group(3))] += int(f.group(4) or 1)
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + coef
        pos = m.end()
    return SparsePoly.from_terms(table, terms)


# ---------------------------------------------------------------- sign verdicts

class SignStatus(str, Enum):
    ALL_POSITIVE = "AllCoeffsPositive"
    ALL_NEGATIVE = "AllCoeffsNegative"
    ZERO = "Zero"
    MIXED = "Mixed"


@dataclass(frozen=True)
class SignVerdict:
    status: SignStatus
    positive_witness: tuple[tuple[int, ...], Fraction] | None = None
    negative_witness: tuple[tuple[int, ...], Fraction] | None = None
    n_terms: int = 0

    @property
    def positive(self) -> bool:
        return self.status is SignStatus.ALL_POSITIVE

    def to_json(self, table: VarTable | None = None) -> dict:
        def term(w):
            if w is None:
                return None
            e, c = w
            if table is None:
                return {"exponents": list(e), "coefficient": str(c)}
            return str(SparsePoly.from_terms(table, {e: c}))

        return {
            "status": self.status.value,
            "terms": self.n_terms,
            "positiveWitness": term(self.positive_witness),
            "negativeWitness": term(self.negative_witness),
        }


def sign_verdict(p: SparsePoly) -> SignVerdict:
    """Classify the signs of all coefficients.

    AllCoeffsPositive implies p > 0 on the open positive orthant.
    """
    if p.is_zero():
        return SignVerdict(SignStatus.ZERO)
    pos = neg = None
    raw = p.raw
    for c in raw.coeffs():
        if c > 0:
            if pos is None:
                pos = True
        elif neg is None:
            neg = True
        if pos and neg:
            break
    if pos and neg:
        ptw = ngw = None
        for e, c in raw.terms():
            if c > 0 and ptw is None:
                ptw = (tuple(e), to_fraction(c))
            elif c < 0 and ngw is None:
                ngw = (tuple(e), to_fraction(c))
            if ptw and ngw:
                break
        return SignVerdict(SignStatus.MIXED, ptw, ngw, len(raw))
    return SignVerdict(SignStatus.ALL_POSITIVE if pos else SignStatus.ALL_NEGATIVE, n_terms=len(raw))


# ---------------------------------------------------------------- rational substitutions

def substitute_fraction(p: SparsePoly, name: str, num: SparsePoly, den: SparsePoly) -> tuple[SparsePoly, int]:
    """Numerator of p(name = num/den), i.e. p(num/den) * den^d with d = deg_name(p)."""
    coeffs = p.coefficients_in(name)
    d = len(coeffs) - 1
    if d <= 0:
        return p, 0
    den_pows = [p.table.one()]
    for _ in range(d):
        den_pows.append(den_pows[-1] * den)
    acc = coeffs[d]
    for k in range(d - 1, -1, -1):
        acc = acc * num
        if not coeffs[k].is_zero():
            acc = acc + coeffs[k] * den_pows[d - k]
    return acc, d


def substitute_rational_bound(
    p: SparsePoly,
    name: str,
    q_num: SparsePoly,
    q_den: SparsePoly,
    mode: str,
    mu: str,
) -> tuple[SparsePoly, int]:
    """Encode ``name < q`` (mode "below") or ``name > q`` (mode "above") with q = q_num/q_den.

    below: name = mu/(mu+1) * q, denominator ((mu+1) q_den)^d;
    above: name = q + mu, denominator q_den^d.
    For mu > 0 the sign of p on the region equals the sign of the returned numerator.
    """
    if not sign_verdict(q_den).positive:
        raise ValueError("bound denominator must have only positive coefficients")
    m = p.table.var(mu)
    if mode == "below":
        return substitute_fraction(p, name, m * q_num, (m + 1) * q_den)
    if mode == "above":
        return substitute_fraction(p, name, q_num + m * q_den, q_den)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------- quadratic extension

def _rational_sqrt(q: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None if irrational."""
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


@dataclass(frozen=True)
class QuadExt:
    """a + b*sqrt(d) with rational a, b and a fixed rational radicand d >= 0."""

    a: Fraction
    b: Fraction = Fraction(0)
    d: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        object.__setattr__(self, "d", Fraction(self.d))
        if self.d < 0:
            raise ValueError("negative radicand")
        root = _rational_sqrt(self.d)
        if root is not None and self.b:
            # perfect square: fold into the rational part, keep d for mixing checks
            object.__setattr__(self, "a", self.a + self.b * root)
            object.__setattr__(self, "b", Fraction(0))

    @classmethod
    def sqrt(cls, d: Rational) -> "QuadExt":
        return cls(Fraction(0), Fraction(1), Fraction(d))

    def _coerce(self, other) -> "QuadExt":
        if isinstance(other, QuadExt):
            if other.b and self.b and other.d != self.d:
                raise ValueError("radicand mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(Fraction(other), Fraction(0), self.d)
        return NotImplemented

    def _d_with(self, o: "QuadExt") -> Fraction:
        return self.d if self.b or not o.b else o.d

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExt(self.a + o.a, self.b + o.b, self._d_with(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = self._d_with(o)
        return QuadExt(self.a * o.a + self.b * o.b * d, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def inverse(self) -> "QuadExt":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("element with zero norm")
        c = self.conjugate()
        return QuadExt(c.a / n, c.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadExt(self.a / other, self.b / other, self.d)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        acc = QuadExt(Fraction(1), Fraction(0), self.d)
        for _ in range(k):
            acc = acc * self
        return acc

    def is_rational(self) -> bool:
        return self.b == 0 or self.d == 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QuadExt(Fraction(other), Fraction(0), self.d)
        if not isinstance(other, QuadExt):
            return NotImplemented
        if self.b == 0 and other.b == 0:
            return self.a == other.a
        return self.a == other.a and self.b == other.b and self.d == other.d

    def __hash__(self):
        return hash((self.a, self.b, self.d if self.b else 0))

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(d)."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if self.d == 0 or sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 d
        diff = self.a * self.a - self.b * self.b * self.d
        return sa if diff > 0 else (sb if diff < 0 else 0)

    def __float__(self):
        return float(self.a) + float(self.b) * float(self.d) ** 0.5

    def __repr__(self):
        if not self.b:
            return f"QuadExt({self.a})"
        return f"QuadExt({self.a} + {self.b}*sqrt({self.d}))"
