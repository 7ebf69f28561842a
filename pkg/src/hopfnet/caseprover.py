"""Substitution-based positivity campaign for det(H_4) of the reduced network g1r.

The goal is the implication a5(h,l) > 0  =>  det(H_4(h,l)) > 0 on the open
positive orthant.  The orthant of h is split into eight subcases (1a..3c);
each one is encoded by substitutions h_i = h_j + v, and, where the sign of
c5(h) matters, by a mu-substitution that forces a variable below or above a
rational bound.  A subcase is certified when every l-coefficient of every
resulting polynomial has only positive coefficients.
"""
from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Iterable, Iterator, Sequence, Union

from .conecalc import ExtremeMatrix, columns_of, match_columns
from .fixtures import fixture
from .polycore import (
    SignStatus,
    SignVerdict,
    SparsePoly,
    VarTable,
    sign_verdict,
    substitute_fraction,
)
from .spectral import CharPoly, ConvexModel, convex_model, generic_hurwitz_template, generic_table, specialize_template

H = tuple(f"h{i}" for i in range(1, 9))
L = ("l1", "l2", "l3", "l4")
V = ("v1", "v2", "v3", "v4")
CAMPAIGN_TABLE = VarTable(H + L + V + ("mu",))

# Extreme rays of g1r in the order used by the case table (reactions k1..k9).
# With this order a5 = (c5 h8 + b5) l1 (l1+l2) l3^2 (l3+l4).
G1R_RAY_ORDER = (
    (1, 0, 1, 1, 0, 0, 0, 0, 0),
    (1, 1, 0, 0, 0, 0, 0, 0, 0),
    (0, 0, 0, 0, 1, 0, 1, 1, 1),
    (0, 0, 0, 0, 1, 1, 0, 0, 0),
)

# rational roots of c5 in the gap variables (numerator, denominator)
S1_NUM = "h5*v2*(2*h4*h6 + (h4 + h6)*(h5 + v3))"
S1_DEN = "(h4*h5 + 2*h2*h4 + h2*h5)*(h5 + v3) + h4*v2*v3"
S2_NUM = "h3*v1*((h3 + v3)*(h4 + h7) + 2*h4*h7)"
S2_DEN = "(h1*h3 + 2*h1*h4 + h3*h4)*(h3 + v3) + h4*v1*v3"


@lru_cache(maxsize=256)
def poly(expr: str, table: VarTable = CAMPAIGN_TABLE) -> SparsePoly:
    """Parse an expression with parentheses via sympy, into ``table``."""
    import sympy

    e = sympy.expand(sympy.sympify(expr, locals={n: sympy.Symbol(n) for n in table.names}))
    terms = {}
    gens = [sympy.Symbol(n) for n in table.names]
    for monom, coeff in sympy.Poly(e, *gens).terms():
        terms[monom] = Fraction(int(sympy.numer(coeff)), int(sympy.denom(coeff)))
    return SparsePoly.from_terms(table, terms)


# ---------------------------------------------------------------- substitutions

@dataclass(frozen=True)
class StrictGap:
    """var = base + gap, encoding var > base with gap > 0."""

    var: str
    base: str
    gap: str

    def to_json(self) -> dict:
        return {"kind": "StrictGap", "var": self.var, "value": f"{self.base} + {self.gap}"}


@dataclass(frozen=True)
class Boundary:
    """var = 0 (the tie case of an earlier StrictGap)."""

    var: str

    def to_json(self) -> dict:
        return {"kind": "Boundary", "var": self.var, "value": "0"}


@dataclass(frozen=True)
class RationalBelow:
    """var = mu/(mu+1) * num/den, encoding 0 < var < num/den."""

    var: str
    num: str
    den: str
    mu: str = "mu"

    def to_json(self) -> dict:
        return {"kind": "RationalBelow", "var": self.var, "num": self.num, "den": self.den, "mu": self.mu}


@dataclass(frozen=True)
class RationalAbove:
    """var = num/den + mu, encoding var > num/den."""

    var: str
    num: str
    den: str
    mu: str = "mu"

    def to_json(self) -> dict:
        return {"kind": "RationalAbove", "var": self.var, "num": self.num, "den": self.den, "mu": self.mu}


Substitution = Union[StrictGap, Boundary, RationalBelow, RationalAbove]


def substitution_from_json(doc: dict) -> Substitution:
    kind = doc["kind"]
    if kind == "StrictGap":
        base, gap = (s.strip() for s in doc["value"].split("+"))
        return StrictGap(doc["var"], base, gap)
    if kind == "Boundary":
        return Boundary(doc["var"])
    cls = RationalBelow if kind == "RationalBelow" else RationalAbove
    return cls(doc["var"], doc["num"], doc["den"], doc.get("mu", "mu"))


@dataclass(frozen=True)
class CasePlan:
    name: str
    condition: str
    substitutions: tuple[Substitution, ...]
    positivity: tuple[str, ...] = ()

    def __post_init__(self):
        introduced = set()
        for s in self.substitutions:
            new = s.gap if isinstance(s, StrictGap) else (s.mu if isinstance(s, (RationalBelow, RationalAbove)) else None)
            if new is not None:
                if new in introduced:
                    raise ValueError(f"{new} introduced twice in plan {self.name}")
                introduced.add(new)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "condition": self.condition,
            "substitutions": [s.to_json() for s in self.substitutions],
            "positive": list(self.positivity),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CasePlan":
        return cls(doc["name"], doc.get("condition", ""),
                   tuple(substitution_from_json(s) for s in doc["substitutions"]),
                   tuple(doc.get("positive", ())))


def apply_substitution(p: SparsePoly, sub: Substitution, prior_check: bool = True) -> SparsePoly:
    table = p.table
    if isinstance(sub, StrictGap):
        return p.substitute(sub.var, table.var(sub.base) + table.var(sub.gap))
    if isinstance(sub, Boundary):
        return p.substitute(sub.var, 0)
    num = poly(sub.num, table)
    den = poly(sub.den, table)
    if prior_check and not sign_verdict(den).positive:
        raise ValueError(f"denominator of the bound on {sub.var} is not sign-definite")
    mu = table.var(sub.mu)
    if isinstance(sub, RationalBelow):
        out, _ = substitute_fraction(p, sub.var, mu * num, (mu + 1) * den)
    else:
        out, _ = substitute_fraction(p, sub.var, num + mu * den, den)
    return out


def apply_plan(p: SparsePoly, plan: CasePlan) -> SparsePoly:
    """Numerator of p after the plan's substitutions, in order.

    Every denominator introduced is a power of a positive polynomial, so the
    sign of the numerator on the positive orthant matches p on the region.
    """
    for sub in plan.substitutions:
        p = apply_substitution(p, sub)
    return p


# ---------------------------------------------------------------- the model

def _lam_key(exps: tuple[int, ...]) -> str:
    parts = [n if e == 1 else f"{n}^{e}" for n, e in zip(L, exps) if e]
    return "*".join(parts) or "1"


@dataclass
class G1rSystem:
    """Char poly of g1r over the campaign table plus the derived objects."""

    model: ConvexModel
    det_h4: SparsePoly
    c5: SparsePoly
    b5: SparsePoly
    lfac: SparsePoly

    @property
    def charpoly(self) -> CharPoly:
        return self.model.charpoly

    @property
    def table(self) -> VarTable:
        return CAMPAIGN_TABLE

    def a5_tilde(self) -> SparsePoly:
        return self.c5 * self.table.var("h8") + self.b5


def g1r_extreme_matrix() -> ExtremeMatrix:
    from .conecalc import extreme_rays
    from .netmodel import stoichiometric_matrix

    E = extreme_rays(stoichiometric_matrix(fixture("g1r")))
    if match_columns(E, G1R_RAY_ORDER) is None:
        raise RuntimeError("g1r rays differ from the case-table ordering")
    return ExtremeMatrix(G1R_RAY_ORDER, E.source_rank, E.n_reactions)


@lru_cache(maxsize=1)
def g1r_system() -> G1rSystem:
    model = convex_model(fixture("g1r"), g1r_extreme_matrix(), CAMPAIGN_TABLE)
    p = model.charpoly
    det4 = specialize_template(generic_hurwitz_template(5, 4), p)
    T = CAMPAIGN_TABLE
    l1, l2, l3, l4 = T.vars(*L)
    lfac = l1 * (l1 + l2) * l3 ** 2 * (l3 + l4)
    parts = p.coeffs[5].coefficients_in("h8")
    if len(parts) != 2:
        raise ArithmeticError("a5 is not linear in h8")
    b5 = parts[0] / lfac
    c5 = parts[1] / lfac
    return G1rSystem(model, det4, c5, b5, lfac)


def lambda_coefficients(p: SparsePoly, l2_zero: bool = False, l4_zero: bool = False) -> dict[tuple[int, ...], SparsePoly]:
    """Coefficients of p in l1..l4; the zero flags keep only monomials free of l2 / l4."""
    out = {}
    for key, c in p.collect(L).items():
        if l2_zero and key[1]:
            continue
        if l4_zero and key[3]:
            continue
        out[key] = c
    return out


# ---------------------------------------------------------------- certificates

@dataclass
class Obligation:
    lam: tuple[int, ...]
    component: str
    verdict: SignVerdict
    terms: int

    def to_json(self, table: VarTable) -> dict:
        doc = {
            "lambdaMonomial": _lam_key(self.lam),
            "component": self.component,
            "verdict": self.verdict.status.value,
            "terms": self.terms,
        }
        if self.verdict.status is SignStatus.MIXED:
            doc["witnessTerm"] = self.verdict.to_json(table)["negativeWitness"]
        return doc


@dataclass
class Certificate:
    subcase: str
    plan: CasePlan
    obligations: list[Obligation] = field(default_factory=list)
    coverage: str = "full"
    notes: list[str] = field(default_factory=list)
    boundary: dict[str, str] = field(default_factory=dict)
    elapsed: float = 0.0
    l2_zero: bool = False
    l4_zero: bool = False

    @property
    def verdict(self) -> str:
        bad = [o for o in self.obligations if o.verdict.status in (SignStatus.MIXED, SignStatus.ALL_NEGATIVE)]
        if bad:
            return "Failed"
        if not any(o.verdict.positive for o in self.obligations):
            return "Failed"
        if any(v != "Positive" for v in self.boundary.values()):
            return "Failed"
        return "Positive"

    def failure(self) -> Obligation | None:
        for o in self.obligations:
            if o.verdict.status in (SignStatus.MIXED, SignStatus.ALL_NEGATIVE):
                return o
        return None

    def to_json(self) -> dict:
        return {
            "subcase": self.subcase,
            "condition": self.plan.condition,
            "substitutions": [s.to_json() for s in self.plan.substitutions],
            "coverage": self.coverage,
            "l2Zero": self.l2_zero,
            "l4Zero": self.l4_zero,
            "obligations": [o.to_json(CAMPAIGN_TABLE) for o in self.obligations],
            "boundary": self.boundary,
            "notes": self.notes,
            "verdict": self.verdict,
            "elapsedSeconds": round(self.elapsed, 3),
        }


# ---------------------------------------------------------------- subcase plans

PLANS: dict[str, CasePlan] = {
    "1a": CasePlan("1a", "h6>=h1, h7>=h2",
                   (StrictGap("h6", "h1", "v1"), StrictGap("h7", "h2", "v2")), ("v1", "v2")),
    "1b": CasePlan("1b", "h1>h6, h7>=h2, h5>=h3",
                   (StrictGap("h1", "h6", "v1"), StrictGap("h7", "h2", "v2"), StrictGap("h5", "h3", "v3")),
                   ("v1", "v2", "v3")),
    "1c": CasePlan("1c", "h6>=h1, h2>h7, h3>=h5",
                   (StrictGap("h6", "h1", "v1"), StrictGap("h2", "h7", "v2"), StrictGap("h3", "h5", "v3")),
                   ("v1", "v2", "v3")),
    "2a": CasePlan("2a", "h1>h6, h7>h2, h3>h5, c5>=0",
                   (StrictGap("h1", "h6", "v1"), StrictGap("h7", "h2", "v2"), StrictGap("h3", "h5", "v3"),
                    RationalBelow("v1", S1_NUM, S1_DEN, "mu")),
                   ("v1", "v2", "v3", "mu")),
    "2b": CasePlan("2b", "h6>h1, h2>h7, h5>h3, c5>=0",
                   (StrictGap("h6", "h1", "v1"), StrictGap("h2", "h7", "v2"), StrictGap("h5", "h3", "v3"),
                    RationalBelow("v2", S2_NUM, S2_DEN, "mu")),
                   ("v1", "v2", "v3", "mu")),
    "3a": CasePlan("3a", "h1>h6, h7>=h2, h3>h5, c5<0",
                   (StrictGap("h7", "h2", "v2"), StrictGap("h3", "h5", "v3"),
                    RationalAbove("h1", f"h6*({S1_DEN}) + {S1_NUM}", S1_DEN, "v4")),
                   ("v2", "v3", "v4", "mu")),
    "3b": CasePlan("3b", "h6>=h1, h2>h7, h5>h3, c5<0",
                   (StrictGap("h6", "h1", "v1"), StrictGap("h5", "h3", "v3"),
                    RationalAbove("h2", f"h7*({S2_DEN}) + {S2_NUM}", S2_DEN, "v4")),
                   ("v1", "v3", "v4", "mu")),
    "3c": CasePlan("3c", "h1>h6, h2>h7, c5<0",
                   (StrictGap("h1", "h6", "v1"), StrictGap("h2", "h7", "v2")),
                   ("v1", "v2", "mu")),
}

# gap variable whose bound comes from c5 = 0 in Case 2
CASE2_GAP = {"2a": "v1", "2b": "v2"}


def _gap_prefix(plan: CasePlan) -> CasePlan:
    return CasePlan(plan.name, plan.condition,
                    tuple(s for s in plan.substitutions if isinstance(s, (StrictGap, Boundary))),
                    plan.positivity)


def _mu_binomial_forms(q: Sequence[SparsePoly], lo: SparsePoly, hi: SparsePoly, upto: int) -> list[SparsePoly]:
    """M_i = (-1)^i sum_{k<=i} C(4-k, i-k) q_k (-hi)^k lo^{i-k}, i = 0..upto.

    Substituting x = -mu/(mu+1) * hi/lo into sum_k q_k x^k (degree <= 4) and
    clearing ((mu+1) lo)^4 gives mu-coefficients lo^{4-i} (-1)^i M_i.
    """
    zero = lo.table.zero()
    out = []
    neg_hi = -hi
    hi_pows = [lo.table.one()]
    lo_pows = [lo.table.one()]
    for _ in range(4):
        hi_pows.append(hi_pows[-1] * neg_hi)
        lo_pows.append(lo_pows[-1] * lo)
    for i in range(upto + 1):
        acc = zero
        for k in range(min(i, len(q) - 1) + 1):
            if q[k].is_zero():
                continue
            acc = acc + comb(4 - k, i - k) * q[k] * hi_pows[k] * lo_pows[i - k]
        out.append(acc if i % 2 == 0 else -acc)
    return out


def extract_case2_M(det4_lam: SparsePoly, c5_sub: SparsePoly, gap: str) -> list[SparsePoly]:
    """M_0..M_4 for one l-coefficient after the gap substitutions.

    ``c5_sub`` = u0*gap + u1 with u0 < 0 on the region; v = gap is bounded by
    the root -u1/u0.  u0, u1 are free of l, so the l-free normalization differs
    from scaling by the factor of a5 only by a positive power of that factor.
    """
    u = c5_sub.coefficients_in(gap)
    if len(u) != 2:
        raise ArithmeticError(f"c5 is not linear in {gap}")
    u1, u0 = u
    q = det4_lam.coefficients_in(gap)
    if len(q) > 5:
        raise ArithmeticError(f"det(H4) has degree above 4 in {gap}")
    return _mu_binomial_forms(q, u0, u1, 4)


@dataclass
class Case3Forms:
    """M_0..M_3 per l-coefficient come from h8-coefficients; M_4, M_5 are global."""

    M4: SparsePoly
    M5: SparsePoly


def case3_betas(system: G1rSystem) -> list[SparsePoly]:
    """beta_i = b_i c5 - c_i b5 for i = 1..4, with a_i = c_i h8 + b_i."""
    out = []
    for i in range(1, 5):
        parts = system.charpoly.coeffs[i].coefficients_in("h8")
        if len(parts) > 2:
            raise ArithmeticError(f"a{i} is not linear in h8")
        b = parts[0]
        c = parts[1] if len(parts) == 2 else system.table.zero()
        out.append(b * system.c5 - c * system.b5)
    return out


def extract_case3_M(system: G1rSystem) -> Case3Forms:
    """M_4 and M_5 (global); M_0..M_3 are produced per l-coefficient by ``case3_low_M``.

    At h8 = -b5/c5 each alpha_i equals beta_i / c5 and alpha_5 vanishes; the
    A5-free part of det(H4) is A4 * det(H3), so the mu^4 coefficient is
    M5 * M4 with M5 = -beta_4 and M4 = -c5^3 det(H3)(beta/c5).
    """
    beta = case3_betas(system)
    M5 = -beta[3]
    h3 = generic_hurwitz_template(5, 3).substitute("A5", 0)
    M4 = -_homogenize(h3, beta, system.c5, 3)
    return Case3Forms(M4, M5)


def _homogenize(template: SparsePoly, values: Sequence[SparsePoly], scale: SparsePoly, weight: int) -> SparsePoly:
    """scale^weight * template(values/scale) for templates of total degree <= weight."""
    zero = scale.table.zero()
    acc = zero
    pows = {}
    for exps, c in template.terms().items():
        d = sum(exps)
        if d > weight:
            raise ValueError("template degree exceeds the weight")
        if any(exps[len(values):]):
            raise ValueError("template uses a variable without a value")
        term = scale.table.one() * c
        for v, e in zip(values, exps):
            if e:
                key = (id(v), e)
                if key not in pows:
                    pows[key] = v ** e
                term = term * pows[key]
        if weight - d:
            term = term * scale ** (weight - d)
        acc = acc + term
    return acc


def case3_low_M(det4_lam: SparsePoly, system: G1rSystem) -> list[SparsePoly]:
    """M_0..M_3 for one l-coefficient; h8 is bounded by -b5/c5 with c5 < 0."""
    q = det4_lam.coefficients_in("h8")
    if len(q) > 5:
        raise ArithmeticError("det(H4) has degree above 4 in h8")
    return _mu_binomial_forms(q, system.c5, system.b5, 3)


# ---------------------------------------------------------------- campaign

@dataclass
class CampaignOptions:
    mode: str = "fast"  # fast | full
    l2_zero: bool = False
    l4_zero: bool = False
    subset_size: int = 6
    subcases: tuple[str, ...] = ("1a", "1b", "1c", "2a", "2b", "3a", "3b", "3c")
    progress: Callable[[str], None] | None = None

    def fully_checked(self, name: str) -> bool:
        return self.mode == "full" or name in ("1a", "1b", "1c", "2a")


def fast_subset(keys: Sequence, k: int) -> list:
    """Every ceil(len/k)-th key of the sorted list, plus the last one."""
    keys = sorted(keys)
    if len(keys) <= k:
        return keys
    step = -(-len(keys) // k)
    chosen = keys[::step]
    if keys[-1] not in chosen:
        chosen.append(keys[-1])
    return chosen


def _log(opts: CampaignOptions, msg: str) -> None:
    if opts.progress:
        opts.progress(msg)


def _obligation(lam, component, p: SparsePoly) -> Obligation:
    return Obligation(lam, component, sign_verdict(p), len(p))


def run_case1(name: str, system: G1rSystem, opts: CampaignOptions) -> Certificate:
    plan = PLANS[name]
    cert = Certificate(name, plan, l2_zero=opts.l2_zero, l4_zero=opts.l4_zero)
    t0 = time.time()
    gaps = [s.gap for s in plan.substitutions if isinstance(s, StrictGap)]
    images = {}
    for lam, c in lambda_coefficients(system.det_h4, opts.l2_zero, opts.l4_zero).items():
        img = apply_plan(c, plan)
        cert.obligations.append(_obligation(lam, "det(H4)", img))
        images[lam] = img
    # ties: any subset of the gap variables set to zero
    for size in range(1, len(gaps) + 1):
        for sub in itertools.combinations(gaps, size):
            key = "=".join(sub) + "=0"
            zero = {g: 0 for g in sub}
            ok = True
            some_positive = False
            for img in images.values():
                v = sign_verdict(img.substitute_many(zero))
                if v.status in (SignStatus.MIXED, SignStatus.ALL_NEGATIVE):
                    ok = False
                    break
                some_positive |= v.positive
            cert.boundary[key] = "Positive" if ok and some_positive else "Failed"
    cert.elapsed = time.time() - t0
    return cert


def run_case2(name: str, system: G1rSystem, opts: CampaignOptions) -> Certificate:
    plan = PLANS[name]
    gap = CASE2_GAP[name]
    prefix = _gap_prefix(plan)
    cert = Certificate(name, plan, l2_zero=opts.l2_zero, l4_zero=opts.l4_zero)
    t0 = time.time()
    c5_sub = apply_plan(system.c5, prefix)
    u = c5_sub.coefficients_in(gap)
    u0_verdict = sign_verdict(-u[1])
    cert.notes.append(f"c5 after gap substitutions is linear in {gap}; -u0 verdict {u0_verdict.status.value}")
    cert.notes.append(f"u1 verdict {sign_verdict(u[0]).status.value}")
    if not u0_verdict.positive:
        cert.obligations.append(Obligation((0, 0, 0, 0), "u0<0", u0_verdict, len(u[1])))
    lams = lambda_coefficients(system.det_h4, opts.l2_zero, opts.l4_zero)
    keys = sorted(lams)
    if not opts.fully_checked(name):
        keys = fast_subset(keys, opts.subset_size)
        cert.coverage = f"subset {len(keys)}/{len(lams)} l-monomials"
    for lam in keys:
        img = apply_plan(lams[lam], prefix)
        for i, M in enumerate(extract_case2_M(img, c5_sub, gap)):
            cert.obligations.append(_obligation(lam, f"M{i}", M))
    cert.elapsed = time.time() - t0
    return cert


_CASE3_CACHE: dict[int, Case3Forms] = {}


def _case3_forms(system: G1rSystem) -> Case3Forms:
    key = id(system)
    if key not in _CASE3_CACHE:
        _CASE3_CACHE[key] = extract_case3_M(system)
    return _CASE3_CACHE[key]


def case3_M0_certificate(system: G1rSystem, opts: CampaignOptions) -> Certificate:
    """M0 is positive before any case substitution."""
    plan = CasePlan("3-M0", "c5<0", ())
    cert = Certificate("3-M0", plan, l2_zero=opts.l2_zero, l4_zero=opts.l4_zero)
    t0 = time.time()
    for lam, c in lambda_coefficients(system.det_h4, opts.l2_zero, opts.l4_zero).items():
        M0 = case3_low_M(c, system)[0]
        cert.obligations.append(_obligation(lam, "M0", M0))
    cert.elapsed = time.time() - t0
    return cert


def run_case3(name: str, system: G1rSystem, opts: CampaignOptions) -> Certificate:
    plan = PLANS[name]
    cert = Certificate(name, plan, l2_zero=opts.l2_zero, l4_zero=opts.l4_zero)
    t0 = time.time()
    forms = _case3_forms(system)
    lams = lambda_coefficients(system.det_h4, opts.l2_zero, opts.l4_zero)
    full = opts.fully_checked(name)
    keys = sorted(lams) if full else fast_subset(lams, opts.subset_size)
    for lam in keys:
        for i, M in enumerate(case3_low_M(lams[lam], system)):
            if i == 0:
                continue  # covered unconditionally by the M0 certificate
            cert.obligations.append(_obligation(lam, f"M{i}", apply_plan(M, plan)))
    n_global = 0
    for comp, form in (("M4", forms.M4), ("M5", forms.M5)):
        coeffs = lambda_coefficients(form, opts.l2_zero, opts.l4_zero)
        n_global += len(coeffs)
        ks = sorted(coeffs) if full else fast_subset(coeffs, opts.subset_size)
        for lam in ks:
            cert.obligations.append(_obligation(lam, comp, apply_plan(coeffs[lam], plan)))
    if not full:
        cert.coverage = f"subset of l-monomials (M1-M3 {len(keys)}/{len(lams)}, M4/M5 up to {opts.subset_size} each)"
    cert.notes.append("M0 > 0 unconditionally (see 3-M0), so tie cases of non-strict inequalities follow")
    cert.elapsed = time.time() - t0
    return cert


@dataclass
class NonvanishingWitness:
    monomial: str
    condition: str
    substitution: StrictGap
    verdict: SignVerdict
    tie_verdict: SignVerdict

    @property
    def holds(self) -> bool:
        return self.verdict.positive and self.tie_verdict.positive

    def to_json(self) -> dict:
        return {
            "lambdaMonomial": self.monomial,
            "condition": self.condition,
            "substitution": self.substitution.to_json(),
            "verdict": self.verdict.status.value,
            "tieVerdict": self.tie_verdict.status.value,
            "holds": self.holds,
        }


def nonvanishing_witnesses(system: G1rSystem) -> list[NonvanishingWitness]:
    """l-coefficients of det(H4) free of l2 and l4 that stay positive on half-spaces in (h3, h5)."""
    coeffs = system.det_h4.collect(L)
    out = []
    for exps, cond, sub in (
        ((7, 0, 3, 0), "h5>=h3", StrictGap("h5", "h3", "v3")),
        ((1, 0, 9, 0), "h3>=h5", StrictGap("h3", "h5", "v3")),
    ):
        c = coeffs.get(exps, system.table.zero())
        img = apply_substitution(c, sub)
        out.append(NonvanishingWitness(_lam_key(exps), cond, sub, sign_verdict(img),
                                       sign_verdict(img.substitute("v3", 0))))
    return out


@dataclass
class CampaignReport:
    options: CampaignOptions
    certificates: list[Certificate]
    witnesses: list[NonvanishingWitness]
    elapsed: float

    @property
    def verdict(self) -> str:
        ok = all(c.verdict == "Positive" for c in self.certificates) and all(w.holds for w in self.witnesses)
        return "Positive" if ok else "Failed"

    def to_json(self) -> dict:
        return {
            "network": "g1r",
            "mode": self.options.mode,
            "l2Zero": self.options.l2_zero,
            "l4Zero": self.options.l4_zero,
            "verdict": self.verdict,
            "certificates": [c.to_json() for c in self.certificates],
            "nonvanishing": [w.to_json() for w in self.witnesses],
            "elapsedSeconds": round(self.elapsed, 3),
        }


def run_subcase(name: str, system: G1rSystem, opts: CampaignOptions) -> Certificate:
    if name.startswith("1"):
        return run_case1(name, system, opts)
    if name.startswith("2"):
        return run_case2(name, system, opts)
    if name == "3-M0":
        return case3_M0_certificate(system, opts)
    return run_case3(name, system, opts)


def _worker(args):
    name, opts = args
    return run_subcase(name, g1r_system(), opts)


def run_campaign(opts: CampaignOptions | None = None, jobs: int = 1) -> CampaignReport:
    opts = opts or CampaignOptions()
    t0 = time.time()
    system = g1r_system()
    names = list(opts.subcases)
    if any(n.startswith("3") for n in names):
        names.insert(names.index(next(n for n in names if n.startswith("3"))), "3-M0")
    certs: list[Certificate] = []
    if jobs > 1:
        import multiprocessing as mp

        progress, opts.progress = opts.progress, None
        with mp.get_context("fork").Pool(jobs) as pool:
            certs = pool.map(_worker, [(n, opts) for n in names])
        opts.progress = progress
    else:
        for n in names:
            _log(opts, f"subcase {n} ...")
            cert = run_subcase(n, system, opts)
            _log(opts, f"subcase {n}: {cert.verdict} ({len(cert.obligations)} obligations, {cert.elapsed:.1f}s)")
            certs.append(cert)
    for cert in certs:
        if cert.verdict == "Failed":
            break
    witnesses = nonvanishing_witnesses(system)
    return CampaignReport(opts, certs, witnesses, time.time() - t0)


# ---------------------------------------------------------------- case table predicates

def c5_value(h: Sequence[Fraction]) -> Fraction:
    h1, h2, h3, h4, h5, h6, h7, _ = h
    return ((h6 - h1) * (h2 + h5 + h7) * h3 * h4 + (h7 - h2) * (h1 + h3 + h6) * h4 * h5
            + (h6 * h7 - h1 * h2) * h3 * h5)


def subcases_containing(h: Sequence[Fraction]) -> list[str]:
    """Subcases of the table whose defining conditions hold at h."""
    h1, h2, h3, h4, h5, h6, h7, _ = h
    c5 = c5_value(h)
    conds = {
        "1a": h6 >= h1 and h7 >= h2,
        "1b": h1 > h6 and h7 >= h2 and h5 >= h3,
        "1c": h6 >= h1 and h2 > h7 and h3 >= h5,
        "2a": h1 > h6 and h7 > h2 and h3 > h5 and c5 >= 0,
        "2b": h6 > h1 and h2 > h7 and h5 > h3 and c5 >= 0,
        "3a": h1 > h6 and h7 >= h2 and h3 > h5 and c5 < 0,
        "3b": h6 >= h1 and h2 > h7 and h5 > h3 and c5 < 0,
        "3c": h1 > h6 and h2 > h7 and c5 < 0,
    }
    return [k for k, v in conds.items() if v]


# ---------------------------------------------------------------- sampling

def random_positive_rational(rng: random.Random, spread: int = 3) -> Fraction:
    """Log-uniform-ish positive rational across a few orders of magnitude."""
    num = rng.randint(1, 999)
    den = rng.randint(1, 999)
    scale = Fraction(10) ** rng.randint(-spread, spread)
    return Fraction(num, den) * scale


@dataclass
class SampleReport:
    trials: int
    attempts: int
    violations: list[dict]
    strata: dict[str, int]
    dual_checked: int
    seed: int

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "attempts": self.attempts,
            "violations": self.violations,
            "strata": self.strata,
            "dualChecked": self.dual_checked,
            "seed": self.seed,
        }


STRATA = {"generic": (), "l2=0": ("l2",), "l4=0": ("l4",), "l2=l4=0": ("l2", "l4")}


def hurwitz4_from_values(a: Sequence[Fraction]) -> Fraction:
    """det(H4) of z^5 + a1 z^4 + ... + a5 from numeric coefficients."""
    _, A1, A2, A3, A4, A5 = a
    return (-A1 * A1 * A4 * A4 - A1 * A2 * A2 * A5 + A1 * A2 * A3 * A4 + 2 * A1 * A4 * A5
            + A2 * A3 * A5 - A3 * A3 * A4 - A5 * A5)


def sample_implication(
    trials: int,
    seed: int = 0,
    strata: Iterable[str] = tuple(STRATA),
    corrupt: SparsePoly | None = None,
    dual_every: int = 500,
    system: G1rSystem | None = None,
) -> SampleReport:
    """Random exact check of a5 > 0 => det(H4) > 0 on g1r.

    ``trials`` counts accepted draws (a5 > 0), split evenly over the strata.
    ``corrupt`` is added to det(H4) (negative control).  Every ``dual_every``-th
    draw also evaluates the expanded det(H4) polynomial as a cross-check.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    system = system or g1r_system()
    rng = random.Random(seed)
    p = system.charpoly
    table = system.table
    strata = list(strata)
    per = [trials // len(strata) + (1 if i < trials % len(strata) else 0) for i in range(len(strata))]
    violations = []
    attempts = 0
    dual = 0
    counts = {}
    accepted_total = 0
    for stratum, want in zip(strata, per):
        zeros = STRATA[stratum]
        got = 0
        while got < want:
            attempts += 1
            point = {n: Fraction(0) for n in table.names}
            for n in H + L:
                point[n] = Fraction(0) if n in zeros else random_positive_rational(rng)
            vals = [c.eval(point) for c in p.coeffs]
            if vals[5] <= 0:
                continue
            got += 1
            accepted_total += 1
            d = hurwitz4_from_values(vals)
            if dual_every and accepted_total % dual_every == 0:
                dual += 1
                if system.det_h4.eval(point) != d:
                    raise ArithmeticError("det(H4) template and expansion disagree")
            if corrupt is not None:
                d += corrupt.eval(point)
            if d <= 0:
                violations.append({"stratum": stratum, "point": {n: str(point[n]) for n in H + L}, "det": str(d)})
        counts[stratum] = got
    return SampleReport(trials, attempts, violations, counts, dual, seed)


def corrupted_term(system: G1rSystem | None = None, scale: int = 10 ** 6) -> SparsePoly:
    """A large negative multiple of one term of det(H4), for the negative control."""
    system = system or g1r_system()
    exps, c = system.det_h4.sorted_terms()[0]
    return SparsePoly.from_terms(system.table, {exps: -abs(c) * scale})
