"""Concrete witnesses: realized steady states, spectra, the transport map phi."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import flint
import mpmath

from .conecalc import ExtremeMatrix, exact_rank, extreme_rays, has_zero_row, verify_reduction_structure
from .netmodel import (
    Motif,
    Network,
    Reordering,
    check_assumptions,
    reactant_matrix,
    remove_backward,
    reorder_motif_last,
    stoichiometric_matrix,
)
from .polycore import QuadExt
from .spectral import (
    ConvexModel,
    convex_model,
    det_laplace,
    hurwitz_entries,
    numeric_char_poly,
)


@dataclass(frozen=True)
class WitnessPoint:
    kappa: tuple
    x: tuple

    def __post_init__(self):
        if any(v <= 0 for v in self.kappa) or any(v <= 0 for v in self.x):
            raise ValueError("rate constants and concentrations must be positive")


def realize_parameters(net: Network, E: ExtremeMatrix, h: Sequence, l: Sequence) -> WitnessPoint:
    """x = 1/h and kappa_j = (E l)_j * prod_i h_i^{B_ij}, a steady state by construction."""
    if has_zero_row(E):
        raise ValueError("extreme matrix has a zero row")
    B = reactant_matrix(net)
    h = [Fraction(v) for v in h]
    l = [Fraction(v) for v in l]
    flux = [sum((c[j] * lk for c, lk in zip(E.columns, l)), Fraction(0)) for j in range(E.n_reactions)]
    kappa = []
    for j in range(net.n_reactions):
        k = flux[j]
        for i in range(net.n_species):
            if B[i, j]:
                k *= h[i] ** int(B[i, j])
        kappa.append(k)
    return WitnessPoint(tuple(kappa), tuple(1 / v for v in h))


def reaction_rates(net: Network, kappa: Sequence, x: Sequence) -> list:
    B = reactant_matrix(net)
    out = []
    for j in range(net.n_reactions):
        v = kappa[j]
        for i in range(net.n_species):
            if B[i, j]:
                v = v * x[i] ** int(B[i, j])
        out.append(v)
    return out


def mass_action_rhs(net: Network, kappa: Sequence, x: Sequence) -> list:
    """f(x) = N diag(kappa) x^B, in the arithmetic of the inputs."""
    N = stoichiometric_matrix(net)
    rates = reaction_rates(net, kappa, x)
    zero = 0 * rates[0] if rates else 0
    return [sum((int(N[i, j]) * rates[j] for j in range(net.n_reactions) if N[i, j]), zero)
            for i in range(net.n_species)]


def mass_action_jacobian(net: Network, kappa: Sequence, x: Sequence) -> list[list]:
    """d f / d x = N diag(rates) B^T diag(1/x)."""
    N = stoichiometric_matrix(net)
    B = reactant_matrix(net)
    rates = reaction_rates(net, kappa, x)
    n = net.n_species
    zero = 0 * rates[0]
    J = []
    for i in range(n):
        row = []
        for k in range(n):
            acc = zero
            for j in range(net.n_reactions):
                if N[i, j] and B[k, j]:
                    acc = acc + int(N[i, j] * B[k, j]) * rates[j]
            row.append(acc / x[k])
        J.append(row)
    return J


# ---------------------------------------------------------------- spectra

@dataclass
class SpectrumReport:
    eigenvalues: list[tuple[float, float]]
    error_bounds: list[float]
    pure_imaginary_pairs: int
    negative_real: int
    positive_real: int
    near_zero: int
    tol: float
    precision: int
    expected_zero: int | None = None

    @property
    def has_pure_imaginary_pair(self) -> bool:
        return self.pure_imaginary_pairs >= 1

    def min_pair_real_part(self) -> float:
        """Smallest |Re| among eigenvalues with |Im| > tol (the candidate pair)."""
        cands = [abs(re) for re, im in self.eigenvalues if abs(im) > self.tol]
        return min(cands) if cands else math.inf

    def to_json(self) -> dict:
        return {
            "eigenvalues": [{"re": re, "im": im, "errorBound": e}
                            for (re, im), e in zip(self.eigenvalues, self.error_bounds)],
            "classification": {
                "pureImaginaryPairs": self.pure_imaginary_pairs,
                "negativeRealPart": self.negative_real,
                "positiveRealPart": self.positive_real,
                "nearZero": self.near_zero,
            },
            "expectedStructuralZeros": self.expected_zero,
            "tolerance": self.tol,
            "precisionDigits": self.precision,
        }


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def spectrum_of_matrix(A: Sequence[Sequence], tol: float | None = None, precision: int = 50,
                       zero_tol: float | None = None) -> SpectrumReport:
    """Eigenvalues at ``precision`` digits; tol defaults to 1e-30 relative to the spectral scale."""
    with mpmath.workdps(precision):
        M = mpmath.matrix([[_to_mpf(v) for v in row] for row in A])
        ev, vecs = mpmath.eig(M)
        scale = max([abs(e) for e in ev] + [mpmath.mpf(1)])
        t = float(tol) if tol is not None else float(scale * mpmath.mpf(10) ** -30)
        zt = float(zero_tol) if zero_tol is not None else t
        bounds = []
        for k, e in enumerate(ev):
            v = vecs[:, k]
            res = M * v - e * v
            bounds.append(float(mpmath.norm(res) / max(mpmath.norm(v), mpmath.mpf(10) ** -precision)))
        vals = [(float(mpmath.re(e)), float(mpmath.im(e))) for e in ev]
    pure = neg = pos = zero = 0
    for re, im in vals:
        if abs(re) < zt and abs(im) < zt:
            zero += 1
        elif abs(re) < t and abs(im) > t:
            pure += 1
        elif re < 0:
            neg += 1
        else:
            pos += 1
    return SpectrumReport(vals, bounds, pure // 2, neg, pos, zero, t, precision)


def spectrum(net: Network, w: WitnessPoint, tol: float | None = None, precision: int = 50,
             zero_tol: float | None = None) -> SpectrumReport:
    with mpmath.workdps(precision):
        kappa = [_to_mpf(k) for k in w.kappa]
        x = [_to_mpf(v) for v in w.x]
        J = mass_action_jacobian(net, kappa, x)
    rep = spectrum_of_matrix(J, tol, precision, zero_tol)
    rep.expected_zero = net.n_species - exact_rank(stoichiometric_matrix(net))
    return rep


def reduced_char_poly_at(net: Network, kappa: Sequence, x: Sequence) -> list[Fraction]:
    """Exact reduced characteristic polynomial (a_0 = 1 .. a_s) at a rational point."""
    J = mass_action_jacobian(net, [Fraction(k) for k in kappa], [Fraction(v) for v in x])
    full = numeric_char_poly(J)
    s = exact_rank(stoichiometric_matrix(net))
    if any(full[s + 1:]):
        raise ArithmeticError("low-order coefficients do not vanish")
    return full[: s + 1]


def pure_imaginary_divisor(coeffs: Sequence[Fraction]) -> Fraction | None:
    """Rational omega^2 > 0 with z^2 + omega^2 dividing the polynomial exactly, if any.

    Writes p(z) = P_e(z^2) + z P_o(z^2); z = i*omega is a root iff w = -omega^2
    is a common root of P_e and P_o.  The common rational roots come from the
    gcd, and divisibility is re-checked by exact polynomial division.
    """
    s = len(coeffs) - 1
    asc = [Fraction(c) for c in reversed(coeffs)]  # ascending powers of z
    even = [asc[k] for k in range(0, s + 1, 2)]
    odd = [asc[k] for k in range(1, s + 1, 2)]
    to_poly = lambda cs: flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator) for c in cs])
    g = to_poly(even).gcd(to_poly(odd))
    if g.degree() < 1:
        return None
    p = to_poly(asc)
    _, factors = g.factor()
    for f, _mult in factors:
        if f.degree() != 1:
            continue
        w0 = -f[0] / f[1]
        w0 = Fraction(int(w0.p), int(w0.q))
        if w0 < 0:
            omega2 = -w0
            divisor = to_poly([omega2, 0, 1])
            if p % divisor == 0:
                return omega2
    return None


def hurwitz_values(coeffs: Sequence) -> list:
    """Numeric det(H_1) .. det(H_s)."""
    s = len(coeffs) - 1
    zero = 0 * coeffs[0]
    return [det_laplace(hurwitz_entries(list(coeffs), i, zero), zero) for i in range(1, s + 1)]


# ---------------------------------------------------------------- motif pairs and phi

@dataclass
class MotifPair:
    """A network in motif-last normal form together with its reduction.

    ``full`` orders species X1, X2, X3 first and reactions ending with
    (Y -> y', y -> Y, Y -> y).  ``E`` lists the columns of ``E_reduced`` (with a
    zero appended for the removed reaction) followed by the motif cycle, so
    l = (l', l_m) with l_m last.
    """

    original: Network
    full: Network
    reduced: Network
    motif: Motif
    delta: int
    reordering: Reordering
    E_reduced: ExtremeMatrix
    E: ExtremeMatrix

    @cached_property
    def model_full(self) -> ConvexModel:
        return convex_model(self.full, self.E)

    @cached_property
    def model_reduced(self) -> ConvexModel:
        return convex_model(self.reduced, self.E_reduced)

    def h_from_original(self, h: Sequence) -> list:
        return [h[old] for old in self.reordering.species]

    def h_to_original(self, h: Sequence) -> list:
        out = [None] * len(h)
        for new, old in enumerate(self.reordering.species):
            out[old] = h[new]
        return out

    def reaction_to_original(self, j: int) -> int:
        return self.reordering.reactions[j]

    def l_from_columns(self, l: Sequence, columns: Sequence[Sequence[int]]) -> list:
        """Re-express l given against ``columns`` (indexed by original reactions) in pair order."""
        def norm(col):
            return tuple(col[self.reordering.reactions[j]] for j in range(self.full.n_reactions))

        index = {norm(c): k for k, c in enumerate(columns)}
        out = []
        for col in self.E.columns:
            if col not in index:
                raise ValueError("column sets differ")
            out.append(l[index[col]])
        return out

    def inclusion_identity(self) -> bool:
        """J'(h, l') = J(h, (l', 0)) entrywise, hence equal characteristic polynomials."""
        lm = f"l{self.E.m}"
        full, red = self.model_full, self.model_reduced
        J0 = full.J.substitute_many({lm: 0})
        same_J = all(a.to_table(red.table) == b
                     for ra, rb in zip(J0.entries, red.J.entries) for a, b in zip(ra, rb))
        p0 = full.charpoly.substitute_many({lm: 0}).to_table(red.table)
        return same_J and p0.coeffs == red.charpoly.coeffs

    def structure_holds(self) -> bool:
        E_full = extreme_rays(stoichiometric_matrix(self.full))
        ok, _ = verify_reduction_structure(E_full, self.E_reduced, (self.motif.forward, self.motif.backward))
        return ok


def motif_pair(net: Network, motif: Motif) -> MotifPair:
    report = check_assumptions(net, motif)
    if not report.all_pass:
        raise ValueError("assumptions A1-A5 do not hold for this motif")
    full, m, reo = reorder_motif_last(net, motif)
    reduced = remove_backward(full, m)
    E_red = extreme_rays(stoichiometric_matrix(reduced))
    r = full.n_reactions
    cols = [c + (0,) for c in E_red.columns]
    cyc = [0] * r
    cyc[m.forward] = cyc[m.backward] = 1
    cols.append(tuple(cyc))
    E_full = ExtremeMatrix(tuple(cols), exact_rank(stoichiometric_matrix(full)), r)
    return MotifPair(net, full, reduced, m, report.delta, reo, E_red, E_full)


@dataclass
class PhiResult:
    h_prime: list
    l_prime: list
    gamma1: Fraction
    gamma2: Fraction
    Lambda: Fraction
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def floats(self) -> list[float]:
        return [float(v) for v in self.h_prime]

    def to_json(self) -> dict:
        def q(v):
            if isinstance(v, QuadExt):
                return {"a": str(v.a), "b": str(v.b), "d": str(v.d), "approx": float(v)}
            return {"a": str(v), "approx": float(v)}

        return {
            "hPrime": [q(v) for v in self.h_prime],
            "lPrime": [str(v) for v in self.l_prime],
            "gamma1": str(self.gamma1),
            "gamma2": str(self.gamma2),
            "Lambda": str(self.Lambda),
            "problems": self.problems,
        }


def phi_map(pair: MotifPair, h: Sequence, l: Sequence) -> PhiResult:
    """The transport map (h, l) -> (h', l') in pair order, exact in Q(sqrt(gamma1)).

    The branch sqrt(gamma1) >= 0 is used throughout.
    """
    h = [Fraction(v) for v in h]
    l = [Fraction(v) for v in l]
    if len(h) != pair.full.n_species or len(l) != pair.E.m:
        raise ValueError("h or l has the wrong length")
    lp = l[:-1]
    lm = l[-1]
    L = [sum((c[j] * v for c, v in zip(pair.E_reduced.columns, lp)), Fraction(0))
         for j in range(pair.reduced.n_reactions)]
    Lp, Lf = L[-2], L[-1]  # fluxes of Y -> y' and y -> Y in the reduced network
    h1, h2, h3 = h[:3]
    Lam = (lm + Lf) * h1 + (lm + Lf) * h2 + (lm + Lp) * h3
    problems = []
    if pair.delta == 1:
        g2 = h2 * Lf + h3 * Lp
        g1 = Lam * Lam - 4 * h1 * (lm + Lf) * g2
    else:
        g2 = Lf * (h1 + h2)
        g1 = Lam * Lam - 4 * (Lp / Lf) * g2 * h3 * (lm + Lf)
    if g1 < 0:
        return PhiResult([], lp, g1, g2, Lam, ["gamma1 < 0: map undefined"])
    root = QuadExt.sqrt(g1)
    plus = root + Lam
    minus = -root + Lam
    if pair.delta == 1:
        hp = [minus / (2 * Lf), plus * h2 / (2 * g2), plus * h3 / (2 * g2)]
    else:
        hp = [plus * h1 / (2 * g2), plus * h2 / (2 * g2), minus / (2 * Lp)]
    hp = hp + [QuadExt(v, 0, g1) for v in h[3:]]
    for i, v in enumerate(hp):
        if v.sign() <= 0:
            problems.append(f"h'{i + 1} is not positive")
    return PhiResult(hp, lp, g1, g2, Lam, problems)


def transport_identities(pair: MotifPair, h: Sequence, l: Sequence, res: PhiResult) -> dict[str, bool]:
    """The defining equations of h'_1, h'_2, h'_3, checked exactly."""
    h = [Fraction(v) for v in h]
    lm = Fraction(l[-1])
    L = [sum((c[j] * Fraction(v) for c, v in zip(pair.E_reduced.columns, l[:-1])), Fraction(0))
         for j in range(pair.reduced.n_reactions)]
    Lp, Lf = L[-2], L[-1]
    a, b, c = res.h_prime[:3]
    out = {
        "sum": Lf * (a + b) + Lp * c == res.Lambda,
        "h1h3": a * c * Lf == (lm + Lf) * h[0] * h[2],
    }
    if pair.delta == 0:
        out["h2h3"] = b * c * Lf == (lm + Lf) * h[1] * h[2]
    else:
        out["h1h2"] = a * b * Lf == (lm + Lf) * h[0] * h[1]
    return out


def verify_charpoly_transport(pair: MotifPair, h: Sequence, l: Sequence) -> tuple[bool, PhiResult]:
    """p_G at (h, l) equals p_G' at phi(h, l), coefficientwise and exactly."""
    res = phi_map(pair, h, l)
    if not res.ok:
        return False, res
    full = pair.model_full
    red = pair.model_reduced
    point = {f"h{i + 1}": Fraction(v) for i, v in enumerate(h)}
    point.update({f"l{j + 1}": Fraction(v) for j, v in enumerate(l)})
    lhs = [c.eval(point) for c in full.charpoly.coeffs]
    d = res.gamma1
    values = {f"h{i + 1}": v for i, v in enumerate(res.h_prime)}
    values.update({f"l{j + 1}": QuadExt(v, 0, d) for j, v in enumerate(res.l_prime)})
    one = QuadExt(1, 0, d)
    rhs = [c.eval_generic(values, one) for c in red.charpoly.coeffs]
    return len(lhs) == len(rhs) and all(r == a for a, r in zip(lhs, rhs)), res


def random_positive(rng: random.Random, k: int, lo: int = 1, hi: int = 60) -> list[Fraction]:
    return [Fraction(rng.randint(lo, hi), rng.randint(lo, hi)) for _ in range(k)]


@dataclass
class TransportReport:
    draws: int
    agreed: int
    skipped: list[dict]

    @property
    def ok(self) -> bool:
        return self.agreed + len(self.skipped) == self.draws and self.agreed > 0 and not any(
            s["reason"] == "mismatch" for s in self.skipped)


def transport_trials(pair: MotifPair, draws: int, seed: int = 0) -> TransportReport:
    """Random exact checks; draws where phi is undefined are logged with the reason."""
    rng = random.Random(seed)
    agreed = 0
    skipped = []
    for _ in range(draws):
        h = random_positive(rng, pair.full.n_species)
        l = random_positive(rng, pair.E.m)
        ok, res = verify_charpoly_transport(pair, h, l)
        if ok:
            agreed += 1
        else:
            reason = "; ".join(res.problems) if res.problems else "mismatch"
            skipped.append({"h": [str(v) for v in h], "l": [str(v) for v in l], "reason": reason})
    return TransportReport(draws, agreed, skipped)


# ---------------------------------------------------------------- calcium image

def calcium_phi(t: Sequence[Fraction]) -> tuple[Fraction, Fraction, Fraction]:
    t1, t2, t3, t4, t5, t6 = t
    b1 = t1 + t2 + t3 + t4 + t5
    b2 = (t1 + t4 - t6) * t2 + (t1 + t4) * t3 + t1 * t4 + t4 * t5 + t4 * t6
    b3 = t1 * t2 * t4 + t1 * t3 * t4
    return b1, b2, b3


def calcium_t(h: Sequence, l: Sequence) -> list:
    h1, h2, h3, h4 = h
    l1, l2, l3 = l
    return [h1 * l1, h2 * (l2 + l3), h3 * (l2 + l3), h4 * l2, h1 * l3, h1 * l2]


def calcium_hl_from_t(t: Sequence[Fraction], h1: Fraction = Fraction(1)) -> tuple[list, list]:
    """A preimage (h, l) of t for a chosen h1 > 0."""
    t1, t2, t3, t4, t5, t6 = t
    l1, l2, l3 = t1 / h1, t6 / h1, t5 / h1
    return [h1, t2 / (l2 + l3), t3 / (l2 + l3), t4 / l2], [l1, l2, l3]


def in_P(b: Sequence[Fraction]) -> bool:
    b1, _, b3 = b
    return b1 > 0 and b3 > 0 and 27 * b3 < b1 ** 3


def in_P_prime(b: Sequence[Fraction]) -> bool:
    b1, b2, b3 = b
    return in_P(b) or (b1 > 0 and 27 * b3 == b1 ** 3 and 3 * b2 > b1 ** 2)


@dataclass
class MembershipReport:
    trials: int
    full_in_P: int
    reduced_in_P_prime: int
    reduced_boundary: int
    surjectivity_ok: int
    boundary_example: dict
    seed: int

    @property
    def ok(self) -> bool:
        return (self.full_in_P == self.trials and self.reduced_in_P_prime == self.trials
                and self.surjectivity_ok == self.trials
                and not self.boundary_example["inP"] and self.boundary_example["inPprime"])

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "fullInP": self.full_in_P,
            "reducedInPprime": self.reduced_in_P_prime,
            "reducedOnBoundary": self.reduced_boundary,
            "surjectivityRoundTrips": self.surjectivity_ok,
            "boundaryExample": self.boundary_example,
            "seed": self.seed,
        }


def calcium_image_membership(trials: int, seed: int = 0, reduced_model: ConvexModel | None = None) -> MembershipReport:
    """Sample the parametrizations of both calcium networks and test the image descriptions."""
    if trials < 1:
        raise ValueError("trials must be positive")
    from .fixtures import fixture

    rng = random.Random(seed)
    red = reduced_model or convex_model(fixture("calcium_reduced"))
    full_ok = red_ok = red_bd = surj = 0
    names = red.table.names
    for _ in range(trials):
        t = random_positive(rng, 6, 1, 1000)
        b = calcium_phi(t)
        full_ok += in_P(b)
        h1 = random_positive(rng, 1)[0]
        h, l = calcium_hl_from_t(t, h1)
        surj += calcium_t(h, l) == list(t)
        point = {n: Fraction(rng.randint(1, 1000), rng.randint(1, 1000)) for n in names}
        coeffs = red.charpoly.eval(point)[1:]
        red_ok += in_P_prime(coeffs)
        red_bd += (not in_P(coeffs)) and in_P_prime(coeffs)
    example = [Fraction(3), Fraction(4), Fraction(1)]
    bd = {"poly": "z^3 + 3*z^2 + 4*z + 1", "inP": in_P(example), "inPprime": in_P_prime(example)}
    return MembershipReport(trials, full_ok, red_ok, red_bd, surj, bd, seed)


# ---------------------------------------------------------------- irreversible Hopf search

def irreversible_steady_state(kappa: Sequence, E, F, J=1) -> list:
    """Steady state of the irreversible processive cycle with free E, F and cycle flux J.

    kappa = (k1, k3, k4, k6, k7, k8, k10); species E, F, S0, S1, S2, ES0, FS1, ES1, FS2.
    Every reaction of the single cycle carries the flux J.
    """
    k1, k3, k4, k6, k7, k8, k10 = kappa
    return [E, F, J / (k1 * E), J / (k4 * F), J / (k8 * F), J / k3, J / k6, J / k7, J / k10]


def conservation_basis(net: Network) -> list[list[Fraction]]:
    """Rows spanning the left kernel of N."""
    from .conecalc import nullspace

    return nullspace(stoichiometric_matrix(net).T)


def _charpoly_mp(A):
    """Faddeev-LeVerrier at the current mpmath precision."""
    n = len(A)
    M = mpmath.matrix(A)
    coeffs = [mpmath.mpf(1)]
    Mk = mpmath.zeros(n, n)
    for k in range(1, n + 1):
        Mk = M * Mk + coeffs[-1] * mpmath.eye(n)
        AM = M * Mk
        coeffs.append(-sum(AM[i, i] for i in range(n)) / k)
    return coeffs


@dataclass
class NewtonResult:
    x: list
    residual: float
    iterations: int
    converged: bool


def damped_newton_steady_state(net: Network, kappa: Sequence, x0: Sequence, totals: Sequence,
                               precision: int = 50, max_iter: int = 200) -> NewtonResult:
    """Solve f(x) = 0 with W x = totals by Newton steps halved until positive and decreasing.

    W is the conservation basis; the dependent rows of f are replaced by the
    conservation equations so the system is square and regular.
    """
    W = conservation_basis(net)
    N = stoichiometric_matrix(net)
    s = exact_rank(N)
    keep = []
    for i in range(net.n_species):
        if exact_rank(N[keep + [i], :]) > len(keep):
            keep.append(i)
        if len(keep) == s:
            break
    with mpmath.workdps(precision):
        kap = [_to_mpf(k) for k in kappa]
        T = [_to_mpf(t) for t in totals]
        Wm = [[_to_mpf(v) for v in row] for row in W]

        def F(x):
            f = mass_action_rhs(net, kap, x)
            return mpmath.matrix([f[i] for i in keep]
                                 + [sum(w * xi for w, xi in zip(row, x)) - t for row, t in zip(Wm, T)])

        def DF(x):
            Jf = mass_action_jacobian(net, kap, x)
            return mpmath.matrix([Jf[i] for i in keep] + Wm)

        x = [_to_mpf(v) for v in x0]
        res = mpmath.norm(F(x))
        tol = mpmath.mpf(10) ** (-(precision - 10))
        it = 0
        while res > tol and it < max_iter:
            it += 1
            step = mpmath.lu_solve(DF(x), -F(x))
            t = mpmath.mpf(1)
            while True:
                cand = [xi + t * step[i] for i, xi in enumerate(x)]
                if all(c > 0 for c in cand):
                    r = mpmath.norm(F(cand))
                    if r < res or t < mpmath.mpf(2) ** -60:
                        break
                t /= 2
            x, res = cand, r
        return NewtonResult(x, float(res), it, bool(res <= tol))


@dataclass
class HopfSearchResult:
    kappa: tuple
    x: list
    free: dict
    totals: list
    hurwitz_last: float
    bracket: tuple
    newton: NewtonResult | None = None
    spectrum: SpectrumReport | None = None

    def to_json(self) -> dict:
        return {
            "kappa": [str(k) for k in self.kappa],
            "x": [mpmath.nstr(v, 30) for v in self.x],
            "free": self.free,
            "totals": [mpmath.nstr(v, 30) for v in self.totals],
            "hurwitzLast": self.hurwitz_last,
            "bracket": list(self.bracket),
            "newton": None if self.newton is None else {
                "residual": self.newton.residual, "iterations": self.newton.iterations,
                "converged": self.newton.converged},
            "spectrum": None if self.spectrum is None else self.spectrum.to_json(),
        }


def search_irreversible_hopf(net: Network, kappa: Sequence, F: Fraction = Fraction(1, 20),
                             J: Fraction = Fraction(1), E_grid: Sequence | None = None,
                             precision: int = 50, bisections: int = 150) -> HopfSearchResult | None:
    """Locate a steady state where det(H_{s-1}) changes sign, then refine it in its class.

    F and the cycle flux J are held fixed while E is scanned on a geometric grid;
    the sign change of det(H_{s-1}) with det(H_1..H_{s-2}) > 0 is bisected to the
    crossing.  The totals there fix the compatibility class, and a damped Newton
    solve from a perturbed point re-converges to the crossing steady state.
    Returns None when the grid shows no sign change.
    """
    kq = [Fraction(k).limit_denominator(10 ** 6) for k in kappa]
    s = exact_rank(stoichiometric_matrix(net))
    grid = E_grid or [Fraction(1, 100) * Fraction(5, 4) ** k for k in range(60)]

    def dets(E):
        x = irreversible_steady_state(kq, E, F, J)
        return hurwitz_values(reduced_char_poly_at(net, kq, x))

    prev = None
    bracket = None
    for E in grid:
        vals = dets(E)
        ok = all(v > 0 for v in vals[: s - 2])
        if prev is not None and ok and prev[2] and (prev[1] > 0) != (vals[s - 2] > 0):
            bracket = (prev[0], E)
            break
        prev = (E, vals[s - 2], ok)
    if bracket is None:
        return None
    lo, hi = bracket
    sign_lo = dets(lo)[s - 2] > 0
    with mpmath.workdps(precision + 20):
        kmp = [_to_mpf(k) for k in kq]
        Fm, Jm = _to_mpf(F), _to_mpf(J)

        def g(E):
            x = irreversible_steady_state(kmp, E, Fm, Jm)
            cp = _charpoly_mp(mass_action_jacobian(net, kmp, x))[: s + 1]
            return hurwitz_values(cp)[s - 2]

        a, b = _to_mpf(lo), _to_mpf(hi)
        for _ in range(bisections):
            mid = (a + b) / 2
            if (g(mid) > 0) == sign_lo:
                a = mid
            else:
                b = mid
        E_star = (a + b) / 2
        x_star = irreversible_steady_state(kmp, E_star, Fm, Jm)
        W = conservation_basis(net)
        totals = [sum(_to_mpf(w) * xi for w, xi in zip(row, x_star)) for row in W]
        hl = float(g(E_star))
    # re-converge from a documented perturbation of the crossing point
    x0 = [v * (1 + mpmath.mpf((-1) ** i) / 20) for i, v in enumerate(x_star)]
    newton = damped_newton_steady_state(net, kq, x0, totals, precision)
    w = WitnessPoint(tuple(kq), tuple(newton.x))
    rep = spectrum(net, w, tol=1e-20, precision=precision, zero_tol=1e-20)
    return HopfSearchResult(tuple(kq), newton.x, {"E": mpmath.nstr(E_star, 30), "F": str(F), "J": str(J)},
                            totals, hl, (str(lo), str(hi)), newton, rep)
