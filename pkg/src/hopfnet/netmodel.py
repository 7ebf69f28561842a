"""Mass-action reaction networks: parsing, matrices, motifs and motif reduction.

Networks are written in a small line-oriented text format::

    species: S0, K, KS0, S1          # optional; fixes the species order
    S0 + K <=> KS0 @ k1, k2          # reversible: forward reaction first
    KS0 -> S1 + K @ k3
    0 -> 2*X1                        # "0" is the zero complex

Every value here is immutable; the operations are plain functions.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class ParseError(ValueError):
    """Raised for malformed network sources, with a 1-based position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Species:
    name: str
    index: int


@dataclass(frozen=True)
class Complex:
    """Sparse nonnegative combination of species, stored as sorted (index, coefficient) pairs."""

    terms: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        for _, c in self.terms:
            if c <= 0:
                raise ValueError("complex coefficients must be positive")

    @classmethod
    def from_dict(cls, coefficients: dict[int, int]) -> "Complex":
        return cls(tuple(sorted((i, c) for i, c in coefficients.items() if c)))

    def as_dict(self) -> dict[int, int]:
        return dict(self.terms)

    def __getitem__(self, index: int) -> int:
        for i, c in self.terms:
            if i == index:
                return c
        return 0

    def __contains__(self, index: int) -> bool:
        return any(i == index for i, _ in self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def species_indices(self) -> set[int]:
        return {i for i, _ in self.terms}

    def remap(self, old_to_new: dict[int, int]) -> "Complex":
        return Complex.from_dict({old_to_new[i]: c for i, c in self.terms})

    def format(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, c in self.terms:
            parts.append(names[i] if c == 1 else f"{c}*{names[i]}")
        return " + ".join(parts)


@dataclass(frozen=True)
class Reaction:
    reactant: Complex
    product: Complex
    label: str
    index: int

    def __post_init__(self):
        if self.reactant == self.product:
            raise ValueError(f"reaction {self.label}: reactant equals product")


@dataclass(frozen=True)
class Network:
    species: tuple[Species, ...]
    reactions: tuple[Reaction, ...]

    def __post_init__(self):
        names = [s.name for s in self.species]
        if len(set(names)) != len(names):
            raise ValueError("duplicate species names")
        labels = [r.label for r in self.reactions]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate reaction labels")
        for k, s in enumerate(self.species):
            if s.index != k:
                raise ValueError("species indices must be contiguous from 0")
        n = len(self.species)
        for k, r in enumerate(self.reactions):
            if r.index != k:
                raise ValueError("reaction indices must be contiguous from 0")
            for i in r.reactant.species_indices() | r.product.species_indices():
                if not 0 <= i < n:
                    raise ValueError(f"reaction {r.label} uses an undeclared species")

    @classmethod
    def build(
        cls,
        species: Sequence[str],
        reactions: Iterable[tuple[dict[str, int] | Complex, dict[str, int] | Complex, str]],
    ) -> "Network":
        """Construct from species names and (reactant, product, label) triples.

        Complexes may be given as name -> coefficient dicts.
        """
        index = {name: k for k, name in enumerate(species)}

        def as_complex(c):
            if isinstance(c, Complex):
                return c
            return Complex.from_dict({index[name]: v for name, v in c.items()})

        rx = tuple(
            Reaction(as_complex(a), as_complex(b), label, k)
            for k, (a, b, label) in enumerate(reactions)
        )
        return cls(tuple(Species(s, k) for k, s in enumerate(species)), rx)

    @property
    def n_species(self) -> int:
        return len(self.species)

    @property
    def n_reactions(self) -> int:
        return len(self.reactions)

    @property
    def species_names(self) -> list[str]:
        return [s.name for s in self.species]

    @property
    def labels(self) -> list[str]:
        return [r.label for r in self.reactions]

    def species_index(self, name: str) -> int:
        for s in self.species:
            if s.name == name:
                return s.index
        raise KeyError(name)

    def reaction_by_label(self, label: str) -> Reaction:
        for r in self.reactions:
            if r.label == label:
                return r
        raise KeyError(label)

    def with_reactions(self, reactions: Sequence[Reaction]) -> "Network":
        rx = tuple(Reaction(r.reactant, r.product, r.label, k) for k, r in enumerate(reactions))
        return Network(self.species, rx)

    def to_json(self) -> dict:
        names = self.species_names
        return {
            "species": names,
            "reactions": [
                {
                    "label": r.label,
                    "reactant": {names[i]: c for i, c in r.reactant.terms},
                    "product": {names[i]: c for i, c in r.product.terms},
                }
                for r in self.reactions
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Network":
        return cls.build(
            doc["species"],
            [(r["reactant"], r["product"], r["label"]) for r in doc["reactions"]],
        )

    def to_dsl(self) -> str:
        names = self.species_names
        lines = ["species: " + ", ".join(names)]
        for r in self.reactions:
            lines.append(f"{r.reactant.format(names)} -> {r.product.format(names)} @ {r.label}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- parsing

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TERM = re.compile(r"\s*(?:(\d+)\s*\*?\s*)?([A-Za-z_][A-Za-z0-9_]*)\s*$")


def _parse_complex(text: str, line: int, col: int, lookup) -> Complex:
    stripped = text.strip()
    if not stripped:
        raise ParseError("empty complex", line, col)
    if stripped == "0":
        return Complex()
    coeffs: dict[int, int] = {}
    offset = col
    for part in text.split("+"):
        m = _TERM.match(part)
        if not m or not part.strip():
            raise ParseError(f"cannot parse term {part.strip()!r}", line, offset + len(part) - len(part.lstrip()))
        c = int(m.group(1)) if m.group(1) else 1
        if c == 0:
            raise ParseError("zero stoichiometric coefficient", line, offset)
        idx = lookup(m.group(2), line, offset + part.index(m.group(2)))
        coeffs[idx] = coeffs.get(idx, 0) + c
        offset += len(part) + 1
    return Complex.from_dict(coeffs)


def parse_network(text: str) -> Network:
    """Parse the network text format.

    Species order is the ``species:`` header order when present, otherwise
    order of first appearance. Reversible arrows expand to two reactions,
    forward first. Missing labels become ``k<position>``.
    """
    declared: list[str] | None = None
    names: list[str] = []
    index: dict[str, int] = {}
    raw: list[tuple[Complex, Complex, str | None, int, int]] = []

    def lookup(name: str, line: int, col: int) -> int:
        if name not in index:
            if declared is not None:
                raise ParseError(f"undeclared species {name!r}", line, col)
            index[name] = len(names)
            names.append(name)
        return index[name]

    for lineno, full in enumerate(text.splitlines(), start=1):
        body = full.split("#", 1)[0]
        if not body.strip():
            continue
        head = body.lstrip()
        base_col = len(body) - len(head) + 1
        if head.startswith("species:") or head.startswith("species :"):
            if declared is not None:
                raise ParseError("duplicate species header", lineno, base_col)
            if raw:
                raise ParseError("species header must precede reactions", lineno, base_col)
            declared = []
            rest = head.split(":", 1)[1]
            for item in rest.split(","):
                name = item.strip()
                if not _IDENT.fullmatch(name):
                    raise ParseError(f"bad species name {name!r}", lineno, base_col + body.find(item))
                if name in index:
                    raise ParseError(f"duplicate species {name!r}", lineno, base_col + body.find(item))
                index[name] = len(names)
                names.append(name)
                declared.append(name)
            continue

        labels: list[str] = []
        if "@" in body:
            body, label_part = body.split("@", 1)
            labels = [s.strip() for s in label_part.split(",")]
            for lab in labels:
                if not _IDENT.fullmatch(lab):
                    raise ParseError(f"bad label {lab!r}", lineno, len(body) + 2)
        if "<=>" in body:
            lhs, rhs = body.split("<=>", 1)
            reversible = True
            arrow_len = 3
        elif "->" in body:
            lhs, rhs = body.split("->", 1)
            reversible = False
            arrow_len = 2
        else:
            raise ParseError("expected '->' or '<=>'", lineno, base_col)
        if "->" in rhs or "<=>" in rhs:
            raise ParseError("more than one arrow", lineno, len(lhs) + arrow_len + 1)
        a = _parse_complex(lhs, lineno, 1, lookup)
        b = _parse_complex(rhs, lineno, len(lhs) + arrow_len + 1, lookup)
        want = 2 if reversible else 1
        if labels and len(labels) != want:
            raise ParseError(f"expected {want} label(s), got {len(labels)}", lineno, len(body) + 2)
        if a == b:
            raise ParseError("reactant equals product (self-loop)", lineno, base_col)
        raw.append((a, b, labels[0] if labels else None, lineno, base_col))
        if reversible:
            raw.append((b, a, labels[1] if labels else None, lineno, base_col))

    seen: set[str] = set()
    reactions = []
    for k, (a, b, label, lineno, col) in enumerate(raw):
        label = label or f"k{k + 1}"
        if label in seen:
            raise ParseError(f"duplicate label {label!r}", lineno, col)
        seen.add(label)
        reactions.append(Reaction(a, b, label, k))
    return Network(tuple(Species(s, k) for k, s in enumerate(names)), tuple(reactions))


def load_network(path) -> Network:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


# ---------------------------------------------------------------- matrices

def _column_matrix(net: Network, pick) -> np.ndarray:
    out = np.zeros((net.n_species, net.n_reactions), dtype=np.int64)
    for j, r in enumerate(net.reactions):
        for i, c in pick(r).terms:
            out[i, j] += c
    return out


def reactant_matrix(net: Network) -> np.ndarray:
    return _column_matrix(net, lambda r: r.reactant)


def product_matrix(net: Network) -> np.ndarray:
    return _column_matrix(net, lambda r: r.product)


def stoichiometric_matrix(net: Network) -> np.ndarray:
    """Column j is product_j - reactant_j."""
    return product_matrix(net) - reactant_matrix(net)


def catalysts(net: Network) -> list[int]:
    """Species whose net change is zero in every reaction."""
    N = stoichiometric_matrix(net)
    return [i for i in range(net.n_species) if not N[i].any()]


# ---------------------------------------------------------------- motifs

@dataclass(frozen=True)
class Motif:
    """Reactions realising y -> Y, Y -> y and Y -> y'."""

    forward: int
    backward: int
    product: int
    intermediate: int
    y: Complex
    y_prime: Complex

    def reaction_indices(self) -> tuple[int, int, int]:
        return (self.forward, self.backward, self.product)


def find_motifs(net: Network) -> list[Motif]:
    """All triples y <=> Y -> y' with Y a single species of coefficient 1."""
    motifs = []
    rx = net.reactions
    for f in rx:
        if len(f.product.terms) != 1 or f.product.terms[0][1] != 1:
            continue
        Y = f.product.terms[0][0]
        if Y in f.reactant:
            continue
        for b in rx:
            if b.index == f.index or b.reactant != f.product or b.product != f.reactant:
                continue
            for p in rx:
                if p.index in (f.index, b.index) or p.reactant != f.product:
                    continue
                if Y in p.product or p.product == f.reactant:
                    continue
                motifs.append(Motif(f.index, b.index, p.index, Y, f.reactant, p.product))
    return motifs


@dataclass(frozen=True)
class Check:
    passed: bool
    reason: str

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class AssumptionReport:
    a1: Check
    a2: Check
    a3: Check
    a4: Check
    a5: Check
    delta: int | None = None
    x1: int | None = None
    x2: int | None = None

    @property
    def all_pass(self) -> bool:
        return all((self.a1, self.a2, self.a3, self.a4, self.a5))

    def to_json(self, net: Network | None = None) -> dict:
        name = (lambda i: net.species_names[i]) if net is not None else (lambda i: i)
        doc = {
            k: {"passed": getattr(self, k).passed, "reason": getattr(self, k).reason}
            for k in ("a1", "a2", "a3", "a4", "a5")
        }
        doc["allPass"] = self.all_pass
        doc["delta"] = self.delta
        doc["x1"] = None if self.x1 is None else name(self.x1)
        doc["x2"] = None if self.x2 is None else name(self.x2)
        return doc


def _check_with_roles(net: Network, m: Motif, x1: int, x2: int) -> AssumptionReport:
    names = net.species_names
    x3 = m.intermediate
    motif_idx = set(m.reaction_indices())
    outside = [r for r in net.reactions if r.index not in motif_idx]

    delta = m.y_prime[x2]
    if delta > 1:
        a1 = Check(False, f"{names[x2]} has coefficient {delta} in y'")
        return AssumptionReport(a1, Check(False, "A1 failed"), Check(False, "A1 failed"),
                                Check(False, "A1 failed"), Check(False, "A1 failed"))
    a1 = Check(True, f"X1={names[x1]}, X2={names[x2]}, X3={names[x3]}, delta={delta}")

    hits = [r.label for r in outside if x3 in r.reactant or x3 in r.product]
    a2 = Check(not hits, f"{names[x3]} also appears in {hits}" if hits else f"{names[x3]} only in motif")

    c = m.y_prime.as_dict()
    if delta:
        c.pop(x2)
    bad = [names[i] for i in (x1, x2, x3) if c.get(i)]
    a3 = Check(not bad, f"c involves {bad}" if bad else "c free of X1, X2, X3")

    hits = [r.label for r in outside if x1 in r.reactant]
    a4 = Check(not hits, f"{names[x1]} is a reactant of {hits}" if hits else f"{names[x1]} not a reactant outside motif")

    problems = []
    for r in outside:
        ra, rb = r.reactant[x2], r.product[x2]
        if not (ra or rb):
            continue
        if ra > 1 or rb > 1:
            problems.append(f"{r.label}: {names[x2]} with coefficient >= 2")
            continue
        if delta == 1:
            if ra != rb:
                problems.append(f"{r.label}: {names[x2]} not a catalyst")
            elif x1 in r.product:
                problems.append(f"{r.label}: {names[x1]} in product")
        elif ra:
            problems.append(f"{r.label}: {names[x2]} is a reactant")
    a5 = Check(not problems, "; ".join(problems) if problems else "X2 conditions hold")
    return AssumptionReport(a1, a2, a3, a4, a5, delta, x1, x2)


def check_assumptions(net: Network, m: Motif) -> AssumptionReport:
    """Evaluate assumptions A1-A5 for the motif.

    When y' contains neither reactant species both role assignments are
    tried (declared order first) and the first fully passing one is kept.
    """
    names = net.species_names
    terms = m.y.terms
    if len(terms) != 2 or any(c != 1 for _, c in terms):
        fail = Check(False, f"y = {m.y.format(names)} is not X1 + X2 with distinct species")
        skip = Check(False, "A1 failed")
        return AssumptionReport(fail, skip, skip, skip, skip)
    s, t = terms[0][0], terms[1][0]
    in_prime = [i for i in (s, t) if i in m.y_prime]
    if len(in_prime) == 2:
        fail = Check(False, "y' contains both species of y")
        skip = Check(False, "A1 failed")
        return AssumptionReport(fail, skip, skip, skip, skip)
    if in_prime:
        x2 = in_prime[0]
        x1 = t if x2 == s else s
        return _check_with_roles(net, m, x1, x2)
    first = _check_with_roles(net, m, s, t)
    if first.all_pass:
        return first
    second = _check_with_roles(net, m, t, s)
    return second if second.all_pass else first


def remove_backward(net: Network, m: Motif) -> Network:
    return net.with_reactions([r for r in net.reactions if r.index != m.backward])


def insert_reaction(net: Network, reaction: Reaction, index: int) -> Network:
    rx = list(net.reactions)
    rx.insert(index, reaction)
    return net.with_reactions(rx)


def permute(net: Network, species_perm: Sequence[int], reaction_perm: Sequence[int]) -> Network:
    """New network whose i-th species is old ``species_perm[i]`` (same for reactions)."""
    old_to_new = {old: new for new, old in enumerate(species_perm)}
    species = tuple(Species(net.species[old].name, new) for new, old in enumerate(species_perm))
    rx = tuple(
        Reaction(net.reactions[old].reactant.remap(old_to_new),
                 net.reactions[old].product.remap(old_to_new),
                 net.reactions[old].label, new)
        for new, old in enumerate(reaction_perm)
    )
    return Network(species, rx)


@dataclass(frozen=True)
class Reordering:
    species: tuple[int, ...]
    reactions: tuple[int, ...]

    def row_matrix(self) -> np.ndarray:
        P = np.zeros((len(self.species),) * 2, dtype=np.int64)
        for new, old in enumerate(self.species):
            P[new, old] = 1
        return P

    def column_matrix(self) -> np.ndarray:
        P = np.zeros((len(self.reactions),) * 2, dtype=np.int64)
        for new, old in enumerate(self.reactions):
            P[old, new] = 1
        return P


def reorder_motif_last(net: Network, m: Motif) -> tuple[Network, Motif, Reordering]:
    """Put X1, X2, X3 first among species and (Y -> y', y -> Y, Y -> y) last among reactions."""
    report = check_assumptions(net, m)
    if not report.a1:
        raise ValueError(f"motif does not have the X1 + X2 <=> X3 form: {report.a1.reason}")
    head = [report.x1, report.x2, m.intermediate]
    species_perm = head + [i for i in range(net.n_species) if i not in head]
    tail = [m.product, m.forward, m.backward]
    reaction_perm = [j for j in range(net.n_reactions) if j not in tail] + tail
    out = permute(net, species_perm, reaction_perm)
    r = out.n_reactions
    motif = Motif(r - 2, r - 1, r - 3, 2,
                  out.reactions[r - 2].reactant, out.reactions[r - 3].product)
    return out, motif, Reordering(tuple(species_perm), tuple(reaction_perm))


def motif_by_label(net: Network, label: str) -> Motif:
    """Motif whose forward, backward or product reaction carries ``label``."""
    idx = net.reaction_by_label(label).index
    hits = [m for m in find_motifs(net) if idx in m.reaction_indices()]
    if not hits:
        raise KeyError(f"no motif uses reaction {label}")
    backward = [m for m in hits if m.backward == idx]
    return (backward or hits)[0]
