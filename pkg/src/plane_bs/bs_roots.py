"""Topological roots of the Bernstein-Sato polynomial read off a resolution graph."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

from .curve_input import NumericalSemigroup, PuiseuxPairs, as_chars, as_pairs, pairs_to_semigroup
from .forms_residues import (
    Chain,
    FormExponent,
    InvariantViolation,
    NotAttainable,
    NotRupture,
    _assemble,
    _directions,
    check_attainable,
    curvette_power_case,
    find_maximal_admissible_chain,
    normalized_candidates,
    residues,
    site_semigroup,
)
from .resolution_graph import DualGraph


EPS_ZERO = "eps-zero"
THREE_NONINTEGERS = "three-nonintegers"
NON_EXCEPTIONAL = "non-exceptional"


@dataclass(frozen=True)
class Source:
    divisor: int | None
    v: int | None
    criterion: str
    note: str = ""


@dataclass
class RootEntry:
    root: Fraction
    multiplicity: int
    sources: list[Source] = field(default_factory=list)

    def to_dict(self, g: DualGraph | None = None) -> dict:
        def name(x):
            if x is None:
                return None
            return g.name(x) if g is not None else x

        return {
            "root": _q(self.root),
            "multiplicity": self.multiplicity,
            "sources": [
                {"divisor": name(s.divisor), "v": s.v, "criterion": s.criterion, **({"note": s.note} if s.note else {})}
                for s in self.sources
            ],
        }


@dataclass
class Unclassified:
    divisor: int
    v: int
    candidate: Fraction
    nonintegral: int


@dataclass
class RootMultiset:
    entries: list[RootEntry]
    diagnostics: list[Unclassified] = field(default_factory=list)

    def as_dict(self) -> dict[Fraction, int]:
        return {e.root: e.multiplicity for e in self.entries}

    def values(self) -> set[Fraction]:
        return {e.root for e in self.entries}

    def get(self, root: Fraction) -> RootEntry | None:
        for e in self.entries:
            if e.root == root:
                return e
        return None

    def by_divisor(self) -> dict[int | None, list[Fraction]]:
        out: dict[int | None, list[Fraction]] = {}
        for e in self.entries:
            for s in e.sources:
                out.setdefault(s.divisor, []).append(e.root)
        return out


def _q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def _merge(found: list[tuple[Fraction, int, Source]], diagnostics=None) -> RootMultiset:
    table: dict[Fraction, RootEntry] = {}
    for root, mult, src in found:
        e = table.setdefault(root, RootEntry(root, mult))
        e.multiplicity = max(e.multiplicity, mult)
        if src not in e.sources:
            e.sources.append(src)
    entries = sorted(table.values(), key=lambda e: -e.root)
    return RootMultiset(entries, diagnostics or [])


# ---------------------------------------------------------------------------
# Per-divisor classification


def attainable_values(g: DualGraph, i: int) -> list[int]:
    if g.is_arrowhead(i) or not g.is_rupture(i):
        raise NotRupture(f"{g.name(i)} is not a rupture vertex")
    return site_semigroup(g, i).elements_below(g.N[i])


@dataclass
class _SlotRule:
    N: int
    can_vanish: bool


def _slot_rules(g: DualGraph, i: int) -> list[_SlotRule]:
    key = ("slot-rules", i)
    if key not in g._cache:
        curvette_power = curvette_power_case(g, i)
        rules = []
        for slot in g.slots(i):
            if slot.node is None:
                rules.append(_SlotRule(0, False))
            elif slot.role in ("i1", "i2"):
                rules.append(_SlotRule(g.N_of(slot.node), g.has_arrowhead_towards(i, slot.node)))
            else:
                rules.append(_SlotRule(g.N_of(slot.node), not curvette_power))
        g._cache[key] = rules
    return g._cache[key]


def _decide(g: DualGraph, i: int, v: int) -> tuple[int, int, list[int]]:
    """(multiplicity, non-integral slot count, vanishing-capable slots), integer arithmetic only."""
    K = g.k[i] + v
    Ni = g.N[i]
    nonint = 0
    zeros = []
    for d, rule in enumerate(_slot_rules(g, i)):
        if (rule.N * K) % Ni:
            nonint += 1
        elif rule.can_vanish:
            zeros.append(d)
    if zeros:
        return 2, nonint, zeros
    if nonint >= 3:
        return 1, nonint, zeros
    return 0, nonint, zeros


@dataclass
class RootClassification:
    vertex: int
    v: int
    root: Fraction
    multiplicity: int
    criterion: str | None
    witness: FormExponent
    eps: tuple[Fraction, ...]
    second_witness: FormExponent
    second_eps: tuple[Fraction, ...]

    def to_dict(self, g: DualGraph) -> dict:
        return {
            "divisor": g.name(self.vertex),
            "v": self.v,
            "root": _q(self.root),
            "multiplicity": self.multiplicity,
            "criterion": self.criterion,
            "witness": self.witness.describe(g),
            "eps": [_q(e) for e in self.eps],
        }


def _witness_forms(g: DualGraph, i: int, v: int) -> list[FormExponent]:
    dirs = _directions(g, i)
    return [_assemble(g, dirs, A, gamma) for A, gamma in normalized_candidates(g, i, v)]


def classify_root(g: DualGraph, i: int, v: int) -> RootClassification:
    check_attainable(g, i, v)
    mult, nonint, zero_slots = _decide(g, i, v)
    forms = _witness_forms(g, i, v)
    if not forms:
        raise InvariantViolation(f"no normalized form at {g.name(i)} with v = {v}")
    first, last = forms[0], forms[-1]
    outcomes = []
    for f in (first, last):
        res = residues(g, f, i)
        if f.valuation(g, i) != v:
            raise InvariantViolation("witness has the wrong valuation")
        zeros = res.zero_slots()
        if zeros:
            outcomes.append((2, res))
        elif res.nonintegral_count() >= 3:
            outcomes.append((1, res))
        else:
            outcomes.append((0, res))
    if outcomes[0][0] != outcomes[1][0]:
        raise InvariantViolation(f"witnesses disagree at {g.name(i)}, v = {v}")
    if outcomes[0][0] != mult:
        raise InvariantViolation(
            f"witness search gives multiplicity {outcomes[0][0]} but the slot rule gives {mult} "
            f"at {g.name(i)}, v = {v}"
        )
    if mult == 2 and sorted(outcomes[0][1].zero_slots()) != zero_slots:
        raise InvariantViolation(f"vanishing slots differ from the rule at {g.name(i)}, v = {v}")
    criterion = {2: EPS_ZERO, 1: THREE_NONINTEGERS, 0: None}[mult]
    return RootClassification(
        i, v, outcomes[0][1].sigma, mult, criterion, first, outcomes[0][1].eps, last, outcomes[1][1].eps
    )


def certificate(g: DualGraph, src: Source) -> dict:
    """Evidence for one source of a root: an admissible chain or a residue snapshot."""
    if src.criterion == NON_EXCEPTIONAL:
        return {"kind": "non-exceptional", "note": src.note}
    if src.divisor is not None and src.divisor < g.V and g.r(src.divisor) == 2:
        chain = trivial_chain(g, src.v)
        return {"kind": "chain", **chain.describe(g)}
    cls = classify_root(g, src.divisor, src.v)
    if src.criterion == EPS_ZERO:
        chain = find_maximal_admissible_chain(g, cls.witness, src.divisor)
        return {"kind": "chain", **chain.describe(g)}
    return {"kind": "residues", "form": cls.witness.describe(g), "eps": [_q(e) for e in cls.eps]}


# ---------------------------------------------------------------------------
# The monomial case x^a y^b


def is_monomial_curve(g: DualGraph) -> bool:
    return g.V == 1 and g.A == 2


def trivial_chain(g: DualGraph, v: int) -> Chain:
    """Arrowhead, first blow-up, arrowhead: both residues vanish for a suitable monomial."""
    a0, a1 = g.arrowheads
    Na, Nb = g.power(a0), g.power(a1)
    for j in range(1, Na + 1):
        l = v + 2 - j
        if 1 <= l <= Nb and Fraction(j, Na) == Fraction(l, Nb):
            form = FormExponent.of({a0: j - 1, a1: l - 1})
            res = residues(g, form, 0)
            if sorted(res.eps[2:]) != [0, 0]:
                raise InvariantViolation("monomial chain without vanishing residues")
            return Chain([a0, 0, a1], form, degenerate=True)
    raise InvariantViolation(f"no monomial chain for v = {v}")


def _monomial_double_roots(g: DualGraph) -> list[tuple[Fraction, int, Source]]:
    a0, a1 = g.arrowheads
    Na, Nb = g.power(a0), g.power(a1)
    out = []
    for j in range(1, Na + 1):
        t = Fraction(j, Na)
        if (t * Nb).denominator == 1:
            l = int(t * Nb)
            out.append((-t, 2, Source(0, j + l - 2, EPS_ZERO, "monomial curve")))
    return out


# ---------------------------------------------------------------------------
# Assembly


def lct(g: DualGraph) -> Fraction:
    values = [Fraction(g.k[i], g.N[i]) for i in g.exceptional]
    values += [Fraction(1, g.power(a)) for a in g.arrowheads]
    return min(values)


def non_exceptional_roots(g: DualGraph) -> RootMultiset:
    threshold = lct(g)
    found = []
    for a in g.arrowheads:
        Na = g.power(a)
        for j in range(1, Na + 1):
            note = ""
            if j == 1 and Na > 1 and Fraction(1, Na) == threshold:
                note = "may be double: equals minus the log canonical threshold"
            found.append((Fraction(-j, Na), 1, Source(a, None, NON_EXCEPTIONAL, note)))
    return _merge(found)


def topological_roots(g: DualGraph, diagnostics: bool = True) -> RootMultiset:
    found: list[tuple[Fraction, int, Source]] = []
    diag: list[Unclassified] = []
    for i in g.ruptures():
        Ni, ki = g.N[i], g.k[i]
        for v in attainable_values(g, i):
            mult, nonint, _ = _decide(g, i, v)
            root = Fraction(-(ki + v), Ni)
            if mult:
                crit = EPS_ZERO if mult == 2 else THREE_NONINTEGERS
                found.append((root, mult, Source(i, v, crit)))
            elif diagnostics:
                diag.append(Unclassified(i, v, root, nonint))
    for e in non_exceptional_roots(g).entries:
        for s in e.sources:
            found.append((e.root, 1, s))
    if is_monomial_curve(g):
        found.extend(_monomial_double_roots(g))
    return _merge(found, diag)


# ---------------------------------------------------------------------------
# Closed form for branches


def roots_irreducible_closed_form(p) -> RootMultiset:
    """Roots of an irreducible germ from its Puiseux pairs alone."""
    pairs: PuiseuxPairs = as_pairs(p)
    chars = as_chars(pairs)
    sg = pairs_to_semigroup(pairs)
    betabar = sg.generators
    ns = chars.ns
    ms = chars.ms
    e = chars.e
    found: list[tuple[Fraction, int, Source]] = []
    for i in range(1, chars.g + 1):
        n_i = ns[i - 1]
        bound = n_i * betabar[i]
        prefix = prod(ns[:i])
        reduced = [b // e[i] for b in betabar[: i + 1]]
        gamma_i = NumericalSemigroup.from_generators(reduced)
        for nu in gamma_i.elements_below(bound):
            s = Fraction(-(ms[i - 1] + prefix + nu), bound)
            if (e[i - 1] * s).denominator == 1 or (betabar[i] * s).denominator == 1:
                continue
            found.append((s, 1, Source(None, nu, "closed-form", f"pair {i}")))
    found.append((Fraction(-1), 1, Source(None, None, NON_EXCEPTIONAL)))
    return _merge(found)
