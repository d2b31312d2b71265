"""Monomial differential forms on a resolution and their residue numbers.

A form ``g dx`` is encoded by the exponents of ``g`` as a product of curvettes
at vertices with ``r != 2`` and of the branches themselves (arrowheads).  At a
vertex ``E_i`` it has a candidate pole ``sigma_i = -(k_i + v_i(g)) / N_i`` and one
residue number per adjacency slot.

Normalization works in "direction budgets": for each slot ``d`` of ``E_i`` the
sites lying beyond that slot contribute a non-negative integer ``A_d``, and every
residue number at ``E_i`` depends only on its own budget and on ``v_i(g)``.  The
budgets compatible with the bounds form a small box, which is searched
exhaustively.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Iterable, Iterator, Mapping

from .curve_input import NumericalSemigroup
from .resolution_graph import (
    DualGraph,
    InvariantViolation,
    NotExceptional,
    Slot,
    neighbor_profile,
)


class NotRupture(ValueError):
    pass


class NotAttainable(ValueError):
    pass


class NoVanishingResidue(ValueError):
    pass


class InvalidForm(ValueError):
    pass


# ---------------------------------------------------------------------------
# Forms


@dataclass(frozen=True)
class FormExponent:
    """Exponents of the curvette or branch factors of ``g``, keyed by node id."""

    items: tuple[tuple[int, int], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[int, int] | Iterable[tuple[int, int]] = ()) -> "FormExponent":
        pairs = mapping.items() if isinstance(mapping, Mapping) else mapping
        acc: dict[int, int] = {}
        for site, e in pairs:
            if e < 0:
                raise InvalidForm(f"negative exponent {e} at site {site}")
            if e:
                acc[site] = acc.get(site, 0) + e
        return cls(tuple(sorted(acc.items())))

    def get(self, site: int) -> int:
        for s, e in self.items:
            if s == site:
                return e
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(self.items)

    def check(self, g: DualGraph) -> None:
        for s, _ in self.items:
            if s < 0 or s >= g.V + g.A:
                raise InvalidForm(f"site {s} does not exist")
            if s < g.V and g.r(s) == 2:
                raise InvalidForm(f"{g.name(s)} has r = 2 and carries no curvette factor")

    def valuation(self, g: DualGraph, at: int) -> int:
        return sum(e * g.site_valuation(at, s) for s, e in self.items)

    def describe(self, g: DualGraph) -> dict[str, int]:
        return {g.name(s): e for s, e in self.items}


DX = FormExponent()


@dataclass(frozen=True)
class ResidueVector:
    vertex: int
    sigma: Fraction
    slots: tuple[Slot, ...]
    eps: tuple[Fraction, ...]
    gamma: int

    def zero_slots(self) -> list[int]:
        return [idx for idx, e in enumerate(self.eps) if e == 0]

    def nonintegral_count(self) -> int:
        return sum(1 for e in self.eps if e.denominator != 1)


def sigma(g: DualGraph, form: FormExponent, i: int) -> Fraction:
    if g.is_arrowhead(i):
        raise NotExceptional(f"{g.name(i)} is not exceptional")
    return Fraction(-(g.k[i] + form.valuation(g, i)), g.N[i])


def residues(g: DualGraph, form: FormExponent, i: int) -> ResidueVector:
    form.check(g)
    s = sigma(g, form, i)
    slots = tuple(g.slots(i))
    eps = []
    for slot in slots:
        w = slot.node
        v_w = 0 if w is None else form.valuation(g, w)
        eps.append(g.N_of(w) * s + g.k_of(w) + v_w)
    gamma = form.get(i) if g.r(i) != 2 else 0
    if sum(eps) + gamma != len(slots) - 2:
        raise InvariantViolation(f"residue sum identity fails at {g.name(i)}")
    return ResidueVector(i, s, slots, tuple(eps), gamma)


# ---------------------------------------------------------------------------
# Direction budgets


@dataclass
class _Directions:
    """Per-vertex data for the budget coordinates of all slots."""

    vertex: int
    slots: list[Slot]
    sites: list[list[int]]
    alpha: list[dict[int, int]]
    semigroups: list[NumericalSemigroup | None]
    scale: list[int]
    offset: list[int]
    has_arrow: list[bool]
    n_g: int
    mbar_g: int


def _directions(g: DualGraph, i: int) -> _Directions:
    key = ("directions", i)
    if key in g._cache:
        return g._cache[key]
    prof = neighbor_profile(g, i)
    slots = g.slots(i)
    n, mb = prof.n_g, prof.mbar_g
    scale, offset = [], []
    for slot in slots:
        if slot.role == "i1":
            scale.append(n)
            offset.append(prof.a_g)
        elif slot.role == "i2":
            scale.append(mb)
            offset.append(prof.side2_factor)
        else:
            scale.append(1)
            offset.append(prof.outer[slot.node][1])
    all_sites = g.sites()
    sites: list[list[int]] = [[] for _ in slots]
    alpha: list[dict[int, int]] = [dict() for _ in slots]
    for s in all_sites:
        if s == i:
            continue
        towards = g.direction(i, s)
        for d, slot in enumerate(slots):
            if slot.node is None:
                continue
            value = scale[d] * g.site_valuation(slot.node, s) - offset[d] * g.site_valuation(i, s)
            if slot.node == towards:
                if value <= 0:
                    raise InvariantViolation(f"non-positive budget of {g.name(s)} at {g.name(i)}")
                sites[d].append(s)
                alpha[d][s] = value
            elif value != 0:
                raise InvariantViolation(f"{g.name(s)} leaks into another direction at {g.name(i)}")
    semigroups = [
        NumericalSemigroup.from_generators(sorted(set(a.values()))) if a else None for a in alpha
    ]
    has_arrow = [g.has_arrowhead_towards(i, slot.node) for slot in slots]
    out = _Directions(i, slots, sites, alpha, semigroups, scale, offset, has_arrow, n, mb)
    g._cache[key] = out
    return out


def budgets(g: DualGraph, form: FormExponent, i: int) -> list[int]:
    """Direction budgets ``A_d`` of ``form`` at ``E_i``."""
    dirs = _directions(g, i)
    out = []
    for d, slot in enumerate(dirs.slots):
        if slot.node is None:
            out.append(0)
        else:
            v_i = form.valuation(g, i)
            out.append(dirs.scale[d] * form.valuation(g, slot.node) - dirs.offset[d] * v_i)
    return out


def _eps_of_budget(g: DualGraph, dirs: _Directions, d: int, budget: int, v: int) -> Fraction | None:
    """Residue number of slot ``d`` given its budget and ``v_i``; None if not integral."""
    slot = dirs.slots[d]
    if slot.node is None:
        return Fraction(1)
    i = dirs.vertex
    num = budget + dirs.offset[d] * v
    if num % dirs.scale[d]:
        return None
    s = Fraction(-(g.k[i] + v), g.N[i])
    return g.N_of(slot.node) * s + g.k_of(slot.node) + num // dirs.scale[d]


def _budget_window(g: DualGraph, dirs: _Directions, d: int, v: int, lo: Fraction, hi: Fraction) -> list[int]:
    """Budgets of slot ``d`` whose residue number lies in ``[lo, hi]``."""
    slot = dirs.slots[d]
    if slot.node is None:
        return [0]
    i = dirs.vertex
    s = Fraction(-(g.k[i] + v), g.N[i])
    base = g.N_of(slot.node) * s + g.k_of(slot.node)
    sc, off = dirs.scale[d], dirs.offset[d]
    # eps = base + (budget + off*v)/sc
    low = max(0, ceil((lo - base) * sc - off * v))
    high = floor((hi - base) * sc - off * v)
    out = []
    for budget in range(low, high + 1):
        if (budget + off * v) % sc == 0:
            out.append(budget)
    return out


def _in_semigroup(dirs: _Directions, d: int, budget: int) -> bool:
    if budget == 0:
        return True
    sg = dirs.semigroups[d]
    return sg is not None and sg.contains(budget)


def _realize(dirs: _Directions, d: int, budget: int) -> dict[int, int]:
    """Deterministic decomposition of a budget into site exponents."""
    out: dict[int, int] = {}
    if budget == 0:
        return out
    sg = dirs.semigroups[d]
    order = sorted(dirs.sites[d], key=lambda s: (-dirs.alpha[d][s], s))
    rest = budget
    while rest:
        for s in order:
            a = dirs.alpha[d][s]
            if a <= rest and (rest - a == 0 or sg.contains(rest - a)):
                out[s] = out.get(s, 0) + 1
                rest -= a
                break
        else:
            raise InvariantViolation("budget not realizable by sites")
    return out


def _gamma_for(dirs: _Directions, v: int, A: list[int]) -> int | None:
    n, mb = dirs.n_g, dirs.mbar_g
    total = v
    for d, slot in enumerate(dirs.slots):
        if slot.role == "i1":
            total -= mb * A[d]
        elif slot.role == "i2":
            total -= n * A[d]
    if total % (n * mb):
        return None
    rest = total // (n * mb) - sum(A[d] for d, slot in enumerate(dirs.slots) if slot.role == "j")
    return rest if rest >= 0 else None




def _assemble(g: DualGraph, dirs: _Directions, A: list[int], gamma: int, keep: dict[int, int] | None = None, keep_dir: int | None = None) -> FormExponent:
    exps: dict[int, int] = {}
    for d in range(len(dirs.slots)):
        if d == keep_dir:
            continue
        for s, e in _realize(dirs, d, A[d]).items():
            exps[s] = exps.get(s, 0) + e
    if keep:
        for s, e in keep.items():
            exps[s] = exps.get(s, 0) + e
    if gamma:
        exps[dirs.vertex] = exps.get(dirs.vertex, 0) + gamma
    return FormExponent.of(exps)


# ---------------------------------------------------------------------------
# Closed formulas in budget coordinates


def residues_closed_form(g: DualGraph, form: FormExponent, i: int) -> ResidueVector:
    """Residue numbers from the valuation profile and direction budgets only.

    Uses ``sigma = -(k_i + v_i)/N_i`` with ``k_i``, ``v_i`` and ``N_i`` rebuilt from the
    profile invariants and budgets; no multiplicity of a neighbouring vertex is read.
    """
    form.check(g)
    prof = neighbor_profile(g, i)
    dirs = _directions(g, i)
    n, mb = prof.n_g, prof.mbar_g
    A = [0] * len(dirs.slots)
    B = [0] * len(dirs.slots)
    for d, slot in enumerate(dirs.slots):
        for s in dirs.sites[d]:
            A[d] += form.get(s) * dirs.alpha[d][s]
            if g.is_arrowhead(s):
                B[d] += g.power(s) * dirs.alpha[d][s]
    gamma = form.get(i) if g.r(i) != 2 else 0
    roles = [slot.role for slot in dirs.slots]

    def combine(vec, extra):
        total = 0
        for d, role in enumerate(roles):
            if role == "i1":
                total += mb * vec[d]
            elif role == "i2":
                total += n * vec[d]
            else:
                total += n * mb * vec[d]
        return total + n * mb * extra

    v_i = combine(A, gamma)
    N_i = combine(B, 0)
    k_i = prof.n_prefix * n + prof.m_g
    s = Fraction(-(k_i + v_i), N_i)
    const2 = prof.m_prev + prof.n_prefix - prof.n_prev * prof.mbar_prev
    eps = []
    for d, role in enumerate(roles):
        if dirs.slots[d].node is None:
            eps.append(Fraction(1))
        elif role == "i1":
            eps.append(Fraction(A[d] + 1, n) + Fraction(B[d], n) * s)
        elif role == "i2":
            eps.append(Fraction(A[d] + const2, mb) + Fraction(B[d], mb) * s)
        else:
            eps.append(A[d] + 1 + B[d] * s)
    if sum(eps) + gamma != len(roles) - 2:
        raise InvariantViolation(f"closed-form residue sum identity fails at {g.name(i)}")
    return ResidueVector(i, s, tuple(dirs.slots), tuple(eps), gamma)


# ---------------------------------------------------------------------------
# The bound pattern and normalization


def curvette_power_case(g: DualGraph, i: int) -> bool:
    """Whether ``N`` at ``E_i`` and its two special neighbours is a multiple of the curvette data."""
    if g.is_arrowhead(i) or not g.satellite[i] or g.r(i) != 3:
        return False
    prof = neighbor_profile(g, i)
    ci, c1, c2 = prof.curvette_N
    if g.N[i] % ci:
        return False
    lam = g.N[i] // ci
    return g.N[g.i1[i]] == lam * c1 and g.N_of(g.i2[i]) == lam * c2


def pattern_violations(g: DualGraph, i: int, eps: Iterable[Fraction]) -> list[str]:
    """Departures of ``eps`` from the normalized bound pattern at ``E_i``."""
    out = []
    slots = g.slots(i)
    r = g.r(i)
    curvette_power = curvette_power_case(g, i)
    for slot, e in zip(slots, eps):
        where = f"{g.name(i)}:{slot.role}:{g.name(slot.node)}"
        if slot.node is None:
            if e != 1:
                out.append(f"{where} zero slot must be 1")
            continue
        if e < -1 or e > 1:
            out.append(f"{where} outside [-1,1]")
        if e == -1 and not (r in (1, 2) or (r == 3 and g.satellite[i] and curvette_power and slot.role == "j")):
            out.append(f"{where} equals -1")
        if e == 1 and (slot.role == "j" or g.has_arrowhead_towards(i, slot.node)):
            out.append(f"{where} equals 1")
    return out


def admissible_violations(g: DualGraph, i: int, eps: Iterable[Fraction]) -> list[str]:
    """Departures from the chain bounds: ``-1 < eps <= 1`` with 1 only on free sides 1 and 2."""
    out = []
    for slot, e in zip(g.slots(i), eps):
        where = f"{g.name(i)}:{slot.role}:{g.name(slot.node)}"
        if slot.node is None:
            continue
        if e <= -1 or e > 1:
            out.append(f"{where} outside (-1,1]")
        if e == 1 and (slot.role == "j" or g.has_arrowhead_towards(i, slot.node)):
            out.append(f"{where} equals 1")
    return out


def _candidates(
    g: DualGraph,
    i: int,
    v: int,
    strict_lower: bool,
    fixed: tuple[int, int] | None = None,
) -> Iterator[tuple[list[int], int]]:
    """Budget vectors and ``gamma_i`` with ``v_i = v`` in the bound box, in lexicographic order."""
    dirs = _directions(g, i)
    lo = Fraction(-1)
    windows = []
    for d in range(len(dirs.slots)):
        if fixed is not None and d == fixed[0]:
            windows.append([fixed[1]])
        else:
            win = _budget_window(g, dirs, d, v, lo, Fraction(1))
            windows.append([b for b in win if _in_semigroup(dirs, d, b)])
    for A in itertools.product(*windows):
        A = list(A)
        gamma = _gamma_for(dirs, v, A)
        if gamma is None or (gamma and g.r(i) == 2):
            continue
        eps = [_eps_of_budget(g, dirs, d, A[d], v) for d in range(len(A))]
        if any(e is None for e in eps):
            continue
        if strict_lower:
            if admissible_violations(g, i, eps):
                continue
        elif pattern_violations(g, i, eps):
            continue
        yield A, gamma


def normalized_candidates(g: DualGraph, i: int, v: int) -> list[tuple[list[int], int]]:
    return list(_candidates(g, i, v, strict_lower=False))


def normalize_form(g: DualGraph, form: FormExponent, i: int) -> FormExponent:
    """A form with the same ``sigma_i`` whose residue numbers at ``E_i`` obey the bound pattern."""
    if g.is_arrowhead(i):
        raise NotExceptional(f"{g.name(i)} is not exceptional")
    current = residues(g, form, i)
    if not pattern_violations(g, i, current.eps):
        return form
    v = form.valuation(g, i)
    for A, gamma in _candidates(g, i, v, strict_lower=False):
        out = _assemble(g, _directions(g, i), A, gamma)
        if sigma(g, out, i) != current.sigma:
            raise InvariantViolation("normalization changed sigma")
        return out
    raise InvariantViolation(f"no normalized form at {g.name(i)} for v = {v}")


# ---------------------------------------------------------------------------
# Zero residues


def _integral_slot(g: DualGraph, i: int, v: int, slot: Slot) -> bool:
    return (g.N_of(slot.node) * (g.k[i] + v)) % g.N[i] == 0


def zero_slot_possible(g: DualGraph, i: int, v: int, d: int) -> bool:
    """Zero-residue criterion for slot index ``d`` without checking attainability."""
    slot = g.slots(i)[d]
    if slot.node is None or not _integral_slot(g, i, v, slot):
        return False
    if slot.role in ("i1", "i2"):
        return g.has_arrowhead_towards(i, slot.node)
    return not curvette_power_case(g, i)


def site_semigroup(g: DualGraph, i: int) -> NumericalSemigroup:
    key = ("site-semigroup", i)
    if key not in g._cache:
        values = sorted({g.site_valuation(i, s) for s in g.sites()})
        g._cache[key] = NumericalSemigroup.from_generators(values)
    return g._cache[key]


def check_attainable(g: DualGraph, i: int, v: int) -> None:
    if g.is_arrowhead(i) or not g.is_rupture(i):
        raise NotRupture(f"{g.name(i)} is not a rupture vertex")
    if not 0 <= v < g.N[i] or not site_semigroup(g, i).contains(v):
        raise NotAttainable(f"v = {v} is not attainable at {g.name(i)}")


def zero_achievable(g: DualGraph, i: int, v: int, d: int) -> bool:
    check_attainable(g, i, v)
    return zero_slot_possible(g, i, v, d)


# ---------------------------------------------------------------------------
# Maximal admissible chains


@dataclass
class Chain:
    path: list[int]
    form: FormExponent
    degenerate: bool = False

    def describe(self, g: DualGraph) -> dict:
        return {
            "path": [g.name(x) for x in self.path],
            "form": self.form.describe(g),
            "degenerate": self.degenerate,
        }


def _walk(g: DualGraph, form: FormExponent, start: int, first: int) -> tuple[list[int], FormExponent]:
    path = [start]
    u, w = start, first
    while True:
        path.append(w)
        if g.is_arrowhead(w):
            return path, form
        r = g.r(w)
        if r == 1:
            raise InvariantViolation(f"chain reached the dead end {g.name(w)}")
        if r == 2:
            (nxt,) = [x for x in g.adj[w] if x != u]
            u, w = w, nxt
            continue
        dirs = _directions(g, w)
        arrival = next(d for d, s in enumerate(dirs.slots) if s.node == u)
        side_sites = set(g.component_nodes(u, w))
        keep = {s: e for s, e in form.items if s in side_sites}
        fixed_budget = sum(e * dirs.alpha[arrival][s] for s, e in keep.items())
        v = form.valuation(g, w)
        options = list(_candidates(g, w, v, strict_lower=True, fixed=(arrival, fixed_budget)))
        if not options:
            raise InvariantViolation(f"no admissible re-normalization at {g.name(w)}")
        chosen = None
        for A, gamma in options:
            eps = [_eps_of_budget(g, dirs, d, A[d], v) for d in range(len(A))]
            if all(e != 0 for d, e in enumerate(eps) if d != arrival):
                chosen = (A, gamma, None)
                break
        if chosen is None:
            A, gamma = options[0]
            eps = [_eps_of_budget(g, dirs, d, A[d], v) for d in range(len(A))]
            nxt_d = next(d for d, e in enumerate(eps) if e == 0 and d != arrival)
            chosen = (A, gamma, nxt_d)
        A, gamma, nxt_d = chosen
        new = _assemble(g, dirs, A, gamma, keep=keep, keep_dir=arrival)
        if new.valuation(g, w) != v:
            raise InvariantViolation("re-normalization changed the valuation")
        form = new
        if nxt_d is None:
            return path, form
        u, w = w, dirs.slots[nxt_d].node


def find_maximal_admissible_chain(g: DualGraph, form: FormExponent, i: int) -> Chain:
    if g.is_arrowhead(i) or not g.is_rupture(i):
        raise NotRupture(f"{g.name(i)} is not a rupture vertex")
    form = normalize_form(g, form, i)
    res = residues(g, form, i)
    zeros = res.zero_slots()
    if not zeros:
        raise NoVanishingResidue(f"no residue number vanishes at {g.name(i)}")
    slots = g.slots(i)
    halves = []
    for d in zeros[:2]:
        part, form = _walk(g, form, i, slots[d].node)
        halves.append(part)
    if len(halves) == 1:
        path = halves[0]
    else:
        path = list(reversed(halves[0])) + halves[1][1:]
    chain = Chain(path, form)
    problems = chain_violations(g, chain, i)
    if problems:
        raise InvariantViolation("; ".join(problems))
    return chain


def chain_violations(g: DualGraph, chain: Chain, i: int | None = None) -> list[str]:
    """Post-hoc check of every defining property of a maximal admissible chain."""
    out = []
    path, form = chain.path, chain.form
    if i is not None and i not in path:
        out.append(f"chain misses {g.name(i)}")
    for a, b in zip(path, path[1:]):
        if b not in g.adj[a]:
            out.append(f"{g.name(a)} and {g.name(b)} are not adjacent")

    def node_sigma(x):
        if g.is_arrowhead(x):
            return Fraction(-(1 + form.get(x)), g.power(x))
        return sigma(g, form, x)

    sigmas = {node_sigma(x) for x in path}
    if len(sigmas) != 1:
        out.append("candidate poles differ along the chain")
    for x in path:
        if not g.is_arrowhead(x):
            out.extend(admissible_violations(g, x, residues(g, form, x).eps))
    for end, inner in ((path[0], path[1] if len(path) > 1 else None), (path[-1], path[-2] if len(path) > 1 else None)):
        if g.is_arrowhead(end):
            continue
        if not g.is_rupture(end) and not chain.degenerate:
            out.append(f"endpoint {g.name(end)} is neither rupture nor arrowhead")
            continue
        res = residues(g, form, end)
        for slot, e in zip(res.slots, res.eps):
            if e == 0 and slot.node != inner:
                out.append(f"endpoint {g.name(end)} has another vanishing residue")
    return out
