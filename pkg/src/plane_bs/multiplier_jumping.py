"""Multiplier ideals and jumping numbers of a curve, computed on its resolution.

An ideal ``J`` of the local ring is recorded by the pair ``(a, D)``: ``a_k`` is the
power of the branch ``f_k`` that ``J`` is divisible by and ``D`` is the antinef
exceptional divisor of the remaining complete ideal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor

from .bs_roots import RootEntry, topological_roots
from .resolution_graph import DualGraph


def intersect(g: DualGraph, D: list[int], i: int) -> int:
    return D[i] * g.self_intersection[i] + sum(D[j] for j in g.exc_adj[i])


def is_antinef(g: DualGraph, D: list[int]) -> bool:
    return all(intersect(g, D, i) <= 0 for i in g.exceptional)


def antinef_closure(g: DualGraph, D) -> list[int]:
    """Smallest antinef divisor dominating ``D`` (unloading)."""
    D = list(D)
    if len(D) != g.V:
        raise ValueError(f"divisor needs {g.V} coefficients, got {len(D)}")
    changed = True
    while changed:
        changed = False
        for i in g.exceptional:
            excess = intersect(g, D, i)
            if excess > 0:
                step = -g.self_intersection[i]
                D[i] += -(-excess // step)
                changed = True
    return D


@dataclass(frozen=True)
class IdealData:
    branch_powers: tuple[int, ...]
    divisor: tuple[int, ...]

    def valuation(self, g: DualGraph, node: int) -> int:
        if g.is_arrowhead(node):
            return self.branch_powers[node - g.V]
        return self.divisor[node] + sum(
            a * g.valuation_of_branch(node, arrow) for a, arrow in zip(self.branch_powers, g.arrowheads)
        )


def multiplier_ideal(g: DualGraph, lam: Fraction) -> IdealData:
    """The multiplier ideal of exponent ``lam`` on this resolution."""
    a = tuple(floor(lam * g.power(k)) for k in g.arrowheads)
    D = []
    for i in g.exceptional:
        kappa = g.k[i] - 1
        need = floor(lam * g.N[i]) - kappa
        need -= sum(ak * g.valuation_of_branch(i, k) for ak, k in zip(a, g.arrowheads))
        D.append(max(0, need))
    return IdealData(a, tuple(antinef_closure(g, D)))


@dataclass
class JumpingNumber:
    value: Fraction
    support: list[int]

    def case(self, g: DualGraph) -> str:
        """Which residue criterion explains the matching root."""
        sup = set(self.support)
        for x in sup:
            if any(y in sup for y in g.adj[x]):
                return "adjacent"
        return "isolated"


def candidates(g: DualGraph, upper: Fraction = Fraction(1)) -> list[Fraction]:
    out = set()
    for i in g.exceptional:
        v = 0
        while True:
            lam = Fraction(g.k[i] + v, g.N[i])
            if lam >= upper:
                break
            out.add(lam)
            v += 1
    for k in g.arrowheads:
        for j in range(1, g.power(k)):
            lam = Fraction(j, g.power(k))
            if lam < upper:
                out.add(lam)
    return sorted(out)


def jumping_numbers(g: DualGraph) -> list[JumpingNumber]:
    prev = multiplier_ideal(g, Fraction(0))
    out = []
    for lam in candidates(g):
        cur = multiplier_ideal(g, lam)
        if cur != prev:
            support = [
                x for x in g.nodes if lam * g.N_of(x) == g.k_of(x) + prev.valuation(g, x)
            ]
            out.append(JumpingNumber(lam, support))
        prev = cur
    return out


@dataclass
class ContainmentLine:
    value: Fraction
    matched: RootEntry | None
    case: str


@dataclass
class JumpingReport:
    lines: list[ContainmentLine]

    @property
    def ok(self) -> bool:
        return all(line.matched is not None for line in self.lines)

    @property
    def matched(self) -> int:
        return sum(1 for line in self.lines if line.matched is not None)


def check_jumping_containment(g: DualGraph, roots=None, jumps=None) -> JumpingReport:
    roots = roots if roots is not None else topological_roots(g, diagnostics=False)
    jumps = jumps if jumps is not None else jumping_numbers(g)
    lines = []
    for jn in jumps:
        lines.append(ContainmentLine(jn.value, roots.get(-jn.value), jn.case(g)))
    return JumpingReport(lines)
