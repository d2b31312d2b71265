"""Local topological zeta function of a curve and its poles."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .bs_roots import RootEntry, topological_roots
from .resolution_graph import DualGraph


@dataclass
class RationalFunction:
    """A proper rational function kept as principal parts ``{pole: [c_1, c_2, ...]}``.

    ``c_j`` multiplies ``1/(s - pole)^j``.
    """

    parts: dict[Fraction, list[Fraction]] = field(default_factory=dict)

    def add(self, pole: Fraction, order: int, coeff: Fraction) -> None:
        coeffs = self.parts.setdefault(pole, [])
        while len(coeffs) < order:
            coeffs.append(Fraction(0))
        coeffs[order - 1] += coeff

    def pruned(self) -> "RationalFunction":
        out = {}
        for pole, coeffs in self.parts.items():
            c = list(coeffs)
            while c and c[-1] == 0:
                c.pop()
            if c:
                out[pole] = c
        return RationalFunction(out)

    def poles(self) -> dict[Fraction, int]:
        return {p: len(c) for p, c in self.pruned().parts.items()}

    def __call__(self, s: Fraction) -> Fraction:
        total = Fraction(0)
        for pole, coeffs in self.parts.items():
            for j, c in enumerate(coeffs, start=1):
                total += c / (s - pole) ** j
        return total


def topological_zeta(g: DualGraph) -> RationalFunction:
    z = RationalFunction()
    for i in g.exceptional:
        chi = 2 - g.r(i)
        if chi:
            z.add(Fraction(-g.k[i], g.N[i]), 1, Fraction(chi, g.N[i]))
    edges = list(g.exc_edges) + [(g.host(a), a) for a in g.arrowheads]
    for x, y in edges:
        Nx, Ny = g.N_of(x), g.N_of(y)
        px, py = Fraction(-g.k_of(x), Nx), Fraction(-g.k_of(y), Ny)
        scale = Fraction(1, Nx * Ny)
        if px == py:
            z.add(px, 2, scale)
        else:
            z.add(px, 1, scale / (px - py))
            z.add(py, 1, scale / (py - px))
    return z.pruned()


def euler_characteristic_check(g: DualGraph) -> bool:
    """Euler characteristics of the open strata add up to that of a tree of lines."""
    total = sum(2 - g.r(i) for i in g.exceptional) + len(g.exc_edges) + g.A
    return total == g.V + 1


@dataclass
class PoleEntry:
    location: Fraction
    order: int
    witnesses: list[tuple[int, ...]]


def pole_classification(g: DualGraph) -> list[PoleEntry]:
    ratio = {x: Fraction(g.k_of(x), g.N_of(x)) for x in g.nodes}
    edges = list(g.exc_edges) + [(g.host(a), a) for a in g.arrowheads]
    out = []
    for c in sorted(set(ratio.values())):
        pairs = [(x, y) for x, y in edges if ratio[x] == c and ratio[y] == c]
        if pairs:
            out.append(PoleEntry(-c, 2, pairs))
            continue
        single = [x for x in g.nodes if ratio[x] == c and (g.is_arrowhead(x) or g.is_rupture(x))]
        if single:
            out.append(PoleEntry(-c, 1, [(x,) for x in single]))
    return sorted(out, key=lambda p: -p.location)


@dataclass
class ZetaLine:
    location: Fraction
    order: int
    matched: RootEntry | None


@dataclass
class ZetaReport:
    lines: list[ZetaLine]

    @property
    def ok(self) -> bool:
        return all(line.matched is not None for line in self.lines)

    @property
    def matched(self) -> int:
        return sum(1 for line in self.lines if line.matched is not None)


def check_zeta_containment(g: DualGraph, roots=None) -> ZetaReport:
    roots = roots if roots is not None else topological_roots(g, diagnostics=False)
    lines = []
    for pole in pole_classification(g):
        entry = roots.get(pole.location)
        ok = entry is not None and entry.multiplicity >= pole.order
        lines.append(ZetaLine(pole.location, pole.order, entry if ok else None))
    return ZetaReport(lines)
