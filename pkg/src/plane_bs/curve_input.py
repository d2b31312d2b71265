"""Discrete invariants of plane branches and the numerical semigroups they generate.

A branch is described either by its characteristic exponents ``(n; b_1, ..., b_g)``
or by its Puiseux pairs ``((q_1, n_1), ..., (q_g, n_g))``.  Both forms convert
losslessly into each other; :class:`CharSequence` is the canonical one.

Curves with several (possibly non-reduced) branches are described by a
:class:`CurveSpec`, which adds a branch power and a symmetric matrix of contact
exponents.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd, prod
from typing import Iterable, Sequence


class InvalidInvariants(ValueError):
    """Raised when branch data violates the structural invariants."""


class NotAMember(ValueError):
    """Raised when a value is asked to be decomposed but lies outside a semigroup."""


class IncompatibleContacts(ValueError):
    """Raised when a contact matrix cannot come from an actual plane curve."""


def _gcd_all(values: Iterable[int]) -> int:
    return reduce(gcd, values, 0)


@dataclass(frozen=True)
class CharSequence:
    """Characteristic exponents ``n < b_1 < ... < b_g`` of a branch.

    ``extended`` marks sequences carrying trailing non-characteristic exponents
    (a final step with ``n_i = 1``), as used for divisorial valuations.
    """

    n: int
    betas: tuple[int, ...] = ()
    extended: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "betas", tuple(int(b) for b in self.betas))
        if self.n < 1:
            raise InvalidInvariants(f"multiplicity must be positive, got {self.n}")
        if self.betas and self.betas[0] <= self.n and not self.extended:
            raise InvalidInvariants(f"first exponent {self.betas[0]} must exceed n = {self.n}")
        for a, b in zip(self.betas, self.betas[1:]):
            if b <= a:
                raise InvalidInvariants(f"exponents must strictly increase: {self.betas}")
        if any(b < 1 for b in self.betas):
            raise InvalidInvariants("exponents must be positive")
        e = self.n
        for i, b in enumerate(self.betas):
            e_next = gcd(e, b)
            is_last = i == len(self.betas) - 1
            if e_next == e and not (self.extended and is_last):
                raise InvalidInvariants(
                    f"exponent {b} does not lower the gcd (e = {e}); not characteristic"
                )
            e = e_next
        if e != 1:
            raise InvalidInvariants(f"gcd(n, betas) = {e}; the sequence is incomplete")

    @property
    def g(self) -> int:
        return len(self.betas)

    @property
    def e(self) -> tuple[int, ...]:
        """``e_0 = n`` and ``e_i = gcd(e_{i-1}, b_i)``."""
        out = [self.n]
        for b in self.betas:
            out.append(gcd(out[-1], b))
        return tuple(out)

    @property
    def ns(self) -> tuple[int, ...]:
        e = self.e
        return tuple(e[i - 1] // e[i] for i in range(1, len(e)))

    @property
    def ms(self) -> tuple[int, ...]:
        e = self.e
        return tuple(b // e[i + 1] for i, b in enumerate(self.betas))

    def exponents(self) -> tuple[Fraction, ...]:
        """Characteristic exponents as rationals ``b_i / n``."""
        return tuple(Fraction(b, self.n) for b in self.betas)


@dataclass(frozen=True)
class PuiseuxPairs:
    """Puiseux pairs ``(q_i, n_i)``; the trivial pair has ``n_i = 1``."""

    pairs: tuple[tuple[int, int], ...] = ()
    extended: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", tuple((int(q), int(n)) for q, n in self.pairs))
        for idx, (q, n) in enumerate(self.pairs):
            trivial_ok = self.extended and idx == len(self.pairs) - 1
            if n < 1 or (n == 1 and not trivial_ok):
                raise InvalidInvariants(f"pair {idx} has n = {n}; need n > 1")
            if q < 1:
                raise InvalidInvariants(f"pair {idx} has q = {q}; need q >= 1")
            if n > 1 and gcd(q, n) != 1:
                raise InvalidInvariants(f"pair {idx} = ({q}, {n}) is not coprime")


def chars_to_pairs(c: CharSequence) -> PuiseuxPairs:
    """Puiseux pairs with ``q_i = m_i - n_i m_{i-1}`` and ``m_0 = 0``."""
    pairs = []
    m_prev = 0
    for n_i, m_i in zip(c.ns, c.ms):
        pairs.append((m_i - n_i * m_prev, n_i))
        m_prev = m_i
    return PuiseuxPairs(tuple(pairs), extended=c.extended)


def pairs_to_chars(p: PuiseuxPairs) -> CharSequence:
    n = prod(ni for _, ni in p.pairs)
    betas = []
    m_prev = 0
    remaining = n
    for q, ni in p.pairs:
        m = q + ni * m_prev
        remaining //= ni
        betas.append(m * remaining)
        m_prev = m
    return CharSequence(n, tuple(betas), extended=p.extended)


def as_chars(data: CharSequence | PuiseuxPairs) -> CharSequence:
    return data if isinstance(data, CharSequence) else pairs_to_chars(data)


def as_pairs(data: CharSequence | PuiseuxPairs) -> PuiseuxPairs:
    return data if isinstance(data, PuiseuxPairs) else chars_to_pairs(data)


def _membership_table(generators: Sequence[int], limit: int) -> list[bool]:
    reachable = [False] * (limit + 1)
    reachable[0] = True
    gens = [g for g in generators if g > 0]
    for value in range(1, limit + 1):
        reachable[value] = any(value >= g and reachable[value - g] for g in gens)
    return reachable


def _frobenius_conductor(generators: Sequence[int]) -> int:
    gens = sorted(g for g in generators if g > 0)
    if not gens:
        raise InvalidInvariants("empty semigroup")
    if _gcd_all(gens) != 1:
        raise InvalidInvariants(f"generators {gens} have a common factor")
    smallest = gens[0]
    # Past the largest Apery element every residue class is covered.
    bound = smallest * gens[-1] + smallest
    table = _membership_table(gens, bound)
    run = 0
    for value in range(bound + 1):
        run = run + 1 if table[value] else 0
        if run == smallest:
            return value - smallest + 1
    raise AssertionError("conductor search bound too small")


@dataclass(frozen=True)
class NumericalSemigroup:
    """A submonoid of the non-negative integers with finite complement.

    ``ns`` holds the bounds used for bounded representations: generator ``i``
    (for ``i >= 1``) is used fewer than ``ns[i-1]`` times.  It is empty for
    semigroups that are not attached to a branch.
    """

    generators: tuple[int, ...]
    conductor: int
    ns: tuple[int, ...] = ()
    extended: bool = False
    _table: list[bool] = field(default=None, repr=False, compare=False, hash=False)

    @classmethod
    def from_generators(cls, generators: Iterable[int]) -> "NumericalSemigroup":
        gens = tuple(sorted(set(g for g in generators if g > 0)))
        return cls(gens, _frobenius_conductor(gens))

    def contains(self, value: int) -> bool:
        return semigroup_membership(self, value)

    def minimal_generators(self) -> tuple[int, ...]:
        kept: list[int] = []
        for g in self.generators:
            limit = g
            table = _membership_table(kept, limit) if kept else [True] + [False] * limit
            if not table[g]:
                kept.append(g)
        return tuple(kept)

    def gaps(self) -> list[int]:
        return [v for v in range(self.conductor) if not self.contains(v)]

    def elements_below(self, bound: int) -> list[int]:
        table = _membership_table(self.generators, max(bound, 0))
        return [v for v in range(bound) if table[v]]

    @property
    def reduced_generators(self) -> tuple[int, ...]:
        """``m̄_i = b̄_i / e_i`` for branch semigroups."""
        out = []
        e = self.generators[0]
        for i, g in enumerate(self.generators):
            e = gcd(e, g) if i else g
            out.append(g // e)
        return tuple(out)


def pairs_to_semigroup(p: PuiseuxPairs) -> NumericalSemigroup:
    """Semigroup generators ``b̄_0 = n``, ``b̄_1 = b_1``, ``b̄_i = n_{i-1} b̄_{i-1} - b_{i-1} + b_i``."""
    c = pairs_to_chars(p)
    gens = [c.n]
    ns = c.ns
    for i, b in enumerate(c.betas):
        if i == 0:
            gens.append(b)
        else:
            gens.append(ns[i - 1] * gens[-1] - c.betas[i - 1] + b)
    if c.betas:
        conductor = ns[-1] * gens[-1] - c.betas[-1] - (c.n - 1)
    else:
        conductor = 0
    return NumericalSemigroup(tuple(gens), conductor, tuple(ns), extended=p.extended)


def semigroup_to_pairs(generators: Sequence[int]) -> PuiseuxPairs:
    """Inverse of :func:`pairs_to_semigroup` for a minimal branch generating set."""
    gens = list(generators)
    if not gens:
        raise InvalidInvariants("no generators")
    e = [gens[0]]
    for g in gens[1:]:
        e.append(gcd(e[-1], g))
    if e[-1] != 1:
        raise InvalidInvariants(f"generators {gens} are not coprime")
    ns = [e[i - 1] // e[i] for i in range(1, len(e))]
    betas: list[int] = []
    for i in range(1, len(gens)):
        if i == 1:
            betas.append(gens[1])
        else:
            betas.append(gens[i] - ns[i - 2] * gens[i - 1] + betas[-1])
    return chars_to_pairs(CharSequence(gens[0], tuple(betas)))


def semigroup_membership(s: NumericalSemigroup, value: int) -> bool:
    if value < 0:
        return False
    if s.conductor and value >= s.conductor:
        return True
    limit = max(value, s.conductor)
    table = s._table
    if table is None or len(table) <= limit:
        table = _membership_table(s.generators, limit)
        object.__setattr__(s, "_table", table)
    return table[value]


def bounded_representation(s: NumericalSemigroup, value: int) -> tuple[int, ...]:
    """Coordinates ``(c_0, ..., c_g)`` with ``value = sum c_i b̄_i`` and ``c_i < n_i`` for ``i >= 1``.

    The coordinate ``c_i`` is forced modulo ``n_i`` because every element of
    ``<b̄_0, ..., b̄_{i-1}>`` is divisible by ``e_{i-1}`` while ``b̄_i`` only
    shares ``e_i`` with it, so the representation is unique.
    """
    if not s.ns and len(s.generators) > 1:
        raise InvalidInvariants("bounded representations need a branch semigroup")
    if not semigroup_membership(s, value):
        raise NotAMember(f"{value} is not in <{', '.join(map(str, s.generators))}>")
    gens = s.generators
    e = [gens[0]]
    for g in gens[1:]:
        e.append(gcd(e[-1], g))
    coords = [0] * len(gens)
    rest = value
    for i in range(len(gens) - 1, 0, -1):
        n_i = s.ns[i - 1]
        found = None
        for c in range(n_i):
            r = rest - c * gens[i]
            if r >= 0 and r % e[i - 1] == 0:
                found = c
                break
        if found is None:
            raise NotAMember(f"{value} has no bounded representation")
        coords[i] = found
        rest -= found * gens[i]
    if rest % gens[0]:
        raise NotAMember(f"{value} has no bounded representation")
    coords[0] = rest // gens[0]
    if coords[0] < 0:
        raise NotAMember(f"{value} has no bounded representation")
    return tuple(coords)


def milnor_number_irreducible(p: PuiseuxPairs) -> int:
    if p.extended:
        raise InvalidInvariants("the Milnor number needs complete (non-extended) pairs")
    return pairs_to_semigroup(p).conductor


@dataclass(frozen=True)
class BranchSpec:
    invariants: CharSequence
    power: int = 1

    def __init__(self, invariants: CharSequence | PuiseuxPairs, power: int = 1):
        chars = as_chars(invariants)
        if chars.extended:
            raise InvalidInvariants("curve branches must use complete invariants")
        if power < 1:
            raise InvalidInvariants(f"branch power must be >= 1, got {power}")
        object.__setattr__(self, "invariants", chars)
        object.__setattr__(self, "power", int(power))

    @property
    def pairs(self) -> PuiseuxPairs:
        return chars_to_pairs(self.invariants)

    def grid_step(self, r: Fraction) -> Fraction:
        """Spacing of exponents available to this branch at position ``r``."""
        denom = 1
        c = self.invariants
        e = c.e
        for idx, x in enumerate(c.exponents()):
            if x <= r:
                denom = c.n // e[idx + 1]
        return Fraction(1, denom)

    def in_grid(self, r: Fraction) -> bool:
        return (r / self.grid_step(r)).denominator == 1


def _parse_contact(value) -> Fraction | None:
    if value is None:
        return None
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str) and value.strip().lower() in {"inf", "infinity", "null"}:
        return None
    return Fraction(value)


@dataclass(frozen=True)
class CurveSpec:
    branches: tuple[BranchSpec, ...]
    contacts: tuple[tuple[Fraction | None, ...], ...]

    def __init__(self, branches: Sequence[BranchSpec], contacts=None):
        branches = tuple(branches)
        size = len(branches)
        if size == 0:
            raise InvalidInvariants("a curve needs at least one branch")
        if contacts is None:
            if size > 1:
                raise IncompatibleContacts("contacts are required for several branches")
            contacts = [[None]]
        matrix = tuple(tuple(_parse_contact(x) for x in row) for row in contacts)
        object.__setattr__(self, "branches", branches)
        object.__setattr__(self, "contacts", matrix)
        self._validate()

    def contact(self, a: int, b: int) -> Fraction:
        return self.contacts[a][b]

    def _validate(self) -> None:
        size = len(self.branches)
        q = self.contacts
        if len(q) != size or any(len(row) != size for row in q):
            raise IncompatibleContacts(f"contact matrix must be {size}x{size}")
        for a in range(size):
            for b in range(size):
                if a == b:
                    continue
                if q[a][b] is None:
                    raise IncompatibleContacts(f"contact ({a},{b}) is missing")
                if q[a][b] != q[b][a]:
                    raise IncompatibleContacts(f"contact ({a},{b}) is not symmetric")
                if q[a][b] < 1:
                    raise IncompatibleContacts(f"contact ({a},{b}) = {q[a][b]} is below 1")
        for a in range(size):
            for b in range(a + 1, size):
                r = q[a][b]
                ba, bb = self.branches[a], self.branches[b]
                below_a = [x for x in ba.invariants.exponents() if x < r]
                below_b = [x for x in bb.invariants.exponents() if x < r]
                if below_a != below_b:
                    raise IncompatibleContacts(
                        f"branches {a},{b} differ in characteristic exponents below contact {r}"
                    )
                if not (ba.in_grid(r) or bb.in_grid(r)):
                    raise IncompatibleContacts(
                        f"contact ({a},{b}) = {r} is not an exponent either branch can carry"
                    )
                for c in range(size):
                    if c in (a, b):
                        continue
                    values = sorted([r, q[a][c], q[b][c]])
                    if values[0] != values[1]:
                        raise IncompatibleContacts(
                            f"contacts of branches {a},{b},{c} violate the ultrametric condition"
                        )
