"""Seeded random branches and curves within fixed size bounds."""

from __future__ import annotations

import random
from fractions import Fraction
from math import gcd, prod

from .curve_input import (
    BranchSpec,
    CharSequence,
    CurveSpec,
    IncompatibleContacts,
    InvalidInvariants,
    PuiseuxPairs,
    chars_to_pairs,
    pairs_to_chars,
    pairs_to_semigroup,
)
from .resolution_graph import build_from_curve

MAX_PAIRS = 3
MAX_ENTRY = 12
MAX_BRANCHES = 3
MAX_POWER = 3
MAX_MULTIPLICITY = 300


def _pair_exponents(pairs: list[tuple[int, int]]) -> list[Fraction]:
    out, acc, den = [], Fraction(0), 1
    for q, n in pairs:
        den *= n
        acc += Fraction(q, den)
        out.append(acc)
    return out


def _extend_pairs(rng: random.Random, prefix: list[tuple[int, int]], count: int, above: Fraction | None, max_entry: int):
    pairs = list(prefix)
    for _ in range(count):
        for _attempt in range(50):
            n = rng.randint(2, max_entry)
            q = rng.randint(1, max_entry)
            if gcd(q, n) != 1:
                continue
            trial = pairs + [(q, n)]
            exps = _pair_exponents(trial)
            if len(trial) == 1 and exps[0] <= 1:
                continue
            if above is not None and exps[-1] <= above:
                continue
            pairs = trial
            break
        else:
            return None
        above = None
    return pairs


def random_branch(
    rng: random.Random,
    max_pairs: int = MAX_PAIRS,
    max_entry: int = MAX_ENTRY,
    max_conductor: int | None = None,
) -> CharSequence:
    """Random branch; ``max_conductor`` rejects samples whose semigroup conductor is larger."""
    while True:
        pairs = _extend_pairs(rng, [], rng.randint(1, max_pairs), None, max_entry)
        if pairs is None:
            continue
        try:
            chars = pairs_to_chars(PuiseuxPairs(tuple(pairs)))
        except InvalidInvariants:
            continue
        if max_conductor is not None and pairs_to_semigroup(chars_to_pairs(chars)).conductor > max_conductor:
            continue
        return chars


def _to_pairs(c: CharSequence) -> list[tuple[int, int]]:
    return list(chars_to_pairs(c).pairs)


def random_curve(
    rng: random.Random,
    max_branches: int = MAX_BRANCHES,
    max_pairs: int = MAX_PAIRS,
    max_entry: int = MAX_ENTRY,
    max_power: int = MAX_POWER,
    max_multiplicity: int | None = MAX_MULTIPLICITY,
) -> CurveSpec:
    """A curve whose branches split off one another at random contact exponents.

    ``max_multiplicity`` rejects curves whose resolution has some ``N_i`` above it;
    pass ``None`` to lift the cap.
    """
    while True:
        count = rng.randint(1, max_branches)
        branches: list[list[tuple[int, int]]] = []
        contacts: list[list[Fraction | None]] = []
        ok = True
        for b in range(count):
            if b == 0:
                pairs = _to_pairs(random_branch(rng, max_pairs, max_entry)) if rng.random() < 0.8 else []
                branches.append(pairs)
                contacts.append([None])
                continue
            a = rng.randrange(b)
            base = branches[a]
            exps = _pair_exponents(base)
            steps = [Fraction(1, prod(n for _, n in base[:t])) for t in range(len(base) + 1)]
            options = set(exps) | {Fraction(1), Fraction(2), Fraction(3)}
            for t, x in enumerate([Fraction(0)] + exps):
                options.add(x + steps[t])
            options = sorted(x for x in options if x >= 1)
            q = rng.choice(options)
            keep = [p for p, x in zip(base, exps) if x < q]
            extra = rng.randint(0, max_pairs - len(keep))
            if extra == 0 and rng.random() < 0.5:
                pairs = keep
            else:
                pairs = _extend_pairs(rng, keep, max(extra, 1), q, max_entry)
                if pairs is None or len(pairs) > max_pairs:
                    ok = False
                    break
            branches.append(pairs)
            row = []
            for c in range(b):
                if c == a:
                    row.append(q)
                else:
                    ca = contacts[max(a, c)][min(a, c)]
                    row.append(q if ca >= q else ca)
            row.append(None)
            contacts.append(row)
        if not ok:
            continue
        matrix = [[None] * count for _ in range(count)]
        for x in range(count):
            for y in range(x):
                matrix[x][y] = matrix[y][x] = contacts[x][y]
        try:
            specs = [
                BranchSpec(pairs_to_chars(PuiseuxPairs(tuple(p))) if p else CharSequence(1, ()), rng.randint(1, max_power))
                for p in branches
            ]
            curve = CurveSpec(specs, matrix if count > 1 else None)
        except (InvalidInvariants, IncompatibleContacts):
            continue
        if max_multiplicity is not None and max(build_from_curve(curve).N) > max_multiplicity:
            continue
        return curve
