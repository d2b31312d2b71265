from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plane_bs.curve_input import (
    BranchSpec,
    CharSequence,
    CurveSpec,
    IncompatibleContacts,
    InvalidInvariants,
    NotAMember,
    NumericalSemigroup,
    PuiseuxPairs,
    bounded_representation,
    chars_to_pairs,
    milnor_number_irreducible,
    pairs_to_chars,
    pairs_to_semigroup,
    semigroup_membership,
    semigroup_to_pairs,
)


def brute_members(gens, bound):
    """Members below ``bound`` by a reachability sieve."""
    reach = [False] * max(bound, 1)
    reach[0] = True
    for x in range(1, bound):
        reach[x] = any(x >= g and reach[x - g] for g in gens)
    return {x for x in range(bound) if reach[x]}


def brute_conductor(gens):
    # Schur: every integer from (min-1)(max-1) on is a member
    bound = min(gens) * max(gens) + 1
    members = brute_members(gens, bound)
    c = bound
    while c - 1 in members:
        c -= 1
    return c


pair_lists = st.lists(
    st.tuples(st.integers(1, 12), st.integers(2, 5)).filter(lambda p: gcd(*p) == 1), min_size=1, max_size=3
).filter(lambda ps: ps[0][0] > ps[0][1])


def test_conversion_example_branch():
    assert chars_to_pairs(CharSequence(4, (6, 7))) == PuiseuxPairs(((3, 2), (1, 2)))
    assert pairs_to_chars(PuiseuxPairs(((3, 2), (1, 2)))) == CharSequence(4, (6, 7))


def test_cusp_conversion():
    assert chars_to_pairs(CharSequence(2, (3,))).pairs == ((3, 2),)


@given(pair_lists)
@settings(max_examples=150, deadline=None)
def test_pairs_chars_roundtrip(pairs):
    p = PuiseuxPairs(tuple(pairs))
    assert chars_to_pairs(pairs_to_chars(p)) == p


def test_semigroup_of_example_branch():
    s = pairs_to_semigroup(PuiseuxPairs(((3, 2), (1, 2))))
    assert s.generators == (4, 6, 13)
    assert s.conductor == 16


@pytest.mark.parametrize("s", [3, 4, 5, 6])
def test_family_semigroup(s):
    sg = pairs_to_semigroup(chars_to_pairs(CharSequence(4, (6, 2 * s + 1))))
    assert sg.generators == (4, 6, 2 * s + 7)
    assert milnor_number_irreducible(chars_to_pairs(CharSequence(4, (6, 2 * s + 1)))) == 2 * s + 10


@given(pair_lists)
@settings(max_examples=100, deadline=None)
def test_conductor_matches_enumeration(pairs):
    s = pairs_to_semigroup(PuiseuxPairs(tuple(pairs)))
    assert s.conductor == brute_conductor(s.generators)
    # branch semigroups are symmetric
    members = brute_members(s.generators, s.conductor)
    assert s.conductor == 2 * (s.conductor - len(members))


@given(pair_lists)
@settings(max_examples=100, deadline=None)
def test_semigroup_to_pairs_inverts(pairs):
    p = PuiseuxPairs(tuple(pairs))
    assert semigroup_to_pairs(pairs_to_semigroup(p).generators) == p


def test_bounded_representation_examples():
    cusp = pairs_to_semigroup(PuiseuxPairs(((3, 2),)))
    assert bounded_representation(cusp, 6) == (3, 0)
    assert bounded_representation(cusp, 5) == (1, 1)
    s = pairs_to_semigroup(PuiseuxPairs(((3, 2), (1, 2))))
    assert bounded_representation(s, 26) == (5, 1, 0)
    with pytest.raises(NotAMember):
        bounded_representation(s, 15)


@given(pair_lists, st.integers(0, 400))
@settings(max_examples=150, deadline=None)
def test_bounded_representation_reconstructs(pairs, value):
    s = pairs_to_semigroup(PuiseuxPairs(tuple(pairs)))
    members = brute_members(s.generators, value + 1)
    assert semigroup_membership(s, value) == (value in members)
    if value in members:
        coords = bounded_representation(s, value)
        assert sum(c * g for c, g in zip(coords, s.generators)) == value
        assert all(0 <= c < n for c, n in zip(coords[1:], s.ns))


def test_generic_semigroup_membership():
    s = NumericalSemigroup.from_generators([3, 5])
    assert s.conductor == 8
    assert s.gaps() == [1, 2, 4, 7]
    assert not s.contains(7) and s.contains(8)


@pytest.mark.parametrize(
    "build",
    [
        lambda: PuiseuxPairs(((2, 2),)),
        lambda: PuiseuxPairs(((0, 2),)),
        lambda: CharSequence(2, (4,)),
        lambda: CharSequence(2, (3, 5)),
        lambda: BranchSpec(CharSequence(2, (3,)), 0),
    ],
)
def test_invalid_invariants(build):
    with pytest.raises(InvalidInvariants):
        build()


def test_contacts_must_be_ultrametric():
    b = BranchSpec(CharSequence(2, (3,)))
    one, two, three = Fraction(1), Fraction(2), Fraction(3)
    with pytest.raises(IncompatibleContacts):
        CurveSpec([b, b, b], [[None, one, two], [one, None, three], [two, three, None]])


def test_contacts_must_fit_the_exponent_grid():
    b = BranchSpec(CharSequence(2, (3,)))
    with pytest.raises(IncompatibleContacts):
        CurveSpec([b, b], [[None, Fraction(7, 4)], [Fraction(7, 4), None]])


def test_several_branches_need_contacts():
    b = BranchSpec(CharSequence(2, (3,)))
    with pytest.raises(IncompatibleContacts):
        CurveSpec([b, b])


def test_valid_curve():
    c = CurveSpec(
        [BranchSpec(CharSequence(2, (3,))), BranchSpec(CharSequence(1, ()), 2)],
        [[None, "3/2"], ["3/2", None]],
    )
    assert c.contacts[0][1] == Fraction(3, 2)
    assert c.branches[1].power == 2
