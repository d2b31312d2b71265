import random
from fractions import Fraction

import pytest

from plane_bs.corpus import random_branch, random_curve
from plane_bs.curve_input import BranchSpec, CharSequence, CurveSpec
from plane_bs.resolution_graph import build_from_branch, build_from_curve


def branch_graph(n, betas, power=1):
    return build_from_branch(BranchSpec(CharSequence(n, tuple(betas)), power))


def family_graph(s):
    """The branch with semigroup <4, 6, 2s+7>."""
    return branch_graph(4, [6, 2 * s + 1])


def curve_graph(branches, contacts=None):
    specs = [BranchSpec(CharSequence(n, tuple(b)), p) for n, b, p in branches]
    if contacts is not None:
        contacts = [[None if x is None else Fraction(x) for x in row] for row in contacts]
    return build_from_curve(CurveSpec(specs, contacts))


def corpus_graphs(seed, count, cap=200):
    rng = random.Random(seed)
    return [build_from_curve(random_curve(rng, max_multiplicity=cap)) for _ in range(count)]


def corpus_branches(seed, count, max_conductor=600):
    rng = random.Random(seed)
    return [random_branch(rng, max_conductor=max_conductor) for _ in range(count)]


@pytest.fixture(scope="session")
def cusp():
    return branch_graph(2, [3])


@pytest.fixture(scope="session")
def family3():
    return family_graph(3)


@pytest.fixture(scope="session")
def curves():
    return corpus_graphs(11, 40)
