from collections import Counter
from fractions import Fraction as F

import pytest

from conftest import branch_graph, corpus_branches, corpus_graphs, curve_graph, family_graph
from plane_bs.bs_roots import (
    EPS_ZERO,
    THREE_NONINTEGERS,
    attainable_values,
    certificate,
    classify_root,
    is_monomial_curve,
    lct,
    roots_irreducible_closed_form,
    topological_roots,
)
from plane_bs.curve_input import BranchSpec, CharSequence
from plane_bs.forms_residues import NotAttainable, NotRupture
from plane_bs.resolution_graph import build_from_branch


def quasi_homogeneous_roots(n, m):
    """Candidates -(ni+mj)/nm below the bound with both products non-integral, plus -1."""
    out = {F(-1)}
    for i in range(1, m + 2):
        for j in range(1, n + 2):
            if n * i + m * j < n * m + n + m:
                s = F(-(n * i + m * j), n * m)
                if (n * s).denominator != 1 and (m * s).denominator != 1:
                    out.add(s)
    return out


def monomial_roots(a, b):
    """Roots of the b-function of x^a y^b, with multiplicity."""
    c = Counter()
    for i in range(1, a + 1):
        c[F(-i, a)] += 1
    for j in range(1, b + 1):
        c[F(-j, b)] += 1
    return {r: min(k, 2) for r, k in c.items()}


def g_pairs(s):
    return CharSequence(4, (6, 2 * s + 1))


def test_cusp_roots(cusp):
    assert topological_roots(cusp).as_dict() == {F(-5, 6): 1, F(-7, 6): 1, F(-1): 1}
    assert lct(cusp) == F(5, 6)


def test_cusp_attainable_values(cusp):
    assert attainable_values(cusp, 2) == [0, 2, 3, 4, 5]


def test_cusp_unclassified_candidates(cusp):
    diag = topological_roots(cusp, diagnostics=True).diagnostics
    assert [d.candidate for d in diag] == [F(-4, 3), F(-3, 2), F(-5, 3)]


@pytest.mark.parametrize("s", [3, 4, 5, 6])
def test_family_roots(s):
    g = family_graph(s)
    roots = topological_roots(g)
    by_div = roots.by_divisor()
    assert sorted(by_div[2]) == [F(-13, 12), F(-11, 12), F(-7, 12), F(-5, 12)]
    assert len(by_div[s + 1]) == 2 * s + 6
    assert F(-1) in roots.values()
    assert roots.as_dict() == roots_irreducible_closed_form(g_pairs(s)).as_dict()


@pytest.mark.parametrize("n,m", [(2, 3), (2, 5), (3, 4), (3, 5), (4, 5), (2, 7), (5, 7)])
def test_quasi_homogeneous(n, m):
    g = branch_graph(n, [m])
    roots = topological_roots(g)
    assert roots.values() == quasi_homogeneous_roots(n, m)
    assert all(e.multiplicity == 1 for e in roots.entries)


@pytest.mark.parametrize("a,b", [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (1, 3)])
def test_monomial_curves(a, b):
    g = curve_graph([(1, [], a), (1, [], b)], [[None, 1], [1, None]])
    assert is_monomial_curve(g)
    assert topological_roots(g).as_dict() == monomial_roots(a, b)


@pytest.mark.parametrize("chars", corpus_branches(4, 60))
def test_graph_route_matches_closed_form(chars):
    g = build_from_branch(BranchSpec(chars))
    assert topological_roots(g, diagnostics=False).as_dict() == roots_irreducible_closed_form(chars).as_dict()


def test_classification_errors(cusp):
    with pytest.raises(NotRupture):
        classify_root(cusp, 0, 0)
    with pytest.raises(NotAttainable):
        classify_root(cusp, 2, 1)


@pytest.mark.parametrize("g", corpus_graphs(8, 20))
def test_roots_are_consistent(g):
    roots = topological_roots(g)
    values = [e.root for e in roots.entries]
    assert values == sorted(values, reverse=True)
    assert all(-2 < r < 0 for r in values)
    assert max(values) == -lct(g)
    for e in roots.entries:
        assert e.multiplicity in (1, 2)
        for s in e.sources:
            if s.criterion in (EPS_ZERO, THREE_NONINTEGERS) and g.r(s.divisor) >= 3:
                c = classify_root(g, s.divisor, s.v)
                assert c.root == e.root and c.criterion == s.criterion
            cert = certificate(g, s)
            assert cert["kind"] in ("chain", "residues", "non-exceptional")


def test_double_roots_exist_in_corpus():
    found = 0
    for g in corpus_graphs(8, 20):
        found += sum(1 for e in topological_roots(g).entries if e.multiplicity == 2)
    assert found > 0
