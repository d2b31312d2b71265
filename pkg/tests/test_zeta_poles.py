from fractions import Fraction as F

import pytest
import sympy

from conftest import branch_graph, corpus_graphs, curve_graph, family_graph
from plane_bs.bs_roots import topological_roots
from plane_bs.zeta_poles import (
    check_zeta_containment,
    euler_characteristic_check,
    pole_classification,
    topological_zeta,
)

S = sympy.Symbol("s")


def sympy_zeta(g):
    expr = 0
    for i in g.exceptional:
        expr += sympy.Rational(2 - g.r(i)) / (g.N[i] * S + g.k[i])
    edges = list(g.exc_edges) + [(g.host(a), a) for a in g.arrowheads]
    for x, y in edges:
        expr += 1 / ((g.N_of(x) * S + g.k_of(x)) * (g.N_of(y) * S + g.k_of(y)))
    return sympy.cancel(sympy.together(expr))


def sympy_poles(expr):
    _, den = sympy.fraction(expr)
    return {F(str(r)): k for r, k in sympy.roots(sympy.Poly(den, S)).items()}


GRAPHS = [branch_graph(2, [3]), branch_graph(1, []), family_graph(3), family_graph(5), curve_graph([(2, [3], 2)])]
GRAPHS += [curve_graph([(1, [], a), (1, [], b)], [[None, 1], [1, None]]) for a, b in [(1, 1), (2, 2), (2, 3)]]
GRAPHS += corpus_graphs(41, 25)


def test_cusp_zeta(cusp):
    z = topological_zeta(cusp)
    for x in (F(0), F(1), F(7, 3), F(-2, 5)):
        assert z(x) == (4 * x + 5) / ((x + 1) * (6 * x + 5))
    assert z.poles() == {F(-5, 6): 1, F(-1): 1}


def test_cusp_classification(cusp):
    poles = pole_classification(cusp)
    assert [(p.location, p.order) for p in poles] == [(F(-5, 6), 1), (F(-1), 1)]
    assert poles[0].witnesses == [(2,)]


def test_smooth_branch():
    assert topological_zeta(branch_graph(1, [])).poles() == {F(-1): 1}


@pytest.mark.parametrize("s", [3, 4, 5, 6])
def test_family_poles(s):
    z = topological_zeta(family_graph(s))
    assert z.poles() == {F(-5, 12): 1, F(-(2 * s + 5), 4 * s + 14): 1, F(-1): 1}


def test_double_cusp_pole():
    g = curve_graph([(2, [3], 2)])
    assert topological_zeta(g).poles() == {F(-5, 12): 1, F(-1, 2): 1}


def test_order_two_from_equal_adjacent_ratios():
    g = curve_graph([(1, [], 2), (1, [], 2)], [[None, 1], [1, None]])
    assert topological_zeta(g).poles() == {F(-1, 2): 2}
    assert pole_classification(g)[0].order == 2
    report = check_zeta_containment(g)
    assert report.ok and report.lines[0].matched.multiplicity == 2


@pytest.mark.parametrize("g", GRAPHS)
def test_rational_function_agrees_with_sympy(g):
    expr = sympy_zeta(g)
    z = topological_zeta(g)
    assert z.poles() == sympy_poles(expr)
    for x in (F(3), F(1, 7), F(-13, 5)):
        assert z(x) == F(str(expr.subs(S, sympy.Rational(x.numerator, x.denominator))))
    num, den = sympy.fraction(expr)
    assert sympy.degree(num, S) < sympy.degree(den, S)


@pytest.mark.parametrize("g", GRAPHS)
def test_two_paths_agree(g):
    assert topological_zeta(g).poles() == {p.location: p.order for p in pole_classification(g)}


@pytest.mark.parametrize("g", GRAPHS)
def test_euler_characteristic(g):
    assert euler_characteristic_check(g)


@pytest.mark.parametrize("g", GRAPHS)
def test_containment(g):
    report = check_zeta_containment(g, topological_roots(g, diagnostics=False))
    assert report.ok


def test_example_containment(family3):
    report = check_zeta_containment(family3)
    assert report.ok and report.matched == 3


def test_corpus_has_order_two_poles():
    orders = [p.order for g in corpus_graphs(41, 60) for p in pole_classification(g)]
    assert 2 in orders
