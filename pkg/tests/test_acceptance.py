"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import random
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import family_graph  # noqa: E402
from plane_bs.bs_roots import roots_irreducible_closed_form, topological_roots  # noqa: E402
from plane_bs.corpus import random_branch, random_curve  # noqa: E402
from plane_bs.curve_input import BranchSpec, CharSequence, chars_to_pairs, pairs_to_semigroup  # noqa: E402
from plane_bs.forms_residues import (  # noqa: E402
    FormExponent,
    normalize_form,
    pattern_violations,
    residues,
    residues_closed_form,
)
from plane_bs.multiplier_jumping import antinef_closure, check_jumping_containment, is_antinef, jumping_numbers  # noqa: E402
from plane_bs.resolution_graph import (  # noqa: E402
    build_from_branch,
    build_from_curve,
    diagram_calculus_N,
    diagram_calculus_k,
    edge_determinant_defect,
)
from plane_bs.zeta_poles import check_zeta_containment, pole_classification, topological_zeta  # noqa: E402


def report(number, title, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}" + (f" ({detail})" if detail else "")
    print(line, flush=True)
    return ok


def members_below(gens, bound):
    reach = [False] * bound
    reach[0] = True
    for x in range(1, bound):
        reach[x] = any(x >= g and reach[x - g] for g in gens)
    return [x for x in range(bound) if reach[x]]


def criterion_1():
    problems = []
    for s in (3, 4, 5, 6):
        chars = CharSequence(4, (6, 2 * s + 1))
        sg = pairs_to_semigroup(chars_to_pairs(chars))
        if sg.generators != (4, 6, 2 * s + 7):
            problems.append(f"s={s} semigroup {sg.generators}")
        g = build_from_branch(BranchSpec(chars))
        top = s + 1
        if g.N[:3] != [4, 6, 12] or g.N[top] != 4 * s + 14:
            problems.append(f"s={s} N {g.N}")
        if [k - 1 for k in g.k[:3]] != [1, 2, 4] or g.k[top] != 2 * s + 5:
            problems.append(f"s={s} k {g.k}")
        if g.ruptures() != [2, top]:
            problems.append(f"s={s} ruptures {g.ruptures()}")
        roots = topological_roots(g)
        by_div = roots.by_divisor()
        if sorted(by_div.get(2, [])) != [F(-13, 12), F(-11, 12), F(-7, 12), F(-5, 12)]:
            problems.append(f"s={s} E2 roots {by_div.get(2)}")
        expected_top = set()
        for nu in members_below((4, 6, 2 * s + 7), 4 * s + 14):
            sig = F(-(2 * s + 5 + nu), 4 * s + 14)
            if ((2 * s + 6) * sig).denominator != 1 and ((2 * s + 7) * sig).denominator != 1:
                expected_top.add(sig)
        got_top = by_div.get(top, [])
        if len(got_top) != 2 * s + 6 or set(got_top) != expected_top:
            problems.append(f"s={s} top roots {len(got_top)}")
        if F(-1) not in roots.values():
            problems.append(f"s={s} missing -1")
    return report(1, "branch family <4,6,2s+7>, s=3..6: semigroup, N, k, ruptures, roots", not problems, "; ".join(problems))


def criterion_2():
    problems = []
    for s in (3, 4, 5, 6):
        g = family_graph(s)
        poles = topological_zeta(g).poles()
        want = {F(-5, 12): 1, F(-(2 * s + 5), 4 * s + 14): 1, F(-1): 1}
        if poles != want:
            problems.append(f"s={s} poles {poles}")
        vals = [j.value for j in jumping_numbers(g)]
        if len(vals) != s + 5 or not {F(5, 12), F(11, 12), F(2 * s + 9, 4 * s + 14)} <= set(vals):
            problems.append(f"s={s} jumping {vals}")
    return report(2, "branch family <4,6,2s+7>: zeta poles and jumping numbers", not problems, "; ".join(problems))


def quasi_homogeneous_top(n, m):
    out = {F(-1)}
    for i in range(1, m + 2):
        for j in range(1, n + 2):
            if n * i + m * j < n * m + n + m:
                sig = F(-(n * i + m * j), n * m)
                if (n * sig).denominator != 1 and (m * sig).denominator != 1:
                    out.add(sig)
    return out


def criterion_3():
    problems = []
    for n, m in [(2, 3), (2, 5), (3, 4), (3, 5), (4, 5)]:
        got = topological_roots(build_from_branch(BranchSpec(CharSequence(n, (m,)))))
        if got.values() != quasi_homogeneous_top(n, m) or any(e.multiplicity != 1 for e in got.entries):
            problems.append(f"({n},{m})")
    return report(3, "quasi-homogeneous y^n = x^m roots", not problems, ", ".join(problems))


def criterion_4():
    rng = random.Random(2024)
    start = time.perf_counter()
    bad = 0
    for _ in range(200):
        chars = random_branch(rng, max_conductor=2000)
        g = build_from_branch(BranchSpec(chars))
        if topological_roots(g, diagnostics=False).as_dict() != roots_irreducible_closed_form(chars).as_dict():
            bad += 1
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 60
    return report(4, "graph roots equal closed form on 200 random branches", ok, f"{bad} mismatches, {elapsed:.1f}s")


def criterion_5():
    rng = random.Random(77)
    failures = 0
    jumps = poles = 0
    for _ in range(100):
        g = build_from_curve(random_curve(rng))
        roots = topological_roots(g, diagnostics=False)
        jr = check_jumping_containment(g, roots)
        zr = check_zeta_containment(g, roots)
        jumps += len(jr.lines)
        poles += len(zr.lines)
        failures += (not jr.ok) + (not zr.ok)
    return report(
        5, "jumping numbers and zeta poles inside the roots, 100 random curves", failures == 0,
        f"{failures} failures over {jumps} jumping numbers and {poles} poles",
    )


def criterion_6():
    rng = random.Random(99)
    counts = dict.fromkeys(
        ["residue sum", "edge determinant", "N/k two paths", "closed form", "normal pattern", "unloading", "zeta paths"], 0
    )
    for _ in range(40):
        g = build_from_curve(random_curve(rng, max_multiplicity=200))
        for a, b in g.exc_edges:
            counts["edge determinant"] += edge_determinant_defect(g, a, b) != 1
        counts["N/k two paths"] += diagram_calculus_N(g) != dict(enumerate(g.N))
        counts["N/k two paths"] += diagram_calculus_k(g) != dict(enumerate(g.k))
        for i in g.exceptional:
            for _ in range(2):
                form = FormExponent.of({s: rng.randint(0, 3) for s in g.sites() if rng.random() < 0.4})
                r = residues(g, form, i)
                delta = form.get(i) if g.r(i) != 2 else 0
                counts["residue sum"] += sum(r.eps) + delta != g.m(i) - 2
                rc = residues_closed_form(g, form, i)
                counts["closed form"] += (rc.sigma, rc.eps) != (r.sigma, r.eps)
                normal = normalize_form(g, form, i)
                counts["normal pattern"] += bool(pattern_violations(g, i, residues(g, normal, i).eps))
        for _ in range(5):
            D = [rng.randint(0, 20) for _ in g.exceptional]
            C = antinef_closure(g, D)
            counts["unloading"] += not is_antinef(g, C) or antinef_closure(g, C) != C
        counts["zeta paths"] += topological_zeta(g).poles() != {p.location: p.order for p in pole_classification(g)}
    total = sum(counts.values())
    return report(6, "invariant suites on random curves", total == 0, ", ".join(f"{k}: {v}" for k, v in counts.items()))


def criterion_7():
    g = build_from_branch(BranchSpec(CharSequence(2, (3,))))
    roots = topological_roots(g)
    ok = roots.as_dict() == {F(-5, 6): 1, F(-7, 6): 1, F(-1): 1}
    ok &= [j.value for j in jumping_numbers(g)] == [F(5, 6)]
    ok &= {p.location: p.order for p in pole_classification(g)} == {F(-5, 6): 1, F(-1): 1}
    ok &= topological_zeta(g).poles() == {F(-5, 6): 1, F(-1): 1}
    ok &= check_jumping_containment(g, roots).ok and check_zeta_containment(g, roots).ok
    return report(7, "cusp end to end", ok)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[c.__name__ for c in CRITERIA])
def test_acceptance(criterion, capsys):
    with capsys.disabled():
        print()
        ok = criterion()
    assert ok


if __name__ == "__main__":
    outcomes = [c() for c in CRITERIA]
    sys.exit(0 if all(outcomes) else 1)
