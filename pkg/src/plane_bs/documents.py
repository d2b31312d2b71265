"""JSON input documents and report sections.

Rationals travel as ``"p/q"`` strings. Input problems raise :class:`InputError`
carrying a JSON-pointer location.
"""

from __future__ import annotations

from fractions import Fraction
from math import prod

from .bs_roots import _q, certificate, topological_roots
from .curve_input import (
    BranchSpec,
    CharSequence,
    CurveSpec,
    IncompatibleContacts,
    InvalidInvariants,
    PuiseuxPairs,
)
from .multiplier_jumping import check_jumping_containment, jumping_numbers
from .resolution_graph import DualGraph, GraphError, build_from_curve
from .zeta_poles import check_zeta_containment, pole_classification, topological_zeta


class InputError(ValueError):
    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
        self.message = message


def _int(value, pointer: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(pointer, f"expected an integer, got {value!r}")
    return value


def _list(value, pointer: str) -> list:
    if not isinstance(value, list):
        raise InputError(pointer, f"expected an array, got {type(value).__name__}")
    return value


def _dict(value, pointer: str) -> dict:
    if not isinstance(value, dict):
        raise InputError(pointer, f"expected an object, got {type(value).__name__}")
    return value


def parse_rational(value, pointer: str) -> Fraction | None:
    if value is None:
        return None
    if isinstance(value, str) and value.strip().lower() in {"inf", "infinity"}:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise InputError(pointer, f"expected a rational string like \"3/2\", got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise InputError(pointer, f"not a rational: {value!r}") from None


def _parse_branch(data, pointer: str) -> BranchSpec:
    data = _dict(data, pointer)
    power = _int(data.get("power", 1), f"{pointer}/power")
    try:
        if "char_exponents" in data:
            ce = _dict(data["char_exponents"], f"{pointer}/char_exponents")
            n = _int(ce.get("n"), f"{pointer}/char_exponents/n")
            betas = _list(ce.get("betas", []), f"{pointer}/char_exponents/betas")
            betas = tuple(_int(b, f"{pointer}/char_exponents/betas/{i}") for i, b in enumerate(betas))
            inv = CharSequence(n, betas)
        elif "puiseux_pairs" in data:
            rows = _list(data["puiseux_pairs"], f"{pointer}/puiseux_pairs")
            pairs = []
            for i, row in enumerate(rows):
                row = _list(row, f"{pointer}/puiseux_pairs/{i}")
                if len(row) != 2:
                    raise InputError(f"{pointer}/puiseux_pairs/{i}", "a pair needs two entries")
                pairs.append(tuple(_int(x, f"{pointer}/puiseux_pairs/{i}/{j}") for j, x in enumerate(row)))
            inv = PuiseuxPairs(tuple(pairs))
        else:
            raise InputError(pointer, "branch needs char_exponents or puiseux_pairs")
        return BranchSpec(inv, power)
    except InvalidInvariants as exc:
        raise InputError(pointer, str(exc)) from None


def parse_curve(doc: dict) -> CurveSpec:
    rows = _list(doc["branches"], "/branches")
    branches = [_parse_branch(b, f"/branches/{i}") for i, b in enumerate(rows)]
    contacts = None
    if doc.get("contacts") is not None:
        matrix = _list(doc["contacts"], "/contacts")
        contacts = []
        for i, row in enumerate(matrix):
            row = _list(row, f"/contacts/{i}")
            contacts.append([parse_rational(x, f"/contacts/{i}/{j}") for j, x in enumerate(row)])
    try:
        return CurveSpec(branches, contacts)
    except (InvalidInvariants, IncompatibleContacts) as exc:
        raise InputError("/contacts", str(exc)) from None


def _raw_graph(doc: dict):
    base = "/dual_graph"
    data = _dict(doc["dual_graph"], base)
    vertices = _list(data.get("vertices"), f"{base}/vertices")
    ids, selfs, decs, births = [], {}, {}, {}
    for n, v in enumerate(vertices):
        p = f"{base}/vertices/{n}"
        v = _dict(v, p)
        vid = _int(v.get("id"), f"{p}/id")
        ids.append(vid)
        if "self_intersection" in v:
            selfs[vid] = _int(v["self_intersection"], f"{p}/self_intersection")
        if "decorations" in v:
            row = _dict(v["decorations"], f"{p}/decorations")
            try:
                decs[vid] = {int(w): _int(d, f"{p}/decorations/{w}") for w, d in row.items()}
            except ValueError:
                raise InputError(f"{p}/decorations", "keys must be neighbour ids") from None
        if v.get("birth_order") is not None:
            births[vid] = _int(v["birth_order"], f"{p}/birth_order")
    if selfs and decs:
        raise InputError(f"{base}/vertices", "give self_intersection or decorations, not both")
    if not selfs and not decs:
        raise InputError(f"{base}/vertices", "vertices need self_intersection or decorations")
    if selfs and len(selfs) != len(ids):
        raise InputError(f"{base}/vertices", "every vertex needs a self_intersection")
    edges = []
    for n, e in enumerate(_list(data.get("edges", []), f"{base}/edges")):
        e = _list(e, f"{base}/edges/{n}")
        if len(e) != 2:
            raise InputError(f"{base}/edges/{n}", "an edge joins two vertices")
        edges.append((_int(e[0], f"{base}/edges/{n}/0"), _int(e[1], f"{base}/edges/{n}/1")))
    arrows = []
    for n, a in enumerate(_list(data.get("arrowheads", []), f"{base}/arrowheads")):
        p = f"{base}/arrowheads/{n}"
        a = _dict(a, p)
        arrows.append((_int(a.get("host"), f"{p}/host"), _int(a.get("N", 1), f"{p}/N")))
    if births and len(births) != len(ids):
        raise InputError(f"{base}/vertices", "birth_order must be given for all vertices or none")
    return ids, edges, arrows, selfs or None, decs or None, births or None


def decoration_defects(ids, edges, arrows, decorations) -> list[tuple[str, str]]:
    """Edges of a hand-entered decorated graph where the edge determinant is not 1."""
    adj = {v: [] for v in ids}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    out = []
    for a, b in edges:
        try:
            alpha, beta = decorations[a][b], decorations[b][a]
            rest_a = prod(decorations[a][w] for w in adj[a] if w != b)
            rest_b = prod(decorations[b][w] for w in adj[b] if w != a)
        except KeyError:
            out.append(("missing decoration", f"edge (E{a},E{b})"))
            continue
        if alpha * beta - rest_a * rest_b != 1:
            out.append(("edge determinant", f"edge (E{a},E{b}): {alpha}*{beta} - {rest_a}*{rest_b} != 1"))
    return out


def load_graph(doc: dict, precheck: list | None = None) -> DualGraph:
    """Graph for either input form.

    With ``precheck`` set, decoration defects found before construction are
    appended to it and the graph is not built when there are any.
    """
    doc = _dict(doc, "")
    forms = [key for key in ("branches", "dual_graph") if key in doc]
    if len(forms) != 1:
        raise InputError("", "document needs exactly one of branches or dual_graph")
    if forms[0] == "branches":
        return build_from_curve(parse_curve(doc))
    ids, edges, arrows, selfs, decs, births = _raw_graph(doc)
    if decs is not None:
        defects = decoration_defects(ids, edges, arrows, decs)
        if defects:
            if precheck is not None:
                precheck.extend(defects)
                return None
            raise InputError("/dual_graph/vertices", "; ".join(loc for _, loc in defects))
    try:
        return DualGraph.from_data(ids, edges, arrows, self_intersections=selfs, decorations=decs, birth_order=births)
    except GraphError as exc:
        raise InputError("/dual_graph", str(exc)) from None


# ---------------------------------------------------------------------------
# Report sections


def graph_section(g: DualGraph) -> dict:
    return g.to_dict()


def roots_section(g: DualGraph, diagnostics: bool = False, certificates: bool = True) -> dict:
    roots = topological_roots(g, diagnostics=diagnostics)
    entries = []
    for e in roots.entries:
        item = e.to_dict(g)
        if certificates:
            for s, out in zip(e.sources, item["sources"]):
                out["certificate"] = certificate(g, s)
        entries.append(item)
    out = {"roots": entries}
    if diagnostics:
        out["diagnostics"] = [
            {"divisor": g.name(d.divisor), "v": d.v, "candidate": _q(d.candidate), "nonintegral": d.nonintegral}
            for d in roots.diagnostics
        ]
    return out


def jumping_section(g: DualGraph, roots=None) -> dict:
    jumps = jumping_numbers(g)
    report = check_jumping_containment(g, roots, jumps)
    return {
        "jumping_numbers": [
            {
                "value": _q(j.value),
                "support": [g.name(x) for x in j.support],
                "case": line.case,
                "root": _q(line.matched.root) if line.matched else None,
                "multiplicity": line.matched.multiplicity if line.matched else None,
            }
            for j, line in zip(jumps, report.lines)
        ],
        "matched": report.matched,
        "total": len(report.lines),
    }


def zeta_section(g: DualGraph, roots=None) -> dict:
    z = topological_zeta(g)
    report = check_zeta_containment(g, roots)
    poles = pole_classification(g)
    return {
        "principal_parts": {_q(p): [_q(c) for c in cs] for p, cs in sorted(z.parts.items(), reverse=True)},
        "poles": [
            {
                "location": _q(p.location),
                "order": p.order,
                "witnesses": [[g.name(x) for x in w] for w in p.witnesses],
                "root_multiplicity": line.matched.multiplicity if line.matched else None,
            }
            for p, line in zip(poles, report.lines)
        ],
        "two_path_agreement": z.poles() == {p.location: p.order for p in poles},
        "matched": report.matched,
        "total": len(report.lines),
    }


def audit_section(g: DualGraph) -> dict:
    roots = topological_roots(g, diagnostics=False)
    jumping = jumping_section(g, roots)
    zeta = zeta_section(g, roots)
    ok = (
        jumping["matched"] == jumping["total"]
        and zeta["matched"] == zeta["total"]
        and zeta["two_path_agreement"]
    )
    summary = (
        f"containment: {'PASS' if ok else 'FAIL'}; "
        f"jumping {jumping['matched']}/{jumping['total']} matched; "
        f"zeta poles {zeta['matched']}/{zeta['total']} matched"
    )
    return {"pass": ok, "summary": summary, "jumping": jumping, "zeta": zeta}


def curve_to_document(curve: CurveSpec) -> dict:
    branches = [
        {"char_exponents": {"n": b.invariants.n, "betas": list(b.invariants.betas)}, "power": b.power}
        for b in curve.branches
    ]
    doc = {"branches": branches}
    if len(branches) > 1:
        doc["contacts"] = [[None if x is None else _q(x) for x in row] for row in curve.contacts]
    return doc
