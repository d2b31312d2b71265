"""Decorated dual graphs of minimal log resolutions of plane curves.

Exceptional vertices are numbered ``0 .. V-1`` and arrowheads (strict transforms
of the branches) ``V .. V+A-1``, so a single integer names any node of the graph.

Two constructions exist.  :func:`build_from_curve` runs the combinatorics of
infinitely near points (multiplicity sequences from the Euclidean algorithm,
proximity, shared points up to each contact exponent).  :meth:`DualGraph.from_data`
accepts a tree given by hand.  Either way the numerical data ``N`` and ``k`` are
obtained by solving the tree-shaped linear systems, and the diagram calculus
(products of decorations along paths) gives an independent second route.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, prod
from typing import Iterable, Sequence

from .curve_input import (
    BranchSpec,
    CharSequence,
    CurveSpec,
    PuiseuxPairs,
    NumericalSemigroup,
    chars_to_pairs,
    pairs_to_chars,
    semigroup_to_pairs,
)


class GraphError(ValueError):
    """Structural problem with a dual graph given as input."""


class NotExceptional(ValueError):
    pass


class NotAdjacent(ValueError):
    pass


class InvariantViolation(AssertionError):
    """An internal consistency check failed; indicates a bug, not bad input."""


# ---------------------------------------------------------------------------
# Tree linear algebra


def _tree_order(adj: dict[int, list[int]], nodes: Iterable[int], root: int, blocked: int | None = None):
    """Parent map and BFS order of the component of ``root`` avoiding ``blocked``."""
    allowed = set(nodes)
    parent = {root: None}
    order = [root]
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w == blocked or w in parent or w not in allowed:
                continue
            parent[w] = u
            order.append(w)
            queue.append(w)
    return parent, order


def tree_determinant(diag: dict[int, int], adj: dict[int, list[int]], root: int, blocked: int | None = None) -> int:
    """Determinant of ``-M`` on the component of ``root`` in the tree minus ``blocked``.

    ``-M`` has the positive numbers ``diag`` on the diagonal and ``-1`` for each
    edge.  Eliminating leaves towards the root turns the determinant into the
    product of the pivots.
    """
    parent, order = _tree_order(adj, diag.keys(), root, blocked)
    pivot = {u: Fraction(diag[u]) for u in order}
    for u in reversed(order):
        p = parent[u]
        if p is not None:
            pivot[p] -= 1 / pivot[u]
    det = prod(pivot.values(), start=Fraction(1))
    if det.denominator != 1:
        raise InvariantViolation("non-integral tree determinant")
    return int(det)


def solve_tree_system(diag: dict[int, int], adj: dict[int, list[int]], rhs: dict[int, Fraction]) -> dict[int, Fraction]:
    """Solve ``(-M) x = rhs`` for a connected tree-shaped ``-M``."""
    if not diag:
        return {}
    root = min(diag)
    parent, order = _tree_order(adj, diag.keys(), root)
    if len(order) != len(diag):
        raise GraphError("exceptional part of the graph is not connected")
    a = {u: Fraction(diag[u]) for u in order}
    b = {u: Fraction(rhs.get(u, 0)) for u in order}
    for u in reversed(order):
        p = parent[u]
        if p is not None:
            if a[u] == 0:
                raise GraphError("intersection matrix is singular")
            a[p] -= 1 / a[u]
            b[p] += b[u] / a[u]
    x: dict[int, Fraction] = {}
    for u in order:
        p = parent[u]
        if a[u] == 0:
            raise GraphError("intersection matrix is singular")
        x[u] = (b[u] + (x[p] if p is not None else 0)) / a[u]
    return x


# ---------------------------------------------------------------------------
# The graph


@dataclass(frozen=True)
class Slot:
    """One adjacency slot of a vertex: ``role`` is ``"i1"``, ``"i2"`` or ``"j"``.

    ``node`` is ``None`` for the zero-divisor convention.
    """

    role: str
    node: int | None


@dataclass
class DualGraph:
    self_intersection: list[int]
    exc_edges: list[tuple[int, int]]
    arrow_host: list[int]
    arrow_N: list[int]
    birth_order: list[int] | None = None
    labels: list[str] | None = None
    minimal: bool = True
    cluster_N: list[int] | None = None
    cluster_k: list[int] | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        V = len(self.self_intersection)
        if V == 0:
            raise GraphError("graph needs at least one exceptional vertex")
        if not self.arrow_host:
            raise GraphError("graph needs at least one arrowhead")
        if len(self.arrow_host) != len(self.arrow_N):
            raise GraphError("arrowhead hosts and multiplicities differ in length")
        for e in self.self_intersection:
            if e >= 0:
                raise GraphError(f"self-intersections must be negative, got {e}")
        for h in self.arrow_host:
            if not 0 <= h < V:
                raise GraphError(f"arrowhead host {h} is not an exceptional vertex")
        for n in self.arrow_N:
            if n < 1:
                raise GraphError(f"arrowhead multiplicity must be positive, got {n}")
        self.exc_adj: dict[int, list[int]] = {u: [] for u in range(V)}
        seen = set()
        for a, b in self.exc_edges:
            if not (0 <= a < V and 0 <= b < V) or a == b:
                raise GraphError(f"edge ({a},{b}) is not between distinct exceptional vertices")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise GraphError(f"edge ({a},{b}) is repeated")
            seen.add(key)
            self.exc_adj[a].append(b)
            self.exc_adj[b].append(a)
        if len(self.exc_edges) != V - 1:
            raise GraphError("exceptional vertices do not form a tree")
        parent, order = _tree_order(self.exc_adj, range(V), 0)
        if len(order) != V:
            raise GraphError("exceptional vertices do not form a tree")
        for u in self.exc_adj:
            self.exc_adj[u].sort()
        self.adj: dict[int, list[int]] = {u: list(self.exc_adj[u]) for u in range(V)}
        for k, h in enumerate(self.arrow_host):
            self.adj[h].append(V + k)
            self.adj[V + k] = [h]
        self._compute_numerical_data()
        self._compute_decorations()
        self._designate_neighbours()

    # -- basic accessors -------------------------------------------------

    @property
    def V(self) -> int:
        return len(self.self_intersection)

    @property
    def A(self) -> int:
        return len(self.arrow_host)

    @property
    def exceptional(self) -> range:
        return range(self.V)

    @property
    def arrowheads(self) -> range:
        return range(self.V, self.V + self.A)

    @property
    def nodes(self) -> range:
        return range(self.V + self.A)

    def is_arrowhead(self, node: int) -> bool:
        return node >= self.V

    def host(self, node: int) -> int:
        return self.arrow_host[node - self.V]

    def power(self, node: int) -> int:
        return self.arrow_N[node - self.V]

    def name(self, node: int | None) -> str:
        if node is None:
            return "0"
        if self.is_arrowhead(node):
            return f"A{node - self.V}"
        if self.labels:
            return self.labels[node]
        return f"E{node}"

    def neighbors(self, u: int) -> list[int]:
        return self.adj[u]

    def r(self, u: int) -> int:
        """Number of components of the total transform meeting ``E_u``."""
        return len(self.adj[u])

    def exc_valency(self, u: int) -> int:
        return len(self.exc_adj[u])

    def arrowheads_at(self, u: int) -> list[int]:
        return [w for w in self.adj[u] if self.is_arrowhead(w)]

    def N_of(self, node: int | None) -> int:
        if node is None:
            return 0
        return self.power(node) if self.is_arrowhead(node) else self.N[node]

    def k_of(self, node: int | None) -> int:
        if node is None:
            return 1
        return 1 if self.is_arrowhead(node) else self.k[node]

    def decoration(self, u: int, w: int | None) -> int:
        if w is None:
            return 1
        return self.decorations[(u, w)]

    # -- numerical data ------------------------------------------------------

    def _diag(self) -> dict[int, int]:
        return {u: -e for u, e in enumerate(self.self_intersection)}

    def _compute_numerical_data(self) -> None:
        diag = self._diag()
        rhs_N = defaultdict(Fraction)
        for h, n in zip(self.arrow_host, self.arrow_N):
            rhs_N[h] += n
        sol_N = solve_tree_system(diag, self.exc_adj, rhs_N)
        # Adjunction K.E = -E^2 - 2 with K = sum kappa_j E_j.
        rhs_K = {u: Fraction(2 - d) for u, d in diag.items()}
        sol_K = solve_tree_system(diag, self.exc_adj, rhs_K)
        self.N = []
        self.k = []
        for u in range(self.V):
            n, kappa = sol_N[u], sol_K[u]
            if n.denominator != 1 or kappa.denominator != 1:
                raise GraphError(f"vertex {self.name(u)} gets non-integral numerical data")
            if n <= 0:
                raise GraphError(f"vertex {self.name(u)} gets non-positive multiplicity {n}")
            self.N.append(int(n))
            self.k.append(int(kappa) + 1)

    def _compute_decorations(self) -> None:
        diag = self._diag()
        self.decorations: dict[tuple[int, int], int] = {}
        for u in range(self.V):
            for w in self.adj[u]:
                if self.is_arrowhead(w):
                    self.decorations[(u, w)] = 1
                else:
                    self.decorations[(u, w)] = abs(tree_determinant(diag, self.exc_adj, w, blocked=u))

    def _designate_neighbours(self) -> None:
        V = self.V
        if self.birth_order is not None:
            if sorted(self.birth_order) != sorted(set(self.birth_order)) or len(self.birth_order) != V:
                raise GraphError("birth orders must be distinct, one per vertex")
            root = min(range(V), key=lambda u: self.birth_order[u])
        else:
            candidates = [
                u for u in range(V) if all(self.decorations[(u, w)] == 1 for w in self.exc_adj[u])
            ]
            if len(candidates) != 1:
                raise GraphError(
                    "cannot identify the first blow-up: "
                    f"{len(candidates)} vertices have all decorations equal to 1; give birth_order"
                )
            root = candidates[0]
        self.root = root
        parent, order = _tree_order(self.exc_adj, range(V), root)
        self.tree_parent = parent
        self.depth = {}
        for u in order:
            self.depth[u] = 0 if parent[u] is None else self.depth[parent[u]] + 1
        self.i1: dict[int, int | None] = {}
        self.i2: dict[int, int | None] = {}
        for u in range(V):
            self.i2[u] = parent[u]
            others = [w for w in self.exc_adj[u] if w != parent[u]]
            if self.birth_order is not None:
                earlier = []
                for w in others:
                    comp = self._component(w, blocked=u)
                    if any(x < V and self.birth_order[x] < self.birth_order[u] for x in comp):
                        earlier.append(w)
                if len(earlier) > 1:
                    raise GraphError(f"vertex {self.name(u)} has two earlier-born directions")
                self.i1[u] = earlier[0] if earlier else None
            else:
                big = [w for w in others if self.decorations[(u, w)] > 1]
                if len(big) > 1:
                    raise GraphError(
                        f"vertex {self.name(u)}: ambiguous satellite direction; give birth_order"
                    )
                self.i1[u] = big[0] if big else None
        self.satellite = [self.i1[u] is not None for u in range(V)]

    def _component(self, start: int, blocked: int) -> list[int]:
        key = ("component", start, blocked)
        if key not in self._cache:
            _, order = _tree_order(self.adj, self.nodes, start, blocked)
            self._cache[key] = order
        return self._cache[key]

    def component_nodes(self, start: int, blocked: int) -> list[int]:
        """Nodes (exceptional and arrowheads) reachable from ``start`` avoiding ``blocked``."""
        return self._component(start, blocked)

    def has_arrowhead_towards(self, u: int, w: int | None) -> bool:
        if w is None:
            return False
        return any(self.is_arrowhead(x) for x in self._component(w, u))

    # -- slots -----------------------------------------------------------------

    def slots(self, u: int) -> list[Slot]:
        if u >= self.V:
            raise NotExceptional(f"{self.name(u)} is not exceptional")
        key = ("slots", u)
        if key not in self._cache:
            i1, i2 = self.i1[u], self.i2[u]
            out = [Slot("i1", i1), Slot("i2", i2)]
            for w in self.adj[u]:
                if w != i1 and w != i2:
                    out.append(Slot("j", w))
            self._cache[key] = out
        return self._cache[key]

    def m(self, u: int) -> int:
        return len(self.slots(u))

    # -- paths and diagram calculus -------------------------------------------

    def path(self, a: int, b: int) -> list[int]:
        key = ("path", a, b)
        if key in self._cache:
            return self._cache[key]
        parent = {a: None}
        queue = deque([a])
        while queue:
            u = queue.popleft()
            if u == b:
                break
            for w in self.adj[u]:
                if w not in parent:
                    parent[w] = u
                    queue.append(w)
        out = [b]
        while out[-1] != a:
            out.append(parent[out[-1]])
        out.reverse()
        self._cache[key] = out
        return out

    def ell(self, x: int, target: int) -> int:
        """Product of decorations adjacent to, but not on, the path from ``x`` to ``target``.

        ``target`` may be an exceptional vertex, in which case the path is read
        as ending in a fresh arrowhead attached there.
        """
        key = ("ell", x, target)
        if key in self._cache:
            return self._cache[key]
        p = self.path(x, target)
        value = 1
        for idx, u in enumerate(p):
            if self.is_arrowhead(u):
                continue
            on_path = set()
            if idx > 0:
                on_path.add(p[idx - 1])
            if idx + 1 < len(p):
                on_path.add(p[idx + 1])
            for w in self.adj[u]:
                if w not in on_path:
                    value *= self.decorations[(u, w)]
        self._cache[key] = value
        return value

    def valuation_of_curvette(self, at: int, j: int) -> int:
        """``v_at`` of a curvette through a general point of ``E_j``."""
        if self.is_arrowhead(at):
            return 0
        return self.ell(at, j)

    def valuation_of_branch(self, at: int, k: int) -> int:
        """``v_at`` of the (reduced) branch whose strict transform is arrowhead ``k``."""
        if self.is_arrowhead(at):
            return 1 if at == k else 0
        return self.ell(at, k)

    # -- classification --------------------------------------------------------

    def is_rupture(self, u: int) -> bool:
        return u < self.V and self.r(u) >= 3

    def ruptures(self) -> list[int]:
        return [u for u in self.exceptional if self.r(u) >= 3]

    def sites(self) -> list[int]:
        """Nodes carrying a factor of a monomial form: vertices with ``r != 2`` and arrowheads."""
        return [u for u in self.exceptional if self.r(u) != 2] + list(self.arrowheads)

    def site_valuation(self, at: int, site: int) -> int:
        if self.is_arrowhead(site):
            return self.valuation_of_branch(at, site)
        return self.valuation_of_curvette(at, site)

    def direction(self, u: int, node: int) -> int | None:
        """Neighbour of ``u`` on the path towards ``node`` (``None`` if ``node == u``)."""
        if node == u:
            return None
        return self.path(u, node)[1]

    def intersection_matrix(self) -> list[list[int]]:
        M = [[0] * self.V for _ in range(self.V)]
        for u, e in enumerate(self.self_intersection):
            M[u][u] = e
        for a, b in self.exc_edges:
            M[a][b] = M[b][a] = 1
        return M

    def signature(self) -> tuple:
        """Hashable description used for equality tests and caching."""
        return (
            tuple(self.self_intersection),
            tuple(sorted((min(a, b), max(a, b)) for a, b in self.exc_edges)),
            tuple(self.arrow_host),
            tuple(self.arrow_N),
        )

    # -- serialization -----------------------------------------------------------

    def to_dict(self) -> dict:
        vertices = []
        for u in self.exceptional:
            vertices.append(
                {
                    "id": u,
                    "self_intersection": self.self_intersection[u],
                    "N": self.N[u],
                    "k": self.k[u],
                    "birth_order": self.birth_order[u] if self.birth_order else None,
                    "rupture": self.r(u) >= 3,
                    "satellite": self.satellite[u],
                    "dead_end": self.r(u) == 1,
                    "r": self.r(u),
                    "m": self.m(u),
                    "decorations": {self.name(w): self.decorations[(u, w)] for w in self.adj[u]},
                }
            )
        return {
            "vertices": vertices,
            "edges": [[a, b] for a, b in self.exc_edges],
            "arrowheads": [{"host": h, "N": n} for h, n in zip(self.arrow_host, self.arrow_N)],
            "minimal": self.minimal,
        }

    @classmethod
    def from_data(
        cls,
        vertex_ids: Sequence[int],
        edges: Sequence[tuple[int, int]],
        arrowheads: Sequence[tuple[int, int]],
        self_intersections: dict[int, int] | None = None,
        decorations: dict[int, dict[int, int]] | None = None,
        birth_order: dict[int, int] | None = None,
    ) -> "DualGraph":
        """Build a graph given by hand, with self-intersections or with decorations.

        Decorations are keyed by neighbour id; arrowhead decorations are implicitly 1.
        When decorations are given, multiplicities come from the diagram calculus and
        self-intersections from the balance equation; the decorations recomputed from
        the resulting intersection matrix must reproduce the input.
        """
        ids = list(vertex_ids)
        if len(set(ids)) != len(ids):
            raise GraphError("vertex ids must be unique")
        index = {v: i for i, v in enumerate(ids)}
        try:
            e2 = [(index[a], index[b]) for a, b in edges]
            hosts = [index[h] for h, _ in arrowheads]
        except KeyError as exc:
            raise GraphError(f"unknown vertex id {exc.args[0]}") from None
        powers = [int(n) for _, n in arrowheads]
        births = [birth_order[v] for v in ids] if birth_order else None
        labels = [f"E{v}" for v in ids]
        if (self_intersections is None) == (decorations is None):
            raise GraphError("give exactly one of self_intersections or decorations")
        if self_intersections is not None:
            selfs = [int(self_intersections[v]) for v in ids]
            return cls(selfs, e2, hosts, powers, births, labels)
        selfs = _self_intersections_from_decorations(ids, index, e2, hosts, powers, decorations)
        graph = cls(selfs, e2, hosts, powers, births, labels)
        for v, decs in decorations.items():
            for w, d in decs.items():
                got = graph.decorations[(index[v], index[w])]
                if got != d:
                    raise GraphError(
                        f"decoration at E{v} towards E{w} is {d} but the graph forces {got}"
                    )
        return graph


def _self_intersections_from_decorations(ids, index, edges, hosts, powers, decorations) -> list[int]:
    V = len(ids)
    adj: dict[int, list[int]] = {u: [] for u in range(V)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    arrows_at: dict[int, list[int]] = defaultdict(list)
    for k, h in enumerate(hosts):
        arrows_at[h].append(k)
    dec: dict[tuple[int, int], int] = {}
    for v, row in decorations.items():
        for w, d in row.items():
            if v not in index or w not in index:
                raise GraphError(f"decoration refers to unknown vertex ({v},{w})")
            dec[(index[v], index[w])] = int(d)
    for a, b in edges:
        if (a, b) not in dec or (b, a) not in dec:
            raise GraphError(f"edge (E{ids[a]},E{ids[b]}) is missing a decoration")

    def path(a, b):
        parent = {a: None}
        queue = deque([a])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in parent:
                    parent[w] = u
                    queue.append(w)
        out = [b]
        while out[-1] != a:
            out.append(parent[out[-1]])
        return out[::-1]

    def ell(x, target):
        p = path(x, target)
        value = 1
        for idx, u in enumerate(p):
            near = set()
            if idx > 0:
                near.add(p[idx - 1])
            if idx + 1 < len(p):
                near.add(p[idx + 1])
            for w in adj[u]:
                if w not in near:
                    value *= dec[(u, w)]
        return value

    N = [sum(powers[k] * ell(u, hosts[k]) for k in range(len(hosts))) for u in range(V)]
    selfs = []
    for u in range(V):
        total = sum(N[w] for w in adj[u]) + sum(powers[k] for k in arrows_at[u])
        if total % N[u]:
            raise GraphError(f"decorations at E{ids[u]} give a non-integral self-intersection")
        selfs.append(-(total // N[u]))
    return selfs


# ---------------------------------------------------------------------------
# Diagram calculus (independent of the linear solves above)


def diagram_calculus_N(g: DualGraph) -> dict[int, int]:
    return {
        u: sum(g.power(a) * g.ell(u, a) for a in g.arrowheads) for u in g.exceptional
    }


def diagram_calculus_k(g: DualGraph) -> dict[int, int]:
    return {
        u: sum(g.ell(u, j) * (2 - g.exc_valency(j)) for j in g.exceptional) for u in g.exceptional
    }


def valuation_of_element(g: DualGraph, elem: tuple[str, int], at: int) -> int:
    """``elem`` is ``("curvette", j)`` for an exceptional ``j`` or ``("branch", k)`` for an arrowhead."""
    kind, idx = elem
    if kind == "curvette":
        if g.is_arrowhead(idx):
            raise NotExceptional("curvettes live on exceptional vertices")
        return g.valuation_of_curvette(at, idx)
    if kind == "branch":
        if not g.is_arrowhead(idx):
            raise GraphError(f"{g.name(idx)} is not an arrowhead")
        return g.valuation_of_branch(at, idx)
    raise GraphError(f"unknown element kind {kind!r}")


def classify_vertices(g: DualGraph) -> dict[int, dict]:
    return {
        u: {
            "rupture": g.r(u) >= 3,
            "satellite": g.satellite[u],
            "dead_end": g.r(u) == 1,
            "valency": g.m(u),
            "r": g.r(u),
        }
        for u in g.exceptional
    }


def adjacent_decomposition(g: DualGraph, i: int, j: int) -> tuple[int, int]:
    """``(c0, c1)`` with ``N_i = a*c0 + (prod a_k)*c1`` and ``N_j = (prod b_k)*c0 + b*c1``.

    ``c0`` collects the arrowheads on the side of ``E_i`` and ``c1`` those on the
    side of ``E_j``.
    """
    if g.is_arrowhead(i) or g.is_arrowhead(j) or j not in g.exc_adj[i]:
        raise NotAdjacent(f"{g.name(i)} and {g.name(j)} are not adjacent exceptional vertices")
    a = g.decoration(i, j)
    b = g.decoration(j, i)
    side_i = set(g.component_nodes(i, j))
    c0_num = sum(g.power(k) * g.ell(i, k) for k in g.arrowheads if k in side_i)
    c1_num = sum(g.power(k) * g.ell(j, k) for k in g.arrowheads if k not in side_i)
    if c0_num % a or c1_num % b:
        raise InvariantViolation("adjacent decomposition is not integral")
    return c0_num // a, c1_num // b


# ---------------------------------------------------------------------------
# Validation


@dataclass
class ValidationReport:
    failures: list[tuple[str, str]]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"valid": self.ok, "failures": [{"invariant": a, "location": b} for a, b in self.failures]}


def edge_determinant_defect(g: DualGraph, a: int, b: int, decorations=None) -> int:
    dec = decorations or g.decorations
    alpha = dec[(a, b)]
    beta = dec[(b, a)]
    others_a = prod(dec[(a, w)] for w in g.adj[a] if w != b)
    others_b = prod(dec[(b, w)] for w in g.adj[b] if w != a)
    return alpha * beta - others_a * others_b


def validate_graph(g: DualGraph, decorations: dict | None = None) -> ValidationReport:
    """Check the structural invariants; ``decorations`` may override the computed ones."""
    dec = decorations or g.decorations
    failures: list[tuple[str, str]] = []
    for a, b in g.exc_edges:
        if edge_determinant_defect(g, a, b, dec) != 1:
            failures.append(("edge determinant rule", f"edge {g.name(a)}-{g.name(b)}"))
    for u in g.exceptional:
        ds = [dec[(u, w)] for w in g.adj[u]]
        if sum(1 for d in ds if d > 1) > 2:
            failures.append(("at most two decorations exceed 1", g.name(u)))
        for x in range(len(ds)):
            for y in range(x + 1, len(ds)):
                if gcd(ds[x], ds[y]) != 1:
                    failures.append(("decorations pairwise coprime", g.name(u)))
        balance = g.N[u] * g.self_intersection[u] + sum(g.N_of(w) for w in g.adj[u])
        if balance != 0:
            failures.append(("antinef balance", g.name(u)))
        if g.k[u] < 2:
            failures.append(("log discrepancy at least 2", g.name(u)))
    if g.k[g.root] != 2:
        failures.append(("first blow-up has k = 2", g.name(g.root)))
    dN, dk = diagram_calculus_N(g), diagram_calculus_k(g)
    for u in g.exceptional:
        if dN[u] != g.N[u]:
            failures.append(("diagram calculus reproduces N", g.name(u)))
        if dk[u] != g.k[u]:
            failures.append(("diagram calculus reproduces k", g.name(u)))
    if g.cluster_N is not None:
        for u in g.exceptional:
            if g.cluster_N[u] != g.N[u] or g.cluster_k[u] != g.k[u]:
                failures.append(("proximity data agree with the linear systems", g.name(u)))
    return ValidationReport(failures)


# ---------------------------------------------------------------------------
# Neighbouring valuations


@dataclass(frozen=True)
class ValuationProfile:
    vertex: int
    pairs: PuiseuxPairs
    generators: tuple[int, ...]
    n_g: int
    mbar_g: int
    n_prev: int
    mbar_prev: int
    m_prev: int
    m_g: int
    n_prefix: int
    a_g: int
    b_g: int
    c_g: int
    d_g: int
    outer: dict
    curvette_N: tuple[int, int, int]
    zero_i1: bool
    zero_i2: bool

    @property
    def g(self) -> int:
        return len(self.pairs.pairs)

    @property
    def side2_factor(self) -> int:
        """``c_g n_{g-1} m̄_{g-1} + d_g``: product of the far decorations at ``E_{i_2}``."""
        return self.c_g * self.n_prev * self.mbar_prev + self.d_g


def neighbor_profile(g: DualGraph, i: int) -> ValuationProfile:
    if i >= g.V:
        raise NotExceptional(f"{g.name(i)} is not exceptional")
    key = ("profile", i)
    if key in g._cache:
        return g._cache[key]
    i1, i2 = g.i1[i], g.i2[i]
    n_g = g.decoration(i, i1)
    mbar_g = g.decoration(i, i2)
    values = sorted({g.valuation_of_curvette(i, j) for j in g.exceptional})
    minimal = NumericalSemigroup.from_generators(values).minimal_generators()
    if n_g > 1:
        pairs = semigroup_to_pairs(minimal)
        gens = minimal
        if pairs.pairs[-1][1] != n_g or gens[-1] != mbar_g:
            raise InvariantViolation(f"semigroup at {g.name(i)} disagrees with its decorations")
    else:
        base = semigroup_to_pairs(minimal)
        chars = pairs_to_chars(base)
        if chars.betas:
            ns = chars.ns
            beta_next = mbar_g - ns[-1] * minimal[-1] + chars.betas[-1]
        else:
            beta_next = mbar_g
        ext = CharSequence(chars.n, chars.betas + (beta_next,), extended=True)
        pairs = chars_to_pairs(ext)
        gens = tuple(minimal) + (mbar_g,)
    ns = [nq for _, nq in pairs.pairs]
    chars = pairs_to_chars(pairs)
    ms = chars.ms
    n_prev = ns[-2] if len(ns) >= 2 else 1
    mbar_prev = gens[-2] // _gcd_prefix(gens, len(gens) - 2) if len(gens) >= 3 else 0
    m_prev = ms[-2] if len(ms) >= 2 else 0
    n_prefix = prod(ns[:-1])
    if i1 is None:
        a_g, b_g = 0, 1
    else:
        a_g = prod(g.decoration(i1, w) for w in g.adj[i1] if w != i)
        b_g = g.decoration(i1, i) - a_g * n_prev * mbar_prev
    if i2 is None:
        c_g, d_g = 1, 0
    else:
        c_g = g.decoration(i2, i)
        d_g = prod(g.decoration(i2, w) for w in g.adj[i2] if w != i) - c_g * n_prev * mbar_prev
    outer = {}
    for s in g.slots(i)[2:]:
        w = s.node
        if g.is_arrowhead(w):
            outer[w] = (1, 0)
        else:
            outer[w] = (1, prod(g.decoration(w, x) for x in g.adj[w] if x != i))
    curvette = (
        g.valuation_of_curvette(i, i),
        g.valuation_of_curvette(i1, i) if i1 is not None else 0,
        g.valuation_of_curvette(i2, i) if i2 is not None else 0,
    )
    prof = ValuationProfile(
        vertex=i,
        pairs=pairs,
        generators=tuple(gens),
        n_g=n_g,
        mbar_g=mbar_g,
        n_prev=n_prev,
        mbar_prev=mbar_prev,
        m_prev=m_prev,
        m_g=ms[-1],
        n_prefix=n_prefix,
        a_g=a_g,
        b_g=b_g,
        c_g=c_g,
        d_g=d_g,
        outer=outer,
        curvette_N=curvette,
        zero_i1=i1 is None,
        zero_i2=i2 is None,
    )
    g._cache[key] = prof
    return prof


def _gcd_prefix(gens: Sequence[int], upto: int) -> int:
    e = gens[0]
    for x in gens[1 : upto + 1]:
        e = gcd(e, x)
    return e


# ---------------------------------------------------------------------------
# Construction from equisingularity data


@dataclass
class _Point:
    pid: int
    parent: int | None
    label: tuple
    depth: int
    proximate: tuple[int, ...]
    mult: dict[int, int] = field(default_factory=dict)


def _euclid_rows(a: int, b: int) -> list[tuple[int, int]]:
    """Rows ``(multiplicity, count)`` of the Euclidean algorithm on ``(a, b)``."""
    rows = []
    while b:
        h, r = divmod(a, b)
        rows.append((b, h))
        a, b = b, r
    return rows


def _branch_coefficients(curve: CurveSpec, b: int):
    """Label coefficient of branch ``b`` at exponent ``r``.

    Branches agreeing beyond ``r`` get the same positive label, branches without a
    term at ``r`` get 0; this reproduces the sharing pattern prescribed by the
    contact matrix without choosing actual coefficients.
    """
    branch = curve.branches[b]
    size = len(curve.branches)
    support = set(branch.invariants.exponents())
    for a in range(size):
        if a != b and branch.in_grid(curve.contact(a, b)):
            support.add(curve.contact(a, b))

    def coefficient(r: Fraction) -> int:
        if r not in support:
            return 0
        classes: list[set[int]] = []
        for a in range(size):
            for cls_ in classes:
                rep = next(iter(cls_))
                if a == rep or curve.contact(a, rep) > r:
                    cls_.add(a)
                    break
            else:
                classes.append({a})
        for idx, cls_ in enumerate(classes):
            if b in cls_:
                return idx + 1
        raise AssertionError

    return coefficient


def _branch_points(curve: CurveSpec, b: int):
    """Sequence of ``(kind, key, multiplicity, proximate local indices)`` for branch ``b``."""
    branch = curve.branches[b]
    c = branch.invariants
    n = c.n
    e = c.e
    coeff = _branch_coefficients(curve, b)
    seq: list[tuple] = []

    def add_free(rho: Fraction, mult: int):
        prox = (len(seq) - 1,) if seq else ()
        seq.append(("free", (rho, coeff(rho)), mult, prox))

    beta_prev = 0
    for i, beta in enumerate(c.betas):
        rows = _euclid_rows(beta - beta_prev, e[i])
        start = len(seq) - 1  # point preceding this pair
        delta = Fraction(e[i], n)
        r_prev = Fraction(beta_prev, n)
        row_last: list[int] = []
        for ridx, (mult, count) in enumerate(rows):
            for j in range(count):
                if ridx == 0 or (ridx == 1 and j == 0):
                    rho = r_prev + (j if ridx == 0 else rows[0][1]) * delta
                    add_free(rho, mult)
                else:
                    pred = len(seq) - 1
                    if j == 0:
                        other = _last_of_rows(row_last, ridx - 2, start)
                    else:
                        other = _last_of_rows(row_last, ridx - 1, start)
                    seq.append(("sat", None, mult, (pred, other)))
            row_last.append(len(seq) - 1)
        beta_prev = beta
    if not c.betas:
        add_free(Fraction(0), 1)
    max_contact = max(
        (curve.contact(a, b) for a in range(len(curve.branches)) if a != b), default=None
    )
    if max_contact is not None:
        rho = Fraction(beta_prev, n) + (0 if c.betas else Fraction(1, n))
        while rho <= max_contact:
            add_free(rho, 1)
            rho += Fraction(1, n)
    return seq


def _last_of_rows(row_last: list[int], upto: int, fallback: int) -> int:
    """Last point within rows ``0..upto`` of the current pair, else the point before it."""
    best = fallback
    for idx in range(min(upto, len(row_last) - 1) + 1):
        if row_last[idx] > best:
            best = row_last[idx]
    return best


def build_from_curve(curve: CurveSpec) -> DualGraph:
    points: list[_Point] = []
    children: dict[tuple, int] = {}
    paths: list[list[int]] = []
    for b, branch in enumerate(curve.branches):
        seq = _branch_points(curve, b)
        gids: list[int] = []
        for kind, key, mult, prox in seq:
            parent = gids[-1] if gids else None
            prox_g = tuple(sorted(gids[x] for x in prox))
            label = ("free", key) if kind == "free" else ("sat", prox_g)
            tkey = (parent, label)
            if tkey not in children:
                pid = len(points)
                depth = 0 if parent is None else points[parent].depth + 1
                points.append(_Point(pid, parent, label, depth, prox_g))
                children[tkey] = pid
            pid = children[tkey]
            if points[pid].proximate != prox_g:
                raise InvariantViolation("shared point with different proximities")
            points[pid].mult[b] = mult
            gids.append(pid)
        paths.append(gids)

    own_count = [len(_branch_points(CurveSpec([br]), 0)) for br in curve.branches]
    keep: set[int] = set()
    for b, gids in enumerate(paths):
        keep.update(gids[: own_count[b]])
    for pt in points:
        if len(pt.mult) >= 2:
            keep.add(pt.pid)
    # Ancestors of kept points must be kept as well.
    for pid in list(keep):
        p = points[pid].parent
        while p is not None and p not in keep:
            keep.add(p)
            p = points[p].parent

    order = sorted(keep, key=lambda pid: (points[pid].depth, pid))
    new_id = {pid: i for i, pid in enumerate(order)}
    V = len(order)
    prox_of = {new_id[pid]: [new_id[q] for q in points[pid].proximate] for pid in order}
    proximate_to: dict[int, list[int]] = defaultdict(list)
    for p, qs in prox_of.items():
        for q in qs:
            proximate_to[q].append(p)

    for q in range(V):
        pid = order[q]
        for b, mult in points[pid].mult.items():
            total = sum(points[order[p]].mult.get(b, 0) for p in proximate_to[q])
            if total and total != mult:
                raise InvariantViolation(f"proximity equality fails at point {q} for branch {b}")

    self_int = [-1 - len(proximate_to[p]) for p in range(V)]
    edges = []
    for p in range(V):
        for q in prox_of[p]:
            shared = [x for x in proximate_to[q] if p in prox_of[x]]
            if not shared:
                edges.append((q, p))
    hosts = []
    powers = []
    for b, gids in enumerate(paths):
        last = max((new_id[pid] for pid in gids if pid in keep))
        hosts.append(last)
        powers.append(curve.branches[b].power)

    N = [0] * V
    kappa = [0] * V
    for p in range(V):
        pid = order[p]
        N[p] = sum(curve.branches[b].power * m for b, m in points[pid].mult.items())
        N[p] += sum(N[q] for q in prox_of[p])
        kappa[p] = 1 + sum(kappa[q] for q in prox_of[p])
    g = DualGraph(
        self_int,
        edges,
        hosts,
        powers,
        birth_order=list(range(V)),
        cluster_N=N,
        cluster_k=[x + 1 for x in kappa],
    )
    g.is_satellite_point = [len(prox_of[p]) == 2 for p in range(V)]
    for p in range(V):
        if g.is_satellite_point[p] != g.satellite[p]:
            raise InvariantViolation(f"satellite flag mismatch at E{p}")
        if g.N[p] != N[p] or g.k[p] != kappa[p] + 1:
            raise InvariantViolation(f"proximity data disagree with linear systems at E{p}")
    return g


def build_from_branch(branch: BranchSpec) -> DualGraph:
    return build_from_curve(CurveSpec([branch]))


# ---------------------------------------------------------------------------
# Extra blow-ups (produce non-minimal graphs for resolution-independence tests)


def _rebuild(g: DualGraph, selfs, edges, hosts, births) -> DualGraph:
    out = DualGraph(list(selfs), list(edges), list(hosts), list(g.arrow_N), birth_order=list(births))
    out.minimal = False
    return out


def blow_up_edge(g: DualGraph, a: int, b: int) -> DualGraph:
    if b not in g.exc_adj[a]:
        raise NotAdjacent(f"{g.name(a)} and {g.name(b)} are not adjacent")
    V = g.V
    selfs = list(g.self_intersection) + [-1]
    selfs[a] -= 1
    selfs[b] -= 1
    edges = [e for e in g.exc_edges if set(e) != {a, b}] + [(a, V), (b, V)]
    births = (g.birth_order or list(range(V))) + [max(g.birth_order or [V - 1]) + 1]
    return _rebuild(g, selfs, edges, g.arrow_host, births)


def blow_up_free_point(g: DualGraph, a: int) -> DualGraph:
    V = g.V
    selfs = list(g.self_intersection) + [-1]
    selfs[a] -= 1
    edges = list(g.exc_edges) + [(a, V)]
    births = (g.birth_order or list(range(V))) + [max(g.birth_order or [V - 1]) + 1]
    return _rebuild(g, selfs, edges, g.arrow_host, births)


def blow_up_arrow_point(g: DualGraph, arrow: int) -> DualGraph:
    k = arrow - g.V
    a = g.arrow_host[k]
    V = g.V
    selfs = list(g.self_intersection) + [-1]
    selfs[a] -= 1
    edges = list(g.exc_edges) + [(a, V)]
    hosts = list(g.arrow_host)
    hosts[k] = V
    births = (g.birth_order or list(range(V))) + [max(g.birth_order or [V - 1]) + 1]
    return _rebuild(g, selfs, edges, hosts, births)
