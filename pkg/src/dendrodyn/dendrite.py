"""Exact geometry of weighted finite trees used as truncated dendrites.

A dendrite is stored as a finite tree whose edges carry positive rational
weights and are enumerated in a chained order (every edge after the first
attaches to the already-built part in exactly one vertex).  Points are either
vertices or interior edge positions with a rational parameter, so all metric
quantities (arc lengths, Hausdorff distances, cover meshes) are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import (
    ChainingViolation,
    CycleCreated,
    DendrodynError,
    EmptyCover,
    EmptySet,
    EmptySubdendrite,
    InvalidDendrite,
    PointOffDendrite,
    QuotientDisconnected,
)
from .util import frac, id_key, point_key

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class VertexPoint:
    vertex: object

    def __repr__(self):
        return f"V({self.vertex})"


@dataclass(frozen=True)
class EdgePoint:
    edge: object
    t: Fraction

    def __repr__(self):
        return f"P({self.edge}@{self.t})"


DPoint = VertexPoint | EdgePoint


@dataclass(frozen=True)
class Edge:
    eid: object
    u: object
    v: object
    level: int
    weight: Fraction


class Dendrite:
    """A connected weighted tree (or, via :meth:`forest`, a disjoint union).

    ``edges`` entries are ``(eid, u, v)`` or ``(eid, u, v, level)``; a missing
    level defaults to the 1-based enumeration index.  ``weight_rule`` is
    ``"dyadic"`` (edge number i weighs 2**-i) or an explicit weight sequence.
    """

    def __init__(self, vertices: Iterable, edges: Sequence, weight_rule="dyadic",
                 *, require_connected: bool = True):
        vset = set(vertices)
        if not vset:
            raise InvalidDendrite("a dendrite needs at least one vertex")
        resolved: list[Edge] = []
        if weight_rule == "dyadic":
            weights = [Fraction(1, 2 ** (i + 1)) for i in range(len(edges))]
        else:
            weights = [frac(w) for w in weight_rule]
            if len(weights) != len(edges):
                raise InvalidDendrite("custom weight list does not match edge count")
        for i, entry in enumerate(edges):
            if len(entry) == 3:
                eid, u, v = entry
                level = i + 1
            else:
                eid, u, v, level = entry
            if u not in vset or v not in vset:
                raise InvalidDendrite(f"edge {eid!r} references unknown vertices")
            if u == v:
                raise InvalidDendrite(f"edge {eid!r} is a loop")
            if weights[i] <= 0:
                raise InvalidDendrite(f"edge {eid!r} has non-positive weight")
            resolved.append(Edge(eid, u, v, int(level), weights[i]))
        if len({e.eid for e in resolved}) != len(resolved):
            raise InvalidDendrite("duplicate edge ids")

        self._vertices = frozenset(vset)
        self._edges = tuple(resolved)
        self._weight_rule = "dyadic" if weight_rule == "dyadic" else tuple(weights)
        self._edge_by_id = {e.eid: e for e in resolved}
        adj: dict[object, list[tuple[Edge, object]]] = {v: [] for v in vset}
        for e in resolved:
            adj[e.u].append((e, e.v))
            adj[e.v].append((e, e.u))
        self._adj = adj

        self._check_forest()
        self._connected = self._build_orientation()
        if require_connected and not self._connected:
            raise InvalidDendrite("dendrite is not connected")
        if self._connected:
            self._check_chaining()

    @classmethod
    def forest(cls, vertices, edges, weight_rule="dyadic") -> "Dendrite":
        """An acyclic, possibly disconnected instance (collapse input only)."""
        return cls(vertices, edges, weight_rule, require_connected=False)

    # -- construction checks -------------------------------------------------

    def _check_forest(self):
        parent = {v: v for v in self._vertices}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for e in self._edges:
            ra, rb = find(e.u), find(e.v)
            if ra == rb:
                raise InvalidDendrite(f"edge {e.eid!r} creates a cycle")
            parent[ra] = rb

    def _build_orientation(self) -> bool:
        """BFS parent tables per component; returns connectivity."""
        order: list[object] = []
        parent: dict[object, object | None] = {}
        parent_edge: dict[object, Edge | None] = {}
        depth: dict[object, int] = {}
        rootdist: dict[object, Fraction] = {}
        component: dict[object, object] = {}
        for root in sorted(self._vertices, key=id_key):
            if root in parent:
                continue
            parent[root] = None
            parent_edge[root] = None
            depth[root] = 0
            rootdist[root] = ZERO
            component[root] = root
            queue = [root]
            while queue:
                head = queue.pop(0)
                order.append(head)
                for e, other in sorted(self._adj[head],
                                       key=lambda item: id_key(item[0].eid)):
                    if other in parent:
                        continue
                    parent[other] = head
                    parent_edge[other] = e
                    depth[other] = depth[head] + 1
                    rootdist[other] = rootdist[head] + e.weight
                    component[other] = component[root]
                    queue.append(other)
        self._order = order
        self._parent = parent
        self._parent_edge = parent_edge
        self._depth = depth
        self._rootdist = rootdist
        self._component = component
        roots = {component[v] for v in self._vertices}
        return len(roots) == 1

    def _check_chaining(self):
        seen: set[object] = set()
        for i, e in enumerate(self._edges):
            if i == 0:
                seen.update((e.u, e.v))
                continue
            hits = (e.u in seen) + (e.v in seen)
            if hits != 1:
                raise ChainingViolation(i + 1)
            seen.update((e.u, e.v))

    # -- basic accessors -----------------------------------------------------

    @property
    def vertices(self) -> frozenset:
        return self._vertices

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    def edge(self, eid) -> Edge:
        try:
            return self._edge_by_id[eid]
        except KeyError:
            raise PointOffDendrite(f"unknown edge {eid!r}") from None

    def degree(self, vid) -> int:
        if vid not in self._vertices:
            raise PointOffDendrite(f"unknown vertex {vid!r}")
        return len(self._adj[vid])

    def total_weight(self) -> Fraction:
        return sum((e.weight for e in self._edges), ZERO)

    def structure_key(self):
        return (tuple(sorted(self._vertices, key=id_key)),
                tuple((e.eid, e.u, e.v, e.level, e.weight) for e in self._edges))

    def same_space(self, other: "Dendrite") -> bool:
        return self is other or self.structure_key() == other.structure_key()

    # -- points --------------------------------------------------------------

    def vertex_point(self, vid) -> VertexPoint:
        if vid not in self._vertices:
            raise PointOffDendrite(f"unknown vertex {vid!r}")
        return VertexPoint(vid)

    def point(self, eid, t) -> DPoint:
        """Canonical point on edge ``eid``; parameters 0 and 1 become vertices."""
        e = self.edge(eid)
        t = frac(t)
        if t < 0 or t > 1:
            raise PointOffDendrite(f"parameter {t} outside [0, 1]")
        if t == 0:
            return VertexPoint(e.u)
        if t == 1:
            return VertexPoint(e.v)
        return EdgePoint(eid, t)

    def check_point(self, p: DPoint) -> DPoint:
        if isinstance(p, VertexPoint):
            return self.vertex_point(p.vertex)
        if isinstance(p, EdgePoint):
            return self.point(p.edge, p.t)
        raise PointOffDendrite(f"not a dendrite point: {p!r}")

    def skeleton_points(self, include_midpoints: bool = True) -> list[DPoint]:
        pts: list[DPoint] = [VertexPoint(v) for v in sorted(self._vertices, key=id_key)]
        if include_midpoints:
            pts.extend(self.point(e.eid, Fraction(1, 2)) for e in self._edges)
        return pts

    # -- metric --------------------------------------------------------------

    def _lca(self, a, b):
        if self._component[a] != self._component[b]:
            raise DendrodynError("vertices lie in different components")
        da, db = self._depth[a], self._depth[b]
        while da > db:
            a = self._parent[a]
            da -= 1
        while db > da:
            b = self._parent[b]
            db -= 1
        while a != b:
            a = self._parent[a]
            b = self._parent[b]
        return a

    def vertex_distance(self, a, b) -> Fraction:
        if a == b:
            return ZERO
        lca = self._lca(a, b)
        return self._rootdist[a] + self._rootdist[b] - 2 * self._rootdist[lca]

    def _anchors(self, p: DPoint) -> list[tuple[object, Fraction]]:
        """(vertex, cost from p to that vertex) pairs; one entry for vertices."""
        if isinstance(p, VertexPoint):
            return [(p.vertex, ZERO)]
        e = self.edge(p.edge)
        return [(e.u, p.t * e.weight), (e.v, (1 - p.t) * e.weight)]

    def distance(self, a: DPoint, b: DPoint) -> Fraction:
        a = self.check_point(a)
        b = self.check_point(b)
        if a == b:
            return ZERO
        if isinstance(a, EdgePoint) and isinstance(b, EdgePoint) and a.edge == b.edge:
            return abs(a.t - b.t) * self.edge(a.edge).weight
        best = None
        for va, ca in self._anchors(a):
            for vb, cb in self._anchors(b):
                d = ca + self.vertex_distance(va, vb) + cb
                if best is None or d < best:
                    best = d
        return best

    def vertex_path(self, a, b) -> list:
        """Vertex chain from ``a`` to ``b`` along the unique tree path."""
        lca = self._lca(a, b)
        up = []
        x = a
        while x != lca:
            up.append(x)
            x = self._parent[x]
        down = []
        x = b
        while x != lca:
            down.append(x)
            x = self._parent[x]
        return up + [lca] + list(reversed(down))

    def edge_between(self, a, b) -> Edge:
        for e, other in self._adj[a]:
            if other == b:
                return e
        raise DendrodynError(f"no edge between {a!r} and {b!r}")

    # -- arcs and hulls --------------------------------------------------------

    def arc(self, x: DPoint, y: DPoint) -> "Subdendrite":
        """The unique arc [x, y]; degenerate when x == y."""
        x = self.check_point(x)
        y = self.check_point(y)
        if x == y:
            if isinstance(x, VertexPoint):
                return Subdendrite._make(self, {x.vertex}, {})
            return Subdendrite._make(self, set(), {x.edge: (x.t, x.t)})
        if isinstance(x, EdgePoint) and isinstance(y, EdgePoint) and x.edge == y.edge:
            lo, hi = sorted((x.t, y.t))
            return Subdendrite._make(self, set(), {x.edge: (lo, hi)})

        best = None
        for va, ca in self._anchors(x):
            for vb, cb in self._anchors(y):
                d = ca + self.vertex_distance(va, vb) + cb
                if best is None or d < best[0]:
                    best = (d, va, vb)
        _, va, vb = best
        chain = self.vertex_path(va, vb)
        vertices = set(chain)
        portions: dict[object, tuple[Fraction, Fraction]] = {}
        for a, b in zip(chain, chain[1:]):
            e = self.edge_between(a, b)
            portions[e.eid] = (ZERO, ONE)
        for p, anchor in ((x, va), (y, vb)):
            if isinstance(p, EdgePoint):
                e = self.edge(p.edge)
                if anchor == e.u:
                    part = (ZERO, p.t)
                else:
                    part = (p.t, ONE)
                prev = portions.get(p.edge)
                if prev is not None:
                    part = (min(prev[0], part[0]), max(prev[1], part[1]))
                portions[p.edge] = part
        return Subdendrite._make(self, vertices, portions)

    def hull(self, points: Iterable[DPoint]) -> "Subdendrite":
        """Convex hull: smallest subtree containing the points.

        Computed as the union of arcs from one base point to all others, which
        equals the union over all pairs on a tree.
        """
        pts = sorted({self.check_point(p) for p in points}, key=point_key)
        if not pts:
            raise EmptySet("hull of an empty set")
        base = pts[0]
        vertices: set = set()
        portions: dict[object, tuple[Fraction, Fraction]] = {}
        if isinstance(base, VertexPoint):
            vertices.add(base.vertex)
        else:
            portions[base.edge] = (base.t, base.t)
        for p in pts[1:]:
            arc = self.arc(base, p)
            vertices.update(arc.vertices)
            for eid, (lo, hi) in arc.portions:
                cur = portions.get(eid)
                if cur is None:
                    portions[eid] = (lo, hi)
                else:
                    portions[eid] = (min(cur[0], lo), max(cur[1], hi))
        return Subdendrite._make(self, vertices, portions)

    def whole(self) -> "Subdendrite":
        return Subdendrite._make(self, set(self._vertices),
                                 {e.eid: (ZERO, ONE) for e in self._edges})

    # -- retraction ------------------------------------------------------------

    def retract_point(self, sub: "Subdendrite", x: DPoint) -> DPoint:
        """Nearest-point projection of ``x`` onto the connected subdendrite."""
        if sub.dendrite is not self and not self.same_space(sub.dendrite):
            raise DendriteMismatch("subdendrite lives on a different dendrite")
        if sub.is_empty():
            raise EmptySubdendrite("cannot retract onto an empty subdendrite")
        x = self.check_point(x)
        if sub.contains(x):
            return x
        candidates: list[tuple[Fraction, DPoint]] = []
        for v in sub.vertices:
            candidates.append((self.distance(x, VertexPoint(v)), VertexPoint(v)))
        for eid, (lo, hi) in sub.portions:
            e = self.edge(eid)
            if isinstance(x, EdgePoint) and x.edge == eid:
                t = min(max(x.t, lo), hi)
                candidates.append((abs(x.t - t) * e.weight, self.point(eid, t)))
                continue
            du = self.distance(x, VertexPoint(e.u))
            dv = self.distance(x, VertexPoint(e.v))
            candidates.append((du + lo * e.weight, self.point(eid, lo)))
            candidates.append((dv + (1 - hi) * e.weight, self.point(eid, hi)))
        best = min(d for d, _ in candidates)
        winners = {p for d, p in candidates if d == best}
        assert len(winners) == 1, "nearest point on a subtree must be unique"
        return winners.pop()

    # -- quotients ---------------------------------------------------------------

    def collapse(self, points: Iterable, z) -> tuple["Dendrite", Callable[[DPoint], DPoint]]:
        """Identify the vertex set ``points`` to a fresh vertex ``z``.

        Returns the quotient dendrite (edges re-enumerated breadth-first from
        ``z`` so the chained order is restored) and the projection map.
        """
        pset = set(points)
        for p in pset:
            if p not in self._vertices:
                raise PointOffDendrite(f"unknown vertex {p!r}")
        if z in self._vertices - pset:
            raise InvalidDendrite(f"target vertex {z!r} already exists")

        def project_vertex(v):
            return z if v in pset else v

        new_vertices = {project_vertex(v) for v in self._vertices}
        new_edges = []
        for e in self._edges:
            u, v = project_vertex(e.u), project_vertex(e.v)
            if u == v:
                raise CycleCreated(f"edge {e.eid!r} collapses to a loop")
            new_edges.append((e.eid, u, v, e.weight))

        parent = {v: v for v in new_vertices}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        adj: dict[object, list[tuple]] = {v: [] for v in new_vertices}
        for eid, u, v, w in new_edges:
            ra, rb = find(u), find(v)
            if ra == rb:
                raise CycleCreated(f"identification creates a cycle at edge {eid!r}")
            parent[ra] = rb
            adj[u].append((eid, v, w))
            adj[v].append((eid, u, w))

        ordered = []
        seen = {z}
        queue = [z]
        while queue:
            head = queue.pop(0)
            for eid, other, w in sorted(adj[head], key=lambda it: id_key(it[0])):
                if other in seen:
                    continue
                seen.add(other)
                ordered.append((eid, head, other, w))
                queue.append(other)
        if len(seen) != len(new_vertices):
            raise QuotientDisconnected("collapse quotient is not connected")

        depth = {z: 0}
        for eid, u, v, w in ordered:
            depth[v] = depth[u] + 1
        quotient = Dendrite(new_vertices,
                            [(eid, u, v, depth[v]) for eid, u, v, _ in ordered],
                            [w for _, _, _, w in ordered])

        def projection(p: DPoint) -> DPoint:
            p = self.check_point(p)
            if isinstance(p, VertexPoint):
                return quotient.vertex_point(project_vertex(p.vertex))
            e = self.edge(p.edge)
            q = quotient.edge(p.edge)
            t = p.t
            # collapse preserves edge ids; orientation may flip in the BFS rebuild
            if q.u == project_vertex(e.u) and q.v == project_vertex(e.v):
                return quotient.point(p.edge, t)
            return quotient.point(p.edge, 1 - t)

        return quotient, projection


class Subdendrite:
    """A connected union of vertices and rational edge portions.

    Canonical form: portions touching an edge end imply the end vertex is in
    the vertex set; parameter-0/1 degenerate portions are stored as vertices.
    """

    __slots__ = ("dendrite", "vertices", "portions")

    def __init__(self, dendrite: Dendrite, vertices: frozenset, portions: tuple):
        self.dendrite = dendrite
        self.vertices = vertices
        self.portions = portions

    @classmethod
    def _make(cls, dendrite: Dendrite, vertices: Iterable,
              portions: Mapping) -> "Subdendrite":
        vset = set(vertices)
        parts: dict[object, tuple[Fraction, Fraction]] = {}
        for eid, (lo, hi) in portions.items():
            e = dendrite.edge(eid)
            lo, hi = frac(lo), frac(hi)
            if lo < 0 or hi > 1 or lo > hi:
                raise PointOffDendrite(f"bad portion [{lo}, {hi}] on edge {eid!r}")
            if lo == 0:
                vset.add(e.u)
            if hi == 1:
                vset.add(e.v)
            if lo == hi:
                if 0 < lo < 1:
                    parts[eid] = (lo, hi)
                continue
            parts[eid] = (lo, hi)
        for v in vset:
            if v not in dendrite.vertices:
                raise PointOffDendrite(f"unknown vertex {v!r}")
        ordered = tuple(sorted(parts.items(), key=lambda it: id_key(it[0])))
        return cls(dendrite, frozenset(vset), ordered)

    def __eq__(self, other):
        return (isinstance(other, Subdendrite)
                and self.vertices == other.vertices
                and self.portions == other.portions)

    def __hash__(self):
        return hash((self.vertices, self.portions))

    def __repr__(self):
        return f"Subdendrite({sorted(self.vertices, key=id_key)}, {list(self.portions)})"

    def is_empty(self) -> bool:
        return not self.vertices and not self.portions

    def contains(self, p: DPoint) -> bool:
        p = self.dendrite.check_point(p)
        if isinstance(p, VertexPoint):
            return p.vertex in self.vertices
        for eid, (lo, hi) in self.portions:
            if eid == p.edge and lo <= p.t <= hi:
                return True
        return False

    def portion_map(self) -> dict:
        return dict(self.portions)

    def _union_connected(self, other: "Subdendrite") -> "Subdendrite":
        """Union of two subdendrites whose union is known to be connected."""
        parts = dict(self.portions)
        for eid, (lo, hi) in other.portions:
            if eid in parts:
                plo, phi = parts[eid]
                parts[eid] = (min(plo, lo), max(phi, hi))
            else:
                parts[eid] = (lo, hi)
        return Subdendrite._make(self.dendrite, set(self.vertices) | set(other.vertices),
                                 parts)

    def intersection(self, other: "Subdendrite") -> "Subdendrite":
        parts: dict[object, tuple[Fraction, Fraction]] = {}
        mine = dict(self.portions)
        for eid, (lo, hi) in other.portions:
            if eid in mine:
                plo, phi = mine[eid]
                nlo, nhi = max(plo, lo), min(phi, hi)
                if nlo <= nhi:
                    parts[eid] = (nlo, nhi)
        vertices = self.vertices & other.vertices
        return Subdendrite._make(self.dendrite, vertices, parts)

    # -- derived node graph (endpoints / diameter / connectivity) ---------------

    def _node_graph(self):
        nodes: set = set()
        segments: list[tuple[object, object, Fraction]] = []
        for v in self.vertices:
            nodes.add(("v", v))
        for eid, (lo, hi) in self.portions:
            e = self.dendrite.edge(eid)
            n_lo = ("v", e.u) if lo == 0 else ("p", eid, lo)
            n_hi = ("v", e.v) if hi == 1 else ("p", eid, hi)
            nodes.add(n_lo)
            nodes.add(n_hi)
            if lo < hi:
                segments.append((n_lo, n_hi, (hi - lo) * e.weight))
        return nodes, segments

    def _node_point(self, node) -> DPoint:
        if node[0] == "v":
            return VertexPoint(node[1])
        return EdgePoint(node[1], node[2])

    def is_connected(self) -> bool:
        nodes, segments = self._node_graph()
        if len(nodes) <= 1:
            return True
        adj: dict = {n: [] for n in nodes}
        for a, b, _ in segments:
            adj[a].append(b)
            adj[b].append(a)
        start = next(iter(nodes))
        seen = {start}
        stack = [start]
        while stack:
            for nxt in adj[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return len(seen) == len(nodes)

    def endpoint_set(self) -> "FiniteClosedSet":
        """Points whose removal keeps the subdendrite connected (tree leaves)."""
        nodes, segments = self._node_graph()
        degree = {n: 0 for n in nodes}
        for a, b, _ in segments:
            degree[a] += 1
            degree[b] += 1
        pts = [self._node_point(n) for n, d in degree.items() if d <= 1]
        return FiniteClosedSet(self.dendrite, pts)

    def diameter(self) -> Fraction:
        nodes, segments = self._node_graph()
        if len(nodes) <= 1:
            return ZERO
        adj: dict = {n: [] for n in nodes}
        for a, b, w in segments:
            adj[a].append((b, w))
            adj[b].append((a, w))

        def farthest(start):
            dist = {start: ZERO}
            stack = [start]
            far, fard = start, ZERO
            while stack:
                cur = stack.pop()
                for nxt, w in adj[cur]:
                    if nxt not in dist:
                        dist[nxt] = dist[cur] + w
                        if dist[nxt] > fard:
                            far, fard = nxt, dist[nxt]
                        stack.append(nxt)
            return far, fard

        a, _ = farthest(next(iter(sorted(nodes))))
        _, d = farthest(a)
        return d

    def sample_points(self) -> list[DPoint]:
        """Vertices plus portion boundaries and midpoints (for spot checks)."""
        pts = {VertexPoint(v) for v in self.vertices}
        for eid, (lo, hi) in self.portions:
            pts.add(self.dendrite.point(eid, lo))
            pts.add(self.dendrite.point(eid, hi))
            pts.add(self.dendrite.point(eid, (lo + hi) / 2))
        return sorted(pts, key=point_key)


class FiniteClosedSet:
    """A finite, duplicate-free set of exact dendrite points."""

    __slots__ = ("dendrite", "points")

    def __init__(self, dendrite: Dendrite, points: Iterable[DPoint]):
        canonical = {dendrite.check_point(p) for p in points}
        self.dendrite = dendrite
        self.points = frozenset(canonical)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(sorted(self.points, key=point_key))

    def __contains__(self, p):
        return self.dendrite.check_point(p) in self.points

    def __eq__(self, other):
        return (isinstance(other, FiniteClosedSet)
                and self.points == other.points)

    def __hash__(self):
        return hash(self.points)

    def __repr__(self):
        return f"FiniteClosedSet({sorted(self.points, key=point_key)})"


# -- module-level operation surface --------------------------------------------


def arc_between(dendrite: Dendrite, x: DPoint, y: DPoint) -> Subdendrite:
    return dendrite.arc(x, y)


def convex_hull(dendrite: Dendrite, points) -> Subdendrite:
    if isinstance(points, FiniteClosedSet):
        points = list(points)
    return dendrite.hull(points)


def retract(dendrite: Dendrite, sub: Subdendrite, x: DPoint) -> DPoint:
    return dendrite.retract_point(sub, x)


def weighted_metric(dendrite: Dendrite, a: DPoint, b: DPoint) -> Fraction:
    return dendrite.distance(a, b)


def _distance_to_set(dendrite: Dendrite, targets: Iterable[DPoint]):
    """Per-vertex distance to the nearest target plus per-edge target lists."""
    init: dict[object, Fraction] = {}
    on_edge: dict[object, list[Fraction]] = {}

    def relax(v, d):
        if v not in init or d < init[v]:
            init[v] = d

    count = 0
    for p in targets:
        count += 1
        p = dendrite.check_point(p)
        if isinstance(p, VertexPoint):
            relax(p.vertex, ZERO)
        else:
            e = dendrite.edge(p.edge)
            relax(e.u, p.t * e.weight)
            relax(e.v, (1 - p.t) * e.weight)
            on_edge.setdefault(p.edge, []).append(p.t)
    if count == 0:
        raise EmptySet("distance to an empty set")

    dist: dict[object, Fraction | None] = {v: init.get(v) for v in dendrite.vertices}
    order = dendrite._order
    for v in reversed(order):
        pe = dendrite._parent_edge[v]
        if pe is None:
            continue
        parent = dendrite._parent[v]
        if dist[v] is not None:
            cand = dist[v] + pe.weight
            if dist[parent] is None or cand < dist[parent]:
                dist[parent] = cand
    for v in order:
        pe = dendrite._parent_edge[v]
        if pe is None:
            continue
        parent = dendrite._parent[v]
        if dist[parent] is not None:
            cand = dist[parent] + pe.weight
            if dist[v] is None or cand < dist[v]:
                dist[v] = cand
    return dist, on_edge


def _point_to_set(dendrite: Dendrite, dist, on_edge, p: DPoint) -> Fraction:
    if isinstance(p, VertexPoint):
        d = dist[p.vertex]
    else:
        e = dendrite.edge(p.edge)
        cands = []
        if dist[e.u] is not None:
            cands.append(dist[e.u] + p.t * e.weight)
        if dist[e.v] is not None:
            cands.append(dist[e.v] + (1 - p.t) * e.weight)
        for s in on_edge.get(p.edge, ()):
            cands.append(abs(p.t - s) * e.weight)
        d = min(cands) if cands else None
    if d is None:
        raise DendrodynError("target set unreachable from point")
    return d


def set_distance(dendrite: Dendrite, p: DPoint, targets: FiniteClosedSet) -> Fraction:
    dist, on_edge = _distance_to_set(dendrite, targets)
    return _point_to_set(dendrite, dist, on_edge, dendrite.check_point(p))


def subdendrite_gates(dendrite: Dendrite, sub: Subdendrite,
                      points: Iterable[DPoint]) -> list[DPoint]:
    """Nearest point of ``sub`` for each query point, via one tree sweep.

    Equivalent to :func:`retract` per point but amortised: a two-pass dynamic
    program carries (distance, gate) labels over the whole tree.
    """
    if sub.is_empty():
        raise EmptySubdendrite("cannot retract onto an empty subdendrite")
    best: dict[object, tuple[Fraction, DPoint]] = {}

    def relax(v, d, gate):
        cur = best.get(v)
        if cur is None or d < cur[0] or (d == cur[0] and point_key(gate) < point_key(cur[1])):
            best[v] = (d, gate)

    for v in sub.vertices:
        relax(v, ZERO, VertexPoint(v))
    portions = sub.portion_map()
    for eid, (lo, hi) in portions.items():
        e = dendrite.edge(eid)
        if lo > 0:
            relax(e.u, lo * e.weight, dendrite.point(eid, lo))
        if hi < 1:
            relax(e.v, (1 - hi) * e.weight, dendrite.point(eid, hi))
    order = dendrite._order
    for v in reversed(order):
        pe = dendrite._parent_edge[v]
        if pe is not None and v in best:
            d, g = best[v]
            relax(dendrite._parent[v], d + pe.weight, g)
    for v in order:
        pe = dendrite._parent_edge[v]
        if pe is not None and dendrite._parent[v] in best:
            d, g = best[dendrite._parent[v]]
            relax(v, d + pe.weight, g)

    gates = []
    for p in points:
        p = dendrite.check_point(p)
        if isinstance(p, VertexPoint):
            gates.append(best[p.vertex][1])
            continue
        e = dendrite.edge(p.edge)
        cands: list[tuple[Fraction, DPoint]] = []
        if e.u in best:
            d, g = best[e.u]
            cands.append((d + p.t * e.weight, g))
        if e.v in best:
            d, g = best[e.v]
            cands.append((d + (1 - p.t) * e.weight, g))
        if p.edge in portions:
            lo, hi = portions[p.edge]
            t = min(max(p.t, lo), hi)
            cands.append((abs(p.t - t) * e.weight, dendrite.point(p.edge, t)))
        gates.append(min(cands, key=lambda dg: (dg[0], point_key(dg[1])))[1])
    return gates


def hausdorff_distance(a: FiniteClosedSet, b: FiniteClosedSet) -> Fraction:
    if len(a) == 0 or len(b) == 0:
        raise EmptySet("Hausdorff distance needs non-empty sets")
    if not a.dendrite.same_space(b.dendrite):
        raise DendriteMismatch("sets live on different dendrites")

    def directed(src: FiniteClosedSet, dst: FiniteClosedSet) -> Fraction:
        dist, on_edge = _distance_to_set(src.dendrite, dst)
        return max(_point_to_set(src.dendrite, dist, on_edge, p) for p in src)

    return max(directed(a, b), directed(b, a))


def mesh(cover: Sequence[Subdendrite]) -> Fraction:
    cells = list(cover)
    if not cells:
        raise EmptyCover("mesh of an empty cover")
    return max(cell.diameter() for cell in cells)


def boundary_classification(dendrite: Dendrite) -> tuple[FiniteClosedSet, FiniteClosedSet]:
    """(endpoints, branch points); degree-2 vertices belong to neither."""
    endpoints = [VertexPoint(v) for v in dendrite.vertices if dendrite.degree(v) == 1]
    branches = [VertexPoint(v) for v in dendrite.vertices if dendrite.degree(v) >= 3]
    return (FiniteClosedSet(dendrite, endpoints), FiniteClosedSet(dendrite, branches))


def arc_decomposition(dendrite: Dendrite) -> list[tuple[object, Fraction]]:
    """The stored chained enumeration as (edge id, weight) pairs."""
    dendrite._check_chaining()
    return [(e.eid, e.weight) for e in dendrite.edges]


def arc_diameter_modulus(dendrite: Dendrite, eps_grid: Sequence[Fraction],
                         max_exp: int = 12) -> list[tuple[Fraction, Fraction]]:
    """For each epsilon, the largest dyadic delta certified on the skeleton.

    Checks every pair of skeleton probes: whenever the pair is closer than
    delta, the arc it spans must have diameter below epsilon.  Delta 0 means
    no candidate could be certified.
    """
    from .util import dyadic_candidates

    eps_grid = [frac(e) for e in eps_grid]
    if any(e <= 0 for e in eps_grid):
        raise ValueError("epsilon grid entries must be positive")
    if any(a <= b for a, b in zip(eps_grid, eps_grid[1:])):
        raise ValueError("epsilon grid must be strictly decreasing")
    probes: list[DPoint] = [VertexPoint(v) for v in sorted(dendrite.vertices, key=id_key)]
    for e in dendrite.edges:
        probes.extend(dendrite.point(e.eid, Fraction(k, 4)) for k in (1, 2, 3))
    pairs = []
    for i, p in enumerate(probes):
        for q in probes[i + 1:]:
            pairs.append((dendrite.distance(p, q), dendrite.arc(p, q).diameter()))
    table = []
    for eps in eps_grid:
        eps = frac(eps)
        chosen = ZERO
        for cand in dyadic_candidates(max_exp):
            if all(diam < eps for d, diam in pairs if d < cand):
                chosen = cand
                break
        table.append((eps, chosen))
    return table


def collapse_points(dendrite: Dendrite, points, z):
    if isinstance(points, FiniteClosedSet):
        vids = []
        for p in points:
            if not isinstance(p, VertexPoint):
                raise PointOffDendrite("collapse targets must be vertices")
            vids.append(p.vertex)
    else:
        vids = list(points)
    return dendrite.collapse(vids, z)
