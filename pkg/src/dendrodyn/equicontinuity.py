"""Sub-tree towers, frontier covers and the equicontinuity certificate.

The tower collects finite orbits among the branch points of the invariant
hull, ordered by distance from a fixed scan root, and takes hulls of their
unions.  Around each frontier point of a tower level hangs a cover cell: the
closure of the minimal-set portions attached there and nowhere else.  If every
generator permutes the cells exactly and the cell meshes shrink, one modulus
works for the whole generated group, which is the certificate's content.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .dendrite import (
    Dendrite,
    DPoint,
    FiniteClosedSet,
    Subdendrite,
    VertexPoint,
    mesh,
    subdendrite_gates,
)
from .errors import (
    BudgetExceeded,
    CoverageGap,
    FrontierEmpty,
    NoFiniteOrbitFound,
    NotProbability,
)
from .homeo import apply, image_point_set, image_subdendrite
from .action import GeneratorSet, Word, detect_finite_orbit, evaluate_word, word_ball
from .measure import PLMeasure, push_forward
from .util import point_key

ZERO = Fraction(0)


@dataclass(frozen=True)
class TowerLevel:
    index: int
    orbit: FiniteClosedSet
    tree: Subdendrite
    frontier: FiniteClosedSet
    strict: bool


@dataclass(frozen=True)
class TreeTower:
    dendrite: Dendrite
    hull: Subdendrite
    minimal_set: FiniteClosedSet
    levels: tuple[TowerLevel, ...]
    scan_root: object

    def __len__(self):
        return len(self.levels)


def _frontier_closed(gens: GeneratorSet, frontier: FiniteClosedSet) -> bool:
    return all(image_point_set(gens.homeo(sym, sign), frontier) == frontier
               for sym in gens.symbols for sign in (1, -1))


def build_tree_tower(gens: GeneratorSet, m: FiniteClosedSet, n_max: int,
                     *, minimal_class: str = "cantor-like",
                     orbit_budget: int | None = None,
                     scan_root=None) -> TreeTower:
    """Nested sub-trees of the hull of ``m`` with finite-orbit frontiers.

    ``minimal_class`` "finite" short-circuits to the one-level tower [m].
    Branch points are scanned in increasing distance from ``scan_root`` (the
    smallest vertex id by default); the first certified orbits win.
    """
    X = gens.dendrite
    hull = X.hull(m)
    if minimal_class == "finite":
        level = TowerLevel(1, m, hull, hull.endpoint_set(), strict=True)
        return TreeTower(X, hull, m, (level,), scan_root)

    budget = orbit_budget if orbit_budget is not None else max(64, 2 ** n_max)
    degree: dict[object, int] = {}
    for eid, (lo, hi) in hull.portions:
        e = X.edge(eid)
        if lo == 0:
            degree[e.u] = degree.get(e.u, 0) + 1
        if hi == 1:
            degree[e.v] = degree.get(e.v, 0) + 1
    branch_points = [v for v, d in degree.items() if d >= 3]
    if not branch_points:
        raise NoFiniteOrbitFound("the hull has no branch points to scan")
    if scan_root is None:
        scan_root = min(hull.vertices, key=lambda v: (point_key(VertexPoint(v))))
    root_pt = X.vertex_point(scan_root)
    branch_points.sort(key=lambda v: (X.distance(root_pt, VertexPoint(v)),
                                      point_key(VertexPoint(v))))

    orbits: list[FiniteClosedSet] = []
    visited: set[DPoint] = set()
    pending_growth = None
    for b in branch_points:
        pb = VertexPoint(b)
        if pb in visited:
            continue
        result = detect_finite_orbit(gens, pb, budget)
        if not result.found:
            pending_growth = result.growth
            continue
        orbits.append(result.orbit)
        visited.update(result.orbit.points)
        if len(orbits) >= n_max:
            break
    if not orbits:
        if pending_growth is not None:
            raise BudgetExceeded(
                f"no orbit closed within budget {budget}; growth {pending_growth}")
        raise NoFiniteOrbitFound("no finite orbit among the hull's branch points")

    levels: list[TowerLevel] = []
    accumulated: list[DPoint] = []
    prev_tree: Subdendrite | None = None
    for i, orb in enumerate(orbits, start=1):
        accumulated.extend(orb)
        tree = X.hull(accumulated)
        if prev_tree is not None and tree._union_connected(prev_tree) != tree:
            raise CoverageGap(f"tower nesting broken at level {i}")
        frontier = tree.endpoint_set()
        strict = frontier == orb
        if not _frontier_closed(gens, frontier):
            raise CoverageGap(f"frontier at level {i} is not generator-closed")
        levels.append(TowerLevel(i, orb, tree, frontier, strict))
        prev_tree = tree
    return TreeTower(X, hull, m, tuple(levels), scan_root)


@dataclass(frozen=True)
class FrontierCover:
    level: int
    tree: Subdendrite
    cells: tuple[tuple[DPoint, Subdendrite], ...]

    def cell(self, anchor: DPoint) -> Subdendrite:
        for a, c in self.cells:
            if a == anchor:
                return c
        raise KeyError(f"no cell anchored at {anchor!r}")

    def anchors(self) -> list[DPoint]:
        return [a for a, _ in self.cells]

    def mesh(self) -> Fraction:
        return mesh([c for _, c in self.cells])


def frontier_cover(dendrite: Dendrite, m: FiniteClosedSet,
                   tree: Subdendrite, level: int = 0) -> FrontierCover:
    """One cell per frontier point: the arcs to minimal-set points that touch
    the sub-tree only at that frontier point."""
    frontier = tree.endpoint_set()
    if len(frontier) == 0:
        raise FrontierEmpty("sub-tree has no frontier")
    anchors = set(frontier.points)
    assigned: dict[DPoint, list[DPoint]] = {a: [] for a in anchors}
    points = list(m)
    for x, gate in zip(points, subdendrite_gates(dendrite, tree, points)):
        if gate not in anchors:
            raise CoverageGap(
                f"minimal-set point {x!r} attaches at {gate!r}, outside the frontier")
        assigned[gate].append(x)
    cells = []
    for a in sorted(anchors, key=point_key):
        cells.append((a, dendrite.hull([a] + assigned[a])))
    return FrontierCover(level=level, tree=tree, cells=tuple(cells))


@dataclass(frozen=True)
class EquivarianceEntry:
    symbol: str
    sign: int
    anchor: DPoint
    ok: bool


@dataclass(frozen=True)
class EquivarianceReport:
    level: int
    ok: bool
    entries: tuple[EquivarianceEntry, ...]
    counterexample: tuple[str, int, DPoint] | None
    note: str = ("equivariance on generators extends to every word "
                 "of the generated group by composition")


def verify_cover_equivariance(gens: GeneratorSet, cover: FrontierCover
                              ) -> EquivarianceReport:
    """Exact per-generator check that cells map onto cells over moved anchors.

    Positive generators suffice: a homeomorphism that permutes the finitely
    many cells exactly has an inverse doing the inverse permutation, and
    compositions extend the property to every word.
    """
    entries = []
    counterexample = None
    for sym in gens.symbols:
        h = gens.homeo(sym, 1)
        for anchor, cell in cover.cells:
            moved = apply(h, anchor)
            try:
                expected = cover.cell(moved)
            except KeyError:
                ok = False
            else:
                ok = image_subdendrite(h, cell) == expected
            entries.append(EquivarianceEntry(sym, 1, anchor, ok))
            if not ok and counterexample is None:
                counterexample = (sym, 1, anchor)
    all_ok = all(e.ok for e in entries)
    return EquivarianceReport(cover.level, all_ok, tuple(entries), counterexample)


@dataclass(frozen=True)
class CertificateLevel:
    index: int
    mesh: Fraction
    equivariant: bool
    strict: bool
    cell_count: int


@dataclass(frozen=True)
class EquicontinuityCertificate:
    verdict: str  # "Certified" | "Empirical" | "Failed"
    levels: tuple[CertificateLevel, ...]
    delta_table: tuple[tuple[Fraction, Fraction], ...]
    explanation: str
    witness: tuple | None = None
    tower: TreeTower | None = field(default=None, compare=False)
    covers: tuple[FrontierCover, ...] = field(default=(), compare=False)


def _delta_table(meshes: Sequence[Fraction], eps_grid: Sequence[Fraction]):
    """delta(eps) = the largest certified mesh not exceeding eps (0 if none)."""
    rows = []
    for eps in eps_grid:
        fitting = [m for m in meshes if m <= eps]
        rows.append((Fraction(eps), max(fitting) if fitting else ZERO))
    return tuple(rows)


def equicontinuity_certificate(gens: GeneratorSet, m: FiniteClosedSet, n_max: int,
                               *, mesh_target: Fraction | None = None,
                               eps_grid: Sequence[Fraction] | None = None,
                               minimal_class: str = "cantor-like",
                               orbit_budget: int | None = None,
                               cover_tamper=None) -> EquicontinuityCertificate:
    """Build the tower and covers and certify a uniform modulus.

    Certified: every level is exactly equivariant and meshes strictly decay
    (reaching ``mesh_target`` when one is given); such a modulus is valid for
    the entire generated group, not just the sampled generators.  Failed
    states a witness.  ``cover_tamper`` deterministically corrupts each cover
    before verification (negative-control hook).
    """
    tower = build_tree_tower(gens, m, n_max, minimal_class=minimal_class,
                             orbit_budget=orbit_budget)
    X = gens.dendrite
    levels = []
    covers = []
    witness = None
    all_equivariant = True
    meshes: list[Fraction] = []
    for level in tower.levels:
        cover = frontier_cover(X, m, level.tree, level.index)
        if cover_tamper is not None:
            cover = cover_tamper(cover)
        covers.append(cover)
        report = verify_cover_equivariance(gens, cover)
        if not report.ok and witness is None:
            witness = report.counterexample
        all_equivariant = all_equivariant and report.ok
        cell_mesh = cover.mesh()
        meshes.append(cell_mesh)
        levels.append(CertificateLevel(level.index, cell_mesh, report.ok,
                                       level.strict, len(cover.cells)))

    if eps_grid is None:
        eps_grid = sorted({m for m in meshes} | {Fraction(1)}, reverse=True)
    table = _delta_table(meshes, eps_grid)

    decaying = all(a > b for a, b in zip(meshes, meshes[1:]))
    target_ok = mesh_target is None or (meshes and meshes[-1] <= mesh_target)
    if not all_equivariant:
        verdict = "Failed"
        explanation = f"equivariance counterexample at {witness!r}"
    elif decaying and target_ok:
        verdict = "Certified"
        explanation = ("cells are permuted exactly by every generator and the "
                       "mesh decays strictly; the modulus holds for the whole group")
    else:
        verdict = "Failed"
        explanation = ("mesh sequence does not decay to the requested target"
                       if not target_ok else "mesh sequence is not strictly decreasing")
    return EquicontinuityCertificate(verdict, tuple(levels), table, explanation,
                                     witness, tower, tuple(covers))


def tamper_remove_edge(cover: FrontierCover) -> FrontierCover:
    """Deterministically corrupt a cover: drop part of the first non-trivial cell."""
    cells = list(cover.cells)
    for i, (anchor, cell) in enumerate(cells):
        if cell.portions:
            portions = dict(cell.portions)
            eid = sorted(portions, key=lambda k: str(k))[0]
            del portions[eid]
            broken = Subdendrite._make(cover.tree.dendrite, set(cell.vertices),
                                       portions)
            cells[i] = (anchor, broken)
            break
    return FrontierCover(cover.level, cover.tree, tuple(cells))


@dataclass(frozen=True)
class ProximalityTrace:
    mass_threshold: Fraction
    rows: tuple[tuple[int, Fraction, str], ...]  # (radius, spread, best word)

    def spreads(self) -> list[Fraction]:
        return [s for _, s, _ in self.rows]


def _spread(mu: PLMeasure, threshold: Fraction) -> Fraction:
    """Smallest radius of a skeleton-centred closed ball holding the threshold mass."""
    X = mu.dendrite
    centers = [VertexPoint(v) for v in sorted(X.vertices, key=lambda v: point_key(VertexPoint(v)))]
    centers.extend(p for p, _ in mu.atoms)
    best = None
    for c in centers:
        radii = {ZERO}
        for p, _ in mu.atoms:
            radii.add(X.distance(c, p))
        for eid, pieces in mu.densities.items():
            e = X.edge(eid)
            cuts = {ZERO, Fraction(1)}
            for a, b, _ in pieces:
                cuts.update((a, b))
            if getattr(c, "edge", None) == eid:
                for t in cuts:
                    radii.add(abs(c.t - t) * e.weight)
                continue
            du = X.distance(c, VertexPoint(e.u))
            dv = X.distance(c, VertexPoint(e.v))
            for t in cuts:
                radii.add(du + t * e.weight)
                radii.add(dv + (1 - t) * e.weight)
        usable = sorted(radii)
        lo_mass = None
        found = None
        prev_r = None
        for r in usable:
            mass = mu.ball_mass(c, r)
            if mass >= threshold:
                if prev_r is None:
                    found = r
                else:
                    # mass is linear in r between consecutive critical radii
                    span_mass = mass - lo_mass
                    if span_mass == 0:
                        found = prev_r
                    else:
                        found = prev_r + (threshold - lo_mass) * (r - prev_r) / span_mass
                break
            prev_r, lo_mass = r, mass
        if found is not None and (best is None or found < best):
            best = found
    assert best is not None, "a ball of full diameter always reaches the threshold"
    return best


def strong_proximality_scan(gens: GeneratorSet, mu0: PLMeasure, radius: int,
                            mass_threshold: Fraction = Fraction(15, 16)
                            ) -> ProximalityTrace:
    """Greedy contraction trace: the running-minimum spread over the word ball.

    Diagnostic only.  A trace falling toward zero is evidence that pushed
    measures concentrate toward a point mass; an isometric action keeps the
    trace flat.
    """
    if not mu0.is_probability():
        raise NotProbability("the scanned measure must be a probability")
    rows = []
    best = _spread(mu0, mass_threshold)
    best_word = Word.identity()
    rows.append((0, best, str(best_word)))
    prev_ball = {Word.identity()}
    for r in range(1, radius + 1):
        current = [w for w in word_ball(gens, r) if len(w) == r]
        for w in current:
            mu = push_forward(evaluate_word(w, gens), mu0)
            s = _spread(mu, mass_threshold)
            if s < best:
                best, best_word = s, w
        rows.append((r, best, str(best_word)))
        prev_ball.update(current)
    return ProximalityTrace(mass_threshold, tuple(rows))
