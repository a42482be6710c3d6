"""Exact measures on dendrites: atoms plus piecewise-constant edge densities.

Piecewise-constant densities are closed under push-forward along piecewise
linear homeomorphisms, so the whole pipeline (canonical measure, transport,
integration, averaging, invariance defects) stays in rational arithmetic.
Mass of a density piece is density x parameter length x edge weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .dendrite import Dendrite, DPoint, EdgePoint, VertexPoint
from .errors import (
    DendriteMismatch,
    DomainMismatch,
    NotCertifiedOrbit,
    NotProbability,
)
from .homeo import Homeo, apply
from .util import frac, id_key, point_key

ZERO = Fraction(0)
ONE = Fraction(1)

Piece = tuple[Fraction, Fraction, Fraction]  # (lo, hi, density)


def _canonical_pieces(pieces: Iterable[Piece]) -> tuple[Piece, ...]:
    rows = sorted((frac(a), frac(b), frac(r)) for a, b, r in pieces)
    out: list[Piece] = []
    for a, b, r in rows:
        if a > b or a < 0 or b > 1:
            raise ValueError(f"bad density piece [{a}, {b}]")
        if r < 0:
            raise ValueError("densities must be non-negative")
        if a == b or r == 0:
            continue
        if out and out[-1][1] > a:
            raise ValueError("density pieces overlap")
        if out and out[-1][1] == a and out[-1][2] == r:
            out[-1] = (out[-1][0], b, r)
        else:
            out.append((a, b, r))
    return tuple(out)


class PLMeasure:
    """A finite measure: rational atoms plus per-edge piecewise densities."""

    __slots__ = ("dendrite", "atoms", "densities", "norm")

    def __init__(self, dendrite: Dendrite,
                 atoms: Iterable[tuple[DPoint, Fraction]] = (),
                 densities: Mapping[object, Iterable[Piece]] | None = None,
                 norm: Fraction = ONE):
        merged: dict[DPoint, Fraction] = {}
        for p, w in atoms:
            p = dendrite.check_point(p)
            w = frac(w)
            if w < 0:
                raise ValueError("atom weights must be non-negative")
            if w:
                merged[p] = merged.get(p, ZERO) + w
        dens: dict[object, tuple[Piece, ...]] = {}
        for eid, pieces in (densities or {}).items():
            dendrite.edge(eid)
            rows = _canonical_pieces(pieces)
            if rows:
                dens[eid] = rows
        self.dendrite = dendrite
        self.atoms = tuple(sorted(merged.items(), key=lambda kv: point_key(kv[0])))
        self.densities = dict(sorted(dens.items(), key=lambda kv: id_key(kv[0])))
        self.norm = frac(norm)

    def total_mass(self) -> Fraction:
        total = sum((w for _, w in self.atoms), ZERO)
        for eid, pieces in self.densities.items():
            w = self.dendrite.edge(eid).weight
            total += sum(((b - a) * r * w for a, b, r in pieces), ZERO)
        return total

    def is_probability(self) -> bool:
        return self.total_mass() == 1

    def require_probability(self):
        if not self.is_probability():
            raise NotProbability(f"total mass is {self.total_mass()}, not 1")

    def scaled(self, factor: Fraction) -> "PLMeasure":
        factor = frac(factor)
        return PLMeasure(
            self.dendrite,
            [(p, w * factor) for p, w in self.atoms],
            {eid: [(a, b, r * factor) for a, b, r in pieces]
             for eid, pieces in self.densities.items()},
            norm=self.norm)

    def add(self, other: "PLMeasure") -> "PLMeasure":
        if not self.dendrite.same_space(other.dendrite):
            raise DendriteMismatch("measures live on different dendrites")
        atoms = list(self.atoms) + list(other.atoms)
        dens: dict[object, list[Piece]] = {}
        for eid in set(self.densities) | set(other.densities):
            mine = self.densities.get(eid, ())
            theirs = other.densities.get(eid, ())
            cuts = sorted({ZERO, ONE}
                          | {x for a, b, _ in mine for x in (a, b)}
                          | {x for a, b, _ in theirs for x in (a, b)})

            def level(pieces, t):
                for a, b, r in pieces:
                    if a <= t < b:
                        return r
                return ZERO

            rows = []
            for lo, hi in zip(cuts, cuts[1:]):
                r = level(mine, lo) + level(theirs, lo)
                if r:
                    rows.append((lo, hi, r))
            if rows:
                dens[eid] = rows
        return PLMeasure(self.dendrite, atoms, dens, norm=self.norm)

    def arc_mass(self, x: DPoint, y: DPoint) -> Fraction:
        """Measure of the closed arc [x, y] (atoms on the arc included)."""
        arc = self.dendrite.arc(x, y)
        total = ZERO
        for p, w in self.atoms:
            if arc.contains(p):
                total += w
        portions = arc.portion_map()
        for eid, pieces in self.densities.items():
            if eid not in portions:
                continue
            lo, hi = portions[eid]
            w = self.dendrite.edge(eid).weight
            for a, b, r in pieces:
                aa, bb = max(a, lo), min(b, hi)
                if aa < bb:
                    total += (bb - aa) * r * w
        return total

    def ball_mass(self, center: DPoint, radius: Fraction) -> Fraction:
        """Mass of the closed metric ball around ``center``."""
        radius = frac(radius)
        center = self.dendrite.check_point(center)
        total = ZERO
        for p, w in self.atoms:
            if self.dendrite.distance(center, p) <= radius:
                total += w
        for eid, pieces in self.densities.items():
            e = self.dendrite.edge(eid)
            if isinstance(center, EdgePoint) and center.edge == eid:
                # points of the center's own edge are reached directly
                span = radius / e.weight
                intervals = [(max(center.t - span, ZERO),
                              min(center.t + span, ONE))]
            else:
                # covered parameters: prefix [0, s_u] from u plus suffix [s_v, 1]
                du = self.dendrite.distance(center, VertexPoint(e.u))
                dv = self.dendrite.distance(center, VertexPoint(e.v))
                su = (radius - du) / e.weight if radius >= du else None
                sv = 1 - (radius - dv) / e.weight if radius >= dv else None
                intervals = []
                if su is not None:
                    intervals.append((ZERO, min(su, ONE)))
                if sv is not None:
                    intervals.append((max(sv, ZERO), ONE))
                if len(intervals) == 2 and intervals[0][1] >= intervals[1][0]:
                    intervals = [(ZERO, ONE)]
            for lo, hi in intervals:
                for a, b, r in pieces:
                    aa, bb = max(a, lo), min(b, hi)
                    if aa < bb:
                        total += (bb - aa) * r * e.weight
        return total

    def __eq__(self, other):
        return (isinstance(other, PLMeasure)
                and self.dendrite.same_space(other.dendrite)
                and self.atoms == other.atoms
                and self.densities == other.densities)

    def __repr__(self):
        return (f"PLMeasure({len(self.atoms)} atoms, "
                f"{len(self.densities)} density edges, mass {self.total_mass()})")


def dirac(dendrite: Dendrite, p: DPoint, weight: Fraction = ONE) -> PLMeasure:
    return PLMeasure(dendrite, [(p, weight)])


def canonical_measure(dendrite: Dendrite) -> PLMeasure:
    """Length measure of the arc decomposition, normalised to a probability.

    Each edge carries constant density 1/W where W is the total weight, so the
    mass of any arc equals its metric length divided by W.  W is stored on the
    measure as the normalisation constant.
    """
    dendrite._check_chaining()
    total = dendrite.total_weight()
    dens = {e.eid: [(ZERO, ONE, Fraction(1, 1) / total)] for e in dendrite.edges}
    return PLMeasure(dendrite, (), dens, norm=total)


def push_forward(h: Homeo, mu: PLMeasure) -> PLMeasure:
    """Exact image measure: atoms transport, densities pick up 1/|slope|."""
    if not h.dendrite.same_space(mu.dendrite):
        raise DendriteMismatch("homeomorphism acts on a different dendrite")
    atoms = [(apply(h, p), w) for p, w in mu.atoms]
    dens: dict[object, list[Piece]] = {}
    for eid, pieces in mu.densities.items():
        tgt_id, plm = h.edge_map[eid]
        w_src = mu.dendrite.edge(eid).weight
        w_tgt = mu.dendrite.edge(tgt_id).weight
        rows = dens.setdefault(tgt_id, [])
        for a, b, r in pieces:
            for x0, x1, _, _, slope in plm.segments():
                aa, bb = max(a, x0), min(b, x1)
                if aa >= bb:
                    continue
                ya, yb = plm(aa), plm(bb)
                if ya > yb:
                    ya, yb = yb, ya
                rows.append((ya, yb, r * w_src / (abs(slope) * w_tgt)))
    return PLMeasure(mu.dendrite, atoms, dens, norm=mu.norm)


class TestFunction:
    """A continuous piecewise-linear observable with rational data."""

    __test__ = False  # not a pytest class, despite the name
    __slots__ = ("dendrite", "vertex_values", "edge_data", "name")

    def __init__(self, dendrite: Dendrite, vertex_values: Mapping,
                 edge_data: Mapping[object, tuple[Sequence, Sequence]],
                 name: str = ""):
        vv = {v: frac(val) for v, val in vertex_values.items()}
        if set(vv) != set(dendrite.vertices):
            raise DomainMismatch("vertex values must cover every vertex")
        ed = {}
        for e in dendrite.edges:
            xs, ys = edge_data.get(e.eid, ((ZERO, ONE), (vv[e.u], vv[e.v])))
            xs = tuple(frac(x) for x in xs)
            ys = tuple(frac(y) for y in ys)
            if len(xs) != len(ys) or len(xs) < 2 or xs[0] != 0 or xs[-1] != 1:
                raise DomainMismatch(f"bad breakpoints on edge {e.eid!r}")
            if any(a >= b for a, b in zip(xs, xs[1:])):
                raise DomainMismatch(f"breakpoints not increasing on edge {e.eid!r}")
            if ys[0] != vv[e.u] or ys[-1] != vv[e.v]:
                raise DomainMismatch(f"discontinuity at the ends of edge {e.eid!r}")
            ed[e.eid] = (xs, ys)
        self.dendrite = dendrite
        self.vertex_values = vv
        self.edge_data = ed
        self.name = name

    @classmethod
    def constant(cls, dendrite: Dendrite, value) -> "TestFunction":
        value = frac(value)
        return cls(dendrite, {v: value for v in dendrite.vertices}, {},
                   name=f"const({value})")

    @classmethod
    def distance_to(cls, dendrite: Dendrite, p: DPoint) -> "TestFunction":
        """The exact distance function x -> d(x, p)."""
        p = dendrite.check_point(p)
        vv = {v: dendrite.distance(VertexPoint(v), p) for v in dendrite.vertices}
        ed = {}
        for e in dendrite.edges:
            du, dv = vv[e.u], vv[e.v]
            xs, ys = [ZERO], [du]
            if isinstance(p, EdgePoint) and p.edge == e.eid:
                xs.append(p.t)
                ys.append(ZERO)
            else:
                # one kink where the nearest route switches endpoints
                t_star = (dv - du + e.weight) / (2 * e.weight)
                if 0 < t_star < 1:
                    xs.append(t_star)
                    ys.append(du + t_star * e.weight)
            xs.append(ONE)
            ys.append(dv)
            ed[e.eid] = (tuple(xs), tuple(ys))
        return cls(dendrite, vv, ed, name=f"dist({p!r})")

    def __call__(self, p: DPoint) -> Fraction:
        p = self.dendrite.check_point(p)
        if isinstance(p, VertexPoint):
            return self.vertex_values[p.vertex]
        xs, ys = self.edge_data[p.edge]
        for i in range(len(xs) - 1):
            if p.t <= xs[i + 1]:
                span = xs[i + 1] - xs[i]
                return ys[i] + (ys[i + 1] - ys[i]) * (p.t - xs[i]) / span
        return ys[-1]

    def sup_norm(self) -> Fraction:
        vals = [abs(v) for v in self.vertex_values.values()]
        for _, ys in self.edge_data.values():
            vals.extend(abs(y) for y in ys)
        return max(vals)


def integrate(mu: PLMeasure, f: TestFunction) -> Fraction:
    """Exact integral: atoms weight point values, pieces are trapezoids."""
    if not mu.dendrite.same_space(f.dendrite):
        raise DomainMismatch("function defined on a different dendrite")
    total = ZERO
    for p, w in mu.atoms:
        total += w * f(p)
    for eid, pieces in mu.densities.items():
        weight = mu.dendrite.edge(eid).weight
        xs, _ = f.edge_data[eid]
        for a, b, r in pieces:
            cuts = sorted({a, b} | {x for x in xs if a < x < b})
            for lo, hi in zip(cuts, cuts[1:]):
                flo = f(mu.dendrite.point(eid, lo))
                fhi = f(mu.dendrite.point(eid, hi))
                total += r * weight * (flo + fhi) / 2 * (hi - lo)
    return total


def uniform_orbit_measure(orbit_result) -> PLMeasure:
    """Equal atoms on a certified finite orbit (exactly invariant)."""
    points = getattr(orbit_result, "orbit", None)
    if points is not None:
        if not orbit_result.found:
            raise NotCertifiedOrbit("orbit detection did not certify closure")
    else:
        if not getattr(orbit_result, "closed", False):
            raise NotCertifiedOrbit("orbit report is not closed")
        points = orbit_result.points
    n = len(points)
    if n == 0:
        raise NotCertifiedOrbit("empty orbit")
    return PLMeasure(points.dendrite, [(p, Fraction(1, n)) for p in points])


@dataclass(frozen=True)
class FolnerScheme:
    """An indexed family n -> finite word list, adapted to named generators."""

    name: str
    symbols: tuple[str, ...]
    family: Callable[[int], tuple]

    def words(self, n: int) -> tuple:
        ws = tuple(self.family(n))
        if not ws:
            raise ValueError(f"empty averaging set at index {n}")
        if len(set(ws)) != len(ws):
            raise ValueError(f"duplicate words in averaging set at index {n}")
        return ws


def folner_average(gens, scheme: FolnerScheme, mu0: PLMeasure, n: int) -> PLMeasure:
    """The exact mixture |F_n|^-1 sum of pushed measures over the word set."""
    from .action import evaluate_word

    mu0.require_probability()
    words = scheme.words(n)
    share = Fraction(1, len(words))
    result: PLMeasure | None = None
    for w in words:
        pushed = push_forward(evaluate_word(w, gens), mu0).scaled(share)
        result = pushed if result is None else result.add(pushed)
    return result


def invariance_defect(gens, mu: PLMeasure, fns: Sequence[TestFunction]) -> Fraction:
    """Worst one-generator transport discrepancy over the test dictionary."""
    mu.require_probability()
    worst = ZERO
    for sym in gens.symbols:
        pushed = push_forward(gens.homeo(sym, 1), mu)
        for f in fns:
            gap = abs(integrate(pushed, f) - integrate(mu, f))
            if gap > worst:
                worst = gap
    return worst


def folner_ratio(scheme: FolnerScheme, g, n: int) -> Fraction:
    """Exact |gF_n symmetric-difference F_n| / |F_n| on reduced words."""
    from .action import Word, reduce_word

    if isinstance(g, str):
        g = Word.parse(g)
    words = [reduce_word(w) for w in scheme.words(n)]
    base = set(words)
    shifted = {reduce_word(Word(g.letters + w.letters)) for w in words}
    return Fraction(len(base ^ shifted), len(base))
