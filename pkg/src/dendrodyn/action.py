"""Words over generator sets, orbit enumeration and minimal-set estimation.

The acting group is always explored through word balls under free reduction;
relations between the generators can only merge image points, never lose
them, so orbit sets are deduplicated by image rather than by word.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .dendrite import (
    Dendrite,
    DPoint,
    FiniteClosedSet,
    Subdendrite,
    _distance_to_set,
    _point_to_set,
    hausdorff_distance,
    set_distance,
)
from .errors import DendriteMismatch, UnknownSymbol
from .homeo import Homeo, apply, compose, identity_homeo, invert, validate
from .util import point_key

ZERO = Fraction(0)


@dataclass(frozen=True)
class Word:
    """A signed word in the generators; letters are (symbol, +1|-1)."""

    letters: tuple[tuple[str, int], ...] = ()

    @classmethod
    def identity(cls) -> "Word":
        return cls(())

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse "f g^-1 f^2" style text into a word."""
        letters: list[tuple[str, int]] = []
        for token in text.split():
            if token == "e":
                continue
            if "^" in token:
                sym, exp = token.split("^", 1)
                exp = int(exp)
            else:
                sym, exp = token, 1
            if not sym:
                raise UnknownSymbol(f"bad token {token!r}")
            sign = 1 if exp > 0 else -1
            letters.extend([(sym, sign)] * abs(exp))
        return cls(tuple(letters))

    def __str__(self):
        if not self.letters:
            return "e"
        return " ".join(s if sign > 0 else f"{s}^-1" for s, sign in self.letters)

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return reduce_word(Word(self.letters + other.letters))

    def inverse(self) -> "Word":
        return Word(tuple((s, -sign) for s, sign in reversed(self.letters)))

    def is_reduced(self) -> bool:
        return all(not (a == b and sa == -sb)
                   for (a, sa), (b, sb) in zip(self.letters, self.letters[1:]))

    def first_letter(self) -> tuple[str, int] | None:
        return self.letters[0] if self.letters else None


def reduce_word(w: Word) -> Word:
    stack: list[tuple[str, int]] = []
    for sym, sign in w.letters:
        if stack and stack[-1][0] == sym and stack[-1][1] == -sign:
            stack.pop()
        else:
            stack.append((sym, sign))
    return Word(tuple(stack))


def word_power(symbol: str, k: int) -> Word:
    sign = 1 if k >= 0 else -1
    return Word(tuple((symbol, sign) for _ in range(abs(k))))


class GeneratorSet:
    """Named generators acting on one dendrite (inverses are implicit)."""

    def __init__(self, dendrite: Dendrite, items: Sequence[tuple[str, Homeo]],
                 *, check: bool = True):
        symbols = [sym for sym, _ in items]
        if len(set(symbols)) != len(symbols):
            raise UnknownSymbol("duplicate generator symbols")
        if "e" in symbols:
            raise UnknownSymbol("'e' is reserved for the empty word")
        for sym, h in items:
            if not h.dendrite.same_space(dendrite):
                raise DendriteMismatch(f"generator {sym!r} acts on a different dendrite")
            if check:
                report = validate(h)
                if not report.valid:
                    first = report.first()
                    raise UnknownSymbol(
                        f"generator {sym!r} fails validation: {first.kind}: {first.detail}")
        self.dendrite = dendrite
        self.items = tuple(items)
        self._by_symbol = dict(items)
        self._inverses: dict[str, Homeo] = {}

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(sym for sym, _ in self.items)

    def homeo(self, symbol: str, sign: int = 1) -> Homeo:
        if symbol not in self._by_symbol:
            raise UnknownSymbol(f"unknown generator {symbol!r}")
        if sign > 0:
            return self._by_symbol[symbol]
        if symbol not in self._inverses:
            self._inverses[symbol] = invert(self._by_symbol[symbol])
        return self._inverses[symbol]

    def signed(self) -> list[tuple[str, int, Homeo]]:
        out = []
        for sym in self.symbols:
            out.append((sym, 1, self.homeo(sym, 1)))
            out.append((sym, -1, self.homeo(sym, -1)))
        return out


def word_ball(gens: GeneratorSet, radius: int) -> list[Word]:
    """All reduced words of length <= radius, identity included."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    ball: list[Word] = [Word.identity()]
    frontier: list[Word] = [Word.identity()]
    alphabet = [(sym, sign) for sym in gens.symbols for sign in (1, -1)]
    for _ in range(radius):
        nxt: list[Word] = []
        for w in frontier:
            last = w.letters[-1] if w.letters else None
            for sym, sign in alphabet:
                if last is not None and last[0] == sym and last[1] == -sign:
                    continue
                nxt.append(Word(w.letters + ((sym, sign),)))
        ball.extend(nxt)
        frontier = nxt
    return ball


def evaluate_word(w: Word, gens: GeneratorSet) -> Homeo:
    w = reduce_word(w)
    result = identity_homeo(gens.dendrite)
    for sym, sign in reversed(w.letters):
        result = compose(gens.homeo(sym, sign), result)
    return result


def apply_word(w: Word, gens: GeneratorSet, p: DPoint) -> DPoint:
    """Image of a point under a word, letter by letter (no homeo composition)."""
    for sym, sign in reversed(w.letters):
        p = apply(gens.homeo(sym, sign), p)
    return p


@dataclass(frozen=True)
class OrbitReport:
    base: DPoint
    radius: int
    points: FiniteClosedSet
    closed: bool
    growth: tuple[int, ...]


def _orbit_layers(gens: GeneratorSet, x: DPoint, radius: int):
    """BFS point layers; yields the cumulative set after each radius step."""
    x = gens.dendrite.check_point(x)
    seen = {x}
    frontier = [x]
    yield set(seen)
    maps = [h for _, _, h in gens.signed()]
    for _ in range(radius):
        nxt = []
        for p in frontier:
            for h in maps:
                q = apply(h, p)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
        yield set(seen)


def _is_closed(gens: GeneratorSet, points: set) -> bool:
    """Strong invariance: every signed generator maps the set into itself."""
    for _, _, h in gens.signed():
        for p in points:
            if apply(h, p) not in points:
                return False
    return True


def orbit(gens: GeneratorSet, x: DPoint, radius: int) -> OrbitReport:
    layers = list(_orbit_layers(gens, x, radius))
    points = layers[-1]
    return OrbitReport(base=gens.dendrite.check_point(x),
                       radius=radius,
                       points=FiniteClosedSet(gens.dendrite, points),
                       closed=_is_closed(gens, points),
                       growth=tuple(len(layer) for layer in layers))


@dataclass(frozen=True)
class FiniteOrbitResult:
    found: bool
    orbit: FiniteClosedSet | None
    radius: int | None
    growth: tuple[int, ...]


def detect_finite_orbit(gens: GeneratorSet, x: DPoint, budget: int) -> FiniteOrbitResult:
    """First radius at which the orbit ball is generator-closed, if any.

    Interior images land in the ball by construction, so the ball at radius r
    is closed exactly when the radius r+1 layer adds nothing; one look-ahead
    step certifies closure without a full invariance scan.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    growth: list[int] = []
    prev: set | None = None
    for r, layer in enumerate(_orbit_layers(gens, x, budget + 1)):
        growth.append(len(layer))
        if prev is not None and len(layer) == len(prev):
            radius = max(r - 1, 1)
            if radius <= budget:
                return FiniteOrbitResult(True, FiniteClosedSet(gens.dendrite, prev),
                                         radius, tuple(growth[:-1]))
        prev = layer
    return FiniteOrbitResult(False, None, None, tuple(growth[:budget + 1]))


@dataclass(frozen=True)
class MinimalSetApprox:
    points: FiniteClosedSet
    radius: int
    increments: tuple[Fraction, ...]
    eps: Fraction
    converged: bool
    certified_finite: bool
    closed_radius: int | None


def minimal_set_approx(gens: GeneratorSet, x: DPoint, radius: int,
                       eps: Fraction) -> MinimalSetApprox:
    """Orbit ball with Hausdorff increments between consecutive radii."""
    if radius < 2:
        raise ValueError("radius must be at least 2")
    layers = list(_orbit_layers(gens, x, radius))
    sets = [FiniteClosedSet(gens.dendrite, layer) for layer in layers]
    increments = tuple(hausdorff_distance(sets[i - 1], sets[i])
                       for i in range(1, len(sets)))
    closed_radius = None
    for r in range(1, len(layers)):
        if len(layers[r]) == len(layers[r - 1]):
            closed_radius = max(r - 1, 1)
            break
    if closed_radius is None and _is_closed(gens, layers[-1]):
        closed_radius = len(layers) - 1
    converged = bool(increments) and increments[-1] < eps
    return MinimalSetApprox(points=sets[-1],
                            radius=radius,
                            increments=increments,
                            eps=Fraction(eps),
                            converged=converged,
                            certified_finite=closed_radius is not None,
                            closed_radius=closed_radius)


@dataclass(frozen=True)
class Classification:
    kind: str  # "finite-orbit" | "whole-space" | "cantor-like" | "inconclusive"
    eps: Fraction
    details: dict = field(compare=False, default_factory=dict)


def classify_minimal_set(dendrite: Dendrite, m: FiniteClosedSet, eps,
                         *, certified_finite: bool = False,
                         probes: Iterable[DPoint] | None = None) -> Classification:
    """Resolution-bounded verdict on the character of an approximate minimal set.

    A certified closed orbit wins outright.  Otherwise the set is epsilon-dense
    (whole space), or epsilon-perfect but not dense (Cantor-like at this
    resolution), or nothing fires.  Never a proof; the epsilon is recorded.
    """
    eps = Fraction(eps)
    if len(m) == 0:
        raise ValueError("cannot classify an empty set")
    if certified_finite:
        return Classification("finite-orbit", eps, {"size": len(m)})
    probe_list = list(probes) if probes is not None else dendrite.skeleton_points()
    dist, on_edge = _distance_to_set(dendrite, m)
    gaps = [(p, _point_to_set(dendrite, dist, on_edge, dendrite.check_point(p)))
            for p in probe_list]
    worst_probe, worst_gap = max(gaps, key=lambda pg: (pg[1], point_key(pg[0])))
    dense = worst_gap <= eps
    if dense:
        return Classification("whole-space", eps, {"max_probe_gap": worst_gap})
    perfect = True
    witness = None
    pts = list(m)
    for p in pts:
        rest = FiniteClosedSet(dendrite, (q for q in pts if q != p))
        if len(rest) == 0 or set_distance(dendrite, p, rest) > eps:
            perfect = False
            witness = p
            break
    if perfect:
        return Classification("cantor-like", eps,
                              {"max_probe_gap": worst_gap,
                               "sparse_witness": worst_probe})
    return Classification("inconclusive", eps, {"isolated_point": witness})


@dataclass(frozen=True)
class RecurrenceWitness:
    word: Word
    image: DPoint
    distance: Fraction


@dataclass(frozen=True)
class RecurrenceDiagnostic:
    base: DPoint
    eps: Fraction
    max_length: int
    witnesses: tuple[RecurrenceWitness, ...]

    @property
    def recurrent(self) -> bool:
        return bool(self.witnesses)


def detect_recurrence(gens: GeneratorSet, x: DPoint, eps, max_length: int
                      ) -> RecurrenceDiagnostic:
    """Words w with 1 <= |w| <= L moving x a positive distance below eps.

    A finite surrogate for net recurrence: it can only ever certify presence
    of near-returns, never their absence.
    """
    if max_length < 1:
        raise ValueError("max_length must be at least 1")
    eps = Fraction(eps)
    x = gens.dendrite.check_point(x)
    witnesses = []
    for w in word_ball(gens, max_length):
        if len(w) == 0:
            continue
        image = apply_word(w, gens, x)
        if image == x:
            continue
        d = gens.dendrite.distance(image, x)
        if d < eps:
            witnesses.append(RecurrenceWitness(w, image, d))
    witnesses.sort(key=lambda wit: (wit.distance, len(wit.word), str(wit.word)))
    return RecurrenceDiagnostic(x, eps, max_length, tuple(witnesses))


def invariant_subdendrite(gens: GeneratorSet, x: DPoint, radius: int) -> Subdendrite:
    """Hull of the orbit ball; exactly the invariant hull for a closed orbit."""
    report = orbit(gens, x, max(radius, 1))
    return gens.dendrite.hull(report.points)
