"""Small shared helpers: exact rational I/O and deterministic ordering keys."""

from __future__ import annotations

from fractions import Fraction


def frac(value) -> Fraction:
    """Coerce ints, strings like ``"3/4"`` and Fractions to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def frac_str(value: Fraction) -> str:
    return str(Fraction(value))


def id_key(identifier):
    """Sort key that keeps mixed int/str identifier sets deterministic."""
    if isinstance(identifier, bool):
        raise TypeError("bool is not a valid identifier")
    if isinstance(identifier, int):
        return (0, identifier, "")
    return (1, 0, str(identifier))


def point_key(point):
    """Deterministic ordering for DPoints (vertices first, then edge positions)."""
    t = getattr(point, "t", None)
    if t is None:
        return (0, id_key(point.vertex), Fraction(0))
    return (1, id_key(point.edge), t)


def dyadic_candidates(max_exp: int = 12) -> list[Fraction]:
    """Candidate moduli 1, 1/2, ..., 2**-max_exp in decreasing order."""
    return [Fraction(1, 2**k) for k in range(max_exp + 1)]


def sample_dyadic(rng, depth: int = 10) -> Fraction:
    """A uniformly random dyadic rational strictly inside (0, 1)."""
    q = 2**depth
    return Fraction(rng.randrange(1, q), q)
