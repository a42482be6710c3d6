#!/usr/bin/env python3
"""Survey the Thompson generators: orbits, recurrence and push-forwards."""

import argparse
from fractions import Fraction

from dendrodyn.action import detect_finite_orbit, detect_recurrence, orbit
from dendrodyn.measure import canonical_measure, push_forward
from dendrodyn.zoo import interval_value, thompson_system


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed-point", default="1/2")
    parser.add_argument("--radius", type=int, default=6)
    args = parser.parse_args()

    system = thompson_system()
    X, gens = system.dendrite, system.generators

    for v in ("0", "1"):
        res = detect_finite_orbit(gens, X.vertex_point(v), 3)
        print(f"endpoint {v}: finite orbit of size {len(res.orbit)} "
              f"at radius {res.radius}")

    x = X.point("e", Fraction(args.seed_point))
    print(f"\norbit growth from {args.seed_point}:")
    rep = orbit(gens, x, args.radius)
    for radius, size in enumerate(rep.growth):
        print(f"  R={radius}  |orbit|={size}")

    diag = detect_recurrence(gens, x, Fraction(1, 8), 4)
    print(f"\nnear-returns within 1/8 using words of length <= 4: "
          f"{len(diag.witnesses)}")
    for wit in diag.witnesses[:5]:
        print(f"  {wit.word}  ->  {interval_value(wit.image)}   "
              f"(distance {wit.distance})")

    mu = canonical_measure(X)
    pushed = push_forward(gens.homeo("f"), mu)
    print("\nf pushes the uniform density to:")
    for a, b, rho in pushed.densities["e"]:
        print(f"  [{a}, {b}] density {rho}")


if __name__ == "__main__":
    main()
