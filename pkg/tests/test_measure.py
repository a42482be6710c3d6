import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dendrodyn.action import Word, detect_finite_orbit, evaluate_word, orbit
from dendrodyn.dendrite import Dendrite
from dendrodyn.errors import NotCertifiedOrbit, NotProbability
from dendrodyn.measure import (
    FolnerScheme,
    TestFunction,
    canonical_measure,
    dirac,
    folner_average,
    folner_ratio,
    integrate,
    invariance_defect,
    push_forward,
    uniform_orbit_measure,
)
from dendrodyn.zoo import (
    folner_scheme_Z,
    gehman_dendrite,
    leaf_point,
    odometer_system,
    thompson_system,
    unit_interval_dendrite,
)

from conftest import pl_maps

F = Fraction


@pytest.fixture(scope="module")
def thomp():
    return thompson_system()


@pytest.fixture(scope="module")
def odo6():
    return odometer_system(6)


class TestCanonicalMeasure:
    def test_single_edge_uniform(self):
        X = unit_interval_dendrite()
        mu = canonical_measure(X)
        assert mu.total_mass() == 1
        assert mu.arc_mass(X.vertex_point("0"), X.point("e", F(1, 3))) == F(1, 3)

    def test_constant_one_integrates_to_one(self):
        X = gehman_dendrite(3)
        mu = canonical_measure(X)
        assert integrate(mu, TestFunction.constant(X, 1)) == 1

    def test_gehman_shape_with_dyadic_rule_arc_mass(self):
        # depth-2 shape, enumeration weights 1/2 .. 1/64
        base = gehman_dendrite(2)
        X = Dendrite(sorted(base.vertices, key=str),
                     [(e.eid, e.u, e.v, e.level) for e in base.edges], "dyadic")
        mu = canonical_measure(X)
        total = sum(F(1, 2 ** i) for i in range(1, 7))
        assert mu.norm == total
        arc_mass = mu.arc_mass(X.vertex_point("0"), X.vertex_point("1"))
        assert arc_mass == (F(1, 2) + F(1, 4)) / total

    def test_forest_chaining_propagates(self):
        from dendrodyn.errors import ChainingViolation
        X = Dendrite.forest(["a", "b", "c", "d"],
                            [("e1", "a", "b"), ("e2", "c", "d")], [1, 1])
        with pytest.raises(ChainingViolation):
            canonical_measure(X)

    def test_edge_masses_proportional_to_weights(self):
        X = gehman_dendrite(2, leaf_weight="level")
        mu = canonical_measure(X)
        for e in X.edges:
            assert mu.arc_mass(X.vertex_point(e.u), X.vertex_point(e.v)) == \
                e.weight / mu.norm


class TestPushForward:
    def test_identity(self, thomp):
        from dendrodyn.homeo import identity_homeo
        mu = canonical_measure(thomp.dendrite)
        assert push_forward(identity_homeo(thomp.dendrite), mu) == mu

    def test_thompson_f_density(self, thomp):
        mu = canonical_measure(thomp.dendrite)
        pushed = push_forward(thomp.generators.homeo("f"), mu)
        assert pushed.densities["e"] == (
            (F(0), F(1, 4), F(2)),
            (F(1, 4), F(1, 2), F(1)),
            (F(1, 2), F(1), F(1, 2)),
        )

    def test_thompson_f_density_quadrature_oracle(self, thomp):
        # float change-of-variables check of the same masses
        X, gens = thomp.dendrite, thomp.generators
        pushed = push_forward(gens.homeo("f"), canonical_measure(X))
        f = lambda x: x / 2 if x <= 0.5 else (x - 0.25 if x < 0.75 else 2 * x - 1)
        n = 20000
        for lo, hi in [(0, 0.25), (0.25, 0.5), (0.5, 1.0)]:
            count = sum(1 for k in range(n) if lo <= f((k + 0.5) / n) < hi)
            exact = pushed.arc_mass(X.point("e", F(lo).limit_denominator(4)),
                                    X.point("e", F(hi).limit_denominator(4)))
            assert abs(count / n - float(exact)) < 0.001

    def test_atom_transport(self, thomp):
        X = thomp.dendrite
        mu = dirac(X, X.point("e", F(3, 4)))
        pushed = push_forward(thomp.generators.homeo("f"), mu)
        assert pushed.atoms == ((X.point("e", F(1, 2)), F(1)),)

    def test_mass_conserved_on_zoo_words(self, thomp, odo6):
        rng = random.Random(13)
        for system in (thomp, odo6):
            X, gens = system.dendrite, system.generators
            mu = canonical_measure(X).scaled(F(1, 2)).add(
                dirac(X, X.skeleton_points()[0], F(1, 2)))
            for _ in range(10):
                word = Word(tuple((rng.choice(gens.symbols), rng.choice((1, -1)))
                                  for _ in range(rng.randrange(1, 5))))
                pushed = push_forward(evaluate_word(word, gens), mu)
                assert pushed.total_mass() == mu.total_mass()

    def test_weight_changing_edge_swap(self):
        # densities pick up the weight ratio so arc masses transport exactly
        from dendrodyn.homeo import apply, tree_automorphism
        from dendrodyn.measure import PLMeasure
        X = Dendrite(["a", "b", "c"], [("e1", "a", "b", 1), ("e2", "b", "c", 1)],
                     [F(1, 2), F(1, 4)])
        h = tree_automorphism(X, {"a": "c", "b": "b", "c": "a"})
        mu = PLMeasure(X, [], {"e1": [(F(0), F(1), F(3))]})
        pushed = push_forward(h, mu)
        assert pushed.densities == {"e2": ((F(0), F(1), F(6)),)}
        assert pushed.total_mass() == mu.total_mass() == F(3, 2)
        p = X.point("e1", F(1, 2))
        assert mu.arc_mass(X.vertex_point("a"), p) ==             pushed.arc_mass(X.vertex_point("c"), apply(h, p)) == F(3, 4)

    @settings(max_examples=30, deadline=None)
    @given(pl_maps())
    def test_mass_conserved_random_pl(self, m):
        X = unit_interval_dendrite()
        from dendrodyn.homeo import interval_homeo
        h = interval_homeo(X, m.xs, m.ys)
        mu = canonical_measure(X)
        assert push_forward(h, mu).total_mass() == 1


class TestIntegrate:
    def test_total_mass(self, thomp):
        mu = canonical_measure(thomp.dendrite)
        assert integrate(mu, TestFunction.constant(thomp.dendrite, 1)) == \
            mu.total_mass()

    def test_dirac_evaluates(self, thomp):
        X = thomp.dendrite
        f = TestFunction.distance_to(X, X.vertex_point("0"))
        p = X.point("e", F(2, 5))
        assert integrate(dirac(X, p), f) == f(p) == F(2, 5)

    def test_uniform_identity_function(self):
        X = unit_interval_dendrite()
        f = TestFunction(X, {"0": 0, "1": 1}, {})
        assert integrate(canonical_measure(X), f) == F(1, 2)

    def test_linear_in_function_and_measure(self, thomp):
        X = thomp.dendrite
        mu = canonical_measure(X)
        nu = dirac(X, X.point("e", F(1, 3)))
        f = TestFunction.distance_to(X, X.vertex_point("0"))
        g = TestFunction.constant(X, F(2, 3))
        fg = TestFunction(X, {v: f.vertex_values[v] + g.vertex_values[v]
                              for v in X.vertices},
                          {eid: (xs, tuple(y + F(2, 3) for y in ys))
                           for eid, (xs, ys) in f.edge_data.items()})
        assert integrate(mu, fg) == integrate(mu, f) + integrate(mu, g)
        mix = mu.scaled(F(1, 2)).add(nu.scaled(F(1, 2)))
        assert integrate(mix, f) == \
            F(1, 2) * integrate(mu, f) + F(1, 2) * integrate(nu, f)

    def test_riemann_oracle(self, thomp):
        X = thomp.dendrite
        mu = push_forward(thomp.generators.homeo("g"), canonical_measure(X))
        f = TestFunction.distance_to(X, X.point("e", F(1, 2)))
        exact = integrate(mu, f)
        g = lambda x: x if x <= 0.5 else (x / 2 + 0.25 if x < 0.75 else
                                          (x - 0.125 if x < 0.875 else 2 * x - 1))
        n = 40000
        approx = sum(abs(g((k + 0.5) / n) - 0.5) for k in range(n)) / n
        assert abs(float(exact) - approx) < 0.001


class TestUniformOrbitMeasure:
    def test_fixed_point_dirac(self, thomp):
        res = detect_finite_orbit(thomp.generators,
                                  thomp.dendrite.vertex_point("0"), 3)
        mu = uniform_orbit_measure(res)
        assert mu.atoms == ((thomp.dendrite.vertex_point("0"), F(1)),)
        assert invariance_defect(thomp.generators, mu, [
            TestFunction.distance_to(thomp.dendrite, thomp.dendrite.vertex_point("1"))
        ]) == 0

    def test_eight_point_level(self):
        system = odometer_system(3)
        res = detect_finite_orbit(system.generators, leaf_point(system.dendrite, 3), 8)
        mu = uniform_orbit_measure(res)
        assert len(mu.atoms) == 8
        assert all(w == F(1, 8) for _, w in mu.atoms)
        pushed = push_forward(system.generators.homeo("g"), mu)
        assert pushed == mu

    def test_two_point_orbit(self):
        system = odometer_system(1)
        res = detect_finite_orbit(system.generators, leaf_point(system.dendrite, 1), 4)
        mu = uniform_orbit_measure(res)
        assert sorted(w for _, w in mu.atoms) == [F(1, 2), F(1, 2)]

    def test_uncertified_rejected(self, thomp):
        res = detect_finite_orbit(thomp.generators,
                                  thomp.dendrite.point("e", F(1, 2)), 2)
        with pytest.raises(NotCertifiedOrbit):
            uniform_orbit_measure(res)


class TestFolnerAverage:
    def test_index_zero_returns_seed(self, odo6):
        scheme = folner_scheme_Z("g")
        mu0 = dirac(odo6.dendrite, leaf_point(odo6.dendrite, 6))
        assert folner_average(odo6.generators, scheme, mu0, 0) == mu0

    def test_invariant_seed_fixed(self, odo6):
        scheme = folner_scheme_Z("g")
        mu0 = canonical_measure(odo6.dendrite)
        assert folner_average(odo6.generators, scheme, mu0, 3) == mu0

    def test_five_atoms_along_cycle(self):
        system = odometer_system(3)
        scheme = folner_scheme_Z("g")
        mu0 = dirac(system.dendrite, leaf_point(system.dendrite, 3))
        nu = folner_average(system.generators, scheme, mu0, 2)
        assert len(nu.atoms) == 5
        assert all(w == F(1, 5) for _, w in nu.atoms)

    def test_requires_probability(self, odo6):
        scheme = folner_scheme_Z("g")
        mu0 = dirac(odo6.dendrite, leaf_point(odo6.dendrite, 6), F(1, 3))
        with pytest.raises(NotProbability):
            folner_average(odo6.generators, scheme, mu0, 1)


class TestBallMass:
    def test_interior_center_covers_own_edge_directly(self, thomp):
        # points of the center's edge are reached along the edge, not through
        # the endpoints
        X = thomp.dendrite
        mu = canonical_measure(X).scaled(F(1, 2)).add(
            dirac(X, X.point("e", F(1, 3)), F(1, 2)))
        c = X.point("e", F(1, 3))
        assert mu.ball_mass(c, F(1, 4)) == F(3, 4)
        assert mu.ball_mass(c, F(1, 3)) == F(5, 6)
        assert mu.ball_mass(c, F(2, 3)) == 1

    def test_vertex_center(self, thomp):
        X = thomp.dendrite
        mu = canonical_measure(X)
        assert mu.ball_mass(X.vertex_point("0"), F(1, 4)) == F(1, 4)
        assert mu.ball_mass(X.vertex_point("1"), F(1, 2)) == F(1, 2)

    def test_cross_edge_coverage(self):
        from dendrodyn.zoo import gehman_dendrite
        X = gehman_dendrite(2, leaf_weight="level")
        mu = canonical_measure(X)
        # ball around the root: covers a prefix of both level-1 edges
        got = mu.ball_mass(X.vertex_point("r"), F(1, 4))
        assert got == 2 * F(1, 4) / 2 / X.total_weight() * 2

    def test_spread_values_match_discretization_oracle(self, thomp):
        # frozen from a 2000-sample float oracle agreeing to 3 decimals
        from dendrodyn.equicontinuity import _spread
        X = thomp.dendrite
        pushed = push_forward(thomp.generators.homeo("f"), canonical_measure(X))
        assert _spread(pushed, F(15, 16)) == F(7, 8)
        mixture = canonical_measure(X).scaled(F(1, 2)).add(
            dirac(X, X.point("e", F(1, 3)), F(1, 2)))
        assert _spread(mixture, F(15, 16)) == F(13, 24)
        odo = odometer_system(3)
        assert _spread(canonical_measure(odo.dendrite), F(15, 16)) == F(31, 32)


def five_function_dictionary(system, depth):
    X = system.dendrite
    probes = [leaf_point(X, depth, 0), X.vertex_point("r"), X.vertex_point("0"),
              X.vertex_point("1"), leaf_point(X, depth, 2 ** depth - 1)]
    return [TestFunction.distance_to(X, p) for p in probes]


class TestInvarianceDefect:
    def test_dirac_at_moved_point(self, odo6):
        X = odo6.dendrite
        x = leaf_point(X, 6)
        f = TestFunction.distance_to(X, x)
        mu = dirac(X, x)
        gx = evaluate_word(Word.parse("g"), odo6.generators)
        from dendrodyn.homeo import apply
        expected = abs(f(apply(gx, x)) - f(x))
        assert invariance_defect(odo6.generators, mu, [f]) == expected

    def test_window_average_defect_bound_and_decay(self, odo6):
        # transport oracle: defect of the window average is the boundary
        # difference over the window size
        scheme = folner_scheme_Z("g")
        X = odo6.dendrite
        x0 = leaf_point(X, 6)
        mu0 = dirac(X, x0)
        fns = five_function_dictionary(odo6, 6)
        sup = max(f.sup_norm() for f in fns)
        gens = odo6.generators
        from dendrodyn.action import apply_word
        from dendrodyn.action import word_power

        defects = []
        for n in [1, 2, 4, 8, 16]:
            nu = folner_average(gens, scheme, mu0, n)
            defect = invariance_defect(gens, nu, fns)
            hi = apply_word(word_power("g", n + 1), gens, x0)
            lo = apply_word(word_power("g", -n), gens, x0)
            oracle = max(abs(f(hi) - f(lo)) for f in fns) / (2 * n + 1)
            assert defect == oracle
            assert defect <= 2 * sup / (2 * n + 1)
            defects.append(defect)
        assert all(a >= b for a, b in zip(defects, defects[1:]))

    def test_thompson_mass_concentrates_at_fixed_ends(self, thomp):
        # averaging along one-sided powers of f pushes mass toward 0
        X, gens = thomp.dendrite, thomp.generators
        schedule = FolnerScheme("f-powers", ("f",),
                                lambda n: tuple(Word.parse(f"f^{k}") if k else
                                                Word.identity()
                                                for k in range(n + 1)))
        mu0 = canonical_measure(X)
        lo, hi = X.point("e", F(1, 8)), X.point("e", F(7, 8))
        zero, one = X.vertex_point("0"), X.vertex_point("1")

        def near_ends_mass(mu):
            return mu.arc_mass(zero, lo) + mu.arc_mass(hi, one)

        masses = [near_ends_mass(folner_average(gens, schedule, mu0, n))
                  for n in [1, 2, 4, 8]]
        assert all(a < b for a, b in zip(masses, masses[1:]))


class TestTwoSeedAveraging:
    def test_seeds_average_toward_each_other(self):
        # unique-ergodicity diagnostic: window averages from two different
        # seeds drift together as the window grows (never a proof)
        system = odometer_system(5)
        X, gens = system.dendrite, system.generators
        scheme = folner_scheme_Z("g")
        mu1 = dirac(X, leaf_point(X, 5, 0))
        mu2 = dirac(X, leaf_point(X, 5, 11))
        fns = [TestFunction.distance_to(X, p) for p in
               [leaf_point(X, 5, 0), X.vertex_point("r"), X.vertex_point("0")]]
        gaps = []
        for n in (1, 4, 16):
            nu1 = folner_average(gens, scheme, mu1, n)
            nu2 = folner_average(gens, scheme, mu2, n)
            gaps.append(max(abs(integrate(nu1, f) - integrate(nu2, f))
                            for f in fns))
        assert gaps == [F(1, 3), F(7, 36), F(5, 88)]
        assert gaps[0] > gaps[1] > gaps[2]


class TestFolnerRatio:
    def test_identity_word(self):
        scheme = folner_scheme_Z("g")
        assert folner_ratio(scheme, "e", 3) == 0

    @pytest.mark.parametrize("n,expected", [(2, F(2, 5)), (10, F(2, 21)),
                                            (50, F(2, 101))])
    def test_window_shift_count(self, n, expected):
        # direct count oracle: shifting the window changes two endpoints
        scheme = folner_scheme_Z("g")
        assert folner_ratio(scheme, "g", n) == expected
        base = set(range(-n, n + 1))
        shifted = {k + 1 for k in base}
        assert F(len(base ^ shifted), len(base)) == expected

    def test_vanishes(self):
        scheme = folner_scheme_Z("g")
        assert folner_ratio(scheme, "g", 50) < F(1, 50)

    def test_longer_translator(self):
        scheme = folner_scheme_Z("g")
        assert folner_ratio(scheme, "g^3", 10) == F(6, 21)
