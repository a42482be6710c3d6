from fractions import Fraction

import pytest

from dendrodyn.action import detect_finite_orbit, evaluate_word, word_ball
from dendrodyn.dendrite import FiniteClosedSet, hausdorff_distance, mesh
from dendrodyn.equicontinuity import (
    build_tree_tower,
    equicontinuity_certificate,
    frontier_cover,
    strong_proximality_scan,
    tamper_remove_edge,
    verify_cover_equivariance,
)
from dendrodyn.errors import NoFiniteOrbitFound
from dendrodyn.homeo import apply, image_subdendrite
from dendrodyn.measure import canonical_measure, dirac
from dendrodyn.zoo import (
    corrupted_leaf_collapse,
    leaf_point,
    odometer_system,
    thompson_f_system,
    thompson_system,
)
from dendrodyn.action import GeneratorSet

F = Fraction


def leaf_set(system, depth):
    X = system.dendrite
    return FiniteClosedSet(X, [leaf_point(X, depth, k) for k in range(2 ** depth)])


@pytest.fixture(scope="module")
def odo4_setup():
    system = odometer_system(4)
    return system, leaf_set(system, 4)


class TestTower:
    def test_odometer_levels_are_branch_orbits(self, odo4_setup):
        system, m = odo4_setup
        tower = build_tree_tower(system.generators, m, 3)
        assert len(tower) == 3
        for lvl in tower.levels:
            assert len(lvl.orbit) == 2 ** lvl.index
            assert lvl.strict
            # frontier vertices all sit at the matching tree level
            assert {len(p.vertex) for p in lvl.frontier} == {lvl.index}

    def test_single_finite_orbit_tower(self):
        system = odometer_system(2)
        res = detect_finite_orbit(system.generators, leaf_point(system.dendrite, 2), 8)
        tower = build_tree_tower(system.generators, res.orbit, 3,
                                 minimal_class="finite")
        assert len(tower) == 1
        assert tower.levels[0].tree == system.dendrite.hull(res.orbit)

    def test_two_nested_orbits(self):
        # two branch-point orbits of the depth-3 tree: levels 1 and 2
        system = odometer_system(3)
        m = leaf_set(system, 3)
        tower = build_tree_tower(system.generators, m, 2)
        assert len(tower) == 2
        t1, t2 = tower.levels
        assert t1.tree._union_connected(t2.tree) == t2.tree
        assert t1.tree != t2.tree

    def test_nesting_exact(self, odo4_setup):
        system, m = odo4_setup
        tower = build_tree_tower(system.generators, m, 3)
        for a, b in zip(tower.levels, tower.levels[1:]):
            assert a.tree._union_connected(b.tree) == b.tree

    def test_frontier_generator_closed(self, odo4_setup):
        system, m = odo4_setup
        tower = build_tree_tower(system.generators, m, 3)
        g = system.generators.homeo("g")
        for lvl in tower.levels:
            assert {apply(g, p) for p in lvl.frontier} == set(lvl.frontier.points)

    def test_no_finite_orbit_regime(self):
        # a free-style PL pair with no branch points to scan: hull of the
        # thompson orbit of 1/2 has no degree-3 vertices, so nothing certifies
        system = thompson_system()
        X = system.dendrite
        m = FiniteClosedSet(X, [X.point("e", F(1, 4)), X.point("e", F(1, 2)),
                                X.point("e", F(3, 4))])
        with pytest.raises(NoFiniteOrbitFound):
            build_tree_tower(system.generators, m, 2)

    def test_hausdorff_convergence_to_leaves(self, odo4_setup):
        system, m = odo4_setup
        tower = build_tree_tower(system.generators, m, 3)
        values = [hausdorff_distance(lvl.frontier, m) for lvl in tower.levels]
        assert values == [F(1, 2), F(1, 4), F(1, 8)]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestFrontierCover:
    def test_whole_hull_gives_point_cells(self):
        system = odometer_system(2)
        m = leaf_set(system, 2)
        hull = system.dendrite.hull(m)
        cover = frontier_cover(system.dendrite, m, hull)
        assert cover.mesh() == 0
        for anchor, cell in cover.cells:
            assert cell.contains(anchor)
            assert cell.diameter() == 0

    def test_depth4_level1_subtree_cells(self, odo4_setup):
        # explicit subtree diameter sum with tail weights
        system, m = odo4_setup
        tower = build_tree_tower(system.generators, m, 3)
        cover = frontier_cover(system.dendrite, m, tower.levels[0].tree, 1)
        assert len(cover.cells) == 2
        assert cover.mesh() == 2 * (F(1, 4) + F(1, 8) + F(1, 8)) == 1

    def test_depth4_level3_single_edge_pairs(self, odo4_setup):
        system, m = odo4_setup
        tower = build_tree_tower(system.generators, m, 3)
        cover = frontier_cover(system.dendrite, m, tower.levels[2].tree, 3)
        assert len(cover.cells) == 8
        assert cover.mesh() == 2 * F(1, 8)

    def test_plain_weights_match_truncated_sums(self):
        system = odometer_system(4, leaf_weight="level")
        m = leaf_set(system, 4)
        tower = build_tree_tower(system.generators, m, 3)
        cover1 = frontier_cover(system.dendrite, m, tower.levels[0].tree, 1)
        assert cover1.mesh() == 2 * (F(1, 4) + F(1, 8) + F(1, 16))
        cover3 = frontier_cover(system.dendrite, m, tower.levels[2].tree, 3)
        assert cover3.mesh() == 2 * F(1, 16)

    def test_cells_touch_tree_only_at_anchor(self, odo4_setup):
        system, m = odo4_setup
        tower = build_tree_tower(system.generators, m, 2)
        for lvl in tower.levels:
            cover = frontier_cover(system.dendrite, m, lvl.tree, lvl.index)
            for anchor, cell in cover.cells:
                inter = cell.intersection(lvl.tree)
                single = system.dendrite.hull([anchor])
                assert inter == single

    def test_anchor_outside_frontier_reported(self, star3):
        from dendrodyn.errors import CoverageGap
        # a point hanging off the interior of the sub-tree has no cell
        tree = star3.arc(star3.vertex_point("l1"), star3.vertex_point("l2"))
        m = FiniteClosedSet(star3, [star3.vertex_point("l3")])
        with pytest.raises(CoverageGap):
            frontier_cover(star3, m, tree)

    def test_cells_cover_minimal_set(self, odo4_setup):
        system, m = odo4_setup
        tower = build_tree_tower(system.generators, m, 2)
        cover = frontier_cover(system.dendrite, m, tower.levels[1].tree, 2)
        for x in m:
            assert any(cell.contains(x) for _, cell in cover.cells)


class TestEquivariance:
    def test_identity_trivially_equivariant(self, odo4_setup):
        from dendrodyn.homeo import identity_homeo
        system, m = odo4_setup
        X = system.dendrite
        tower = build_tree_tower(system.generators, m, 2)
        cover = frontier_cover(X, m, tower.levels[0].tree, 1)
        idgens = GeneratorSet(X, [("i", identity_homeo(X))])
        assert verify_cover_equivariance(idgens, cover).ok

    def test_odometer_equivariant_all_levels(self, odo4_setup):
        system, m = odo4_setup
        tower = build_tree_tower(system.generators, m, 3)
        for lvl in tower.levels:
            cover = frontier_cover(system.dendrite, m, lvl.tree, lvl.index)
            report = verify_cover_equivariance(system.generators, cover)
            assert report.ok and report.counterexample is None

    def test_corrupted_vertex_map_reported(self, odo4_setup):
        system, m = odo4_setup
        X = system.dendrite
        tower = build_tree_tower(system.generators, m, 2)
        cover = frontier_cover(X, m, tower.levels[0].tree, 1)
        bad = GeneratorSet(X, [("c", corrupted_leaf_collapse(4, X))], check=False)
        report = verify_cover_equivariance(bad, cover)
        assert not report.ok
        assert report.counterexample is not None

    def test_word_equivariance_extends(self, odo4_setup):
        # spot check: words up to length 4 still permute the cells
        system, m = odo4_setup
        tower = build_tree_tower(system.generators, m, 2)
        cover = frontier_cover(system.dendrite, m, tower.levels[1].tree, 2)
        cell_of = dict(cover.cells)
        for w in word_ball(system.generators, 4):
            h = evaluate_word(w, system.generators)
            for anchor, cell in cover.cells:
                assert image_subdendrite(h, cell) == cell_of[apply(h, anchor)]


class TestCertificate:
    def test_finite_minimal_set_trivially_certified(self):
        system = odometer_system(2)
        res = detect_finite_orbit(system.generators, leaf_point(system.dendrite, 2), 8)
        cert = equicontinuity_certificate(system.generators, res.orbit, 2,
                                          minimal_class="finite")
        assert cert.verdict == "Certified"
        assert cert.levels[-1].mesh == 0

    def test_odometer_depth8_certified_with_mesh_law(self):
        system = odometer_system(8)
        m = leaf_set(system, 8)
        cert = equicontinuity_certificate(system.generators, m, 6,
                                          mesh_target=F(1, 16))
        assert cert.verdict == "Certified"
        assert [lvl.mesh for lvl in cert.levels] == [F(2) ** (1 - n)
                                                     for n in range(1, 7)]
        # delta(2**(1-n)) is achieved at level n
        table = dict(cert.delta_table)
        for n in range(1, 7):
            assert table[F(2) ** (1 - n)] == F(2) ** (1 - n)

    def test_corrupted_cover_fails_with_witness(self):
        system = odometer_system(4)
        m = leaf_set(system, 4)
        cert = equicontinuity_certificate(system.generators, m, 2,
                                          cover_tamper=tamper_remove_edge)
        assert cert.verdict == "Failed"
        assert cert.witness is not None

    def test_mesh_target_miss_fails(self):
        system = odometer_system(4)
        m = leaf_set(system, 4)
        cert = equicontinuity_certificate(system.generators, m, 2,
                                          mesh_target=F(1, 64))
        assert cert.verdict == "Failed"


class TestProximalityScan:
    def test_point_mass_spread_zero(self):
        system = thompson_f_system()
        mu = dirac(system.dendrite, system.dendrite.point("e", F(1, 3)))
        trace = strong_proximality_scan(system.generators, mu, 1)
        assert trace.rows[0][1] == 0

    def test_odometer_isometry_keeps_spread(self):
        system = odometer_system(3)
        mu = canonical_measure(system.dendrite)
        trace = strong_proximality_scan(system.generators, mu, 2)
        spreads = trace.spreads()
        assert spreads[0] == spreads[-1]
        assert spreads[0] > 0

    def test_attracting_interval_map_contracts(self):
        system = thompson_f_system()
        mu = canonical_measure(system.dendrite)
        trace = strong_proximality_scan(system.generators, mu, 4)
        spreads = trace.spreads()
        assert all(a > b for a, b in zip(spreads, spreads[1:]))

    def test_requires_probability(self):
        from dendrodyn.errors import NotProbability
        system = thompson_f_system()
        mu = dirac(system.dendrite, system.dendrite.point("e", F(1, 3)), F(1, 2))
        with pytest.raises(NotProbability):
            strong_proximality_scan(system.generators, mu, 1)
