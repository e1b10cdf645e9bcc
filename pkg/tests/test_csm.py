"""The CSM construction itself: local data, gluing, blow-up compatibility,
naturality, covariance, fibrations, inclusion-exclusion, closure diagrams."""

import random

import pytest

from toriccsm.chow import CycleClass, classes_equal, degree, fundamental_class
from toriccsm.constructible import (
    ConstructibleFunction,
    euler_characteristic,
    indicator_of_orbit_closure,
    random_function,
)
from toriccsm.csm import (
    BlowupEdge,
    GoodClosure,
    csm_class,
    local_data,
    prochow_assign_local_data,
    two_node_diagram,
    verify_blowup_formula,
    verify_covariance,
    verify_fibration,
    verify_gluing,
    verify_inclusion_exclusion,
    verify_naturality,
    verify_prochow_compatibility,
)
from toriccsm.errors import ValidationError
from toriccsm.fans import ZERO_CONE, Cone, ToricMorphism, product_fan, star_quotient_fan, star_subdivision


def boundary_subsets(fan):
    n = len(fan.rays)
    for mask in range(1 << n):
        yield frozenset(i for i in range(n) if mask >> i & 1)


class TestLocalData:
    def test_full_boundary_is_fundamental(self, p2):
        gc = GoodClosure(p2, frozenset({0, 1, 2}))
        assert local_data(gc) == fundamental_class(p2)

    def test_empty_boundary_is_total_chern_class(self, p2):
        gc = GoodClosure(p2, frozenset())
        got = local_data(gc)
        assert got.to_json() == {
            "": 1, "0": 1, "1": 1, "2": 1, "0,1": 1, "0,2": 1, "1,2": 1}
        assert degree(got) == 3

    def test_affine_chart(self, p2):
        gc = GoodClosure(p2, frozenset({2}))
        got = local_data(gc)
        assert got.to_json() == {"": 1, "0": 1, "1": 1, "0,1": 1}
        assert degree(got) == 1  # chi_c of the affine plane

    def test_rejects_incomplete_fan(self):
        from toriccsm.fans import make_fan

        affine = make_fan("affine", 2, [(1, 0), (0, 1)], [(0, 1)])
        with pytest.raises(ValidationError):
            GoodClosure(affine, frozenset())


class TestCsmClass:
    def test_constant_one_is_orbit_sum(self, p2):
        got = csm_class(ConstructibleFunction.constant(p2, 1))
        assert got == CycleClass(p2, {c: 1 for c in p2.sorted_cones})
        assert degree(got) == 3

    def test_invariant_line(self, p2):
        got = csm_class(indicator_of_orbit_closure(p2, Cone((0,))))
        assert got.to_json() == {"0": 1, "0,1": 1, "0,2": 1}
        assert degree(got) == 2  # chi of a line

    def test_zero_function(self, p2):
        assert csm_class(ConstructibleFunction(p2, {})).is_zero

    def test_normalization_on_corpus(self, corpus):
        for name, fan in corpus.fans.items():
            total = csm_class(ConstructibleFunction.constant(fan, 1))
            assert degree(total) == len(fan.maximal_cones), name

    def test_subvariety_normalization(self, corpus):
        # the CSM class of an invariant subvariety is the image of the total
        # tangent Chern class of its own fan under the cone correspondence
        for name, fan in corpus.fans.items():
            for cone in fan.sorted_cones:
                qfan, _, from_q = star_quotient_fan(fan, cone)
                tangent = local_data(GoodClosure(qfan, frozenset()))
                pushed = CycleClass(
                    fan, {from_q[c]: v for c, v in tangent.coefficients.items()})
                expected = csm_class(indicator_of_orbit_closure(fan, cone))
                assert classes_equal(pushed, expected), (name, cone.key)


class TestGluing:
    def test_affine_chart(self, p2):
        assert verify_gluing(GoodClosure(p2, frozenset({2})))

    def test_empty_boundary_everywhere(self, corpus):
        for fan in corpus.fans.values():
            assert verify_gluing(GoodClosure(fan, frozenset()))

    def test_full_boundary(self, p2):
        assert verify_gluing(GoodClosure(p2, frozenset({0, 1, 2})))

    def test_exhaustive_over_corpus(self, corpus):
        for name, fan in corpus.fans.items():
            for S in boundary_subsets(fan):
                assert verify_gluing(GoodClosure(fan, S)), (name, sorted(S))

    def test_gluing_hook_rejects_wrong_table(self, p2):
        # a candidate datum that ignores the boundary entirely cannot glue
        def constant_table(gc):
            return fundamental_class(gc.fan)

        assert not verify_gluing(GoodClosure(p2, frozenset()), data=constant_table)
        assert verify_gluing(GoodClosure(p2, frozenset({0, 1, 2})), data=constant_table)


class TestBlowupFormula:
    def test_center_in_open_part(self, p2):
        result = verify_blowup_formula(GoodClosure(p2, frozenset({2})), Cone((0, 1)))
        assert result.passed and result.branch == "center_meets_open"

    def test_center_on_boundary(self, p2):
        result = verify_blowup_formula(GoodClosure(p2, frozenset({2})), Cone((1, 2)))
        assert result.passed and result.branch == "center_in_boundary"

    def test_codimension_two_center_in_threefold(self, p3):
        result = verify_blowup_formula(GoodClosure(p3, frozenset({3})), Cone((0, 1)))
        assert result.passed and result.branch == "center_meets_open"

    def test_rejects_divisorial_center(self, p2):
        with pytest.raises(ValidationError):
            verify_blowup_formula(GoodClosure(p2, frozenset()), Cone((0,)))

    def test_exhaustive_with_both_branches(self, corpus):
        branch_counts = {"center_in_boundary": 0, "center_meets_open": 0}
        for name, fan in corpus.fans.items():
            for S in boundary_subsets(fan):
                gc = GoodClosure(fan, S)
                for center in fan.sorted_cones:
                    if center.dim < 2:
                        continue
                    result = verify_blowup_formula(gc, center)
                    assert result.passed, (name, sorted(S), center.key)
                    branch_counts[result.branch] += 1
        assert branch_counts["center_in_boundary"] >= 5
        assert branch_counts["center_meets_open"] >= 5


class TestNaturality:
    def test_blowdown_constant(self, corpus):
        down = corpus.morphisms["blowdown"]
        result = verify_naturality(down, ConstructibleFunction.constant(down.source, 1))
        assert result.passed
        assert degree(result.lhs) == degree(result.rhs) == 4

    def test_projection_constant(self, corpus):
        pr1 = corpus.morphisms["p1xp1_pr1"]
        result = verify_naturality(pr1, ConstructibleFunction.constant(pr1.source, 1))
        assert result.passed
        assert degree(result.lhs) == 4

    def test_identity(self, p2):
        m = ToricMorphism.identity(p2)
        phi = indicator_of_orbit_closure(p2, Cone((1,)))
        assert verify_naturality(m, phi).passed

    def test_random_functions_all_morphisms(self, corpus):
        rng = random.Random(100)
        for name, m in sorted(corpus.morphisms.items()):
            for _ in range(100):
                phi = random_function(m.source, rng)
                assert verify_naturality(m, phi).passed, name


class TestCovariance:
    def test_blowdown_then_point(self, corpus, pt):
        down = corpus.morphisms["blowdown"]
        to_point = corpus.morphisms["p2_to_pt"]
        phi = ConstructibleFunction.constant(down.source, 1)
        assert verify_covariance(down, to_point, phi)
        from toriccsm.constructible import pushforward_function
        from toriccsm.fans import compose

        collapsed = pushforward_function(compose(to_point, down), phi)
        assert collapsed.value(ZERO_CONE) == 4  # chi of the blown-up plane

    def test_identity_first(self, corpus):
        to_point = corpus.morphisms["p2_to_pt"]
        phi = ConstructibleFunction.constant(to_point.source, 1)
        assert verify_covariance(
            ToricMorphism.identity(to_point.source), to_point, phi)

    def test_fiber_indicator(self, corpus):
        pr1 = corpus.morphisms["p1xp1_pr1"]
        to_point = corpus.morphisms["p1_to_pt"]
        fiber = indicator_of_orbit_closure(pr1.source, Cone((2,)))
        assert verify_covariance(pr1, to_point, fiber)
        assert euler_characteristic(fiber) == 2

    def test_all_composable_pairs_random(self, corpus):
        rng = random.Random(55)
        for nf, ng in corpus.composable_pairs():
            f, g = corpus.morphisms[nf], corpus.morphisms[ng]
            for _ in range(50):
                assert verify_covariance(f, g, random_function(f.source, rng)), (nf, ng)


class TestFibration:
    def test_line_over_plane(self, p1, p2):
        total, to_base, _ = product_fan(p2, p1)
        assert verify_fibration(to_base, p1)

    def test_tower_multiplies(self, p1):
        square, sq_to_line, _ = product_fan(p1, p1)
        cube, cube_to_square, _ = product_fan(square, p1)
        from toriccsm.fans import compose

        assert verify_fibration(cube_to_square, p1)
        assert verify_fibration(sq_to_line, p1)
        assert verify_fibration(compose(sq_to_line, cube_to_square), square)
        assert len(square.maximal_cones) == 2 * 2

    def test_point_fiber_is_identity(self, p2, pt):
        total, to_base, _ = product_fan(p2, pt)
        assert verify_fibration(to_base, pt)


class TestInclusionExclusion:
    def test_two_boundary_lines(self, p2):
        assert verify_inclusion_exclusion(p2, Cone((0,)), Cone((1,)))
        union = indicator_of_orbit_closure(p2, Cone((0,))).pointwise_max(
            indicator_of_orbit_closure(p2, Cone((1,))))
        assert degree(csm_class(union)) == 3  # 2 + 2 - 1, a nodal conic

    def test_same_cone(self, p2):
        assert verify_inclusion_exclusion(p2, Cone((0,)), Cone((0,)))

    def test_disjoint_fixed_points(self, p2):
        assert verify_inclusion_exclusion(p2, Cone((0, 1)), Cone((1, 2)))

    def test_random_pairs(self, corpus):
        rng = random.Random(77)
        for name, fan in corpus.fans.items():
            cones = fan.sorted_cones
            for _ in range(20):
                c1 = cones[rng.randrange(len(cones))]
                c2 = cones[rng.randrange(len(cones))]
                assert verify_inclusion_exclusion(fan, c1, c2), (name, c1.key, c2.key)


class TestProChow:
    def test_torus_diagram(self, p2):
        gc = GoodClosure(p2, frozenset({0, 1, 2}))
        diagram = two_node_diagram(gc, Cone((0, 1)))
        assert verify_prochow_compatibility(diagram)
        assert diagram.classes["base"] == fundamental_class(p2)

    def test_affine_chart_diagram(self, p2):
        # the center must sit inside the boundary for both nodes to present
        # the same open set
        gc = GoodClosure(p2, frozenset({2}))
        diagram = two_node_diagram(gc, Cone((1, 2)))
        assert verify_prochow_compatibility(diagram)

    def test_center_meeting_open_set_rejected(self, p2):
        gc = GoodClosure(p2, frozenset({2}))
        with pytest.raises(ValidationError, match="meets the open part"):
            two_node_diagram(gc, Cone((0, 1)))

    def test_corrupted_class_fails(self, p2):
        gc = GoodClosure(p2, frozenset({0, 1, 2}))
        diagram = two_node_diagram(gc, Cone((0, 1)))
        broken = diagram.with_class(
            "blowup",
            diagram.classes["blowup"] + fundamental_class(diagram.nodes["blowup"].fan))
        assert not verify_prochow_compatibility(broken)

    def test_single_node(self, p2):
        gc = GoodClosure(p2, frozenset({2}))
        element = prochow_assign_local_data({"only": gc}, [])
        assert verify_prochow_compatibility(element)
        assert element.classes["only"] == local_data(gc)

    def test_mismatched_edge_rejected(self, p2):
        gc = GoodClosure(p2, frozenset({0, 1, 2}))
        blown, down = star_subdivision(p2, Cone((0, 1)))
        upstairs = GoodClosure(blown, frozenset({0, 1, 2, 3}))
        wrong_center = Cone((1, 2))
        nodes = {"base": gc, "blowup": upstairs}
        with pytest.raises(ValidationError):
            prochow_assign_local_data(
                nodes, [BlowupEdge("blowup", "base", wrong_center, down)])

    def test_all_admissible_two_node_diagrams(self, corpus):
        count = 0
        for name, fan in corpus.fans.items():
            for S in boundary_subsets(fan):
                gc = GoodClosure(fan, S)
                for center in fan.sorted_cones:
                    if center.dim < 2 or not (S & set(center.ray_indices)):
                        continue
                    assert verify_prochow_compatibility(
                        two_node_diagram(gc, center)), (name, sorted(S), center.key)
                    count += 1
        assert count >= 50

    def test_three_node_chains(self, p2):
        # iterate: blow up a boundary center, then a boundary center of the
        # result; the chained diagram must be compatible along both edges
        # and along the composite
        from toriccsm.chow import pushforward_cycle
        from toriccsm.fans import compose

        base = GoodClosure(p2, frozenset({2}))
        chains = 0
        for center1 in p2.sorted_cones:
            if center1.dim < 2 or not ({2} & set(center1.ray_indices)):
                continue
            mid_fan, down1 = star_subdivision(p2, center1)
            mid = GoodClosure(mid_fan, frozenset(base.boundary | {len(p2.rays)}))
            for center2 in mid_fan.sorted_cones:
                if center2.dim < 2 or not (mid.boundary & set(center2.ray_indices)):
                    continue
                top_fan, down2 = star_subdivision(mid_fan, center2)
                top = GoodClosure(
                    top_fan, frozenset(mid.boundary | {len(mid_fan.rays)}))
                nodes = {"base": base, "mid": mid, "top": top}
                edges = [
                    BlowupEdge("mid", "base", center1, down1),
                    BlowupEdge("top", "mid", center2, down2),
                ]
                element = prochow_assign_local_data(nodes, edges)
                assert verify_prochow_compatibility(element)
                composite = pushforward_cycle(
                    compose(down1, down2), element.classes["top"])
                assert classes_equal(composite, element.classes["base"])
                chains += 1
        assert chains >= 4
