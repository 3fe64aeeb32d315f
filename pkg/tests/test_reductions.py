import pytest

from rcelect import (
    Graph,
    OwaWeights,
    RuleMismatchError,
    election_distance,
    enumerate_winners,
    has_independent_set,
    reduce_is_to_rce,
    solve_rce_exhaustive,
)

TRIANGLE = Graph(3, ((0, 1), (0, 2), (1, 2)))
PATH = Graph(3, ((0, 1), (1, 2)))


class TestGraph:
    def test_validation(self):
        with pytest.raises(ValueError):
            Graph(3, ((0, 0),))
        with pytest.raises(ValueError):
            Graph(3, ((0, 3),))
        with pytest.raises(ValueError):
            Graph(3, ((0, 1), (1, 0)))

    def test_normalization(self):
        graph = Graph(4, ((3, 1), (0, 2)))
        assert graph.edges == ((0, 2), (1, 3))
        assert graph.degree(3) == 1


class TestHasIndependentSet:
    def test_edgeless(self):
        graph = Graph(4, ())
        for kappa in range(5):
            assert has_independent_set(graph, kappa)

    def test_complete(self):
        assert has_independent_set(TRIANGLE, 1)
        assert not has_independent_set(TRIANGLE, 2)

    def test_path(self):
        assert has_independent_set(PATH, 2)
        assert not has_independent_set(PATH, 3)

    def test_kappa_beyond_vertices(self):
        assert not has_independent_set(PATH, 4)

    def test_size_refusal(self):
        with pytest.raises(ValueError):
            has_independent_set(Graph(25, ()), 2)


class TestReduction:
    def test_triangle_pav_structure(self):
        w = OwaWeights.pav(2)
        out = reduce_is_to_rce(TRIANGLE, 2, w)
        inst = out.instance
        assert out.t == 4
        assert out.s_pad == 0 and out.padding == ()
        assert out.dummies == (3, 4)
        assert inst.k == 2 and inst.committee == (3, 4)
        # every candidate approved by exactly (nu + kappa) * t = 20 voters
        assert set(inst.before.approval_counts) == {20}
        assert all(len(b) <= 2 for b in inst.before.ballots)
        assert election_distance(inst.before, inst.after) == 1

    def test_triangle_dummies_survive_change(self):
        for w in (OwaWeights.pav(2), OwaWeights.cc(2)):
            inst = reduce_is_to_rce(TRIANGLE, 2, w).instance
            assert inst.committee in enumerate_winners(inst.before, inst.k, w)
            assert enumerate_winners(inst.after, inst.k, w) == [inst.committee]

    def test_path_dummies_evicted(self):
        for w in (OwaWeights.pav(2), OwaWeights.cc(2)):
            out = reduce_is_to_rce(PATH, 2, w)
            inst = out.instance
            assert inst.committee in enumerate_winners(inst.before, inst.k, w)
            winners = enumerate_winners(inst.after, inst.k, w)
            assert inst.committee not in winners
            for winner in winners:
                assert not set(winner) & set(out.dummies)

    def test_min_distance_is_zero_or_kappa(self):
        w = OwaWeights.pav(3)
        survives = reduce_is_to_rce(TRIANGLE, 2, w).instance
        assert solve_rce_exhaustive(survives, w).min_distance == 0
        evicted = reduce_is_to_rce(PATH, 2, w).instance
        answer = solve_rce_exhaustive(evicted, w)
        assert answer.min_distance == 2  # every winner replaces all kappa dummies
        assert not answer.feasible  # ell defaults to kappa - 1

    def test_cc_uses_smaller_group_multiplier(self):
        out = reduce_is_to_rce(TRIANGLE, 2, OwaWeights.cc(2))
        assert out.t == 2  # ceil(2 / (1 - 0))

    def test_padded_rule(self):
        # lambda = (1, 1, 1/2): two leading ones -> one universally approved
        # padding candidate, committee size kappa + 1
        w = OwaWeights((1, 1, "1/2"), name="owa=1,1,1/2")
        out = reduce_is_to_rce(TRIANGLE, 2, w)
        inst = out.instance
        assert out.s_pad == 1
        assert out.t == 4  # alpha = lambda(3) = 1/2
        assert inst.k == 3
        assert set(out.padding) <= set(inst.committee)
        pad = out.padding[0]
        assert all(pad in b for b in inst.before.ballots)
        assert all(len(b) <= 3 for b in inst.before.ballots)
        assert inst.committee in enumerate_winners(inst.before, inst.k, w)
        # the triangle has no 2-IS, so the committee still wins after the change
        assert inst.committee in enumerate_winners(inst.after, inst.k, w)
        # padding shows up in every winner of the changed election
        for winner in enumerate_winners(inst.after, inst.k, w):
            assert pad in winner

    def test_padded_rule_with_independent_set(self):
        w = OwaWeights((1, 1, "1/2"), name="owa=1,1,1/2")
        out = reduce_is_to_rce(PATH, 2, w)
        inst = out.instance
        winners = enumerate_winners(inst.after, inst.k, w)
        assert inst.committee not in winners
        for winner in winners:
            assert not set(winner) & set(out.dummies)
            assert out.padding[0] in winner

    def test_av_rejected(self):
        with pytest.raises(RuleMismatchError):
            reduce_is_to_rce(TRIANGLE, 2, OwaWeights.av(2))

    def test_weight_vector_too_short_for_padding(self):
        w = OwaWeights((1, 1, "1/2"), name="owa=1,1,1/2")
        with pytest.raises(ValueError):
            reduce_is_to_rce(TRIANGLE, 3, w)  # needs k = 4 > 3 weights

    def test_kappa_validated(self):
        with pytest.raises(ValueError):
            reduce_is_to_rce(TRIANGLE, 0, OwaWeights.pav(2))

    def test_single_vertex(self):
        w = OwaWeights.pav(2)
        out = reduce_is_to_rce(Graph(1, ()), 2, w)
        inst = out.instance
        # one vertex cannot host a 2-independent-set, so the dummies survive
        assert inst.committee in enumerate_winners(inst.after, inst.k, w)
