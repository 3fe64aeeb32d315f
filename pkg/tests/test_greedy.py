import random

import pytest

from rcelect import (
    Election,
    Forced,
    GreedyInfeasibleError,
    OwaWeights,
    RceInstance,
    RuleMismatchError,
    closest_winner_sampled,
    committee_distance,
    enumerate_winners,
    greedy_enumerate,
    greedy_reachable,
    greedy_run,
    marginal_contribution,
    solve_rce_greedy,
    solve_rce_greedycc_fpt_n,
)
from rcelect.greedy import Enumerate, all_greedy_committees_naive, reachable_by_permutations
from conftest import random_election

# E = {v1={a,b}, v2={a}, v3={c}} with a=0, b=1, c=2
TRACE = Election(3, [(0, 1), (0,), (2,)])


class TestGreedyRun:
    def test_hand_trace(self):
        run = greedy_run(TRACE, 2, OwaWeights.cc(2))
        assert run.order == (0, 2)
        assert run.round_marginals == (2, 1)
        assert run.tie_sets[0] == (0,)

    def test_k_equals_m(self):
        for factory in (OwaWeights.av, OwaWeights.pav, OwaWeights.cc):
            run = greedy_run(TRACE, 3, factory(3))
            assert run.committee == (0, 1, 2)

    def test_clones_lexicographic(self):
        election = Election(2, [(0, 1), (0, 1)])
        run = greedy_run(election, 2, OwaWeights.pav(2))
        assert run.order == (0, 1)

    def test_forced_success_and_failure(self):
        ok = greedy_run(TRACE, 2, OwaWeights.cc(2), Forced((0, 2)))
        assert ok.order == (0, 2)
        with pytest.raises(GreedyInfeasibleError) as err:
            greedy_run(TRACE, 2, OwaWeights.cc(2), Forced((1, 2)))
        assert err.value.round_index == 1
        with pytest.raises(GreedyInfeasibleError) as err:
            greedy_run(TRACE, 2, OwaWeights.cc(2), Forced((0, 1)))
        assert err.value.round_index == 2

    def test_forced_length_checked(self):
        with pytest.raises(ValueError):
            greedy_run(TRACE, 2, OwaWeights.cc(2), Forced((0,)))

    def test_enumerate_policy_rejected(self):
        with pytest.raises(ValueError):
            greedy_run(TRACE, 2, OwaWeights.cc(2), Enumerate(5))

    def test_run_validity_property(self):
        # every pick's logged marginal equals a from-scratch recomputation
        # and is maximal among unpicked candidates
        rng = random.Random(3)
        for _ in range(150):
            n, m = rng.randint(1, 6), rng.randint(2, 7)
            election = random_election(rng, n, m)
            k = rng.randint(1, m)
            factory = rng.choice([OwaWeights.av, OwaWeights.pav, OwaWeights.cc])
            w = factory(k)
            run = greedy_run(election, k, w)
            chosen: tuple[int, ...] = ()
            for pick, logged in zip(run.order, run.round_marginals):
                marginals = {
                    c: marginal_contribution(election, chosen, c, w)
                    for c in range(m)
                    if c not in chosen
                }
                assert logged == marginals[pick] == max(marginals.values())
                chosen = tuple(sorted(chosen + (pick,)))


class TestGreedyEnumerate:
    def test_no_ties_singleton(self):
        election = Election(2, [(0,), (0,), (1,)])
        enum = greedy_enumerate(election, 1, OwaWeights.av(1), cap=None)
        assert enum.committees == ((0,),)
        assert not enum.truncated

    def test_two_universes(self):
        election = Election(2, [(0,), (1,)])
        enum = greedy_enumerate(election, 1, OwaWeights.av(1), cap=2)
        assert set(enum.committees) == {(0,), (1,)}

    def test_cap_one_with_prefer(self):
        election = Election(2, [(0,), (1,)])
        enum = greedy_enumerate(election, 1, OwaWeights.av(1), cap=1, prefer=(1,))
        assert enum.committees == ((1,),)
        assert enum.truncated

    def test_first_committee_is_lexicographic(self):
        rng = random.Random(11)
        for _ in range(100):
            election = random_election(rng, rng.randint(1, 5), rng.randint(2, 7))
            k = rng.randint(1, election.m)
            w = rng.choice([OwaWeights.av, OwaWeights.pav, OwaWeights.cc])(k)
            enum = greedy_enumerate(election, k, w, cap=None)
            assert enum.committees[0] == greedy_run(election, k, w).committee

    def test_completeness_against_naive_tree(self):
        rng = random.Random(19)
        for _ in range(150):
            election = random_election(rng, rng.randint(1, 5), rng.randint(2, 7))
            k = rng.randint(1, min(4, election.m))
            w = rng.choice([OwaWeights.av, OwaWeights.pav, OwaWeights.cc])(k)
            enum = greedy_enumerate(election, k, w, cap=None)
            assert not enum.truncated
            assert set(enum.committees) == all_greedy_committees_naive(election, k, w)


class TestGreedyReachable:
    def test_lexicographic_committee_reachable(self):
        run = greedy_run(TRACE, 2, OwaWeights.cc(2))
        ok, order = greedy_reachable(TRACE, 2, OwaWeights.cc(2), run.committee)
        assert ok and sorted(order) == sorted(run.committee)

    def test_dominated_committee_unreachable(self):
        ok, order = greedy_reachable(TRACE, 2, OwaWeights.cc(2), (1, 2))
        assert not ok and order is None

    def test_realizing_order_is_a_valid_forced_run(self):
        rng = random.Random(29)
        for _ in range(100):
            election = random_election(rng, rng.randint(1, 5), rng.randint(2, 7))
            k = rng.randint(1, min(4, election.m))
            w = rng.choice([OwaWeights.av, OwaWeights.pav, OwaWeights.cc])(k)
            target = tuple(sorted(rng.sample(range(election.m), k)))
            ok, order = greedy_reachable(election, k, w, target)
            if ok:
                run = greedy_run(election, k, w, Forced(order))
                assert run.committee == target

    def test_dp_equals_permutation_oracle(self):
        rng = random.Random(37)
        for _ in range(200):
            election = random_election(rng, rng.randint(1, 5), rng.randint(2, 8))
            k = rng.randint(1, min(4, election.m))
            w = rng.choice([OwaWeights.av, OwaWeights.pav, OwaWeights.cc])(k)
            target = tuple(sorted(rng.sample(range(election.m), k)))
            ok_dp, _ = greedy_reachable(election, k, w, target)
            ok_perm, _ = reachable_by_permutations(election, k, w, target)
            assert ok_dp == ok_perm


def _greedy_instance(rng, factory, n_max, m_max, k_max, allow_empty_after=False):
    n, m = rng.randint(1, n_max), rng.randint(2, m_max)
    k = rng.randint(1, min(k_max, m))
    w = factory(k)
    before = random_election(rng, n, m)
    after = random_election(rng, n, m, allow_empty=allow_empty_after)
    committee = greedy_run(before, k, w).committee
    inst = RceInstance(before=before, after=after, k=k, committee=committee, ell=rng.randint(0, k))
    return inst, w


def _parallel_universe_min_distance(inst, w):
    universe = all_greedy_committees_naive(inst.after, inst.k, w)
    return min(committee_distance(inst.committee, c) for c in universe)


class TestSolveRceGreedy:
    def test_unchanged(self):
        w = OwaWeights.pav(2)
        committee = greedy_run(TRACE, 2, w).committee
        inst = RceInstance(TRACE, TRACE, 2, committee, 0)
        answer = solve_rce_greedy(inst, w)
        assert answer.min_distance == 0 and answer.feasible

    def test_infeasible_at_ell_zero(self):
        before = Election(2, [(0,), (0,), (1,)])   # greedy picks 0
        after = Election(2, [(1,), (1,), (0,)])    # greedy picks 1
        inst = RceInstance(before, after, 1, (0,), 0)
        answer = solve_rce_greedy(inst, OwaWeights.cc(1))
        assert not answer.feasible
        assert answer.min_distance == 1

    def test_matches_parallel_universe_oracle(self):
        rng = random.Random(43)
        for _ in range(150):
            factory = rng.choice([OwaWeights.pav, OwaWeights.cc])
            inst, w = _greedy_instance(rng, factory, n_max=5, m_max=8, k_max=3)
            for shrink in (False, True):
                answer = solve_rce_greedy(inst, w, shrink=shrink)
                assert answer.min_distance == _parallel_universe_min_distance(inst, w)
                ok, _ = greedy_reachable(inst.after, inst.k, w, answer.witness)
                assert ok

    def test_budget_refusal_names_parameters(self):
        from rcelect import BudgetExceededError

        rng = random.Random(44)
        inst, w = _greedy_instance(rng, OwaWeights.pav, n_max=4, m_max=8, k_max=3)
        with pytest.raises(BudgetExceededError) as err:
            solve_rce_greedy(inst, w, budget=1)
        message = str(err.value)
        assert f"k={inst.k}" in message
        assert f"ell={inst.ell}" in message
        assert f"m={inst.after.m}" in message


class TestSolveRceGreedyCc:
    def test_delegation_small_k(self):
        w = OwaWeights.cc(2)
        committee = greedy_run(TRACE, 2, w).committee
        inst = RceInstance(TRACE, TRACE, 2, committee, 1)
        answer = solve_rce_greedycc_fpt_n(inst, w)
        assert answer.min_distance == 0

    def test_wrong_rule(self):
        inst = RceInstance(TRACE, TRACE, 2, (0, 1), 1)
        with pytest.raises(RuleMismatchError):
            solve_rce_greedycc_fpt_n(inst, OwaWeights.av(2))

    def test_single_star_candidate(self):
        # all voters approve only candidate 0 and k > n: any committee
        # containing 0 is reachable, distance 0
        n = 2
        election = Election(8, [(0,)] * n)
        w = OwaWeights.cc(6)
        committee = greedy_run(election, 6, w).committee
        inst = RceInstance(election, election, 6, committee, 0)
        answer = solve_rce_greedycc_fpt_n(inst, w)
        assert answer.min_distance == 0

    def test_committee_already_covering(self):
        election = Election(6, [(0,), (1, 2)])
        w = OwaWeights.cc(5)
        committee = greedy_run(election, 5, w).committee
        inst = RceInstance(election, election, 5, committee, 0)
        answer = solve_rce_greedycc_fpt_n(inst, w)
        assert answer.min_distance == 0

    def test_matches_parallel_universe_oracle_large_k(self):
        rng = random.Random(47)
        checked_large = 0
        for _ in range(150):
            n = rng.randint(1, 3)
            m = rng.randint(5, 8)
            k = rng.randint(4, min(6, m))
            w = OwaWeights.cc(k)
            before = random_election(rng, n, m)
            after = random_election(rng, n, m, allow_empty=rng.random() < 0.2)
            committee = greedy_run(before, k, w).committee
            inst = RceInstance(before, after, k, committee, rng.randint(0, k))
            if k > 2 ** n:
                checked_large += 1
            answer = solve_rce_greedycc_fpt_n(inst, w)
            assert answer.min_distance == _parallel_universe_min_distance(inst, w)
            ok, _ = greedy_reachable(inst.after, inst.k, w, answer.witness)
            assert ok
        assert checked_large > 30


class TestClosestWinnerSampled:
    def test_no_ties(self):
        election = Election(3, [(0,), (0,), (1,)])
        w = OwaWeights.av(1)
        assert closest_winner_sampled(election, 1, w, (1,), cap=10) == (0,)

    def test_reachable_original_committee_returned(self):
        election = Election(2, [(0,), (1,)])
        w = OwaWeights.av(1)
        assert closest_winner_sampled(election, 1, w, (1,), cap=10) == (1,)

    def test_not_worse_than_lexicographic(self):
        rng = random.Random(59)
        for _ in range(100):
            election = random_election(rng, rng.randint(1, 5), rng.randint(2, 7))
            k = rng.randint(1, election.m)
            w = rng.choice([OwaWeights.pav, OwaWeights.cc])(k)
            committee = tuple(sorted(rng.sample(range(election.m), k)))
            lexi = greedy_run(election, k, w).committee
            best = closest_winner_sampled(election, k, w, committee, cap=100)
            assert committee_distance(committee, best) <= committee_distance(committee, lexi)


def test_greedy_av_equals_av():
    rng = random.Random(61)
    for _ in range(200):
        election = random_election(rng, rng.randint(1, 6), rng.randint(2, 7))
        k = rng.randint(1, min(4, election.m))
        w = OwaWeights.av(k)
        greedy_set = set(greedy_enumerate(election, k, w, cap=None).committees)
        assert greedy_set == set(enumerate_winners(election, k, w))
