"""Greedy Thiele selection: lexicographic and forced-order runs, capped
parallel-universe enumeration, subset-DP reachability, and the greedy
resilient-committee solvers.

A committee wins a greedy Thiele rule if *some* way of breaking the per-round
marginal-contribution ties produces it; the enumeration and reachability
operations make that universe explicit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Sequence

import numpy as np

from .core import (
    BudgetExceededError,
    Election,
    OwaWeights,
    RceInstance,
    RuleMismatchError,
    as_committee,
    candidate_classes,
    committee_distance,
)
from .solvers import RceAnswer, shrink_by_classes


@dataclass(frozen=True)
class Lexicographic:
    """Break every tie in favour of the smallest candidate index."""


@dataclass(frozen=True)
class Enumerate:
    """Explore all tie-breakings, collecting up to `cap` distinct committees."""

    cap: int = 100

    def __post_init__(self):
        if self.cap < 1:
            raise ValueError("enumeration cap must be at least 1")


@dataclass(frozen=True)
class Forced:
    """Demand one specific selection order; fails if any pick is not tied for
    the maximum marginal contribution in its round."""

    order: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(c) for c in self.order))


TiePolicy = Lexicographic | Enumerate | Forced

LEXICOGRAPHIC = Lexicographic()


class GreedyInfeasibleError(ValueError):
    """A forced selection order is not realizable; `round_index` (1-based)
    names the first violating round."""

    def __init__(self, message: str, round_index: int):
        super().__init__(message)
        self.round_index = round_index


@dataclass(frozen=True)
class GreedyRun:
    """Log of one greedy execution: the pick order, the integer-scaled
    marginal of each pick, and the full argmax set of each round."""

    order: tuple[int, ...]
    round_marginals: tuple[int, ...]
    tie_sets: tuple[tuple[int, ...], ...]

    @property
    def committee(self) -> tuple[int, ...]:
        return tuple(sorted(self.order))


@dataclass(frozen=True)
class GreedyEnumeration:
    """Distinct committees found by parallel-universe exploration, in
    discovery order; `truncated` reports whether the cap stopped the search."""

    committees: tuple[tuple[int, ...], ...]
    truncated: bool


class _Scoreboard:
    """Incremental marginal bookkeeping for one election and weight vector."""

    def __init__(self, election: Election, weights: OwaWeights, k: int):
        gains = weights.gains_array(k)
        # float64 matvec (BLAS) is several times faster than int64 and stays
        # exact while every value is an integer below 2**53
        max_total = election.n * k * (int(gains.max()) if k else 0)
        if max_total < 2**53:
            self.matrix = election.matrix_f64
            self.gains = gains.astype(np.float64)
        else:
            self.matrix = election.matrix_i64
            self.gains = gains
        self._approval = election.matrix
        self.counts = np.zeros(election.n, dtype=np.int64)
        self.selected = np.zeros(election.m, dtype=bool)

    def marginals(self) -> np.ndarray:
        """Integer-scaled marginal contribution of every unselected candidate;
        selected candidates are masked with -1."""
        per_voter = self.gains[self.counts]
        marg = per_voter @ self.matrix
        marg[self.selected] = -1
        return marg

    def add(self, candidate: int) -> None:
        self.counts += self._approval[:, candidate]
        self.selected[candidate] = True

    def remove(self, candidate: int) -> None:
        self.selected[candidate] = False
        self.counts -= self._approval[:, candidate]


def _check_run_args(election: Election, k: int, weights: OwaWeights) -> None:
    if not 1 <= k <= election.m:
        raise ValueError(f"committee size {k} out of range for m={election.m}")
    if k > weights.k_max:
        raise ValueError(
            f"committee size {k} exceeds the {weights.k_max} weights of rule '{weights.name}'"
        )


def greedy_run(
    election: Election, k: int, weights: OwaWeights, policy: TiePolicy = LEXICOGRAPHIC
) -> GreedyRun:
    """Run the greedy Thiele rule once, resolving ties per `policy`."""
    _check_run_args(election, k, weights)
    if isinstance(policy, Enumerate):
        raise ValueError("use greedy_enumerate for the Enumerate policy")
    if isinstance(policy, Forced) and len(policy.order) != k:
        raise ValueError(f"forced order has {len(policy.order)} picks, expected {k}")
    board = _Scoreboard(election, weights, k)
    order: list[int] = []
    marginals: list[int] = []
    tie_sets: list[tuple[int, ...]] = []
    for rnd in range(k):
        marg = board.marginals()
        best = int(marg.max())
        ties = tuple(int(c) for c in np.flatnonzero(marg == best))
        if isinstance(policy, Forced):
            pick = policy.order[rnd]
            if pick not in ties:
                raise GreedyInfeasibleError(
                    f"candidate {pick} is not tied for the maximum marginal "
                    f"contribution in round {rnd + 1}",
                    round_index=rnd + 1,
                )
        else:
            pick = ties[0]
        order.append(pick)
        marginals.append(best)
        tie_sets.append(ties)
        board.add(pick)
    return GreedyRun(tuple(order), tuple(marginals), tuple(tie_sets))


def greedy_enumerate(
    election: Election,
    k: int,
    weights: OwaWeights,
    cap: int | None = 100,
    prefer: Sequence[int] = (),
) -> GreedyEnumeration:
    """Collect the committees of all tie-breaking executions, depth-first.

    Tied branches are explored with members of `prefer` first (ascending),
    then the remaining tied candidates ascending; with an empty `prefer` the
    first committee found is the lexicographic one.  The search stops once
    `cap` distinct committees are known (``cap=None`` removes the limit).
    """
    _check_run_args(election, k, weights)
    if cap is not None and cap < 1:
        raise ValueError("enumeration cap must be at least 1")
    prefer_set = frozenset(int(c) for c in prefer)
    board = _Scoreboard(election, weights, k)
    found: list[tuple[int, ...]] = []
    found_set: set[tuple[int, ...]] = set()
    expanded: set[frozenset[int]] = set()
    truncated = False

    def full() -> bool:
        return cap is not None and len(found) >= cap

    def dfs(depth: int, state: frozenset[int]) -> None:
        nonlocal truncated
        if depth == k:
            committee = tuple(sorted(state))
            if committee not in found_set:
                found_set.add(committee)
                found.append(committee)
            return
        marg = board.marginals()
        best = int(marg.max())
        ties = [int(c) for c in np.flatnonzero(marg == best)]
        branch_order = [c for c in ties if c in prefer_set] + [
            c for c in ties if c not in prefer_set
        ]
        for c in branch_order:
            if full():
                truncated = True
                return
            child = state | {c}
            if child in expanded:
                continue
            expanded.add(child)
            board.add(c)
            dfs(depth + 1, child)
            board.remove(c)

    dfs(0, frozenset())
    return GreedyEnumeration(tuple(found), truncated)


def _reachability_dp(
    election: Election, weights: OwaWeights, target: tuple[int, ...], k: int
) -> tuple[bool, tuple[int, ...] | None]:
    """Subset DP: can the greedy rule select exactly the set `target` in its
    first len(target) rounds?  Marginal contributions depend only on the
    selected set, so one state per subset suffices.  Returns a realizing
    order when reachable."""
    t = len(target)
    matrix = election.matrix_i64
    gains = weights.gains_array(k)
    columns = [matrix[:, c] for c in target]
    full_mask = (1 << t) - 1
    parent: dict[int, tuple[int, int]] = {}
    reachable = {0}
    # extending a mask always sets a new bit, so ascending popcount order
    # visits every parent before its children
    for mask in _masks_by_popcount(t):
        if mask not in reachable:
            continue
        if mask == full_mask:
            break
        counts = np.zeros(election.n, dtype=np.int64)
        for i in range(t):
            if mask & (1 << i):
                counts += columns[i]
        per_voter = gains[counts]
        marg = per_voter @ matrix
        for i in range(t):
            if mask & (1 << i):
                marg[target[i]] = -1
        best = int(marg.max())
        for i in range(t):
            bit = 1 << i
            if mask & bit:
                continue
            child = mask | bit
            if child in reachable:
                continue
            if int(marg[target[i]]) == best:
                reachable.add(child)
                parent[child] = (mask, target[i])
    if full_mask not in reachable:
        return False, None
    order: list[int] = []
    mask = full_mask
    while mask:
        mask, pick = parent[mask]
        order.append(pick)
    return True, tuple(reversed(order))


def _masks_by_popcount(t: int) -> list[int]:
    return sorted(range(1 << t), key=lambda m: (m.bit_count(), m))


def greedy_reachable(
    election: Election, k: int, weights: OwaWeights, committee: Sequence[int]
) -> tuple[bool, tuple[int, ...] | None]:
    """Whether some greedy execution outputs exactly `committee`, and a
    realizing selection order if so."""
    target = as_committee(committee, election.m)
    if len(target) != k:
        raise ValueError(f"committee has {len(target)} members, expected k={k}")
    _check_run_args(election, k, weights)
    return _reachability_dp(election, weights, target, k)


def _swap_search(
    after: Election,
    committee: tuple[int, ...],
    k: int,
    ell: int,
    weights: OwaWeights,
    budget: int,
) -> RceAnswer:
    """Ascending-depth swap search: test every committee at distance d from S
    for greedy reachability; the first feasible depth is the optimum."""
    others = [c for c in range(after.m) if c not in set(committee)]
    pairs = sum(
        math.comb(k, d) * math.comb(len(others), d) for d in range(min(k, len(others)) + 1)
    )
    if pairs * (1 << k) > budget:
        raise BudgetExceededError(
            f"greedy swap search over k={k}, ell={ell}, m={after.m} needs "
            f"{pairs} candidate pairs (budget {budget})"
        )
    for d in range(min(k, len(others)) + 1):
        for removed in combinations(committee, d):
            kept = [c for c in committee if c not in set(removed)]
            for added in combinations(others, d):
                target = tuple(sorted(kept + list(added)))
                ok, _ = _reachability_dp(after, weights, target, k)
                if ok:
                    return RceAnswer(feasible=d <= ell, min_distance=d, witness=target)
    raise AssertionError("greedy rule has no reachable committee")  # pragma: no cover


DEFAULT_GREEDY_BUDGET = 50_000_000


def solve_rce_greedy(
    inst: RceInstance,
    weights: OwaWeights,
    shrink: bool = False,
    budget: int = DEFAULT_GREEDY_BUDGET,
) -> RceAnswer:
    """Exact greedy-Thiele RCE by guessing the replaced members and their
    substitutes at ascending replacement depth; `shrink` first collapses
    interchangeable candidates (classes) of the changed election."""
    if shrink:
        shrunk = shrink_by_classes(inst.after, inst.committee, inst.k)
        reduced_committee = shrunk.to_reduced(inst.committee)
        answer = _swap_search(
            shrunk.election, reduced_committee, inst.k, inst.ell, weights, budget
        )
        witness = shrunk.to_original(answer.witness) if answer.witness is not None else None
        return RceAnswer(answer.feasible, answer.min_distance, witness)
    return _swap_search(inst.after, inst.committee, inst.k, inst.ell, weights, budget)


def solve_rce_greedycc_fpt_n(
    inst: RceInstance, weights: OwaWeights, budget: int = DEFAULT_GREEDY_BUDGET
) -> RceAnswer:
    """Greedy-CC RCE.  For k beyond the number of candidate classes, a
    winning run is a class-distinct prefix covering every voter followed by
    arbitrary fill, so it suffices to test covering class subsets (subset DP)
    and fill from S; otherwise delegates to the class-shrunk swap search."""
    if not weights.is_cc:
        raise RuleMismatchError(f"greedy-CC solver got rule '{weights.name}'")
    after = inst.after
    n = after.n
    if n >= 25 or inst.k <= (1 << n):
        return solve_rce_greedy(inst, weights, shrink=True, budget=budget)

    committee_set = set(inst.committee)
    coverable = frozenset(i for i, b in enumerate(after.ballots) if b)
    if not coverable:
        # every ballot is empty: all marginals are 0 in every round, so any
        # committee (S itself included) is reachable
        return RceAnswer(feasible=True, min_distance=0, witness=inst.committee)

    reps: list[int] = []
    rep_cover: dict[int, frozenset[int]] = {}
    for cls in candidate_classes(after):
        approvers = frozenset(after.approvers[cls[0]])
        if not approvers:
            continue
        in_s = [c for c in cls if c in committee_set]
        rep = in_s[0] if in_s else cls[0]
        reps.append(rep)
        rep_cover[rep] = approvers

    best: tuple[int, tuple[int, ...]] | None = None
    max_t = min(len(reps), len(coverable))
    for t in range(1, max_t + 1):
        for subset in combinations(reps, t):
            union: set[int] = set()
            for rep in subset:
                union |= rep_cover[rep]
            if union != coverable:
                continue
            ok, _ = _reachability_dp(after, weights, tuple(sorted(subset)), inst.k)
            if not ok:
                continue
            distance = sum(1 for rep in subset if rep not in committee_set)
            fill = [c for c in inst.committee if c not in set(subset)][: inst.k - t]
            witness = tuple(sorted(set(subset) | set(fill)))
            if best is None or (distance, witness) < best:
                best = (distance, witness)
        if best is not None and best[0] == 0:
            break
    assert best is not None, "a committee covering all voters always exists here"
    return RceAnswer(feasible=best[0] <= inst.ell, min_distance=best[0], witness=best[1])


def closest_winner_sampled(
    after: Election,
    k: int,
    weights: OwaWeights,
    committee: Sequence[int],
    cap: int,
) -> tuple[int, ...]:
    """Among up to `cap` enumerated greedy committees of `after` (explored
    preferring members of `committee`), the one closest to `committee`;
    ties go to the canonically smallest."""
    s = as_committee(committee, after.m)
    enum = greedy_enumerate(after, k, weights, cap=cap, prefer=s)
    return min(enum.committees, key=lambda c: (committee_distance(s, c), c))


def all_greedy_committees_naive(
    election: Election, k: int, weights: OwaWeights
) -> set[tuple[int, ...]]:
    """Reference oracle: expand the full tie-breaking tree without state
    deduplication.  Exponential; only for small instances and tests."""
    _check_run_args(election, k, weights)
    board = _Scoreboard(election, weights, k)
    results: set[tuple[int, ...]] = set()

    def expand(depth: int, selected: list[int]) -> None:
        if depth == k:
            results.add(tuple(sorted(selected)))
            return
        marg = board.marginals()
        best = int(marg.max())
        for c in (int(x) for x in np.flatnonzero(marg == best)):
            board.add(c)
            selected.append(c)
            expand(depth + 1, selected)
            selected.pop()
            board.remove(c)

    expand(0, [])
    return results


def reachable_by_permutations(
    election: Election, k: int, weights: OwaWeights, committee: Sequence[int]
) -> tuple[bool, tuple[int, ...] | None]:
    """Reference oracle for greedy_reachable: try every selection order via
    forced runs.  k! work; only for small k."""
    target = as_committee(committee, election.m)
    for perm in permutations(target):
        try:
            greedy_run(election, k, weights, Forced(perm))
        except GreedyInfeasibleError:
            continue
        return True, perm
    return False, None
