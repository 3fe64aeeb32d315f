"""Winner enumeration and resilient-committee solvers for (non-greedy)
Thiele rules: the polynomial AV algorithm, the brute-force search that serves
as ground-truth oracle, candidate-class shrinking, and the CC solver that is
efficient in the number of voters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Callable, Sequence

from .core import (
    BudgetExceededError,
    Election,
    OwaWeights,
    RceInstance,
    RuleMismatchError,
    as_committee,
    candidate_classes,
    committee_distance,
    thiele_score,
)

DEFAULT_ENUM_BUDGET = 100_000_000


@dataclass(frozen=True)
class RceAnswer:
    """Result of a resilient-committee solve: the minimum replacement
    distance from the old committee to any winner of the changed election,
    a witness realizing it, and whether that distance is within ell."""

    feasible: bool
    min_distance: int | None
    witness: tuple[int, ...] | None


def _explore_max_score(
    election: Election,
    k: int,
    weights: OwaWeights,
    budget: int,
    on_committee: Callable[[int, tuple[int, ...]], None],
    initial_best: int,
) -> None:
    """Visit every k-subset whose score can still reach the running maximum.

    Subsets are generated largest-member-first (colexicographic); a branch is
    pruned when its partial score plus (remaining picks) * (best single-
    candidate gain among allowed indices) stays strictly below the best score
    seen, so no maximum-score committee is ever skipped.  `on_committee` is
    called with (score, members) for every surviving leaf.
    """
    m = election.m
    total = math.comb(m, k)
    if total > budget:
        raise BudgetExceededError(
            f"enumerating {total} committees (m={m}, k={k}) exceeds the budget of {budget}"
        )
    approvers = election.approvers
    gains = weights.int_weights
    scale = weights.scale
    counts = [0] * election.n

    prefix_max_solo = [0] * m
    running = 0
    for c in range(m):
        running = max(running, scale * len(approvers[c]))
        prefix_max_solo[c] = running

    best = [initial_best]
    stack: list[int] = []

    def add(c: int) -> int:
        delta = 0
        for v in approvers[c]:
            delta += gains[counts[v]]
            counts[v] += 1
        return delta

    def remove(c: int) -> None:
        for v in approvers[c]:
            counts[v] -= 1

    def dfs(slots: int, hi: int, score: int) -> None:
        if slots == 0:
            if score > best[0]:
                best[0] = score
            on_committee(score, tuple(stack))
            return
        if score + slots * prefix_max_solo[hi] < best[0]:
            return
        for c in range(hi, slots - 2, -1):
            delta = add(c)
            stack.append(c)
            dfs(slots - 1, c - 1, score + delta)
            stack.pop()
            remove(c)

    dfs(k, m - 1, 0)


def _greedy_seed_score(election: Election, k: int, weights: OwaWeights) -> int:
    # local import: the greedy engine builds on this module
    from .greedy import greedy_run

    return thiele_score(election, greedy_run(election, k, weights).committee, weights)


def enumerate_winners(
    election: Election, k: int, weights: OwaWeights, budget: int = DEFAULT_ENUM_BUDGET
) -> list[tuple[int, ...]]:
    """All committees of maximum lambda-score, canonically sorted."""
    if not 1 <= k <= election.m:
        raise ValueError(f"committee size {k} out of range for m={election.m}")
    state: dict = {"score": None, "winners": []}

    def collect(score: int, members: tuple[int, ...]) -> None:
        if state["score"] is None or score > state["score"]:
            state["score"] = score
            state["winners"] = [tuple(sorted(members))]
        elif score == state["score"]:
            state["winners"].append(tuple(sorted(members)))

    seed = _greedy_seed_score(election, k, weights)
    _explore_max_score(election, k, weights, budget, collect, initial_best=seed)
    return sorted(state["winners"])


def max_thiele_score(
    election: Election, k: int, weights: OwaWeights, budget: int = DEFAULT_ENUM_BUDGET
) -> int:
    """The maximum integer-scaled lambda-score over all k-subsets."""
    state = {"score": -1}

    def collect(score: int, members: tuple[int, ...]) -> None:
        if score > state["score"]:
            state["score"] = score

    seed = _greedy_seed_score(election, k, weights)
    _explore_max_score(election, k, weights, budget, collect, initial_best=seed)
    return max(state["score"], seed)


def solve_rce_exhaustive(
    inst: RceInstance, weights: OwaWeights, budget: int = DEFAULT_ENUM_BUDGET
) -> RceAnswer:
    """Ground-truth solver: minimize distance to the old committee over all
    maximum-score committees of the changed election.  Witness ties go to the
    canonically smallest committee."""
    s = inst.committee
    k = inst.k
    state: dict = {"score": None, "dist": None, "witness": None}

    def collect(score: int, members: tuple[int, ...]) -> None:
        committee = tuple(sorted(members))
        d = k - len(set(s) & set(committee))
        if state["score"] is None or score > state["score"]:
            state.update(score=score, dist=d, witness=committee)
        elif score == state["score"] and (d, committee) < (state["dist"], state["witness"]):
            state.update(dist=d, witness=committee)

    seed = _greedy_seed_score(inst.after, k, weights)
    _explore_max_score(inst.after, k, weights, budget, collect, initial_best=seed)
    return RceAnswer(
        feasible=state["dist"] <= inst.ell,
        min_distance=state["dist"],
        witness=state["witness"],
    )


def solve_rce_av(inst: RceInstance, weights: OwaWeights) -> RceAnswer:
    """Polynomial AV solver.

    Partitions candidates by their approval score in the changed election
    relative to the k-th highest score: every winner must take all
    strictly-above candidates plus a completion among the equal-score ones,
    so taking the completion from the old committee first is optimal.
    """
    if not weights.is_av:
        raise RuleMismatchError(f"AV solver got rule '{weights.name}'")
    after = inst.after
    k = inst.k
    scores = after.approval_counts
    kth = sorted(scores, reverse=True)[k - 1]
    above = [c for c in range(after.m) if scores[c] > kth]
    equal = [c for c in range(after.m) if scores[c] == kth]
    assert 0 < k - len(above) <= len(equal), "score partition is inconsistent"
    need = k - len(above)
    old = set(inst.committee)
    from_old = [c for c in equal if c in old][:need]
    filler = [c for c in equal if c not in old][: need - len(from_old)]
    witness = tuple(sorted(above + from_old + filler))
    d = committee_distance(inst.committee, witness)
    return RceAnswer(feasible=d <= inst.ell, min_distance=d, witness=witness)


@dataclass(frozen=True)
class ShrunkElection:
    """A class-reduced election together with the kept-candidate mapping
    (new index -> original index)."""

    election: Election
    kept: tuple[int, ...]

    @cached_property
    def _old_to_new(self) -> dict[int, int]:
        return {old: new for new, old in enumerate(self.kept)}

    def to_reduced(self, committee: Sequence[int]) -> tuple[int, ...]:
        return tuple(sorted(self._old_to_new[c] for c in committee))

    def to_original(self, committee: Sequence[int]) -> tuple[int, ...]:
        return tuple(sorted(self.kept[c] for c in committee))


def shrink_by_classes(election: Election, committee: Sequence[int], k: int) -> ShrunkElection:
    """Drop interchangeable candidates: every candidate class keeps its
    members of `committee` plus at most k - |class ∩ committee| others, which
    preserves the minimum winner distance to `committee`."""
    s = set(as_committee(committee, election.m))
    keep: set[int] = set()
    for cls in candidate_classes(election):
        in_s = [c for c in cls if c in s]
        keep.update(in_s)
        keep.update([c for c in cls if c not in s][: k - len(in_s)])
    kept = tuple(sorted(keep))
    old_to_new = {old: new for new, old in enumerate(kept)}
    ballots = [
        tuple(old_to_new[c] for c in ballot if c in old_to_new) for ballot in election.ballots
    ]
    reduced = Election(len(kept), ballots, allow_empty=election.allow_empty)
    return ShrunkElection(reduced, kept)


def solve_rce_shrunk_exhaustive(
    inst: RceInstance, weights: OwaWeights, budget: int = DEFAULT_ENUM_BUDGET
) -> RceAnswer:
    """Exhaustive search on the class-shrunk changed election; equivalent to
    solve_rce_exhaustive but over at most k * (number of classes) candidates."""
    shrunk = shrink_by_classes(inst.after, inst.committee, inst.k)
    reduced = RceInstance(
        before=shrunk.election,
        after=shrunk.election,
        k=inst.k,
        committee=shrunk.to_reduced(inst.committee),
        ell=inst.ell,
    )
    answer = solve_rce_exhaustive(reduced, weights, budget)
    witness = shrunk.to_original(answer.witness) if answer.witness is not None else None
    return RceAnswer(answer.feasible, answer.min_distance, witness)


def solve_rce_ccav_fpt_n(
    inst: RceInstance, weights: OwaWeights, budget: int = DEFAULT_ENUM_BUDGET
) -> RceAnswer:
    """CC solver parameterized by the voter count.

    When k exceeds the number of candidate classes, every winner covers all
    voters that can be covered, so it suffices to scan covering class
    subsets (preferring representatives from the old committee) and fill the
    remaining seats from the old committee.  Otherwise the class-shrunk
    exhaustive search is used.
    """
    if not weights.is_cc:
        raise RuleMismatchError(f"CC solver got rule '{weights.name}'")
    after = inst.after
    n = after.n
    if n >= 25 or inst.k <= (1 << n):
        return solve_rce_shrunk_exhaustive(inst, weights, budget)

    old = set(inst.committee)
    coverable = frozenset(i for i, ballot in enumerate(after.ballots) if ballot)
    if not coverable:
        return RceAnswer(feasible=True, min_distance=0, witness=inst.committee)

    reps: list[int] = []
    rep_cover: dict[int, frozenset[int]] = {}
    for cls in candidate_classes(after):
        approvers = frozenset(after.approvers[cls[0]])
        if not approvers:
            continue
        in_old = [c for c in cls if c in old]
        rep = in_old[0] if in_old else cls[0]
        reps.append(rep)
        rep_cover[rep] = approvers

    best: tuple[int, tuple[int, ...]] | None = None
    for t in range(1, min(len(reps), len(coverable)) + 1):
        for subset in combinations(reps, t):
            union: set[int] = set()
            for rep in subset:
                union |= rep_cover[rep]
            if union != coverable:
                continue
            distance = sum(1 for rep in subset if rep not in old)
            fill = [c for c in inst.committee if c not in set(subset)][: inst.k - t]
            witness = tuple(sorted(set(subset) | set(fill)))
            if best is None or (distance, witness) < best:
                best = (distance, witness)
        if best is not None and best[0] == 0:
            break
    assert best is not None, "the class representatives jointly cover every voter"
    return RceAnswer(feasible=best[0] <= inst.ell, min_distance=best[0], witness=best[1])


def check_winning(
    inst: RceInstance,
    weights: OwaWeights,
    greedy: bool = False,
    budget: int = 2_000_000,
) -> bool | None:
    """Whether the instance's committee wins the `before` election under the
    given rule; returns None when verifying would exceed `budget`."""
    if greedy:
        from .greedy import greedy_reachable

        return greedy_reachable(inst.before, inst.k, weights, inst.committee)[0]
    if weights.is_av:
        scores = inst.before.approval_counts
        top = sum(sorted(scores, reverse=True)[: inst.k])
        return sum(scores[c] for c in inst.committee) == top
    if math.comb(inst.before.m, inst.k) > budget:
        return None
    return thiele_score(inst.before, inst.committee, weights) == max_thiele_score(
        inst.before, inst.k, weights, budget
    )
