"""Shared generators and naive oracles for the test suite.

The oracles here are deliberately written as directly as possible (plain
loops over ballots, full enumeration) and never reuse the package's scoring
shortcuts, so they can serve as independent references.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from rcelect import Election, OwaWeights, RceInstance


def random_election(rng: random.Random, n: int, m: int, allow_empty: bool = False) -> Election:
    ballots = []
    for _ in range(n):
        low = 0 if allow_empty else 1
        size = rng.randint(low, m)
        ballots.append(tuple(sorted(rng.sample(range(m), size))))
    return Election(m, ballots, allow_empty=allow_empty)


def naive_score(election: Election, committee, weights: OwaWeights) -> Fraction:
    """Direct evaluation of the rule's scoring sum, one ballot at a time."""
    total = Fraction(0)
    members = set(committee)
    for ballot in election.ballots:
        overlap = len(members.intersection(ballot))
        for j in range(1, overlap + 1):
            total += weights.weights[j - 1]
    return total


def naive_winners(election: Election, k: int, weights: OwaWeights) -> list[tuple[int, ...]]:
    """Full enumeration by naive scoring."""
    best = None
    winners: list[tuple[int, ...]] = []
    for committee in combinations(range(election.m), k):
        score = naive_score(election, committee, weights)
        if best is None or score > best:
            best = score
            winners = [committee]
        elif score == best:
            winners.append(committee)
    return winners


def naive_min_rce_distance(inst: RceInstance, weights: OwaWeights) -> int:
    old = set(inst.committee)
    return min(
        inst.k - len(old.intersection(w))
        for w in naive_winners(inst.after, inst.k, weights)
    )


RULE_FACTORIES = {
    "av": OwaWeights.av,
    "pav": OwaWeights.pav,
    "cc": OwaWeights.cc,
}
