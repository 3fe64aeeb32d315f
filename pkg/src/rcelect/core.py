"""Core election model: approval profiles, OWA weight vectors, exact Thiele
scoring, and distance measures.

All scores are integers obtained by scaling the OWA weight vector by the lcm
of its denominators, so score comparisons (and in particular tie detection)
are exact.  A pure-`fractions` scoring path is kept alongside the integer
path as an independent reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class ParseError(ValueError):
    """Malformed input file; carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class BudgetExceededError(RuntimeError):
    """A solver refused to run because its combinatorial budget was exceeded."""


class RuleMismatchError(ValueError):
    """A solver or construction was invoked with a rule it does not handle."""


def as_committee(members: Iterable[int], m: int | None = None) -> tuple[int, ...]:
    """Canonicalize a committee to a strictly ascending tuple of candidate ids.

    Raises ValueError on duplicates or (when `m` is given) out-of-range ids.
    """
    ids = [int(c) for c in members]
    committee = tuple(sorted(ids))
    for prev, cur in zip(committee, committee[1:]):
        if prev == cur:
            raise ValueError(f"duplicate candidate {cur} in committee")
    if committee and committee[0] < 0:
        raise ValueError(f"negative candidate id {committee[0]}")
    if m is not None and committee and committee[-1] >= m:
        raise ValueError(f"candidate id {committee[-1]} out of range for m={m}")
    return committee


def committee_distance(first: Sequence[int], second: Sequence[int]) -> int:
    """Number of members by which two equal-size committees differ:
    k - |first ∩ second|."""
    s, t = as_committee(first), as_committee(second)
    if len(s) != len(t):
        raise ValueError(f"committees differ in size: {len(s)} vs {len(t)}")
    return len(s) - len(set(s) & set(t))


class Election:
    """An approval election over candidates 0..m-1 with one ballot per voter.

    Ballots are strictly ascending tuples of candidate indices.  Empty
    ballots are rejected unless ``allow_empty=True`` (perturbation can empty
    a ballot; scoring treats empty ballots as contributing 0).  Instances
    are immutable after construction and safe to share between threads.
    Equality compares (m, ballots); ``allow_empty`` is a validation mode,
    not data.
    """

    def __init__(self, m: int, ballots: Iterable[Iterable[int]], allow_empty: bool = False):
        self.m = int(m)
        if self.m < 0:
            raise ValueError("candidate count must be non-negative")
        norm = []
        for i, ballot in enumerate(ballots):
            b = tuple(int(c) for c in ballot)
            for prev, cur in zip(b, b[1:]):
                if cur <= prev:
                    raise ValueError(f"ballot {i} is not strictly ascending: {b}")
            if b and (b[0] < 0 or b[-1] >= self.m):
                raise ValueError(f"ballot {i} has candidate out of range [0, {self.m}): {b}")
            if not b and not allow_empty:
                raise ValueError(f"ballot {i} is empty (election does not allow empty ballots)")
            norm.append(b)
        if not norm:
            raise ValueError("election needs at least one voter")
        self.ballots: tuple[tuple[int, ...], ...] = tuple(norm)
        self.allow_empty = bool(allow_empty)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, allow_empty: bool = False) -> "Election":
        """Build an election from a boolean approval matrix (one row per
        voter); ballots are derived from the matrix, so no re-validation."""
        arr = np.asarray(matrix, dtype=bool)
        if arr.ndim != 2:
            raise ValueError(f"approval matrix must be 2-dimensional, got shape {arr.shape}")
        n, m = arr.shape
        if n < 1:
            raise ValueError("election needs at least one voter")
        counts = arr.sum(axis=1).tolist()
        if not allow_empty and any(c == 0 for c in counts):
            raise ValueError("matrix has an empty ballot (election does not allow empty ballots)")
        col_list = np.nonzero(arr)[1].tolist()
        ballots = []
        offset = 0
        for count in counts:
            ballots.append(tuple(col_list[offset:offset + count]))
            offset += count
        election = cls.__new__(cls)
        election.m = int(m)
        election.ballots = tuple(ballots)
        election.allow_empty = bool(allow_empty)
        frozen = arr.copy()
        frozen.setflags(write=False)
        election.__dict__["matrix"] = frozen
        return election

    @property
    def n(self) -> int:
        return len(self.ballots)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Boolean approval matrix of shape (n, m); row = voter, column = candidate."""
        mat = np.zeros((self.n, self.m), dtype=bool)
        for i, ballot in enumerate(self.ballots):
            if ballot:
                mat[i, list(ballot)] = True
        mat.setflags(write=False)
        return mat

    @cached_property
    def matrix_i64(self) -> np.ndarray:
        mat = self.matrix.astype(np.int64)
        mat.setflags(write=False)
        return mat

    @cached_property
    def matrix_f64(self) -> np.ndarray:
        mat = self.matrix.astype(np.float64)
        mat.setflags(write=False)
        return mat

    @cached_property
    def approvers(self) -> tuple[tuple[int, ...], ...]:
        """Per candidate, the ascending tuple of voters approving it."""
        lists: list[list[int]] = [[] for _ in range(self.m)]
        for i, ballot in enumerate(self.ballots):
            for c in ballot:
                lists[c].append(i)
        return tuple(tuple(l) for l in lists)

    @cached_property
    def approval_counts(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.approvers)

    @cached_property
    def total_approvals(self) -> int:
        """app(E), the total number of approvals."""
        return sum(len(b) for b in self.ballots)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Election):
            return NotImplemented
        return self.m == other.m and self.ballots == other.ballots

    def __hash__(self) -> int:
        return hash((self.m, self.ballots))

    def __repr__(self) -> str:
        return f"Election(m={self.m}, n={self.n}, approvals={self.total_approvals})"


@dataclass(frozen=True)
class OwaWeights:
    """A Thiele rule given by its OWA weight vector lambda(1..k_max).

    ``weights[j-1]`` is lambda(j); lambda(1) = 1 and the sequence is
    non-increasing with values in [0, 1].  ``scale`` is the lcm L of all
    weight denominators and ``int_weights[j-1] = L * lambda(j)`` exactly,
    so integer score comparisons agree with exact rational comparisons.
    """

    weights: tuple[Fraction, ...]
    name: str = "owa"

    def __post_init__(self):
        ws = tuple(Fraction(w) for w in self.weights)
        object.__setattr__(self, "weights", ws)
        if not ws:
            raise ValueError("weight vector must be non-empty")
        if ws[0] != 1:
            raise ValueError(f"lambda(1) must be 1, got {ws[0]}")
        for j, (a, b) in enumerate(zip(ws, ws[1:]), start=1):
            if b > a:
                raise ValueError(f"weights must be non-increasing, lambda({j+1}) > lambda({j})")
        if ws[-1] < 0:
            raise ValueError("weights must be non-negative")

    @classmethod
    def av(cls, k: int) -> "OwaWeights":
        return cls(tuple(Fraction(1) for _ in range(k)), name="av")

    @classmethod
    def pav(cls, k: int) -> "OwaWeights":
        return cls(tuple(Fraction(1, j) for j in range(1, k + 1)), name="pav")

    @classmethod
    def cc(cls, k: int) -> "OwaWeights":
        return cls((Fraction(1),) + tuple(Fraction(0) for _ in range(k - 1)), name="cc")

    @property
    def k_max(self) -> int:
        return len(self.weights)

    @cached_property
    def scale(self) -> int:
        """The lcm L of the weight denominators."""
        return math.lcm(*(w.denominator for w in self.weights))

    @cached_property
    def int_weights(self) -> tuple[int, ...]:
        ints = []
        for w in self.weights:
            scaled = w * self.scale
            assert scaled.denominator == 1
            ints.append(scaled.numerator)
        return tuple(ints)

    @cached_property
    def cum_int_weights(self) -> tuple[int, ...]:
        """cum[j] = L * (lambda(1) + ... + lambda(j)); cum[0] = 0."""
        cum = [0]
        for w in self.int_weights:
            cum.append(cum[-1] + w)
        return tuple(cum)

    @cached_property
    def cum_fractions(self) -> tuple[Fraction, ...]:
        cum = [Fraction(0)]
        for w in self.weights:
            cum.append(cum[-1] + w)
        return tuple(cum)

    @cached_property
    def is_av(self) -> bool:
        return all(w == 1 for w in self.weights)

    @cached_property
    def is_cc(self) -> bool:
        return self.weights[0] == 1 and all(w == 0 for w in self.weights[1:])

    def gains_array(self, k: int) -> np.ndarray:
        """int64 array g with g[j] = L * lambda(j+1) for j = 0..k-1 (the
        marginal gain of a voter whose ballot already meets j committee
        members)."""
        if k > self.k_max:
            raise ValueError(f"rule '{self.name}' defines only {self.k_max} weights, need {k}")
        return np.array(self.int_weights[:k], dtype=np.int64)

    def cum_array(self, k: int) -> np.ndarray:
        """int64 array of cumulative scaled weights, indexable by 0..k."""
        if k > self.k_max:
            raise ValueError(f"rule '{self.name}' defines only {self.k_max} weights, need {k}")
        return np.array(self.cum_int_weights[: k + 1], dtype=np.int64)

    def __repr__(self) -> str:
        return f"OwaWeights({self.name}, k_max={self.k_max})"


def parse_rule(spec: str, k: int) -> OwaWeights:
    """Parse a rule spec string: ``av`` | ``pav`` | ``cc`` | ``owa=<q1,q2,...>``
    with rationals written as ``p/q`` or integers.  `k` is the committee size
    the weight vector must cover.
    """
    s = spec.strip().lower()
    if k < 1:
        raise ValueError("committee size must be at least 1")
    if s == "av":
        return OwaWeights.av(k)
    if s == "pav":
        return OwaWeights.pav(k)
    if s == "cc":
        return OwaWeights.cc(k)
    if s.startswith("owa="):
        parts = [p.strip() for p in s[len("owa="):].split(",") if p.strip()]
        if not parts:
            raise ValueError("owa= rule spec needs at least one weight")
        try:
            weights = tuple(Fraction(p) for p in parts)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad weight in rule spec {spec!r}: {exc}") from exc
        if len(weights) < k:
            raise ValueError(
                f"rule spec {spec!r} defines {len(weights)} weights but committee size is {k}"
            )
        return OwaWeights(weights, name=s)
    raise ValueError(f"unknown rule spec {spec!r} (expected av, pav, cc or owa=...)")


def _committee_counts(election: Election, committee: tuple[int, ...]) -> np.ndarray:
    """Per-voter |S ∩ ballot| as an int64 vector."""
    if not committee:
        return np.zeros(election.n, dtype=np.int64)
    return election.matrix[:, list(committee)].sum(axis=1, dtype=np.int64)


def thiele_score(election: Election, committee: Sequence[int], weights: OwaWeights) -> int:
    """Integer-scaled lambda-score of a committee:
    scale * sum_i sum_{j<=|S ∩ v_i|} lambda(j)."""
    s = as_committee(committee, election.m)
    if len(s) > weights.k_max:
        raise ValueError(
            f"committee of size {len(s)} exceeds the {weights.k_max} weights of rule '{weights.name}'"
        )
    if not s:
        return 0
    counts = _committee_counts(election, s)
    return int(weights.cum_array(len(s))[counts].sum())


def thiele_score_fraction(election: Election, committee: Sequence[int], weights: OwaWeights) -> Fraction:
    """Exact rational lambda-score; reference path independent of the
    integer-scaled implementation."""
    s = as_committee(committee, election.m)
    if len(s) > weights.k_max:
        raise ValueError(
            f"committee of size {len(s)} exceeds the {weights.k_max} weights of rule '{weights.name}'"
        )
    members = frozenset(s)
    cum = weights.cum_fractions
    total = Fraction(0)
    for ballot in election.ballots:
        total += cum[sum(1 for c in ballot if c in members)]
    return total


def marginal_contribution(
    election: Election, committee: Sequence[int], candidate: int, weights: OwaWeights
) -> int:
    """Integer-scaled score gain of adding `candidate` to `committee`;
    equals thiele_score(S ∪ {c}) - thiele_score(S), computed in
    O(approvals of c)."""
    s = as_committee(committee, election.m)
    c = int(candidate)
    if c < 0 or c >= election.m:
        raise ValueError(f"candidate {c} out of range for m={election.m}")
    if c in s:
        raise ValueError(f"candidate {c} is already in the committee")
    if len(s) + 1 > weights.k_max:
        raise ValueError(
            f"committee of size {len(s) + 1} exceeds the {weights.k_max} weights of rule '{weights.name}'"
        )
    voters = list(election.approvers[c])
    if not voters:
        return 0
    counts = _committee_counts(election, s)[voters]
    return int(weights.gains_array(len(s) + 1)[counts].sum())


def election_distance(first: Election, second: Election) -> int | float:
    """Minimum number of single-approval additions/removals transforming one
    profile into the other; ``math.inf`` if the elections have different
    shapes (candidate or voter counts)."""
    if first.m != second.m or first.n != second.n:
        return math.inf
    total = 0
    for a, b in zip(first.ballots, second.ballots):
        total += len(set(a).symmetric_difference(b))
    return total


def candidate_classes(election: Election) -> tuple[tuple[int, ...], ...]:
    """Partition candidates into classes of identical approver sets.

    Two candidates share a class iff exactly the same voters approve them
    (candidates approved by nobody form one class).  Classes are ordered by
    their smallest member; members ascend within a class.
    """
    columns = np.ascontiguousarray(election.matrix.T)
    groups: dict[bytes, list[int]] = {}
    for c in range(election.m):
        groups.setdefault(columns[c].tobytes(), []).append(c)
    return tuple(tuple(g) for g in sorted(groups.values()))


@dataclass(frozen=True)
class RceInstance:
    """A resilient-committee problem: elections before/after the preference
    change, the committee size k, the committee S that won before, and the
    allowed replacement bound ell."""

    before: Election
    after: Election
    k: int
    committee: tuple[int, ...]
    ell: int

    def __post_init__(self):
        object.__setattr__(self, "committee", as_committee(self.committee, self.before.m))
        if self.before.m != self.after.m:
            raise ValueError(
                f"elections disagree on candidate count: {self.before.m} vs {self.after.m}"
            )
        if len(self.committee) != self.k:
            raise ValueError(f"committee has {len(self.committee)} members, expected k={self.k}")
        if self.k < 1 or self.k > self.before.m:
            raise ValueError(f"committee size {self.k} out of range for m={self.before.m}")
        if not 0 <= self.ell <= self.k:
            raise ValueError(f"ell={self.ell} out of range [0, {self.k}]")
