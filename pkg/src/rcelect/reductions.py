"""Hardness-style instance generation: embed a graph's independent-set
question into a resilient-committee instance, plus a brute-force
independent-set oracle for verifying the construction.

The generated instance has the property (for any rule whose weight vector is
not all ones) that the dummy committee keeps winning after a single approval
removal if and only if the graph has no independent set of the requested
size; when one exists, every winner avoids the dummies entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .core import OwaWeights, Election, RceInstance, RuleMismatchError

MAX_ORACLE_VERTICES = 24


@dataclass(frozen=True)
class Graph:
    """A simple undirected graph on vertices 0..num_vertices-1."""

    num_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.num_vertices < 0:
            raise ValueError("vertex count must be non-negative")
        seen = set()
        norm = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError(f"edge ({u}, {v}) out of range for {self.num_vertices} vertices")
            edge = (min(u, v), max(u, v))
            if edge in seen:
                raise ValueError(f"duplicate edge {edge}")
            seen.add(edge)
            norm.append(edge)
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @classmethod
    def from_edges(cls, num_vertices: int, edges) -> "Graph":
        return cls(num_vertices, tuple(tuple(e) for e in edges))

    def degree(self, vertex: int) -> int:
        return sum(1 for u, v in self.edges if vertex in (u, v))

    def adjacency_masks(self) -> list[int]:
        masks = [0] * self.num_vertices
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return masks


def has_independent_set(graph: Graph, kappa: int) -> bool:
    """Exhaustive oracle: is there a set of `kappa` pairwise non-adjacent
    vertices?  Refuses graphs above MAX_ORACLE_VERTICES."""
    if graph.num_vertices > MAX_ORACLE_VERTICES:
        raise ValueError(
            f"independent-set oracle is limited to {MAX_ORACLE_VERTICES} vertices, "
            f"got {graph.num_vertices}"
        )
    if kappa <= 0:
        return True
    if kappa > graph.num_vertices:
        return False
    adjacency = graph.adjacency_masks()
    for subset in combinations(range(graph.num_vertices), kappa):
        mask = 0
        ok = True
        for v in subset:
            if adjacency[v] & mask:
                ok = False
                break
            mask |= 1 << v
        if ok:
            return True
    return False


@dataclass(frozen=True)
class ReductionOutput:
    """The generated instance plus its bookkeeping: which candidate encodes
    which vertex, the dummy committee D, the universally-approved padding F,
    the voter-group multiplier t, and the padding size s_pad = |F|."""

    instance: RceInstance
    vertex_candidates: tuple[int, ...]
    dummies: tuple[int, ...]
    padding: tuple[int, ...]
    t: int
    s_pad: int


def reduce_is_to_rce(
    graph: Graph, kappa: int, weights: OwaWeights, ell: int | None = None
) -> ReductionOutput:
    """Encode "does `graph` have an independent set of size `kappa`?" into a
    resilient-committee instance for the given rule.

    Candidates are one per vertex, `kappa` dummies, and s-1 universally
    approved padding candidates where s is the length of the leading run of
    weight-1 entries; the committee is dummies plus padding.  The changed
    election removes a single dummy approval from one voter.  Undefined for
    AV (an all-ones weight vector).
    """
    if kappa < 1:
        raise ValueError("kappa must be at least 1")
    if graph.num_vertices < 1:
        raise ValueError("reduction needs at least one vertex")
    s = 0
    for w in weights.weights:
        if w == 1:
            s += 1
        else:
            break
    if s == weights.k_max:
        raise RuleMismatchError(
            f"reduction undefined for rule '{weights.name}': every provided weight is 1 "
            f"(for AV there is no construction; otherwise pass at least {s + 1} weights "
            f"so the first weight below 1 is visible)"
        )
    alpha = weights.weights[s]  # lambda(s+1) < 1
    t = math.ceil(2 / (1 - alpha))
    k = kappa + s - 1
    if k > weights.k_max:
        raise ValueError(
            f"rule '{weights.name}' defines {weights.k_max} weights but the "
            f"instance needs committees of size {k}"
        )

    nu = graph.num_vertices
    vertex_candidates = tuple(range(nu))
    dummies = tuple(range(nu, nu + kappa))
    padding = tuple(range(nu + kappa, nu + kappa + s - 1))
    m = nu + kappa + s - 1

    ballots: list[tuple[int, ...]] = []

    def voter(approved: tuple[int, ...], copies: int) -> None:
        ballot = tuple(sorted(set(approved) | set(padding)))
        ballots.extend([ballot] * copies)

    # edge voters
    for u, v in graph.edges:
        voter((u, v), t)
    # per-vertex filler voters, equalizing every vertex candidate's approvals
    for w in range(nu):
        voter((w,), (nu - graph.degree(w)) * t)
    # dummy-vertex pair voters (the changed election drops one approval here)
    group3_start = len(ballots)
    for d in dummies:
        for w in range(nu):
            voter((d, w), t)
    # per-dummy filler voters
    for d in dummies:
        voter((d,), kappa * t)

    before = Election(m, ballots)

    # remove the first dummy's approval from the first voter who approves
    # both that dummy and a vertex candidate
    changed = list(ballots)
    target_voter = group3_start
    d_star = dummies[0]
    changed[target_voter] = tuple(c for c in changed[target_voter] if c != d_star)
    after = Election(m, changed, allow_empty=not changed[target_voter])

    committee = tuple(sorted(dummies + padding))
    if ell is None:
        ell = kappa - 1
    instance = RceInstance(before=before, after=after, k=k, committee=committee, ell=ell)
    return ReductionOutput(
        instance=instance,
        vertex_candidates=vertex_candidates,
        dummies=dummies,
        padding=padding,
        t=t,
        s_pad=len(padding),
    )
