"""Two-stage approval-based committee elections with a continuity objective:
Thiele and greedy-Thiele winner computation, resilient-committee solvers,
election samplers and perturbations, hardness-instance generation, and a
deterministic experiment harness.
"""

from ._version import VERSION as __version__
from .core import (
    BudgetExceededError,
    Election,
    OwaWeights,
    ParseError,
    RceInstance,
    RuleMismatchError,
    as_committee,
    candidate_classes,
    committee_distance,
    election_distance,
    marginal_contribution,
    parse_rule,
    thiele_score,
    thiele_score_fraction,
)
from .greedy import (
    Enumerate,
    Forced,
    GreedyEnumeration,
    GreedyInfeasibleError,
    GreedyRun,
    Lexicographic,
    LEXICOGRAPHIC,
    closest_winner_sampled,
    greedy_enumerate,
    greedy_reachable,
    greedy_run,
    solve_rce_greedy,
    solve_rce_greedycc_fpt_n,
)
from .reductions import Graph, ReductionOutput, has_independent_set, reduce_is_to_rce
from .samplers import (
    ChangeSpec,
    SamplerSpec,
    SamplingError,
    change_schedule,
    derive_seed,
    perturb,
    sample_election,
    sample_election_detailed,
    substream,
)
from .solvers import (
    RceAnswer,
    ShrunkElection,
    check_winning,
    enumerate_winners,
    max_thiele_score,
    shrink_by_classes,
    solve_rce_av,
    solve_rce_ccav_fpt_n,
    solve_rce_exhaustive,
    solve_rce_shrunk_exhaustive,
)

__all__ = [name for name in dir() if not name.startswith("_")]
