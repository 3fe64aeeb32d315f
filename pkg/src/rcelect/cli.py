"""Command-line interface: scoring, winner computation, resilient-committee
solving, sampling, perturbation, reduction generation, and experiment runs.

Exit codes: 0 success, 1 infeasible resilient-committee decision, 2 usage or
input error, 3 combinatorial budget refusal.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import fileio
from ._version import VERSION
from .core import (
    BudgetExceededError,
    ParseError,
    RceInstance,
    RuleMismatchError,
    as_committee,
    parse_rule,
    thiele_score,
)
from .experiments import (
    EXP1_COLUMNS,
    EXP2_COLUMNS,
    EXP3_COLUMNS,
    PRESETS,
    ExperimentConfig,
    run_exp1,
    run_exp2,
    run_exp3,
    write_csv,
)
from .greedy import (
    GreedyInfeasibleError,
    greedy_enumerate,
    greedy_run,
    solve_rce_greedy,
    solve_rce_greedycc_fpt_n,
)
from .reductions import reduce_is_to_rce
from .samplers import (
    DEFAULT_TAU,
    PHI_EUCLID_RES,
    PHI_RESAMPLING,
    ChangeSpec,
    SamplerSpec,
    change_schedule,
    normalize_model,
    sample_election_detailed,
    perturb,
)
from .solvers import (
    DEFAULT_ENUM_BUDGET,
    check_winning,
    enumerate_winners,
    solve_rce_av,
    solve_rce_ccav_fpt_n,
    solve_rce_exhaustive,
    solve_rce_shrunk_exhaustive,
)

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

SOLVERS = ("auto", "av", "exhaustive", "ccav-n", "greedy", "greedy-cc-n")


def _parse_ids(text: str) -> tuple[int, ...]:
    tokens = text.replace(",", " ").split()
    return tuple(int(t) for t in tokens)


def _emit(args: argparse.Namespace, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _note(args: argparse.Namespace, message: str) -> None:
    if not getattr(args, "quiet", False):
        print(message, file=sys.stderr)


def _split_rule(rule: str) -> tuple[str, bool]:
    r = rule.strip().lower()
    if r.startswith("greedy-"):
        return r[len("greedy-"):], True
    return r, False


def _cmd_score(args: argparse.Namespace) -> int:
    election = fileio.load_election(args.election)
    committee = as_committee(_parse_ids(args.committee), election.m)
    weights = parse_rule(args.rule, max(len(committee), 1))
    score = thiele_score(election, committee, weights)
    value = Fraction(score, weights.scale)
    _emit(args, f"score {score}\nscale {weights.scale}\nvalue {value}\n")
    return EXIT_OK


def _cmd_winners(args: argparse.Namespace) -> int:
    election = fileio.load_election(args.election)
    weights = parse_rule(args.rule, args.k)
    winners = enumerate_winners(election, args.k, weights, budget=args.budget)
    _emit(args, "".join(" ".join(map(str, w)) + "\n" for w in winners))
    return EXIT_OK


def _cmd_greedy(args: argparse.Namespace) -> int:
    election = fileio.load_election(args.election)
    base, _ = _split_rule(args.rule)
    weights = parse_rule(base, args.k)
    if args.enumerate is not None:
        prefer = _parse_ids(args.prefer) if args.prefer else ()
        enum = greedy_enumerate(election, args.k, weights, cap=args.enumerate, prefer=prefer)
        _emit(args, "".join(" ".join(map(str, c)) + "\n" for c in enum.committees))
        if enum.truncated:
            _note(args, f"enumeration truncated at cap {args.enumerate}")
        return EXIT_OK
    run = greedy_run(election, args.k, weights)
    if args.order:
        _emit(args, " ".join(map(str, run.order)) + "\n")
    else:
        _emit(args, " ".join(map(str, run.committee)) + "\n")
    return EXIT_OK


def _solve(inst: RceInstance, solver: str, weights, greedy_rule: bool, args):
    if solver == "auto":
        if greedy_rule:
            solver = "greedy-cc-n" if weights.is_cc else "greedy"
        elif weights.is_av:
            solver = "av"
        elif weights.is_cc:
            solver = "ccav-n"
        else:
            solver = "exhaustive"
    if solver == "av":
        return solver, solve_rce_av(inst, weights)
    if solver == "exhaustive":
        if args.shrink:
            return solver, solve_rce_shrunk_exhaustive(inst, weights, budget=args.budget)
        return solver, solve_rce_exhaustive(inst, weights, budget=args.budget)
    if solver == "ccav-n":
        return solver, solve_rce_ccav_fpt_n(inst, weights, budget=args.budget)
    if solver == "greedy":
        return solver, solve_rce_greedy(inst, weights, shrink=args.shrink)
    if solver == "greedy-cc-n":
        return solver, solve_rce_greedycc_fpt_n(inst, weights)
    raise ValueError(f"unknown solver {solver!r}")


def _cmd_solve_rce(args: argparse.Namespace) -> int:
    inst = fileio.load_instance(args.instance)
    base, greedy_rule = _split_rule(args.rule)
    weights = parse_rule(base, inst.k)
    uses_greedy = greedy_rule or args.solver in ("greedy", "greedy-cc-n")
    if not args.no_validate:
        wins = check_winning(inst, weights, greedy=uses_greedy)
        if wins is False:
            print(
                f"error: the instance committee does not win the 'before' election under "
                f"{args.rule}", file=sys.stderr,
            )
            return EXIT_USAGE
        if wins is None:
            _note(args, "note: skipped winner validation (instance too large); "
                        "pass --no-validate to silence")
    solver, answer = _solve(inst, args.solver, weights, greedy_rule, args)
    witness = " ".join(map(str, answer.witness)) if answer.witness else ""
    _emit(
        args,
        f"solver {solver}\nmin_distance {answer.min_distance}\nwitness {witness}\n"
        f"feasible {'yes' if answer.feasible else 'no'}\n",
    )
    return EXIT_OK if answer.feasible else EXIT_INFEASIBLE


def _sampler_spec(args: argparse.Namespace, seed: int) -> SamplerSpec:
    model = normalize_model(args.model)
    tau = args.tau
    phi = args.phi
    p = args.p
    if tau is None and model in DEFAULT_TAU:
        tau = DEFAULT_TAU[model]
    if phi is None:
        phi = PHI_RESAMPLING if model == "resampling" else (
            PHI_EUCLID_RES if model.endswith("_res") else None
        )
    if p is None and model == "resampling":
        p = 0.1
    return SamplerSpec(model=model, n=args.n, m=args.m, seed=seed, tau=tau, p=p, phi=phi)


def _cmd_sample(args: argparse.Namespace) -> int:
    spec = _sampler_spec(args, args.seed)
    election, voter_pos, cand_pos = sample_election_detailed(spec)
    _emit(args, fileio.dumps_election(election))
    if args.positions_out:
        if voter_pos is None:
            _note(args, "note: the resampling model has no positions; sidecar not written")
        else:
            lines = ["# voters"]
            lines.extend(" ".join(repr(float(x)) for x in row) for row in voter_pos)
            lines.append("# candidates")
            lines.extend(" ".join(repr(float(x)) for x in row) for row in cand_pos)
            Path(args.positions_out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_perturb(args: argparse.Namespace) -> int:
    election = fileio.load_election(args.election)
    if (args.count is None) == (args.pct is None):
        print("error: give exactly one of --count and --pct", file=sys.stderr)
        return EXIT_USAGE
    if args.count is not None:
        r = args.count
    else:
        r = int(election.total_approvals * args.pct + 1e-9)
    change = ChangeSpec(args.op, r)
    result = perturb(election, change, args.seed)
    _emit(args, fileio.dumps_election(result))
    return EXIT_OK


def _cmd_reduce_is(args: argparse.Namespace) -> int:
    graph = fileio.load_graph(args.graph)
    base, _ = _split_rule(args.rule)
    # named rules are generated one weight past the committee size so the
    # first below-1 weight is visible even for kappa = 1
    k_hint = args.kappa + 1 if base in ("pav", "cc") else args.kappa
    weights = parse_rule(base, k_hint)
    output = reduce_is_to_rce(graph, args.kappa, weights, ell=args.ell)
    _emit(args, fileio.dumps_instance(output.instance))
    _note(
        args,
        f"reduction: m={output.instance.before.m}, n={output.instance.before.n}, "
        f"k={output.instance.k}, t={output.t}, padding={output.s_pad}",
    )
    return EXIT_OK


def _experiment_config(args: argparse.Namespace, which: int) -> ExperimentConfig:
    sampler = _sampler_spec(args, seed=0)
    kwargs = dict(
        which=which,
        rule=args.rule,
        sampler=sampler,
        k=args.k,
        enumerate_cap=getattr(args, "cap", 100),
        base_seed=args.seed,
    )
    if which == 3:
        kwargs["fixed_pct"] = args.pct
        kwargs["schedule"] = (args.pct,)
    elif args.schedule:
        kwargs["schedule"] = tuple(float(p) for p in args.schedule.split(","))
    else:
        kwargs["schedule"] = tuple(change_schedule())
    if which == 1:
        kwargs["ops"] = tuple(args.ops.split(",")) if args.ops else None
    cfg = ExperimentConfig(**kwargs)
    cfg = cfg.with_preset(args.preset)
    overrides = {}
    if args.elections is not None:
        overrides["num_base_elections"] = args.elections
    if args.trials is not None:
        overrides["trials_per_point"] = args.trials
    if overrides:
        from dataclasses import replace

        cfg = replace(cfg, **overrides)
    return cfg


def _cmd_exp(args: argparse.Namespace, which: int) -> int:
    cfg = _experiment_config(args, which)
    runner = {1: run_exp1, 2: run_exp2, 3: run_exp3}[which]
    columns = {1: EXP1_COLUMNS, 2: EXP2_COLUMNS, 3: EXP3_COLUMNS}[which]
    rows = runner(cfg, out_path=None, threads=args.threads)
    if args.out:
        write_csv(args.out, columns, rows, cfg)
        _note(args, f"wrote {len(rows)} rows to {args.out}")
    else:
        import csv as _csv

        writer = _csv.writer(sys.stdout)
        writer.writerow(columns)
        writer.writerows(rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcelect",
        description="Two-stage approval committee elections with a continuity objective",
    )
    parser.add_argument("--version", action="version", version=f"rcelect {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--quiet", action="store_true", help="suppress informational notes")

    p = sub.add_parser("score", parents=[common], help="Thiele score of a committee")
    p.add_argument("--election", required=True, help=".app election file")
    p.add_argument("--committee", required=True, help="candidate ids, e.g. '0,3,5'")
    p.add_argument("--rule", required=True, help="av | pav | cc | owa=q1,q2,...")
    p.set_defaults(handler=_cmd_score)

    p = sub.add_parser("winners", parents=[common], help="all maximum-score committees")
    p.add_argument("--election", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--rule", required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_ENUM_BUDGET,
                   help="max committees to evaluate before refusing")
    p.set_defaults(handler=_cmd_winners)

    p = sub.add_parser("greedy", parents=[common], help="greedy Thiele committee(s)")
    p.add_argument("--election", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--rule", required=True)
    p.add_argument("--enumerate", type=int, default=None, metavar="CAP",
                   help="enumerate up to CAP tied committees instead of one run")
    p.add_argument("--prefer", default="", help="candidates to prefer in tie branches")
    p.add_argument("--order", action="store_true", help="print the selection order")
    p.set_defaults(handler=_cmd_greedy)

    p = sub.add_parser("solve-rce", parents=[common], help="solve a resilient-committee instance")
    p.add_argument("--instance", required=True, help="instance file (JSON)")
    p.add_argument("--rule", required=True,
                   help="av | pav | cc | owa=... (prefix greedy- for greedy rules)")
    p.add_argument("--solver", choices=SOLVERS, default="auto")
    p.add_argument("--budget", type=int, default=DEFAULT_ENUM_BUDGET)
    p.add_argument("--shrink", action="store_true",
                   help="collapse candidate classes before searching")
    p.add_argument("--no-validate", action="store_true",
                   help="skip checking that the committee wins the 'before' election")
    p.set_defaults(handler=_cmd_solve_rce)

    sampler_flags = argparse.ArgumentParser(add_help=False)
    sampler_flags.add_argument("--model", required=True,
                               help="1d | 2d | resampling | 1d-res | 2d-res")
    sampler_flags.add_argument("--tau", type=float, default=None, help="Euclidean radius")
    sampler_flags.add_argument("--p", type=float, default=None, help="resampling density")
    sampler_flags.add_argument("--phi", type=float, default=None, help="resampling probability")
    sampler_flags.add_argument("-n", type=int, default=1000, help="number of voters")
    sampler_flags.add_argument("-m", type=int, default=100, help="number of candidates")

    p = sub.add_parser("sample", parents=[common, sampler_flags], help="sample a random election")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--positions-out", default=None,
                   help="also write voter/candidate positions (Euclidean models)")
    p.set_defaults(handler=_cmd_sample)

    p = sub.add_parser("perturb", parents=[common], help="randomly add/remove approvals")
    p.add_argument("--election", required=True)
    p.add_argument("--op", required=True, help="add | remove | mix")
    p.add_argument("--count", type=int, default=None, help="number of elementary changes")
    p.add_argument("--pct", type=float, default=None,
                   help="changes as a fraction of total approvals")
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(handler=_cmd_perturb)

    p = sub.add_parser("reduce-is", parents=[common],
                       help="independent-set hardness instance for a rule")
    p.add_argument("--graph", required=True, help="graph file")
    p.add_argument("--kappa", type=int, required=True, help="independent-set size")
    p.add_argument("--rule", required=True)
    p.add_argument("--ell", type=int, default=None)
    p.set_defaults(handler=_cmd_reduce_is)

    for which, extra_help in ((1, "committee distance vs amount of change"),
                              (2, "price of lexicographic tie-breaking"),
                              (3, "replacement frequency by selection round")):
        p = sub.add_parser(f"exp{which}", parents=[common, sampler_flags],
                           help=f"experiment {which}: {extra_help}")
        p.add_argument("--rule", required=True, help="greedy-cc | greedy-pav | greedy-owa=...")
        p.add_argument("--k", type=int, default=10)
        p.add_argument("--preset", choices=sorted(PRESETS), default="desk")
        p.add_argument("--elections", type=int, default=None,
                       help="override the preset's number of base elections")
        p.add_argument("--trials", type=int, default=None,
                       help="override the preset's trials per point")
        p.add_argument("--seed", type=int, required=True, help="base seed")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                       help="worker processes over base elections "
                            "(default: all cores; outputs are identical either way)")
        if which == 1:
            p.add_argument("--ops", default=None, help="comma list among add,remove,mix")
            p.add_argument("--schedule", default=None,
                           help="comma list of change fractions (default: quadratic 15)")
        if which == 2:
            p.add_argument("--schedule", default=None,
                           help="comma list of change fractions (default: quadratic 15)")
            p.add_argument("--cap", type=int, default=100,
                           help="max tied committees to enumerate per trial")
        if which == 3:
            p.add_argument("--pct", type=float, default=0.025, help="fixed change fraction")
        p.set_defaults(handler=lambda a, w=which: _cmd_exp(a, w))

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (RuleMismatchError, GreedyInfeasibleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
