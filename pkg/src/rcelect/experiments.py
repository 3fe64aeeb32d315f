"""Experiment harness reproducing the three committee-resilience studies:

1. distance between the old and new lexicographic greedy committee as a
   function of the amount of random approval change;
2. the price of lexicographic tie-breaking versus the closest committee
   among up to `enumerate_cap` tied greedy winners (MIX changes only);
3. how often each committee member is replaced, by selection round, at a
   fixed change percentage (MIX changes only).

Runs are deterministic: per-trial seeds derive from (base_seed,
election index, operation, schedule index, trial index), and CSV rows are
emitted in canonical order regardless of worker scheduling.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import partial
from pathlib import Path
from typing import Callable, Sequence

from ._version import VERSION
from .core import Election, OwaWeights, parse_rule
from .greedy import greedy_enumerate, greedy_run
from .samplers import (
    OPS,
    ChangeSpec,
    SamplerSpec,
    change_schedule,
    derive_seed,
    perturb,
    sample_election,
)

logger = logging.getLogger(__name__)

PRESETS = {
    "desk": {"num_base_elections": 20, "trials_per_point": 50},
    "full": {"num_base_elections": 100, "trials_per_point": 100},
}

EXP1_COLUMNS = ("model", "model_param", "rule", "op", "change_pct",
                "election_idx", "trial_idx", "distance")
EXP2_COLUMNS = ("model", "model_param", "rule", "op", "change_pct",
                "election_idx", "trial_idx", "dist_lexi", "dist_opt", "diff", "tied_found")
EXP3_COLUMNS = ("model", "model_param", "rule", "op", "change_pct",
                "election_idx", "round_idx", "member", "replaced_fraction")


def parse_greedy_rule(rule: str, k: int) -> OwaWeights:
    """Experiments run greedy Thiele rules; the rule spec carries a
    ``greedy-`` prefix before the usual rule grammar (e.g. greedy-cc)."""
    r = rule.strip().lower()
    if not r.startswith("greedy-"):
        raise ValueError(f"experiment rule must be greedy-<rule>, got {rule!r}")
    return parse_rule(r[len("greedy-"):], k)


@dataclass(frozen=True)
class ExperimentConfig:
    which: int
    rule: str
    sampler: SamplerSpec
    k: int = 10
    num_base_elections: int = 100
    trials_per_point: int = 100
    schedule: tuple[float, ...] = field(default_factory=lambda: tuple(change_schedule()))
    ops: tuple[str, ...] | None = None
    enumerate_cap: int = 100
    fixed_pct: float = 0.025
    base_seed: int = 0

    def __post_init__(self):
        if self.which not in (1, 2, 3):
            raise ValueError(f"unknown experiment {self.which}")
        parse_greedy_rule(self.rule, self.k)  # fail early on bad rules
        if self.ops is None:
            ops = OPS if self.which == 1 else ("MIX",)
        else:
            ops = tuple(op.strip().upper() for op in self.ops)
        for op in ops:
            if op not in OPS:
                raise ValueError(f"unknown perturbation op {op!r}")
        if self.which in (2, 3) and ops != ("MIX",):
            raise ValueError(f"experiment {self.which} runs the MIX operation only")
        if not ops:
            raise ValueError("need at least one perturbation op")
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "schedule", tuple(float(p) for p in self.schedule))
        if not self.schedule:
            raise ValueError("schedule must not be empty")
        for pct in self.schedule:
            if not 0.0 <= pct < 1.0:
                raise ValueError(f"change percentage {pct} out of range [0, 1)")
        if not 0.0 <= self.fixed_pct < 1.0:
            raise ValueError(f"change percentage {self.fixed_pct} out of range [0, 1)")
        if self.num_base_elections < 1 or self.trials_per_point < 1:
            raise ValueError("need at least one election and one trial per point")
        if self.enumerate_cap < 1:
            raise ValueError("enumerate_cap must be at least 1")
        if not 1 <= self.k <= self.sampler.m:
            raise ValueError(f"committee size {self.k} out of range for m={self.sampler.m}")

    def with_preset(self, preset: str) -> "ExperimentConfig":
        if preset not in PRESETS:
            raise ValueError(f"unknown preset {preset!r} (expected one of {sorted(PRESETS)})")
        return replace(self, **PRESETS[preset])


def _changes(total_approvals: int, pct: float) -> int:
    # r = floor(app(E) * pct); the epsilon absorbs binary-float fuzz
    return int(math.floor(total_approvals * pct + 1e-9))


def _base_election(cfg: ExperimentConfig, election_idx: int) -> Election:
    spec = replace(cfg.sampler, seed=derive_seed(cfg.base_seed, "election", election_idx))
    return sample_election(spec)


def _trial_seed(cfg: ExperimentConfig, election_idx: int, op: str, pct_idx: int, trial: int) -> int:
    return derive_seed(cfg.base_seed, "trial", election_idx, op, pct_idx, trial)


def _perturbed(cfg, election, election_idx, op, pct_idx, r, trial) -> Election | None:
    try:
        change = ChangeSpec(op, r)
        return perturb(election, change, _trial_seed(cfg, election_idx, op, pct_idx, trial))
    except ValueError as exc:
        logger.warning(
            "skipping trial (election %d, op %s, pct index %d, trial %d): %s",
            election_idx, op, pct_idx, trial, exc,
        )
        return None


def _exp1_rows(cfg: ExperimentConfig, election_idx: int) -> list[tuple]:
    weights = parse_greedy_rule(cfg.rule, cfg.k)
    election = _base_election(cfg, election_idx)
    committee = set(greedy_run(election, cfg.k, weights).committee)
    app = election.total_approvals
    meta = (cfg.sampler.model, cfg.sampler.param, cfg.rule)
    rows: list[tuple] = []
    for op in cfg.ops:
        for pct_idx, pct in enumerate(cfg.schedule):
            r = _changes(app, pct)
            for trial in range(cfg.trials_per_point):
                perturbed = _perturbed(cfg, election, election_idx, op, pct_idx, r, trial)
                if perturbed is None:
                    continue
                winner = greedy_run(perturbed, cfg.k, weights).committee
                distance = cfg.k - len(committee & set(winner))
                rows.append(meta + (op, pct, election_idx, trial, distance))
    return rows


def _exp2_rows(cfg: ExperimentConfig, election_idx: int) -> list[tuple]:
    weights = parse_greedy_rule(cfg.rule, cfg.k)
    election = _base_election(cfg, election_idx)
    committee = greedy_run(election, cfg.k, weights).committee
    committee_set = set(committee)
    app = election.total_approvals
    meta = (cfg.sampler.model, cfg.sampler.param, cfg.rule)
    rows: list[tuple] = []
    for pct_idx, pct in enumerate(cfg.schedule):
        r = _changes(app, pct)
        for trial in range(cfg.trials_per_point):
            perturbed = _perturbed(cfg, election, election_idx, "MIX", pct_idx, r, trial)
            if perturbed is None:
                continue
            lexi = greedy_run(perturbed, cfg.k, weights).committee
            dist_lexi = cfg.k - len(committee_set & set(lexi))
            enum = greedy_enumerate(
                perturbed, cfg.k, weights, cap=cfg.enumerate_cap, prefer=committee
            )
            dist_opt = min(
                dist_lexi,
                min(cfg.k - len(committee_set & set(c)) for c in enum.committees),
            )
            rows.append(
                meta
                + ("MIX", pct, election_idx, trial,
                   dist_lexi, dist_opt, dist_lexi - dist_opt, len(enum.committees))
            )
    return rows


def _exp3_rows(cfg: ExperimentConfig, election_idx: int) -> list[tuple]:
    weights = parse_greedy_rule(cfg.rule, cfg.k)
    election = _base_election(cfg, election_idx)
    order = greedy_run(election, cfg.k, weights).order
    app = election.total_approvals
    r = _changes(app, cfg.fixed_pct)
    replaced = [0] * cfg.k
    effective = 0
    for trial in range(cfg.trials_per_point):
        perturbed = _perturbed(cfg, election, election_idx, "MIX", 0, r, trial)
        if perturbed is None:
            continue
        winner = set(greedy_run(perturbed, cfg.k, weights).committee)
        effective += 1
        for round_idx, member in enumerate(order):
            if member not in winner:
                replaced[round_idx] += 1
    if effective == 0:
        logger.warning("election %d: every trial was skipped; no rows", election_idx)
        return []
    meta = (cfg.sampler.model, cfg.sampler.param, cfg.rule)
    return [
        meta + ("MIX", cfg.fixed_pct, election_idx, round_idx + 1, member,
                replaced[round_idx] / effective)
        for round_idx, member in enumerate(order)
    ]


def _collect(
    cfg: ExperimentConfig,
    worker: Callable[[ExperimentConfig, int], list[tuple]],
    threads: int,
) -> list[tuple]:
    indices = range(cfg.num_base_elections)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(partial(worker, cfg), indices))
    else:
        chunks = [worker(cfg, i) for i in indices]
    return [row for chunk in chunks for row in chunk]


def write_csv(
    path: str | Path, columns: Sequence[str], rows: Sequence[tuple], cfg: ExperimentConfig
) -> None:
    """Write the rows plus a manifest sidecar (config echo, version, seed)."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)
    manifest = {
        "experiment": cfg.which,
        "artifact_version": VERSION,
        "base_seed": cfg.base_seed,
        "columns": list(columns),
        "rows": len(rows),
        "config": asdict(cfg),
    }
    manifest_path = path.with_name(path.name + ".manifest.json")
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def run_exp1(cfg: ExperimentConfig, out_path: str | Path | None = None, threads: int = 1) -> list[tuple]:
    if cfg.which != 1:
        raise ValueError(f"config is for experiment {cfg.which}")
    rows = _collect(cfg, _exp1_rows, threads)
    if out_path is not None:
        write_csv(out_path, EXP1_COLUMNS, rows, cfg)
    return rows


def run_exp2(cfg: ExperimentConfig, out_path: str | Path | None = None, threads: int = 1) -> list[tuple]:
    if cfg.which != 2:
        raise ValueError(f"config is for experiment {cfg.which}")
    rows = _collect(cfg, _exp2_rows, threads)
    if out_path is not None:
        write_csv(out_path, EXP2_COLUMNS, rows, cfg)
    return rows


def run_exp3(cfg: ExperimentConfig, out_path: str | Path | None = None, threads: int = 1) -> list[tuple]:
    if cfg.which != 3:
        raise ValueError(f"config is for experiment {cfg.which}")
    rows = _collect(cfg, _exp3_rows, threads)
    if out_path is not None:
        write_csv(out_path, EXP3_COLUMNS, rows, cfg)
    return rows
