"""Random election generation (1D/2D Euclidean and resampling cultures) and
the approval perturbation operators with the quadratic change schedule.

Every random draw comes from a counter-based Philox stream keyed by hashing
(seed, purpose tags, indices), so identical specs produce identical
elections across runs, platforms, and any parallel execution order.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .core import Election

MODELS = ("1d", "2d", "resampling", "1d_res", "2d_res")
OPS = ("ADD", "REMOVE", "MIX")

# parameter grids matching the experimental setups this package reproduces
RADII_1D = (0.025, 0.051, 0.078)
RADII_2D = (0.134, 0.195, 0.244)
RESAMPLING_P = (0.05, 0.1, 0.15)
PHI_RESAMPLING = 0.75
PHI_EUCLID_RES = 0.1
DEFAULT_TAU = {"1d": 0.051, "2d": 0.195, "1d_res": 0.051, "2d_res": 0.195}

MAX_REDRAWS = 1000


class SamplingError(RuntimeError):
    """A ballot stayed empty after the redraw limit."""


def normalize_model(name: str) -> str:
    model = name.strip().lower().replace("-", "_")
    if model not in MODELS:
        raise ValueError(f"unknown sampling model {name!r} (expected one of {MODELS})")
    return model


def derive_seed(*parts: object) -> int:
    """Stable 63-bit seed derived from arbitrary labels, for sub-streams of a
    base experiment seed."""
    joined = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(joined.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def substream(seed: int, *tags: object) -> np.random.Generator:
    """A Philox generator keyed by hashing (seed, tags); the same key always
    yields the same stream regardless of call order or threading."""
    h = hashlib.sha256()
    h.update(str(int(seed)).encode("utf-8"))
    for tag in tags:
        h.update(b"\x1f")
        h.update(str(tag).encode("utf-8"))
    key = np.frombuffer(h.digest()[:16], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_without_replacement(rng: np.random.Generator, pool: np.ndarray, count: int) -> np.ndarray:
    """Uniform `count`-subset of `pool`, by partial Fisher-Yates."""
    if count > pool.size:
        raise ValueError(f"cannot sample {count} items from a pool of {pool.size}")
    arr = pool.copy()
    for i in range(count):
        j = int(rng.integers(i, arr.size))
        arr[i], arr[j] = arr[j], arr[i]
    return arr[:count]


@dataclass(frozen=True)
class SamplerSpec:
    """Which culture to sample from, its parameters, and the election shape."""

    model: str
    n: int
    m: int
    seed: int = 0
    tau: float | None = None
    p: float | None = None
    phi: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "model", normalize_model(self.model))
        if self.n < 1 or self.m < 1:
            raise ValueError(f"need n >= 1 and m >= 1, got n={self.n}, m={self.m}")
        if self.model in ("1d", "2d", "1d_res", "2d_res"):
            if self.tau is None:
                raise ValueError(f"model {self.model} needs a radius tau")
            limit = 1.0 if self.model.startswith("1d") else math.sqrt(2.0)
            if not 0.0 <= self.tau <= limit:
                raise ValueError(f"tau={self.tau} out of range [0, {limit}] for {self.model}")
        if self.model == "resampling":
            if self.p is None or self.phi is None:
                raise ValueError("resampling needs p and phi")
            if not 0.0 <= self.p <= 1.0:
                raise ValueError(f"p={self.p} out of range [0, 1]")
        if self.model.endswith("_res"):
            if self.phi is None:
                raise ValueError(f"model {self.model} needs phi")
        if self.phi is not None and not 0.0 <= self.phi <= 1.0:
            raise ValueError(f"phi={self.phi} out of range [0, 1]")

    @property
    def param(self) -> float:
        """The headline scalar parameter (radius, or central-vote density)."""
        return self.tau if self.tau is not None else self.p


@dataclass(frozen=True)
class ChangeSpec:
    """A perturbation: the operation and the number of elementary changes."""

    op: str
    r: int

    def __post_init__(self):
        op = self.op.strip().upper()
        if op not in OPS:
            raise ValueError(f"unknown perturbation op {self.op!r} (expected one of {OPS})")
        object.__setattr__(self, "op", op)
        if self.r < 0:
            raise ValueError(f"change count must be non-negative, got {self.r}")

    @property
    def adds(self) -> int:
        return {"ADD": self.r, "REMOVE": 0, "MIX": self.r // 2}[self.op]

    @property
    def removes(self) -> int:
        return {"ADD": 0, "REMOVE": self.r, "MIX": self.r // 2}[self.op]


def change_schedule(count: int = 15, maximum: float = 0.10) -> list[float]:
    """Quadratically spaced change percentages from 0 to `maximum`, so small
    amounts of change are sampled in greater detail."""
    if count < 2:
        raise ValueError("schedule needs at least two points")
    return [maximum * (i / (count - 1)) ** 2 for i in range(count)]


def _euclidean_ballots(spec: SamplerSpec, dim: int) -> tuple[list[tuple[int, ...]], np.ndarray, np.ndarray]:
    rng_c = substream(spec.seed, "cand-pos")
    cand = rng_c.random((spec.m, dim))
    voter_pos = np.empty((spec.n, dim))
    tau2 = spec.tau * spec.tau
    ballots: list[tuple[int, ...]] = []
    for i in range(spec.n):
        rng_v = substream(spec.seed, "voter-pos", i)
        for _ in range(MAX_REDRAWS):
            point = rng_v.random(dim)
            if dim == 1:
                inside = np.abs(cand[:, 0] - point[0]) <= spec.tau
            else:
                inside = ((cand - point) ** 2).sum(axis=1) <= tau2
            approved = np.flatnonzero(inside)
            if approved.size:
                break
        else:
            raise SamplingError(
                f"voter {i}: no non-empty ballot after {MAX_REDRAWS} position draws"
            )
        voter_pos[i] = point
        ballots.append(tuple(int(c) for c in approved))
    return ballots, voter_pos, cand


def _resample_once(
    rng: np.random.Generator, m: int, base: np.ndarray, prob: float, phi: float
) -> np.ndarray:
    redrawn = rng.random(m) < phi
    values = rng.random(m) < prob
    return np.where(redrawn, values, base)


def _resampling_ballots(spec: SamplerSpec) -> list[tuple[int, ...]]:
    rng_c = substream(spec.seed, "central")
    size = math.floor(spec.p * spec.m + 1e-9)
    central = np.zeros(spec.m, dtype=bool)
    if size:
        central[sample_without_replacement(rng_c, np.arange(spec.m), size)] = True
    ballots: list[tuple[int, ...]] = []
    for i in range(spec.n):
        rng_v = substream(spec.seed, "resample", i)
        for _ in range(MAX_REDRAWS):
            ballot = _resample_once(rng_v, spec.m, central, spec.p, spec.phi)
            if ballot.any():
                break
        else:
            raise SamplingError(f"voter {i}: no non-empty ballot after {MAX_REDRAWS} redraws")
        ballots.append(tuple(int(c) for c in np.flatnonzero(ballot)))
    return ballots


def _euclid_res_ballots(spec: SamplerSpec, dim: int) -> tuple[list[tuple[int, ...]], np.ndarray, np.ndarray]:
    base_ballots, voter_pos, cand = _euclidean_ballots(spec, dim)
    ballots: list[tuple[int, ...]] = []
    for i, base in enumerate(base_ballots):
        base_row = np.zeros(spec.m, dtype=bool)
        base_row[list(base)] = True
        prob = len(base) / spec.m
        rng_v = substream(spec.seed, "resample", i)
        for _ in range(MAX_REDRAWS):
            ballot = _resample_once(rng_v, spec.m, base_row, prob, spec.phi)
            if ballot.any():
                break
        else:
            raise SamplingError(f"voter {i}: no non-empty ballot after {MAX_REDRAWS} redraws")
        ballots.append(tuple(int(c) for c in np.flatnonzero(ballot)))
    return ballots, voter_pos, cand


def sample_election_detailed(
    spec: SamplerSpec,
) -> tuple[Election, np.ndarray | None, np.ndarray | None]:
    """Sample an election; for Euclidean models also return the voter and
    candidate positions the ballots were derived from."""
    if spec.model == "1d":
        ballots, vpos, cpos = _euclidean_ballots(spec, 1)
    elif spec.model == "2d":
        ballots, vpos, cpos = _euclidean_ballots(spec, 2)
    elif spec.model == "1d_res":
        ballots, vpos, cpos = _euclid_res_ballots(spec, 1)
    elif spec.model == "2d_res":
        ballots, vpos, cpos = _euclid_res_ballots(spec, 2)
    else:
        ballots, vpos, cpos = _resampling_ballots(spec), None, None
    return Election(spec.m, ballots), vpos, cpos


def sample_election(spec: SamplerSpec) -> Election:
    """Deterministic function of the spec (including its seed)."""
    return sample_election_detailed(spec)[0]


def perturb(election: Election, change: ChangeSpec, seed: int) -> Election:
    """Apply uniformly random approval additions/removals.

    ADD draws an r-subset of the absent (voter, candidate) pairs, REMOVE an
    r-subset of the present pairs, MIX does floor(r/2) of each; both pools
    are snapshots of the input election, so MIX never removes an approval it
    just added.  The result allows empty ballots.
    """
    flat = election.matrix.ravel()
    present = np.flatnonzero(flat)
    absent = np.flatnonzero(~flat)
    adds, removes = change.adds, change.removes
    if adds > absent.size:
        raise ValueError(f"cannot add {adds} approvals: only {absent.size} absent pairs")
    if removes > present.size:
        raise ValueError(f"cannot remove {removes} approvals: only {present.size} present pairs")
    rng = substream(seed, "perturb", change.op, change.r)
    updated = flat.copy()
    if adds:
        updated[sample_without_replacement(rng, absent, adds)] = True
    if removes:
        updated[sample_without_replacement(rng, present, removes)] = False
    return Election.from_matrix(updated.reshape(election.n, election.m), allow_empty=True)
