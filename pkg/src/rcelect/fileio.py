"""On-disk codecs: ``.app`` election files, RCE instance files (JSON), and
graph files.

Election file layout (UTF-8, LF): optional ``#`` comment lines, a header
line ``m n``, then exactly n ballot lines of ascending space-separated
0-based candidate indices; an empty line is an empty ballot.
"""

from __future__ import annotations

import json
from pathlib import Path

from .core import Election, ParseError, RceInstance, as_committee
from .reductions import Graph


def loads_election(text: str) -> Election:
    """Parse an election from ``.app`` file content."""
    header: tuple[int, int] | None = None
    ballots: list[tuple[int, ...]] = []
    header_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if header is None:
            tokens = line.split()
            if len(tokens) != 2:
                raise ParseError(f"expected header 'm n', got {raw!r}", lineno)
            try:
                header = (int(tokens[0]), int(tokens[1]))
            except ValueError:
                raise ParseError(f"non-numeric token in header {raw!r}", lineno) from None
            if header[0] < 0 or header[1] < 1:
                raise ParseError(f"bad header values m={header[0]}, n={header[1]}", lineno)
            header_line = lineno
            continue
        if len(ballots) >= header[1]:
            raise ParseError(f"unexpected extra ballot line {raw!r}", lineno)
        ballots.append(_parse_ballot(raw, header[0], lineno))
    if header is None:
        raise ParseError("missing header line 'm n'", 1)
    if len(ballots) != header[1]:
        raise ParseError(
            f"expected {header[1]} ballot lines, found {len(ballots)}", header_line
        )
    allow_empty = any(not b for b in ballots)
    return Election(header[0], ballots, allow_empty=allow_empty)


def _parse_ballot(raw: str, m: int, lineno: int) -> tuple[int, ...]:
    tokens = raw.split()
    ballot: list[int] = []
    for tok in tokens:
        try:
            c = int(tok)
        except ValueError:
            raise ParseError(f"non-numeric token {tok!r} in ballot", lineno) from None
        if c < 0 or c >= m:
            raise ParseError(f"candidate index {c} out of range [0, {m})", lineno)
        if ballot and c == ballot[-1]:
            raise ParseError(f"duplicate candidate index {c} in ballot", lineno)
        if ballot and c < ballot[-1]:
            raise ParseError(f"ballot indices not ascending at {c}", lineno)
        ballot.append(c)
    return tuple(ballot)


def dumps_election(election: Election) -> str:
    lines = [f"{election.m} {election.n}"]
    lines.extend(" ".join(str(c) for c in ballot) for ballot in election.ballots)
    return "\n".join(lines) + "\n"


def load_election(path: str | Path) -> Election:
    return loads_election(Path(path).read_text(encoding="utf-8"))


def save_election(election: Election, path: str | Path) -> None:
    Path(path).write_text(dumps_election(election), encoding="utf-8", newline="\n")


def _election_to_obj(election: Election) -> dict:
    obj: dict = {"m": election.m, "ballots": [list(b) for b in election.ballots]}
    if election.allow_empty:
        obj["allow_empty"] = True
    return obj


def _election_from_obj(obj: object, field: str) -> Election:
    if not isinstance(obj, dict) or "m" not in obj or "ballots" not in obj:
        raise ParseError(f"field '{field}' must be an object with 'm' and 'ballots'")
    ballots = obj["ballots"]
    if not isinstance(ballots, list):
        raise ParseError(f"'{field}.ballots' must be a list")
    allow_empty = bool(obj.get("allow_empty", any(not b for b in ballots)))
    try:
        return Election(obj["m"], ballots, allow_empty=allow_empty)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"bad election in field '{field}': {exc}") from exc


def loads_instance(text: str) -> RceInstance:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from exc
    if not isinstance(obj, dict):
        raise ParseError("instance file must contain a JSON object")
    for field in ("k", "ell", "committee", "before", "after"):
        if field not in obj:
            raise ParseError(f"instance file is missing field '{field}'")
    before = _election_from_obj(obj["before"], "before")
    after = _election_from_obj(obj["after"], "after")
    try:
        return RceInstance(
            before=before,
            after=after,
            k=int(obj["k"]),
            committee=as_committee(obj["committee"]),
            ell=int(obj["ell"]),
        )
    except (ValueError, TypeError) as exc:
        raise ParseError(str(exc)) from exc


def dumps_instance(inst: RceInstance) -> str:
    obj = {
        "k": inst.k,
        "ell": inst.ell,
        "committee": list(inst.committee),
        "before": _election_to_obj(inst.before),
        "after": _election_to_obj(inst.after),
    }
    return json.dumps(obj, indent=2) + "\n"


def load_instance(path: str | Path) -> RceInstance:
    return loads_instance(Path(path).read_text(encoding="utf-8"))


def save_instance(inst: RceInstance, path: str | Path) -> None:
    Path(path).write_text(dumps_instance(inst), encoding="utf-8", newline="\n")


def loads_graph(text: str) -> Graph:
    """Parse a graph file: a line with the vertex count, then one 0-based
    ``u v`` line per edge."""
    num_vertices: int | None = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if num_vertices is None:
            if len(tokens) != 1:
                raise ParseError(f"expected a single vertex count, got {raw!r}", lineno)
            try:
                num_vertices = int(tokens[0])
            except ValueError:
                raise ParseError(f"non-numeric vertex count {raw!r}", lineno) from None
            continue
        if len(tokens) != 2:
            raise ParseError(f"expected edge 'u v', got {raw!r}", lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise ParseError(f"non-numeric token in edge {raw!r}", lineno) from None
        edges.append((u, v))
    if num_vertices is None:
        raise ParseError("missing vertex count line", 1)
    try:
        return Graph.from_edges(num_vertices, edges)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def dumps_graph(graph: Graph) -> str:
    lines = [str(graph.num_vertices)]
    lines.extend(f"{u} {v}" for u, v in graph.edges)
    return "\n".join(lines) + "\n"


def load_graph(path: str | Path) -> Graph:
    return loads_graph(Path(path).read_text(encoding="utf-8"))


def save_graph(graph: Graph, path: str | Path) -> None:
    Path(path).write_text(dumps_graph(graph), encoding="utf-8", newline="\n")
