"""JSON / JSON Lines / DOT serialization of graphs and sequences.

Graph object::

    {"n": 5, "undirected": false, "edges": [[5, 3], [5, 2], [2, 4], [4, 1]]}

A sequence file holds one graph object per line in round order, optionally
followed by a ``{"repeat": {"from": r1, "to": r2}}`` line declaring that
rounds ``r1..r2`` repeat forever after the listed rounds.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from ..errors import ValidationError
from .core import GraphSequence, LabeledDigraph, make_graph


class SequenceParseError(ValidationError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def graph_to_dict(g: LabeledDigraph) -> dict:
    if g.undirected:
        edges = [[u, v] for u, v in g.sorted_edges() if u < v]
    else:
        edges = [[u, v] for u, v in g.sorted_edges()]
    return {"n": g.n, "undirected": g.undirected, "edges": edges}


def graph_from_dict(d: dict) -> LabeledDigraph:
    try:
        n = d["n"]
        edges = d.get("edges", [])
        undirected = bool(d.get("undirected", False))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValidationError(f"not a graph object: {d!r}") from exc
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValidationError(f"graph field 'n' must be an integer, got {n!r}")
    return make_graph(n, [tuple(e) for e in edges], undirected=undirected)


def sequence_to_lines(seq: GraphSequence) -> list[str]:
    lines = [json.dumps(graph_to_dict(g), separators=(", ", ": ")) for g in seq.rounds]
    if seq.repeat is not None:
        lines.append(json.dumps({"repeat": {"from": seq.repeat[0], "to": seq.repeat[1]}}))
    return lines


def dumps_sequence(seq: GraphSequence) -> str:
    return "".join(line + "\n" for line in sequence_to_lines(seq))


def loads_sequence(text: str, n: int = None) -> GraphSequence:
    """Parse a JSONL sequence.  ``n`` is required only for an empty file."""
    rounds = []
    repeat = None
    repeat_line = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        raw = raw.strip()
        if not raw:
            continue
        if repeat is not None:
            raise SequenceParseError("content after the repeat directive", lineno)
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SequenceParseError(f"invalid JSON ({exc.msg})", lineno) from None
        if not isinstance(obj, dict):
            raise SequenceParseError("expected a JSON object", lineno)
        if "repeat" in obj:
            try:
                repeat = (int(obj["repeat"]["from"]), int(obj["repeat"]["to"]))
            except (KeyError, TypeError, ValueError):
                raise SequenceParseError("repeat directive needs integer 'from' and 'to'", lineno) from None
            repeat_line = lineno
            continue
        try:
            g = graph_from_dict(obj)
        except ValidationError as exc:
            raise SequenceParseError(str(exc), lineno) from None
        if rounds and g.n != rounds[0].n:
            raise SequenceParseError(f"graph has n={g.n}, earlier rounds have n={rounds[0].n}", lineno)
        rounds.append(g)
    if rounds:
        n = rounds[0].n
    elif n is None:
        raise SequenceParseError("empty sequence file; node count unknown")
    try:
        return GraphSequence(n, tuple(rounds), repeat)
    except ValidationError as exc:
        raise SequenceParseError(str(exc), repeat_line) from None


def read_sequence(path: Union[str, Path], n: int = None) -> GraphSequence:
    return loads_sequence(Path(path).read_text(), n=n)


def write_sequence(seq: GraphSequence, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_sequence(seq))


def to_dot(g: LabeledDigraph, name: str = "G") -> str:
    if g.undirected:
        head, arrow = "graph", "--"
        pairs = [(u, v) for u, v in g.sorted_edges() if u < v]
    else:
        head, arrow = "digraph", "->"
        pairs = g.sorted_edges()
    lines = [f"{head} {name} {{"]
    lines += [f"  {p};" for p in range(1, g.n + 1)]
    lines += [f"  {u} {arrow} {v};" for u, v in pairs]
    lines.append("}")
    return "\n".join(lines) + "\n"


def sequence_to_dot(seq: GraphSequence) -> str:
    return "".join(to_dot(g, name=f"G{r}") for r, g in enumerate(seq.rounds, 1))
