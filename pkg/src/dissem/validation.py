"""Input coercion shared by the estimator wrappers and the command line."""

from __future__ import annotations

import os
from typing import Iterable, Optional

from .errors import ValidationError
from .graphs import (
    GraphClassDescriptor,
    GraphSequence,
    LabeledDigraph,
    describe,
    graph_from_dict,
    loads_sequence,
    read_sequence,
)


def check_n(n, minimum: int = 1) -> int:
    if isinstance(n, bool) or not isinstance(n, int):
        raise ValidationError(f"n must be an integer, got {n!r}")
    if n < minimum:
        raise ValidationError(f"n must be at least {minimum}, got {n}")
    return n


def check_horizon(horizon) -> Optional[int]:
    if horizon is None:
        return None
    if isinstance(horizon, bool) or not isinstance(horizon, int) or horizon < 0:
        raise ValidationError(f"horizon must be a non-negative integer, got {horizon!r}")
    return horizon


def check_sequence(X, n: Optional[int] = None) -> GraphSequence:
    """Accept a sequence, a list of graphs or graph dicts, JSONL text or a path."""
    if isinstance(X, GraphSequence):
        seq = X
    elif isinstance(X, os.PathLike) or (isinstance(X, str) and "\n" not in X and os.path.exists(X)):
        seq = read_sequence(X)
    elif isinstance(X, str):
        seq = loads_sequence(X, n)
    elif isinstance(X, Iterable):
        graphs = [g if isinstance(g, LabeledDigraph) else graph_from_dict(g) for g in X]
        if not graphs:
            raise ValidationError("an empty list of graphs has no node count")
        seq = GraphSequence(graphs[0].n, tuple(graphs))
    else:
        raise ValidationError(f"cannot read a graph sequence from {type(X).__name__}")
    if n is not None and seq.n != n:
        raise ValidationError(f"sequence has n={seq.n}, expected n={n}")
    return seq


def check_descriptor(X, graph_class: str = "rooted-trees", leaves: Optional[int] = None) -> GraphClassDescriptor:
    """A class descriptor, or a node count combined with ``graph_class``."""
    if isinstance(X, GraphClassDescriptor):
        return X
    return describe(graph_class, check_n(X), leaves)


def parse_n_range(text: str) -> list[int]:
    """``"5"``, ``"4..16"`` or ``"2,3,7"`` (inclusive ranges, may be mixed)."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        try:
            if ".." in part:
                lo, hi = (int(x) for x in part.split(".."))
                if hi < lo:
                    raise ValidationError(f"empty range {part!r}")
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise ValidationError(f"bad n or n-range {part!r}") from None
    for n in out:
        check_n(n)
    return out
