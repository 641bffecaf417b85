"""Round engine for full-information dissemination.

The primary state is the vector of influence sets ``S_p(r)`` (who has heard
of ``p`` by the end of round ``r``).  Knowledge sets ``K_q(r)`` (whom ``q``
has heard of) are the transposed view: ``q in S_p  <=>  p in K_q``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from .errors import ValidationError
from .graphs import GraphSequence, LabeledDigraph, classify, full_mask, mask_of, nodes_of


def pigeonhole_horizon(n: int) -> int:
    """Rounds after which a rooted-tree sequence must have disseminated."""
    return n * (n - 2) + 1 if n > 1 else 0


def transpose(masks: Sequence[int], n: int) -> tuple[int, ...]:
    """Swap the roles of set index and set member."""
    out = [0] * n
    for p, m in enumerate(masks):
        bit = 1 << p
        q = 0
        while m:
            if m & 1:
                out[q] |= bit
            m >>= 1
            q += 1
    return tuple(out)


@dataclass(frozen=True)
class InfluenceState:
    n: int
    masks: tuple
    round: int = 0

    def __post_init__(self):
        if len(self.masks) != self.n:
            raise ValidationError(f"expected {self.n} influence sets, got {len(self.masks)}")
        for p, m in enumerate(self.masks):
            if not (m >> p) & 1:
                raise ValidationError(f"influence set of {p + 1} does not contain {p + 1}")

    @classmethod
    def from_sets(cls, sets, round: int = 0) -> "InfluenceState":
        sets = list(sets)
        return cls(len(sets), tuple(mask_of(s) for s in sets), round)

    def influence(self, p: int) -> frozenset:
        return frozenset(nodes_of(self.masks[p - 1]))

    @property
    def sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(nodes_of(m)) for m in self.masks)

    @cached_property
    def knowledge_masks(self) -> tuple[int, ...]:
        return transpose(self.masks, self.n)

    def knowledge(self, q: int) -> frozenset:
        return frozenset(nodes_of(self.knowledge_masks[q - 1]))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(bin(m).count("1") for m in self.masks)

    @property
    def mass(self) -> int:
        return sum(self.sizes)

    @property
    def winners(self) -> frozenset:
        """Nodes known to everyone, i.e. ``p`` with ``S_p = Π``."""
        full = full_mask(self.n)
        return frozenset(p for p, m in enumerate(self.masks, 1) if m == full)

    @property
    def is_terminal(self) -> bool:
        return full_mask(self.n) in self.masks


def initial_state(n: int) -> InfluenceState:
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    return InfluenceState(n, tuple(1 << p for p in range(n)), 0)


def step(s: InfluenceState, g: LabeledDigraph) -> InfluenceState:
    """Apply one round: every informed node informs its out-neighbours."""
    if s.n != g.n:
        raise ValidationError(f"state has n={s.n} but graph has n={g.n}")
    return InfluenceState(s.n, tuple(g.advance(m) for m in s.masks), s.round + 1)


def knowledge_step(knowledge: Sequence[int], g: LabeledDigraph) -> tuple[int, ...]:
    """Update knowledge sets directly: ``K_p |= K_q`` for every edge ``q -> p``."""
    out = list(knowledge)
    for q, p in g.edges:
        out[p - 1] |= knowledge[q - 1]
    return tuple(out)


@dataclass(frozen=True)
class RoundCount:
    """A dissemination time, or the fact that none occurred by ``horizon``."""

    value: Optional[int]
    horizon: Optional[int] = None

    @classmethod
    def infinite(cls, horizon: int) -> "RoundCount":
        return cls(None, horizon)

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    def __str__(self):
        if self.is_finite:
            return str(self.value)
        return f">= {self.horizon + 1}"

    def to_json(self):
        if self.is_finite:
            return self.value
        return {"infinite": True, "horizon": self.horizon}

    @classmethod
    def from_json(cls, obj) -> "RoundCount":
        if isinstance(obj, int):
            return cls(obj)
        return cls.infinite(obj["horizon"])


@dataclass(frozen=True)
class SimulationTrace:
    sequence: GraphSequence
    states: tuple
    termination_round: Optional[int]
    horizon: int

    @property
    def n(self) -> int:
        return self.sequence.n

    @property
    def last_round(self) -> int:
        return len(self.states) - 1

    def graph(self, r: int) -> LabeledDigraph:
        """The graph applied in round ``r`` (``r >= 1``)."""
        return self.sequence.graph_at(r)


def default_horizon(seq: GraphSequence) -> int:
    graphs = set(seq.rounds)
    if all(classify(g).is_rooted_tree for g in graphs):
        return pigeonhole_horizon(seq.n)
    raise ValidationError(
        "sequence contains graphs that are not rooted trees; an explicit horizon is required"
    )


def run(seq: GraphSequence, horizon: Optional[int] = None, stop_at_termination: bool = True) -> SimulationTrace:
    """Simulate until some influence set is full or ``horizon`` rounds pass.

    Without a horizon, sequences made only of rooted trees use the
    pigeonhole bound ``n(n-2)+1``, which they can never exceed.  With
    ``stop_at_termination=False`` all ``horizon`` rounds are simulated.
    """
    if horizon is None:
        horizon = default_horizon(seq)
    if horizon < 0:
        raise ValidationError(f"horizon must be non-negative, got {horizon}")
    state = initial_state(seq.n)
    states = [state]
    termination = 0 if state.is_terminal else None
    r = 0
    while r < horizon and (termination is None or not stop_at_termination):
        r += 1
        state = step(state, seq.graph_at(r))
        states.append(state)
        if termination is None and state.is_terminal:
            termination = r
    return SimulationTrace(seq, tuple(states), termination, horizon)


def dissemination_time(trace: SimulationTrace) -> RoundCount:
    """First round at which some influence set equals Π."""
    if trace.termination_round is not None:
        return RoundCount(trace.termination_round)
    return RoundCount.infinite(trace.horizon)


def dissemination_time_by_knowledge(trace: SimulationTrace) -> RoundCount:
    """First round at which all knowledge sets share a common node.

    Computed from the knowledge view only, as a cross-check of
    :func:`dissemination_time`.
    """
    full = full_mask(trace.n)
    for r, s in enumerate(trace.states):
        common = full
        for k in s.knowledge_masks:
            common &= k
        if common:
            return RoundCount(r)
    return RoundCount.infinite(trace.horizon)


def dissemination_time_of_node(trace: SimulationTrace, p: int) -> RoundCount:
    """First round at which ``p`` is known to every node."""
    if not 1 <= p <= trace.n:
        raise ValidationError(f"node {p} outside 1..{trace.n}")
    full = full_mask(trace.n)
    for r, s in enumerate(trace.states):
        if s.masks[p - 1] == full:
            return RoundCount(r)
    return RoundCount.infinite(trace.last_round)


def node_times(trace: SimulationTrace) -> dict[int, RoundCount]:
    return {p: dissemination_time_of_node(trace, p) for p in range(1, trace.n + 1)}


def winners(trace: SimulationTrace) -> frozenset:
    return trace.states[-1].winners


def simulate(seq: GraphSequence, horizon: Optional[int] = None) -> RoundCount:
    return dissemination_time(run(seq, horizon))


def trace_to_dict(trace: SimulationTrace) -> dict:
    return {
        "n": trace.n,
        "horizon": trace.horizon,
        "dissemination_time": dissemination_time(trace).to_json(),
        "rounds": [
            {"round": r, "influence": [nodes_of(m) for m in s.masks]}
            for r, s in enumerate(trace.states)
        ],
    }


def trace_to_csv(trace: SimulationTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["round", "max_set_size", "intersection_size"])
    for r, s in enumerate(trace.states):
        w.writerow([r, max(s.sizes), len(s.winners)])
    return buf.getvalue()
