"""Coverings of Π by influence sets, strictness, unique nodes, reduction.

A covering selects an index set ``I`` of nodes and looks at their influence
sets at some view time ``r``; it is a covering when those sets jointly
contain every node.  It is strict when no member can be dropped, which is
the same as every member owning a unique node (a node no other member has).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .dissemination import InfluenceState, SimulationTrace
from .errors import ValidationError
from .graphs import classify, full_mask, mask_of, nodes_of


def _popcount(m: int) -> int:
    return bin(m).count("1")


def _as_mask(s) -> int:
    return s if isinstance(s, int) else mask_of(s)


def is_covering(sets: Iterable, n: int) -> bool:
    union = 0
    for s in sets:
        union |= _as_mask(s)
    return union == full_mask(n)


def _unique_masks(masks: dict[int, int]) -> dict[int, int]:
    once = 0
    twice = 0
    for m in masks.values():
        twice |= once & m
        once |= m
    solo = once & ~twice
    return {p: m & solo for p, m in masks.items()}


@dataclass(frozen=True)
class Covering:
    """Influence sets ``{S_p(r) : p in index_set}`` that jointly cover Π.

    ``t`` is when the index set was formed, ``r`` the view time.
    """

    n: int
    index_set: frozenset
    t: int
    r: int
    masks: dict = field(compare=False, hash=False)

    def __post_init__(self):
        if not self.index_set:
            raise ValidationError("a covering needs a nonempty index set")
        if self.r < self.t:
            raise ValidationError(f"view time {self.r} precedes formation time {self.t}")
        if set(self.masks) != set(self.index_set):
            raise ValidationError("masks must be given for exactly the index set")
        if not is_covering(self.masks.values(), self.n):
            raise ValidationError(f"index set {sorted(self.index_set)} does not cover at r={self.r}")

    @property
    def size(self) -> int:
        return len(self.index_set)

    @property
    def sets(self) -> dict[int, frozenset]:
        return {p: frozenset(nodes_of(m)) for p, m in sorted(self.masks.items())}

    def view(self, state: InfluenceState) -> "Covering":
        """Same index set, influence sets re-read at ``state.round``."""
        return covering_at(state, self.index_set, t=self.t)

    def without(self, p: int) -> "Covering":
        masks = {q: m for q, m in self.masks.items() if q != p}
        return Covering(self.n, self.index_set - {p}, self.t, self.r, masks)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "r": self.r,
            "index_set": sorted(self.index_set),
            "sets": {str(p): sorted(s) for p, s in self.sets.items()},
        }


@dataclass(frozen=True)
class StrictCovering(Covering):
    #: ``(removed member, unique nodes gained, size of removed set)`` per step
    removals: tuple = field(default=(), compare=False)

    def __post_init__(self):
        super().__post_init__()
        if not is_strict(self):
            raise ValidationError("covering is not strict")

    @property
    def unique_nodes(self) -> dict[int, frozenset]:
        return unique_nodes(self)


def covering_at(state: InfluenceState, index_set: Iterable[int], t: Optional[int] = None) -> Covering:
    index_set = frozenset(index_set)
    for p in index_set:
        if not 1 <= p <= state.n:
            raise ValidationError(f"index {p} outside 1..{state.n}")
    masks = {p: state.masks[p - 1] for p in index_set}
    return Covering(state.n, index_set, state.round if t is None else t, state.round, masks)


def unique_nodes(c: Covering) -> dict[int, frozenset]:
    return {p: frozenset(nodes_of(m)) for p, m in sorted(_unique_masks(c.masks).items())}


def is_strict(c: Covering) -> bool:
    return all(_unique_masks(c.masks).values())


def is_strict_by_removal(c: Covering) -> bool:
    """Strictness straight from the definition: no member is redundant."""
    for p in c.index_set:
        rest = [m for q, m in c.masks.items() if q != p]
        if is_covering(rest, c.n):
            return False
    return True


def reduce_to_strict(c: Covering) -> StrictCovering:
    """Drop members without unique nodes, smallest index first, until strict."""
    masks = dict(c.masks)
    removals = []
    while True:
        uniq = _unique_masks(masks)
        bare = [p for p in sorted(masks) if not uniq[p]]
        if not bare:
            break
        p = bare[0]
        before = sum(_popcount(u) for u in uniq.values())
        removed = masks.pop(p)
        after = sum(_popcount(u) for u in _unique_masks(masks).values())
        removals.append((p, after - before, _popcount(removed)))
    return StrictCovering(c.n, frozenset(masks), c.t, c.r, masks, tuple(removals))


@dataclass(frozen=True)
class CoveringSequence:
    """Coverings at consecutive view times with shrinking index sets."""

    coverings: tuple

    def __post_init__(self):
        object.__setattr__(self, "coverings", tuple(self.coverings))
        for a, b in zip(self.coverings, self.coverings[1:]):
            if b.r != a.r + 1:
                raise ValidationError(f"covering at r={a.r} is followed by one at r={b.r}")
            if not b.index_set <= a.index_set:
                raise ValidationError(f"index set grows between r={a.r} and r={b.r}")

    @property
    def start(self) -> int:
        return self.coverings[0].r if self.coverings else 0

    def __len__(self):
        return len(self.coverings)

    def __iter__(self):
        return iter(self.coverings)


def strict_covering_sequence(
    trace: SimulationTrace, index_set: Optional[Iterable[int]] = None, start: int = 0
) -> CoveringSequence:
    """Reduce-as-you-go schedule: at every round view the previous index set
    and reduce it to a strict covering."""
    if index_set is None:
        index_set = range(1, trace.n + 1)
    current = reduce_to_strict(covering_at(trace.states[start], index_set))
    out = [current]
    for r in range(start + 1, len(trace.states)):
        current = reduce_to_strict(covering_at(trace.states[r], current.index_set, t=r))
        out.append(current)
    return CoveringSequence(tuple(out))


def random_covering_sequence(trace: SimulationTrace, rng: random.Random, start: int = 0) -> CoveringSequence:
    """A covering sequence with randomly chosen index sets.

    The starting index set is a random covering superset of a random strict
    covering; afterwards each round randomly keeps the index set, drops a
    random redundant member, or reduces fully.
    """
    state = trace.states[start]
    n = trace.n
    members = list(range(1, n + 1))
    rng.shuffle(members)
    masks = {}
    for p in members:
        masks[p] = state.masks[p - 1]
    # drop redundant members in a random order
    order = list(masks)
    rng.shuffle(order)
    for p in order:
        rest = [m for q, m in masks.items() if q != p]
        if is_covering(rest, n) and rng.random() < 0.7:
            del masks[p]
    current = covering_at(state, masks, t=start)
    out = [current]
    for r in range(start + 1, len(trace.states)):
        viewed = covering_at(trace.states[r], current.index_set, t=current.t)
        action = rng.random()
        if action < 0.4:
            current = viewed
        elif action < 0.7:
            redundant = [p for p in sorted(viewed.index_set) if viewed.size > 1 and is_covering(
                [m for q, m in viewed.masks.items() if q != p], n)]
            current = viewed.without(rng.choice(redundant)) if redundant else viewed
        else:
            current = reduce_to_strict(viewed)
        out.append(current)
    return CoveringSequence(tuple(out))


@dataclass
class PropertyCheck:
    round: int
    prop: str
    passed: bool
    member: Optional[int] = None
    detail: str = ""

    def to_dict(self) -> dict:
        d = {"round": self.round, "property": self.prop, "passed": self.passed}
        if not self.passed:
            d["member"] = self.member
            d["detail"] = self.detail
        return d


@dataclass
class PropertyReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def add(self, r, prop, passed, member=None, detail=""):
        self.checks.append(PropertyCheck(r, prop, bool(passed), member, detail))

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.checks:
            out[c.prop] = out.get(c.prop, 0) + 1
        return out

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def _check_predecessor_covering(trace: SimulationTrace, report: PropertyReport) -> None:
    n = trace.n
    if n < 2 or trace.last_round < 1:
        return
    g1 = trace.graph(1)
    inner = [p for p in range(1, n + 1) if g1.out_masks[p - 1]]
    for t in (1, 2):
        if t > trace.last_round:
            break
        masks = [trace.states[t].masks[p - 1] for p in inner]
        ok = is_covering(masks, n) and all(_popcount(m) >= 2 for m in masks)
        report.add(t, "vi", ok, detail="" if ok else "non-leaf influence sets fail to cover with size >= 2")


def check_lemma2(trace: SimulationTrace, cs: CoveringSequence) -> PropertyReport:
    """Check the covering properties round by round along ``cs``.

    ``cs.coverings[j]`` must be viewed at round ``cs.start + j`` of ``trace``
    and every round of the trace must be a rooted tree.
    """
    report = PropertyReport()
    n = trace.n
    for j, c in enumerate(cs):
        r = cs.start + j
        if c.r != r or r > trace.last_round:
            raise ValidationError(f"covering {j} is viewed at r={c.r}, expected r={r} within the trace")
        if c.masks != {p: trace.states[r].masks[p - 1] for p in c.index_set}:
            raise ValidationError(f"covering at r={r} does not match the trace's influence sets")

    for r in range(1, trace.last_round + 1):
        if not classify(trace.graph(r)).is_rooted_tree:
            raise ValidationError(f"round {r} of the trace is not a rooted tree")

    _check_predecessor_covering(trace, report)

    for c in cs:
        r = c.r
        strict = is_strict(c)
        report.add(r, "i", strict == is_strict_by_removal(c))
        if strict and c.size == 1:
            (only,) = c.masks.values()
            report.add(r, "v", only == full_mask(n), member=next(iter(c.index_set)))
        if r >= trace.last_round:
            continue
        nxt_state = trace.states[r + 1]
        g = trace.graph(r + 1)
        rep = classify(g)
        after = c.view(nxt_state)

        if not trace.states[r].is_terminal:
            grew = [p for p in c.index_set if after.masks[p] != c.masks[p]]
            report.add(r + 1, "vii", bool(grew), detail="" if grew else "no member grew")

        red = reduce_to_strict(after)
        ok = is_strict(red) and red.index_set <= after.index_set and all(
            gain <= size for _, gain, size in red.removals
        )
        bad = next((p for p, gain, size in red.removals if gain > size), None)
        report.add(r + 1, "iii", ok, member=bad)

        if not strict:
            continue
        before_u = _unique_masks(c.masks)
        after_u = _unique_masks(after.masks)
        root_bit = 1 << (rep.root - 1)
        keepers = [p for p in sorted(c.index_set) if before_u[p] & ~after_u[p] == 0]
        exempt_ok = len(keepers) <= 1 and all(c.masks[p] & root_bit for p in keepers)
        report.add(
            r + 1,
            "ii",
            exempt_ok,
            member=keepers[0] if keepers and not exempt_ok else None,
            detail="" if exempt_ok else f"members {keepers} kept all unique nodes",
        )
        stalled = [p for p in sorted(c.index_set) if after.masks[p] == c.masks[p]]
        ok = len(stalled) <= rep.leaf_count
        report.add(
            r + 1,
            "iv",
            ok,
            member=stalled[0] if not ok else None,
            detail="" if ok else f"{len(stalled)} members stalled, graph has {rep.leaf_count} leaves",
        )
    return report
