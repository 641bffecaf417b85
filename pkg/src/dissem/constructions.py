"""Explicit sequences and closed forms for rooted trees and chains.

* The three-phase rooted-tree sequence that keeps every influence set
  short of Π until round ``ceil((3n-1)/2) - 2``, its piecewise closed form
  for ``S_i(r)``, and a checker that compares both against the engine.
* Collection witnesses for chain sequences: a family of influence sets whose
  unions grow by at least one per added member, built greedily round by
  round (directed chains: ``n - r`` sets of size ``>= r + 1``; undirected
  chains: ``n - 2r`` sets of size ``>= 2r + 1``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .dissemination import SimulationTrace, run
from .errors import ValidationError
from .graphs import GraphSequence, LabeledDigraph, classify, full_mask, make_graph, nodes_of

CONVENTIONS = ("floor", "trunc")
READINGS = ("printed", "continued")


def _ceil_half(x: int) -> int:
    return -(-x // 2)


def lower_bound_length(n: int) -> int:
    return _ceil_half(3 * n - 1) - 2


@dataclass(frozen=True)
class LowerBoundSequence:
    n: int
    g1: LabeledDigraph
    g2: LabeledDigraph
    g3: LabeledDigraph
    phases: tuple  # ((first, last), ...) per graph, 1-based inclusive

    @property
    def length(self) -> int:
        return self.phases[2][1]

    def graph_at(self, r: int) -> LabeledDigraph:
        for g, (lo, hi) in zip((self.g1, self.g2, self.g3), self.phases):
            if lo <= r <= hi:
                return g
        raise ValidationError(f"round {r} outside 1..{self.length}")

    def to_sequence(self) -> GraphSequence:
        """Explicit rounds, with the last graph repeating afterwards."""
        rounds = tuple(self.graph_at(r) for r in range(1, self.length + 1))
        return GraphSequence(self.n, rounds, (self.length, self.length))


def lower_bound_sequence(n: int) -> LowerBoundSequence:
    """Chain from 1; then a two-armed tree rooted at n; then a chain from floor(n/2).

    The last graph is the directed path ``h, h+1, ..., n, 1, ..., h-1`` with
    ``h = floor(n/2)``.
    """
    if n < 4:
        raise ValidationError(f"the construction needs n >= 4, got {n}")
    h = n // 2
    a = (n - 1) // 2
    g1 = make_graph(n, [(i, i + 1) for i in range(1, n)])
    g2 = make_graph(
        n,
        [(n, 1), (n, n - 1)]
        + [(i, i + 1) for i in range(1, h)]
        + [(i, i - 1) for i in range(n - 1, h + 1, -1)],
    )
    g3 = make_graph(n, [(i, i + 1) for i in range(h, n)] + [(i, i + 1) for i in range(1, h - 1)] + [(n, 1)])
    phases = ((1, a), (a + 1, n - 2), (n - 1, lower_bound_length(n)))
    return LowerBoundSequence(n, g1, g2, g3, phases)


def _span(lo: int, hi: int) -> set:
    return set(range(lo, hi + 1))


def _wrap(lo: int, n: int, hi: int) -> set:
    """``{lo, ..., n, 1, ..., hi}``; an empty tail when ``hi < 1``."""
    return set(range(lo, n + 1)) | set(range(1, hi + 1))


def _half_floor(x: int, convention: str) -> int:
    if convention == "floor":
        return x // 2
    if convention == "trunc":
        return -((-x) // 2) if x < 0 else x // 2
    raise ValidationError(f"unknown rounding convention {convention!r}")


def closed_form_influence(n: int, i: int, r: int, convention: str = "floor", reading: str = "printed") -> frozenset:
    """Piecewise closed form of ``S_i(r)`` along the lower-bound sequence.

    ``convention`` fixes how ``floor((-n-1)/2)`` is evaluated.  ``reading``
    selects the tail of the last phase-3 case: ``"printed"`` uses
    ``{i, ..., n, 1, ..., r-(n-2)}``; ``"continued"`` wraps the neighbouring
    case's upper end ``floor((n-1)/2) + i + r - (n-2)`` around modulo n.
    """
    if n < 4:
        raise ValidationError(f"the construction needs n >= 4, got {n}")
    if not 1 <= i <= n:
        raise ValidationError(f"node {i} outside 1..{n}")
    end = lower_bound_length(n)
    if not 0 <= r <= end:
        raise ValidationError(f"round {r} outside 0..{end}")
    if reading not in READINGS:
        raise ValidationError(f"unknown reading {reading!r}")
    if convention not in CONVENTIONS:
        raise ValidationError(f"unknown rounding convention {convention!r}")
    a = (n - 1) // 2
    h = n // 2
    upper_half = 2 * i > n
    if r == 0:
        out = {i}
    elif r <= a:
        out = _span(i, min(r + i, n))
    elif r <= n - 2:
        if not upper_half:
            out = _span(i, a + i)
        else:
            out = _wrap(max(h + 1, i - (r - a)), n, r - a)
    elif upper_half:
        lo = max(h + 1, i + 2 + _half_floor(-n - 1, convention))
        out = _wrap(lo, n, _ceil_half(n + 1) - 2)
    elif i <= _ceil_half(3 * n + 1) - 2 - r:
        out = _span(i, a + i + r - (n - 2))
    elif reading == "printed":
        out = _wrap(i, n, r - (n - 2))
    else:
        out = _wrap(i, n, a + i + r - (n - 2) - n)
    return frozenset(out)


@dataclass
class LowerBoundReport:
    n: int
    expected: int
    simulated: Optional[int]
    premature_round: Optional[int]
    mismatches: dict = field(default_factory=dict)  # (convention, reading) -> [(i, r), ...]

    @property
    def time_ok(self) -> bool:
        return self.simulated == self.expected

    @property
    def no_premature(self) -> bool:
        return self.premature_round is None

    def matching(self, reading: str = "printed") -> list[str]:
        """Conventions under which the given reading agrees everywhere."""
        return [c for c in CONVENTIONS if not self.mismatches[(c, reading)]]

    @property
    def convention(self) -> Optional[str]:
        """Convention under which the printed formulas match, if any."""
        ok = self.matching("printed")
        return ok[0] if ok else None

    @property
    def formulas_ok(self) -> bool:
        return self.convention is not None

    def first_mismatch(self, convention: str = "floor", reading: str = "printed"):
        found = self.mismatches[(convention, reading)]
        return found[0] if found else None

    @property
    def passed(self) -> bool:
        return self.time_ok and self.no_premature and self.formulas_ok

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "expected": self.expected,
            "simulated": self.simulated,
            "premature_round": self.premature_round,
            "convention": self.convention,
            "matching": {reading: self.matching(reading) for reading in READINGS},
            "first_mismatch": {
                f"{c}/{rd}": (list(self.mismatches[(c, rd)][0]) if self.mismatches[(c, rd)] else None)
                for c in CONVENTIONS
                for rd in READINGS
            },
            "mismatch_counts": {f"{c}/{rd}": len(v) for (c, rd), v in self.mismatches.items()},
            "passed": self.passed,
        }


def verify_lower_bound(n: int) -> LowerBoundReport:
    """Simulate the construction and compare with the claimed time and closed form."""
    lb = lower_bound_sequence(n)
    end = lb.length
    trace = run(lb.to_sequence(), horizon=end)
    full = full_mask(n)
    premature = next(
        (r for r, s in enumerate(trace.states) if r < end and full in s.masks), None
    )
    mismatches = {}
    for conv in CONVENTIONS:
        for reading in READINGS:
            bad = []
            for r, s in enumerate(trace.states):
                for i in range(1, n + 1):
                    got = frozenset(nodes_of(s.masks[i - 1]))
                    if closed_form_influence(n, i, r, conv, reading) != got:
                        bad.append((i, r))
            mismatches[(conv, reading)] = bad
    return LowerBoundReport(n, end, trace.termination_round, premature, mismatches)


# -- collection witnesses ----------------------------------------------------


class WitnessError(ValidationError):
    def __init__(self, message, round):
        self.round = round
        super().__init__(f"round {round}: {message}")


@dataclass(frozen=True)
class CollectionWitness:
    round: int
    members: tuple
    sets: dict = field(compare=False, hash=False)
    min_size: int = 1
    slack: int = 0  # union of k members must have >= slack + k nodes

    def union_ok(self) -> bool:
        """Brute-force check of the union inequality over all member subsets."""
        masks = [self.sets[p] for p in self.members]
        k = len(masks)
        unions = [0] * (1 << k)
        for sub in range(1, 1 << k):
            low = sub & -sub
            unions[sub] = unions[sub ^ low] | masks[low.bit_length() - 1]
            if bin(unions[sub]).count("1") < self.slack + bin(sub).count("1"):
                return False
        return True

    def sizes_ok(self) -> bool:
        return all(bin(self.sets[p]).count("1") >= self.min_size for p in self.members)

    @property
    def valid(self) -> bool:
        return len(set(self.members)) == len(self.members) and self.sizes_ok() and self.union_ok()

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "members": list(self.members),
            "sets": {str(p): nodes_of(self.sets[p]) for p in self.members},
            "min_size": self.min_size,
            "inequality": f"|union of k members| >= {self.slack} + k",
        }


def _admits(unions, cand, need):
    """Would adding ``cand`` keep ``|union| >= need + |I|`` for all subsets?

    ``unions[s]`` holds the union over subset ``s`` of the admitted masks;
    only subsets that include the candidate need checking.
    """
    for sub, u in enumerate(unions):
        if bin(u | cand).count("1") < need + bin(sub).count("1") + 1:
            return False
    return True


def _grow_collection(trace, rounds, target, min_size, slack, direction_check):
    n = trace.n
    members = list(range(1, n + 1))
    out = [
        CollectionWitness(0, tuple(members), {p: trace.states[0].masks[p - 1] for p in members}, 1, 0)
    ]
    for r in range(1, rounds + 1):
        if r > trace.last_round:
            break
        direction_check(trace.graph(r), r)
        masks = trace.states[r].masks
        admitted = []
        unions = [0]
        for p in members:
            m = masks[p - 1]
            if bin(m).count("1") < min_size(r):
                continue
            if not _admits(unions, m, slack(r)):
                continue
            admitted.append(p)
            unions = unions + [u | m for u in unions]
        want = target(r)
        if len(admitted) < want:
            raise WitnessError(f"only {len(admitted)} of {want} sets admitted", r)
        members = admitted[:want]
        out.append(CollectionWitness(r, tuple(members), {p: masks[p - 1] for p in members}, min_size(r), slack(r)))
    return out


def _require_chain(g, r):
    if not classify(g).is_directed_chain:
        raise ValidationError(f"round {r} is not a directed chain")


def _require_undirected_chain(g, r):
    if not classify(g).is_undirected_chain:
        raise ValidationError(f"round {r} is not an undirected chain")


def chain_collection_invariant(trace: SimulationTrace) -> list[CollectionWitness]:
    """Witnesses for rounds ``0..n-1`` of a directed-chain trace.

    Round ``r`` keeps ``n - r`` influence sets of size ``>= r + 1`` such that
    any ``k`` of them cover at least ``r + k`` nodes.  Sets carry over from
    the previous round in ascending index order and are admitted while both
    conditions stay true.
    """
    n = trace.n
    return _grow_collection(
        trace,
        rounds=n - 1,
        target=lambda r: n - r,
        min_size=lambda r: r + 1,
        slack=lambda r: r,
        direction_check=_require_chain,
    )


def undirected_chain_invariant(trace: SimulationTrace) -> list[CollectionWitness]:
    """Witnesses for rounds ``0..floor((n-1)/2)`` of an undirected-chain trace:
    ``n - 2r`` sets of size ``>= 2r + 1`` with any ``k`` covering ``>= 2r + k``."""
    n = trace.n
    return _grow_collection(
        trace,
        rounds=(n - 1) // 2,
        target=lambda r: n - 2 * r,
        min_size=lambda r: 2 * r + 1,
        slack=lambda r: 2 * r,
        direction_check=_require_undirected_chain,
    )


def full_trace(seq: GraphSequence, rounds: int) -> SimulationTrace:
    """Simulate exactly ``rounds`` rounds, ignoring early termination."""
    return run(seq, rounds, stop_at_termination=False)
