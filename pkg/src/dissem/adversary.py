"""Worst-case dissemination time of a graph class.

The adversary picks every round's graph from the class.  The exact value is
a minimax over states::

    W(state) = 0                                  if some S_p is full
    W(state) = 1 + max_G W(step(state, G))        otherwise

The state is reduced to the antichain of its maximal distinct influence
sets: a set contained in another can never fill up first (the update is
monotone), so dropping it leaves ``W`` unchanged.  Optionally the antichain
is further canonicalized under simultaneous relabeling of all nodes, which
is sound for every class closed under relabeling.

Non-rooted classes may let the adversary cycle forever; a state that can
reach a cycle on the current search path gets value infinity.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import _rng
from .dissemination import RoundCount, dissemination_time, initial_state, pigeonhole_horizon, run, step
from .errors import ValidationError
from .graphs import (
    ClassKind,
    GraphClassDescriptor,
    GraphSequence,
    LabeledDigraph,
    count_class,
    enumerate_class,
    full_mask,
    sample_class,
)
from .graphs.io import sequence_to_lines

INF = math.inf


def nlogn_cap(n: int) -> int:
    """``sum_{i=1}^{n} ceil(n / i)``."""
    return sum(-(-n // i) for i in range(1, n + 1))


def resolve_cap(desc: GraphClassDescriptor, cap: Union[int, str, None]) -> int:
    if cap is None or cap == "pigeonhole":
        return max(pigeonhole_horizon(desc.n), 1)
    if cap == "nlogn":
        return nlogn_cap(desc.n)
    cap = int(cap)
    if cap < 1:
        raise ValidationError(f"cap must be at least 1, got {cap}")
    return cap


@dataclass
class SearchResult:
    descriptor: GraphClassDescriptor
    n: int
    worst_case: RoundCount
    certificate: GraphSequence
    explored_states: int
    wall_time: float = field(default=0.0, compare=False)
    canonicalization: bool = False
    exact: bool = True
    heuristic: Optional[str] = None

    def to_dict(self) -> dict:
        d = {
            "class": self.descriptor.to_dict(),
            "n": self.n,
            "worst_case": self.worst_case.to_json(),
            "certificate": sequence_to_lines(self.certificate),
            "explored_states": self.explored_states,
            "canonicalization": self.canonicalization,
            "exact": self.exact,
        }
        if self.heuristic is not None:
            d["heuristic"] = self.heuristic
        return d


def replay(result: SearchResult) -> RoundCount:
    """Dissemination time of the certificate, recomputed by the engine."""
    wc = result.worst_case
    horizon = wc.value if wc.is_finite else wc.horizon
    return dissemination_time(run(result.certificate, horizon))


# -- state handling ----------------------------------------------------------


def _dtype(n):
    return np.uint8 if n <= 8 else (np.uint16 if n <= 16 else np.uint32)


class _Expander:
    """Step tables for a class plus vectorized child generation."""

    def __init__(self, graphs: list[LabeledDigraph], n: int):
        self.graphs = graphs
        self.n = n
        self.full = full_mask(n)
        self.table = np.array([g.step_table() for g in graphs], dtype=_dtype(n))
        # strictly-earlier index pairs, used to drop repeated masks
        self.earlier = np.tril(np.ones((n, n), dtype=bool), k=-1)

    def reduce_rows(self, rows: np.ndarray) -> np.ndarray:
        """Zero out masks dominated by (or repeating) another mask in the row."""
        a = rows[:, :, None]
        b = rows[:, None, :]
        sub = (a & b) == a
        dominated = (sub & (a != b)).any(axis=2) | ((a == b) & self.earlier).any(axis=2)
        out = np.where(dominated, 0, rows)
        out.sort(axis=1)
        return out

    def _unique(self, rows: np.ndarray) -> np.ndarray:
        if self.n > 8:
            return np.unique(rows, axis=0)
        packed = np.zeros((len(rows), 8), dtype=np.uint8)
        packed[:, 8 - self.n:] = rows
        keys = np.unique(packed.view(">u8").ravel())
        return keys.astype(">u8").view(np.uint8).reshape(-1, 8)[:, 8 - self.n:]

    def children(self, state: tuple) -> tuple[bool, list[tuple]]:
        """Return (some graph finishes, distinct non-terminal children)."""
        rows = self.table[:, list(state)]
        finished = (rows == self.full).any(axis=1)
        rest = rows[~finished]
        if len(rest) == 0:
            return bool(finished.any()), []
        rest = self._unique(np.sort(rest, axis=1))
        rest = self._unique(self.reduce_rows(rest))
        return bool(finished.any()), [tuple(r) for r in rest.tolist()]

    def child(self, state: tuple, gi: int) -> tuple:
        row = self.table[gi, list(state)][None, :]
        return tuple(self.reduce_rows(row)[0].tolist())


def _start_state(n: int) -> tuple:
    return tuple(sorted(1 << p for p in range(n)))


class _Canonicalizer:
    """Relabeling-invariant keys for antichain states."""

    def __init__(self, n: int):
        self.n = n
        self.cache: dict = {}

    def _permute(self, mask, perm):
        out = 0
        i = 0
        while mask:
            if mask & 1:
                out |= 1 << perm[i]
            mask >>= 1
            i += 1
        return out

    def __call__(self, state: tuple) -> tuple:
        key = self.cache.get(state)
        if key is not None:
            return key
        n = self.n
        masks = [m for m in state if m]
        sizes = [bin(m).count("1") for m in masks]
        sig = [tuple(sorted(s for m, s in zip(masks, sizes) if m >> i & 1)) for i in range(n)]
        groups: dict = {}
        for i in range(n):
            groups.setdefault(sig[i], []).append(i)
        ordered = [groups[k] for k in sorted(groups)]
        best = None
        for choice in itertools.product(*(itertools.permutations(g) for g in ordered)):
            perm = [0] * n
            pos = 0
            for block in choice:
                for node in block:
                    perm[node] = pos
                    pos += 1
            cand = tuple(sorted(self._permute(m, perm) for m in state))
            if best is None or cand < best:
                best = cand
        self.cache[state] = best
        return best


class _Search:
    def __init__(self, desc: GraphClassDescriptor, canonicalize: bool):
        self.desc = desc
        self.n = desc.n
        self.graphs = list(enumerate_class(desc))
        self.exp = _Expander(self.graphs, self.n)
        self.canonicalize = canonicalize and desc.label_symmetric
        self.key = _Canonicalizer(self.n) if self.canonicalize else (lambda s: s)
        self.memo: dict = {}

    def solve(self, start: tuple):
        if self.exp.full in start:
            return 0
        root_key = self.key(start)
        if root_key in self.memo:
            return self.memo[root_key]
        on_stack = {root_key}
        stack = [self._frame(root_key, start)]
        while stack:
            frame = stack[-1]
            children = frame[2]
            if frame[3] < len(children) and frame[4] != INF:
                child = children[frame[3]]
                frame[3] += 1
                ck = self.key(child)
                v = self.memo.get(ck)
                if v is None and ck in on_stack:
                    v = INF
                if v is not None:
                    frame[4] = max(frame[4], 1 + v)
                    continue
                on_stack.add(ck)
                stack.append(self._frame(ck, child))
                continue
            key, value = frame[0], frame[4]
            self.memo[key] = value
            on_stack.discard(key)
            stack.pop()
            if stack:
                stack[-1][4] = max(stack[-1][4], 1 + value)
        return self.memo[root_key]

    def _frame(self, key, state):
        finished, children = self.exp.children(state)
        return [key, state, children, 0, 1 if finished else 0]

    def value_of(self, state: tuple):
        if self.exp.full in state:
            return 0
        return self.memo[self.key(state)]

    def certificate(self, start: tuple, value) -> GraphSequence:
        rounds = []
        state = start
        if value != INF:
            while value > 0:
                for gi in range(len(self.graphs)):
                    row = self.exp.table[gi, list(state)]
                    if (row == self.exp.full).any():
                        if value == 1:
                            rounds.append(self.graphs[gi])
                            return GraphSequence(self.n, tuple(rounds))
                        continue
                    child = self.exp.child(state, gi)
                    if self.value_of(child) == value - 1:
                        rounds.append(self.graphs[gi])
                        state = child
                        value -= 1
                        break
                else:  # pragma: no cover - memo is complete for explored states
                    raise RuntimeError("certificate reconstruction failed")
            return GraphSequence(self.n, tuple(rounds))
        seen = {state: 0}
        while True:
            for gi in range(len(self.graphs)):
                row = self.exp.table[gi, list(state)]
                if (row == self.exp.full).any():
                    continue
                child = self.exp.child(state, gi)
                # siblings after the first infinite child were never explored
                if self.memo.get(self.key(child)) == INF:
                    break
            else:  # pragma: no cover
                raise RuntimeError("certificate reconstruction failed")
            rounds.append(self.graphs[gi])
            state = child
            if state in seen:
                return GraphSequence(self.n, tuple(rounds), (seen[state] + 1, len(rounds)))
            seen[state] = len(rounds)


def worst_case_time(
    desc: GraphClassDescriptor, cap: Union[int, str, None] = None, canonicalize: bool = False
) -> SearchResult:
    """Exact worst-case dissemination time over all sequences from ``desc``.

    Returns the value with a certificate sequence achieving it (the first
    maximizing graph in enumeration order at every round).  Values above
    ``cap``, including an adversary that can prevent dissemination forever,
    are reported as infinite with ``horizon=cap``.
    """
    cap = resolve_cap(desc, cap)
    t0 = time.perf_counter()
    search = _Search(desc, canonicalize)
    start = _start_state(desc.n)
    value = search.solve(start)
    certificate = search.certificate(start, value)
    if value == INF or value > cap:
        worst = RoundCount.infinite(cap)
        if value != INF:
            certificate = certificate.prefix(cap)
    else:
        worst = RoundCount(int(value))
    return SearchResult(
        descriptor=desc,
        n=desc.n,
        worst_case=worst,
        certificate=certificate,
        explored_states=len(search.memo),
        wall_time=time.perf_counter() - t0,
        canonicalization=search.canonicalize,
    )


# -- greedy adversaries ------------------------------------------------------

HEURISTICS = ("min-max-set-growth", "min-total-growth", "random-restart")


def _candidates(desc, rng_seed, run_index, r, samples, extra):
    if count_class(desc) <= 2000:
        pool = list(enumerate_class(desc))
    else:
        rng = _rng.spawn(rng_seed, run_index, r)
        pool = [sample_class(desc, rng) for _ in range(samples)]
    return pool + [g for g in extra if g not in pool]


def _score(heuristic, state):
    sizes = state.sizes
    return (state.is_terminal, max(sizes), sum(sizes)) if heuristic == "min-max-set-growth" else (
        state.is_terminal, sum(sizes), max(sizes))


def _greedy_run(desc, heuristic, cap, seed, run_index, prefix, samples, extra):
    state = initial_state(desc.n)
    rounds = []
    for g in prefix:
        if state.is_terminal or len(rounds) >= cap:
            break
        state = step(state, g)
        rounds.append(g)
    pick_rng = _rng.spawn(seed, run_index, 10**6)
    while not state.is_terminal and len(rounds) < cap:
        pool = _candidates(desc, seed, run_index, len(rounds) + 1, samples, extra)
        if heuristic == "random-restart":
            moves = [(g, step(state, g)) for g in pool]
            alive = [mv for mv in moves if not mv[1].is_terminal] or moves
            g, state = alive[pick_rng.randrange(len(alive))]
        else:
            best = None
            for g in pool:
                nxt = step(state, g)
                score = _score(heuristic, nxt)
                if best is None or score < best[0]:
                    best = (score, g, nxt)
            _, g, state = best
        rounds.append(g)
    seq = GraphSequence(desc.n, tuple(rounds))
    value = RoundCount(len(rounds)) if state.is_terminal else RoundCount.infinite(cap)
    return value, seq


def greedy_adversary(
    desc: GraphClassDescriptor,
    heuristic: str = "min-max-set-growth",
    cap: Union[int, str, None] = None,
    seed: int = 0,
    warm_start: Optional[GraphSequence] = None,
    samples: int = 64,
    restarts: int = 8,
) -> SearchResult:
    """Heuristic adversary giving a certified lower bound on the class value.

    Every round the adversary picks, from the whole class (or a seeded random
    sample of it when the class is large), the graph that keeps influence sets
    smallest.  With ``warm_start`` the run is repeated after replaying each
    prefix of the given sequence; graphs of ``warm_start`` are also added to
    the candidate pool.  The best run wins; its value is exact for the
    returned sequence but never claimed optimal.
    """
    if heuristic not in HEURISTICS:
        raise ValidationError(f"unknown heuristic {heuristic!r}; choose from {HEURISTICS}")
    cap = resolve_cap(desc, cap)
    t0 = time.perf_counter()
    extra = []
    prefixes = [()]
    if warm_start is not None:
        if warm_start.n != desc.n:
            raise ValidationError("warm start sequence has the wrong node count")
        extra = list(dict.fromkeys(warm_start.rounds))
        prefixes = [warm_start.rounds[:k] for k in range(len(warm_start.rounds) + 1)]
    runs = restarts if heuristic == "random-restart" else 1
    best = None
    explored = 0
    index = 0
    for prefix in prefixes:
        for _ in range(runs):
            value, seq = _greedy_run(desc, heuristic, cap, seed, index, prefix, samples, extra)
            explored += len(seq)
            index += 1
            rank = INF if not value.is_finite else value.value
            if best is None or rank > best[0]:
                best = (rank, value, seq)
    _, value, seq = best
    return SearchResult(
        descriptor=desc,
        n=desc.n,
        worst_case=value,
        certificate=seq,
        explored_states=explored,
        wall_time=time.perf_counter() - t0,
        canonicalization=False,
        exact=False,
        heuristic=heuristic,
    )


# -- bound formulas ----------------------------------------------------------


def _leaves(desc):
    if desc.kind is ClassKind.ROOTED_TREES_WITH_LEAVES:
        return desc.m
    if desc.kind is ClassKind.DIRECTED_CHAINS:
        return 1
    if desc.kind is ClassKind.STAR:
        return desc.n - 1
    raise ValidationError(f"{desc.name} has no fixed leaf count")


def _k_leaves(desc):
    return (_leaves(desc) + 1) * (desc.n - 3) + 2


def _inner_nodes(desc):
    n, leaves = desc.n, _leaves(desc)
    return (n - leaves) * (n - 1) + 2 - max(n, 2 * (n - leaves))


#: name -> (formula, smallest n it is claimed for)
BOUND_FORMULAS = {
    "nlogn": (lambda d: nlogn_cap(d.n), 1),
    "pigeonhole": (lambda d: pigeonhole_horizon(d.n), 1),
    "k-leaves": (_k_leaves, 3),
    "chain": (lambda d: d.n - 1, 1),
    "inner-nodes": (_inner_nodes, 2),
    "undirected-chain": (lambda d: d.n // 2, 1),
    "star": (lambda d: 1 if d.n > 1 else 0, 1),
}


def lower_bound_value(n: int) -> int:
    """``ceil((3n - 1) / 2) - 2``."""
    return -(-(3 * n - 1) // 2) - 2


@dataclass
class BoundReport:
    descriptor: GraphClassDescriptor
    formula: str
    bound: Optional[int]
    value: RoundCount
    applicable: bool
    certificate: Optional[GraphSequence] = None

    @property
    def passed(self) -> bool:
        if not self.applicable:
            return True
        return self.value.is_finite and self.value.value <= self.bound

    @property
    def tight(self) -> bool:
        return self.applicable and self.value.is_finite and self.value.value == self.bound

    def to_dict(self) -> dict:
        d = {
            "class": self.descriptor.to_dict(),
            "formula": self.formula,
            "bound": self.bound,
            "value": self.value.to_json(),
            "applicable": self.applicable,
            "passed": self.passed,
            "tight": self.tight,
        }
        if not self.passed and self.certificate is not None:
            d["certificate"] = sequence_to_lines(self.certificate)
        return d


def bound_for(desc: GraphClassDescriptor, formula: str) -> Optional[int]:
    try:
        fn, min_n = BOUND_FORMULAS[formula]
    except KeyError:
        raise ValidationError(f"unknown bound formula {formula!r}") from None
    if desc.n < min_n:
        return None
    return fn(desc)


def verify_upper_bound(
    desc: GraphClassDescriptor, formula: str, canonicalize: bool = False, result: SearchResult = None
) -> BoundReport:
    """Compare the exact class value with a closed-form upper bound."""
    bound = bound_for(desc, formula)
    if result is None:
        result = worst_case_time(desc, canonicalize=canonicalize)
    return BoundReport(
        descriptor=desc,
        formula=formula,
        bound=bound,
        value=result.worst_case,
        applicable=bound is not None,
        certificate=result.certificate,
    )
