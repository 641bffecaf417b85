"""Estimator-style wrappers around the simulator and the adversaries.

``fit`` takes the object to analyse (a graph sequence, or a node count /
class descriptor) and stores results in trailing-underscore attributes.
Hyperparameters live in ``__init__`` so ``get_params``/``set_params`` and
``sklearn.base.clone`` work as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .adversary import greedy_adversary, worst_case_time
from .dissemination import dissemination_time, node_times, run, winners
from .validation import check_descriptor, check_horizon, check_sequence


class DisseminationSimulator(TransformerMixin, BaseEstimator):
    """Simulate a graph sequence until dissemination or the horizon.

    ``transform`` simulates a sequence with the same settings and returns a
    boolean array of shape ``(rounds + 1, n, n)`` whose entry
    ``[r, p - 1, q - 1]`` says whether ``q`` has heard of ``p`` by the end
    of round ``r``.
    """

    def __init__(self, horizon=None, stop_at_termination=True):
        self.horizon = horizon
        self.stop_at_termination = stop_at_termination

    def _run(self, X):
        return run(check_sequence(X), check_horizon(self.horizon), self.stop_at_termination)

    def fit(self, X, y=None):
        self.trace_ = self._run(X)
        self.n_ = self.trace_.n
        self.dissemination_time_ = dissemination_time(self.trace_)
        self.node_times_ = node_times(self.trace_)
        self.winners_ = winners(self.trace_)
        return self

    def transform(self, X):
        check_is_fitted(self, "trace_")
        return influence_cube(self._run(X))


def influence_cube(trace) -> np.ndarray:
    n = trace.n
    out = np.zeros((len(trace.states), n, n), dtype=bool)
    for r, s in enumerate(trace.states):
        for p, m in enumerate(s.masks):
            out[r, p] = [(m >> q) & 1 for q in range(n)]
    return out


class WorstCaseSearch(BaseEstimator):
    """Exact worst-case dissemination time of a graph class."""

    def __init__(self, graph_class="rooted-trees", leaves=None, cap=None, canonicalize=False):
        self.graph_class = graph_class
        self.leaves = leaves
        self.cap = cap
        self.canonicalize = canonicalize

    def fit(self, X, y=None):
        desc = check_descriptor(X, self.graph_class, self.leaves)
        self.result_ = worst_case_time(desc, self.cap, self.canonicalize)
        self.worst_case_ = self.result_.worst_case
        self.certificate_ = self.result_.certificate
        self.explored_states_ = self.result_.explored_states
        return self

    def predict(self, X):
        """Worst-case values for a list of node counts (infinite as ``None``)."""
        params = self.get_params()
        return [WorstCaseSearch(**params).fit(n).worst_case_.value for n in X]


class GreedyAdversary(BaseEstimator):
    """Heuristic adversary; its value is a certified lower bound."""

    def __init__(self, graph_class="rooted-trees", leaves=None, heuristic="min-max-set-growth",
                 cap=None, seed=0, samples=64, restarts=8, warm_start=None):
        self.graph_class = graph_class
        self.leaves = leaves
        self.heuristic = heuristic
        self.cap = cap
        self.seed = seed
        self.samples = samples
        self.restarts = restarts
        self.warm_start = warm_start

    def fit(self, X, y=None):
        desc = check_descriptor(X, self.graph_class, self.leaves)
        warm = None if self.warm_start is None else check_sequence(self.warm_start, desc.n)
        self.result_ = greedy_adversary(
            desc, self.heuristic, self.cap, self.seed, warm, self.samples, self.restarts
        )
        self.worst_case_ = self.result_.worst_case
        self.certificate_ = self.result_.certificate
        return self
