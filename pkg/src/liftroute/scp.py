"""Stacker crane tours by matching deliveries to pickups and splicing the cycles.

Each macro-request ``a`` is a loaded arc from ``origins[a]`` to
``destinations[a]``. A matching ``perm`` sends the vehicle empty from
``destinations[a]`` to ``origins[perm[a]]``; the cycles of ``perm`` are then
merged into a single tour.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .core import fsum, row_norms

MATCH_THRESHOLD = 2000


def _cost_matrix(deliveries, pickups) -> np.ndarray:
    t = np.atleast_2d(np.asarray(deliveries, dtype=np.float64))
    s = np.atleast_2d(np.asarray(pickups, dtype=np.float64))
    if t.shape != s.shape:
        raise ValueError(f"deliveries {t.shape} and pickups {s.shape} must have equal shape")
    if len(t) == 0:
        raise ValueError("nothing to match")
    return cdist(t, s)


def bipartite_match(deliveries, pickups, cost: np.ndarray | None = None) -> np.ndarray:
    """Minimum-cost perfect matching; ``perm[a]`` is the pickup assigned to delivery ``a``."""
    if cost is None:
        cost = _cost_matrix(deliveries, pickups)
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(len(rows), dtype=np.intp)
    perm[rows] = cols
    return perm


def greedy_match(deliveries, pickups, cost: np.ndarray | None = None) -> np.ndarray:
    """Deliveries in index order each take the nearest unmatched pickup (lowest index on ties)."""
    if cost is None:
        cost = _cost_matrix(deliveries, pickups)
    k = len(cost)
    taken = np.zeros(k, dtype=bool)
    perm = np.empty(k, dtype=np.intp)
    for a in range(k):
        j = int(np.argmin(np.where(taken, np.inf, cost[a])))
        perm[a] = j
        taken[j] = True
    return perm


def matching_cost(deliveries, pickups, perm) -> float:
    t = np.atleast_2d(np.asarray(deliveries, dtype=np.float64))
    s = np.atleast_2d(np.asarray(pickups, dtype=np.float64))
    return fsum(row_norms(t - s[np.asarray(perm)]))


def cycle_labels(perm) -> np.ndarray:
    perm = np.asarray(perm)
    labels = np.full(len(perm), -1, dtype=np.intp)
    for start in range(len(perm)):
        if labels[start] >= 0:
            continue
        j = start
        while labels[j] < 0:
            labels[j] = start
            j = perm[j]
    return labels


@dataclass(frozen=True, eq=False)
class ScpSolution:
    order: np.ndarray  # cyclic order of macro-requests
    origins: np.ndarray
    destinations: np.ndarray
    s0_lengths: np.ndarray  # entry j: empty edge from destinations[order[j]] to origins[order[j+1]]
    matching_cost: float
    merges: int = 0
    greedy: bool = False

    @property
    def k(self) -> int:
        return len(self.order)

    @property
    def s0_length(self) -> float:
        return fsum(self.s0_lengths)

    @property
    def s0_edges(self) -> list[tuple[np.ndarray, np.ndarray]]:
        nxt = np.roll(self.order, -1)
        return [(self.destinations[a], self.origins[b]) for a, b in zip(self.order.tolist(), nxt.tolist())]

    def successor(self) -> np.ndarray:
        succ = np.empty(self.k, dtype=np.intp)
        succ[self.order] = np.roll(self.order, -1)
        return succ


def splice(origins, destinations, perm, cost: np.ndarray | None = None) -> ScpSolution:
    """Merge the cycles of ``perm`` by repeated cheapest exchange of two empty edges.

    Exchanging the empty edges leaving ``a`` and ``b`` (different cycles)
    rewires them to each other's targets, which joins the two cycles. Ties go
    to the lexicographically smallest ``(a, b)``. ``cost`` may carry the
    precomputed delivery-to-pickup distance matrix.
    """
    s = np.atleast_2d(np.asarray(origins, dtype=np.float64))
    t = np.atleast_2d(np.asarray(destinations, dtype=np.float64))
    perm = np.array(perm, dtype=np.intp)
    k = len(perm)
    if s.shape != t.shape or len(s) != k:
        raise ValueError("origins, destinations and matching must agree in length")
    if not np.array_equal(np.sort(perm), np.arange(k)):
        raise ValueError("matching is not a permutation")
    match_cost = matching_cost(t, s, perm)
    labels = cycle_labels(perm)
    merges = 0
    n_cycles = len(np.unique(labels))
    if n_cycles > 1:
        if cost is None:
            cost = cdist(t, s)
        w = cost[np.arange(k), perm]
        cross = cost[:, perm]  # cross[a, b]: a's delivery to b's current pickup
        delta = cross + cross.T - w[:, None] - w[None, :]
        # only pairs a < b from different cycles are candidates
        delta[np.tril_indices(k)] = np.inf
        delta[labels[:, None] == labels[None, :]] = np.inf
        members = {lab: np.flatnonzero(labels == lab) for lab in np.unique(labels).tolist()}
        while n_cycles > 1:
            a, b = np.unravel_index(int(np.argmin(delta)), delta.shape)
            perm[a], perm[b] = perm[b], perm[a]
            la, lb = int(labels[a]), int(labels[b])
            ma, mb = members.pop(la), members.pop(lb)
            delta[np.ix_(ma, mb)] = np.inf
            delta[np.ix_(mb, ma)] = np.inf
            merged = np.concatenate([ma, mb])
            labels[mb] = la
            members[la] = merged
            n_cycles -= 1
            merges += 1
            for x in (a, b):
                w[x] = cost[x, perm[x]]
            for x in (a, b):
                # row x: x's edge against every other edge; column x likewise
                row = cost[x, perm] + cost[:, perm[x]] - w[x] - w
                row[labels == labels[x]] = np.inf
                left = np.arange(k) < x
                delta[x, ~left] = row[~left]
                delta[left, x] = row[left]
                delta[x, x] = np.inf
    order = np.empty(k, dtype=np.intp)
    j = 0
    for idx in range(k):
        order[idx] = j
        j = perm[j]
    nxt = np.roll(order, -1)
    s0 = row_norms(t[order] - s[nxt])
    return ScpSolution(order, s, t, s0, match_cost, merges)


def solve_scp(origins, destinations, match_threshold: int = MATCH_THRESHOLD) -> ScpSolution:
    """Match destinations to origins, then splice into one tour."""
    s = np.atleast_2d(np.asarray(origins, dtype=np.float64))
    t = np.atleast_2d(np.asarray(destinations, dtype=np.float64))
    if len(s) < 1:
        raise ValueError("need at least one macro-request")
    cost = _cost_matrix(t, s)
    greedy = len(s) > match_threshold
    perm = greedy_match(t, s, cost) if greedy else bipartite_match(t, s, cost)
    sol = splice(s, t, perm, cost)
    if greedy:
        sol = ScpSolution(sol.order, sol.origins, sol.destinations, sol.s0_lengths,
                          sol.matching_cost, sol.merges, greedy=True)
    return sol
