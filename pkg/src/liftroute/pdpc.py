"""Capacity-c pickup and delivery scored on loaded distance only.

Requests are lifted to points in 2d-space, a tour through those points is cut
into runs of ``c`` consecutive requests, each run is served by one LIFO trip,
and the best of the ``c`` possible cuts is kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import TOL, Instance, Kind, Mode, Plan, fsum, plan_cost, row_norms
from .tsp import TspBackend, build_tour, check_tour, tour_length

SQRT2 = math.sqrt(2.0)


class UndefinedRatioError(ValueError):
    """Raised when the ratio certificate is requested for zero total loaded length."""


@dataclass(frozen=True, eq=False)
class Grouping:
    rotation: int
    groups: np.ndarray  # shape (m, c); row g lists the requests of group g in pickup order

    @property
    def c(self) -> int:
        return self.groups.shape[1]

    def as_lists(self) -> list[list[int]]:
        return self.groups.tolist()


def rotation_groupings(tour, c: int) -> list[Grouping]:
    """All ``c`` ways to cut the cyclic ``tour`` into runs of ``c`` consecutive entries."""
    t = np.asarray(tour, dtype=np.intp)
    n = len(t)
    if c < 1:
        raise ValueError("capacity must be >= 1")
    if c > n:
        raise ValueError(f"capacity {c} exceeds the number of requests {n}")
    if n % c:
        raise ValueError(f"{n} requests cannot be split into groups of {c}")
    return [Grouping(k, np.roll(t, -k).reshape(n // c, c)) for k in range(c)]


def group_plan(inst: Instance, grouping: Grouping | np.ndarray, capacity: int | None = None) -> Plan:
    """Pick up each group in order, then drop off in reverse; groups back to back."""
    groups = grouping.groups if isinstance(grouping, Grouping) else np.asarray(grouping, dtype=np.intp)
    if groups.ndim != 2:
        raise ValueError("groups must be a 2-d array")
    m, c = groups.shape
    refs = np.hstack([groups, groups[:, ::-1]]).ravel()
    kinds = np.tile(np.repeat(np.array([Kind.PICKUP, Kind.DELIVER], dtype=np.int8), c), m)
    return Plan(kinds, refs, capacity or c)


def singleton_plan(requests, capacity: int) -> Plan:
    r = np.asarray(requests, dtype=np.intp)
    kinds = np.tile(np.array([Kind.PICKUP, Kind.DELIVER], dtype=np.int8), len(r))
    return Plan(kinds, np.repeat(r, 2), capacity)


def lemma1_bound(sum_loaded: float, c: int, tour_len: float) -> float:
    """Upper bound on the best-of-c loaded cost: sum/c + sqrt(2)(c-1)/c * tour length."""
    return sum_loaded / c + SQRT2 * ((c - 1) / c) * tour_len


def ratio_upper_bound(sum_loaded: float, c: int, tour_len: float) -> float:
    """Per-instance certificate on SOL/OPT, using sum/c as the lower bound on OPT."""
    if sum_loaded <= 0:
        raise UndefinedRatioError("ratio bound undefined when the total loaded length is zero")
    return 1.0 + SQRT2 * (c - 1) * tour_len / sum_loaded


def _chain_terms(inst: Instance, tour: np.ndarray):
    s = inst.origins[tour]
    t = inst.destinations[tour]
    a = row_norms(s - np.roll(s, -1, axis=0))
    b = row_norms(t - np.roll(t, -1, axis=0))
    e = row_norms(t - s)
    return a, b, e


def rotation_costs(inst: Instance, tour, c: int) -> np.ndarray:
    """Loaded cost of every rotation's plan without building the plans.

    Within a group the legs are the origin chain, one origin-to-destination
    leg for the last pickup, and the reversed destination chain.
    """
    t = np.asarray(tour, dtype=np.intp)
    a, b, e = _chain_terms(inst, t)
    pos = np.arange(len(t))
    costs = np.empty(c)
    for k in range(c):
        last = (pos - k) % c == c - 1
        costs[k] = fsum(np.concatenate([a[~last], b[~last], e[last]]))
    return costs


@dataclass(frozen=True, eq=False)
class PdpcSolution:
    tour: np.ndarray
    chosen: Grouping | None
    plan: Plan
    sol: float
    sum_loaded: float
    tour_len: float
    c: int
    leftovers: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.intp))
    leftover_loaded: float = 0.0
    rotation_costs: np.ndarray | None = None

    @property
    def lower_bound(self) -> float:
        return self.sum_loaded / self.c

    @property
    def lemma1_rhs(self) -> float:
        # leftover singletons ride alone, so they can exceed their 1/c share
        extra = (self.c - 1) / self.c * self.leftover_loaded
        return lemma1_bound(self.sum_loaded, self.c, self.tour_len) + extra

    @property
    def ratio_ub(self) -> float:
        ub = ratio_upper_bound(self.sum_loaded, self.c, self.tour_len)
        if self.leftover_loaded:
            ub += (self.c - 1) * self.leftover_loaded / self.sum_loaded
        return ub

    @property
    def groups(self) -> list[np.ndarray]:
        """Groups in execution order, leftover singletons last."""
        out = [] if self.chosen is None else list(self.chosen.groups)
        out.extend(np.array([i], dtype=np.intp) for i in self.leftovers.tolist())
        return out


def best_rotation(costs: np.ndarray, tol: float = TOL) -> int:
    return int(np.flatnonzero(costs <= costs.min() + tol)[0])


def solve_pdpc(inst: Instance, c: int, backend: TspBackend | None = None, seed: int = 0,
               tour=None) -> PdpcSolution:
    """Best-of-c LIFO grouping along a tour of the lifted requests.

    A precomputed ``tour`` over the lifted points may be passed to reuse it
    across capacities. When ``n`` is not a multiple of ``c``, the ``n mod c``
    requests with the shortest loaded legs are served alone after the rest.
    """
    if c < 1:
        raise ValueError("capacity must be >= 1")
    n = inst.n
    lifted = inst.lifted()
    if tour is None:
        tour = build_tour(lifted, backend, seed)
    tour = check_tour(tour, n)
    e = inst.loaded_lengths()

    r = n % c
    leftovers = np.zeros(0, dtype=np.intp)
    main_tour = tour
    if r:
        leftovers = np.sort(np.lexsort((np.arange(n), e))[:r])
        main_tour = tour[~np.isin(tour, leftovers)]

    chosen = None
    costs = None
    parts = []
    if len(main_tour):
        costs = rotation_costs(inst, main_tour, c)
        k = best_rotation(costs)
        chosen = Grouping(k, np.roll(main_tour, -k).reshape(-1, c))
        parts.append(group_plan(inst, chosen, c))
    if r:
        parts.append(singleton_plan(leftovers, c))
    plan = parts[0] if len(parts) == 1 else Plan.concat(parts, c)

    sol = plan_cost(inst, plan, Mode.PDPC).loaded
    return PdpcSolution(
        tour=tour, chosen=chosen, plan=plan, sol=sol, sum_loaded=fsum(e),
        tour_len=tour_length(lifted, tour), c=c, leftovers=leftovers,
        leftover_loaded=fsum(e[leftovers]), rotation_costs=costs,
    )
