"""Single-vehicle pickup and delivery on total distance.

The capacity-c groups from :func:`liftroute.pdpc.solve_pdpc` are chained by a
stacker crane tour over one macro-request per group: the group's first
pickup and, by LIFO, its last delivery. The tour is opened at its longest
empty edge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Instance, Kind, Mode, Plan, plan_cost
from .pdpc import PdpcSolution, lemma1_bound, solve_pdpc
from .scp import MATCH_THRESHOLD, ScpSolution, solve_scp
from .tsp import TspBackend


def lemma2_bound(sum_loaded: float, c: int, tour_len: float, s0_len: float) -> float:
    return lemma1_bound(sum_loaded, c, tour_len) + s0_len


@dataclass(frozen=True)
class Diagnostics:
    cS0_over_n: float
    cT_over_n: float
    mean_loaded: float


def observation_diagnostics(inst: Instance, c: int, tour_len: float, s0_len: float) -> Diagnostics:
    n = inst.n
    return Diagnostics(c * s0_len / n, c * tour_len / n, inst.sum_loaded() / n)


@dataclass(frozen=True, eq=False)
class PdpSolution:
    pdpc: PdpcSolution
    scp: ScpSolution
    plan: Plan
    sol_total: float
    loaded: float
    empty: float
    omitted_edge: float
    group_order: np.ndarray
    diag: Diagnostics
    depot_leg: float = 0.0

    @property
    def lemma2_rhs(self) -> float:
        return self.pdpc.lemma1_rhs + self.scp.s0_length


def chain_groups(inst: Instance, groups: list[np.ndarray], sequence, capacity: int) -> Plan:
    """LIFO trips for ``groups`` in ``sequence``, joined by empty moves to the next first pickup."""
    kinds, refs, moves = [], [], []
    seq = list(sequence)
    for pos, g in enumerate(seq):
        members = groups[g]
        c = len(members)
        kinds.append(np.repeat(np.array([Kind.PICKUP, Kind.DELIVER], dtype=np.int8), c))
        refs.append(np.concatenate([members, members[::-1]]))
        if pos + 1 < len(seq):
            kinds.append(np.array([Kind.MOVE], dtype=np.int8))
            refs.append(np.array([len(moves)], dtype=np.intp))
            moves.append(inst.origins[groups[seq[pos + 1]][0]])
    mp = np.array(moves) if moves else None
    return Plan(np.concatenate(kinds), np.concatenate(refs), capacity, mp)


def solve_pdp(inst: Instance, c: int, backend: TspBackend | None = None, seed: int = 0,
              include_depot_leg: bool = False, tour=None,
              match_threshold: int = MATCH_THRESHOLD) -> PdpSolution:
    pdpc = solve_pdpc(inst, c, backend, seed, tour=tour)
    groups = pdpc.groups
    firsts = np.array([g[0] for g in groups], dtype=np.intp)
    scp = solve_scp(inst.origins[firsts], inst.destinations[firsts], match_threshold)

    cut = int(np.argmax(scp.s0_lengths))  # first maximum: lowest position on ties
    sequence = np.roll(scp.order, -(cut + 1))
    plan = chain_groups(inst, groups, sequence.tolist(), c)
    cost = plan_cost(inst, plan, Mode.PDP, include_depot_leg=include_depot_leg)
    depot_leg = 0.0
    if include_depot_leg:
        depot_leg = float(np.linalg.norm(inst.origins[groups[sequence[0]][0]] - inst.depot))
    return PdpSolution(
        pdpc=pdpc, scp=scp, plan=plan, sol_total=cost.total, loaded=cost.loaded,
        empty=cost.empty, omitted_edge=float(scp.s0_lengths[cut]), group_order=sequence,
        diag=observation_diagnostics(inst, c, pdpc.tour_len, scp.s0_length),
        depot_leg=depot_leg,
    )
