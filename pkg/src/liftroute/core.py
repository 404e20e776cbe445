"""Geometry, domain types, plans and cost accounting.

Request indices are 0-based everywhere inside the library; the plan file
format converts to 1-based indices at the boundary (see :mod:`liftroute.io`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

TOL = 1e-9


def as_point(p) -> np.ndarray:
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"a point must be 1-dimensional, got shape {arr.shape}")
    return arr


def distance(p, q) -> float:
    """Euclidean distance between two points of equal dimension."""
    p = as_point(p)
    q = as_point(q)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape[0]} vs {q.shape[0]}")
    diff = p - q
    return float(np.sqrt((diff * diff).sum()))


def row_norms(diff: np.ndarray) -> np.ndarray:
    # every leg length in the library goes through here so equal legs are bitwise equal
    return np.sqrt((diff * diff).sum(axis=1))


def fsum(values) -> float:
    if isinstance(values, np.ndarray):
        values = values.tolist()
    return math.fsum(values)


class Request(NamedTuple):
    origin: np.ndarray
    destination: np.ndarray


def lift(r: Request) -> np.ndarray:
    """Concatenate origin and destination into one point of twice the dimension."""
    s = as_point(r.origin)
    t = as_point(r.destination)
    if s.shape != t.shape:
        raise ValueError("origin and destination dimensions differ")
    return np.concatenate([s, t])


@dataclass(frozen=True, eq=False)
class Instance:
    origins: np.ndarray
    destinations: np.ndarray
    depot: np.ndarray | None = None

    def __post_init__(self):
        s = np.array(self.origins, dtype=np.float64, ndmin=2)
        t = np.array(self.destinations, dtype=np.float64, ndmin=2)
        if s.shape != t.shape:
            raise ValueError(f"origins {s.shape} and destinations {t.shape} differ in shape")
        if s.shape[0] < 1:
            raise ValueError("an instance needs at least one request")
        depot = np.zeros(s.shape[1]) if self.depot is None else as_point(self.depot).copy()
        if depot.shape[0] != s.shape[1]:
            raise ValueError("depot dimension does not match the requests")
        for arr in (s, t, depot):
            arr.setflags(write=False)
        object.__setattr__(self, "origins", s)
        object.__setattr__(self, "destinations", t)
        object.__setattr__(self, "depot", depot)

    @classmethod
    def from_requests(cls, requests: Iterable, depot=None) -> "Instance":
        pairs = [(as_point(s), as_point(t)) for s, t in requests]
        return cls(np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs]), depot)

    @property
    def n(self) -> int:
        return self.origins.shape[0]

    @property
    def d(self) -> int:
        return self.origins.shape[1]

    def request(self, i: int) -> Request:
        return Request(self.origins[i], self.destinations[i])

    @property
    def requests(self) -> list[Request]:
        return [self.request(i) for i in range(self.n)]

    def lifted(self) -> np.ndarray:
        """All requests as points in 2d-dimensional space, one row each."""
        return np.hstack([self.origins, self.destinations])

    def loaded_lengths(self) -> np.ndarray:
        return row_norms(self.destinations - self.origins)

    def sum_loaded(self) -> float:
        return fsum(self.loaded_lengths())

    def in_unit_cube(self) -> bool:
        both = np.concatenate([self.origins, self.destinations])
        return bool(np.all((both >= 0.0) & (both <= 1.0)))

    def subset(self, indices: Sequence[int]) -> "Instance":
        idx = np.asarray(indices, dtype=np.intp)
        return Instance(self.origins[idx], self.destinations[idx], self.depot)


class Kind(enum.IntEnum):
    PICKUP = 0
    DELIVER = 1
    MOVE = 2


class Action(NamedTuple):
    kind: Kind
    request: int = -1
    point: tuple | None = None

    def __repr__(self):
        if self.kind is Kind.MOVE:
            return f"Move({', '.join(f'{x:g}' for x in self.point)})"
        return f"{'P' if self.kind is Kind.PICKUP else 'D'}{self.request}"


def Pickup(i: int) -> Action:
    return Action(Kind.PICKUP, int(i))


def Deliver(i: int) -> Action:
    return Action(Kind.DELIVER, int(i))


def MoveEmpty(point) -> Action:
    return Action(Kind.MOVE, -1, tuple(float(x) for x in as_point(point)))


@dataclass(frozen=True, eq=False)
class Plan:
    """Action sequence stored column-wise.

    ``refs[j]`` is the request index for pickups and deliveries and the row
    of ``move_points`` for empty moves.
    """

    kinds: np.ndarray
    refs: np.ndarray
    capacity: int
    move_points: np.ndarray | None = None

    def __post_init__(self):
        if int(self.capacity) < 1:
            raise ValueError("capacity must be a positive integer")
        kinds = np.asarray(self.kinds, dtype=np.int8)
        refs = np.asarray(self.refs, dtype=np.intp)
        if kinds.shape != refs.shape or kinds.ndim != 1:
            raise ValueError("kinds and refs must be equal-length vectors")
        kinds.setflags(write=False)
        refs.setflags(write=False)
        object.__setattr__(self, "kinds", kinds)
        object.__setattr__(self, "refs", refs)
        object.__setattr__(self, "capacity", int(self.capacity))

    @classmethod
    def from_actions(cls, actions: Iterable, capacity: int) -> "Plan":
        kinds, refs, moves = [], [], []
        for a in actions:
            kinds.append(int(a.kind))
            if a.kind == Kind.MOVE:
                refs.append(len(moves))
                moves.append(a.point)
            else:
                refs.append(a.request)
        mp = np.array(moves, dtype=np.float64) if moves else None
        return cls(np.array(kinds, dtype=np.int8), np.array(refs, dtype=np.intp), capacity, mp)

    @classmethod
    def concat(cls, parts: Sequence["Plan"], capacity: int) -> "Plan":
        kinds, refs, moves = [], [], []
        offset = 0
        for p in parts:
            r = p.refs.copy()
            if p.move_points is not None:
                r[p.kinds == Kind.MOVE] += offset
                moves.append(p.move_points)
                offset += len(p.move_points)
            kinds.append(p.kinds)
            refs.append(r)
        mp = np.vstack(moves) if moves else None
        return cls(np.concatenate(kinds) if kinds else np.zeros(0, np.int8),
                   np.concatenate(refs) if refs else np.zeros(0, np.intp), capacity, mp)

    def __len__(self) -> int:
        return len(self.kinds)

    def __iter__(self) -> Iterator[Action]:
        for k, r in zip(self.kinds.tolist(), self.refs.tolist()):
            if k == Kind.MOVE:
                yield Action(Kind.MOVE, -1, tuple(self.move_points[r].tolist()))
            else:
                yield Action(Kind(k), r)

    @property
    def actions(self) -> list[Action]:
        return list(self)

    def request_order(self, kind: Kind = Kind.PICKUP) -> list[int]:
        return self.refs[self.kinds == kind].tolist()

    def locations(self, inst: Instance) -> np.ndarray:
        """Point visited by every action, one row per action."""
        locs = np.empty((len(self), inst.d))
        pick = self.kinds == Kind.PICKUP
        drop = self.kinds == Kind.DELIVER
        move = self.kinds == Kind.MOVE
        locs[pick] = inst.origins[self.refs[pick]]
        locs[drop] = inst.destinations[self.refs[drop]]
        if move.any():
            locs[move] = self.move_points[self.refs[move]]
        return locs


# --- validation ---------------------------------------------------------------

DOUBLE_PICKUP = "double pickup"
DOUBLE_DELIVERY = "double delivery"
DELIVER_BEFORE_PICKUP = "deliver-before-pickup"
MISSING_PICKUP = "missing pickup"
MISSING_DELIVERY = "missing delivery"
CAPACITY_EXCEEDED = "capacity exceeded"
MOVE_WHILE_LOADED = "move-empty while loaded"
INDEX_OUT_OF_RANGE = "index out of range"
DIMENSION_MISMATCH = "move dimension mismatch"


class Violation(NamedTuple):
    rule: str
    position: int  # action index in the plan, -1 when not tied to one action
    request: int

    def __str__(self):
        where = f" at action {self.position}" if self.position >= 0 else ""
        who = f" (request {self.request})" if self.request >= 0 else ""
        return f"{self.rule}{where}{who}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def rules(self) -> list[str]:
        return [v.rule for v in self.violations]


class InvalidPlanError(ValueError):
    def __init__(self, violation: Violation):
        super().__init__(str(violation))
        self.violation = violation


def _onboard_after(kinds: np.ndarray, active: np.ndarray) -> np.ndarray:
    step = np.where(kinds == Kind.PICKUP, 1, np.where(kinds == Kind.DELIVER, -1, 0))
    return np.cumsum(np.where(active, step, 0))


def validate_plan(inst: Instance, plan: Plan) -> ValidationReport:
    """Check feasibility of ``plan`` for ``inst``; violations come back sorted by position."""
    n = inst.n
    kinds, refs = plan.kinds, plan.refs
    pos = np.arange(len(plan))
    out: list[Violation] = []

    is_req = kinds != Kind.MOVE
    bad = is_req & ((refs < 0) | (refs >= n))
    for j in pos[bad].tolist():
        out.append(Violation(INDEX_OUT_OF_RANGE, j, int(refs[j])))
    is_move = kinds == Kind.MOVE
    if is_move.any():
        mp = plan.move_points
        if mp is None or mp.shape[1] != inst.d:
            out.append(Violation(DIMENSION_MISMATCH, int(pos[is_move][0]), -1))
    active = is_req & ~bad

    pick = active & (kinds == Kind.PICKUP)
    drop = active & (kinds == Kind.DELIVER)
    pick_count = np.bincount(refs[pick], minlength=n)
    drop_count = np.bincount(refs[drop], minlength=n)
    # first/second occurrence positions per request
    big = len(plan) + 1
    first_pick = np.full(n, big)
    first_drop = np.full(n, big)
    np.minimum.at(first_pick, refs[pick], pos[pick])
    np.minimum.at(first_drop, refs[drop], pos[drop])

    for kind_mask, first, rule in ((pick, first_pick, DOUBLE_PICKUP), (drop, first_drop, DOUBLE_DELIVERY)):
        repeat = kind_mask.copy()
        repeat[kind_mask] = pos[kind_mask] != first[refs[kind_mask]]
        for j in pos[repeat].tolist():
            out.append(Violation(rule, j, int(refs[j])))

    early = (drop_count > 0) & (first_drop < first_pick)
    for i in np.flatnonzero(early).tolist():
        out.append(Violation(DELIVER_BEFORE_PICKUP, int(first_drop[i]), i))
    for i in np.flatnonzero(pick_count == 0).tolist():
        if drop_count[i] == 0:
            out.append(Violation(MISSING_PICKUP, -1, i))
    for i in np.flatnonzero((pick_count > 0) & (drop_count == 0)).tolist():
        out.append(Violation(MISSING_DELIVERY, -1, i))

    onboard = _onboard_after(kinds, active)
    over = pick & (onboard > plan.capacity)
    for j in pos[over].tolist():
        out.append(Violation(CAPACITY_EXCEEDED, j, int(refs[j])))
    before = onboard - np.where(pick, 1, np.where(drop, -1, 0))
    loaded_move = is_move & (before > 0)
    for j in pos[loaded_move].tolist():
        out.append(Violation(MOVE_WHILE_LOADED, j, -1))

    out.sort(key=lambda v: (v.position if v.position >= 0 else big, v.request))
    return ValidationReport(out)


def is_lifo(plan: Plan) -> bool:
    """True iff every delivery removes the most recently picked still-onboard object.

    Assumes a structurally valid plan. Uses the bracket-matching fact that, in a
    balanced sequence, opens and closes at the same depth alternate.
    """
    keep = plan.kinds != Kind.MOVE
    kinds = plan.kinds[keep]
    refs = plan.refs[keep]
    if len(kinds) == 0:
        return True
    is_pick = kinds == Kind.PICKUP
    depth = np.cumsum(np.where(is_pick, 1, -1))
    level = np.where(is_pick, depth, depth + 1)
    order = np.lexsort((np.arange(len(kinds)), level))
    k = kinds[order]
    r = refs[order]
    if len(k) % 2:
        return False
    opens, closes = k[0::2], k[1::2]
    return bool(np.all(opens == Kind.PICKUP) and np.all(closes == Kind.DELIVER)
                and np.array_equal(r[0::2], r[1::2]))


# --- costs --------------------------------------------------------------------

class Mode(str, enum.Enum):
    PDP = "pdp"
    PDPC = "pdpc"


@dataclass(frozen=True)
class CostBreakdown:
    loaded: float
    empty: float
    mode: Mode = Mode.PDPC

    @property
    def total(self) -> float:
        return self.loaded + self.empty

    @property
    def objective(self) -> float:
        return self.loaded if self.mode is Mode.PDPC else self.total


def plan_legs(inst: Instance, plan: Plan, include_depot_leg: bool = False):
    """Leg lengths of ``plan`` and whether each one departs loaded."""
    locs = plan.locations(inst)
    onboard = _onboard_after(plan.kinds, plan.kinds != Kind.MOVE)
    if include_depot_leg and len(locs):
        locs = np.vstack([inst.depot, locs])
        onboard = np.concatenate([[0], onboard])
    lengths = row_norms(np.diff(locs, axis=0))
    return lengths, onboard[:-1] > 0


def plan_cost(inst: Instance, plan: Plan, mode: Mode | str = Mode.PDPC,
              include_depot_leg: bool = False, check: bool = True) -> CostBreakdown:
    """Walk ``plan``, splitting leg lengths into loaded and empty distance.

    The vehicle starts at the first action's location unless
    ``include_depot_leg`` is set, in which case the approach from the depot
    is charged as empty distance.
    """
    if check:
        report = validate_plan(inst, plan)
        if not report.ok:
            raise InvalidPlanError(report.violations[0])
    lengths, loaded = plan_legs(inst, plan, include_depot_leg)
    return CostBreakdown(fsum(lengths[loaded]), fsum(lengths[~loaded]), Mode(mode))
