"""Exact exponential-time solvers used as ground truth on small instances."""

from __future__ import annotations

import numpy as np

from .core import Instance, Kind, Mode, Plan
from .tsp import _points, tour_length

MAX_REQUESTS = 10
MAX_TSP_POINTS = 12


class OracleTooLargeError(ValueError):
    pass


def _anchor_distances(inst: Instance) -> list[list[float]]:
    # anchors: 2i origin of i, 2i+1 destination of i, 2n depot
    pts = np.empty((2 * inst.n + 1, inst.d))
    pts[0:-1:2] = inst.origins
    pts[1:-1:2] = inst.destinations
    pts[-1] = inst.depot
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt((diff * diff).sum(axis=2)).tolist()


def _exact(inst: Instance, c: int, mode: Mode, start_at_depot: bool, cap: int):
    n = inst.n
    if n > cap:
        raise OracleTooLargeError(f"exact solver capped at {cap} requests, got {n}")
    if c < 1:
        raise ValueError("capacity must be >= 1")
    dist = _anchor_distances(inst)
    depot = 2 * n
    free = mode is Mode.PDPC
    if not start_at_depot:
        dist[depot] = [0.0] * (2 * n + 1)
    bits = [1 << i for i in range(n)]
    full = (1 << n) - 1

    # state: (onboard, delivered, loc); under PDP-C an empty vehicle's location is irrelevant
    start = (0, 0, -1 if free else depot)
    layer = {start: 0.0}
    parents: list[dict] = []
    for _ in range(2 * n):
        nxt: dict = {}
        back: dict = {}
        for (ob, dl, loc), g in layer.items():
            row = dist[loc] if loc >= 0 else None
            load = bin(ob).count("1")
            if load < c:
                busy = ob | dl
                for i in range(n):
                    b = bits[i]
                    if busy & b:
                        continue
                    anchor = 2 * i
                    cost = g if (free and not ob) else g + row[anchor]
                    key = (ob | b, dl, anchor)
                    old = nxt.get(key)
                    if old is None or cost < old:
                        nxt[key] = cost
                        back[key] = ((ob, dl, loc), Kind.PICKUP, i)
            for i in range(n):
                b = bits[i]
                if not ob & b:
                    continue
                anchor = 2 * i + 1
                nob = ob ^ b
                key = (nob, dl | b, -1 if (free and not nob) else anchor)
                cost = g + row[anchor]
                old = nxt.get(key)
                if old is None or cost < old:
                    nxt[key] = cost
                    back[key] = ((ob, dl, loc), Kind.DELIVER, i)
        parents.append(back)
        layer = nxt

    final = [(g, key) for key, g in layer.items() if key[0] == 0 and key[1] == full]
    best, key = min(final)
    kinds, refs = [], []
    for back in reversed(parents):
        prev, kind, i = back[key]
        kinds.append(kind)
        refs.append(i)
        key = prev
    plan = Plan(np.array(kinds[::-1], dtype=np.int8), np.array(refs[::-1], dtype=np.intp), c)
    return best, plan


def exact_pdp(inst: Instance, c: int, start_at_depot: bool = True, cap: int = MAX_REQUESTS):
    """Minimum total distance over all nonpreemptive plans (LIFO not required).

    The vehicle starts at the depot unless ``start_at_depot`` is false, in
    which case the approach to the first pickup is free. Routes are open.
    """
    return _exact(inst, c, Mode.PDP, start_at_depot, cap)


def exact_pdpc(inst: Instance, c: int, cap: int = MAX_REQUESTS):
    """Minimum loaded distance; moving empty is free."""
    return _exact(inst, c, Mode.PDPC, False, cap)


def exact_tsp(points, cap: int = MAX_TSP_POINTS):
    """Held-Karp over subsets of points 1..n-1, tour closed through point 0."""
    pts = _points(points)
    n = len(pts)
    if n > cap:
        raise OracleTooLargeError(f"exact TSP capped at {cap} points, got {n}")
    if n <= 2:
        tour = np.arange(n, dtype=np.intp)
        return tour_length(pts, tour), tour
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    m = n - 1  # node j+1 is bit j
    size = 1 << m
    dp = np.full((size, m), np.inf)
    parent = np.full((size, m), -1, dtype=np.intp)
    for j in range(m):
        dp[1 << j, j] = dist[0, j + 1]
    inner = dist[1:, 1:]
    for mask in range(1, size):
        if mask & (mask - 1) == 0:
            continue
        for j in range(m):
            bit = 1 << j
            if not mask & bit:
                continue
            cand = dp[mask ^ bit] + inner[:, j]
            i = int(np.argmin(cand))
            dp[mask, j] = cand[i]
            parent[mask, j] = i
    closing = dp[size - 1] + dist[1:, 0]
    j = int(np.argmin(closing))
    mask = size - 1
    rev = []
    while j >= 0:
        rev.append(j + 1)
        pj = parent[mask, j]
        mask ^= 1 << j
        j = pj
    tour = np.array([0] + rev[::-1], dtype=np.intp)
    return tour_length(pts, tour), tour
