"""Tour construction over point clouds of any dimension.

A tour is a 1-d integer array holding a permutation of ``range(n)``; the
successor of the last entry is the first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.spatial.distance import cdist

from .core import fsum, row_norms


@dataclass(frozen=True)
class Strip:
    """Boustrophedon scan over vertical strips; 2-dimensional points only."""

    name = "strip"


@dataclass(frozen=True)
class MstDouble:
    name = "mst"


@dataclass(frozen=True)
class NnTwoOpt:
    max_passes: int = 50
    name = "nn2opt"

    def __post_init__(self):
        if self.max_passes < 0:
            raise ValueError("max_passes must be >= 0")


TspBackend = Union[Strip, MstDouble, NnTwoOpt]

BACKENDS = {"strip": Strip, "mst": MstDouble, "nn2opt": NnTwoOpt}


def parse_backend(name: str) -> TspBackend:
    try:
        return BACKENDS[name]()
    except KeyError:
        raise ValueError(f"unknown TSP backend {name!r}; choose from {sorted(BACKENDS)}") from None


def default_backend(dim: int) -> TspBackend:
    return Strip() if dim == 2 else MstDouble()


def _points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("need a non-empty (n, D) array of points")
    return pts


def check_tour(tour, n: int) -> np.ndarray:
    t = np.asarray(tour, dtype=np.intp)
    if t.shape != (n,) or not np.array_equal(np.sort(t), np.arange(n)):
        raise ValueError("tour is not a permutation of the point indices")
    return t


def edge_lengths(points, tour) -> np.ndarray:
    """Length of every tour edge; entry j is the edge leaving ``tour[j]``."""
    pts = _points(points)
    t = np.asarray(tour, dtype=np.intp)
    p = pts[t]
    return row_norms(p - np.roll(p, -1, axis=0))


def tour_length(points, tour) -> float:
    return fsum(edge_lengths(points, tour))


def strip_tour(points) -> np.ndarray:
    pts = _points(points)
    if pts.shape[1] != 2:
        raise ValueError(f"strip backend needs 2-dimensional points, got {pts.shape[1]}")
    n = len(pts)
    k = math.ceil(math.sqrt(n / 2))
    strip = np.clip(np.floor(pts[:, 0] * k), 0, k - 1).astype(np.intp)
    y = np.where(strip % 2 == 0, pts[:, 1], -pts[:, 1])
    return np.lexsort((np.arange(n), y, strip))


DENSE_LIMIT = 4096


def mst_double_tour(points) -> np.ndarray:
    """Prim's MST rooted at point 0, preorder walk with children by index."""
    pts = _points(points)
    n = len(pts)
    dense = cdist(pts, pts) if n <= DENSE_LIMIT else None
    in_tree = np.zeros(n, dtype=bool)
    key = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.intp)
    key[0] = 0.0
    for _ in range(n):
        u = int(np.argmin(np.where(in_tree, np.inf, key)))
        in_tree[u] = True
        dist = dense[u] if dense is not None else row_norms(pts - pts[u])
        better = ~in_tree & (dist < key)
        key[better] = dist[better]
        parent[better] = u
    children: list[list[int]] = [[] for _ in range(n)]
    for v in range(1, n):
        children[parent[v]].append(v)
    order = []
    stack = [0]
    while stack:
        u = stack.pop()
        order.append(u)
        stack.extend(reversed(children[u]))
    return np.array(order, dtype=np.intp)


def nearest_neighbor_tour(points, start: int = 0) -> np.ndarray:
    pts = _points(points)
    n = len(pts)
    visited = np.zeros(n, dtype=bool)
    order = [start]
    visited[start] = True
    cur = start
    for _ in range(n - 1):
        dist = np.where(visited, np.inf, row_norms(pts - pts[cur]))
        cur = int(np.argmin(dist))
        visited[cur] = True
        order.append(cur)
    return np.array(order, dtype=np.intp)


def two_opt(points, tour, max_passes: int = 50) -> np.ndarray:
    """Best-improvement 2-opt per anchor edge, repeated for up to ``max_passes`` sweeps."""
    pts = _points(points)
    t = check_tour(tour, len(pts)).copy()
    n = len(t)
    if max_passes == 0 or n < 4:
        return t
    for _ in range(max_passes):
        improved = False
        for i in range(n - 2):
            a, b = pts[t[i]], pts[t[i + 1]]
            # candidate second edges (t[j], t[j+1]) for j in i+2 .. n-1, skipping the adjacent wrap edge
            j = np.arange(i + 2, n if i > 0 else n - 1)
            if len(j) == 0:
                continue
            c = pts[t[j]]
            d = pts[t[(j + 1) % n]]
            delta = (row_norms(c - a) + row_norms(d - b)
                     - math.dist(a, b) - row_norms(d - c))
            best = int(np.argmin(delta))
            if delta[best] < -1e-12:
                jj = int(j[best])
                t[i + 1:jj + 1] = t[i + 1:jj + 1][::-1].copy()
                improved = True
        if not improved:
            break
    return t


def build_tour(points, backend: TspBackend | None = None, seed: int = 0) -> np.ndarray:
    """Construct a tour with ``backend``; deterministic in ``(points, backend, seed)``."""
    pts = _points(points)
    if backend is None:
        backend = default_backend(pts.shape[1])
    n = len(pts)
    if isinstance(backend, Strip):
        tour = strip_tour(pts)
    elif n == 1:
        tour = np.zeros(1, dtype=np.intp)
    elif isinstance(backend, MstDouble):
        tour = mst_double_tour(pts)
    elif isinstance(backend, NnTwoOpt):
        start = int(np.random.default_rng(seed).integers(n))
        tour = two_opt(pts, nearest_neighbor_tour(pts, start), backend.max_passes)
    else:
        raise TypeError(f"unknown backend {backend!r}")
    return tour
