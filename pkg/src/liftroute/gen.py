"""Seeded i.i.d. request generators.

Random numbers come from SplitMix64 used as a counter-based generator so any
implementation can reproduce an instance bit for bit:

* ``mix(z)``: ``z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
  z *= 0x94D049BB133111EB; z ^= z >> 31`` (all mod 2**64).
* stream key for request ``i`` under ``seed``:
  ``key = mix(mix(seed) + (i + 1) * GAMMA)`` with ``GAMMA = 0x9E3779B97F4A7C15``.
* draw ``k`` (0-based) of a stream: ``mix(key + (k + 1) * GAMMA)``; as a
  double, ``(draw >> 11) * 2**-53``.

Every request owns its stream, so the first ``n`` requests of a seed do not
depend on how many are generated, nor on generation order. Draws within a
request are consumed origin coordinates first, then destination coordinates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import Instance, row_norms

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO53 = 2.0 ** -53
MAX_REJECTIONS = 64


class DegenerateDistributionWarning(UserWarning):
    """The request law has zero mean loaded length."""


def mix(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = z ^ (z >> np.uint64(30))
        z = z * _M1
        z = z ^ (z >> np.uint64(27))
        z = z * _M2
        return z ^ (z >> np.uint64(31))


def stream_keys(seed: int, indices) -> np.ndarray:
    idx = np.asarray(indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        base = mix(np.uint64(seed % 2**64))
        return mix(base + (idx + np.uint64(1)) * GAMMA)


def draw_uniform(keys: np.ndarray, counters: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = mix(keys + (counters.astype(np.uint64) + np.uint64(1)) * GAMMA)
    return (z >> np.uint64(11)).astype(np.float64) * _TWO53


class _Streams:
    """Per-request counters so rejection loops stay independent across requests."""

    def __init__(self, keys: np.ndarray):
        self.keys = keys
        self.counters = np.zeros(len(keys), dtype=np.int64)

    def uniform(self, mask: np.ndarray | None = None) -> np.ndarray:
        if mask is None:
            out = draw_uniform(self.keys, self.counters)
            self.counters += 1
            return out
        out = np.zeros(len(self.keys))
        out[mask] = draw_uniform(self.keys[mask], self.counters[mask])
        self.counters[mask] += 1
        return out


# --- point laws -----------------------------------------------------------------

@dataclass(frozen=True)
class Uniform:
    def sample(self, st: _Streams, d: int) -> np.ndarray:
        return np.column_stack([st.uniform() for _ in range(d)])

    def atom(self, d: int):
        return None


@dataclass(frozen=True)
class PointMass:
    point: tuple

    def sample(self, st: _Streams, d: int) -> np.ndarray:
        p = np.broadcast_to(np.asarray(self.point, dtype=np.float64), (d,))
        return np.tile(np.clip(p, 0.0, 1.0), (len(st.keys), 1))

    def atom(self, d: int):
        return np.clip(np.broadcast_to(np.asarray(self.point, dtype=np.float64), (d,)), 0.0, 1.0)


def _normal(st: _Streams, mask: np.ndarray) -> np.ndarray:
    # Box-Muller, cosine branch only; two draws per variate
    u1 = st.uniform(mask)
    u2 = st.uniform(mask)
    with np.errstate(divide="ignore"):
        r = np.sqrt(-2.0 * np.log1p(-u1))
    return r * np.cos(2.0 * math.pi * u2)


def _truncated_normal(st: _Streams, center: np.ndarray, sigma: float) -> np.ndarray:
    """One coordinate per stream from N(center, sigma^2) restricted to [0, 1]."""
    k = len(st.keys)
    out = np.empty(k)
    todo = np.ones(k, dtype=bool)
    for _ in range(MAX_REJECTIONS):
        x = center + sigma * _normal(st, todo)
        ok = todo & (x >= 0.0) & (x <= 1.0)
        out[ok] = x[ok]
        todo &= ~ok
        if not todo.any():
            return out
    out[todo] = np.clip(x[todo], 0.0, 1.0)
    return out


@dataclass(frozen=True)
class TruncatedGaussian:
    center: tuple | float = 0.5
    sigma: float = 0.2

    def sample(self, st: _Streams, d: int) -> np.ndarray:
        center = np.broadcast_to(np.asarray(self.center, dtype=np.float64), (d,))
        if self.sigma == 0:
            return np.tile(np.clip(center, 0.0, 1.0), (len(st.keys), 1))
        k = len(st.keys)
        return np.column_stack([_truncated_normal(st, np.full(k, center[j]), self.sigma)
                                for j in range(d)])

    def atom(self, d: int):
        if self.sigma:
            return None
        return np.clip(np.broadcast_to(np.asarray(self.center, dtype=np.float64), (d,)), 0.0, 1.0)


@dataclass(frozen=True)
class Mixture:
    """Truncated Gaussian blobs; one uniform draw selects the blob."""

    centers: tuple
    weights: tuple
    sigma: float = 0.05

    def __post_init__(self):
        if len(self.centers) != len(self.weights) or not self.centers:
            raise ValueError("need one weight per center")
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError("weights must be non-negative and sum to 1")

    def sample(self, st: _Streams, d: int) -> np.ndarray:
        centers = np.array([np.broadcast_to(np.asarray(c, dtype=np.float64), (d,)) for c in self.centers])
        cum = np.cumsum(self.weights)
        u = st.uniform()
        which = np.minimum(np.searchsorted(cum, u, side="right"), len(cum) - 1)
        if self.sigma == 0:
            return centers[which].copy()
        return np.column_stack([_truncated_normal(st, centers[which, j], self.sigma) for j in range(d)])

    def atom(self, d: int):
        if self.sigma or len(self.centers) != 1:
            return None
        return np.clip(np.broadcast_to(np.asarray(self.centers[0], dtype=np.float64), (d,)), 0.0, 1.0)


PointLaw = Union[Uniform, PointMass, TruncatedGaussian, Mixture]


# --- request distributions ---------------------------------------------------

@dataclass(frozen=True)
class UniformCube:
    """Origin and destination independent and uniform on the unit cube."""

    @property
    def origin_law(self) -> PointLaw:
        return Uniform()

    @property
    def destination_law(self) -> PointLaw:
        return Uniform()


@dataclass(frozen=True)
class SameDist:
    law: PointLaw

    @property
    def origin_law(self) -> PointLaw:
        return self.law

    @property
    def destination_law(self) -> PointLaw:
        return self.law


@dataclass(frozen=True)
class SeparateDist:
    origin: PointLaw
    destination: PointLaw

    @property
    def origin_law(self) -> PointLaw:
        return self.origin

    @property
    def destination_law(self) -> PointLaw:
        return self.destination


@dataclass(frozen=True)
class ClusterMix:
    """Origins and destinations i.i.d. from a Gaussian blob mixture."""

    centers: tuple
    weights: tuple
    sigma: float = 0.05

    @property
    def origin_law(self) -> PointLaw:
        return Mixture(self.centers, self.weights, self.sigma)

    @property
    def destination_law(self) -> PointLaw:
        return self.origin_law

    @classmethod
    def seeded(cls, k: int, d: int, sigma: float = 0.05, seed: int = 0) -> "ClusterMix":
        """``k`` equally weighted blobs with centers drawn uniformly from [0.1, 0.9]^d."""
        st = _Streams(stream_keys(seed, np.arange(k)))
        centers = 0.1 + 0.8 * Uniform().sample(st, d)
        return cls(tuple(tuple(c) for c in centers.tolist()), tuple([1.0 / k] * k), sigma)


RequestDistribution = Union[UniformCube, SameDist, SeparateDist, ClusterMix]


def is_degenerate(dist: RequestDistribution, d: int) -> bool:
    """True when every request is forced to have zero length (mean length 0)."""
    o = dist.origin_law.atom(d)
    t = dist.destination_law.atom(d)
    return o is not None and t is not None and bool(np.array_equal(o, t))


def sample_requests(dist: RequestDistribution, d: int, keys: np.ndarray):
    st = _Streams(keys)
    s = dist.origin_law.sample(st, d)
    t = dist.destination_law.sample(st, d)
    return np.clip(s, 0.0, 1.0), np.clip(t, 0.0, 1.0)


def generate(n: int, d: int, dist: RequestDistribution | None = None, seed: int = 0,
             start: int = 0) -> Instance:
    """``n`` requests from ``dist``; request ``i`` uses stream ``start + i`` of ``seed``."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    dist = dist or UniformCube()
    if is_degenerate(dist, d):
        warnings.warn("distribution has zero mean request length", DegenerateDistributionWarning, stacklevel=2)
    s, t = sample_requests(dist, d, stream_keys(seed, np.arange(start, start + n)))
    return Instance(s, t)


def estimate_mu(dist: RequestDistribution, d: int, samples: int, seed: int = 0,
                chunk: int = 1 << 18) -> float:
    """Monte Carlo mean of the origin-destination distance."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    total = 0.0
    for lo in range(0, samples, chunk):
        hi = min(samples, lo + chunk)
        s, t = sample_requests(dist, d, stream_keys(seed, np.arange(lo, hi)))
        total += math.fsum(row_norms(t - s).tolist())
    return total / samples


def parse_distribution(text: str, d: int) -> RequestDistribution:
    """CLI syntax: ``uniform``, ``gauss[:sigma[:center]]``, ``cluster[:k[:sigma]]``, ``point:x``."""
    name, *args = text.split(":")
    try:
        if name == "uniform":
            return UniformCube()
        if name == "gauss":
            sigma = float(args[0]) if args else 0.2
            center = float(args[1]) if len(args) > 1 else 0.5
            return SameDist(TruncatedGaussian(tuple([center] * d), sigma))
        if name == "cluster":
            k = int(args[0]) if args else 4
            sigma = float(args[1]) if len(args) > 1 else 0.05
            return ClusterMix.seeded(k, d, sigma)
        if name == "point":
            x = float(args[0]) if args else 0.5
            return SameDist(PointMass(tuple([x] * d)))
    except (ValueError, IndexError) as exc:
        raise ValueError(f"bad distribution {text!r}: {exc}") from None
    raise ValueError(f"unknown distribution {text!r}")
