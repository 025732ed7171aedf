"""Entry distributions and path-addressed random streams.

A :class:`RandomStream` is a value ``(seed, path)``. Its 64-bit key is a
fold of the SplitMix64 finalizer over the path, so a child key is a pure
function of the parent key and the extension. :func:`sample_matrix` uses
that to derive the per-entry streams ``path + [i, j]`` for a whole grid in
a few vectorized numpy operations.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import ObjectiveMatrix

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def _combine(key: int, p: int) -> int:
    return _mix(key ^ _mix((p + 1) * _GOLDEN))


_S30, _S27, _S31, _S11 = (np.uint64(k) for k in (30, 27, 31, 11))
_M1_NP, _M2_NP = np.uint64(_M1), np.uint64(_M2)


def _mix_np(z: np.ndarray) -> np.ndarray:
    # array-level uint64 arithmetic wraps modulo 2^64 without warnings
    z = (z ^ (z >> _S30)) * _M1_NP
    z = (z ^ (z >> _S27)) * _M2_NP
    return z ^ (z >> _S31)


@lru_cache(maxsize=None)
def _salts(count: int) -> np.ndarray:
    """``_mix((p + 1) * _GOLDEN)`` for p < count, the per-index half of :func:`_combine`."""
    out = np.array([_mix((p + 1) * _GOLDEN) for p in range(count)], dtype=np.uint64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _offsets(count: int) -> np.ndarray:
    out = np.array([(u * _GOLDEN) & _MASK for u in range(1, count + 1)], dtype=np.uint64)
    out.setflags(write=False)
    return out


def _words_np(keys: np.ndarray, count: int) -> np.ndarray:
    """``count`` 64-bit words per key, SplitMix64 style; shape keys.shape + (count,)."""
    return _mix_np(keys[..., None] + _offsets(count))


def _unit_np(words: np.ndarray) -> np.ndarray:
    """Map 64-bit words to [0, 1) using the top 53 bits."""
    return (words >> _S11).astype(np.float64) * (1.0 / (1 << 53))


@dataclass(frozen=True)
class RandomStream:
    seed: int
    path: tuple[int, ...] = ()
    key: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not 0 <= self.seed <= _MASK:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        path = tuple(int(p) for p in self.path)
        if any(p < 0 for p in path):
            raise ValueError(f"path entries must be non-negative, got {path}")
        object.__setattr__(self, "path", path)
        key = _mix(self.seed ^ _GOLDEN)
        for p in path:
            key = _combine(key, p)
        object.__setattr__(self, "key", key)

    def child(self, *extension: int) -> RandomStream:
        return RandomStream(self.seed, self.path + tuple(extension))

    def generator(self) -> np.random.Generator:
        """A numpy generator for bulk draws that are not entry-addressed."""
        return np.random.Generator(np.random.PCG64(self.key))

    def uniforms(self, count: int) -> np.ndarray:
        return _unit_np(_words_np(np.array([self.key], dtype=np.uint64), count))[0]


@dataclass(frozen=True)
class DistributionSpec:
    """One of ``uniform(lo, hi)`` or ``gaussian(sigma)``.

    ``SymmetricUniform(h)`` is represented as ``uniform(-h, h)``; use
    :meth:`symmetric_uniform` to build it.
    """

    kind: str
    lo: float = 0.0
    hi: float = 1.0
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if self.kind == "uniform":
            if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
                raise ValueError("uniform bounds must be finite")
            if not self.lo < self.hi:
                raise ValueError(f"uniform interval needs lo < hi, got [{self.lo}, {self.hi}]")
        elif self.kind == "gaussian":
            if not (math.isfinite(self.sigma) and self.sigma > 0):
                raise ValueError(f"gaussian sigma must be positive, got {self.sigma}")
        else:
            raise ValueError(f"unknown distribution kind {self.kind!r}")

    @classmethod
    def uniform(cls, lo: float, hi: float) -> DistributionSpec:
        return cls("uniform", lo=float(lo), hi=float(hi))

    @classmethod
    def symmetric_uniform(cls, halfwidth: float) -> DistributionSpec:
        if not halfwidth > 0:
            raise ValueError(f"halfwidth must be positive, got {halfwidth}")
        return cls("uniform", lo=-float(halfwidth), hi=float(halfwidth))

    @classmethod
    def gaussian(cls, sigma: float = 1.0) -> DistributionSpec:
        return cls("gaussian", sigma=float(sigma))

    @classmethod
    def parse(cls, text: str) -> DistributionSpec:
        """Parse ``uniform:<lo>:<hi>``, ``symuniform:<h>`` or ``gaussian:<sigma>``."""
        name, *args = text.strip().split(":")
        try:
            values = [float(a) for a in args]
        except ValueError:
            raise ValueError(f"bad numeric argument in distribution {text!r}") from None
        arity = {"uniform": 2, "symuniform": 1, "gaussian": 1}
        if name not in arity:
            raise ValueError(f"unknown distribution {name!r} in {text!r}")
        if len(values) != arity[name]:
            raise ValueError(f"{name} takes {arity[name]} argument(s), got {text!r}")
        if name == "uniform":
            return cls.uniform(*values)
        if name == "symuniform":
            return cls.symmetric_uniform(values[0])
        return cls.gaussian(values[0])

    def __str__(self) -> str:
        if self.kind == "gaussian":
            return f"gaussian:{self.sigma!r}"
        if self.lo == -self.hi:
            return f"symuniform:{self.hi!r}"
        return f"uniform:{self.lo!r}:{self.hi!r}"

    @property
    def is_symmetric(self) -> bool:
        return self.kind == "gaussian" or self.lo == -self.hi

    def support(self) -> tuple[float, float]:
        if self.kind == "gaussian":
            return (-math.inf, math.inf)
        return (self.lo, self.hi)

    def _transform(self, u0: np.ndarray, u1: np.ndarray) -> np.ndarray:
        if self.kind == "uniform":
            # lo + (hi - lo) * u can round up to hi when u is just below 1
            return np.minimum(self.lo + (self.hi - self.lo) * u0, self.hi)
        # Box-Muller on (0, 1] x [0, 1)
        radius = np.sqrt(-2.0 * np.log1p(-u0))
        return self.sigma * radius * np.cos(2.0 * math.pi * u1)


def phi_of(spec: DistributionSpec) -> float:
    """Supremum of the density of ``spec``."""
    if spec.kind == "uniform":
        return 1.0 / (spec.hi - spec.lo)
    return 1.0 / (spec.sigma * math.sqrt(2.0 * math.pi))


def sample_entry(spec: DistributionSpec, stream: RandomStream) -> float:
    u0, u1 = stream.uniforms(2)
    return float(spec._transform(np.array([u0]), np.array([u1]))[0])


@dataclass(frozen=True, eq=False)
class MatrixDistribution:
    specs: tuple[tuple[DistributionSpec, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(r) for r in self.specs)
        if not rows or not rows[0]:
            raise ValueError("matrix distribution needs d >= 1 and n >= 1")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged distribution grid")
        object.__setattr__(self, "specs", rows)

    @classmethod
    def iid(cls, d: int, n: int, spec: DistributionSpec) -> MatrixDistribution:
        return cls(tuple((spec,) * n for _ in range(d)))

    @property
    def d(self) -> int:
        return len(self.specs)

    @property
    def n(self) -> int:
        return len(self.specs[0])

    @property
    def is_symmetric(self) -> bool:
        return all(s.is_symmetric for row in self.specs for s in row)

    @property
    def phi(self) -> float:
        return max(phi_of(s) for row in self.specs for s in row)

    def groups(self) -> list[tuple[DistributionSpec, np.ndarray]]:
        """Distinct specs with boolean masks of the cells using them."""
        cached = self.__dict__.get("_groups")
        if cached is None:
            cached = []
            for spec in dict.fromkeys(s for row in self.specs for s in row):
                mask = np.array([[s == spec for s in row] for row in self.specs])
                cached.append((spec, mask))
            object.__setattr__(self, "_groups", cached)
        return cached


def sample_matrix(md: MatrixDistribution, stream: RandomStream) -> ObjectiveMatrix:
    """Entry (i, j) is ``sample_entry(md.specs[i][j], stream.child(i, j))``."""
    d, n = md.d, md.n
    row_keys = _mix_np(np.uint64(stream.key) ^ _salts(d))
    keys = _mix_np(row_keys[:, None] ^ _salts(n)[None, :])
    u = _unit_np(_words_np(keys, 2))
    u0, u1 = u[..., 0], u[..., 1]
    groups = md.groups()
    if len(groups) == 1:
        return ObjectiveMatrix(groups[0][0]._transform(u0, u1))
    out = np.empty((d, n))
    for spec, mask in groups:
        out[mask] = spec._transform(u0[mask], u1[mask])
    return ObjectiveMatrix(out)


def sample_entries(
    spec: DistributionSpec, stream: RandomStream, shape: Sequence[int]
) -> np.ndarray:
    """Bulk i.i.d. draws for a grid of the given shape, addressed like :func:`sample_matrix`."""
    d, n = shape
    return sample_matrix(MatrixDistribution.iid(d, n, spec), stream).entries
