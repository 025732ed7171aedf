"""Objective matrices, solutions, and the dominance relation.

Every comparison here is exact floating-point comparison. Under the
continuous distributions used throughout the package ties have probability
zero, and a tolerance would quietly change which points dominate which.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class Domain(enum.Enum):
    ZERO_ONE = "01"
    PLUS_MINUS_ONE = "pm1"

    @property
    def values(self) -> tuple[int, int]:
        return (0, 1) if self is Domain.ZERO_ONE else (-1, 1)


class Sense(enum.Enum):
    MAXIMIZE = "max"
    MINIMIZE = "min"


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ObjectiveMatrix:
    """A d x n matrix of linear objectives; row i is the objective v^(i)."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=np.float64, copy=True)
        if entries.ndim != 2:
            raise ValueError(f"objective matrix must be 2-D, got shape {entries.shape}")
        if entries.shape[0] < 1 or entries.shape[1] < 1:
            raise ValueError(f"objective matrix needs d >= 1 and n >= 1, got {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ValueError("objective matrix entries must be finite")
        object.__setattr__(self, "entries", _frozen(entries))

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    def row(self, i: int) -> np.ndarray:
        return self.entries[i]

    def column(self, j: int) -> np.ndarray:
        return self.entries[:, j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ObjectiveMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(
            np.array_equal(self.entries, other.entries)
        )

    def __hash__(self) -> int:
        return hash((self.entries.shape, self.entries.tobytes()))


@dataclass(frozen=True)
class Solution:
    bits: tuple[int, ...]
    domain: Domain = Domain.ZERO_ONE

    def __post_init__(self) -> None:
        bits = tuple(int(b) for b in self.bits)
        allowed = self.domain.values
        bad = [b for b in bits if b not in allowed]
        if bad:
            raise ValueError(f"coordinates {bad} outside domain {allowed}")
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return len(self.bits)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.bits, dtype=np.int8)

    def __str__(self) -> str:
        if self.domain is Domain.ZERO_ONE:
            return "".join(str(b) for b in self.bits)
        return "".join("+" if b > 0 else "-" for b in self.bits)


@dataclass(frozen=True)
class ObjectiveVector:
    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        coords = tuple(float(c) for c in self.coords)
        if not coords:
            raise ValueError("objective vector must be non-empty")
        if not all(np.isfinite(coords)):
            raise ValueError("objective vector coordinates must be finite")
        object.__setattr__(self, "coords", coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i: int) -> float:
        return self.coords[i]


@dataclass(frozen=True)
class DominanceOrder:
    senses: tuple[Sense, ...]

    def __post_init__(self) -> None:
        senses = tuple(Sense(s) for s in self.senses)
        if not senses:
            raise ValueError("dominance order needs at least one coordinate")
        object.__setattr__(self, "senses", senses)

    @classmethod
    def maximize(cls, d: int) -> DominanceOrder:
        return cls((Sense.MAXIMIZE,) * d)

    @classmethod
    def knapsack(cls, d: int) -> DominanceOrder:
        """``d`` maximized profits followed by one minimized weight."""
        return cls((Sense.MAXIMIZE,) * d + (Sense.MINIMIZE,))

    def __len__(self) -> int:
        return len(self.senses)

    @property
    def signs(self) -> np.ndarray:
        """+1 for maximized coordinates, -1 for minimized ones."""
        return np.array([1.0 if s is Sense.MAXIMIZE else -1.0 for s in self.senses])

    def flipped(self, i: int) -> DominanceOrder:
        senses = list(self.senses)
        senses[i] = Sense.MINIMIZE if senses[i] is Sense.MAXIMIZE else Sense.MAXIMIZE
        return DominanceOrder(tuple(senses))


def _as_solution_array(x: Solution | Sequence[int] | np.ndarray) -> np.ndarray:
    if isinstance(x, Solution):
        return x.as_array()
    return np.asarray(x)


def evaluate_rows(V: ObjectiveMatrix, X: np.ndarray) -> np.ndarray:
    """Objective values of every row of ``X`` (shape m x n), as an m x d array.

    Columns are accumulated in index order. Every enumerator in the package
    goes through this routine (or reproduces the same order), which keeps
    values bit-identical across algorithms.
    """
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] != V.n:
        raise ValueError(f"solution length {X.shape[-1]} does not match n={V.n}")
    out = np.zeros((X.shape[0], V.d))
    cols = V.entries.T
    for j in range(V.n):
        xj = X[:, j]
        if np.all(xj == 0):
            continue
        out += xj[:, None] * cols[j]
    return out


def evaluate(V: ObjectiveMatrix, x: Solution | Sequence[int]) -> ObjectiveVector:
    bits = _as_solution_array(x)
    if bits.ndim != 1 or bits.shape[0] != V.n:
        raise ValueError(f"solution length {bits.shape[0]} does not match n={V.n}")
    return ObjectiveVector(tuple(evaluate_rows(V, bits[None, :])[0]))


def _check_order(points: np.ndarray, order: DominanceOrder) -> None:
    if points.shape[1] != len(order):
        raise ValueError(
            f"points have {points.shape[1]} coordinates but order has {len(order)}"
        )


def as_points(points: Iterable[ObjectiveVector | Sequence[float]] | np.ndarray) -> np.ndarray:
    if isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=np.float64)
    else:
        arr = np.array([tuple(p) for p in points], dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("points must form a 2-D array")
    return arr


def dominates(
    b: ObjectiveVector | Sequence[float],
    a: ObjectiveVector | Sequence[float],
    order: DominanceOrder | None = None,
) -> bool:
    """True iff ``b`` is at least as good as ``a`` everywhere and better somewhere."""
    bv = np.asarray(tuple(b), dtype=np.float64)
    av = np.asarray(tuple(a), dtype=np.float64)
    if bv.shape != av.shape:
        raise ValueError(f"length mismatch: {bv.shape[0]} vs {av.shape[0]}")
    if order is None:
        order = DominanceOrder.maximize(bv.shape[0])
    if len(order) != bv.shape[0]:
        raise ValueError(f"order has {len(order)} senses for {bv.shape[0]} coordinates")
    s = order.signs
    bs, as_ = bv * s, av * s
    return bool(np.all(bs >= as_) and np.any(bs > as_))


def to_maximization(points: np.ndarray, order: DominanceOrder) -> np.ndarray:
    """Negate minimized coordinates so that plain maximization applies."""
    _check_order(points, order)
    return points * order.signs


_CHUNK = 1 << 21


def pareto_filter(
    points: Iterable[ObjectiveVector | Sequence[float]] | np.ndarray,
    order: DominanceOrder | None = None,
) -> list[int]:
    """Indices of the points not dominated by any other point (pairwise test)."""
    P = as_points(points)
    if P.shape[0] == 0:
        raise ValueError("pareto_filter needs at least one point")
    if order is None:
        order = DominanceOrder.maximize(P.shape[1])
    P = to_maximization(P, order)
    m = P.shape[0]
    dominated = np.zeros(m, dtype=bool)
    # block over candidate rows to bound the block x m temporaries
    rows = max(1, _CHUNK // m)
    for start in range(0, m, rows):
        dominated[start : start + rows] = dominated_by(P, P[start : start + rows])
    return [int(i) for i in np.flatnonzero(~dominated)]


def dominated_by(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Mask over rows of ``B``: dominated by some row of ``A``, both in maximization form."""
    if A.shape[0] == 0 or B.shape[0] == 0:
        return np.zeros(B.shape[0], dtype=bool)
    ge = np.ones((B.shape[0], A.shape[0]), dtype=bool)
    gt = np.zeros_like(ge)
    for k in range(A.shape[1]):
        a, b = A[None, :, k], B[:, k, None]
        ge &= a >= b
        gt |= a > b
    return np.any(ge & gt, axis=1)
