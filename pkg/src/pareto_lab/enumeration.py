"""Feasible-set families and exact Pareto-set enumeration.

Three exact methods are provided and cross-checked in the tests:

* :func:`pareto_bruteforce` enumerates the feasible set and applies the
  pairwise :func:`~pareto_lab.core.pareto_filter`. It is the oracle.
* :func:`pareto_maxima_dc` is a divide-and-conquer maximal-vector filter.
* :func:`pareto_incremental_cube` is the Nemhauser-Ullmann style sweep over
  the items of the full cube.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence, Union

import numpy as np

from .core import (
    Domain,
    DominanceOrder,
    ObjectiveMatrix,
    ObjectiveVector,
    Solution,
    as_points,
    dominated_by,
    evaluate_rows,
    pareto_filter,
    to_maximization,
)

ENUMERATION_BUDGET = 1 << 26
PARETO_BUDGET = 1 << 22


class CapacityError(RuntimeError):
    """An enumeration or a stored Pareto set would exceed its budget."""

    def __init__(self, message: str, size: int):
        super().__init__(message)
        self.size = size


def _cube_array(n: int, values: tuple[int, int] = (0, 1)) -> np.ndarray:
    codes = np.arange(1 << n, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n - 1, -1, -1)) & 1
    lo, hi = values
    return np.where(bits == 1, hi, lo).astype(np.int8)


def edge_index(a: int, b: int, m: int) -> int:
    """Position of edge {a, b} of K_m in lexicographic pair order, 0-based."""
    if a == b or not (0 <= a < m and 0 <= b < m):
        raise ValueError(f"invalid edge ({a}, {b}) for K_{m}")
    a, b = min(a, b), max(a, b)
    return a * m - a * (a + 1) // 2 + (b - a - 1)


def edge_list(m: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(m), 2))


def prufer_to_edges(seq: Sequence[int], m: int) -> list[tuple[int, int]]:
    """Decode a Prüfer sequence of length m - 2 into the m - 1 tree edges."""
    degree = [1] * m
    for v in seq:
        degree[v] += 1
    leaves = [v for v in range(m) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, v), max(leaf, v)))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    a, b = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((a, b))
    return edges


@lru_cache(maxsize=8)
def _spanning_tree_array(m: int) -> np.ndarray:
    if m == 1:
        out = np.zeros((1, 0), dtype=np.int8)
    elif m == 2:
        out = np.ones((1, 1), dtype=np.int8)
    else:
        index = {e: k for k, e in enumerate(edge_list(m))}
        out = np.zeros((m ** (m - 2), m * (m - 1) // 2), dtype=np.int8)
        for row, seq in enumerate(itertools.product(range(m), repeat=m - 2)):
            for e in prufer_to_edges(seq, m):
                out[row, index[e]] = 1
    out.setflags(write=False)
    return out


def gadget_tree_edges(m: int, choice: Sequence[int]) -> list[tuple[int, int]]:
    """Edges of the gadget tree selected by ``choice`` (vertices s=0, t=1, u_j=j+1).

    ``choice[j-1] == 1`` picks edge (s, u_j), otherwise (t, u_j).
    """
    edges = [(0, 1)]
    for j, c in enumerate(choice, start=2):
        edges.append((0, j) if c else (1, j))
    return edges


@dataclass(frozen=True)
class FullCube:
    n: int
    domain = Domain.ZERO_ONE

    @property
    def length(self) -> int:
        return self.n

    def cardinality(self) -> int:
        return 1 << self.n

    def _array(self) -> np.ndarray:
        return _cube_array(self.n)

    def __str__(self) -> str:
        return f"cube:{self.n}"


@dataclass(frozen=True)
class SignCube:
    n: int
    domain = Domain.PLUS_MINUS_ONE

    @property
    def length(self) -> int:
        return self.n

    def cardinality(self) -> int:
        return 1 << self.n

    def _array(self) -> np.ndarray:
        return _cube_array(self.n, (-1, 1))

    def __str__(self) -> str:
        return f"signcube:{self.n}"


@dataclass(frozen=True)
class FixedCardinality:
    n: int
    k: int
    domain = Domain.ZERO_ONE

    def __post_init__(self) -> None:
        if not 0 <= self.k <= self.n:
            raise ValueError(f"need 0 <= k <= n, got n={self.n}, k={self.k}")

    @property
    def length(self) -> int:
        return self.n

    def cardinality(self) -> int:
        return math.comb(self.n, self.k)

    def _array(self) -> np.ndarray:
        cube = _cube_array(self.n)
        return cube[cube.sum(axis=1) == self.k]

    def __str__(self) -> str:
        return f"fixedcard:{self.n}:{self.k}"


@dataclass(frozen=True)
class SpanningTreesComplete:
    """Incidence vectors of the spanning trees of K_m, in Prüfer-sequence order."""

    m: int
    domain = Domain.ZERO_ONE

    @property
    def length(self) -> int:
        return self.m * (self.m - 1) // 2

    def cardinality(self) -> int:
        return self.m ** (self.m - 2) if self.m >= 2 else 1

    def _array(self) -> np.ndarray:
        return _spanning_tree_array(self.m)

    def __str__(self) -> str:
        return f"trees:{self.m}"


@dataclass(frozen=True)
class GadgetTrees:
    """Trees with edge (s, t) and exactly one of (s, u_j), (t, u_j) for every j."""

    m: int
    domain = Domain.ZERO_ONE

    def __post_init__(self) -> None:
        if self.m < 3:
            raise ValueError(f"gadget trees need m >= 3, got {self.m}")

    @property
    def length(self) -> int:
        return self.m * (self.m - 1) // 2

    def cardinality(self) -> int:
        return 1 << (self.m - 2)

    def choices(self) -> np.ndarray:
        """The (m-2)-bit selector of each tree, in the same order as the trees."""
        return _cube_array(self.m - 2)

    def _array(self) -> np.ndarray:
        m = self.m
        out = np.zeros((self.cardinality(), self.length), dtype=np.int8)
        st = edge_index(0, 1, m)
        su = np.array([edge_index(0, j, m) for j in range(2, m)])
        tu = np.array([edge_index(1, j, m) for j in range(2, m)])
        x = self.choices()
        out[:, st] = 1
        out[:, su] = x
        out[:, tu] = 1 - x
        return out

    def __str__(self) -> str:
        return f"gadgettrees:{self.m}"


@dataclass(frozen=True)
class ExplicitList:
    solutions: tuple[Solution, ...]

    def __post_init__(self) -> None:
        sols = tuple(self.solutions)
        if not sols:
            raise ValueError("explicit feasible set must be non-empty")
        if len({len(s) for s in sols}) != 1 or len({s.domain for s in sols}) != 1:
            raise ValueError("explicit solutions must share length and domain")
        object.__setattr__(self, "solutions", sols)

    @property
    def length(self) -> int:
        return len(self.solutions[0])

    @property
    def domain(self) -> Domain:
        return self.solutions[0].domain

    def cardinality(self) -> int:
        return len(self.solutions)

    def _array(self) -> np.ndarray:
        return np.array([s.bits for s in self.solutions], dtype=np.int8).reshape(
            len(self.solutions), self.length
        )

    def __str__(self) -> str:
        return "list:" + ",".join(str(s) for s in self.solutions)


FeasibleSet = Union[
    FullCube, SignCube, FixedCardinality, SpanningTreesComplete, GadgetTrees, ExplicitList
]


def parse_feasible_set(text: str) -> FeasibleSet:
    """Parse ``cube:<n>``, ``signcube:<n>``, ``fixedcard:<n>:<k>``, ``trees:<m>``, ``gadgettrees:<m>``."""
    name, *args = text.strip().split(":")
    try:
        ints = [int(a) for a in args]
    except ValueError:
        raise ValueError(f"bad integer in feasible set {text!r}") from None
    table = {
        "cube": (FullCube, 1),
        "signcube": (SignCube, 1),
        "fixedcard": (FixedCardinality, 2),
        "trees": (SpanningTreesComplete, 1),
        "gadgettrees": (GadgetTrees, 1),
    }
    if name not in table:
        raise ValueError(f"unknown feasible set {name!r}")
    cls, arity = table[name]
    if len(ints) != arity or any(v < 1 for v in ints[:1]):
        raise ValueError(f"{name} takes {arity} positive integer argument(s), got {text!r}")
    return cls(*ints)


def feasible_array(fs: FeasibleSet, budget: int = ENUMERATION_BUDGET) -> np.ndarray:
    """All feasible solutions as rows of an int8 array, in enumeration order."""
    size = fs.cardinality()
    if size > budget:
        raise CapacityError(f"{fs} has {size} solutions, budget is {budget}", size)
    return fs._array()


def enumerate_feasible(fs: FeasibleSet, budget: int = ENUMERATION_BUDGET) -> Iterator[Solution]:
    X = feasible_array(fs, budget)
    for row in X:
        yield Solution(tuple(row.tolist()), fs.domain)


@dataclass(frozen=True)
class ParetoSet:
    """Pareto-optimal solutions with their objective vectors.

    ``multiplicity[i]`` counts the feasible solutions sharing ``values[i]``
    when an enumerator stores one representative per value; ``count`` is
    the number of Pareto-optimal solutions.
    """

    solutions: tuple[Solution, ...]
    values: tuple[ObjectiveVector, ...]
    multiplicity: tuple[int, ...]

    @property
    def count(self) -> int:
        return sum(self.multiplicity)

    def value_set(self) -> list[tuple[float, ...]]:
        return sorted(v.coords for v in self.values)

    def value_multiset(self) -> list[tuple[tuple[float, ...], int]]:
        merged: dict[tuple[float, ...], int] = {}
        for v, k in zip(self.values, self.multiplicity):
            merged[v.coords] = merged.get(v.coords, 0) + k
        return sorted(merged.items())


def _pareto_set(X: np.ndarray, values: np.ndarray, idx, domain: Domain, mult=None) -> ParetoSet:
    idx = list(idx)
    return ParetoSet(
        solutions=tuple(Solution(tuple(X[i].tolist()), domain) for i in idx),
        values=tuple(ObjectiveVector(tuple(values[i])) for i in idx),
        multiplicity=tuple([1] * len(idx) if mult is None else (int(mult[i]) for i in idx)),
    )


def _default_order(V: ObjectiveMatrix, order: DominanceOrder | None) -> DominanceOrder:
    order = order or DominanceOrder.maximize(V.d)
    if len(order) != V.d:
        raise ValueError(f"order has {len(order)} senses for d={V.d}")
    return order


def _check_length(V: ObjectiveMatrix, fs: FeasibleSet) -> None:
    if fs.length != V.n:
        raise ValueError(f"feasible vectors have length {fs.length} but V has n={V.n}")


def pareto_bruteforce(
    V: ObjectiveMatrix,
    fs: FeasibleSet,
    order: DominanceOrder | None = None,
    budget: int = ENUMERATION_BUDGET,
) -> ParetoSet:
    order = _default_order(V, order)
    _check_length(V, fs)
    X = feasible_array(fs, budget)
    values = evaluate_rows(V, X)
    return _pareto_set(X, values, pareto_filter(values, order), fs.domain)


_DC_BASE = 32


def _maxima(P: np.ndarray, order_idx: np.ndarray) -> np.ndarray:
    if order_idx.shape[0] <= _DC_BASE:
        block = P[order_idx]
        return order_idx[~dominated_by(block, block)]
    mid = order_idx.shape[0] // 2
    left = _maxima(P, order_idx[:mid])
    right = _maxima(P, order_idx[mid:])
    L, R = P[left], P[right]
    right = right[~dominated_by(L, R)]
    # a right point can only beat a left point through a tie in the sort key
    if P[order_idx[mid - 1], 0] == P[order_idx[mid], 0]:
        left = left[~dominated_by(P[right], L)]
    return np.concatenate([left, right])


def pareto_maxima_dc(
    points: Sequence[ObjectiveVector | Sequence[float]] | np.ndarray,
    order: DominanceOrder | None = None,
) -> list[int]:
    """Divide-and-conquer maximal-vector filter; same output as ``pareto_filter``.

    Points are sorted by the first (maximized) coordinate, the two halves are
    reduced recursively, and the lower half's survivors are screened against
    the upper half's.
    """
    P = as_points(points)
    if P.shape[0] == 0:
        raise ValueError("pareto_maxima_dc needs at least one point")
    order = order or DominanceOrder.maximize(P.shape[1])
    P = to_maximization(P, order)
    # descending first coordinate, ties by index for determinism
    order_idx = np.lexsort((np.arange(P.shape[0]), -P[:, 0]))
    return sorted(int(i) for i in _maxima(P, order_idx))


def pareto_incremental_cube(
    V: ObjectiveMatrix,
    order: DominanceOrder | None = None,
    pareto_budget: int = PARETO_BUDGET,
) -> ParetoSet:
    """Pareto set of ``{Vr : r in {0,1}^n}`` by adding one item at a time.

    After item j the stored set is the Pareto set of the cube on the first j
    items. A prefix of a Pareto-optimal solution is Pareto-optimal for its
    prefix instance, so nothing is lost by discarding dominated values early.
    Equal values are merged and their solution counts summed.
    """
    order = _default_order(V, order)
    signs = order.signs
    n, d = V.n, V.d
    values = np.zeros((1, d))
    reps = np.zeros((1, n), dtype=np.int8)
    mult = np.ones(1, dtype=np.int64)
    for j in range(n):
        added = values + V.entries[:, j]
        reps_added = reps.copy()
        reps_added[:, j] = 1
        values = np.concatenate([values, added]) + 0.0
        reps = np.concatenate([reps, reps_added])
        mult = np.concatenate([mult, mult])
        uniq, first, inverse = np.unique(values, axis=0, return_index=True, return_inverse=True)
        if uniq.shape[0] < values.shape[0]:
            mult = np.bincount(inverse.ravel(), weights=mult, minlength=uniq.shape[0]).astype(np.int64)
            reps = reps[first]
            values = uniq
        keep = np.array(pareto_maxima_dc(values * signs), dtype=np.int64)
        values, reps, mult = values[keep], reps[keep], mult[keep]
        if values.shape[0] > pareto_budget:
            raise CapacityError(
                f"Pareto set reached {values.shape[0]} values after item {j + 1}, "
                f"budget is {pareto_budget}",
                int(mult.sum()),
            )
    # recompute values in the shared evaluation order for exact comparisons
    final = evaluate_rows(V, reps)
    return _pareto_set(reps, final, range(reps.shape[0]), Domain.ZERO_ONE, mult)


def pareto_set(
    V: ObjectiveMatrix,
    fs: FeasibleSet,
    order: DominanceOrder | None = None,
    budget: int = ENUMERATION_BUDGET,
) -> ParetoSet:
    """Exact Pareto set using the cheapest applicable method."""
    order = _default_order(V, order)
    _check_length(V, fs)
    if isinstance(fs, FullCube) and fs.n > 12:
        return pareto_incremental_cube(V, order)
    X = feasible_array(fs, budget)
    values = evaluate_rows(V, X)
    return _pareto_set(X, values, pareto_maxima_dc(values, order), fs.domain)


def count_pareto(
    V: ObjectiveMatrix,
    fs: FeasibleSet,
    order: DominanceOrder | None = None,
    budget: int = ENUMERATION_BUDGET,
) -> int:
    """Number of feasible solutions whose objective vector is non-dominated."""
    return pareto_set(V, fs, order, budget).count


def is_pareto_optimal(
    V: ObjectiveMatrix,
    x: Solution | Sequence[int],
    fs: FeasibleSet,
    order: DominanceOrder | None = None,
    budget: int = ENUMERATION_BUDGET,
) -> bool:
    """True iff no feasible solution dominates ``x`` (``x`` need not be feasible)."""
    order = _default_order(V, order)
    _check_length(V, fs)
    bits = np.asarray(x.bits if isinstance(x, Solution) else x, dtype=np.int8)
    values = evaluate_rows(V, feasible_array(fs, budget)) * order.signs
    target = evaluate_rows(V, bits[None, :]) * order.signs
    return not bool(dominated_by(values, target)[0])


def flip_columns(V: ObjectiveMatrix, r: Sequence[int]) -> ObjectiveMatrix:
    """Negate column j of V wherever ``r[j] == 0``."""
    r = np.asarray(r)
    if r.shape != (V.n,):
        raise ValueError(f"selector length {r.shape} does not match n={V.n}")
    return ObjectiveMatrix(V.entries * np.where(r == 1, 1.0, -1.0))
