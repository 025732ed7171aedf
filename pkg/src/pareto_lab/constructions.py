"""Explicit instance families: the spanning-tree gadget, unit-weight knapsack,
and the parameter schedule of the cloning construction.

Vertex count of the complete graph is ``m`` everywhere in this module, so it
never collides with ``n``, the number of variables of the embedded instance.
Vertices are numbered s=0, t=1, u_j=j+1 and edges follow
:func:`~pareto_lab.enumeration.edge_index`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .core import DominanceOrder, ObjectiveMatrix, Solution
from .enumeration import (
    CapacityError,
    FixedCardinality,
    FullCube,
    GadgetTrees,
    SpanningTreesComplete,
    edge_index,
    edge_list,
    feasible_array,
    is_pareto_optimal,
    pareto_set,
)
from .sampling import DistributionSpec, MatrixDistribution, RandomStream, sample_matrix

TREE_LIMIT = 8
KNAPSACK_LIMIT = 20

ST_EDGE = DistributionSpec.uniform(0.5, 1.0)
SPOKE_EDGE = DistributionSpec.uniform(-0.5, 0.5)
OUTSIDE_EDGE = DistributionSpec.uniform(-1.0, -0.5)


def _edge_role(a: int, b: int) -> str:
    if (a, b) == (0, 1):
        return "st"
    if a in (0, 1):
        return "spoke"
    return "outside"


@dataclass(frozen=True)
class TreeGadgetInstance:
    m: int
    d: int
    distribution: MatrixDistribution
    feasible: SpanningTreesComplete

    @property
    def gadget_trees(self) -> GadgetTrees:
        return GadgetTrees(self.m)

    @property
    def bound_target(self) -> float:
        return tree_gadget_bound(self.m, self.d)


def tree_gadget_bound(m: int, d: int) -> float:
    """Expected Pareto-tree count guaranteed by the gadget, ((m-3)/(2(d-1)))^(d-1)."""
    if m < 3 or d < 2:
        raise ValueError(f"need m >= 3 and d >= 2, got m={m}, d={d}")
    return ((m - 3) / (2 * (d - 1))) ** (d - 1)


def build_tree_gadget(m: int, d: int) -> TreeGadgetInstance:
    if m < 3 or d < 2:
        raise ValueError(f"need m >= 3 and d >= 2, got m={m}, d={d}")
    spec = {"st": ST_EDGE, "spoke": SPOKE_EDGE, "outside": OUTSIDE_EDGE}
    row = tuple(spec[_edge_role(a, b)] for a, b in edge_list(m))
    return TreeGadgetInstance(m, d, MatrixDistribution((row,) * d), SpanningTreesComplete(m))


def _check_tree_instance(V: ObjectiveMatrix, m: int, limit: int) -> None:
    if m > limit:
        raise CapacityError(f"K_{m} has {m ** (m - 2)} spanning trees, limit is m <= {limit}", m ** (m - 2))
    if V.n != m * (m - 1) // 2:
        raise ValueError(f"profit matrix has {V.n} columns, K_{m} has {m * (m - 1) // 2} edges")


def gadget_claim_violations(V: ObjectiveMatrix, m: int, limit: int = TREE_LIMIT) -> list[Solution]:
    """Pareto-optimal spanning trees of K_m that are not gadget trees."""
    _check_tree_instance(V, m, limit)
    front = pareto_set(V, SpanningTreesComplete(m))
    gadget = {tuple(row) for row in feasible_array(GadgetTrees(m)).tolist()}
    return [s for s in front.solutions if s.bits not in gadget]


def verify_gadget_claim(V: ObjectiveMatrix, m: int, d: int | None = None, limit: int = TREE_LIMIT) -> bool:
    if d is not None and V.d != d:
        raise ValueError(f"profit matrix has {V.d} objectives, expected {d}")
    return not gadget_claim_violations(V, m, limit)


def gadget_pareto_count(V: ObjectiveMatrix, m: int, d: int | None = None) -> int:
    """Pareto count over the gadget trees only."""
    if d is not None and V.d != d:
        raise ValueError(f"profit matrix has {V.d} objectives, expected {d}")
    if V.n != m * (m - 1) // 2:
        raise ValueError(f"profit matrix has {V.n} columns, K_{m} has {m * (m - 1) // 2} edges")
    return pareto_set(V, GadgetTrees(m)).count


def spoke_differences(V: ObjectiveMatrix, m: int) -> np.ndarray:
    """d x (m-2) matrix of v(s,u_j) - v(t,u_j), the embedded sign-cube instance."""
    su = [edge_index(0, j, m) for j in range(2, m)]
    tu = [edge_index(1, j, m) for j in range(2, m)]
    return V.entries[:, su] - V.entries[:, tu]


@dataclass(frozen=True)
class KnapsackInstance:
    profits: ObjectiveMatrix
    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=np.float64)
        if w.shape != (self.profits.n,):
            raise ValueError(f"need {self.profits.n} weights, got shape {w.shape}")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        P = self.profits.entries
        if np.any(P < 0) or np.any(P > 1):
            raise ValueError("profits must lie in [0, 1]")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.profits.n

    @property
    def d(self) -> int:
        return self.profits.d

    @property
    def order(self) -> DominanceOrder:
        return DominanceOrder.knapsack(self.d)

    def objective_matrix(self) -> ObjectiveMatrix:
        """Profits stacked on the weight row; use with :attr:`order`."""
        return ObjectiveMatrix(np.vstack([self.profits.entries, self.weights]))


def build_unit_weight_knapsack(n: int, d: int, stream: RandomStream) -> KnapsackInstance:
    if n < 2 or d < 1:
        raise ValueError(f"need n >= 2 and d >= 1, got n={n}, d={d}")
    md = MatrixDistribution.iid(d, n, DistributionSpec.uniform(0.0, 1.0))
    return KnapsackInstance(sample_matrix(md, stream), np.ones(n))


def knapsack_pareto_count(instance: KnapsackInstance) -> int:
    return pareto_set(instance.objective_matrix(), FullCube(instance.n), instance.order).count


def verify_knapsack_embedding(
    instance: KnapsackInstance, k: int | None = None, limit: int = KNAPSACK_LIMIT
) -> bool:
    """Pareto optima of the centred problem on exactly k items stay optimal in the knapsack."""
    n = instance.n
    if n > limit:
        raise CapacityError(f"knapsack brute force over 2^{n} solutions exceeds n <= {limit}", 2**n)
    k = n // 2 if k is None else k
    centred = ObjectiveMatrix(instance.profits.entries - 0.5)
    restricted = pareto_set(centred, FixedCardinality(n, k))
    full = pareto_set(instance.objective_matrix(), FullCube(n), instance.order)
    optimal = {s.bits for s in full.solutions}
    if full.count != len(optimal):
        # tied objective vectors: fall back to a direct domination check
        return all(
            is_pareto_optimal(instance.objective_matrix(), s, FullCube(n), instance.order)
            for s in restricted.solutions
        )
    return all(s.bits in optimal for s in restricted.solutions)


@dataclass(frozen=True)
class BRParameters:
    n: int
    d: int
    phi: float
    n_p: int
    n_q: int
    n_q_hat: float
    phi_hat: float | None
    density_saturated: bool
    objects_used: float
    bound_value: float


def _growth(phi: float, d: int) -> float:
    return 2.0 * phi / (phi - d)


def density_condition_holds(n: int, d: int, phi: float) -> bool:
    """Whether phi <= (2 phi / (phi - d))^(n / 2d), compared in log space."""
    return math.log(phi) <= (n / (2 * d)) * math.log(_growth(phi, d))


def saturation_density(n: int, d: int) -> float:
    """The phi > d solving phi = (2 phi / (phi - d))^(n / 2d), to relative tolerance 1e-12."""
    e = n / (2 * d)

    def gap(log_phi: float) -> float:
        phi = math.exp(log_phi)
        return log_phi - e * math.log(_growth(phi, d))

    lo = math.log(d) + 1e-12
    while gap(lo) >= 0:  # pragma: no cover - gap -> -inf as phi -> d
        lo = math.log(d) + (lo - math.log(d)) / 2
    hi = max(2.0 * math.log(d) + 1.0, e * math.log(2.0) + 1.0)
    while gap(hi) <= 0:
        hi *= 2
    return math.exp(brentq(gap, lo, hi, xtol=1e-15, rtol=1e-14, maxiter=500))


def saturation_residual(phi_hat: float, n: int, d: int) -> float:
    """Relative residual of the saturation equation, measured in log space."""
    return abs(math.log(phi_hat) - (n / (2 * d)) * math.log(_growth(phi_hat, d)))


def objects_used(n_p: int, n_q: int, d: int, phi: float) -> float:
    """Object count of the cloning construction: n_p + d n_q + 2d^2/(phi-d) (2phi/(phi-d))^n_q."""
    return n_p + d * n_q + (2 * d * d / (phi - d)) * _growth(phi, d) ** n_q


def br_bound_value(params: BRParameters) -> float:
    """The explicit product n_p^(d-1.5) (2^d/d)^n_q, constants set to 1."""
    return params.n_p ** (params.d - 1.5) * (2**params.d / params.d) ** params.n_q


def br_parameters(n: int, d: int, phi: float) -> BRParameters:
    if d < 2:
        raise ValueError(f"requires d >= 2, got d={d}")
    if 4 * d * d > n / 4:
        raise ValueError(f"requires 4d^2 <= n/4, got 4d^2={4 * d * d} > n/4={n / 4}")
    if phi < 2 * d:
        raise ValueError(f"requires phi >= 2d, got phi={phi} < {2 * d}")
    n_p = n // 2
    if density_condition_holds(n, d, phi):
        n_q_hat = math.log(phi) / math.log(_growth(phi, d))
        phi_hat = None
        phi_eff = phi
    else:
        phi_hat = saturation_density(n, d)
        n_q_hat = n / (2 * d)
        phi_eff = phi_hat
    n_q = math.floor(n_q_hat)
    params = BRParameters(
        n=n,
        d=d,
        phi=float(phi),
        n_p=n_p,
        n_q=n_q,
        n_q_hat=n_q_hat,
        phi_hat=phi_hat,
        density_saturated=phi_hat is not None,
        objects_used=objects_used(n_p, n_q, d, phi_eff),
        bound_value=0.0,
    )
    return replace(params, bound_value=br_bound_value(params))
