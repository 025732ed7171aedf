"""Closed-form counts and bounds, plus convex-geometry predicates.

Closed forms are exact (``fractions.Fraction`` and Python integers). The
predicates are linear feasibility questions. With exact inputs (ints or
Fractions) they run an exact rational simplex; with floats they call HiGHS
and then re-check the answer independently: a "contained" verdict needs
convex weights with a small residual, a "separated" verdict needs a
direction that strictly separates. If neither check passes the predicate
raises :class:`NumericFailure` instead of guessing.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ._lp import FEAS_TOL, NumericFailure, exact_feasible, is_rational_input, solve_lp, to_fractions
from .core import DominanceOrder, ObjectiveMatrix, Solution, evaluate_rows, pareto_filter
from .enumeration import ENUMERATION_BUDGET, ExplicitList, FeasibleSet, FullCube, feasible_array
from .sampling import DistributionSpec, RandomStream, sample_entries

__all__ = [
    "NumericFailure",
    "HullTest",
    "wendel_probability",
    "zonotope_vertex_count_generic",
    "lower_bound_basic",
    "lower_bound_simple",
    "lower_bound_restricted",
    "origin_in_hull",
    "origin_hull_test",
    "cone_meets_negative_orthant",
    "hull_vertices",
    "sign_vectors",
    "maximal_under_flips",
    "bentley_cover_check",
    "zonotope_points",
    "random_projection_vertex_count",
    "hamming_ball",
    "random_subset",
]


def _binomial_sum(n: int, d: int) -> int:
    return sum(math.comb(n - 1, k) for k in range(d))


def _check_positive(**kwargs: int) -> None:
    for name, value in kwargs.items():
        if int(value) != value or value < 1:
            raise ValueError(f"{name} must be a positive integer, got {value}")


def wendel_probability(n: int, d: int) -> Fraction:
    """Probability that n symmetric random points in R^d miss the origin's hull."""
    _check_positive(n=n, d=d)
    return Fraction(_binomial_sum(n, d), 2 ** (n - 1))


def zonotope_vertex_count_generic(n: int, d: int) -> int:
    """Vertex count of a sum of n segments in general position in R^d."""
    _check_positive(n=n, d=d)
    if n < d:
        raise ValueError(f"need n >= d, got n={n}, d={d}")
    return 2 * _binomial_sum(n, d)


def lower_bound_basic(n: int, d: int) -> Fraction:
    _check_positive(n=n, d=d)
    return Fraction(_binomial_sum(n, d), 2 ** (d - 1))


def lower_bound_simple(n: int, d: int) -> float:
    if n < 2 or d < 2:
        raise ValueError(f"simple bound needs n >= 2 and d >= 2, got n={n}, d={d}")
    return ((n - 1) / (2 * (d - 1))) ** (d - 1)


def lower_bound_restricted(n: int, d: int, s_card: int) -> Fraction:
    _check_positive(n=n, d=d, s_card=s_card)
    if s_card > 2**n:
        raise ValueError(f"s_card={s_card} exceeds 2^n={2**n}")
    return Fraction(s_card * _binomial_sum(n, d), 2 ** (n + d - 1))


@dataclass(frozen=True)
class HullTest:
    """Outcome of an origin-in-hull test with its certificate.

    ``weights`` are convex weights reaching the origin when ``contains`` is
    true; ``direction`` has a strictly positive inner product with every
    point when it is false.
    """

    contains: bool
    weights: np.ndarray | list | None = None
    direction: np.ndarray | list | None = None


def _as_float_points(points) -> np.ndarray:
    P = np.asarray(points, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] < 1 or P.shape[1] < 1:
        raise ValueError("need a non-empty list of d-vectors")
    if not np.all(np.isfinite(P)):
        raise ValueError("points must be finite")
    return P


def _exact_origin_test(points) -> HullTest:
    P = to_fractions(points)
    m, d = len(P), len(P[0])
    A = [[P[i][k] for i in range(m)] for k in range(d)] + [[Fraction(1)] * m]
    lam = exact_feasible(A, [Fraction(0)] * d + [Fraction(1)])
    if lam is not None:
        return HullTest(True, weights=lam)
    # P u >= 1 with u = u_plus - u_minus, slack s >= 0
    A = [list(P[i]) + [-v for v in P[i]] + [Fraction(-1) if k == i else Fraction(0) for k in range(m)] for i in range(m)]
    z = exact_feasible(A, [Fraction(1)] * m)
    if z is None:
        raise ArithmeticError("exact simplex found neither weights nor a separator")
    return HullTest(False, direction=[z[k] - z[d + k] for k in range(d)])


def _planar_origin_test(P: np.ndarray) -> HullTest | None:
    """Angular-gap test in the plane; None when the gap is too close to pi to call."""
    angles = np.sort(np.arctan2(P[:, 1], P[:, 0]))
    gaps = np.diff(np.concatenate([angles, angles[:1] + 2 * math.pi]))
    k = int(np.argmax(gaps))
    gap = gaps[k]
    if gap > math.pi + 1e-7:
        mid = angles[k] + gap / 2 + math.pi
        u = np.array([math.cos(mid), math.sin(mid)])
        if np.all(P @ u > FEAS_TOL * np.linalg.norm(P, axis=1)):
            return HullTest(False, direction=u)
    elif gap < math.pi - 1e-7:
        return HullTest(True)
    return None


def _float_origin_test(P: np.ndarray, want_weights: bool) -> HullTest:
    m, d = P.shape
    norms = np.linalg.norm(P, axis=1)
    if np.any(norms == 0):
        w = (norms == 0).astype(float)
        return HullTest(True, weights=w / w.sum())
    if d == 1:
        if P.min() <= 0 <= P.max():
            return HullTest(True)
        return HullTest(False, direction=np.sign(P[:1, 0]))
    Q = P / norms[:, None]
    if d == 2 and not want_weights:
        quick = _planar_origin_test(Q)
        if quick is not None:
            return quick
    # maximize t subject to t <= q_i . u, -1 <= u <= 1, t <= 1
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-Q, np.ones((m, 1))])
    sep = solve_lp(c, A_ub=A_ub, b_ub=np.zeros(m), bounds=[(-1, 1)] * d + [(None, 1)])
    if sep.status == 0 and -sep.fun > FEAS_TOL:
        u = sep.x[:d]
        if np.all(Q @ u > FEAS_TOL / 2):
            return HullTest(False, direction=u)
    A_eq = np.vstack([Q.T, np.ones((1, m))])
    b_eq = np.concatenate([np.zeros(d), [1.0]])
    res = solve_lp(np.zeros(m), A_eq=A_eq, b_eq=b_eq, bounds=(0, None))
    if res.status == 0:
        lam = np.clip(res.x, 0, None)
        lam = lam / lam.sum()
        if np.linalg.norm(Q.T @ lam) <= FEAS_TOL:
            weights = lam / norms
            return HullTest(True, weights=weights / weights.sum())
    raise NumericFailure(f"origin-in-hull undecided for {m} points in R^{d}")


def origin_hull_test(points, exact: bool | None = None, want_weights: bool = False) -> HullTest:
    """Decide whether 0 lies in conv(points), with a certificate."""
    if exact is None:
        exact = is_rational_input(points)
    if exact:
        if not len(points) or not len(points[0]):
            raise ValueError("need a non-empty list of d-vectors")
        return _exact_origin_test(points)
    return _float_origin_test(_as_float_points(points), want_weights)


def origin_in_hull(points, exact: bool | None = None) -> bool:
    return origin_hull_test(points, exact).contains


def _exact_cone_meets(points) -> bool:
    P = to_fractions(points)
    m, d = len(P), len(P[0])
    for k in range(d):
        # sum_i a_i p_i + s = -e_k with a, s >= 0 and s_k = 0
        A = []
        for r in range(d):
            row = [P[i][r] for i in range(m)]
            row += [Fraction(1) if (c == r and r != k) else Fraction(0) for c in range(d)]
            A.append(row)
        b = [Fraction(-1) if r == k else Fraction(0) for r in range(d)]
        if exact_feasible(A, b) is not None:
            return True
    return False


def cone_meets_negative_orthant(points, exact: bool | None = None) -> bool:
    """True iff some non-zero non-negative combination of the points is <= 0 coordinatewise.

    One feasibility problem per coordinate k: is there alpha >= 0 with
    sum alpha_i p_i <= 0 and coordinate k equal to -1? A "no" answer is
    certified by u >= 0 with u_k > 0 and u . p_i >= 0 for every point.
    """
    if exact is None:
        exact = is_rational_input(points)
    if exact:
        return _exact_cone_meets(points)
    P = _as_float_points(points)
    m, d = P.shape
    norms = np.linalg.norm(P, axis=1)
    Q = P[norms > 0] / norms[norms > 0, None]
    if Q.shape[0] == 0:
        return False
    M = Q.T
    for k in range(d):
        res = solve_lp(
            np.ones(Q.shape[0]),
            A_ub=M,
            b_ub=np.zeros(d),
            A_eq=M[k : k + 1],
            b_eq=[-1.0],
        )
        if res.status == 0:
            alpha = np.clip(res.x, 0, None)
            y = M @ alpha
            scale = 1.0 + alpha.sum()
            if y[k] <= -1 + FEAS_TOL * scale and np.all(y <= FEAS_TOL * scale):
                return True
        c = np.zeros(d)
        c[k] = -1.0
        cert = solve_lp(c, A_ub=-Q, b_ub=np.zeros(Q.shape[0]), bounds=(0, 1))
        certified = (
            cert.status == 0
            and cert.x[k] > FEAS_TOL
            and np.all(Q @ np.clip(cert.x, 0, None) >= -FEAS_TOL * 1e-3)
        )
        if not certified:
            raise NumericFailure(f"cone/orthant test undecided in coordinate {k}")
    return False


def _unique_mask(P: np.ndarray) -> np.ndarray:
    """True for points that have no exact duplicate elsewhere in the list."""
    _, inverse, counts = np.unique(P, axis=0, return_inverse=True, return_counts=True)
    return counts[inverse.ravel()] == 1


def _vertex_by_lp(P: np.ndarray, i: int, pool: np.ndarray, exact: bool) -> bool:
    others = pool[pool != i]
    if others.shape[0] == 0:
        return True
    if exact:
        Pf = to_fractions(P)
        shifted = [[a - b for a, b in zip(Pf[j], Pf[i])] for j in others]
        return not _exact_origin_test(shifted).contains
    return not _float_origin_test(P[others] - P[i], want_weights=False).contains


def hull_vertices(points, method: str = "auto", exact: bool | None = None) -> list[int]:
    """Indices of the extreme points: i is a vertex iff p_i is not in conv(others).

    With ``method="auto"`` Qhull proposes candidates for d >= 2; every
    non-candidate is then confirmed strictly inside the Qhull facets (or
    re-tested by LP when it sits near the boundary), and every candidate is
    confirmed by LP against the remaining boundary points. Exact duplicates
    lie in the hull of their twins, so neither copy is a vertex.
    """
    if exact is None:
        exact = is_rational_input(points)
    P = np.asarray(points, dtype=object if exact else np.float64)
    if P.ndim != 2 or P.shape[0] < 1:
        raise ValueError("need a non-empty list of d-vectors")
    Pf = P.astype(np.float64)
    m, d = Pf.shape
    if m == 1:
        return [0]
    single = _unique_mask(Pf)
    if d == 1:
        x = Pf[:, 0]
        ext = {int(np.argmin(x)), int(np.argmax(x))}
        return sorted(i for i in ext if single[i])
    everything = np.arange(m)
    if method == "lp" or exact or m < d + 2:
        return [i for i in range(m) if single[i] and _vertex_by_lp(P, i, everything, exact)]
    if method not in ("auto", "qhull"):
        raise ValueError(f"unknown hull method {method!r}")
    try:
        hull = ConvexHull(Pf)
    except QhullError:
        return [i for i in range(m) if single[i] and _vertex_by_lp(P, i, everything, False)]
    candidates = np.zeros(m, dtype=bool)
    candidates[hull.vertices] = True
    scale = max(1.0, float(np.abs(Pf).max()))
    slack = Pf @ hull.equations[:, :-1].T + hull.equations[:, -1]
    inside = np.all(slack < -FEAS_TOL * scale, axis=1)
    boundary = ~inside
    pool = np.flatnonzero(boundary)
    vertices = []
    for i in pool:
        if single[i] and _vertex_by_lp(Pf, int(i), pool, False):
            vertices.append(int(i))
    return vertices


def sign_vectors(d: int) -> list[tuple[int, ...]]:
    return list(itertools.product((1, -1), repeat=d))


def maximal_under_flips(points) -> dict[tuple[int, ...], list[int]]:
    """For every sign vector eps, the indices maximal among the flipped points eps * p."""
    P = _as_float_points(points)
    return {eps: pareto_filter(P * np.array(eps, dtype=float)) for eps in sign_vectors(P.shape[1])}


def bentley_cover_check(points) -> bool:
    """Every hull vertex is maximal for at least one of the 2^d sign flips."""
    covered = set()
    for idx in maximal_under_flips(points).values():
        covered.update(idx)
    return all(v in covered for v in hull_vertices(points))


def zonotope_points(V: ObjectiveMatrix, budget: int = ENUMERATION_BUDGET) -> np.ndarray:
    """The 2^n points Vr, r in {0,1}^n, as rows."""
    return evaluate_rows(V, feasible_array(FullCube(V.n), budget))


def random_projection_vertex_count(
    S: FeasibleSet, d: int, stream: RandomStream, budget: int = ENUMERATION_BUDGET
) -> int:
    """Hull vertex count of S after projecting onto a random d-dimensional subspace.

    The projection is a d x n standard Gaussian matrix; its row space is
    uniformly distributed over d-dimensional subspaces.
    """
    n = S.length
    if not 1 <= d <= n:
        raise ValueError(f"need 1 <= d <= n, got d={d}, n={n}")
    G = ObjectiveMatrix(sample_entries(DistributionSpec.gaussian(), stream, (d, n)))
    return len(hull_vertices(evaluate_rows(G, feasible_array(S, budget))))


def hamming_ball(n: int, center: Solution | Sequence[int], k: int) -> ExplicitList:
    """The k cube vectors nearest to ``center``; boundary ties go to the lexicographically smaller."""
    if not 1 <= k <= 2**n:
        raise ValueError(f"need 1 <= k <= 2^n, got k={k}")
    c = np.asarray(center.bits if isinstance(center, Solution) else center)
    if c.shape != (n,):
        raise ValueError(f"center must have length {n}")
    cube = feasible_array(FullCube(n))
    dist = np.sum(cube != c, axis=1)
    # cube rows are already in lexicographic order, so a stable sort on distance suffices
    chosen = np.argsort(dist, kind="stable")[:k]
    return ExplicitList(tuple(Solution(tuple(cube[i].tolist())) for i in chosen))


def random_subset(n: int, k: int, stream: RandomStream) -> ExplicitList:
    """k distinct cube vectors chosen uniformly, listed in lexicographic order."""
    if not 1 <= k <= 2**n:
        raise ValueError(f"need 1 <= k <= 2^n, got k={k}")
    codes = np.sort(stream.generator().choice(2**n, size=k, replace=False))
    cube = feasible_array(FullCube(n))
    return ExplicitList(tuple(Solution(tuple(cube[i].tolist())) for i in codes))
