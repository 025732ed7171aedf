"""Linear feasibility back ends: exact rational simplex and verified HiGHS calls."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

FEAS_TOL = 1e-9


class NumericFailure(ArithmeticError):
    """A floating-point geometric predicate could not be certified either way."""


def to_fractions(values) -> list:
    """Exact rational copy of a (nested) sequence of ints, floats or Fractions."""
    if isinstance(values, np.ndarray):
        values = values.tolist()
    if isinstance(values, (list, tuple)):
        return [to_fractions(v) for v in values]
    return Fraction(values)


def is_rational_input(points) -> bool:
    """True when the caller passed exact numbers (ints or Fractions) rather than floats."""
    if isinstance(points, np.ndarray):
        return points.dtype.kind in "iu" or points.dtype == object and all(
            isinstance(v, (int, Fraction)) for v in points.ravel()
        )
    flat = [v for row in points for v in row]
    return bool(flat) and all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in flat)


def exact_feasible(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction] | None:
    """A point of ``{x >= 0 : A x = b}`` in exact arithmetic, or None if empty.

    Phase-one simplex with Bland's rule, so it terminates without cycling.
    """
    rows = len(A)
    cols = len(A[0]) if rows else 0
    T = []
    for i in range(rows):
        sign = -1 if b[i] < 0 else 1
        row = [Fraction(sign) * Fraction(a) for a in A[i]]
        row += [Fraction(1) if k == i else Fraction(0) for k in range(rows)]
        row.append(Fraction(sign) * Fraction(b[i]))
        T.append(row)
    width = cols + rows
    basis = list(range(cols, cols + rows))
    # reduced costs of the phase-one objective (sum of artificials)
    cost = [-sum((T[i][k] for i in range(rows)), Fraction(0)) for k in range(width + 1)]
    for k in range(cols, width):
        cost[k] = Fraction(0)
    while True:
        entering = next((k for k in range(width) if cost[k] < 0), None)
        if entering is None:
            break
        best = None
        for i in range(rows):
            a = T[i][entering]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # cannot happen in phase one: objective bounded below by 0
            raise ArithmeticError("unbounded phase-one problem")
        r = best[1]
        piv = T[r][entering]
        T[r] = [v / piv for v in T[r]]
        for i in range(rows):
            if i != r and T[i][entering] != 0:
                f = T[i][entering]
                T[i] = [vi - f * vr for vi, vr in zip(T[i], T[r])]
        f = cost[entering]
        cost = [c - f * vr for c, vr in zip(cost, T[r])]
        basis[r] = entering
    if -cost[-1] != 0:
        return None
    x = [Fraction(0)] * cols
    for i, k in enumerate(basis):
        if k < cols:
            x[k] = T[i][-1]
    return x


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=(0, None)):
    """Thin wrapper over HiGHS; returns the raw scipy result."""
    return linprog(
        c,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=bounds,
        method="highs",
    )
