from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pareto_lab.constructions import (
    BRParameters,
    KnapsackInstance,
    br_bound_value,
    br_parameters,
    build_tree_gadget,
    build_unit_weight_knapsack,
    density_condition_holds,
    gadget_claim_violations,
    gadget_pareto_count,
    knapsack_pareto_count,
    objects_used,
    saturation_density,
    saturation_residual,
    spoke_differences,
    tree_gadget_bound,
    verify_gadget_claim,
    verify_knapsack_embedding,
)
from pareto_lab.core import ObjectiveMatrix
from pareto_lab.enumeration import (
    CapacityError,
    FullCube,
    GadgetTrees,
    SpanningTreesComplete,
    edge_index,
    pareto_set,
)
from pareto_lab.sampling import RandomStream, phi_of, sample_matrix


def _gadget_sample(m, d, seed):
    inst = build_tree_gadget(m, d)
    return sample_matrix(inst.distribution, RandomStream(seed, (m, d)))


# ---------------------------------------------------------------- tree gadget


def test_gadget_examples():
    inst = build_tree_gadget(3, 2)
    assert inst.gadget_trees.cardinality() == 2
    assert inst.feasible == SpanningTreesComplete(3)
    assert tree_gadget_bound(6, 2) == 1.5
    assert build_tree_gadget(6, 2).bound_target == 1.5
    for m in (3, 5, 8):
        specs = {s for row in build_tree_gadget(m, 3).distribution.specs for s in row}
        assert all(phi_of(s) <= 4 for s in specs)


def test_gadget_grid_layout():
    m = 5
    row = build_tree_gadget(m, 2).distribution.specs[0]
    assert (row[edge_index(0, 1, m)].lo, row[edge_index(0, 1, m)].hi) == (0.5, 1.0)
    for j in range(2, m):
        for hub in (0, 1):
            s = row[edge_index(hub, j, m)]
            assert (s.lo, s.hi) == (-0.5, 0.5)
    s = row[edge_index(2, 3, m)]
    assert (s.lo, s.hi) == (-1.0, -0.5)


def test_gadget_errors():
    with pytest.raises(ValueError):
        build_tree_gadget(2, 2)
    with pytest.raises(ValueError):
        build_tree_gadget(5, 1)
    V = ObjectiveMatrix(np.zeros((2, 36)))
    with pytest.raises(CapacityError):
        verify_gadget_claim(V, 9)


@pytest.mark.parametrize("m,d,samples", [(4, 2, 100), (5, 3, 50)])
def test_gadget_claim_holds(m, d, samples):
    assert all(verify_gadget_claim(_gadget_sample(m, d, s), m, d) for s in range(samples))


def test_gadget_claim_negative_control():
    m = 4
    V = _gadget_sample(m, 2, 0).entries.copy()
    V[:, edge_index(2, 3, m)] = 1.0  # an outside edge now pays more than any spoke
    escaped = gadget_claim_violations(ObjectiveMatrix(V), m)
    assert escaped
    assert all(s.bits[edge_index(2, 3, m)] == 1 for s in escaped)
    assert not verify_gadget_claim(ObjectiveMatrix(V), m)


@pytest.mark.parametrize("m", [4, 5, 6])
def test_gadget_count_matches_all_trees(m):
    for seed in range(50 if m < 6 else 15):
        V = _gadget_sample(m, 2, seed)
        assert gadget_pareto_count(V, m, 2) == pareto_set(V, SpanningTreesComplete(m)).count


def test_gadget_count_ranges():
    for seed in range(20):
        assert gadget_pareto_count(_gadget_sample(4, 2, seed), 4) in range(1, 5)
    V = sample_matrix(build_tree_gadget(5, 2).distribution, RandomStream(1)).entries[:1]
    assert gadget_pareto_count(ObjectiveMatrix(V), 5, 1) == 1


def test_two_step_revelation_offset_invariance(rng):
    m, d = 6, 2
    for seed in range(20):
        V = _gadget_sample(m, d, seed)
        before = {s.bits for s in pareto_set(V, GadgetTrees(m)).solutions}
        W = V.entries.copy()
        for j in range(2, m):
            shift = rng.uniform(-0.3, 0.3, size=d)
            W[:, edge_index(0, j, m)] += shift
            W[:, edge_index(1, j, m)] += shift
        W = ObjectiveMatrix(W)
        np.testing.assert_allclose(spoke_differences(W, m), spoke_differences(V, m), atol=1e-12)
        after = {s.bits for s in pareto_set(W, GadgetTrees(m)).solutions}
        assert before == after


# ---------------------------------------------------------------- knapsack


def test_knapsack_instance():
    inst = build_unit_weight_knapsack(10, 3, RandomStream(5))
    assert np.all(inst.weights == 1)
    assert np.all((inst.profits.entries >= 0) & (inst.profits.entries <= 1))
    assert inst.profits == build_unit_weight_knapsack(10, 3, RandomStream(5)).profits
    assert inst.objective_matrix().d == 4
    with pytest.raises(ValueError):
        build_unit_weight_knapsack(1, 2, RandomStream(0))
    with pytest.raises(ValueError):
        KnapsackInstance(ObjectiveMatrix([[1.5, 0.2]]), np.ones(2))


def test_knapsack_two_items():
    inst = KnapsackInstance(ObjectiveMatrix([[0.9, 0.3], [0.2, 0.7]]), np.ones(2))
    assert verify_knapsack_embedding(inst, k=1)
    front = {str(s) for s in pareto_set(inst.objective_matrix(), FullCube(2), inst.order).solutions}
    assert {"10", "01"} <= front


@pytest.mark.parametrize("n,d,seeds", [(10, 2, 50), (12, 3, 10)])
def test_knapsack_embedding(n, d, seeds):
    for seed in range(seeds):
        inst = build_unit_weight_knapsack(n, d, RandomStream(seed, (n, d)))
        assert verify_knapsack_embedding(inst)
        assert knapsack_pareto_count(inst) >= 1


def test_knapsack_limit():
    inst = build_unit_weight_knapsack(6, 2, RandomStream(0))
    with pytest.raises(CapacityError):
        verify_knapsack_embedding(inst, limit=5)


# ---------------------------------------------------------------- parameter schedule


def test_br_worked_example():
    p = br_parameters(100, 2, 16)
    assert p.n_p == 50 and p.n_q == 3
    assert p.n_q_hat == pytest.approx(math.log2(16) / math.log2(32 / 14), rel=1e-14)
    assert p.n_q_hat == pytest.approx(3.353, abs=1e-3)
    assert p.bound_value == pytest.approx(math.sqrt(50) * 8, rel=1e-14)
    assert round(p.bound_value, 2) == 56.57
    assert p.objects_used <= 100 and not p.density_saturated


def test_br_threshold_example():
    assert br_parameters(64, 2, 4).n_q_hat == pytest.approx(1.0, rel=1e-14)


def test_br_preconditions_named():
    with pytest.raises(ValueError, match="d >= 2"):
        br_parameters(100, 1, 16)
    with pytest.raises(ValueError, match="4d\\^2 <= n/4"):
        br_parameters(60, 2, 16)
    with pytest.raises(ValueError, match="phi >= 2d"):
        br_parameters(100, 2, 3)


def test_br_grid():
    for d in (2, 3, 4):
        for phi in np.geomspace(2 * d, 1000, 12):
            for n in (16 * d * d, 500, 1000, 10000):
                p = br_parameters(n, d, float(phi))
                if density_condition_holds(n, d, phi):
                    assert p.objects_used <= n
                else:
                    assert saturation_residual(p.phi_hat, n, d) < 1e-9


def test_saturation_density():
    phi_hat = saturation_density(80, 2)
    assert saturation_residual(phi_hat, 80, 2) < 1e-12
    assert 2**19 < phi_hat < 2**21
    p = br_parameters(80, 2, 1e9)
    assert p.density_saturated and p.n_q_hat == 20 and p.phi_hat == phi_hat


@given(st.integers(0, 12), st.sampled_from([2, 3, 4]), st.integers(1, 400))
def test_bound_monotone_in_steps(n_q, d, n_p):
    def value(q):
        return br_bound_value(BRParameters(0, d, 0.0, n_p, q, 0.0, None, False, 0.0, 0.0))

    assert value(0) == n_p ** (d - 1.5)
    assert value(n_q + 1) >= value(n_q)


def test_objects_used_formula():
    assert objects_used(50, 3, 2, 16.0) == pytest.approx(50 + 6 + (8 / 14) * (32 / 14) ** 3)
