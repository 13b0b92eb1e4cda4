import itertools

import numpy as np
import pytest

from oracles import nnls_enum, sse
from partls.bnb import BnbNode, build_quadform, fit_bnb, lower_bound, violations
from partls.errors import CapExceededError
from partls.instances import SubsetSumInstance, gen_random, gen_subset_sum
from partls.linalg import ols_solve
from partls.model import Dataset, FitConfig, Partition, validate
from partls.opt import fit_opt


def random_case(seed, max_k=4, noise=0.5):
    rng = np.random.default_rng(seed)
    K = int(rng.integers(1, max_k + 1))
    M = int(rng.integers(K, 11))
    N = int(rng.integers(2, 31))
    return gen_random(N, M, K, seed=seed, noise=noise)[:2]


def test_quadform_examples():
    qf = build_quadform(Dataset(np.eye(2), np.zeros(2)))
    np.testing.assert_array_equal(qf.Q, np.eye(2))
    np.testing.assert_array_equal(qf.q, [0.0, 0.0])
    assert qf.q0 == 0.0
    qf = build_quadform(Dataset(np.array([[1.0, 1.0]]), np.array([2.0])))
    np.testing.assert_array_equal(qf.Q, [[1.0, 1.0], [1.0, 1.0]])
    np.testing.assert_array_equal(qf.q, [-4.0, -4.0])
    assert qf.q0 == 4.0


def test_quadform_equals_squared_residual():
    data, _ = random_case(0)
    qf = build_quadform(data)
    alpha = np.random.default_rng(0).standard_normal(data.n_features)
    assert qf(alpha) == pytest.approx(sse(data.X, alpha, data.y), rel=1e-10)
    np.testing.assert_allclose(qf.Q, qf.Q.T, atol=1e-12)


def test_lower_bound_extremes():
    data, partition = random_case(3)
    K = partition.n_groups
    lb, _ = lower_bound(data.X, data.y, partition, ("free",) * K)
    assert lb == pytest.approx(sse(data.X, ols_solve(data.X, data.y), data.y), abs=1e-10)
    lb, alpha = lower_bound(data.X, data.y, partition, ("nonneg",) * K)
    assert lb == pytest.approx(nnls_enum(data.X, data.y)[0], abs=1e-9 * (1 + lb))
    assert np.all(alpha >= 0)


def test_violation_examples():
    p = Partition.from_groups([[0, 1]])
    np.testing.assert_array_equal(violations([1.0, 2.0], p), [0.0])
    np.testing.assert_array_equal(violations([1.0, -1.0], p), [2.0])
    np.testing.assert_array_equal(violations([1.0, 0.0], p), [0.0])
    p2 = Partition.from_groups([[0, 2], [1, 3]])
    np.testing.assert_array_equal(violations([2.0, 1.0, -3.0, 1.0], p2), [12.0, 0.0])


def test_identity_root_is_feasible():
    r = fit_bnb(Dataset(np.eye(2), np.array([1.0, 2.0])), Partition.from_groups([[0, 1]]))
    assert r.nodes == 1 and r.pruned == 0
    assert r.objective == pytest.approx(0.0, abs=1e-14)
    assert r.optimal


def test_subset_sum_seven():
    data, partition = gen_subset_sum(SubsetSumInstance((1, 2, 3), 1.0))
    r = fit_bnb(data, partition)
    assert r.objective == pytest.approx(7.0, abs=1e-6)
    assert r.objective == pytest.approx(fit_opt(data, partition).objective, abs=1e-8)


@pytest.mark.parametrize("seed", range(50))
def test_matches_opt(seed):
    data, partition = random_case(seed)
    eta = [0.0, 0.4][seed % 2]
    config = FitConfig(eta=eta)
    a = fit_opt(data, partition, config)
    b = fit_bnb(data, partition, config)
    assert abs(a.objective - b.objective) <= 1e-8 * (1 + a.objective)
    assert b.nodes <= 2 ** (partition.n_groups + 1) - 1
    assert validate(b.model, partition).passed


@pytest.mark.parametrize("seed", range(8))
def test_node_bounds_are_valid(seed):
    """Every node's bound is below the best completion consistent with its constraints."""
    data, partition = random_case(seed, max_k=3)
    K = partition.n_groups
    completions = {}
    for b in itertools.product((-1.0, 1.0), repeat=K):
        completions[b] = nnls_enum(data.X * np.array(b)[partition.assignments], data.y)[0]
    for states in itertools.product(("free", "nonneg", "nonpos"), repeat=K):
        lb, _ = lower_bound(data.X, data.y, partition, states)
        allowed = [
            v for b, v in completions.items()
            if all(s == "free" or (s == "nonneg") == (bk > 0) for s, bk in zip(states, b))
        ]
        assert lb <= min(allowed) + 1e-9 * (1 + min(allowed))


def test_child_refines_constraints():
    root = BnbNode(("free", "free"))
    child = root.child(1, "nonpos")
    assert child.constraints == ("free", "nonpos") and child.depth == 1
    assert root.constraints == ("free", "free")


def test_node_limit():
    data, partition = gen_subset_sum(SubsetSumInstance((1, 1, 2, 3, 5), 1.0))
    full = fit_bnb(data, partition)
    assert full.optimal and full.nodes > 3
    with pytest.raises(CapExceededError):
        fit_bnb(data, partition, FitConfig(node_limit=1))
    # Depth-first: the all-nonneg leaf is reached after at most K + 1 nodes.
    partial = fit_bnb(data, partition, FitConfig(node_limit=partition.n_groups + 1))
    assert not partial.optimal
    assert partial.objective >= full.objective - 1e-9
