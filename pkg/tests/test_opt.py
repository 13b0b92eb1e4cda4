import numpy as np
import pytest

from oracles import partls_enum, sse
from partls.errors import CapExceededError, DimensionError
from partls.instances import SubsetSumInstance, gen_random, gen_subset_sum
from partls.model import Dataset, FitConfig, Partition, objective, validate
from partls.opt import augment_regularization, fit_opt, sign_vectors, signed_design


def small_instance(seed, max_m=6):
    rng = np.random.default_rng(seed)
    K = int(rng.integers(1, 4))
    M = int(rng.integers(K, max_m + 1))
    N = int(rng.integers(2, 31))
    data, partition, _ = gen_random(N, M, K, seed=seed, noise=0.5)
    return data, partition


# ---------------------------------------------------------------- helpers

def test_signed_design_examples():
    X = np.arange(6.0).reshape(2, 3)
    p = Partition.from_groups([[0, 2], [1]])
    np.testing.assert_array_equal(signed_design(X, p, [1, 1]), X)
    np.testing.assert_array_equal(signed_design(X, p, [-1, -1]), -X)
    single = Partition.from_groups([[0], [1]])
    np.testing.assert_array_equal(signed_design([[1.0, 2.0]], single, [1, -1]), [[1.0, -2.0]])
    with pytest.raises(DimensionError):
        signed_design(X, p, [1, 1, 1])


def test_augment_regularization_examples():
    p = Partition.from_groups([[0, 1], [2]])
    X = np.ones((1, 3))
    Xa, ya = augment_regularization(X, [5.0], p, 4.0)
    np.testing.assert_array_equal(Xa[1:], [[2.0, 2.0, 0.0], [0.0, 0.0, 2.0]])
    np.testing.assert_array_equal(ya, [5.0, 0.0, 0.0])
    Xz, _ = augment_regularization(X, [5.0], p, 0.0)
    assert not Xz[1:].any()


@pytest.mark.parametrize("seed", range(20))
def test_augmented_sse_adds_group_penalty(seed):
    rng = np.random.default_rng(seed)
    data, partition = small_instance(seed, max_m=8)
    alpha = rng.exponential(size=partition.n_features)
    b = rng.choice([-1.0, 1.0], size=partition.n_groups)
    rho = float(rng.uniform(0.0, 5.0))
    Xa, ya = augment_regularization(data.X, data.y, partition, rho)
    plain = sse(signed_design(data.X, partition, b), alpha, data.y)
    aug = sse(signed_design(Xa, partition, b), alpha, ya)
    penalty = rho * np.sum(partition.group_sums(alpha) ** 2)
    assert aug - plain == pytest.approx(penalty, abs=1e-9 * (1 + plain + penalty))


def test_sign_vector_order():
    assert [v.tolist() for v in sign_vectors(2)] == [[-1, -1], [-1, 1], [1, -1], [1, 1]]


# ---------------------------------------------------------------- fit_opt examples

def test_fit_opt_identity_one_group():
    p = Partition.from_groups([[0, 1]])
    r = fit_opt(Dataset(np.eye(2), np.array([1.0, 2.0])), p)
    assert r.objective == pytest.approx(0.0, abs=1e-14)
    np.testing.assert_allclose(r.model.alpha, [1 / 3, 2 / 3], rtol=1e-12)
    np.testing.assert_allclose(r.model.beta, [3.0], rtol=1e-12)

    r = fit_opt(Dataset(np.eye(2), np.array([-1.0, -2.0])), p)
    assert r.objective == pytest.approx(0.0, abs=1e-14)
    np.testing.assert_allclose(r.model.alpha, [1 / 3, 2 / 3], rtol=1e-12)
    np.testing.assert_allclose(r.model.beta, [-3.0], rtol=1e-12)


def test_fit_opt_subset_sum_values():
    r = fit_opt(*gen_subset_sum(SubsetSumInstance((1, 2, 3), 1.0)))
    assert r.objective == pytest.approx(7.0, abs=1e-6)
    assert r.subproblems == 8
    # No equal split: the optimum sits strictly above the balanced value of 2.
    r = fit_opt(*gen_subset_sum(SubsetSumInstance((2,), 1.0)))
    assert r.objective == pytest.approx(8 / 3, abs=1e-9)


def test_fit_opt_cap():
    data, partition, _ = gen_random(20, 6, 3, seed=0)
    with pytest.raises(CapExceededError, match="bnb"):
        fit_opt(data, partition, FitConfig(enum_cap=2))


@pytest.mark.parametrize("seed", range(25))
def test_fit_opt_matches_brute_force(seed):
    data, partition = small_instance(seed)
    rho = [0.0, 0.5][seed % 2]
    r = fit_opt(data, partition, FitConfig(eta=rho))
    best = partls_enum(data.X, data.y, partition.assignments, rho)
    assert r.objective == pytest.approx(best, abs=1e-8 * (1 + best))
    assert validate(r.model, partition).passed
    assert objective(r.model, partition, data, rho) == r.objective


@pytest.mark.parametrize("seed", range(10))
def test_sign_flip_symmetry(seed):
    # Tall design so the minimizer is unique; with ties the negated problem
    # sees the sign vectors in reverse order.
    data, partition, _ = gen_random(30, 8, 3, seed=seed, noise=0.5)
    a = fit_opt(data, partition)
    b = fit_opt(Dataset(data.X, -data.y), partition)
    assert b.objective == pytest.approx(a.objective, abs=1e-9 * (1 + a.objective))
    np.testing.assert_allclose(b.model.beta, -a.model.beta, atol=1e-7 * (1 + np.abs(a.model.beta).max()))
    np.testing.assert_allclose(b.model.alpha, a.model.alpha, atol=1e-7)


@pytest.mark.parametrize("seed", range(10))
def test_within_group_permutation_invariance(seed):
    data, partition = small_instance(seed, max_m=8)
    rng = np.random.default_rng(seed)
    perm = np.arange(partition.n_features)
    for group in partition.members:
        perm[group] = rng.permutation(group)
    a = fit_opt(data, partition)
    b = fit_opt(Dataset(data.X[:, perm], data.y), partition)
    assert b.objective == pytest.approx(a.objective, abs=1e-9 * (1 + a.objective))


def test_threads_give_identical_result():
    data, partition, _ = gen_random(40, 10, 5, seed=3, noise=0.3)
    a = fit_opt(data, partition, FitConfig(threads=1))
    b = fit_opt(data, partition, FitConfig(threads=4))
    assert a.objective == b.objective
    np.testing.assert_array_equal(a.model.alpha, b.model.alpha)
    np.testing.assert_array_equal(a.model.beta, b.model.beta)


def test_tie_break_prefers_smallest_sign_vector():
    # y = 0: every sign vector reaches 0 with alpha = 0; the first one wins.
    p = Partition.from_groups([[0], [1]])
    r = fit_opt(Dataset(np.eye(2), np.zeros(2)), p)
    assert r.objective == 0.0
    np.testing.assert_array_equal(r.model.beta, [0.0, 0.0])
    # beta = b * 0 keeps the sign bit of the chosen b = (-1, -1).
    assert np.all(np.signbit(r.model.beta))
