import dataclasses

import numpy as np
import pytest

from qdpverify.errors import DimensionMismatch, InvalidInput
from qdpverify.linalg import trace_distance
from qdpverify.model import KrausChannel, Povm, QuantumAlgorithm, measure_distribution
from qdpverify.oracle import (
    check_counterexample,
    replay_margin,
    response_matrix,
    sample_neighbor_pair,
    sampled_supremum,
    violation_search,
)
from qdpverify.verifier import DpParams, verify_dp

from conftest import random_algorithm


def test_sample_pair_is_deterministic():
    a1, b1 = sample_neighbor_pair(2, 0.3, seed=4)
    a2, b2 = sample_neighbor_pair(2, 0.3, seed=4)
    assert np.array_equal(a1.matrix, a2.matrix) and np.array_equal(b1.matrix, b2.matrix)


def test_sampled_pairs_respect_eta():
    for seed in range(1000):
        rho, sigma = sample_neighbor_pair(2, 0.3, seed)
        assert trace_distance(rho, sigma) <= 0.3 + 1e-9


def test_tiny_eta_gives_coincident_pair():
    rho, sigma = sample_neighbor_pair(1, 1e-12, seed=0)
    assert trace_distance(rho, sigma) <= 1e-11


def test_sample_pair_rejects_bad_eta():
    with pytest.raises(InvalidInput):
        sample_neighbor_pair(1, 0.0, seed=0)
    with pytest.raises(InvalidInput):
        sample_neighbor_pair(1, 1.5, seed=0)


def test_response_matrix_reproduces_probabilities(rng):
    alg = random_algorithm(rng)
    rho, _ = sample_neighbor_pair(2, 0.5, seed=1)
    probs = np.real(response_matrix(alg) @ rho.matrix.reshape(-1))
    expected = measure_distribution(alg, rho)
    assert probs == pytest.approx([expected[k] for k in alg.labels], abs=1e-12)


def test_flat_effects_never_violate(flat_alg):
    for params in (DpParams(0.0, 0.0, 1.0), DpParams(0.5, 0.0, 0.3)):
        assert violation_search(flat_alg, params, trials=10_000, seed=3) is None


def test_relabelled_violation_found_with_expected_margin(relabelled_alg):
    w = violation_search(relabelled_alg, DpParams(0.0, 0.0, 0.5), trials=10_000, seed=3)
    assert w is not None
    assert w.subset == ("0",)
    assert w.margin == pytest.approx(1 / 6, abs=1e-12)
    assert trace_distance(w.rho, w.sigma) <= 0.5 + 1e-8
    replayed = replay_margin(relabelled_alg, w.rho, w.sigma, w.subset, 0.0, 0.0)
    assert replayed == pytest.approx(w.margin, abs=1e-10)


def test_delta_one_never_violates(relabelled_alg):
    assert violation_search(relabelled_alg, DpParams(0.0, 1.0, 1.0), trials=5000, seed=0) is None


def test_random_sampling_alone_respects_the_bound(relabelled_alg):
    sup = sampled_supremum(relabelled_alg, DpParams(0.0, 0.0, 0.5), trials=5000, seed=1, extremal=False)
    assert sup <= 1 / 6 + 1e-8


def test_search_requires_trials(relabelled_alg):
    with pytest.raises(InvalidInput):
        violation_search(relabelled_alg, DpParams(0.0), trials=0)


def test_check_counterexample_accepts_verifier_witness(relabelled_alg):
    p = DpParams(0.0, 0.0, 0.5)
    c = verify_dp(relabelled_alg, p).witness
    assert check_counterexample(relabelled_alg, c, p)


def test_check_counterexample_rejects_identical_pair(relabelled_alg):
    p = DpParams(0.0, 0.0, 0.5)
    c = verify_dp(relabelled_alg, p).witness
    same = dataclasses.replace(c, phi=c.gamma, eta_used=0.0, violation_amount=0.0)
    assert not check_counterexample(relabelled_alg, same, p)


def test_check_counterexample_rejects_tampered_phi(relabelled_alg):
    p = DpParams(0.0, 0.0, 0.5)
    c = verify_dp(relabelled_alg, p).witness
    assert not check_counterexample(relabelled_alg, dataclasses.replace(c, phi=c.gamma), p)


def test_check_counterexample_rejects_overstated_violation(relabelled_alg):
    p = DpParams(0.0, 0.0, 0.5)
    c = verify_dp(relabelled_alg, p).witness
    assert not check_counterexample(relabelled_alg, dataclasses.replace(c, violation_amount=0.5), p)


def test_check_counterexample_dimension_mismatch(relabelled_alg):
    c = verify_dp(relabelled_alg, DpParams(0.0, 0.0, 0.5)).witness
    alg = QuantumAlgorithm(KrausChannel.identity(1), Povm.computational(1))
    with pytest.raises(DimensionMismatch):
        check_counterexample(alg, c, DpParams(0.0, 0.0, 0.5))

