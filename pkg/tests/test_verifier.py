import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdpverify.errors import InvalidInput, ResourceLimit
from qdpverify.linalg import trace_distance
from qdpverify.model import KrausChannel, Povm, QuantumAlgorithm, dual_apply, measure_distribution
from qdpverify.verifier import (
    DpParams,
    compose_parallel,
    condition_number,
    delta_S,
    enumerate_subsets,
    epsilon_curve,
    max_condition_number,
    optimal_epsilon,
    subset_matrices,
    verify_dp,
    verify_eps_dp,
)

from conftest import random_algorithm


def _diagonal_povm_algorithm(kappa):
    """1-qubit identity channel with a POVM whose worst condition number is ``kappa``."""
    a = kappa / (kappa + 1)
    return QuantumAlgorithm(KrausChannel.identity(1), Povm([np.diag([a, 1 - a]), np.diag([1 - a, a])]))


def test_params_validation():
    with pytest.raises(InvalidInput):
        DpParams(-0.1)
    with pytest.raises(InvalidInput):
        DpParams(0.1, delta=1.5)
    with pytest.raises(InvalidInput):
        DpParams(0.1, eta=0.0)
    assert DpParams(2.5).epsilon == 2.5  # epsilon above 1 is allowed


def test_delta_s_formula():
    assert delta_S(1 / 3, 0.0, 1.0, 0.5) == pytest.approx(1 / 6)
    assert delta_S(1.0, 1.0, 0.0, 0.7) == pytest.approx(0.0)


def test_optimal_epsilon_cases():
    assert optimal_epsilon(1.0, 0.4) == 0.0
    assert optimal_epsilon(math.inf, 0.4) == math.inf
    assert optimal_epsilon(3.0, 0.5) == pytest.approx(math.log(2), abs=1e-12)
    with pytest.raises(InvalidInput):
        optimal_epsilon(0.5, 0.5)


def test_condition_number_zero_threshold():
    assert condition_number(1 / 3, 1e-12) == math.inf
    assert condition_number(2.0, 0.5) == 4.0


def test_enumerate_subsets_order_and_cap():
    assert enumerate_subsets(3) == [(0,), (0, 1), (0, 1, 2), (0, 2), (1,), (1, 2), (2,)]
    with pytest.raises(ResourceLimit):
        enumerate_subsets(5, cap=4)


def test_flat_effects_are_private_for_any_epsilon(flat_alg):
    w = subset_matrices(flat_alg)
    assert np.allclose(w["0"], np.eye(4) / 3, atol=1e-10)
    assert np.allclose(w["1"], 2 * np.eye(4) / 3, atol=1e-10)
    for eps in (0.0, 0.3, 2.0):
        assert verify_dp(flat_alg, DpParams(eps, 0.0, 0.9)).private
        assert verify_eps_dp(flat_alg, eps, 0.9).private
    assert max_condition_number(flat_alg).kappa_star == pytest.approx(1.0, abs=1e-10)


def test_relabelled_violation_and_witness(relabelled_alg):
    v = verify_dp(relabelled_alg, DpParams(0.0, 0.0, 0.5))
    assert not v.private
    assert v.delta_star == pytest.approx(1 / 6, abs=1e-12)
    assert v.argmax_subset == ("0",)
    c = v.witness
    assert c.witness_subset == ("0",)
    gamma = 0.5 * np.diag([1.0, 0, 0, 0]) + 0.5 * np.diag([0, 1.0, 0, 0])
    assert trace_distance(c.gamma, gamma) <= 1e-8
    assert trace_distance(c.phi, np.diag([0, 1.0, 0, 0])) <= 1e-8
    assert c.violation_amount == pytest.approx(1 / 6)


def test_relabelled_kappa_is_infinite(relabelled_alg):
    res = max_condition_number(relabelled_alg, 0.5)
    assert res.kappa_star == math.inf
    assert res.report.subset == ("0",)
    assert abs(res.witness.phi.matrix[1, 1]) == pytest.approx(1.0)
    for eps in (0.0, 1.0, 10.0):
        assert not verify_eps_dp(relabelled_alg, eps, 0.3).private


def test_delta_one_is_always_private(relabelled_alg):
    assert verify_dp(relabelled_alg, DpParams(0.0, 1.0, 1.0)).private


def test_identity_with_projective_measurement_has_infinite_kappa():
    alg = QuantumAlgorithm(KrausChannel.identity(1), Povm.computational(1))
    assert max_condition_number(alg).kappa_star == math.inf


def test_known_kappa_gives_known_epsilon():
    alg = _diagonal_povm_algorithm(3.0)
    assert max_condition_number(alg).kappa_star == pytest.approx(3.0)
    assert not verify_eps_dp(alg, 0.6, 0.5).private
    assert verify_eps_dp(alg, 0.7, 0.5).private


def test_epsilon_curve_substitution():
    alg = _diagonal_povm_algorithm(11.0)
    (e1, c1), (e2, c2) = epsilon_curve(alg, [0.1, 1.0])
    assert (e1, e2) == (0.1, 1.0)
    assert c1 == pytest.approx(math.log(2), abs=1e-9)
    assert c2 == pytest.approx(math.log(11), abs=1e-9)


def test_full_set_is_neutral(rng):
    alg = random_algorithm(rng)
    v = verify_dp(alg, DpParams(0.2, 0.0, 0.6))
    full = next(r for r in v.per_subset if len(r.subset) == len(alg.labels))
    assert full.kappa == pytest.approx(1.0)
    assert full.delta_S == pytest.approx(1 - math.exp(0.2))


def test_verdicts_are_deterministic_and_worker_independent(rng):
    alg = random_algorithm(rng)
    p = DpParams(0.1, 0.0, 0.8)
    a, b = verify_dp(alg, p), verify_dp(alg, p, workers=4)
    assert a.delta_star == b.delta_star
    assert a.argmax_subset == b.argmax_subset
    assert [r.delta_S for r in a.per_subset] == [r.delta_S for r in b.per_subset]


def test_subset_cap(rng):
    alg = QuantumAlgorithm(KrausChannel.identity(2), Povm.computational(2))
    with pytest.raises(ResourceLimit):
        verify_dp(alg, DpParams(0.1), cap=3)


def test_top_subsets_sorted():
    alg = QuantumAlgorithm(KrausChannel.identity(3), Povm.computational(3))
    v = verify_dp(alg, DpParams(0.1, 0.0, 0.5))
    top = v.top_subsets(32)
    assert len(top) == 32 and len(v.per_subset) == 255
    assert all(a.delta_S >= b.delta_S for a, b in zip(top, top[1:]))


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    eps=st.floats(0, 1.5),
    eta=st.floats(0.05, 1.0),
)
def test_witness_replays_through_the_forward_model(seed, eps, eta):
    alg = random_algorithm(np.random.default_rng(seed))
    v = verify_dp(alg, DpParams(eps, 0.0, eta))
    if v.private:
        assert v.delta_star <= 1e-9
        return
    c = v.witness
    p = measure_distribution(alg, c.gamma)
    q = measure_distribution(alg, c.phi)
    margin = sum(p[k] for k in c.witness_subset) - math.exp(eps) * sum(q[k] for k in c.witness_subset)
    assert margin >= c.violation_amount - 1e-8
    assert margin == pytest.approx(v.delta_star, abs=1e-8)
    assert trace_distance(c.gamma, c.phi) <= eta + 1e-8


def test_compose_trivial_with_trivial():
    trivial = QuantumAlgorithm(KrausChannel.identity(1), Povm.trivial(1))
    alg = compose_parallel(trivial, ["0"], trivial, ["0"])
    assert alg.labels == ("0", "1")
    assert np.allclose(alg.povm.elements[0], np.eye(4))
    assert np.allclose(alg.povm.elements[1], 0)


def test_compose_flat_with_itself(flat_alg):
    alg = compose_parallel(flat_alg, ["0"], flat_alg, ["0"])
    assert alg.n_qubits == 4
    assert np.allclose(dual_apply(alg.channel, alg.povm.elements[0]), np.eye(16) / 9, atol=1e-10)
    assert max_condition_number(alg).kappa_star == pytest.approx(1.0)


def test_compose_rejects_bad_subsets(flat_alg):
    with pytest.raises(InvalidInput):
        compose_parallel(flat_alg, ["7"], flat_alg, ["0"])
    with pytest.raises(InvalidInput):
        compose_parallel(flat_alg, [], flat_alg, ["0"])


def test_zero_subset_matrix_is_neutral():
    assert condition_number(0.0, 0.0) == 1.0
    assert condition_number(0.5, 0.0) == math.inf
