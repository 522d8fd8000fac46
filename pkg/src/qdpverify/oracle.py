"""Brute-force check of the privacy definition by sampling state pairs.

Everything here is computed from the forward action of the channel only:
the algorithm's outcome statistics are linear in the input state, so they
are tabulated once by pushing every matrix unit ``|i><j|`` through the
channel and measuring. Sampled pairs are then scored in bulk against every
outcome subset. Nothing from :mod:`qdpverify.verifier` is used, which keeps
this module an independent cross-check of the spectral verifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DimensionMismatch, InvalidInput
from .linalg import trace_distance
from .model.measurement import QuantumAlgorithm, measure_distribution
from .model.states import DensityMatrix

WITNESS_SLACK = 1e-9
_BATCH = 2048


@dataclass(frozen=True)
class ViolationWitness:
    rho: DensityMatrix
    sigma: DensityMatrix
    subset: tuple[str, ...]
    margin: float


def _unpack(params) -> tuple[float, float, float]:
    return float(params.epsilon), float(params.delta), float(params.eta)


def random_pure(dim: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-random unit vectors (normalized complex Gaussians)."""
    shape = (dim,) if size is None else (size, dim)
    v = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def random_mixed(dim: int, rng: np.random.Generator, size: int, rank: int | None = None) -> np.ndarray:
    """Random mixtures of ``rank`` Haar-random pure states with Dirichlet weights."""
    rank = dim if rank is None else rank
    vecs = random_pure(dim, rng, size * rank).reshape(size, rank, dim)
    weights = rng.dirichlet(np.ones(rank), size=size)
    return np.einsum("sr,sri,srj->sij", weights, vecs, vecs.conj())


def _pairs(dim: int, eta: float, rng: np.random.Generator, size: int):
    """Batch of ``(t psi + (1 - t) sigma, sigma)`` pairs with ``t ~ U[0, eta]``."""
    sigma = random_mixed(dim, rng, size, rank=int(rng.integers(1, dim + 1)))
    psi = random_pure(dim, rng, size)
    t = rng.uniform(0.0, eta, size=size)[:, None, None]
    rho = t * np.einsum("si,sj->sij", psi, psi.conj()) + (1 - t) * sigma
    return rho, sigma


def sample_neighbor_pair(n: int, eta: float, seed: int) -> tuple[DensityMatrix, DensityMatrix]:
    """One seeded pair of ``n``-qubit states at trace distance at most ``eta``."""
    if not 0.0 < eta <= 1.0:
        raise InvalidInput(f"eta must lie in (0, 1], got {eta}")
    rng = np.random.default_rng(seed)
    rho, sigma = _pairs(2**n, eta, rng, 1)
    return DensityMatrix(rho[0]), DensityMatrix(sigma[0])


def response_matrix(alg: QuantumAlgorithm) -> np.ndarray:
    """Row ``k`` maps a flattened input state to ``tr(M_k E(rho))``."""
    d = alg.povm.dim
    out = np.empty((len(alg.povm), d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1.0
            image = alg.channel.apply_matrix(unit)
            out[:, i * d + j] = np.einsum("kab,ba->k", alg.povm.elements, image)
    return out


def _subset_table(m: int) -> tuple[list[tuple[int, ...]], np.ndarray]:
    subsets = sorted(c for r in range(1, m + 1) for c in combinations(range(m), r))
    table = np.zeros((len(subsets), m))
    for row, s in enumerate(subsets):
        table[row, list(s)] = 1.0
    return subsets, table


def _margins(resp, table, rho, sigma, eps, delta):
    """Margins ``P_S(rho) - e^eps P_S(sigma) - delta`` with shape (pairs, subsets)."""
    d2 = resp.shape[1]
    p_rho = np.real(rho.reshape(len(rho), d2) @ resp.T)
    p_sig = np.real(sigma.reshape(len(sigma), d2) @ resp.T)
    return p_rho @ table.T - math.exp(eps) * (p_sig @ table.T) - delta


def extremal_pairs(resp: np.ndarray, subsets, d: int, eta: float):
    """For each subset, mix the top and bottom eigenvectors of its effect matrix."""
    rhos, sigmas = [], []
    for s in subsets:
        # effect[b, a] = sum_k resp[k, a*d + b]: the matrix E with P_S(rho) = tr(E rho)
        effect = resp[list(s)].sum(axis=0).reshape(d, d).T
        effect = (effect + effect.conj().T) / 2
        _, vecs = np.linalg.eigh(effect)
        hi, lo = vecs[:, -1], vecs[:, 0]
        phi = np.outer(lo, lo.conj())
        rhos.append(eta * np.outer(hi, hi.conj()) + (1 - eta) * phi)
        sigmas.append(phi)
    return np.array(rhos), np.array(sigmas)


def _scan(alg: QuantumAlgorithm, eps: float, delta: float, eta: float, trials: int, seed: int, extremal: bool):
    """Yield ``(rho batch, sigma batch, margins)`` in trial order."""
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    if not 0.0 < eta <= 1.0:
        raise InvalidInput(f"eta must lie in (0, 1], got {eta}")
    rng = np.random.default_rng(seed)
    d = alg.povm.dim
    resp = response_matrix(alg)
    subsets, table = _subset_table(len(alg.povm))
    remaining = trials
    if extremal:
        rho, sigma = extremal_pairs(resp, subsets, d, eta)
        rho, sigma = rho[:remaining], sigma[:remaining]
        remaining -= len(rho)
        yield subsets, rho, sigma, _margins(resp, table, rho, sigma, eps, delta)
    while remaining > 0:
        size = min(_BATCH, remaining)
        rho, sigma = _pairs(d, eta, rng, size)
        remaining -= size
        yield subsets, rho, sigma, _margins(resp, table, rho, sigma, eps, delta)


def violation_search(
    alg: QuantumAlgorithm,
    params,
    trials: int = 10_000,
    seed: int = 0,
    extremal: bool = True,
) -> ViolationWitness | None:
    """First sampled pair (in trial order) violating the privacy inequality, if any.

    With ``extremal`` set, the first trials are the extreme-eigenvector
    mixtures of every subset's effect matrix; the remaining trials are random
    neighbor pairs. A pair counts as a violation when its margin exceeds
    ``WITNESS_SLACK``. ``params`` is anything with ``epsilon``, ``delta``
    and ``eta`` attributes.
    """
    labels = alg.povm.labels
    for subsets, rho, sigma, margins in _scan(alg, *_unpack(params), trials, seed, extremal):
        hits = np.argwhere(margins > WITNESS_SLACK)
        if len(hits):
            t, s = hits[0]
            return ViolationWitness(
                rho=DensityMatrix((rho[t] + rho[t].conj().T) / 2),
                sigma=DensityMatrix((sigma[t] + sigma[t].conj().T) / 2),
                subset=tuple(labels[i] for i in subsets[s]),
                margin=float(margins[t, s]),
            )
    return None


def sampled_supremum(
    alg: QuantumAlgorithm,
    params,
    trials: int = 10_000,
    seed: int = 0,
    extremal: bool = True,
) -> float:
    """Largest margin over all sampled pairs and subsets (may be negative)."""
    best = -math.inf
    for _, _, _, margins in _scan(alg, *_unpack(params), trials, seed, extremal):
        best = max(best, float(margins.max()))
    return best


def replay_margin(alg: QuantumAlgorithm, rho, sigma, subset, epsilon: float, delta: float) -> float:
    """Privacy margin of a state pair recomputed through :func:`measure_distribution`."""
    p = measure_distribution(alg, rho)
    q = measure_distribution(alg, sigma)
    keys = [str(k) for k in subset]
    return sum(p[k] for k in keys) - math.exp(epsilon) * sum(q[k] for k in keys) - delta


def check_counterexample(alg: QuantumAlgorithm, c, params) -> bool:
    """Independently confirm that ``c`` is a counterexample within ``eta``.

    Checks the pair's trace distance against both ``eta`` and the recorded
    ``eta_used``, that ``phi`` is pure, and that the replayed margin is
    positive and no smaller than the recorded ``violation_amount``.
    """
    epsilon, delta, eta = _unpack(params)
    gamma = np.asarray(c.gamma, dtype=complex)
    phi = np.asarray(c.phi, dtype=complex)
    if gamma.shape[0] != alg.povm.dim or phi.shape[0] != alg.povm.dim:
        raise DimensionMismatch("counterexample states do not match the algorithm dimension")
    dist = trace_distance(gamma, phi)
    if dist > eta + 1e-8 or abs(dist - c.eta_used) > 1e-8:
        return False
    if abs(np.real(np.trace(phi @ phi)) - 1.0) > 1e-9:
        return False
    margin = replay_margin(alg, gamma, phi, c.witness_subset, epsilon, delta)
    if margin <= 0.0:
        return False
    return margin >= c.violation_amount - 1e-8
