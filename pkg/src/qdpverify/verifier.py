"""Exact (epsilon, delta)-differential privacy verification for quantum algorithms.

For an algorithm ``A = (E, {M_k})`` every outcome subset ``S`` defines the
dualized effect ``M_S = sum_{k in S} E^dagger(M_k)``. Privacy within a
trace-distance neighborhood ``eta`` holds iff

    delta >= max_S  eta * lambda_max(M_S) - (e^eps + eta - 1) * lambda_min(M_S),

and the pure-epsilon bound is ``eps* = ln((kappa* - 1) * eta + 1)`` where
``kappa*`` is the largest condition number among the ``M_S``. A violation is
witnessed by ``gamma = eta |psi><psi| + (1 - eta) |phi><phi|`` and
``phi = |phi><phi|`` built from the extreme eigenvectors of the worst
subset.

Subsets are enumerated in lexicographic order of their sorted outcome
positions (positions follow the POVM's label order); among equal maxima
the first subset in that order wins.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import InvalidInput, ResourceLimit
from .linalg import PSD_TOL, extremal_eigenpairs, is_zero_eigenvalue
from .model.channels import dual_apply, tensor_channels
from .model.measurement import Povm, QuantumAlgorithm
from .model.states import DensityMatrix

DEFAULT_SUBSET_CAP = 16
PRIVATE_SLACK = 1e-9
# Relative gap below which two subset scores count as tied.
TIE_TOL = 1e-12


@dataclass(frozen=True)
class DpParams:
    epsilon: float
    delta: float = 0.0
    eta: float = 1.0

    def __post_init__(self):
        eps, delta, eta = float(self.epsilon), float(self.delta), float(self.eta)
        if not eps >= 0 or math.isnan(eps):
            raise InvalidInput(f"epsilon must be >= 0, got {self.epsilon}")
        if not 0.0 <= delta <= 1.0:
            raise InvalidInput(f"delta must lie in [0, 1], got {self.delta}")
        _check_eta(eta)
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "eta", eta)


def _check_eta(eta: float) -> None:
    if not 0.0 < eta <= 1.0:
        raise InvalidInput(f"eta must lie in (0, 1], got {eta}")


@dataclass(frozen=True)
class SubsetReport:
    """Spectral summary of one outcome subset ``S``.

    ``delta_S`` is evaluated at the ``epsilon``/``eta`` the report was built
    for. ``m_matrix`` is rebuilt on demand from the per-outcome matrices so
    that reports for many subsets stay light.
    """

    subset: tuple[str, ...]
    positions: tuple[int, ...]
    lambda_max: float
    lambda_min: float
    delta_S: float
    kappa: float
    epsilon: float
    eta: float
    _weights: tuple = field(default=(), repr=False, compare=False)

    @cached_property
    def m_matrix(self) -> np.ndarray:
        return sum(self._weights[i] for i in self.positions)


@dataclass(frozen=True)
class Counterexample:
    """State pair violating the privacy inequality on ``witness_subset``.

    ``violation_amount`` is the left side minus the right side of the
    inequality, evaluated at the recorded ``epsilon`` and ``delta``.
    """

    gamma: DensityMatrix
    phi: DensityMatrix
    witness_subset: tuple[str, ...]
    violation_amount: float
    eta_used: float
    epsilon: float
    delta: float


@dataclass(frozen=True)
class Verdict:
    private: bool
    delta_star: float
    witness: Counterexample | None
    per_subset: tuple[SubsetReport, ...]
    params: DpParams
    argmax_subset: tuple[str, ...] = ()
    kappa_star: float | None = None

    def top_subsets(self, k: int = 32) -> list[SubsetReport]:
        return sorted(self.per_subset, key=lambda r: -r.delta_S)[:k]


@dataclass(frozen=True)
class KappaResult:
    kappa_star: float
    report: SubsetReport
    witness: Counterexample
    per_subset: tuple[SubsetReport, ...]


def delta_S(lambda_max: float, lambda_min: float, eps: float, eta: float) -> float:
    """``eta * lambda_max - (e^eps + eta - 1) * lambda_min``; may be negative."""
    return eta * lambda_max - (math.exp(eps) + eta - 1.0) * lambda_min


def condition_number(lambda_max: float, lambda_min: float) -> float:
    """``lambda_max / lambda_min``, or ``inf`` once ``lambda_min`` counts as zero.

    A subset whose matrix is numerically zero never fires, so it gets the
    neutral value 1 instead of ``0 / 0``.
    """
    if lambda_max <= PSD_TOL:
        return 1.0
    if is_zero_eigenvalue(lambda_min, lambda_max):
        return math.inf
    return lambda_max / lambda_min


def optimal_epsilon(kappa_star: float, eta: float) -> float:
    """Smallest epsilon for which epsilon-privacy within ``eta`` holds."""
    _check_eta(eta)
    if kappa_star < 1.0 - 1e-9:
        raise InvalidInput(f"kappa* must be >= 1, got {kappa_star}")
    if math.isinf(kappa_star):
        return math.inf
    return math.log1p(max(kappa_star - 1.0, 0.0) * eta)


def subset_matrices(alg: QuantumAlgorithm) -> dict[str, np.ndarray]:
    """Per-outcome dualized effects ``W_k = E^dagger(M_k)``."""
    return {lab: dual_apply(alg.channel, m) for lab, m in zip(alg.povm.labels, alg.povm.elements)}


def enumerate_subsets(m: int, cap: int = DEFAULT_SUBSET_CAP) -> list[tuple[int, ...]]:
    """All non-empty subsets of ``range(m)`` in lexicographic order."""
    if m > cap:
        raise ResourceLimit(f"{m} outcomes exceed the subset-enumeration cap of {cap}")
    subsets = [c for r in range(1, m + 1) for c in combinations(range(m), r)]
    subsets.sort()
    return subsets


@dataclass(frozen=True)
class _Spectrum:
    positions: tuple[int, ...]
    lambda_max: float
    lambda_min: float


def _spectra(weights: Sequence[np.ndarray], subsets, workers: int | None) -> list[_Spectrum]:
    def one(pos):
        ext = extremal_eigenpairs(sum(weights[i] for i in pos))
        return _Spectrum(pos, ext.lambda_max, ext.lambda_min)

    if workers and workers > 1 and len(subsets) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, subsets))
    return [one(s) for s in subsets]


def _argmax(scores: Sequence[float]) -> int | None:
    """Index of the first maximal score, counting near-equal scores as ties."""
    best = None
    for i, s in enumerate(scores):
        if best is None:
            best = i
            continue
        b = scores[best]
        if math.isinf(b):
            continue
        if math.isinf(s) or s > b + TIE_TOL * max(1.0, abs(b)):
            best = i
    return best


def _reports(alg, weights, spectra, eps, eta) -> tuple[SubsetReport, ...]:
    labels = alg.povm.labels
    return tuple(
        SubsetReport(
            subset=tuple(labels[i] for i in sp.positions),
            positions=sp.positions,
            lambda_max=sp.lambda_max,
            lambda_min=sp.lambda_min,
            delta_S=delta_S(sp.lambda_max, sp.lambda_min, eps, eta),
            kappa=condition_number(sp.lambda_max, sp.lambda_min),
            epsilon=eps,
            eta=eta,
            _weights=weights,
        )
        for sp in spectra
    )


def build_counterexample(
    m_s: np.ndarray, subset: tuple[str, ...], eta: float, eps: float, delta: float
) -> Counterexample:
    """Extremal-eigenvector state pair ``(eta psi + (1 - eta) phi, phi)`` for ``M_S``."""
    ext = extremal_eigenpairs(m_s)
    psi = np.outer(ext.vec_max, ext.vec_max.conj())
    phi = np.outer(ext.vec_min, ext.vec_min.conj())
    gamma = eta * psi + (1.0 - eta) * phi
    amount = delta_S(ext.lambda_max, ext.lambda_min, eps, eta) - delta
    return Counterexample(
        gamma=DensityMatrix(gamma),
        phi=DensityMatrix(phi),
        witness_subset=tuple(subset),
        violation_amount=amount,
        eta_used=eta,
        epsilon=eps,
        delta=delta,
    )


def _prepare(alg: QuantumAlgorithm, cap: int):
    subsets = enumerate_subsets(len(alg.povm), cap)
    weights = tuple(subset_matrices(alg).values())
    return subsets, weights


def verify_dp(
    alg: QuantumAlgorithm,
    params: DpParams,
    *,
    cap: int = DEFAULT_SUBSET_CAP,
    workers: int | None = None,
) -> Verdict:
    """Decide (epsilon, delta)-privacy within eta exactly.

    ``delta*`` is the largest ``delta_S`` over non-empty subsets, floored at
    zero (the empty subset). When ``delta < delta* - 1e-9`` the verdict
    carries a counterexample built from the worst subset.
    """
    subsets, weights = _prepare(alg, cap)
    spectra = _spectra(weights, subsets, workers)
    reports = _reports(alg, weights, spectra, params.epsilon, params.eta)
    best = _argmax([r.delta_S for r in reports])
    top = reports[best]
    delta_star = max(0.0, top.delta_S)
    private = params.delta >= delta_star - PRIVATE_SLACK
    witness = None
    argmax_subset: tuple[str, ...] = ()
    if top.delta_S > 0.0:
        argmax_subset = top.subset
    if not private:
        witness = build_counterexample(top.m_matrix, top.subset, params.eta, params.epsilon, params.delta)
    return Verdict(
        private=private,
        delta_star=delta_star,
        witness=witness,
        per_subset=reports,
        params=params,
        argmax_subset=argmax_subset,
    )


def max_condition_number(
    alg: QuantumAlgorithm,
    eta_for_witness: float = 1.0,
    *,
    cap: int = DEFAULT_SUBSET_CAP,
    workers: int | None = None,
) -> KappaResult:
    """``kappa*`` over all non-empty subsets with the argmax subset's state pair.

    The witness and reports are evaluated at ``epsilon = 0``, ``delta = 0``
    and ``eta = eta_for_witness``, so its ``violation_amount`` is
    ``eta * (lambda_max - lambda_min)`` of the worst-conditioned subset.
    """
    _check_eta(eta_for_witness)
    subsets, weights = _prepare(alg, cap)
    spectra = _spectra(weights, subsets, workers)
    reports = _reports(alg, weights, spectra, 0.0, eta_for_witness)
    best = _argmax([r.kappa for r in reports])
    top = reports[best]
    witness = build_counterexample(top.m_matrix, top.subset, eta_for_witness, 0.0, 0.0)
    return KappaResult(kappa_star=top.kappa, report=top, witness=witness, per_subset=reports)


def verify_eps_dp(
    alg: QuantumAlgorithm,
    eps: float,
    eta: float,
    *,
    cap: int = DEFAULT_SUBSET_CAP,
    workers: int | None = None,
) -> Verdict:
    """Decide pure epsilon-privacy within eta through ``kappa*``."""
    params = DpParams(eps, 0.0, eta)
    kres = max_condition_number(alg, eta, cap=cap, workers=workers)
    eps_star = optimal_epsilon(kres.kappa_star, eta)
    private = eps >= eps_star
    reports = tuple(
        SubsetReport(
            subset=r.subset, positions=r.positions, lambda_max=r.lambda_max, lambda_min=r.lambda_min,
            delta_S=delta_S(r.lambda_max, r.lambda_min, eps, eta), kappa=r.kappa,
            epsilon=eps, eta=eta, _weights=r._weights,
        )
        for r in kres.per_subset
    )
    delta_star = max(0.0, max(r.delta_S for r in reports))
    witness = None
    if not private:
        witness = build_counterexample(kres.report.m_matrix, kres.report.subset, eta, eps, 0.0)
    return Verdict(
        private=private,
        delta_star=delta_star,
        witness=witness,
        per_subset=reports,
        params=params,
        argmax_subset=kres.report.subset,
        kappa_star=kres.kappa_star,
    )


def epsilon_curve_from_kappa(kappa_star: float, etas: Sequence[float]) -> list[tuple[float, float]]:
    return [(float(eta), optimal_epsilon(kappa_star, float(eta))) for eta in etas]


def epsilon_curve(
    alg: QuantumAlgorithm, etas: Sequence[float], *, cap: int = DEFAULT_SUBSET_CAP
) -> list[tuple[float, float]]:
    """Points ``(eta, eps*(eta))``; ``kappa*`` is computed once."""
    for eta in etas:
        _check_eta(float(eta))
    kres = max_condition_number(alg, cap=cap)
    return epsilon_curve_from_kappa(kres.kappa_star, etas)


def compose_parallel(
    a1: QuantumAlgorithm, s1: Sequence, a2: QuantumAlgorithm, s2: Sequence
) -> QuantumAlgorithm:
    """Parallel composition with the binary measurement ``{M1_S1 (x) M2_S2, I - M1_S1 (x) M2_S2}``.

    The channel is ``E1 (x) E2`` with ``a1`` on the leading qubits. The two
    outcomes are labelled ``"0"`` (both subsets hit) and ``"1"``.
    """
    m1 = a1.povm.subset_sum(s1)
    m2 = a2.povm.subset_sum(s2)
    if not a1.povm.indices(s1) or not a2.povm.indices(s2):
        raise InvalidInput("composition subsets must be non-empty")
    joint = np.kron(m1, m2)
    povm = Povm([joint, np.eye(joint.shape[0]) - joint], labels=["0", "1"])
    return QuantumAlgorithm(tensor_channels(a1.channel, a2.channel), povm)

