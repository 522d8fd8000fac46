"""Dense complex-matrix kernel.

Extremal eigenpairs of Hermitian matrices, trace distance, positivity
checks and symmetrization. Matrices are plain ``numpy`` arrays; anything
exposing ``__array__`` (e.g. :class:`~qdpverify.model.DensityMatrix`) is
accepted as well.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailure, DimensionMismatch, InvalidMatrix

HERMITIAN_TOL = 1e-10
HERMITIZE_GUARD = 1e-8
PSD_TOL = 1e-9
EIG_RESIDUAL_TOL = 1e-8
COMPLETENESS_TOL = 1e-8

# Below this dimension a full decomposition is cheaper than two partial ones.
_FULL_EIGH_MAX_DIM = 128


@dataclass(frozen=True)
class EigenExtremes:
    """Largest and smallest eigenpairs of a Hermitian matrix."""

    lambda_max: float
    lambda_min: float
    vec_max: np.ndarray
    vec_min: np.ndarray
    residual: float


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a square complex 2-D array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise InvalidMatrix(f"expected a non-empty square matrix, got shape {arr.shape}")
    return arr


def hermitian_defect(m: np.ndarray) -> float:
    """Largest entrywise deviation ``|m[i, j] - conj(m[j, i])|``."""
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)))


def check_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    arr = as_matrix(m)
    defect = hermitian_defect(arr)
    if defect > tol:
        raise InvalidMatrix(f"matrix is not Hermitian (defect {defect:.3g} > {tol:.1g})")
    return arr


def hermitize(m, guard: float = HERMITIZE_GUARD) -> np.ndarray:
    """Symmetrize ``m`` to ``(m + m^dagger) / 2``.

    Intended for removing rounding noise accumulated in sums such as
    ``sum_k E_k^dagger M E_k``. An asymmetry larger than ``guard`` points at
    a broken channel or measurement upstream and raises
    :class:`InvalidMatrix`.
    """
    arr = as_matrix(m)
    defect = hermitian_defect(arr)
    if defect > guard:
        raise InvalidMatrix(f"asymmetry {defect:.3g} exceeds hermitize guard {guard:.1g}")
    return (arr + arr.conj().T) / 2


def _residual(m: np.ndarray, lam: float, vec: np.ndarray) -> float:
    return float(np.linalg.norm(m @ vec - lam * vec))


def extremal_eigenpairs(m, tol: float = EIG_RESIDUAL_TOL) -> EigenExtremes:
    """Largest and smallest eigenvalues of a Hermitian matrix with unit eigenvectors.

    Small matrices use a full LAPACK decomposition, larger ones request only
    the two extreme eigenpairs. Either way the result is accepted only when
    ``||M v - lambda v|| <= tol * max(1, |lambda|)`` for both pairs.

    Raises:
        InvalidMatrix: if ``m`` is not Hermitian within ``HERMITIAN_TOL``.
        ConvergenceFailure: if LAPACK fails or the residual bound is missed.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    arr = check_hermitian(m)
    arr = (arr + arr.conj().T) / 2
    dim = arr.shape[0]
    try:
        if dim <= _FULL_EIGH_MAX_DIM:
            w, v = np.linalg.eigh(arr)
            lo, hi = float(w[0]), float(w[-1])
            v_lo, v_hi = v[:, 0], v[:, -1]
        else:
            w_lo, v_lo = scipy.linalg.eigh(arr, subset_by_index=[0, 0])
            w_hi, v_hi = scipy.linalg.eigh(arr, subset_by_index=[dim - 1, dim - 1])
            lo, hi = float(w_lo[0]), float(w_hi[0])
            v_lo, v_hi = v_lo[:, 0], v_hi[:, 0]
            if abs(np.vdot(v_lo, v_hi)) > 1e-6:
                # degenerate spectrum: partial solves may return the same vector
                w, v = np.linalg.eigh(arr)
                lo, hi = float(w[0]), float(w[-1])
                v_lo, v_hi = v[:, 0], v[:, -1]
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise ConvergenceFailure(f"eigensolver failed: {exc}") from exc

    v_lo = v_lo / np.linalg.norm(v_lo)
    v_hi = v_hi / np.linalg.norm(v_hi)
    r_hi = _residual(arr, hi, v_hi)
    r_lo = _residual(arr, lo, v_lo)
    if r_hi > tol * max(1.0, abs(hi)) or r_lo > tol * max(1.0, abs(lo)):
        raise ConvergenceFailure(
            f"eigen residual {max(r_hi, r_lo):.3g} above tolerance {tol:.1g}",
            best_residual=max(r_hi, r_lo),
        )
    return EigenExtremes(
        lambda_max=hi,
        lambda_min=min(lo, hi),
        vec_max=v_hi,
        vec_min=v_lo,
        residual=max(r_hi, r_lo),
    )


def trace_distance(rho, sigma) -> float:
    """``D(rho, sigma) = 1/2 * sum |mu_i|`` over eigenvalues of ``rho - sigma``."""
    a = as_matrix(rho)
    b = as_matrix(sigma)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    diff = a - b
    diff = (diff + diff.conj().T) / 2
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def is_psd(m, tol: float = PSD_TOL) -> bool:
    """True iff the smallest eigenvalue of ``m`` is at least ``-tol``."""
    arr = check_hermitian(m)
    return bool(np.linalg.eigvalsh((arr + arr.conj().T) / 2)[0] >= -tol)


def is_zero_eigenvalue(lambda_min: float, lambda_max: float) -> bool:
    """Whether ``lambda_min`` counts as an exact zero relative to ``lambda_max``."""
    return lambda_min <= PSD_TOL * max(1.0, abs(lambda_max))
