"""Pure and mixed quantum states."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..errors import InvalidState
from ..linalg import HERMITIAN_TOL, PSD_TOL, as_matrix, hermitian_defect

NORM_TOL = 1e-10


def _qubits_for_dim(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or 2**n != dim:
        raise InvalidState(f"dimension {dim} is not a power of two >= 2")
    return n


@dataclass(frozen=True)
class PureState:
    """Unit column vector of ``2**n_qubits`` complex amplitudes."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        _qubits_for_dim(amps.size)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidState(f"amplitude vector has norm {norm:.12g}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return _qubits_for_dim(self.amplitudes.size)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    @classmethod
    def basis(cls, bits: str) -> "PureState":
        """Computational basis state from a bitstring, qubit 0 leftmost."""
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(amps)


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace positive semi-definite matrix on ``n_qubits`` qubits.

    ``meta`` carries free-form provenance (e.g. zero padding applied by
    amplitude encoding) and takes no part in equality.
    """

    matrix: np.ndarray
    meta: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self):
        m = as_matrix(self.matrix)
        _qubits_for_dim(m.shape[0])
        defect = hermitian_defect(m)
        if defect > HERMITIAN_TOL:
            raise InvalidState(f"density matrix not Hermitian (defect {defect:.3g})")
        m = (m + m.conj().T) / 2
        tr = np.trace(m).real
        if abs(tr - 1.0) > PSD_TOL:
            raise InvalidState(f"trace {tr:.12g} differs from 1")
        lam_min = np.linalg.eigvalsh(m)[0]
        if lam_min < -PSD_TOL:
            raise InvalidState(f"density matrix has negative eigenvalue {lam_min:.3g}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    @property
    def n_qubits(self) -> int:
        return _qubits_for_dim(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    @classmethod
    def from_vector(cls, vec) -> "DensityMatrix":
        return PureState(vec).density()

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityMatrix":
        d = 2**n_qubits
        return cls(np.eye(d, dtype=complex) / d)
