"""POVM measurements and quantum algorithms (channel followed by a POVM)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DimensionMismatch, InvalidInput, InvalidMatrix, InvalidPovm, InvalidTarget
from ..linalg import COMPLETENESS_TOL, PSD_TOL, as_matrix, hermitize
from .channels import Channel, apply_channel


class Povm:
    """Ordered measurement ``{M_k}`` keyed by string outcome labels."""

    def __init__(self, elements, labels: Sequence | None = None):
        mats = [as_matrix(e) for e in elements]
        if not mats:
            raise InvalidPovm("a POVM needs at least one element")
        dim = mats[0].shape[0]
        if any(m.shape[0] != dim for m in mats):
            raise InvalidPovm("POVM elements have different dimensions")
        try:
            mats = [hermitize(m) for m in mats]
        except InvalidMatrix as exc:
            raise InvalidPovm(f"POVM element is not Hermitian: {exc}") from exc
        for k, m in enumerate(mats):
            lam = np.linalg.eigvalsh(m)[0]
            if lam < -PSD_TOL:
                raise InvalidPovm(f"POVM element {k} has negative eigenvalue {lam:.3g}")
        dev = float(np.max(np.abs(sum(mats) - np.eye(dim))))
        if dev > COMPLETENESS_TOL:
            raise InvalidPovm(f"POVM elements do not sum to identity (deviation {dev:.3g})")
        labels = [str(k) for k in range(len(mats))] if labels is None else [str(x) for x in labels]
        if len(labels) != len(mats) or len(set(labels)) != len(labels):
            raise InvalidPovm("POVM labels must be distinct and match the number of elements")
        n = dim.bit_length() - 1
        if 2**n != dim:
            raise InvalidPovm(f"dimension {dim} is not a power of two")
        stacked = np.array(mats)
        stacked.setflags(write=False)
        self.elements = stacked
        self.labels = tuple(labels)
        self.n_qubits = n

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    def __len__(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        return f"Povm(n_qubits={self.n_qubits}, labels={self.labels})"

    def element(self, label) -> np.ndarray:
        return self.elements[self.labels.index(str(label))]

    def subset_sum(self, labels) -> np.ndarray:
        idx = self.indices(labels)
        return self.elements[list(idx)].sum(axis=0) if idx else np.zeros((self.dim, self.dim), dtype=complex)

    def indices(self, labels) -> tuple[int, ...]:
        out = []
        for lab in labels:
            lab = str(lab)
            if lab not in self.labels:
                raise InvalidInput(f"unknown outcome label {lab!r}; known labels {self.labels}")
            out.append(self.labels.index(lab))
        return tuple(sorted(set(out)))

    @classmethod
    def trivial(cls, n_qubits: int) -> "Povm":
        return cls([np.eye(2**n_qubits)], labels=["0"])

    @classmethod
    def computational(cls, n_qubits: int, qubits: Sequence[int] | None = None) -> "Povm":
        """Projectors onto bitstrings of ``qubits``; labels are the bitstrings."""
        qubits = list(range(n_qubits)) if qubits is None else [int(q) for q in qubits]
        if not qubits or len(set(qubits)) != len(qubits) or any(not 0 <= q < n_qubits for q in qubits):
            raise InvalidTarget(f"bad measured qubits {qubits} for {n_qubits} qubits")
        dim = 2**n_qubits
        idx = np.arange(dim)
        bits = (idx[:, None] >> (n_qubits - 1 - np.array(qubits))[None, :]) & 1
        elements, labels = [], []
        for value in range(2 ** len(qubits)):
            want = (value >> (len(qubits) - 1 - np.arange(len(qubits)))) & 1
            diag = np.all(bits == want[None, :], axis=1).astype(complex)
            elements.append(np.diag(diag))
            labels.append(format(value, f"0{len(qubits)}b"))
        return cls(elements, labels)


@dataclass(frozen=True)
class QuantumAlgorithm:
    """A noisy circuit followed by a measurement: ``rho -> {tr(M_k E(rho))}_k``."""

    channel: Channel
    povm: Povm

    def __post_init__(self):
        if self.channel.n_qubits != self.povm.n_qubits:
            raise DimensionMismatch(
                f"channel on {self.channel.n_qubits} qubits, POVM on {self.povm.n_qubits} qubits"
            )

    @property
    def n_qubits(self) -> int:
        return self.povm.n_qubits

    @property
    def labels(self) -> tuple[str, ...]:
        return self.povm.labels


def measure_distribution(alg: QuantumAlgorithm, rho) -> dict[str, float]:
    """Outcome probabilities ``p_k = tr(M_k E(rho))``; tiny negatives clamp to zero."""
    m = as_matrix(rho)
    if m.shape[0] != alg.povm.dim:
        raise DimensionMismatch(f"state of dimension {m.shape[0]} for algorithm of dimension {alg.povm.dim}")
    out = apply_channel(alg.channel, m).matrix
    probs = np.real(np.einsum("kij,ji->k", alg.povm.elements, out))
    if np.any(probs < -PSD_TOL):
        raise InvalidPovm(f"negative outcome probability {probs.min():.3g}")
    probs = np.clip(probs, 0.0, None)
    return dict(zip(alg.povm.labels, probs.tolist()))


def subset_probability(alg: QuantumAlgorithm, rho, subset) -> float:
    dist = measure_distribution(alg, rho)
    return float(sum(dist[str(k)] for k in subset))

