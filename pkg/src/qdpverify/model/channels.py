"""Kraus channels, their dual maps, composition and standard noise models.

Two channel representations share one interface (``n_qubits``,
``apply_matrix``, ``dual_matrix``):

* :class:`KrausChannel` keeps an explicit list of full-register Kraus
  matrices.
* :class:`ChannelSequence` keeps an ordered list of local Kraus stages
  (:class:`LocalOp`). It never multiplies Kraus lists out, so circuits with
  noise on many qubits stay cheap to apply and to dualize. Runs of
  consecutive unitary stages are multiplied into one dense unitary on
  first use (registers up to ``MERGE_MAX_QUBITS``), so each further
  application costs two matrix products.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from ..errors import DimensionMismatch, InvalidChannel, InvalidProbability, InvalidTarget, ResourceLimit
from ..linalg import COMPLETENESS_TOL, as_matrix, hermitize
from .gates import apply_local, conjugate_local, lift_operator
from .states import DensityMatrix

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

NOISE_KINDS = ("bit_flip", "phase_flip", "bit_phase_flip", "depolarizing")


MERGE_MAX_QUBITS = 11


def default_kraus_cap(n_qubits: int) -> int:
    return 4**n_qubits


def _stack_kraus(kraus) -> np.ndarray:
    ops = np.asarray(kraus, dtype=complex)
    if ops.ndim == 2:
        ops = ops[None]
    if ops.ndim != 3 or ops.shape[0] == 0 or ops.shape[1] != ops.shape[2]:
        raise InvalidChannel(f"Kraus list must be a non-empty stack of square matrices, got {ops.shape}")
    return ops


def _check_complete(ops: np.ndarray) -> None:
    total = np.einsum("kji,kjl->il", ops.conj(), ops)
    dev = float(np.max(np.abs(total - np.eye(ops.shape[1]))))
    if dev > COMPLETENESS_TOL:
        raise InvalidChannel(f"Kraus operators are not trace preserving (deviation {dev:.3g})")


def _n_qubits(dim: int) -> int:
    n = dim.bit_length() - 1
    if 2**n != dim:
        raise InvalidChannel(f"dimension {dim} is not a power of two")
    return n


class KrausChannel:
    """Channel ``rho -> sum_k E_k rho E_k^dagger`` with ``sum_k E_k^dagger E_k = I``."""

    def __init__(self, kraus):
        ops = _stack_kraus(kraus)
        _check_complete(ops)
        ops.setflags(write=False)
        self.kraus = ops
        self.n_qubits = _n_qubits(ops.shape[1])

    @property
    def dim(self) -> int:
        return self.kraus.shape[1]

    def __len__(self) -> int:
        return self.kraus.shape[0]

    def __repr__(self) -> str:
        return f"KrausChannel(n_qubits={self.n_qubits}, n_kraus={len(self)})"

    def apply_matrix(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return np.einsum("kij,jl,kml->im", self.kraus, x, self.kraus.conj(), optimize=True)

    def dual_matrix(self, m: np.ndarray) -> np.ndarray:
        m = np.asarray(m, dtype=complex)
        return np.einsum("kji,jl,klm->im", self.kraus.conj(), m, self.kraus, optimize=True)

    def to_kraus(self, cap: int | None = None) -> "KrausChannel":
        return self

    @classmethod
    def identity(cls, n_qubits: int) -> "KrausChannel":
        return cls(np.eye(2**n_qubits, dtype=complex))

    @classmethod
    def unitary(cls, u: np.ndarray) -> "KrausChannel":
        return cls(np.asarray(u, dtype=complex)[None])


@dataclass(frozen=True)
class LocalOp:
    """Kraus stage acting on a few qubits of a larger register."""

    targets: tuple[int, ...]
    kraus: np.ndarray
    label: str = ""

    def __post_init__(self):
        ops = _stack_kraus(self.kraus)
        targets = tuple(int(t) for t in self.targets)
        if ops.shape[1] != 2 ** len(targets):
            raise InvalidChannel(f"local Kraus size {ops.shape[1]} does not fit targets {targets}")
        if len(set(targets)) != len(targets) or any(t < 0 for t in targets):
            raise InvalidTarget(f"bad local targets {targets}")
        _check_complete(ops)
        ops.setflags(write=False)
        object.__setattr__(self, "kraus", ops)
        object.__setattr__(self, "targets", targets)

    @property
    def is_unitary(self) -> bool:
        return self.kraus.shape[0] == 1

    def apply(self, x: np.ndarray, n: int) -> np.ndarray:
        return sum(conjugate_local(x, e, self.targets, n) for e in self.kraus)

    def dual(self, m: np.ndarray, n: int) -> np.ndarray:
        return sum(conjugate_local(m, e.conj().T, self.targets, n) for e in self.kraus)

    def lifted(self, n: int) -> KrausChannel:
        return KrausChannel(np.array([lift_operator(e, self.targets, n) for e in self.kraus]))

    def shifted(self, offset: int) -> "LocalOp":
        return LocalOp(tuple(t + offset for t in self.targets), self.kraus, self.label)


class ChannelSequence:
    """Channel ``E_d o ... o E_1`` stored as local stages in application order."""

    def __init__(self, n_qubits: int, steps: Sequence[LocalOp] = ()):
        self.n_qubits = int(n_qubits)
        if self.n_qubits < 1:
            raise InvalidChannel("a channel needs at least one qubit")
        for s in steps:
            if max(s.targets) >= self.n_qubits:
                raise InvalidTarget(f"stage targets {s.targets} out of range for {self.n_qubits} qubits")
        self.steps = tuple(steps)
        self._blocks = None

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def __repr__(self) -> str:
        return f"ChannelSequence(n_qubits={self.n_qubits}, stages={len(self.steps)})"

    def blocks(self) -> tuple:
        """Stages with unitary runs merged: dense unitaries and remaining :class:`LocalOp` s."""
        if self._blocks is None:
            if self.n_qubits > MERGE_MAX_QUBITS:
                self._blocks = self.steps
            else:
                self._blocks = tuple(self._merge_unitaries())
        return self._blocks

    def _merge_unitaries(self):
        run: list[LocalOp] = []
        for s in self.steps + (None,):
            if s is not None and s.is_unitary:
                run.append(s)
                continue
            if len(run) == 1:
                yield run[0]
            elif run:
                u = np.eye(self.dim, dtype=complex)
                for r in run:
                    u = apply_local(u, r.kraus[0], r.targets, self.n_qubits)
                u.setflags(write=False)
                yield u
            run = []
            if s is not None:
                yield s

    def apply_matrix(self, x: np.ndarray) -> np.ndarray:
        out = np.asarray(x, dtype=complex)
        for b in self.blocks():
            out = b @ out @ b.conj().T if isinstance(b, np.ndarray) else b.apply(out, self.n_qubits)
        return out

    def dual_matrix(self, m: np.ndarray) -> np.ndarray:
        out = np.asarray(m, dtype=complex)
        for b in reversed(self.blocks()):
            out = b.conj().T @ out @ b if isinstance(b, np.ndarray) else b.dual(out, self.n_qubits)
        return out

    def then(self, other: "ChannelSequence") -> "ChannelSequence":
        """Sequence applying ``self`` first and ``other`` afterwards."""
        if other.n_qubits != self.n_qubits:
            raise DimensionMismatch(f"{self.n_qubits} vs {other.n_qubits} qubits")
        return ChannelSequence(self.n_qubits, self.steps + other.steps)

    def to_kraus(self, cap: int | None = None) -> KrausChannel:
        """Multiply the stages out into one full-register Kraus list.

        Raises:
            ResourceLimit: if the product list would exceed ``cap`` operators
                (default ``4**n_qubits``).
        """
        cap = default_kraus_cap(self.n_qubits) if cap is None else cap
        total = KrausChannel.identity(self.n_qubits)
        for s in self.steps:
            total = compose_channels(s.lifted(self.n_qubits), total, cap=cap)
        return total


Channel = Union[KrausChannel, ChannelSequence]


def _state_matrix(rho) -> np.ndarray:
    return as_matrix(rho)


def _check_dim(channel: Channel, m: np.ndarray) -> None:
    if m.shape[0] != channel.dim:
        raise DimensionMismatch(f"channel acts on dimension {channel.dim}, got matrix of dimension {m.shape[0]}")


def apply_channel(channel: Channel, rho) -> DensityMatrix:
    """Output state ``E(rho)``, re-hermitized and re-validated."""
    m = _state_matrix(rho)
    _check_dim(channel, m)
    return DensityMatrix(hermitize(channel.apply_matrix(m)))


def dual_apply(channel: Channel, m) -> np.ndarray:
    """Dual map ``E^dagger(M) = sum_k E_k^dagger M E_k`` on a Hermitian observable."""
    arr = hermitize(m)
    _check_dim(channel, arr)
    return hermitize(channel.dual_matrix(arr))


def canonical_kraus(ops: np.ndarray, rel_tol: float = 1e-12) -> np.ndarray:
    """Minimal Kraus list for the same channel (at most ``d**2`` operators).

    Columns ``vec(E_k)`` are factored by an SVD; the left singular vectors
    scaled by the singular values are an orthogonal Kraus set of the map.
    """
    k, d, _ = ops.shape
    a = ops.reshape(k, d * d).T
    u, sv, _ = np.linalg.svd(a, full_matrices=False)
    keep = sv > rel_tol * max(1.0, float(sv[0]))
    return (u[:, keep] * sv[keep]).T.reshape(-1, d, d)


def compose_channels(second: Channel, first: Channel, cap: int | None = None) -> KrausChannel:
    """``second o first`` as a full-register Kraus list.

    The list is all products ``F_j E_i``; when there are more than ``cap``
    of them (default ``4**n``) they are compressed to the canonical form,
    and :class:`ResourceLimit` is raised only if even that exceeds ``cap``.
    """
    if second.n_qubits != first.n_qubits:
        raise DimensionMismatch(f"{second.n_qubits} vs {first.n_qubits} qubits")
    cap = default_kraus_cap(first.n_qubits) if cap is None else cap
    f = second.to_kraus(cap).kraus
    e = first.to_kraus(cap).kraus
    products = np.einsum("jab,ibc->jiac", f, e).reshape(-1, *e.shape[1:])
    if len(products) > cap:
        products = canonical_kraus(products)
        if len(products) > cap:
            raise ResourceLimit(f"composed channel needs {len(products)} Kraus operators (cap {cap})")
    return KrausChannel(products)


def as_sequence(channel: Channel) -> ChannelSequence:
    """View any channel as a stage sequence (a Kraus list becomes one full-register stage)."""
    if isinstance(channel, ChannelSequence):
        return channel
    return ChannelSequence(channel.n_qubits, [LocalOp(tuple(range(channel.n_qubits)), channel.kraus)])


def tensor_channels(first: Channel, second: Channel) -> ChannelSequence:
    """``first (x) second`` with ``first`` on the leading qubits.

    The factors act on disjoint qubits and commute, so the product is the
    first sequence followed by the second one shifted past it.
    """
    a, b = as_sequence(first), as_sequence(second)
    shifted = [s.shifted(a.n_qubits) for s in b.steps]
    return ChannelSequence(a.n_qubits + b.n_qubits, a.steps + tuple(shifted))


def local_noise(kind: str, p: float) -> np.ndarray:
    """Single-qubit Kraus stack for one of the standard noise models."""
    if not 0.0 <= p <= 1.0:
        raise InvalidProbability(f"noise probability {p} outside [0, 1]")
    keep = np.sqrt(1 - p) * PAULI["I"]
    if kind == "depolarizing":
        s = np.sqrt(p / 3)
        return np.array([keep, s * PAULI["X"], s * PAULI["Y"], s * PAULI["Z"]])
    flips = {"bit_flip": "X", "phase_flip": "Z", "bit_phase_flip": "Y"}
    if kind not in flips:
        raise InvalidChannel(f"unknown noise kind {kind!r}; expected one of {NOISE_KINDS}")
    return np.array([keep, np.sqrt(p) * PAULI[flips[kind]]])


def noise_op(kind: str, p: float, target: int) -> LocalOp:
    return LocalOp((target,), local_noise(kind, p), label=f"{kind}({p})")


def noise_channel(kind: str, p: float, target: int, n: int) -> KrausChannel:
    """Noise channel on qubit ``target`` of an ``n``-qubit register."""
    if not 0 <= target < n:
        raise InvalidTarget(f"target {target} out of range for {n} qubits")
    return noise_op(kind, p, target).lifted(n)
