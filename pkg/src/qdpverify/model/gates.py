"""Gate set, gate matrices and lifting to the full register.

Qubit ordering is big-endian: qubit 0 is the leftmost tensor factor and
carries index weight ``2**(n-1)``. For controlled gates the first target
is the control.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InvalidParams, InvalidTarget, UnknownGate

_SQ2 = np.sqrt(2.0)

_FIXED = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / _SQ2,
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    "SX": 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex),
    "CX": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SQRT_ISWAP": np.array(
        [
            [1, 0, 0, 0],
            [0, 1 / _SQ2, 1j / _SQ2, 0],
            [0, 1j / _SQ2, 1 / _SQ2, 0],
            [0, 0, 0, 1],
        ],
        dtype=complex,
    ),
}

# name -> (number of qubits, number of angles)
ARITY = {
    "X": (1, 0), "Y": (1, 0), "Z": (1, 0), "H": (1, 0), "S": (1, 0), "T": (1, 0),
    "SX": (1, 0),
    "RX": (1, 1), "RY": (1, 1), "RZ": (1, 1),
    "CX": (2, 0), "CZ": (2, 0),
    "CRX": (2, 1), "CRY": (2, 1), "CRZ": (2, 1),
    "SQRT_ISWAP": (2, 0),
}

GATE_NAMES = tuple(ARITY)


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


ROTATIONS = {"x": rx, "y": ry, "z": rz}


def controlled(u: np.ndarray) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = u
    return out


@dataclass(frozen=True)
class GateSpec:
    name: str
    targets: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        name = str(self.name).upper()
        if name not in ARITY:
            raise UnknownGate(f"unknown gate {self.name!r}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        n_q, n_p = ARITY[name]
        if len(self.params) != n_p:
            raise InvalidParams(f"{name} takes {n_p} parameter(s), got {len(self.params)}")
        if len(self.targets) != n_q:
            raise InvalidTarget(f"{name} acts on {n_q} qubit(s), got targets {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise InvalidTarget(f"{name} targets must be distinct, got {self.targets}")
        if any(t < 0 for t in self.targets):
            raise InvalidTarget(f"negative qubit index in {self.targets}")

    def check_register(self, n: int) -> None:
        if any(t >= n for t in self.targets):
            raise InvalidTarget(f"{self.name} targets {self.targets} out of range for {n} qubits")


def gate_matrix(g: GateSpec) -> np.ndarray:
    """The 2x2 or 4x4 unitary of a gate."""
    if g.name in _FIXED:
        return _FIXED[g.name].copy()
    if g.name in ("RX", "RY", "RZ"):
        return ROTATIONS[g.name[1].lower()](g.params[0])
    if g.name in ("CRX", "CRY", "CRZ"):
        return controlled(ROTATIONS[g.name[2].lower()](g.params[0]))
    raise UnknownGate(f"unknown gate {g.name!r}")  # pragma: no cover


def _contiguous(targets: Sequence[int]) -> bool:
    return list(targets) == list(range(targets[0], targets[0] + len(targets)))


def apply_local(x: np.ndarray, op: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Left-multiply ``x`` (first axis of size ``2**n``) by ``op`` lifted onto ``targets``.

    ``op`` acts on ``len(targets)`` qubits with ``targets[0]`` as its most
    significant factor. Trailing axes of ``x`` are carried along untouched.
    """
    k = len(targets)
    if _contiguous(targets):
        # qubits (q .. q+k-1) form one middle axis of size 2**k: no transposes needed
        q = targets[0]
        t = x.reshape(2**q, 2**k, -1)
        return np.matmul(op, t).reshape(x.shape)
    rest = x.shape[1:]
    t = x.reshape((2,) * n + rest)
    t = np.moveaxis(t, list(targets), list(range(k)))
    moved_shape = t.shape
    t = op @ t.reshape(2**k, -1)
    t = np.moveaxis(t.reshape(moved_shape), list(range(k)), list(targets))
    return t.reshape(x.shape)


def _apply_right_adjoint(x: np.ndarray, op: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """``x O^dagger`` for a square ``x`` of size ``2**n``."""
    if _contiguous(targets):
        q, k = targets[0], len(targets)
        t = x.reshape(x.shape[0] * 2**q, 2**k, -1)
        return np.matmul(op.conj(), t).reshape(x.shape)
    return apply_local(x.conj().T, op, targets, n).conj().T


def conjugate_local(x: np.ndarray, op: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """``O x O^dagger`` for ``O`` = ``op`` lifted onto ``targets``."""
    return _apply_right_adjoint(apply_local(x, op, targets, n), op, targets, n)


def lift_operator(op: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Full ``2**n`` matrix acting as ``op`` on ``targets`` and identity elsewhere."""
    if any(t < 0 or t >= n for t in targets):
        raise InvalidTarget(f"targets {tuple(targets)} out of range for {n} qubits")
    if len(set(targets)) != len(targets):
        raise InvalidTarget(f"targets must be distinct, got {tuple(targets)}")
    if op.shape != (2 ** len(targets),) * 2:
        raise InvalidParams(f"operator shape {op.shape} does not match {len(targets)} target(s)")
    return apply_local(np.eye(2**n, dtype=complex), op, targets, n)


def lift_gate(g: GateSpec, n: int) -> np.ndarray:
    g.check_register(n)
    return lift_operator(gate_matrix(g), g.targets, n)
