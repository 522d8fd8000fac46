"""Gate circuits and noise injection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InvalidChannel, InvalidInput, InvalidProbability
from .channels import NOISE_KINDS, ChannelSequence, KrausChannel, LocalOp, noise_op
from .gates import GateSpec, gate_matrix

PLACEMENTS = ("after_each_gate_on_touched_qubits", "once_per_qubit_at_end", "none")


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[GateSpec, ...] = ()

    def __post_init__(self):
        if int(self.n_qubits) < 1:
            raise InvalidInput("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            g.check_register(self.n_qubits)

    def unitary(self) -> np.ndarray:
        return circuit_to_sequence(self).to_kraus(cap=1).kraus[0]


@dataclass(frozen=True)
class NoiseInjection:
    """Which noise model to add to a circuit and where.

    ``after_each_gate_on_touched_qubits`` follows every gate with one noise
    stage per qubit the gate touched; ``once_per_qubit_at_end`` adds one
    stage per qubit after the last gate.
    """

    kind: str = "depolarizing"
    p: float = 0.0
    placement: str = "once_per_qubit_at_end"

    def __post_init__(self):
        if self.placement not in PLACEMENTS:
            raise InvalidInput(f"unknown noise placement {self.placement!r}; expected one of {PLACEMENTS}")
        if self.placement != "none":
            if self.kind not in NOISE_KINDS:
                raise InvalidChannel(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
            if not 0.0 <= float(self.p) <= 1.0:
                raise InvalidProbability(f"noise probability {self.p} outside [0, 1]")

    @classmethod
    def noiseless(cls) -> "NoiseInjection":
        return cls(kind="depolarizing", p=0.0, placement="none")


def gate_op(g: GateSpec) -> LocalOp:
    label = g.name if not g.params else f"{g.name}({', '.join(repr(p) for p in g.params)})"
    return LocalOp(g.targets, gate_matrix(g)[None], label=label)


def circuit_to_sequence(c: Circuit, noise: NoiseInjection | None = None) -> ChannelSequence:
    """Noisy circuit as an unreduced sequence of local stages."""
    noise = noise or NoiseInjection.noiseless()
    steps: list[LocalOp] = []
    for g in c.gates:
        steps.append(gate_op(g))
        if noise.placement == "after_each_gate_on_touched_qubits":
            steps.extend(noise_op(noise.kind, noise.p, q) for q in g.targets)
    if noise.placement == "once_per_qubit_at_end":
        steps.extend(noise_op(noise.kind, noise.p, q) for q in range(c.n_qubits))
    return ChannelSequence(c.n_qubits, steps)


def circuit_to_channel(c: Circuit, noise: NoiseInjection | None = None, cap: int | None = None) -> KrausChannel:
    """Noisy circuit as a single full-register Kraus list.

    The list is the unreduced product of all stages; ``cap`` (default
    ``4**n``) bounds its length and :class:`~qdpverify.errors.ResourceLimit`
    is raised beyond it. Prefer :func:`circuit_to_sequence` for anything
    but small registers.
    """
    return circuit_to_sequence(c, noise).to_kraus(cap)


def make_circuit(n_qubits: int, gates: Sequence[tuple]) -> Circuit:
    """Build a circuit from ``(name, targets)`` or ``(name, targets, params)`` tuples."""
    specs = []
    for item in gates:
        name, targets, *rest = item
        params = rest[0] if rest else ()
        specs.append(GateSpec(name, tuple(targets), tuple(params)))
    return Circuit(n_qubits, tuple(specs))


def random_circuit(n_qubits: int, depth: int, seed: int) -> Circuit:
    """Layered random circuit: a random rotation on every qubit, then a brickwork of CZ/CX."""
    rng = np.random.default_rng(seed)
    gates = []
    for layer in range(depth):
        for q in range(n_qubits):
            name = ("RX", "RY", "RZ")[rng.integers(3)]
            gates.append(GateSpec(name, (q,), (float(rng.uniform(0, 2 * np.pi)),)))
        for q in range(layer % 2, n_qubits - 1, 2):
            name = ("CZ", "CX")[rng.integers(2)]
            gates.append(GateSpec(name, (q, q + 1)))
    return Circuit(n_qubits, tuple(gates))
