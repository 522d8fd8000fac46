"""States, gates, circuits, channels and measurements."""

from .channels import (
    NOISE_KINDS,
    PAULI,
    Channel,
    ChannelSequence,
    KrausChannel,
    LocalOp,
    apply_channel,
    as_sequence,
    compose_channels,
    default_kraus_cap,
    dual_apply,
    local_noise,
    noise_channel,
    noise_op,
    tensor_channels,
)
from .circuits import (
    PLACEMENTS,
    Circuit,
    NoiseInjection,
    circuit_to_channel,
    circuit_to_sequence,
    gate_op,
    make_circuit,
    random_circuit,
)
from .gates import GATE_NAMES, GateSpec, gate_matrix, lift_gate, lift_operator, rx, ry, rz
from .measurement import Povm, QuantumAlgorithm, measure_distribution, subset_probability
from .states import DensityMatrix, PureState

__all__ = [
    "NOISE_KINDS", "PAULI", "PLACEMENTS", "GATE_NAMES",
    "Channel", "ChannelSequence", "KrausChannel", "LocalOp",
    "Circuit", "NoiseInjection", "GateSpec",
    "Povm", "QuantumAlgorithm", "DensityMatrix", "PureState",
    "apply_channel", "as_sequence", "compose_channels", "default_kraus_cap", "dual_apply",
    "local_noise", "noise_channel", "noise_op", "tensor_channels",
    "circuit_to_channel", "circuit_to_sequence", "gate_op", "make_circuit", "random_circuit",
    "gate_matrix", "lift_gate", "lift_operator", "rx", "ry", "rz",
    "measure_distribution", "subset_probability",
]
