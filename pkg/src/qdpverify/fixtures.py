"""Small reference algorithms, shipped as JSON under ``qdpverify/data``.

``flat_effects`` is a 2-qubit channel whose dualized measurement effects are
multiples of the identity (so it is private for every epsilon);
``flat_effects_relabelled`` appends a relabelling noise channel that breaks this
and makes the condition number infinite. The circuit fixtures are small
instances shaped like common NISQ workloads (a 2-qubit QAOA layer, a 2x2
random-supremacy style circuit, a Givens-rotation Hartree-Fock style
circuit). They are structurally similar to those workloads, not copies of
any published instance.
"""

from __future__ import annotations

import math
from importlib import resources
from pathlib import Path

import numpy as np

from .model.channels import LocalOp
from .model.circuits import NoiseInjection
from .model.gates import GateSpec
from .serialize import AlgorithmFile, encode_matrix, load_algorithm_file, save_algorithm_file

NAMES = (
    "flat_effects",
    "flat_effects_relabelled",
    "trivial",
    "identity_1q",
    "qaoa_2q",
    "supremacy_2x2",
    "hartree_fock_4q",
)


def _ket(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits))
    v[int(bits, 2)] = 1.0
    return v


def _op(out: np.ndarray, inp: str) -> np.ndarray:
    return np.outer(out, _ket(inp))


def flat_effects_kraus() -> np.ndarray:
    k = _ket
    return np.array([
        _op(k("00") + k("10") + k("11"), "00") / math.sqrt(3),
        _op(k("01") + k("10") + k("11"), "01") / math.sqrt(3),
        _op(k("00") + k("01") + 2 * k("10"), "10") / math.sqrt(6),
        _op(k("00") + k("01") + 2 * k("11"), "11") / math.sqrt(6),
    ])


def relabel_noise_kraus() -> np.ndarray:
    k = _ket
    return np.array([_op(k("00"), "00"), _op(k("10"), "01"), _op(k("10"), "10"), _op(k("11"), "11")])


def half_split_measurement() -> list[np.ndarray]:
    return [np.diag([1.0, 1.0, 0.0, 0.0]), np.diag([0.0, 0.0, 1.0, 1.0])]


def _explicit(elements, labels=None) -> dict:
    meas = {"type": "explicit", "elements": [encode_matrix(e) for e in elements]}
    if labels is not None:
        meas["labels"] = list(labels)
    return meas


def _gates(items) -> list[GateSpec]:
    specs = []
    for name, targets, *rest in items:
        specs.append(GateSpec(name, targets, rest[0] if rest else ()))
    return specs


def _givens(a: int, b: int, theta: float) -> list[tuple]:
    # sqrt(iSWAP), opposite Z phases, sqrt(iSWAP), then a Z correction
    return [
        ("SQRT_ISWAP", (a, b)),
        ("RZ", (a,), (-theta,)),
        ("RZ", (b,), (theta + math.pi,)),
        ("SQRT_ISWAP", (a, b)),
        ("RZ", (b,), (math.pi,)),
    ]


def build(name: str) -> AlgorithmFile:
    if name == "flat_effects":
        return AlgorithmFile(
            2, _explicit(half_split_measurement()), channels=[LocalOp((0, 1), flat_effects_kraus(), "E")],
            name=name, description="channel with identity-proportional dualized effects",
        )
    if name == "flat_effects_relabelled":
        return AlgorithmFile(
            2, _explicit(half_split_measurement()),
            channels=[LocalOp((0, 1), flat_effects_kraus(), "E"), LocalOp((0, 1), relabel_noise_kraus(), "F")],
            name=name, description="flat_effects followed by a relabelling noise channel",
        )
    if name == "trivial":
        return AlgorithmFile(1, _explicit([np.eye(2)]), name=name, description="single-outcome measurement")
    if name == "identity_1q":
        return AlgorithmFile(1, {"type": "computational", "qubits": [0]}, name=name,
                             description="identity channel, computational-basis measurement")
    if name == "qaoa_2q":
        items = [("RY", (q,), (-math.pi / 2,)) for q in (0, 1)]
        items += [("RZ", (q,), (math.pi / 2,)) for q in (0, 1)]
        items += [("CZ", (0, 1))]
        items += [("RX", (q,), (math.pi,)) for q in (0, 1)]
        return AlgorithmFile(2, {"type": "computational", "qubits": [0, 1]}, _gates(items),
                             NoiseInjection("depolarizing", 0.01), name=name,
                             description="one QAOA layer on two qubits")
    if name == "supremacy_2x2":
        items = [("H", (q,)) for q in range(4)]
        items += [("T", (0,)), ("T", (1,)), ("CZ", (2, 3))]
        items += [("CZ", (0, 1)), ("T", (2,)), ("T", (3,))]
        items += [("CZ", (1, 3))]
        items += [("T", (0,)), ("SX", (2,))]
        items += [("CZ", (0, 2))]
        items += [("T", (1,)), ("T", (3,))]
        return AlgorithmFile(4, {"type": "computational", "qubits": [0, 1]}, _gates(items),
                             NoiseInjection("depolarizing", 0.01), name=name,
                             description="2x2 grid random circuit, four CZ layers")
    if name == "hartree_fock_4q":
        items = [("X", (0,)), ("X", (1,))]
        for a, b, theta in ((1, 2, 0.3), (0, 1, 0.7), (2, 3, 0.5), (1, 2, 1.1)):
            items += _givens(a, b, theta)
        return AlgorithmFile(4, {"type": "computational", "qubits": [0, 1]}, _gates(items),
                             NoiseInjection("bit_flip", 0.01), name=name,
                             description="Givens-rotation basis change on two occupied modes")
    raise KeyError(f"unknown fixture {name!r}; known: {NAMES}")


def fixture_path(name: str) -> Path:
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; known: {NAMES}")
    return Path(str(resources.files("qdpverify") / "data" / f"{name}.json"))


def load(name: str) -> AlgorithmFile:
    return load_algorithm_file(fixture_path(name))


def write_all(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name in NAMES:
        path = directory / f"{name}.json"
        save_algorithm_file(build(name), path)
        paths.append(path)
    return paths


if __name__ == "__main__":
    for p in write_all(Path(__file__).parent / "data"):
        print(p)
