"""Classical-to-quantum data encoding.

Angle encoding rotates qubit ``j`` by ``v[j]`` about a chosen axis;
amplitude encoding stores the normalized vector in the state amplitudes.
:func:`encoded_neighbor_distance` gives the closed-form trace distance
between the angle encodings of two vectors differing in one entry, which is
how a classical neighbor relation turns into a bound ``eta`` on quantum
inputs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import InvalidInput, NotNeighbors
from .model.gates import ROTATIONS
from .model.states import DensityMatrix

log = logging.getLogger(__name__)

DEFAULT_AXIS = "y"


@dataclass(frozen=True)
class ClassicalVector:
    values: tuple[float, ...]
    axes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise InvalidInput("cannot encode an empty vector")
        axes = tuple(a.lower() for a in self.axes) or (DEFAULT_AXIS,) * len(values)
        if len(axes) != len(values):
            raise InvalidInput(f"{len(axes)} axes given for {len(values)} values")
        bad = set(axes) - set(ROTATIONS)
        if bad:
            raise InvalidInput(f"unknown rotation axes {sorted(bad)}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "axes", axes)

    def __len__(self) -> int:
        return len(self.values)


def _as_vector(v) -> ClassicalVector:
    return v if isinstance(v, ClassicalVector) else ClassicalVector(tuple(v))


def angle_state(v) -> np.ndarray:
    """Product state vector ``R_{a_1}(v_1)|0> (x) ... (x) R_{a_n}(v_n)|0>``."""
    v = _as_vector(v)
    qubits = [ROTATIONS[a](x)[:, 0] for x, a in zip(v.values, v.axes)]
    return reduce(np.kron, qubits)


def angle_encode(v) -> DensityMatrix:
    return DensityMatrix.from_vector(angle_state(v))


def amplitude_encode(values: Sequence[float], pad: bool = False) -> DensityMatrix:
    """Pure state with amplitudes ``v_i / ||v||``.

    Lengths that are not a power of two are rejected unless ``pad`` is set,
    in which case zeros are appended and the original length is recorded in
    ``meta["padded_from"]``.
    """
    vec = np.asarray(values, dtype=complex).reshape(-1)
    if vec.size == 0:
        raise InvalidInput("cannot encode an empty vector")
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise InvalidInput("cannot amplitude-encode the zero vector")
    size = max(2, 1 << (vec.size - 1).bit_length())
    meta = {}
    if size != vec.size:
        if not pad:
            raise InvalidInput(f"length {vec.size} is not a power of two (pass pad=True to zero-pad)")
        log.info("zero-padding amplitude encoding from %d to %d entries", vec.size, size)
        meta["padded_from"] = int(vec.size)
        vec = np.concatenate([vec, np.zeros(size - vec.size)])
    vec = vec / norm
    return DensityMatrix(np.outer(vec, vec.conj()), meta=meta)


def neighbor_index(v, w) -> int:
    """Position of the single differing entry of two neighboring vectors."""
    v, w = _as_vector(v), _as_vector(w)
    if len(v) != len(w):
        raise InvalidInput(f"vectors have lengths {len(v)} and {len(w)}")
    if v.axes != w.axes:
        raise InvalidInput("neighboring vectors must use the same encoding axes")
    diff = [j for j, (a, b) in enumerate(zip(v.values, w.values)) if a != b]
    if len(diff) != 1:
        raise NotNeighbors(f"vectors differ in {len(diff)} entries, expected exactly one")
    return diff[0]


def encoded_neighbor_distance(v, w) -> float:
    """Trace distance between the angle encodings of two neighboring vectors.

    Only the differing qubit contributes, so the distance is
    ``sqrt(1 - |<0|R(d)|0> <0|R(-d)|0>|)`` with ``d = v_j - w_j``. For the x
    and y axes the product is ``cos(d / 2)**2`` and the distance is
    ``|sin(d / 2)|``; for z it is a unit phase and the distance vanishes.
    The sine form is used directly since ``1 - cos**2`` loses all precision
    for small ``d``.
    """
    v, w = _as_vector(v), _as_vector(w)
    j = neighbor_index(v, w)
    if v.axes[j] == "z":
        return 0.0
    return abs(math.sin((v.values[j] - w.values[j]) / 2))
