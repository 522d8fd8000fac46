"""JSON formats for algorithm descriptions and verification reports.

Complex matrices are stored row-major as nested lists of ``[re, im]``
pairs. Floats are written with Python's shortest round-trip repr, so every
value reloads to the identical double. Infinite condition numbers and
epsilons are written as the string ``"inf"``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .errors import InvalidInput, ParseError, ResourceLimit
from .model.channels import ChannelSequence, LocalOp, as_sequence
from .model.circuits import Circuit, NoiseInjection, circuit_to_sequence
from .model.gates import GateSpec
from .model.measurement import Povm, QuantumAlgorithm
from .model.states import DensityMatrix
from .verifier import DEFAULT_SUBSET_CAP, Counterexample, KappaResult, Verdict, optimal_epsilon

SCHEMA_VERSION = "1.0"
TOP_SUBSETS = 32
EPS_TABLE_ETAS = tuple(round(0.1 * k, 1) for k in range(1, 11))


def encode_matrix(m) -> list:
    a = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def decode_matrix(data) -> np.ndarray:
    try:
        a = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"matrix is not a nested list of numbers: {exc}") from exc
    if a.ndim != 3 or a.shape[-1] != 2 or a.shape[0] != a.shape[1]:
        raise ParseError(f"expected a square matrix of [re, im] pairs, got shape {a.shape}")
    return a[..., 0] + 1j * a[..., 1]


def encode_real(x: float) -> float | str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def decode_real(x) -> float:
    return float(x)


def digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _check_schema(data: dict) -> None:
    version = data.get("schema_version")
    if not isinstance(version, str) or version.split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise ParseError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")


def _require(data: dict, key: str):
    if key not in data:
        raise ParseError(f"missing field {key!r}")
    return data[key]


@dataclass
class AlgorithmFile:
    """A circuit, its noise, optional extra Kraus stages and a measurement.

    Stages run in the order gates (with noise), then ``channels``.
    """

    n_qubits: int
    measurement: dict
    gates: list[GateSpec] = field(default_factory=list)
    noise: NoiseInjection = field(default_factory=NoiseInjection.noiseless)
    channels: list[LocalOp] = field(default_factory=list)
    name: str = ""
    description: str = ""

    @classmethod
    def from_dict(cls, data: Any) -> "AlgorithmFile":
        if not isinstance(data, dict):
            raise ParseError("algorithm file must be a JSON object")
        _check_schema(data)
        n = _require(data, "n_qubits")
        if not isinstance(n, int) or n < 1:
            raise ParseError(f"n_qubits must be a positive integer, got {n!r}")
        gates = []
        for g in data.get("gates", []):
            gates.append(GateSpec(_require(g, "name"), tuple(_require(g, "targets")), tuple(g.get("params", ()))))
        noise_rec = data.get("noise") or {"placement": "none"}
        noise = NoiseInjection(
            kind=noise_rec.get("kind", "depolarizing"),
            p=float(noise_rec.get("p", 0.0)),
            placement=noise_rec.get("placement", "once_per_qubit_at_end"),
        )
        channels = [
            LocalOp(tuple(_require(c, "targets")), np.array([decode_matrix(k) for k in _require(c, "kraus")]),
                    c.get("label", ""))
            for c in data.get("channels", [])
        ]
        meas = _require(data, "measurement")
        if not isinstance(meas, dict) or meas.get("type") not in ("computational", "explicit"):
            raise ParseError("measurement must have type 'computational' or 'explicit'")
        return cls(n, meas, gates, noise, channels, data.get("name", ""), data.get("description", ""))

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"schema_version": SCHEMA_VERSION}
        if self.name:
            out["name"] = self.name
        if self.description:
            out["description"] = self.description
        out["n_qubits"] = self.n_qubits
        out["gates"] = [
            {"name": g.name, "targets": list(g.targets), **({"params": list(g.params)} if g.params else {})}
            for g in self.gates
        ]
        out["noise"] = {"kind": self.noise.kind, "p": float(self.noise.p), "placement": self.noise.placement}
        if self.channels:
            out["channels"] = [
                {"targets": list(c.targets), "kraus": [encode_matrix(k) for k in c.kraus],
                 **({"label": c.label} if c.label else {})}
                for c in self.channels
            ]
        out["measurement"] = self.measurement
        return out

    def circuit(self) -> Circuit:
        return Circuit(self.n_qubits, tuple(self.gates))

    def channel(self) -> ChannelSequence:
        seq = circuit_to_sequence(self.circuit(), self.noise)
        return seq.then(ChannelSequence(self.n_qubits, self.channels))

    def povm(self, cap: int = DEFAULT_SUBSET_CAP) -> Povm:
        meas = self.measurement
        if meas["type"] == "computational":
            qubits = meas.get("qubits", list(range(self.n_qubits)))
            if len(qubits) > 0 and 2 ** len(qubits) > cap:
                raise ResourceLimit(
                    f"measuring {len(qubits)} qubits gives {2 ** len(qubits)} outcomes, above the cap of {cap}"
                )
            return Povm.computational(self.n_qubits, qubits)
        elements = [decode_matrix(e) for e in _require(meas, "elements")]
        povm = Povm(elements, meas.get("labels"))
        if len(povm) > cap:
            raise ResourceLimit(f"{len(povm)} outcomes exceed the cap of {cap}")
        return povm

    def algorithm(self, cap: int = DEFAULT_SUBSET_CAP) -> QuantumAlgorithm:
        return QuantumAlgorithm(self.channel(), self.povm(cap))

    def with_noise(self, noise: NoiseInjection) -> "AlgorithmFile":
        return AlgorithmFile(self.n_qubits, self.measurement, list(self.gates), noise, list(self.channels),
                             self.name, self.description)

    @classmethod
    def from_algorithm(cls, alg: QuantumAlgorithm, name: str = "", description: str = "") -> "AlgorithmFile":
        """Flatten any algorithm into explicit Kraus stages and an explicit POVM."""
        stages = list(as_sequence(alg.channel).steps)
        meas = {
            "type": "explicit",
            "elements": [encode_matrix(e) for e in alg.povm.elements],
            "labels": list(alg.povm.labels),
        }
        return cls(alg.n_qubits, meas, [], NoiseInjection.noiseless(), stages, name, description)


def load_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from exc


def dump_json(data: Any, path: str | Path) -> None:
    text = json.dumps(data, indent=2, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_algorithm_file(path: str | Path) -> AlgorithmFile:
    return AlgorithmFile.from_dict(load_json(path))


def save_algorithm_file(f: AlgorithmFile, path: str | Path) -> None:
    dump_json(f.to_dict(), path)


def encode_counterexample(c: Counterexample | None) -> dict | None:
    if c is None:
        return None
    return {
        "subset": list(c.witness_subset),
        "violation_amount": c.violation_amount,
        "eta_used": c.eta_used,
        "epsilon": c.epsilon,
        "delta": c.delta,
        "gamma": encode_matrix(c.gamma.matrix),
        "phi": encode_matrix(c.phi.matrix),
    }


def decode_counterexample(rec: dict | None) -> Counterexample | None:
    if rec is None:
        return None
    return Counterexample(
        gamma=DensityMatrix(decode_matrix(rec["gamma"])),
        phi=DensityMatrix(decode_matrix(rec["phi"])),
        witness_subset=tuple(str(s) for s in rec["subset"]),
        violation_amount=float(rec["violation_amount"]),
        eta_used=float(rec["eta_used"]),
        epsilon=float(rec["epsilon"]),
        delta=float(rec["delta"]),
    )


def _subset_rows(reports) -> list[dict]:
    return [
        {
            "subset": list(r.subset),
            "lambda_max": r.lambda_max,
            "lambda_min": r.lambda_min,
            "delta_S": r.delta_S,
            "kappa": encode_real(r.kappa),
        }
        for r in reports
    ]


def eps_table(kappa_star: float, etas=EPS_TABLE_ETAS) -> list[dict]:
    return [{"eta": float(e), "eps_star": encode_real(optimal_epsilon(kappa_star, float(e)))} for e in etas]


def provenance(input_path: str | Path | None, seed: int | None, wall_time: float, command: str) -> dict:
    return {
        "command": command,
        "input_sha256": digest(input_path) if input_path else None,
        "seed": seed,
        "tool_version": __version__,
        "wall_time_s": wall_time,
    }


def verdict_report(v: Verdict, prov: dict) -> dict:
    """Report for a verification run; the stored subsets are the top 32 by ``delta_S``."""
    kappa_star = v.kappa_star if v.kappa_star is not None else max(r.kappa for r in v.per_subset)
    etas = sorted(set(EPS_TABLE_ETAS) | {v.params.eta})
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "verify",
        "params": {"epsilon": v.params.epsilon, "delta": v.params.delta, "eta": v.params.eta},
        "private": v.private,
        "delta_star": v.delta_star,
        "argmax_subset": list(v.argmax_subset),
        "kappa_star": encode_real(kappa_star),
        "eps_star": eps_table(kappa_star, etas),
        "witness": encode_counterexample(v.witness),
        "n_subsets": len(v.per_subset),
        "per_subset": _subset_rows(v.top_subsets(TOP_SUBSETS)),
        "provenance": prov,
    }


def kappa_report(k: KappaResult, eta: float, prov: dict) -> dict:
    top = sorted(k.per_subset, key=lambda r: -r.kappa)[:TOP_SUBSETS]
    etas = sorted(set(EPS_TABLE_ETAS) | {eta})
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "kappa",
        "params": {"eta": eta},
        "kappa_star": encode_real(k.kappa_star),
        "argmax_subset": list(k.report.subset),
        "eps_star": eps_table(k.kappa_star, etas),
        "witness": encode_counterexample(k.witness),
        "n_subsets": len(k.per_subset),
        "per_subset": _subset_rows(top),
        "provenance": prov,
    }


def load_report(path: str | Path) -> dict:
    """Read a report; the witness entry is decoded into a :class:`Counterexample`."""
    data = load_json(path)
    if not isinstance(data, dict):
        raise ParseError("report must be a JSON object")
    _check_schema(data)
    data["witness"] = decode_counterexample(data.get("witness"))
    if "kappa_star" in data:
        data["kappa_star"] = decode_real(data["kappa_star"])
    return data
