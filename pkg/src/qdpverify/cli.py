"""Command line front end: ``qdpverify {verify,kappa,curve,compose}``.

Exit status is 0 when the algorithm is private (or the command simply
succeeded), 2 when a violation was found and 1 on any error. Errors are
reported on stderr as a one-line JSON record ``{"error": code, "message": ...}``.
"""

from __future__ import annotations

import argparse
import csv
import functools
import io
import json
import logging
import math
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .errors import InvalidInput, QdpError
from .linalg import trace_distance
from .model.circuits import NoiseInjection
from .model.channels import NOISE_KINDS
from .oracle import check_counterexample, sampled_supremum, violation_search
from .serialize import (
    AlgorithmFile,
    dump_json,
    kappa_report,
    load_algorithm_file,
    provenance,
    save_algorithm_file,
    verdict_report,
)
from .verifier import (
    DEFAULT_SUBSET_CAP,
    DpParams,
    compose_parallel,
    epsilon_curve_from_kappa,
    max_condition_number,
    optimal_epsilon,
    verify_dp,
)

log = logging.getLogger("qdpverify")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2
DEFAULT_ORACLE_TRIALS = 10_000


class UsageError(InvalidInput):
    code = "UsageError"


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage, which would read as "violation found"
    def error(self, message):
        raise UsageError(message)


def error_record(exc: BaseException) -> str:
    code = exc.code if isinstance(exc, QdpError) else "InternalError"
    return json.dumps({"error": code, "message": str(exc)})


def _guarded(fn):
    """Turn any exception into exit status 1 plus an error record on stderr."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Exception as exc:
            log.debug("command failed", exc_info=True)
            print(error_record(exc), file=sys.stderr)
            return EXIT_ERROR

    return wrapper


def _fmt_subset(subset) -> str:
    return "{" + ", ".join(subset) + "}"


def _fmt_real(x: float) -> str:
    return "inf" if math.isinf(x) else repr(float(x))


def _load(path, noise: NoiseInjection | None, cap: int):
    f = load_algorithm_file(path)
    if noise is not None:
        f = f.with_noise(noise)
    return f.algorithm(cap)


def _witness_summary(c) -> list[str]:
    dist = trace_distance(c.gamma.matrix, c.phi.matrix)
    return [
        f"witness subset: {_fmt_subset(c.witness_subset)}",
        f"violation amount: {c.violation_amount!r}",
        f"trace distance(gamma, phi): {dist!r}",
        f"gamma eigenvalues: {np.round(np.linalg.eigvalsh(c.gamma.matrix)[::-1], 12).tolist()}",
    ]


@_guarded
def cmd_verify(
    input_path,
    eps: float,
    delta: float,
    eta: float,
    out_path=None,
    *,
    noise: NoiseInjection | None = None,
    cap: int = DEFAULT_SUBSET_CAP,
    workers: int | None = None,
    cross_check: bool = False,
    oracle_trials: int = DEFAULT_ORACLE_TRIALS,
    seed: int = 0,
    stdout=None,
) -> int:
    """Decide (eps, delta)-privacy within eta and write a report."""
    stdout = stdout or sys.stdout
    start = time.perf_counter()
    params = DpParams(eps, delta, eta)
    alg = _load(input_path, noise, cap)
    verdict = verify_dp(alg, params, cap=cap, workers=workers)
    lines = [
        f"private: {str(verdict.private).lower()}",
        f"delta*: {verdict.delta_star!r}",
        f"S*: {_fmt_subset(verdict.argmax_subset)}",
    ]
    if verdict.witness is not None:
        lines += _witness_summary(verdict.witness)
    extra = {}
    if cross_check:
        found = violation_search(alg, params, trials=oracle_trials, seed=seed)
        sup = sampled_supremum(alg, params, trials=oracle_trials, seed=seed)
        agrees = (found is None) == verdict.private
        replay = check_counterexample(alg, verdict.witness, params) if verdict.witness is not None else None
        extra["cross_check"] = {
            "trials": oracle_trials,
            "seed": seed,
            "oracle_found_violation": found is not None,
            "oracle_margin": None if found is None else found.margin,
            "sampled_supremum": sup,
            "witness_replays": replay,
            "agrees": agrees,
        }
        lines.append(f"oracle cross-check: {'agrees' if agrees else 'DISAGREES'} (sampled sup margin {sup!r})")
        if not agrees or replay is False:
            log.warning("oracle cross-check disagrees with the spectral verdict")
    report = verdict_report(verdict, provenance(input_path, seed if cross_check else None,
                                                time.perf_counter() - start, "verify"))
    report.update(extra)
    if out_path:
        dump_json(report, out_path)
    print("\n".join(lines), file=stdout)
    return EXIT_OK if verdict.private else EXIT_VIOLATION


@_guarded
def cmd_kappa(
    input_path,
    eta: float = 1.0,
    out_path=None,
    *,
    noise: NoiseInjection | None = None,
    cap: int = DEFAULT_SUBSET_CAP,
    workers: int | None = None,
    stdout=None,
) -> int:
    """Largest condition number over outcome subsets, its subset and witness."""
    stdout = stdout or sys.stdout
    start = time.perf_counter()
    alg = _load(input_path, noise, cap)
    res = max_condition_number(alg, eta, cap=cap, workers=workers)
    report = kappa_report(res, eta, provenance(input_path, None, time.perf_counter() - start, "kappa"))
    if out_path:
        dump_json(report, out_path)
    print(f"kappa*: {_fmt_real(res.kappa_star)}", file=stdout)
    print(f"S*: {_fmt_subset(res.report.subset)}", file=stdout)
    print(f"eps*(eta={eta}): {_fmt_real(optimal_epsilon(res.kappa_star, eta))}", file=stdout)
    return EXIT_OK


def parse_grid(text: str) -> list[float]:
    """``"0.1,0.5,1"`` or ``"linspace:start:stop:count"``."""
    text = text.strip()
    try:
        if text.startswith("linspace:"):
            _, a, b, n = text.split(":")
            etas = np.linspace(float(a), float(b), int(n)).tolist()
        else:
            etas = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad eta grid {text!r}: {exc}") from exc
    if not etas:
        raise UsageError("empty eta grid")
    bad = [e for e in etas if not 0.0 < e <= 1.0]
    if bad:
        raise InvalidInput(f"eta values must lie in (0, 1], got {bad}")
    return etas


def curve_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eta", "eps_star"])
    for eta, eps in points:
        w.writerow([repr(float(eta)), _fmt_real(eps)])
    return buf.getvalue()


@_guarded
def cmd_curve(
    input_path,
    eta_grid: str | Sequence[float],
    out_path=None,
    *,
    noise: NoiseInjection | None = None,
    cap: int = DEFAULT_SUBSET_CAP,
    stdout=None,
) -> int:
    """Write the ``eta,eps_star`` table for a grid of neighborhoods."""
    stdout = stdout or sys.stdout
    etas = parse_grid(eta_grid) if isinstance(eta_grid, str) else [float(e) for e in eta_grid]
    alg = _load(input_path, noise, cap)
    kappa = max_condition_number(alg, cap=cap).kappa_star
    text = curve_csv(epsilon_curve_from_kappa(kappa, etas))
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)
    return EXIT_OK


def parse_subset(text) -> list[str]:
    if isinstance(text, str):
        return [s.strip() for s in text.split(",") if s.strip()]
    return [str(s) for s in text]


@_guarded
def cmd_compose(
    input_a,
    input_b,
    subset_a,
    subset_b,
    out_path,
    *,
    cap: int = DEFAULT_SUBSET_CAP,
    stdout=None,
) -> int:
    """Write the two-outcome parallel composition of two algorithm files."""
    stdout = stdout or sys.stdout
    a1 = _load(input_a, None, cap)
    a2 = _load(input_b, None, cap)
    s1, s2 = parse_subset(subset_a), parse_subset(subset_b)
    alg = compose_parallel(a1, s1, a2, s2)
    f = AlgorithmFile.from_algorithm(
        alg,
        name="composition",
        description=f"{Path(input_a).name}[{','.join(s1)}] x {Path(input_b).name}[{','.join(s2)}]",
    )
    save_algorithm_file(f, out_path)
    print(f"wrote {out_path}: {alg.n_qubits} qubits, outcomes {list(alg.labels)}", file=stdout)
    return EXIT_OK


def _noise_from_args(args) -> NoiseInjection | None:
    if args.noise is None:
        if args.p is not None:
            raise UsageError("--p needs --noise")
        return None
    if args.p is None:
        raise UsageError("--noise needs --p")
    return NoiseInjection(args.noise, args.p, args.placement)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdpverify", description="Exact differential-privacy verification for noisy quantum algorithms.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, with_noise=True):
        p.add_argument("--cap", type=int, default=DEFAULT_SUBSET_CAP,
                       help=f"maximum number of measurement outcomes (default {DEFAULT_SUBSET_CAP})")
        if with_noise:
            p.add_argument("--noise", choices=NOISE_KINDS, help="replace the file's noise model")
            p.add_argument("--p", type=float, help="noise probability for --noise")
            p.add_argument("--placement", default="once_per_qubit_at_end",
                           choices=("once_per_qubit_at_end", "after_each_gate_on_touched_qubits"))

    p = sub.add_parser("verify", help="decide (eps, delta)-privacy within eta")
    p.add_argument("input")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("-o", "--out", help="report path (JSON)")
    p.add_argument("--workers", type=int, help="threads for the subset scan")
    p.add_argument("--cross-check", action="store_true", help="also run the sampling oracle")
    p.add_argument("--oracle-trials", type=int, default=DEFAULT_ORACLE_TRIALS)
    p.add_argument("--seed", type=int, default=0)
    common(p)

    p = sub.add_parser("kappa", help="maximum condition number and its witness")
    p.add_argument("input")
    p.add_argument("--eta", type=float, default=1.0, help="neighborhood used for the witness")
    p.add_argument("-o", "--out", help="report path (JSON)")
    p.add_argument("--workers", type=int)
    common(p)

    p = sub.add_parser("curve", help="optimal epsilon as a function of eta (CSV)")
    p.add_argument("input")
    p.add_argument("--etas", default="linspace:0.02:1:50", help="'a,b,c' or 'linspace:start:stop:count'")
    p.add_argument("-o", "--out", help="CSV path (default stdout)")
    common(p)

    p = sub.add_parser("compose", help="parallel composition of two algorithm files")
    p.add_argument("input_a")
    p.add_argument("input_b")
    p.add_argument("--subset-a", required=True, help="comma-separated outcome labels")
    p.add_argument("--subset-b", required=True)
    p.add_argument("-o", "--out", required=True)
    common(p, with_noise=False)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if args.command == "verify":
        return cmd_verify(args.input, args.eps, args.delta, args.eta, args.out, noise=_noise_from_args(args),
                          cap=args.cap, workers=args.workers, cross_check=args.cross_check,
                          oracle_trials=args.oracle_trials, seed=args.seed)
    if args.command == "kappa":
        return cmd_kappa(args.input, args.eta, args.out, noise=_noise_from_args(args), cap=args.cap,
                         workers=args.workers)
    if args.command == "curve":
        return cmd_curve(args.input, args.etas, args.out, noise=_noise_from_args(args), cap=args.cap)
    return cmd_compose(args.input_a, args.input_b, args.subset_a, args.subset_b, args.out, cap=args.cap)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        return run(argv)
    except SystemExit as exc:
        # --help and --version
        return EXIT_OK if not exc.code else EXIT_ERROR
    except Exception as exc:
        print(error_record(exc), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
