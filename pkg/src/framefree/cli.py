"""Command-line driver: decomposition tables, rates, channel checks, protocols.

Every command emits a Report whose verdicts can be recomputed from the
payload and the tolerance alone.  Exit codes: 0 all verdicts pass, 1
verification failure or runtime error, 2 invalid arguments.  Output is
byte-stable for a fixed (command, flags, seed) apart from the duration
field.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass
from math import sqrt

import numpy as np

from .core import (DensityOperator, RandomSource, collective_rotation, fidelity,
                   haar_random_su2, random_density, random_state_vector,
                   trace_distance)
from .irreps import decompose, total_irrep_count
from .optics import run_optical_protocol
from .protocols import (block_outcome_probabilities, build_classical_codebook,
                        classical_rate_asymptote, classical_round_trip,
                        decode_logical, dephasing_sector_encoding,
                        dfs_encoding_4qubit, encode_logical, logical_bell_chsh_trials,
                        most_repeated_irrep, noiseless_subsystem_plan, rate_table)
from .twirl import TwirlChannel

TSIRELSON = 2.0 * sqrt(2.0)


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int
    trials: int = 1000
    seed: int = 42
    tolerance: float = 1e-9
    output_format: str = "json"
    output_path: str | None = None
    singlet_first: bool = False


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    value: float
    threshold: float


@dataclass(frozen=True)
class Report:
    command: str
    config: dict
    payload: dict
    verdicts: tuple[Verdict, ...]
    passed: bool
    duration_s: float

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "payload": self.payload,
            "verdicts": [asdict(v) for v in self.verdicts],
            "passed": self.passed,
            "duration_s": self.duration_s,
        }


def _bounded_int(lo: int, hi: int):
    def parse(text: str) -> int:
        value = int(text)
        if not lo <= value <= hi:
            raise argparse.ArgumentTypeError(f"value must be in {lo}..{hi}, got {value}")
        return value
    return parse


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"value must be positive, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"value must be positive, got {value}")
    return value


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--trials", type=_positive_int, default=1000)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--tolerance", type=_positive_float, default=1e-9)
    parser.add_argument("--output", choices=("json", "csv"), default="json")
    parser.add_argument("--out-file", default=None)


def parse_args(argv) -> RunConfig:
    parser = argparse.ArgumentParser(
        prog="framefree",
        description="Communication protocols over collective-rotation channels.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="block multiplicity table for n qubits")
    p.add_argument("--n", type=_bounded_int(1, 12), default=4)
    _add_common(p)

    p = sub.add_parser("rates", help="communication rates up to a qubit count")
    p.add_argument("--max-n", dest="n", type=_bounded_int(1, 64), default=16)
    _add_common(p)

    p = sub.add_parser("twirl-check", help="fixed-point and idempotence residuals")
    p.add_argument("--n", type=_bounded_int(1, 8), default=2)
    _add_common(p)

    p = sub.add_parser("classical", help="classical round trips under random frames")
    p.add_argument("--n", type=_bounded_int(1, 10), default=2)
    p.add_argument("--singlet-first", action="store_true")
    _add_common(p)

    p = sub.add_parser("quantum", help="decode fidelities of the protected codes")
    _add_common(p)

    p = sub.add_parser("optics", help="two-photon protocol through a random fiber")
    _add_common(p)

    p = sub.add_parser("bell", help="logical CHSH value under random frames")
    _add_common(p)

    ns = parser.parse_args(argv)
    return RunConfig(
        command=ns.command,
        n=getattr(ns, "n", 0),
        trials=ns.trials,
        seed=ns.seed,
        tolerance=ns.tolerance,
        output_format=ns.output,
        output_path=ns.out_file,
        singlet_first=getattr(ns, "singlet_first", False),
    )


def _run_decompose(cfg: RunConfig, rng: RandomSource):
    d = decompose(cfg.n)
    j2 = [j.twice for j in d.multiplicity_table]
    mult = [d.multiplicity_table[j] for j in d.multiplicity_table]
    dimension_sum = sum((t + 1) * c for t, c in zip(j2, mult))
    payload = {
        "n": cfg.n,
        "j2": j2,
        "multiplicity": mult,
        "total": sum(mult),
        "dimension_sum": dimension_sum,
        "expected_dimension": 2 ** cfg.n,
    }
    verdicts = (
        Verdict("dimension_sum_matches", dimension_sum == 2 ** cfg.n,
                float(abs(dimension_sum - 2 ** cfg.n)), 0.0),
        Verdict("total_matches_closed_form", sum(mult) == total_irrep_count(cfg.n),
                float(abs(sum(mult) - total_irrep_count(cfg.n))), 0.0),
    )
    return payload, verdicts


def _run_rates(cfg: RunConfig, rng: RandomSource):
    table = rate_table(cfg.n)
    rows = []
    for row in table.rows:
        rows.append({
            "n": row.n,
            "classical_rate": row.classical_rate,
            "quantum_rate": row.quantum_rate,
            "dephasing_rate": row.dephasing_quantum_rate,
            "asymptotic_gap": classical_rate_asymptote(row.n) - row.classical_rate,
            "j2_max": most_repeated_irrep(row.n)[0].twice,
        })
    payload = {"max_n": cfg.n, "rate_rows": rows}
    all_rates = [r[k] for r in rows for k in ("classical_rate", "quantum_rate", "dephasing_rate")]
    in_bounds = all(0.0 <= x <= 1.0 for x in all_rates)
    even = [r["classical_rate"] for r in rows if r["n"] % 2 == 0]
    monotone = all(a <= b for a, b in zip(even, even[1:]))
    verdicts = (
        Verdict("rates_within_unit_interval", in_bounds,
                float(min(all_rates)), 0.0),
        Verdict("classical_rate_monotone_even_n", monotone,
                float(min((b - a for a, b in zip(even, even[1:])), default=0.0)), 0.0),
    )
    return payload, verdicts


def _run_twirl_check(cfg: RunConfig, rng: RandomSource):
    full = TwirlChannel.full_su2(cfg.n)
    dephasing = TwirlChannel.u1_dephasing(cfg.n)
    residuals = {}
    for name, channel in (("full_su2", full), ("u1_dephasing", dephasing)):
        idem = 0.0
        trace_dev = 0.0
        for _ in range(cfg.trials):
            rho = random_density(rng, 2 ** cfg.n)
            once = channel.apply(rho)
            idem = max(idem, trace_distance(channel.apply(once), once))
            trace_dev = max(trace_dev, abs(float(np.trace(once.matrix).real) - 1.0))
        mixed = DensityOperator.maximally_mixed(2 ** cfg.n)
        fixed = trace_distance(channel.apply(mixed), mixed)
        residuals[name] = {"idempotence": idem, "trace_deviation": trace_dev,
                           "mixed_state_fixed_point": fixed}
    payload = {"n": cfg.n, "states": cfg.trials, "residuals": residuals}
    verdicts = tuple(
        Verdict(f"{name}_{key}", value <= cfg.tolerance, value, cfg.tolerance)
        for name, entries in residuals.items()
        for key, value in entries.items()
    )
    return payload, verdicts


def _run_classical(cfg: RunConfig, rng: RandomSource):
    codebook = build_classical_codebook(cfg.n, singlet_first=cfg.singlet_first)
    errors = 0
    min_correct = 1.0
    for entry in codebook.entries:
        for _ in range(cfg.trials):
            g = haar_random_su2(rng)
            decoded = classical_round_trip(entry.message, codebook, g, rng)
            errors += int(decoded != entry.message)
            rotated = entry.codeword.evolve(collective_rotation(g, cfg.n))
            probs = block_outcome_probabilities(rotated, codebook.decomposition)
            block_index = codebook.decomposition.block_index(entry.j, entry.r)
            min_correct = min(min_correct, float(probs[block_index]))
    payload = {
        "protocol": "classical",
        "n": cfg.n,
        "messages": len(codebook.entries),
        "trials": cfg.trials,
        "errors": errors,
        "min_correct_probability": min_correct,
    }
    verdicts = (
        Verdict("zero_decoding_errors", errors == 0, float(errors), 0.0),
        Verdict("correct_block_probability_one", 1.0 - min_correct <= cfg.tolerance,
                1.0 - min_correct, cfg.tolerance),
    )
    return payload, verdicts


def _run_quantum(cfg: RunConfig, rng: RandomSource):
    codes = (
        ("dfs_4qubit", dfs_encoding_4qubit(), TwirlChannel.full_su2(4)),
        ("noiseless_subsystem_3qubit", noiseless_subsystem_plan(3), TwirlChannel.full_su2(3)),
        ("dephasing_2qubit", dephasing_sector_encoding(2), TwirlChannel.u1_dephasing(2)),
    )
    payload = {"protocol": "quantum", "trials": cfg.trials, "codes": {}}
    verdicts = []
    for name, encoding, channel in codes:
        fidelities = []
        for _ in range(cfg.trials):
            psi = random_state_vector(rng, encoding.logical_dim)
            decoded = decode_logical(channel.apply(encode_logical(psi, encoding)), encoding)
            fidelities.append(fidelity(decoded, psi.to_density()))
        worst = float(min(fidelities))
        payload["codes"][name] = {
            "n": encoding.n,
            "logical_dim": encoding.logical_dim,
            "min_fidelity": worst,
            "mean_fidelity": float(np.mean(fidelities)),
        }
        verdicts.append(Verdict(f"{name}_min_fidelity", 1.0 - worst <= cfg.tolerance,
                                1.0 - worst, cfg.tolerance))
    return payload, tuple(verdicts)


def _run_optics(cfg: RunConfig, rng: RandomSource):
    fiber = haar_random_su2(rng)
    runs = [run_optical_protocol(bit, fiber, cfg.trials, rng) for bit in (0, 1)]
    payload = {"protocol": "optics", "trials": cfg.trials,
               "runs": [r.to_json_dict() for r in runs]}
    verdicts = tuple(
        Verdict(f"bit{r.bit}_error_rate_zero", r.error_rate == 0.0, r.error_rate, 0.0)
        for r in runs
    )
    return payload, verdicts


def _run_bell(cfg: RunConfig, rng: RandomSource):
    values = logical_bell_chsh_trials(rng, cfg.trials)
    mean = float(values.mean())
    worst = float(np.abs(values - TSIRELSON).max())
    payload = {"protocol": "bell", "trials": cfg.trials, "chsh_value": mean,
               "max_trial_deviation": worst, "tsirelson": TSIRELSON}
    verdicts = (
        Verdict("chsh_at_tsirelson", abs(mean - TSIRELSON) <= cfg.tolerance,
                abs(mean - TSIRELSON), cfg.tolerance),
        Verdict("every_trial_at_tsirelson", worst <= cfg.tolerance, worst, cfg.tolerance),
        Verdict("violates_classical_bound", mean > 2.0, mean, 2.0),
    )
    return payload, verdicts


_HANDLERS = {
    "decompose": _run_decompose,
    "rates": _run_rates,
    "twirl-check": _run_twirl_check,
    "classical": _run_classical,
    "quantum": _run_quantum,
    "optics": _run_optics,
    "bell": _run_bell,
}


def run_command(cfg: RunConfig) -> Report:
    start = time.perf_counter()
    payload, verdicts = _HANDLERS[cfg.command](cfg, RandomSource(cfg.seed))
    duration = time.perf_counter() - start
    return Report(
        command=cfg.command,
        config=asdict(cfg),
        payload=payload,
        verdicts=verdicts,
        passed=all(v.passed for v in verdicts),
        duration_s=duration,
    )


def _csv_text(report: Report) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if report.command == "rates":
        writer.writerow(["n", "classical_rate", "quantum_rate", "dephasing_rate",
                         "asymptotic_gap"])
        for row in report.payload["rate_rows"]:
            writer.writerow([row["n"], repr(row["classical_rate"]),
                             repr(row["quantum_rate"]), repr(row["dephasing_rate"]),
                             repr(row["asymptotic_gap"])])
    else:
        writer.writerow(["key", "value"])
        flat = json.loads(json.dumps(report.to_dict(), sort_keys=True))
        for key, value in sorted(_flatten(flat).items()):
            writer.writerow([key, repr(value) if isinstance(value, float) else value])
    return buffer.getvalue()


def _flatten(tree, prefix=""):
    out = {}
    if isinstance(tree, dict):
        for key, value in tree.items():
            out.update(_flatten(value, f"{prefix}{key}."))
    elif isinstance(tree, list):
        for i, value in enumerate(tree):
            out.update(_flatten(value, f"{prefix}{i}."))
    else:
        out[prefix.rstrip(".")] = tree
    return out


def emit_report(report: Report, cfg: RunConfig) -> str:
    """Serialize and write the report; returns the emitted text."""
    if cfg.output_format == "csv":
        text = _csv_text(report)
    else:
        text = json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return text


def main(argv=None) -> int:
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:  # argparse already printed the usage message
        return int(exc.code or 0)
    try:
        report = run_command(cfg)
        emit_report(report, cfg)
    except Exception as exc:
        diagnostic = {"error": type(exc).__name__, "detail": str(exc)}
        sys.stderr.write(json.dumps(diagnostic, sort_keys=True) + "\n")
        return 1
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
