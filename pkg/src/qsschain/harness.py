"""Monte Carlo harness: seeded trial batches, exact companions, reports.

Every trial draws its randomness from an independent generator derived by
mixing the master seed with the trial index through numpy's SeedSequence
spawn mechanism. The derivation depends only on (seed, index), never on
scheduling, and the aggregates are integer counts, so a batch produces the
same report at any thread count.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import os
import time
from fractions import Fraction
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import adversary, protocol, qcore
from .config import ConfigError, ScenarioConfig, config_from_dict
from .qcore import Basis, BellLabel, PauliKey

# re-exported for harness users; the scenario type is defined in config
__all__ = [
    "ScenarioConfig",
    "ConfigError",
    "RunReport",
    "ReportWriteError",
    "trial_generator",
    "run_trials",
    "exact_detection",
    "write_report",
    "read_report",
    "write_csv",
    "read_csv",
]

_CI_Z = 1.96  # 95% two-sided normal quantile

REPORT_COLUMNS = (
    "config",
    "trials",
    "detection_rate",
    "ci_low",
    "ci_high",
    "secret_recovery_rate",
    "per_decoy_error_rate",
    "exact_detection",
)


class ReportWriteError(OSError):
    """A report could not be written; no partial file is left behind."""


@dataclass(frozen=True)
class RunReport:
    """Aggregated statistics of one scenario's trial batch.

    `wall_time_s` is measured, not derived from the seed; it lives only in
    memory and is not serialized, so written reports are bit-identical
    across reruns of the same scenario.
    """

    config: ScenarioConfig
    trials: int
    detection_rate: float
    ci_low: float
    ci_high: float
    secret_recovery_rate: Optional[float]
    per_decoy_error_rate: float
    exact_detection: Optional[float]
    wall_time_s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "trials": self.trials,
            "detection_rate": self.detection_rate,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "secret_recovery_rate": self.secret_recovery_rate,
            "per_decoy_error_rate": self.per_decoy_error_rate,
            "exact_detection": self.exact_detection,
        }

    @staticmethod
    def from_dict(data: dict) -> "RunReport":
        return RunReport(
            config=config_from_dict(data["config"]),
            trials=int(data["trials"]),
            detection_rate=float(data["detection_rate"]),
            ci_low=float(data["ci_low"]),
            ci_high=float(data["ci_high"]),
            secret_recovery_rate=(
                None
                if data["secret_recovery_rate"] is None
                else float(data["secret_recovery_rate"])
            ),
            per_decoy_error_rate=float(data["per_decoy_error_rate"]),
            exact_detection=(
                None if data["exact_detection"] is None else float(data["exact_detection"])
            ),
        )


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    """Independent, scheduling-invariant RNG stream for one trial."""
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(trial,))
    return np.random.Generator(np.random.PCG64(sequence))


def _binomial_ci(successes: int, trials: int) -> tuple[float, float, float]:
    p = successes / trials
    half = _CI_Z * np.sqrt(p * (1.0 - p) / trials)
    return p, max(0.0, float(p - half)), min(1.0, float(p + half))


def run_trials(config: ScenarioConfig, threads: int = 1) -> RunReport:
    """Run the configured number of seeded trials and aggregate the outcomes.

    Thread count affects wall time only: per-trial streams come from
    `trial_generator` and the aggregates are order-independent counts.
    """
    config.validate()
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    started = time.perf_counter()

    def one_trial(index: int) -> tuple[int, int, int, int, int, int, int]:
        rng = trial_generator(config.seed, index)
        transcript = protocol.run_distribution(config, rng)
        detected = int(transcript.detected)
        undetected_collusion = recovered = 0
        if config.attack == "collusion" and not transcript.detected:
            undetected_collusion = 1
            recovered = int(transcript.attacker_secret == transcript.extracted_secret)
        attacked_errors = attacked_decoys = all_errors = all_decoys = 0
        for check in transcript.decoy_checks:
            all_errors += check.error_count
            all_decoys += check.decoy_count
            if check.attacked:
                attacked_errors += check.error_count
                attacked_decoys += check.decoy_count
        return (
            detected,
            undetected_collusion,
            recovered,
            attacked_errors,
            attacked_decoys,
            all_errors,
            all_decoys,
        )

    if threads == 1:
        outcomes = [one_trial(i) for i in range(config.trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(one_trial, range(config.trials)))
    totals = [0] * 7
    for outcome in outcomes:
        for i, value in enumerate(outcome):
            totals[i] += value
    detected, undetected_collusion, recovered = totals[0], totals[1], totals[2]
    attacked_errors, attacked_decoys, all_errors, all_decoys = totals[3:]

    detection_rate, ci_low, ci_high = _binomial_ci(detected, config.trials)
    if attacked_decoys > 0:
        per_decoy = attacked_errors / attacked_decoys
    elif all_decoys > 0:
        per_decoy = all_errors / all_decoys
    else:
        per_decoy = 0.0
    recovery: Optional[float] = None
    if config.attack == "collusion" and undetected_collusion > 0:
        recovery = recovered / undetected_collusion
    exact: Optional[float]
    if config.attack == "none":
        exact = 0.0  # untouched noiseless channel: no check can fire
    else:
        exact = exact_detection(config.attack, config.d)
    return RunReport(
        config=config,
        trials=config.trials,
        detection_rate=detection_rate,
        ci_low=ci_low,
        ci_high=ci_high,
        secret_recovery_rate=recovery,
        per_decoy_error_rate=per_decoy,
        exact_detection=exact,
        wall_time_s=time.perf_counter() - started,
    )


def _intercept_resend_decoy_error() -> Fraction:
    """Exact per-decoy error rate under intercept-resend, by enumeration.

    Averages over the four equiprobable decoy states, the eavesdropper's
    two equiprobable bases and her Born-rule outcomes, then scores the
    receiver's mismatch probability in the preparation basis. Every state
    involved is a Z or X eigenstate, so each probability is a small dyadic
    rational; rationalizing strips the float rounding and keeps the closed
    form exact.
    """
    total = Fraction(0)
    weight = Fraction(1, 4) * Fraction(1, 2)  # decoy state x Eve's basis
    for prep_basis, prep_value in itertools.product((Basis.Z, Basis.X), (0, 1)):
        decoy = qcore.eigenstate(prep_basis, prep_value)
        for eve_basis in (Basis.Z, Basis.X):
            probs = qcore.measurement_probabilities(decoy, 0, eve_basis)
            for eve_outcome in (0, 1):
                if probs[eve_outcome] == 0.0:
                    continue
                resent = qcore.eigenstate(eve_basis, eve_outcome)
                p_match = qcore.measurement_probabilities(resent, 0, prep_basis)[prep_value]
                p_eve = Fraction(probs[eve_outcome]).limit_denominator(1 << 20)
                p_error = 1 - Fraction(p_match).limit_denominator(1 << 20)
                total += weight * p_eve * p_error
    return total


def _certify_collusion_exactness() -> None:
    """Exhaustive label-algebra check that the collusion leaves no trace.

    For every composite middle key and every boundary-key total (16 cases):
    the probe pair's Bell outcome is deterministic and recovers the
    composite exactly, and the dealer pair's readout is deterministic at
    the label predicted by XOR for every prepared label. All decoys on all
    hops are genuine, so no check has anything to fire on.
    """
    all_keys = [PauliKey(u, v) for u in (0, 1) for v in (0, 1)]
    all_labels = [BellLabel(x, y) for x in (0, 1) for y in (0, 1)]
    for composite in all_keys:
        probe = qcore.apply_pauli(qcore.bell_state(BellLabel(1, 1)), 1, composite)
        outcome_probs = qcore.bell_probabilities(probe, 0, 1)
        certain = [lab for lab, p in outcome_probs.items() if p > 1.0 - 1e-12]
        if len(certain) != 1:
            raise AssertionError(f"probe outcome not deterministic for composite {composite}")
        if adversary.recover_composite(certain[0]) != composite:
            raise AssertionError(f"composite {composite} not recovered from {certain[0]}")
        for boundary in all_keys:
            total = composite ^ boundary
            for prepared in all_labels:
                shifted = qcore.apply_pauli(qcore.bell_state(prepared), 1, total)
                probs = qcore.bell_probabilities(shifted, 0, 1)
                expected = qcore.pauli_shift_label(prepared, total)
                if not probs[expected] > 1.0 - 1e-12:
                    raise AssertionError(
                        f"readout not deterministic for {prepared} under {total}"
                    )


def exact_detection(attack: str, d: int) -> float:
    """Exact detection probability for the given attack with d decoys per hop.

    intercept_resend: 1 - (1 - p)^d with p the enumerated per-decoy error
    rate. collusion: 0, certified by exhaustive label-algebra enumeration.
    """
    if d < 0:
        raise ValueError(f"decoy count must be >= 0, got {d}")
    if attack == "intercept_resend":
        per_decoy = _intercept_resend_decoy_error()
        return float(1 - (1 - per_decoy) ** d)
    if attack == "collusion":
        _certify_collusion_exactness()
        return 0.0
    raise ValueError(f"unsupported attack kind: {attack!r}")


def _report_row(report: RunReport) -> list:
    data = report.to_dict()
    row = []
    for column in REPORT_COLUMNS:
        value = data[column]
        if column == "config":
            row.append(json.dumps(value, sort_keys=True, separators=(",", ":")))
        elif value is None:
            row.append("")
        else:
            row.append(repr(value) if isinstance(value, float) else str(value))
    return row


def _row_to_report(row: dict) -> RunReport:
    def parse(column: str):
        cell = row[column]
        return None if cell == "" else float(cell)

    return RunReport(
        config=config_from_dict(json.loads(row["config"])),
        trials=int(row["trials"]),
        detection_rate=float(row["detection_rate"]),
        ci_low=float(row["ci_low"]),
        ci_high=float(row["ci_high"]),
        secret_recovery_rate=parse("secret_recovery_rate"),
        per_decoy_error_rate=float(row["per_decoy_error_rate"]),
        exact_detection=parse("exact_detection"),
    )


def _atomic_write(path: str | os.PathLike, text: str) -> None:
    target = Path(path)
    scratch = target.with_name(target.name + ".partial")
    try:
        with open(scratch, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(scratch, target)
    except OSError as err:
        try:
            scratch.unlink()
        except OSError:
            pass
        raise ReportWriteError(f"cannot write report to {target}: {err}") from err


def csv_text(reports: Sequence[RunReport]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for report in reports:
        writer.writerow(_report_row(report))
    return buffer.getvalue()


def write_report(report: RunReport, path: str | os.PathLike, format: str = "json") -> None:
    """Serialize one report to `path` as JSON or a one-row CSV.

    Writing is atomic: on failure no partial file is retained.
    """
    if format == "json":
        _atomic_write(path, json.dumps(report.to_dict(), indent=2) + "\n")
    elif format == "csv":
        _atomic_write(path, csv_text([report]))
    else:
        raise ValueError(f"unsupported report format: {format!r}")


def read_report(path: str | os.PathLike, format: str = "json") -> RunReport:
    """Read back a single report written by `write_report`."""
    if format == "json":
        with open(path, "r", encoding="utf-8") as handle:
            return RunReport.from_dict(json.load(handle))
    if format == "csv":
        reports = read_csv(path)
        if len(reports) != 1:
            raise ValueError(f"expected one report row in {path}, found {len(reports)}")
        return reports[0]
    raise ValueError(f"unsupported report format: {format!r}")


def write_csv(reports: Sequence[RunReport], path: str | os.PathLike) -> None:
    """Serialize a sequence of reports as CSV, one row per scenario."""
    _atomic_write(path, csv_text(reports))


def read_csv(path: str | os.PathLike) -> list[RunReport]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        return [_row_to_report(row) for row in reader]
