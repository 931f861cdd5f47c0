"""Exhaustive self-verification suites behind the `verify` CLI command.

Each suite re-derives an algebraic rule of the simulator from the state
vectors alone and counts disagreements, so a regression in either the
engine or the bookkeeping shows up as named failing cases.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import harness, protocol, qcore
from .config import ScenarioConfig
from .qcore import Basis, BellLabel, PauliKey

ALL_LABELS = tuple(BellLabel(x, y) for x in (0, 1) for y in (0, 1))
ALL_KEYS = tuple(PauliKey(u, v) for u in (0, 1) for v in (0, 1))


@dataclass
class CheckResult:
    name: str
    cases: int
    failures: list[str]

    @property
    def passed(self) -> bool:
        return not self.failures


def pauli_bell_label_table() -> CheckResult:
    """16 cases: every key on every Bell label, state vs label bookkeeping."""
    failures = []
    for label, key in itertools.product(ALL_LABELS, ALL_KEYS):
        shifted = qcore.apply_pauli(qcore.bell_state(label), 1, key)
        predicted = qcore.pauli_shift_label(label, key)
        if not qcore.equal_up_to_phase(shifted, qcore.bell_state(predicted)):
            failures.append(f"label {tuple(label)} key {tuple(key)}: not {tuple(predicted)}")
    return CheckResult("pauli/bell label table", 16, failures)


def composition_law_table() -> CheckResult:
    """64 cases: composing two keys equals the XOR key on every Bell input."""
    failures = []
    for key1, key2 in itertools.product(ALL_KEYS, ALL_KEYS):
        for label in ALL_LABELS:
            sequential = qcore.apply_pauli(
                qcore.apply_pauli(qcore.bell_state(label), 1, key1), 1, key2
            )
            direct = qcore.apply_pauli(qcore.bell_state(label), 1, key1 ^ key2)
            if not qcore.equal_up_to_phase(sequential, direct):
                failures.append(
                    f"keys {tuple(key1)},{tuple(key2)} on {tuple(label)}: "
                    "composition is not the XOR key"
                )
    return CheckResult("pauli composition law", 64, failures)


def _joint_parity_distribution(state: qcore.PureState, basis: Basis) -> dict[int, float]:
    # brute force over both-qubit outcomes with explicit product projectors
    dist = {0: 0.0, 1: 0.0}
    for a, b in itertools.product((0, 1), repeat=2):
        projector = np.kron(
            qcore.eigenstate(basis, a).amplitudes, qcore.eigenstate(basis, b).amplitudes
        )
        dist[a ^ b] += float(abs(np.vdot(projector, state.amplitudes)) ** 2)
    return dist


def parity_rule_table() -> CheckResult:
    """32 cases: deduced parity vs brute-force both-qubit statistics."""
    failures = []
    for label, total, basis in itertools.product(ALL_LABELS, ALL_KEYS, (Basis.Z, Basis.X)):
        state = qcore.apply_pauli(qcore.bell_state(label), 1, total)
        dist = _joint_parity_distribution(state, basis)
        rule = protocol.deduce_parity(label, total, basis)
        if not dist[rule] > 1.0 - 1e-12:
            failures.append(
                f"label {tuple(label)} total {tuple(total)} basis {basis.value}: "
                f"parity {rule} has probability {dist[rule]:.3f}"
            )
    return CheckResult("parity rule table", 32, failures)


def honest_correctness_sweep() -> CheckResult:
    """Seeded honest runs: no detection, secret equals the key XOR, labels agree."""
    failures = []
    cases = 0
    grid = list(itertools.product((2, 3, 4), (1, 5), ("original", "improved")))
    for index, (n, m, check) in enumerate(itertools.chain.from_iterable([grid] * 5)):
        cases += 1
        config = ScenarioConfig(n=n, m=m, d=2, check=check, trials=1, seed=90000 + index)
        rng = harness.trial_generator(config.seed, 0)
        transcript = protocol.run_distribution(config, rng)
        tag = f"n={n} m={m} check={check} seed={config.seed}"
        if transcript.detected:
            failures.append(f"{tag}: honest run flagged as detected")
            continue
        expected = []
        for position in transcript.payload_positions:
            total = PauliKey(0, 0)
            for participant in transcript.participant_keys:
                total = total ^ participant.keys[position - 1]
            expected.extend((total.u, total.v))
        if transcript.extracted_secret != expected:
            failures.append(f"{tag}: extracted secret is not the key XOR")
        if transcript.readout != transcript.predicted_readout:
            failures.append(f"{tag}: label fast path disagrees with state readout")
    return CheckResult("honest correctness sweep", cases, failures)


def run_all() -> list[CheckResult]:
    return [
        pauli_bell_label_table(),
        parity_rule_table(),
        composition_law_table(),
        honest_correctness_sweep(),
    ]
