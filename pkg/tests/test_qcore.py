"""State-engine tests: frozen oracle values plus exhaustive algebra tables.

Derived expectations are cross-checked in-test against explicit kron-matrix
oracles that do not share code with the engine under test.
"""

import itertools
import math

import numpy as np
import pytest

from qsschain import qcore
from qsschain.qcore import Basis, BellLabel, PauliKey, PureState

SQ2 = 1 / math.sqrt(2)

ALL_LABELS = [BellLabel(x, y) for x in (0, 1) for y in (0, 1)]
ALL_KEYS = [PauliKey(u, v) for u in (0, 1) for v in (0, 1)]

# independent oracle pieces: explicit matrices, qubit 0 = most significant bit
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


def oracle_pauli(key):
    mat = np.eye(2, dtype=complex)
    if key.v:
        mat = Z @ mat
    if key.u:
        mat = X @ mat
    return mat


def oracle_on_second(key):
    return np.kron(I2, oracle_pauli(key))


class TestBellStates:
    """The four Bell states have the frozen amplitude vectors."""

    def test_frozen_amplitudes(self):
        expected = {
            (0, 0): [SQ2, 0, 0, SQ2],
            (0, 1): [SQ2, 0, 0, -SQ2],
            (1, 0): [0, SQ2, SQ2, 0],
            (1, 1): [0, SQ2, -SQ2, 0],
        }
        for label, amps in expected.items():
            state = qcore.bell_state(BellLabel(*label))
            np.testing.assert_allclose(state.amplitudes, amps, atol=1e-12)

    def test_normalized(self):
        for label in ALL_LABELS:
            amps = qcore.bell_state(label).amplitudes
            assert np.vdot(amps, amps).real == pytest.approx(1.0, abs=1e-9)

    def test_invalid_label_rejected(self):
        with pytest.raises(ValueError):
            qcore.bell_state(BellLabel(2, 0))


class TestPureState:
    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError):
            PureState(1, np.array([1.0, 1.0]))

    def test_wrong_length_rejected(self):
        with pytest.raises(ValueError):
            PureState(2, np.array([1.0, 0.0]))


class TestPauliEncoding:
    """U_{u,v} = X^u Z^v with Z applied first."""

    def test_matrix_table(self):
        np.testing.assert_allclose(qcore.pauli_matrix(PauliKey(0, 0)), I2)
        np.testing.assert_allclose(qcore.pauli_matrix(PauliKey(0, 1)), Z)
        np.testing.assert_allclose(qcore.pauli_matrix(PauliKey(1, 0)), X)
        np.testing.assert_allclose(qcore.pauli_matrix(PauliKey(1, 1)), X @ Z)

    def test_identity_key_leaves_state(self):
        state = qcore.bell_state(BellLabel(1, 0))
        out = qcore.apply_pauli(state, 1, PauliKey(0, 0))
        np.testing.assert_allclose(out.amplitudes, state.amplitudes)

    def test_phase_flip_on_plus(self):
        plus = qcore.eigenstate(Basis.X, 0)
        minus = qcore.apply_pauli(plus, 0, PauliKey(0, 1))
        np.testing.assert_allclose(minus.amplitudes, qcore.eigenstate(Basis.X, 1).amplitudes)

    def test_key_11_on_traveling_qubit_of_psi00(self):
        """Frozen case: (1,1) on the second qubit maps Psi_00 to Psi_11."""
        out = qcore.apply_pauli(qcore.bell_state(BellLabel(0, 0)), 1, PauliKey(1, 1))
        assert qcore.equal_up_to_phase(out, qcore.bell_state(BellLabel(1, 1)))
        oracle = oracle_on_second(PauliKey(1, 1)) @ qcore.bell_state(BellLabel(0, 0)).amplitudes
        assert abs(np.vdot(oracle, out.amplitudes)) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("label", ALL_LABELS)
    @pytest.mark.parametrize("key", ALL_KEYS)
    def test_agrees_with_kron_oracle(self, label, key):
        out = qcore.apply_pauli(qcore.bell_state(label), 1, key)
        oracle = oracle_on_second(key) @ qcore.bell_state(label).amplitudes
        np.testing.assert_allclose(out.amplitudes, oracle, atol=1e-12)

    def test_norm_preserved_on_random_states(self):
        rng = np.random.default_rng(2024)
        for _ in range(50):
            raw = rng.normal(size=4) + 1j * rng.normal(size=4)
            state = PureState(2, raw / np.linalg.norm(raw))
            key = PauliKey(int(rng.integers(2)), int(rng.integers(2)))
            out = qcore.apply_pauli(state, int(rng.integers(2)), key)
            norm = np.vdot(out.amplitudes, out.amplitudes).real
            assert norm == pytest.approx(1.0, abs=1e-9)

    def test_qubit_out_of_range(self):
        with pytest.raises(ValueError):
            qcore.apply_pauli(qcore.bell_state(BellLabel(0, 0)), 2, PauliKey(1, 0))

    def test_invalid_key_bits(self):
        with pytest.raises(ValueError):
            qcore.apply_pauli(qcore.bell_state(BellLabel(0, 0)), 1, PauliKey(2, 0))


class TestLabelShift:
    """pauli_shift_label is the XOR rule, certified against the state engine."""

    def test_frozen_examples(self):
        assert qcore.pauli_shift_label(BellLabel(0, 0), PauliKey(1, 0)) == BellLabel(1, 0)
        assert qcore.pauli_shift_label(BellLabel(1, 0), PauliKey(1, 1)) == BellLabel(0, 1)

    @pytest.mark.parametrize("label", ALL_LABELS)
    @pytest.mark.parametrize("key", ALL_KEYS)
    def test_all_16_cases_match_state_vectors(self, label, key):
        shifted_state = qcore.apply_pauli(qcore.bell_state(label), 1, key)
        predicted = qcore.pauli_shift_label(label, key)
        assert qcore.equal_up_to_phase(shifted_state, qcore.bell_state(predicted), tol=1e-9)

    @pytest.mark.parametrize("key1", ALL_KEYS)
    @pytest.mark.parametrize("key2", ALL_KEYS)
    def test_composition_law(self, key1, key2):
        """Two encodings compose to the XOR key on every Bell input, up to phase."""
        combined = key1 ^ key2
        for label in ALL_LABELS:
            sequential = qcore.apply_pauli(
                qcore.apply_pauli(qcore.bell_state(label), 1, key1), 1, key2
            )
            direct = qcore.apply_pauli(qcore.bell_state(label), 1, combined)
            assert qcore.equal_up_to_phase(sequential, direct, tol=1e-9)
            assert qcore.pauli_shift_label(qcore.pauli_shift_label(label, key1), key2) == (
                qcore.pauli_shift_label(label, combined)
            )


class TestMeasurement:
    def test_z_eigenstate_is_certain(self):
        state = qcore.eigenstate(Basis.Z, 0)
        for seed in range(10):
            outcome, post = qcore.measure_in_basis(state, 0, Basis.Z, np.random.default_rng(seed))
            assert outcome == 0
            np.testing.assert_allclose(post.amplitudes, state.amplitudes)

    def test_plus_in_z_is_unbiased(self):
        state = qcore.eigenstate(Basis.X, 0)
        probs = qcore.measurement_probabilities(state, 0, Basis.Z)
        assert probs[0] == pytest.approx(0.5, abs=1e-12)
        counts = 0
        trials = 4000
        rng = np.random.default_rng(7)
        for _ in range(trials):
            outcome, _ = qcore.measure_in_basis(state, 0, Basis.Z, rng)
            counts += outcome
        se = math.sqrt(0.25 / trials)
        assert abs(counts / trials - 0.5) < 3 * se

    def test_bell_pair_collapse_is_correlated(self):
        """Measuring the first qubit of Psi_00 in Z leaves |00> or |11>."""
        seen = set()
        for seed in range(20):
            rng = np.random.default_rng(seed)
            outcome, post = qcore.measure_in_basis(
                qcore.bell_state(BellLabel(0, 0)), 0, Basis.Z, rng
            )
            seen.add(outcome)
            expected = np.zeros(4, dtype=complex)
            expected[outcome * 3] = 1.0  # |00> at index 0, |11> at index 3
            np.testing.assert_allclose(post.amplitudes, expected, atol=1e-12)
        assert seen == {0, 1}

    @pytest.mark.parametrize("basis", [Basis.Z, Basis.X])
    @pytest.mark.parametrize("label", ALL_LABELS)
    @pytest.mark.parametrize("qubit", [0, 1])
    def test_probabilities_sum_to_one(self, basis, label, qubit):
        probs = qcore.measurement_probabilities(qcore.bell_state(label), qubit, basis)
        assert sum(probs) == pytest.approx(1.0, abs=1e-9)

    def test_repeated_measurement_is_stable(self):
        rng = np.random.default_rng(3)
        state = qcore.bell_state(BellLabel(1, 0))
        outcome, post = qcore.measure_in_basis(state, 1, Basis.X, rng)
        again, post2 = qcore.measure_in_basis(post, 1, Basis.X, rng)
        assert again == outcome
        np.testing.assert_allclose(post2.amplitudes, post.amplitudes, atol=1e-12)

    def test_collapse_preserves_norm(self):
        rng = np.random.default_rng(11)
        for label in ALL_LABELS:
            _, post = qcore.measure_in_basis(qcore.bell_state(label), 0, Basis.X, rng)
            norm = np.vdot(post.amplitudes, post.amplitudes).real
            assert norm == pytest.approx(1.0, abs=1e-9)


class TestBellMeasure:
    @pytest.mark.parametrize("label", ALL_LABELS)
    def test_eigenstate_is_deterministic(self, label):
        probs = qcore.bell_probabilities(qcore.bell_state(label), 0, 1)
        assert probs[label] == pytest.approx(1.0, abs=1e-12)
        for seed in range(5):
            outcome, post = qcore.bell_measure(
                qcore.bell_state(label), 0, 1, np.random.default_rng(seed)
            )
            assert outcome == label
            assert qcore.equal_up_to_phase(post, qcore.bell_state(label))

    def test_product_00_frozen_probabilities(self):
        """|00> overlaps only the two parity-0 Bell states, each with 1/2."""
        probs = qcore.bell_probabilities(qcore.basis_state(2, 0), 0, 1)
        assert probs[BellLabel(0, 0)] == pytest.approx(0.5, abs=1e-12)
        assert probs[BellLabel(0, 1)] == pytest.approx(0.5, abs=1e-12)
        assert probs[BellLabel(1, 0)] == pytest.approx(0.0, abs=1e-12)
        assert probs[BellLabel(1, 1)] == pytest.approx(0.0, abs=1e-12)
        # kron oracle: amplitudes of |00> against explicit Bell vectors
        v00 = np.array([1, 0, 0, 0], dtype=complex)
        for label in ALL_LABELS:
            overlap = abs(np.vdot(qcore.bell_state(label).amplitudes, v00)) ** 2
            assert probs[label] == pytest.approx(overlap, abs=1e-12)

    def test_product_00_sampling(self):
        rng = np.random.default_rng(5)
        outcomes = [qcore.bell_measure(qcore.basis_state(2, 0), 0, 1, rng)[0] for _ in range(2000)]
        assert set(outcomes) == {BellLabel(0, 0), BellLabel(0, 1)}
        frac = sum(1 for o in outcomes if o == BellLabel(0, 0)) / len(outcomes)
        assert abs(frac - 0.5) < 3 * math.sqrt(0.25 / 2000)

    def test_post_state_is_the_bell_state(self):
        rng = np.random.default_rng(9)
        outcome, post = qcore.bell_measure(qcore.basis_state(2, 3), 0, 1, rng)
        assert qcore.equal_up_to_phase(post, qcore.bell_state(outcome))

    def test_distinct_qubits_required(self):
        with pytest.raises(ValueError):
            qcore.bell_measure(qcore.bell_state(BellLabel(0, 0)), 1, 1, np.random.default_rng(0))


class TestEqualUpToPhase:
    def test_global_phase_ignored(self):
        state = qcore.bell_state(BellLabel(0, 1))
        flipped = PureState(2, -state.amplitudes)
        rotated = PureState(2, np.exp(1j * 0.7) * state.amplitudes)
        assert qcore.equal_up_to_phase(state, flipped)
        assert qcore.equal_up_to_phase(state, rotated)

    def test_orthogonal_states_differ(self):
        assert not qcore.equal_up_to_phase(
            qcore.bell_state(BellLabel(0, 0)), qcore.bell_state(BellLabel(1, 1))
        )

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            qcore.equal_up_to_phase(qcore.eigenstate(Basis.Z, 0), qcore.bell_state(BellLabel(0, 0)))
