import math

import numpy as np
import pytest

from shorpython import exceptions
from shorpython.blocks import build_cc_phi_add_mod, build_qft
from shorpython.core import CircuitBuilder, compose_circuits
from shorpython.models import QuantumState
from shorpython.simulator import (
    apply_gate,
    basis_probabilities,
    circuit_unitary,
    dump_state_csv,
    init_basis_state,
    make_rng,
    measure_qubit,
    register_value,
    run_circuit,
)


class TestStates:
    @pytest.mark.simulator
    def test_init_basis_state(self):
        state = init_basis_state(3, 5)

        assert state.amplitudes[5] == 1
        assert state.norm == pytest.approx(1.0)

    @pytest.mark.simulator
    def test_capacity(self):
        with pytest.raises(exceptions.SimulatorError):
            init_basis_state(29, 0)
        with pytest.raises(exceptions.SimulatorError):
            init_basis_state(2, 4)

    @pytest.mark.simulator
    def test_register_value(self):
        assert register_value(0b1010, [1, 3]) == 3
        assert register_value(0b1010, [0, 2]) == 0
        assert register_value(0b0110, [2, 1]) == 3


class TestUnitaryGates:
    @pytest.mark.simulator
    def test_bell_state(self):
        c = CircuitBuilder(2).h(0).x(1, controls=(0,)).build()
        result = run_circuit(c)

        np.testing.assert_allclose(
            basis_probabilities(result.final_state), [0.5, 0, 0, 0.5], atol=1e-12
        )
        assert result.rng_draws == 0

    @pytest.mark.simulator
    def test_phase_acts_on_one_component(self):
        c = CircuitBuilder(1).h(0).phase(0, 1, 2).build()
        amplitudes = run_circuit(c).final_state.amplitudes

        assert amplitudes[0] == pytest.approx(1 / math.sqrt(2))
        assert amplitudes[1] == pytest.approx(1j / math.sqrt(2))

    @pytest.mark.simulator
    def test_controlled_swap(self):
        c = CircuitBuilder(3).swap(0, 1, controls=(2,)).build()

        moved = run_circuit(c, init_basis_state(3, 0b101)).final_state
        kept = run_circuit(c, init_basis_state(3, 0b001)).final_state
        assert moved.amplitudes[0b110] == 1
        assert kept.amplitudes[0b001] == 1

    @pytest.mark.simulator
    def test_initial_state_is_not_modified(self):
        initial = init_basis_state(1, 0)
        run_circuit(CircuitBuilder(1).x(0).build(), initial)

        assert initial.amplitudes[0] == 1

    @pytest.mark.simulator
    def test_width_mismatch(self):
        with pytest.raises(exceptions.SimulatorError):
            run_circuit(CircuitBuilder(2).h(0).build(), init_basis_state(1, 0))


class TestMeasurement:
    @pytest.mark.simulator
    def test_seeded_runs_are_identical(self):
        c = CircuitBuilder(3, 3).h(0).h(1).h(2).measure(0, 0).measure(1, 1).measure(2, 2).build()
        first = run_circuit(c, rng=make_rng(42))
        second = run_circuit(c, rng=make_rng(42))

        assert first.clbits == second.clbits
        assert first.rng_draws == 3
        np.testing.assert_array_equal(first.final_state.amplitudes, second.final_state.amplitudes)

    @pytest.mark.simulator
    def test_collapse(self):
        state = run_circuit(CircuitBuilder(2).h(0).x(1, (0,)).build()).final_state
        bit, state = measure_qubit(state, 0, make_rng(7))
        probabilities = basis_probabilities(state)

        assert state.norm == pytest.approx(1.0)
        assert probabilities[0b11 if bit else 0b00] == pytest.approx(1.0)

    @pytest.mark.simulator
    def test_classical_reset(self):
        c = CircuitBuilder(1, 1).h(0).measure(0, 0).classical_x(0, condition=0).build()

        for seed in range(8):
            result = run_circuit(c, rng=make_rng(seed))
            assert basis_probabilities(result.final_state)[0] == pytest.approx(1.0)

    @pytest.mark.simulator
    def test_classical_phase_reads_the_bit(self):
        c = CircuitBuilder(2, 1).x(1).measure(1, 0).h(0).classical_phase(0, 1, 1, condition=0).build()
        result = run_circuit(c, rng=make_rng(0))

        assert result.clbits == [1]
        assert result.final_state.amplitudes[0b11] == pytest.approx(-1 / math.sqrt(2))

    @pytest.mark.simulator
    def test_measure_needs_rng(self):
        gate = CircuitBuilder(1, 1).measure(0, 0).gates[0]

        with pytest.raises(exceptions.SimulatorError):
            apply_gate(init_basis_state(1, 0), gate, [0])

    @pytest.mark.simulator
    def test_no_probability_mass(self):
        state = QuantumState(num_qubits=1, amplitudes=np.zeros(2, dtype=np.complex128))

        with pytest.raises(exceptions.SimulatorError):
            measure_qubit(state, 0, make_rng(0))


class TestUnitaries:
    @pytest.mark.simulator
    def test_qft_matches_dft(self):
        for m in range(1, 7):
            dim = 1 << m
            rows = [int(format(y, "0%db" % m)[::-1], 2) for y in range(dim)]
            expected = np.exp(2j * np.pi * np.outer(rows, np.arange(dim)) / dim) / math.sqrt(dim)

            np.testing.assert_allclose(circuit_unitary(build_qft(m, m)), expected, atol=1e-8)

    @pytest.mark.simulator
    def test_unitary_limits(self):
        with pytest.raises(exceptions.SimulatorError):
            circuit_unitary(CircuitBuilder(13).build())
        with pytest.raises(exceptions.SimulatorError):
            circuit_unitary(CircuitBuilder(1, 1).measure(0, 0).build())


class TestDump:
    @pytest.mark.simulator
    def test_dump_state_csv(self, tmp_path):
        state = run_circuit(CircuitBuilder(1).h(0).phase(0, 1, 2).build()).final_state
        path = tmp_path / "state.csv"
        dump_state_csv(state, path)

        lines = path.read_text().splitlines()
        table = np.loadtxt(path, delimiter=",", skiprows=1)
        assert lines[0] == "index,real,imag"
        assert table.shape == (2, 3)
        assert table[1, 2] == pytest.approx(1 / math.sqrt(2))


class TestLongRuns:
    @pytest.mark.simulator
    @pytest.mark.slow
    def test_norm_survives_long_circuit(self):
        hadamards = CircuitBuilder(7).h(0).h(2).h(4).h(6).build()
        rounds = [
            compose_circuits(build_cc_phi_add_mod(3, a, 7, kmax), hadamards)
            for a in range(1, 7)
            for kmax in (2, 4)
        ]
        one_pass = compose_circuits(*rounds)
        circuit = compose_circuits(*[one_pass] * math.ceil(100_000 / len(one_pass)))

        assert len(circuit) >= 100_000
        state = run_circuit(circuit).final_state
        assert abs(state.norm - 1) <= 1e-9
