import pytest
from pydantic import ValidationError

from shorpython import exceptions
from shorpython.core import (
    CircuitBuilder,
    add_controls,
    circuit_depth,
    circuit_from_json,
    circuit_to_json,
    compose_circuits,
    count_gates,
    invert_circuit,
    invert_gate,
    relabel_circuit,
)
from shorpython.models import BlockMetadata, Circuit, Gate, GateKind


def _bell() -> Circuit:
    return CircuitBuilder(2).h(0).x(1, controls=(0,)).build()


class TestGates:
    @pytest.mark.circuits
    def test_shape_is_validated(self):
        with pytest.raises(ValidationError):
            Gate(kind=GateKind.CNOT, targets=(0,))
        with pytest.raises(ValidationError):
            Gate(kind=GateKind.X, targets=(0,), angle_num=1, angle_den_pow2=1)
        with pytest.raises(ValidationError):
            Gate(kind=GateKind.MEASURE, targets=(0,))
        with pytest.raises(ValidationError):
            Gate(kind=GateKind.CLASSICAL_X, targets=(0,))

    @pytest.mark.circuits
    def test_angles_are_canonical(self):
        builder = CircuitBuilder(1).phase(0, 5, 2).phase(0, -1, 1).phase(0, 4, 2)
        angles = [(g.angle_num, g.angle_den_pow2) for g in builder.gates]

        assert angles == [(1, 2), (1, 1), (0, 0)]

    @pytest.mark.circuits
    def test_builder_promotes_by_control_count(self):
        gates = CircuitBuilder(3).x(0).x(0, (1,)).x(0, (1, 2)).gates

        assert [g.kind for g in gates] == [GateKind.X, GateKind.CNOT, GateKind.TOFFOLI]

        with pytest.raises(exceptions.CircuitError):
            CircuitBuilder(4).x(0, (1, 2, 3))
        with pytest.raises(exceptions.CircuitError):
            CircuitBuilder(2).x(0, (0,))

    @pytest.mark.circuits
    def test_circuit_range_check(self):
        with pytest.raises(exceptions.CircuitError):
            CircuitBuilder(1).x(1).build()
        with pytest.raises(exceptions.CircuitError):
            CircuitBuilder(1, 1).measure(0, 1).build()


class TestInversion:
    @pytest.mark.circuits
    def test_invert_gate(self):
        phase = CircuitBuilder(1).phase(0, 1, 2).gates[0]
        hadamard = CircuitBuilder(1).h(0).gates[0]

        inverse = invert_gate(phase)
        assert (inverse.angle_num, inverse.angle_den_pow2) == (3, 2)
        assert invert_gate(hadamard) == hadamard

    @pytest.mark.circuits
    def test_invert_circuit_reverses(self):
        c = CircuitBuilder(2).h(0).phase(1, 1, 3, controls=(0,)).build()
        inverse = invert_circuit(c)

        assert [g.kind for g in inverse.gates] == [GateKind.CPHASE, GateKind.H]
        assert inverse.gates[0].angle_num == 7
        assert invert_circuit(inverse) == c

    @pytest.mark.circuits
    def test_invert_flags_metadata(self):
        c = CircuitBuilder(1, metadata=BlockMetadata(block="demo", n=1)).h(0).build()
        inverse = invert_circuit(c)

        assert inverse.metadata.inverse
        assert inverse.metadata.block == "demo"
        assert not invert_circuit(inverse).metadata.inverse
        assert invert_circuit(_bell()).metadata is None

    @pytest.mark.circuits
    def test_invert_rejects_measurement(self):
        c = CircuitBuilder(1, 1).h(0).measure(0, 0).build()

        with pytest.raises(exceptions.CircuitError) as e:
            invert_circuit(c)
        assert "gate 1" in str(e.value)


class TestControls:
    @pytest.mark.circuits
    def test_add_controls_promotes(self):
        c = CircuitBuilder(4).x(0).phase(0, 1, 2).swap(0, 1).build()

        one = add_controls(c, [2])
        assert [g.kind for g in one.gates] == [GateKind.CNOT, GateKind.CPHASE, GateKind.CSWAP]
        assert one.gates[0].controls == (2,)

        two = add_controls(c.copy(update={"gates": c.gates[:2]}), [2, 3])
        assert [g.kind for g in two.gates] == [GateKind.TOFFOLI, GateKind.CCPHASE]

    @pytest.mark.circuits
    def test_add_controls_errors(self):
        c = CircuitBuilder(3).x(0, (1,)).build()

        assert add_controls(c, []) is c
        with pytest.raises(exceptions.CircuitError):
            add_controls(c, [2, 2])
        with pytest.raises(exceptions.CircuitError):
            add_controls(c, [1])
        with pytest.raises(exceptions.CircuitError):
            add_controls(c, [3])
        with pytest.raises(exceptions.CircuitError):
            add_controls(CircuitBuilder(4).x(0, (1,)).build(), [2, 3])


class TestComposition:
    @pytest.mark.circuits
    def test_relabel_and_compose(self):
        wide = relabel_circuit(_bell(), [3, 1], 4)

        assert wide.num_qubits == 4
        assert wide.gates[0].targets == (3,)
        assert wide.gates[1].targets == (1,) and wide.gates[1].controls == (3,)

        both = compose_circuits(wide, wide)
        assert len(both) == 4

        with pytest.raises(exceptions.CircuitError):
            compose_circuits(wide, _bell())
        with pytest.raises(exceptions.CircuitError):
            relabel_circuit(_bell(), [0, 0])


class TestAccounting:
    @pytest.mark.circuits
    def test_depth(self):
        assert circuit_depth(CircuitBuilder(1).build()) == 0
        assert circuit_depth(CircuitBuilder(2).x(0).x(1).build()) == 1
        assert circuit_depth(CircuitBuilder(1).x(0).phase(0, 1, 2).build()) == 2
        assert circuit_depth(_bell()) == 2
        assert circuit_depth(CircuitBuilder(3).h(0).h(1).h(2).build()) == 1

    @pytest.mark.circuits
    def test_classical_lane_serializes(self):
        c = CircuitBuilder(2, 2).measure(0, 0).measure(1, 1).classical_x(1, 0).build()

        assert circuit_depth(c) == 3

    @pytest.mark.circuits
    def test_count_gates_lists_every_kind(self):
        counts = count_gates(_bell())

        assert set(counts) == set(GateKind)
        assert counts[GateKind.H] == 1
        assert counts[GateKind.CNOT] == 1
        assert sum(counts.values()) == 2


class TestSerialization:
    @pytest.mark.circuits
    def test_json_round_trip(self):
        c = (
            CircuitBuilder(3, 1, metadata=BlockMetadata(block="demo", n=2))
            .h(2)
            .phase(0, 3, 3, controls=(1, 2))
            .measure(2, 0)
            .classical_phase(0, -1, 2, condition=0)
            .build()
        )
        restored = circuit_from_json(circuit_to_json(c, indent=2))

        assert restored == c
        assert restored.metadata.block == "demo"

    @pytest.mark.circuits
    def test_bad_documents(self):
        with pytest.raises(exceptions.CircuitError):
            circuit_from_json("not json")
        with pytest.raises(exceptions.CircuitError):
            circuit_from_json('{"num_qubits": 1, "gates": [{"kind": "X", "targets": [4]}]}')
