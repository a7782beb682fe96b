"""Circuit intermediate representation: building, inversion, control extension and accounting."""
import json
import logging
from collections import Counter
from typing import Dict, Iterable, List, Optional, Sequence

from pydantic import ValidationError

from shorpython import exceptions
from shorpython.helpers import dyadic
from shorpython.models import (
    NON_UNITARY_KINDS,
    PHASE_KINDS,
    BlockMetadata,
    Circuit,
    Gate,
    GateKind,
)

logger = logging.getLogger(__name__)

# Lane shared by measurements and classically conditioned gates in the depth model.
CLASSICAL_LANE = -1

_PROMOTIONS = {
    GateKind.X: GateKind.CNOT,
    GateKind.CNOT: GateKind.TOFFOLI,
    GateKind.PHASE: GateKind.CPHASE,
    GateKind.CPHASE: GateKind.CCPHASE,
    GateKind.SWAP: GateKind.CSWAP,
}

_X_BY_CONTROLS = (GateKind.X, GateKind.CNOT, GateKind.TOFFOLI)
_PHASE_BY_CONTROLS = (GateKind.PHASE, GateKind.CPHASE, GateKind.CCPHASE)
_SWAP_BY_CONTROLS = (GateKind.SWAP, GateKind.CSWAP)


class CircuitBuilder:
    """Append-only gate list that produces an immutable Circuit.

    Every emit method returns the builder so calls can be chained.
    """

    def __init__(
        self,
        num_qubits: int,
        num_clbits: int = 0,
        metadata: Optional[BlockMetadata] = None,
    ):
        self.num_qubits = num_qubits
        self.num_clbits = num_clbits
        self.metadata = metadata
        self.gates: List[Gate] = []

    def __len__(self):
        return len(self.gates)

    def _add(self, kind: GateKind, targets, controls=(), **fields) -> "CircuitBuilder":
        try:
            gate = Gate(
                kind=kind, targets=tuple(targets), controls=tuple(controls), **fields
            )
        except ValidationError as e:
            raise exceptions.CircuitError(str(e), "Invalid gate")
        self.gates.append(gate)
        return self

    @staticmethod
    def _kind_for(table, controls, name):
        if len(controls) >= len(table):
            raise exceptions.CircuitError(
                "%s supports at most %d control(s), got %d"
                % (name, len(table) - 1, len(controls)),
                "Control overflow",
            )
        return table[len(controls)]

    def x(self, target: int, controls: Sequence[int] = ()) -> "CircuitBuilder":
        return self._add(self._kind_for(_X_BY_CONTROLS, controls, "X"), (target,), controls)

    def h(self, target: int) -> "CircuitBuilder":
        return self._add(GateKind.H, (target,))

    def phase(
        self, target: int, num: int, pow2: int, controls: Sequence[int] = ()
    ) -> "CircuitBuilder":
        """Phase of 2*pi*num/2**pow2 on the |1> component of ``target``."""
        kind = self._kind_for(_PHASE_BY_CONTROLS, controls, "Phase")
        return self._add(kind, (target,), controls, angle_num=num, angle_den_pow2=pow2)

    def swap(self, first: int, second: int, controls: Sequence[int] = ()) -> "CircuitBuilder":
        kind = self._kind_for(_SWAP_BY_CONTROLS, controls, "Swap")
        return self._add(kind, (first, second), controls)

    def measure(self, target: int, clbit: int) -> "CircuitBuilder":
        return self._add(GateKind.MEASURE, (target,), clbit=clbit)

    def classical_x(self, target: int, condition: int) -> "CircuitBuilder":
        return self._add(GateKind.CLASSICAL_X, (target,), condition=condition)

    def classical_phase(
        self, target: int, num: int, pow2: int, condition: int
    ) -> "CircuitBuilder":
        return self._add(
            GateKind.CLASSICAL_PHASE,
            (target,),
            angle_num=num,
            angle_den_pow2=pow2,
            condition=condition,
        )

    def extend(self, gates: Iterable[Gate]) -> "CircuitBuilder":
        self.gates.extend(gates)
        return self

    def build(self) -> Circuit:
        try:
            return Circuit(
                num_qubits=self.num_qubits,
                num_clbits=self.num_clbits,
                gates=tuple(self.gates),
                metadata=self.metadata,
            )
        except ValidationError as e:
            raise exceptions.CircuitError(str(e), "Invalid circuit")


def _first_non_unitary(c: Circuit) -> Optional[int]:
    for position, gate in enumerate(c.gates):
        if gate.kind in NON_UNITARY_KINDS:
            return position
    return None


def _require_unitary(c: Circuit, action: str):
    position = _first_non_unitary(c)
    if position is not None:
        raise exceptions.CircuitError(
            "Cannot %s a non-unitary circuit: gate %d is %s"
            % (action, position, c.gates[position].kind.value),
            "Non-unitary circuit",
        )


def invert_gate(gate: Gate) -> Gate:
    """Returns the unitary inverse of a single gate."""
    if not gate.is_unitary:
        raise exceptions.CircuitError(
            "%s has no unitary inverse" % gate.kind.value, "Non-unitary gate"
        )
    if gate.kind in PHASE_KINDS:
        num, pow2 = dyadic.negate(gate.angle_num, gate.angle_den_pow2)
        return gate.copy(update={"angle_num": num, "angle_den_pow2": pow2})
    return gate


def invert_circuit(c: Circuit) -> Circuit:
    """Gate-wise inverse in reverse order, with the metadata header flagged ``inverse``.

    Raises:
        :exceptions.CircuitError: The circuit measures or applies classically conditioned gates.
    """
    _require_unitary(c, "invert")
    metadata = c.metadata
    if metadata is not None:
        metadata = metadata.copy(update={"inverse": not metadata.inverse})
    return Circuit(
        num_qubits=c.num_qubits,
        num_clbits=c.num_clbits,
        gates=tuple(invert_gate(gate) for gate in reversed(c.gates)),
        metadata=metadata,
    )


def add_controls(c: Circuit, ctrls: Sequence[int]) -> Circuit:
    """Adds the quantum controls ``ctrls`` to every gate of ``c``.

    Phase becomes CPhase then CCPhase, X becomes CNOT then Toffoli and Swap becomes CSwap.
    A gate that would need more than two controls is rejected; callers restructure instead.
    """
    ctrls = tuple(ctrls)
    if not ctrls:
        return c
    _require_unitary(c, "control")
    if len(set(ctrls)) != len(ctrls):
        raise exceptions.CircuitError("Duplicate control qubits %s" % list(ctrls))
    if min(ctrls) < 0 or max(ctrls) >= c.num_qubits:
        raise exceptions.CircuitError(
            "Control qubits %s outside 0..%d" % (list(ctrls), c.num_qubits - 1)
        )

    control_set = set(ctrls)
    gates = []
    for position, gate in enumerate(c.gates):
        if control_set.intersection(gate.qubits):
            raise exceptions.CircuitError(
                "Gate %d (%s) already acts on a requested control qubit"
                % (position, gate.kind.value),
                "Control overlap",
            )
        kind = gate.kind
        for _ in ctrls:
            kind = _PROMOTIONS.get(kind)
            if kind is None:
                raise exceptions.CircuitError(
                    "Cannot add %d control(s) to gate %d (%s)"
                    % (len(ctrls), position, gate.kind.value),
                    "Control overflow",
                )
        gates.append(gate.copy(update={"kind": kind, "controls": gate.controls + ctrls}))
    return Circuit(
        num_qubits=c.num_qubits,
        num_clbits=c.num_clbits,
        gates=tuple(gates),
        metadata=c.metadata,
    )


def relabel_circuit(
    c: Circuit, mapping: Sequence[int], num_qubits: Optional[int] = None
) -> Circuit:
    """Moves qubit i of ``c`` to ``mapping[i]`` inside a register of ``num_qubits`` qubits."""
    mapping = tuple(mapping)
    if len(mapping) != c.num_qubits:
        raise exceptions.CircuitError(
            "Mapping covers %d qubits, circuit has %d" % (len(mapping), c.num_qubits)
        )
    if len(set(mapping)) != len(mapping):
        raise exceptions.CircuitError("Qubit mapping must be injective")
    gates = tuple(
        gate.copy(
            update={
                "targets": tuple(mapping[q] for q in gate.targets),
                "controls": tuple(mapping[q] for q in gate.controls),
            }
        )
        for gate in c.gates
    )
    try:
        return Circuit(
            num_qubits=num_qubits or max(mapping) + 1,
            num_clbits=c.num_clbits,
            gates=gates,
            metadata=c.metadata,
        )
    except ValidationError as e:
        raise exceptions.CircuitError(str(e), "Invalid circuit")


def compose_circuits(*circuits: Circuit) -> Circuit:
    """Runs the circuits one after the other; all must share the same width."""
    if not circuits:
        raise exceptions.CircuitError("Nothing to compose")
    first = circuits[0]
    for other in circuits[1:]:
        if (other.num_qubits, other.num_clbits) != (first.num_qubits, first.num_clbits):
            raise exceptions.CircuitError(
                "Cannot compose a %d/%d circuit with a %d/%d circuit"
                % (first.num_qubits, first.num_clbits, other.num_qubits, other.num_clbits)
            )
    return Circuit(
        num_qubits=first.num_qubits,
        num_clbits=first.num_clbits,
        gates=tuple(gate for c in circuits for gate in c.gates),
    )


def circuit_depth(c: Circuit) -> int:
    """Number of layers under greedy as-soon-as-possible scheduling.

    A gate occupies one layer on each of its targets and controls. Measurements and
    classically conditioned gates additionally serialize on a single classical lane.
    """
    frontier: Dict[int, int] = {}
    depth = 0
    for gate in c.gates:
        lanes = gate.qubits
        if gate.kind in NON_UNITARY_KINDS:
            lanes = lanes + (CLASSICAL_LANE,)
        layer = 1 + max(frontier.get(lane, 0) for lane in lanes)
        for lane in lanes:
            frontier[lane] = layer
        if layer > depth:
            depth = layer
    return depth


def count_gates(c: Circuit) -> Dict[GateKind, int]:
    """Exact per-kind totals, every kind present (zero when unused)."""
    counts = Counter(gate.kind for gate in c.gates)
    return {kind: counts.get(kind, 0) for kind in GateKind}


def circuit_to_json(c: Circuit, indent: Optional[int] = None) -> str:
    return c.json(indent=indent)


def circuit_from_json(text: str) -> Circuit:
    """Parses a circuit document written by :func:`circuit_to_json`.

    Raises:
        :exceptions.CircuitError: The document is not valid JSON or not a valid circuit.
    """
    try:
        return Circuit.build_circuit(json.loads(text))
    except (ValueError, TypeError) as e:
        raise exceptions.CircuitError(str(e), "Invalid circuit document")
