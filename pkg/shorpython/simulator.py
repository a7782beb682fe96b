"""Dense statevector execution with mid-circuit measurement and classical feedback."""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from shorpython import exceptions
from shorpython.models import Circuit, Gate, GateKind, QuantumState, RunResult

logger = logging.getLogger(__name__)

MAX_QUBITS = 28
MAX_UNITARY_QUBITS = 12
NORM_TOLERANCE = 1e-9
UNITARITY_TOLERANCE = 1e-8
MIN_PROBABILITY_MASS = 1e-12

_SQRT_HALF = 1 / math.sqrt(2)


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    """The generator shared by measurement sampling and base selection."""
    return np.random.default_rng(seed)


def init_basis_state(num_qubits: int, value: int) -> QuantumState:
    if num_qubits > MAX_QUBITS:
        raise exceptions.SimulatorError(
            "%d qubits exceed the %d qubit capacity" % (num_qubits, MAX_QUBITS),
            "Capacity exceeded",
        )
    if num_qubits < 1 or not 0 <= value < (1 << num_qubits):
        raise exceptions.SimulatorError(
            "Basis value %d outside a %d qubit register" % (value, num_qubits),
            "Invalid basis state",
        )
    amplitudes = np.zeros(1 << num_qubits, dtype=np.complex128)
    amplitudes[value] = 1.0
    return QuantumState(num_qubits=num_qubits, amplitudes=amplitudes)


def _tensor(amplitudes: np.ndarray, num_qubits: int) -> np.ndarray:
    # C order: axis 0 is the most significant qubit; trailing axes (batched columns) ride along
    return amplitudes.reshape((2,) * num_qubits + amplitudes.shape[1:])


def _index(num_qubits: int, fixed: Sequence[Tuple[int, int]]):
    index = [slice(None)] * num_qubits
    for qubit, bit in fixed:
        index[num_qubits - 1 - qubit] = bit
    return tuple(index)


def _apply_unitary(view: np.ndarray, num_qubits: int, gate: Gate, kind: GateKind):
    controls = [(qubit, 1) for qubit in gate.controls]
    target = gate.targets[0]

    if kind in (GateKind.X, GateKind.CNOT, GateKind.TOFFOLI):
        low = _index(num_qubits, controls + [(target, 0)])
        high = _index(num_qubits, controls + [(target, 1)])
        saved = view[low].copy()
        view[low] = view[high]
        view[high] = saved
    elif kind is GateKind.H:
        low = _index(num_qubits, [(target, 0)])
        high = _index(num_qubits, [(target, 1)])
        zero = view[low].copy()
        one = view[high].copy()
        view[low] = (zero + one) * _SQRT_HALF
        view[high] = (zero - one) * _SQRT_HALF
    elif kind in (GateKind.PHASE, GateKind.CPHASE, GateKind.CCPHASE):
        if gate.angle_num:
            view[_index(num_qubits, controls + [(target, 1)])] *= np.exp(1j * gate.angle)
    elif kind in (GateKind.SWAP, GateKind.CSWAP):
        other = gate.targets[1]
        first = _index(num_qubits, controls + [(target, 0), (other, 1)])
        second = _index(num_qubits, controls + [(target, 1), (other, 0)])
        saved = view[first].copy()
        view[first] = view[second]
        view[second] = saved
    else:
        raise exceptions.SimulatorError(
            "Cannot apply %s as a unitary" % kind.value, "Malformed gate"
        )


def measure_qubit(
    state: QuantumState, qubit: int, rng: np.random.Generator
) -> Tuple[int, QuantumState]:
    """Samples ``qubit`` with one uniform draw (outcome 1 iff draw < P(1)) and collapses.

    The state is projected and renormalized in place.
    """
    n = state.num_qubits
    view = _tensor(state.amplitudes, n)
    low = _index(n, [(qubit, 0)])
    high = _index(n, [(qubit, 1)])
    p0 = float(np.vdot(view[low], view[low]).real)
    p1 = float(np.vdot(view[high], view[high]).real)
    if p0 < MIN_PROBABILITY_MASS and p1 < MIN_PROBABILITY_MASS:
        raise exceptions.SimulatorError(
            "No probability mass on qubit %d (p0=%g, p1=%g)" % (qubit, p0, p1),
            "Numerical corruption",
        )
    draw = rng.random()
    bit = 1 if draw < p1 / (p0 + p1) else 0
    if bit:
        view[low] = 0
        view[high] /= math.sqrt(p1)
    else:
        view[high] = 0
        view[low] /= math.sqrt(p0)
    return bit, state


def apply_gate(
    state: QuantumState,
    gate: Gate,
    clbits: List[int],
    rng: Optional[np.random.Generator] = None,
) -> QuantumState:
    """Applies ``gate`` in place and returns the state.

    Measure writes its outcome into ``clbits``; conditioned gates read from it.
    """
    n = state.num_qubits
    if max(gate.qubits) >= n:
        raise exceptions.SimulatorError(
            "%s addresses qubit %d of a %d qubit state" % (gate.kind.value, max(gate.qubits), n),
            "Malformed gate",
        )
    kind = gate.kind
    if kind is GateKind.MEASURE:
        if rng is None:
            raise exceptions.SimulatorError("Measure needs a random generator", "Malformed gate")
        bit, state = measure_qubit(state, gate.targets[0], rng)
        clbits[gate.clbit] = bit
        return state
    if kind is GateKind.CLASSICAL_X:
        if clbits[gate.condition]:
            _apply_unitary(_tensor(state.amplitudes, n), n, gate, GateKind.X)
        return state
    if kind is GateKind.CLASSICAL_PHASE:
        if clbits[gate.condition]:
            _apply_unitary(_tensor(state.amplitudes, n), n, gate, GateKind.PHASE)
        return state
    _apply_unitary(_tensor(state.amplitudes, n), n, gate, kind)
    return state


def run_circuit(
    circuit: Circuit,
    initial: Optional[QuantumState] = None,
    rng: Optional[np.random.Generator] = None,
) -> RunResult:
    """Applies the gates of ``circuit`` in order to a copy of ``initial`` (|0...0> by default).

    Raises:
        :exceptions.SimulatorError: Width mismatch, capacity, or norm drift beyond 1e-9.
    """
    if initial is None:
        state = init_basis_state(circuit.num_qubits, 0)
    elif initial.num_qubits != circuit.num_qubits:
        raise exceptions.SimulatorError(
            "Circuit has %d qubits, initial state %d" % (circuit.num_qubits, initial.num_qubits),
            "Width mismatch",
        )
    else:
        state = QuantumState(num_qubits=initial.num_qubits, amplitudes=initial.amplitudes.copy())

    if rng is None:
        rng = make_rng()
    clbits = [0] * circuit.num_clbits
    draws = 0
    for gate in circuit.gates:
        state = apply_gate(state, gate, clbits, rng)
        if gate.kind is GateKind.MEASURE:
            draws += 1

    drift = abs(state.norm - 1.0)
    if drift > NORM_TOLERANCE:
        raise exceptions.SimulatorError(
            "Norm drifted by %g over %d gates" % (drift, len(circuit)), "Numerical corruption"
        )
    logger.debug(
        "ran %d gates on %d qubits, %d draws", len(circuit), circuit.num_qubits, draws
    )
    return RunResult(final_state=state, clbits=clbits, rng_draws=draws)


def circuit_columns(circuit: Circuit, inputs: Sequence[int]) -> np.ndarray:
    """Images of the basis states ``inputs``, one column each, computed together."""
    if not circuit.is_unitary:
        raise exceptions.SimulatorError(
            "Only unitary circuits can be applied column-wise", "Non-unitary circuit"
        )
    n = circuit.num_qubits
    if n > MAX_QUBITS:
        raise exceptions.SimulatorError(
            "%d qubits exceed the %d qubit capacity" % (n, MAX_QUBITS), "Capacity exceeded"
        )
    inputs = list(inputs)
    columns = np.zeros((1 << n, len(inputs)), dtype=np.complex128)
    columns[inputs, np.arange(len(inputs))] = 1.0
    view = _tensor(columns, n)
    for gate in circuit.gates:
        _apply_unitary(view, n, gate, gate.kind)
    return columns


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """2^m x 2^m matrix whose column k is the circuit applied to basis state k.

    Raises:
        :exceptions.SimulatorError: More than 12 qubits, a non-unitary circuit, or a result
            that deviates from unitarity by more than 1e-8.
    """
    n = circuit.num_qubits
    if n > MAX_UNITARY_QUBITS:
        raise exceptions.SimulatorError(
            "%d qubits exceed the %d qubit unitary cap" % (n, MAX_UNITARY_QUBITS),
            "Capacity exceeded",
        )
    dim = 1 << n
    matrix = circuit_columns(circuit, range(dim))

    error = np.max(np.abs(matrix.conj().T @ matrix - np.eye(dim)))
    if error > UNITARITY_TOLERANCE:
        raise exceptions.SimulatorError(
            "Matrix deviates from unitarity by %g" % error, "Numerical corruption"
        )
    return matrix


def basis_probabilities(state: QuantumState) -> np.ndarray:
    return state.probabilities()


def register_value(index: int, qubits: Sequence[int]) -> int:
    """Integer held by ``qubits`` (least significant first) in basis state ``index``."""
    return sum(((index >> qubit) & 1) << position for position, qubit in enumerate(qubits))


def dump_state_csv(state: QuantumState, path) -> None:
    """Writes (index, real, imag) rows for debugging."""
    amplitudes = state.amplitudes
    table = np.column_stack(
        [np.arange(amplitudes.size), amplitudes.real, amplitudes.imag]
    )
    np.savetxt(
        path,
        table,
        delimiter=",",
        header="index,real,imag",
        comments="",
        fmt=["%d", "%.17g", "%.17g"],
    )
