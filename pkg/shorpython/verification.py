"""Exhaustive small-instance oracle suites run by ``shorpython verify``.

Every suite checks circuits against classical arithmetic through exact statevector
simulation and returns a :class:`SuiteResult` tallying individual checks.
"""
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from shorpython import exceptions
from shorpython.blocks import (
    build_cc_phi_add_mod,
    build_cmult_mod,
    build_controlled_swap_register,
    build_controlled_ua,
    build_inverse_qft,
    build_phi_add_const,
    build_qft,
    register_layout,
)
from shorpython.core import compose_circuits, invert_circuit, relabel_circuit
from shorpython.models import Circuit, SuiteResult
from shorpython.orderfind import ideal_phase_distribution, sample_order_finding
from shorpython.simulator import circuit_columns, circuit_unitary

logger = logging.getLogger(__name__)

FIDELITY_TOLERANCE = 1e-9
MATRIX_TOLERANCE = 1e-8

ADDER_WIDTHS = (2, 3, 4, 5)
MODADD_MODULI = (3, 5, 7, 9, 11, 13, 15)
CUA_MODULI = (7, 9, 11, 13, 15)
AQFT_WIDTHS = (4, 5, 6, 7, 8)
# the spectral distance at least halves per kmax step from here on, until kmax + 1 reaches m
AQFT_HALVING_FROM = 4
ORDER_CASES = ((15, 7, 16), (15, 4, 8), (15, 2, 8), (21, 2, 4))
ORDER_SEED = 2024


class _Tally:
    def __init__(self, name: str):
        self.name = name
        self.passed = 0
        self.failures: List[str] = []

    def check(self, ok: bool, message: str):
        if ok:
            self.passed += 1
        else:
            self.failures.append(message)

    def check_fidelity(self, columns: np.ndarray, column: int, expected: int, message: str):
        fidelity = abs(columns[expected, column]) ** 2
        self.check(fidelity >= 1 - FIDELITY_TOLERANCE, "%s: fidelity %.3g" % (message, fidelity))

    def result(self) -> SuiteResult:
        return SuiteResult(
            name=self.name,
            passed=self.passed,
            failed=len(self.failures),
            failures=self.failures,
        )


def _bit_reverse(value: int, width: int) -> int:
    return int(format(value, "0%db" % width)[::-1], 2)


def _embed(c: Circuit, num_qubits: int) -> Circuit:
    return relabel_circuit(c, range(c.num_qubits), num_qubits)


def check_inverses() -> SuiteResult:
    """Every block composed with its inverse is the identity."""
    tally = _Tally("inverse")
    circuits = [build_qft(m, kmax) for m in range(1, 6) for kmax in range(1, m + 1)]
    circuits += [
        build_phi_add_const(4, 5, num_controls=2),
        build_cc_phi_add_mod(3, 4, 7, 4),
        build_cc_phi_add_mod(3, 4, 7, 2),
        build_cmult_mod(3, 4, 7, 4),
        build_controlled_swap_register(3),
        build_controlled_ua(3, 2, 7, 4),
    ]
    for c in circuits:
        product = circuit_unitary(compose_circuits(c, invert_circuit(c)))
        error = np.max(np.abs(product - np.eye(product.shape[0])))
        tally.check(error <= MATRIX_TOLERANCE, "%s: |U^-1 U - I| = %.3g" % (c.metadata, error))
    return tally.result()


def check_qft() -> SuiteResult:
    """The exact QFT is the DFT with bit-reversed output order."""
    tally = _Tally("qft")
    for m in range(1, 7):
        dim = 1 << m
        reversed_rows = np.array([_bit_reverse(y, m) for y in range(dim)])
        phases = np.outer(reversed_rows, np.arange(dim)) / dim
        expected = np.exp(2j * np.pi * phases) / math.sqrt(dim)
        for label, actual, target in (
            ("qft", circuit_unitary(build_qft(m, m)), expected),
            ("inverse qft", circuit_unitary(build_inverse_qft(m, m)), expected.conj().T),
        ):
            error = np.max(np.abs(actual - target))
            tally.check(error <= MATRIX_TOLERANCE, "%s m=%d: deviation %.3g" % (label, m, error))
    return tally.result()


def aqft_distance(m: int, kmax: int) -> float:
    """Spectral norm of the difference between the kmax-truncated and the exact m-qubit QFT."""
    difference = circuit_unitary(build_qft(m, kmax)) - circuit_unitary(build_qft(m, m))
    return float(np.linalg.norm(difference, 2))


def check_aqft() -> SuiteResult:
    """Truncated QFT error stays within 2*pi*m/2^kmax and halves per kmax step past the start."""
    tally = _Tally("aqft")
    for m in AQFT_WIDTHS:
        distances = {kmax: aqft_distance(m, kmax) for kmax in range(1, m + 1)}
        tally.check(
            distances[m] <= MATRIX_TOLERANCE, "m=%d: exact distance %.3g" % (m, distances[m])
        )
        for kmax in range(1, m):
            bound = 2 * math.pi * m / (1 << kmax)
            tally.check(
                distances[kmax] <= bound,
                "m=%d kmax=%d: distance %.3g above %.3g" % (m, kmax, distances[kmax], bound),
            )
        for kmax in range(AQFT_HALVING_FROM, m - 1):
            tally.check(
                distances[kmax + 1] <= distances[kmax] / 2,
                "m=%d kmax=%d: %.3g -> %.3g does not halve"
                % (m, kmax, distances[kmax], distances[kmax + 1]),
            )
    return tally.result()


def check_adders() -> SuiteResult:
    """phi-ADD(a) between QFT and inverse QFT adds a modulo 2^m; its inverse subtracts."""
    tally = _Tally("adder")
    for m in ADDER_WIDTHS:
        dim = 1 << m
        qft, inverse_qft = build_qft(m, m), build_inverse_qft(m, m)
        for a in range(dim):
            adder = build_phi_add_const(m, a)
            add = circuit_columns(compose_circuits(qft, adder, inverse_qft), range(dim))
            subtract = circuit_columns(
                compose_circuits(qft, invert_circuit(adder), inverse_qft), range(dim)
            )
            for b in range(dim):
                tally.check_fidelity(add, b, (a + b) % dim, "m=%d %d+%d" % (m, a, b))
                difference = (b - a) % dim
                tally.check_fidelity(subtract, b, difference, "m=%d %d-%d" % (m, b, a))
                if a < dim // 2 and b < a:
                    tally.check(
                        difference == dim - (a - b) and difference >> (m - 1) == 1,
                        "m=%d %d-%d: top qubit not set" % (m, b, a),
                    )
    return tally.result()


def check_modular_adders() -> SuiteResult:
    """Doubly controlled phi-ADD(a)MOD(N) for every odd N <= 15 and all control settings."""
    tally = _Tally("modadd")
    for N in MODADD_MODULI:
        n = N.bit_length()
        width = n + 4
        qft = _embed(build_qft(n + 1, n + 1), width)
        inverse_qft = _embed(build_inverse_qft(n + 1, n + 1), width)
        settings = [(c1, c2) for c1 in (0, 1) for c2 in (0, 1)]
        inputs = [b | c1 << (n + 2) | c2 << (n + 3) for c1, c2 in settings for b in range(N)]
        for a in range(N):
            block = build_cc_phi_add_mod(n, a, N, n + 1)
            columns = circuit_columns(compose_circuits(qft, block, inverse_qft), inputs)
            for column, index in enumerate(inputs):
                b = index & ((1 << (n + 2)) - 1)
                enabled = index >> (n + 2) == 3
                value = (a + b) % N if enabled else b
                expected = value | (index >> (n + 2)) << (n + 2)
                tally.check_fidelity(
                    columns,
                    column,
                    expected,
                    "N=%d a=%d b=%d controls=%s" % (N, a, b, bin(index >> (n + 2))),
                )
    return tally.result()


def check_controlled_swaps() -> SuiteResult:
    tally = _Tally("swap")
    for n in range(1, 5):
        layout = register_layout(n)
        circuit = build_controlled_swap_register(n)
        inputs, expected = [], []
        for control in (0, 1):
            for x in range(1 << n):
                for b in range(1 << n):
                    inputs.append(x | b << n | control << layout.control)
                    low, high = (b, x) if control else (x, b)
                    expected.append(low | high << n | control << layout.control)
        columns = circuit_columns(circuit, inputs)
        for column, target in enumerate(expected):
            tally.check_fidelity(columns, column, target, "n=%d input %d" % (n, inputs[column]))
    return tally.result()


def check_controlled_multipliers() -> SuiteResult:
    """C-U_a permutes x < N into a*x mod N with clean ancillas, and C-U_a C-U_a' = C-U_aa'."""
    tally = _Tally("cua")
    for N in CUA_MODULI:
        n = N.bit_length()
        layout = register_layout(n)
        on = 1 << layout.control
        inputs = [x for x in range(N)] + [x | on for x in range(N)]
        bases = [a for a in range(1, N) if math.gcd(a, N) == 1]
        circuits = {a: build_controlled_ua(n, a, N, n + 1) for a in bases}

        for a, circuit in circuits.items():
            columns = circuit_columns(circuit, inputs)
            for column, index in enumerate(inputs):
                x = index & ((1 << n) - 1)
                expected = (a * x % N) | on if index & on else index
                tally.check_fidelity(columns, column, expected, "N=%d a=%d x=%d" % (N, a, x))

        controlled = inputs[N:]
        for a, b in itertools.product(bases, repeat=2):
            columns = circuit_columns(compose_circuits(circuits[a], circuits[b]), controlled)
            product = a * b % N
            for column, index in enumerate(controlled):
                x = index & ((1 << n) - 1)
                tally.check_fidelity(
                    columns,
                    column,
                    (product * x % N) | on,
                    "N=%d a=%d a'=%d x=%d" % (N, a, b, x),
                )
    return tally.result()


def check_order_finding() -> SuiteResult:
    """Seeded runs only ever read phases the ideal distribution allows."""
    tally = _Tally("order")
    for N, a, runs in ORDER_CASES:
        support = ideal_phase_distribution(N, a) > FIDELITY_TOLERANCE
        for record in sample_order_finding(N, a, seed=ORDER_SEED, runs=runs):
            tally.check(
                bool(support[record.m]),
                "N=%d a=%d: m=%d has zero ideal probability" % (N, a, record.m),
            )
    return tally.result()


SUITES: Dict[str, Callable[[], SuiteResult]] = {
    "inverse": check_inverses,
    "qft": check_qft,
    "aqft": check_aqft,
    "adder": check_adders,
    "modadd": check_modular_adders,
    "swap": check_controlled_swaps,
    "cua": check_controlled_multipliers,
    "order": check_order_finding,
}


def run_suite(name: str) -> SuiteResult:
    result = SUITES[name]()
    logger.info("suite %s: %d passed, %d failed", name, result.passed, result.failed)
    return result


def run_suites(names: Optional[Sequence[str]] = None, workers: int = 1) -> List[SuiteResult]:
    """Runs the named suites (all of them by default), optionally one process per suite.

    Raises:
        :exceptions.ShorpythonError: An unknown suite name.
    """
    names = list(names) if names else list(SUITES)
    unknown = [name for name in names if name not in SUITES]
    if unknown:
        raise exceptions.ShorpythonError(
            "Unknown suite(s) %s, options are: %s" % (", ".join(unknown), ", ".join(SUITES)),
            "Invalid suite",
        )
    if workers <= 1:
        return [run_suite(name) for name in names]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_suite, names))
