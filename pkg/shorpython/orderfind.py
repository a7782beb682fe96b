"""Semiclassical order finding on 2n+3 qubits.

A single control qubit is reused for all 2n phase-estimation stages. Stage i (i = 0 first)
applies C-U for a^(2^(2n-1-i)) mod N, then a rotation fixed by the bits already read,
a Hadamard and a measurement; a classically controlled X resets the control afterwards.
The i-th measured bit therefore carries weight 2^i in the phase estimate.
"""
import functools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from shorpython import exceptions, numtheory
from shorpython.blocks import emit_controlled_ua, register_layout
from shorpython.core import CircuitBuilder
from shorpython.models import (
    BlockMetadata,
    BlockParams,
    Circuit,
    MeasurementRecord,
    OrderResult,
)
from shorpython.simulator import make_rng, run_circuit

logger = logging.getLogger(__name__)


def _feedback_turns(previous_bits: Sequence[int]) -> Fraction:
    i = len(previous_bits)
    return -sum(
        (Fraction(previous_bits[i - k], 1 << (k + 1)) for k in range(1, i + 1)), Fraction(0)
    )


def feedback_angle(previous_bits: Sequence[int]) -> float:
    """Rotation applied before the next Hadamard and measurement, in radians.

    theta_i = -2*pi * sum_{k=1..i} m_{i-k} / 2^(k+1), bits ordered earliest first.
    """
    return 2 * math.pi * float(_feedback_turns(previous_bits))


def _check_pair(N: int, a: int, kmax: Optional[int]) -> BlockParams:
    n = N.bit_length()
    if not 1 < a < N:
        raise exceptions.OrderFindingError(
            "a=%d must satisfy 1 < a < N=%d" % (a, N), "Invalid order-finding input"
        )
    try:
        return BlockParams(
            n=n, a=a, N=N, kmax=kmax if kmax is not None else n + 1, require_coprime=True
        )
    except ValidationError as e:
        raise exceptions.OrderFindingError(str(e), "Invalid order-finding input")


def build_order_finding_circuit(N: int, a: int, kmax: Optional[int] = None) -> Circuit:
    """The complete 2n+3 qubit, 2n classical bit order-finding circuit.

    The x-register starts in |1> via an X gate, so the circuit runs from |0...0>.
    """
    params = _check_pair(N, a, kmax)
    n, kmax = params.n, params.kmax
    layout = register_layout(n)
    control = layout.control
    builder = CircuitBuilder(
        layout.num_qubits,
        2 * n,
        metadata=BlockMetadata(block="order_finding", n=n, a=a, N=N, kmax=kmax),
    )
    builder.x(layout.x[0])
    for i in range(2 * n):
        power = numtheory.mod_exp(a, 1 << (2 * n - 1 - i), N)
        builder.h(control)
        emit_controlled_ua(builder, layout, power, numtheory.mod_inverse(power, N), N, kmax)
        for k in range(1, i + 1):
            builder.classical_phase(control, -1, k + 1, condition=i - k)
        builder.h(control)
        builder.measure(control, i)
        builder.classical_x(control, condition=i)
    circuit = builder.build()
    logger.debug("order finding N=%d a=%d kmax=%d: %d gates", N, a, kmax, len(circuit))
    return circuit


@functools.lru_cache(maxsize=16)
def _cached_circuit(N: int, a: int, kmax: Optional[int]) -> Circuit:
    return build_order_finding_circuit(N, a, kmax)


def run_semiclassical_order_finding(
    N: int,
    a: int,
    kmax: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> MeasurementRecord:
    """Simulates one order-finding run and returns the 2n measured bits.

    Raises:
        :exceptions.OrderFindingError: gcd(a, N) != 1 or a outside (1, N).
        :exceptions.SimulatorError: 2n+3 exceeds the simulator capacity.
    """
    circuit = _cached_circuit(N, a, kmax)
    result = run_circuit(circuit, rng=rng if rng is not None else make_rng())
    return MeasurementRecord(n=circuit.metadata.n, bits=result.clbits)


def phase_to_order(record: MeasurementRecord, N: int, a: int) -> OrderResult:
    """First convergent denominator q < N of m/2^(2n) with a^q = 1 (mod N), if any."""
    if record.m:
        for _, q in numtheory.continued_fraction_convergents(record.m, 1 << (2 * record.n)):
            if q >= N:
                break
            if numtheory.mod_exp(a, q, N) == 1:
                return OrderResult(N=N, a=a, r=q, record=record, validated=True)
    return OrderResult(N=N, a=a, record=record)


def find_order(
    N: int,
    a: int,
    kmax: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> OrderResult:
    """One semiclassical run followed by continued-fraction postprocessing."""
    record = run_semiclassical_order_finding(N, a, kmax, rng)
    result = phase_to_order(record, N, a)
    logger.debug("N=%d a=%d m=%d -> r=%s", N, a, record.m, result.r)
    return result


def _seeded_run(job) -> MeasurementRecord:
    N, a, kmax, seed_sequence = job
    return run_semiclassical_order_finding(N, a, kmax, np.random.default_rng(seed_sequence))


def sample_order_finding(
    N: int,
    a: int,
    kmax: Optional[int] = None,
    seed: Optional[int] = None,
    runs: int = 100,
    workers: int = 1,
) -> List[MeasurementRecord]:
    """Independent runs with child seeds spawned from ``seed``.

    The records do not depend on ``workers``: each run owns its child seed.
    """
    children = np.random.SeedSequence(seed).spawn(runs)
    jobs = [(N, a, kmax, child) for child in children]
    if workers <= 1:
        return [_seeded_run(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_seeded_run, jobs))


def ideal_phase_distribution(N: int, a: int) -> np.ndarray:
    """Exact probability of every 2n-bit outcome for an error-free run.

    The x-register |1> is a uniform mixture over the r eigenphases s/r, each read out by a
    2n-bit phase estimation.
    """
    r = numtheory.multiplicative_order(a, N)
    bits = 2 * N.bit_length()
    x = np.arange(1 << bits)
    distribution = np.zeros(1 << bits)
    for s in range(r):
        amplitudes = np.fft.fft(np.exp(2j * np.pi * x * s / r)) / (1 << bits)
        distribution += np.abs(amplitudes) ** 2
    return distribution / r
