"""Exact gate, qubit and depth accounting for the order-finding construction.

Counts come from building the circuit (no simulation) for n <= 12. Beyond that the
closed-form counts below are used and the report is flagged as extrapolated.
"""
import csv
import functools
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from shorpython import exceptions
from shorpython.blocks import build_phi_add_const
from shorpython.core import circuit_depth, count_gates
from shorpython.models import FactorConfig, GateKind, ResourceReport, ScalingReport
from shorpython.orderfind import build_order_finding_circuit

logger = logging.getLogger(__name__)

MAX_CONSTRUCTED_N = 12
DEPTH_REFERENCE_N = 8

CSV_COLUMNS = ("n", "kmax", "qubits", "gates_total", "depth")


def log_kmax(n: int) -> int:
    """ceil(lg n) + 2, capped at the Fourier register width n+1."""
    return min(math.ceil(math.log2(n)) + 2, n + 1)


def _check_range(n: int, kmax: int):
    if n < 2:
        raise exceptions.ResourceError("n must be at least 2, got %d" % n, "Out of range")
    if not 1 <= kmax <= n + 1:
        raise exceptions.ResourceError(
            "kmax=%d outside 1..%d for n=%d" % (kmax, n + 1, n), "Out of range"
        )


def _rotations(m: int, kmax: int) -> int:
    # controlled rotations kept by a truncated QFT on m qubits
    return sum(min(j, kmax - 1) for j in range(m))


def predict_gate_counts(n: int, kmax: int) -> Dict[GateKind, int]:
    """Closed-form per-kind gate counts of the full order-finding circuit.

    Each of the 2n stages holds two CMULT blocks (n modular adders between one QFT and one
    inverse QFT each), n controlled swaps, two Hadamards, a measurement and a reset.
    """
    _check_range(n, kmax)
    m = n + 1
    rot = _rotations(m, kmax)
    stages = 2 * n
    adders = 2 * n

    counts = dict.fromkeys(GateKind, 0)
    counts[GateKind.CCPHASE] = stages * adders * 3 * m
    counts[GateKind.PHASE] = stages * adders * m
    counts[GateKind.CPHASE] = stages * (adders * (m + 4 * rot) + 4 * rot)
    counts[GateKind.H] = stages * (adders * 4 * m + 4 * m + 2)
    counts[GateKind.CNOT] = stages * (adders * 2 + 2 * n)
    counts[GateKind.X] = stages * adders * 2 + 1
    counts[GateKind.TOFFOLI] = stages * n
    counts[GateKind.MEASURE] = stages
    counts[GateKind.CLASSICAL_X] = stages
    counts[GateKind.CLASSICAL_PHASE] = n * (2 * n - 1)
    return counts


def _by_name(counts: Dict[GateKind, int]) -> Dict[str, int]:
    return {kind.value: count for kind, count in counts.items()}


@functools.lru_cache(maxsize=8)
def _reference_depth(kmax: int) -> int:
    return circuit_depth(
        build_order_finding_circuit((1 << DEPTH_REFERENCE_N) - 1, 2, kmax)
    )


def estimate(
    n: int, kmax: Optional[int] = None, extrapolate: Optional[bool] = None
) -> ResourceReport:
    """Resource report for the order-finding circuit of an n-bit modulus.

    The circuit is built for N = 2^n - 1 and a = 2; the counts do not depend on N or a.

    Args:
        :n (int): Bit length of N, at least 2.
        :kmax (int, optional): QFT truncation; the factoring default when absent.
        :extrapolate (bool, optional): Use closed-form counts instead of construction.
            Defaults to True exactly when n > 12.

    Raises:
        :exceptions.ResourceError: n or kmax out of range.
    """
    if kmax is None:
        kmax = FactorConfig.default_kmax(n)
    _check_range(n, kmax)
    if extrapolate is None:
        extrapolate = n > MAX_CONSTRUCTED_N
    if not extrapolate and n > MAX_CONSTRUCTED_N:
        raise exceptions.ResourceError(
            "n=%d is above the construction limit %d; use extrapolation"
            % (n, MAX_CONSTRUCTED_N),
            "Out of range",
        )

    closed_form = predict_gate_counts(n, kmax)
    predicted = {
        "qubits": 2 * n + 3,
        "gates_total": sum(closed_form.values()),
        "n3_kmax": n ** 3 * kmax,
        "n3": n ** 3,
    }

    if extrapolate:
        reference = _reference_depth(min(kmax, DEPTH_REFERENCE_N + 1))
        predicted["depth"] = reference * (n / DEPTH_REFERENCE_N) ** 3
        counts, depth, qubits = closed_form, None, 2 * n + 3
    else:
        circuit = build_order_finding_circuit((1 << n) - 1, 2, kmax)
        counts, depth, qubits = count_gates(circuit), circuit_depth(circuit), circuit.num_qubits

    report = ResourceReport(
        n=n,
        kmax=kmax,
        qubits=qubits,
        gate_counts=_by_name(counts),
        gates_total=sum(counts.values()),
        depth=depth,
        predicted=predicted,
        extrapolated=extrapolate,
    )
    logger.info(
        "n=%d kmax=%d: %d qubits, %d gates, depth %s%s",
        n, kmax, report.qubits, report.gates_total, depth,
        " (extrapolated)" if extrapolate else "",
    )
    return report


def phi_add_depth(n: int) -> int:
    """Greedy depth of a singly controlled phi-ADD on the n+1 qubit Fourier register."""
    return circuit_depth(build_phi_add_const(n + 1, 1, num_controls=1))


def _fit_exponent(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float]:
    log_x, log_y = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(log_x, log_y, 1)
    residual = np.sqrt(np.mean((log_y - (slope * log_x + intercept)) ** 2))
    return float(slope), float(residual)


def _estimate_job(job) -> ResourceReport:
    n, kmax = job
    return estimate(n, kmax, extrapolate=False)


def scaling_report(
    n_values: Iterable[int],
    kmax_rule: Optional[Callable[[int], int]] = None,
    workers: int = 1,
) -> ScalingReport:
    """Log-log least-squares exponents of gate count and depth against n.

    Args:
        :n_values: At least three distinct widths, each within the construction range.
        :kmax_rule (callable, optional): n -> kmax; :func:`log_kmax` by default.
        :workers (int): Processes used to build the circuits.
    """
    n_values = sorted(set(n_values))
    if len(n_values) < 3:
        raise exceptions.ResourceError(
            "A scaling fit needs at least three values of n, got %d" % len(n_values),
            "Out of range",
        )
    if n_values[-1] > MAX_CONSTRUCTED_N:
        raise exceptions.ResourceError(
            "Scaling fits use constructed circuits only (n <= %d)" % MAX_CONSTRUCTED_N,
            "Out of range",
        )
    rule = kmax_rule or log_kmax
    jobs = [(n, rule(n)) for n in n_values]
    if workers <= 1:
        reports = [_estimate_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_estimate_job, jobs))

    gates = [report.gates_total for report in reports]
    depths = [report.depth for report in reports]
    gate_exponent, gate_residual = _fit_exponent(n_values, gates)
    depth_exponent, depth_residual = _fit_exponent(n_values, depths)
    phi_add_exponent, _ = _fit_exponent(n_values, [phi_add_depth(n) for n in n_values])
    logger.info(
        "scaling over n=%s: gates ~ n^%.2f, depth ~ n^%.2f",
        n_values, gate_exponent, depth_exponent,
    )
    return ScalingReport(
        n_values=n_values,
        kmax_values=[kmax for _, kmax in jobs],
        gates=gates,
        depths=depths,
        gate_exponent=gate_exponent,
        depth_exponent=depth_exponent,
        gate_residual=gate_residual,
        depth_residual=depth_residual,
        phi_add_depth_exponent=phi_add_exponent,
    )


def report_csv(reports: List[ResourceReport]) -> str:
    """The (n, kmax, qubits, gates_total, depth) table; extrapolated rows leave depth empty."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for report in reports:
        writer.writerow(
            [
                report.n,
                report.kmax,
                report.qubits,
                report.gates_total,
                "" if report.depth is None else report.depth,
            ]
        )
    return buffer.getvalue()
