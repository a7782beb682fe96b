from typing import Iterable, List

from shorpython.models import (
    FactorizationResult,
    OrderResult,
    ResourceReport,
    ScalingReport,
    SuiteResult,
)

# at most this many failure messages are echoed per suite
MAX_LISTED_FAILURES = 5


def format_attempts(result: FactorizationResult) -> List[str]:
    lines = []
    for number, attempt in enumerate(result.attempts, start=1):
        r = "-" if attempt.r is None else attempt.r
        lines.append("  attempt %d: a=%d r=%s %s" % (number, attempt.a, r, attempt.outcome.value))
    return lines


def format_factorization(result: FactorizationResult) -> str:
    lines = [
        "N=%d = %d x %d" % (result.N, result.factor, result.cofactor),
        "route: %s" % result.route.value,
    ]
    if result.seed is not None:
        lines.append("seed: %d" % result.seed)
    lines.extend(format_attempts(result))
    return "\n".join(lines)


def format_order(result: OrderResult) -> str:
    record = result.record
    bits = "".join(str(bit) for bit in record.bits)
    r = "absent" if result.r is None else str(result.r)
    return "\n".join(
        [
            "N=%d a=%d" % (result.N, result.a),
            "bits (earliest first): %s" % bits,
            "m=%d phase=%d/2^%d=%.6f" % (record.m, record.m, 2 * record.n, record.phase),
            "r=%s validated=%s" % (r, result.validated),
        ]
    )


def format_resource_report(report: ResourceReport) -> str:
    """Counts first, then the closed-form predictions next to them."""
    depth = "-" if report.depth is None else str(report.depth)
    lines = [
        "n=%d kmax=%d%s" % (report.n, report.kmax, " (extrapolated)" if report.extrapolated else ""),
        "  qubits: %d" % report.qubits,
        "  gates: %d" % report.gates_total,
        "  depth: %s" % depth,
    ]
    lines.extend(
        "    %-14s %d" % (kind, count) for kind, count in report.gate_counts.items() if count
    )
    lines.extend("  predicted %s: %g" % item for item in report.predicted.items())
    return "\n".join(lines)


def format_scaling(report: ScalingReport) -> str:
    return "\n".join(
        [
            "n: %s" % " ".join(str(n) for n in report.n_values),
            "kmax: %s" % " ".join(str(k) for k in report.kmax_values),
            "gates ~ n^%.3f (rms residual %.3g)" % (report.gate_exponent, report.gate_residual),
            "depth ~ n^%.3f (rms residual %.3g)" % (report.depth_exponent, report.depth_residual),
            "controlled phi-ADD depth ~ n^%.3f" % report.phi_add_depth_exponent,
        ]
    )


def format_suites(results: Iterable[SuiteResult]) -> str:
    lines = []
    for result in results:
        lines.append(
            "%-8s %s  %d passed, %d failed"
            % (result.name, "ok" if result.ok else "FAIL", result.passed, result.failed)
        )
        for failure in result.failures[:MAX_LISTED_FAILURES]:
            lines.append("    %s" % failure)
        if len(result.failures) > MAX_LISTED_FAILURES:
            lines.append("    ... %d more" % (len(result.failures) - MAX_LISTED_FAILURES))
    return "\n".join(lines)
