import pytest

from shorpython import exceptions
from shorpython.core import count_gates
from shorpython.models import GateKind, ResourceReport
from shorpython.orderfind import build_order_finding_circuit
from shorpython.resources import (
    estimate,
    log_kmax,
    phi_add_depth,
    predict_gate_counts,
    report_csv,
    scaling_report,
)


class TestClosedForm:
    @pytest.mark.resources
    def test_totals(self):
        assert sum(predict_gate_counts(4, 5).values()) == 6333
        assert sum(predict_gate_counts(8, 9).values()) == 62073

    @pytest.mark.resources
    def test_ratio_between_widths(self):
        small = sum(predict_gate_counts(4, 5).values())
        large = sum(predict_gate_counts(8, 9).values())

        # n^3 * kmax alone would predict 14.4; lower-order terms weigh heavily at n=4
        assert 9.7 < large / small < 9.9

    @pytest.mark.resources
    def test_matches_construction(self):
        for n, kmax in ((2, 3), (3, 2), (3, 4), (4, 3), (4, 5), (5, 4)):
            circuit = build_order_finding_circuit((1 << n) - 1, 2, kmax)
            predicted = predict_gate_counts(n, kmax)
            assert count_gates(circuit) == predicted

    @pytest.mark.resources
    def test_out_of_range(self):
        with pytest.raises(exceptions.ResourceError):
            predict_gate_counts(1, 1)
        with pytest.raises(exceptions.ResourceError):
            predict_gate_counts(4, 6)
        with pytest.raises(exceptions.ResourceError):
            predict_gate_counts(4, 0)


class TestEstimate:
    @pytest.mark.resources
    def test_qubits(self):
        assert estimate(4).qubits == 11
        assert estimate(2).qubits == 7

    @pytest.mark.resources
    def test_report(self):
        report = estimate(3)
        circuit = build_order_finding_circuit(7, 2, 4)

        assert report.kmax == 4
        assert not report.extrapolated
        assert report.gate_counts == {k.value: v for k, v in count_gates(circuit).items()}
        assert report.gates_total == report.predicted["gates_total"]
        assert 0 < report.depth <= report.gates_total
        assert report.predicted["qubits"] == 9
        assert report.predicted["n3_kmax"] == 27 * 4

    @pytest.mark.resources
    def test_explicit_kmax(self):
        report = estimate(4, kmax=2)

        assert report.kmax == 2
        assert report.gate_counts[GateKind.CPHASE.value] < estimate(4).gate_counts["CPhase"]

    @pytest.mark.resources
    def test_out_of_range(self):
        with pytest.raises(exceptions.ResourceError):
            estimate(1)
        with pytest.raises(exceptions.ResourceError):
            estimate(4, kmax=6)
        with pytest.raises(exceptions.ResourceError):
            estimate(13, extrapolate=False)

    @pytest.mark.resources
    @pytest.mark.slow
    def test_extrapolation(self):
        report = estimate(64)

        assert report.extrapolated
        assert report.qubits == 131
        assert report.kmax == 8
        assert report.depth is None
        assert report.predicted["depth"] > 0
        assert report.gates_total == sum(predict_gate_counts(64, 8).values())

    @pytest.mark.resources
    def test_log_kmax(self):
        assert log_kmax(2) == 3
        assert log_kmax(4) == 4
        assert log_kmax(10) == 6
        assert log_kmax(64) == 8


class TestScaling:
    @pytest.mark.resources
    def test_phi_add_depth_is_linear(self):
        assert [phi_add_depth(n) for n in (2, 4, 8)] == [3, 5, 9]

    @pytest.mark.resources
    def test_needs_three_widths(self):
        with pytest.raises(exceptions.ResourceError):
            scaling_report([4, 6])
        with pytest.raises(exceptions.ResourceError):
            scaling_report([4, 8, 16])

    @pytest.mark.resources
    @pytest.mark.slow
    def test_exponents(self):
        report = scaling_report([4, 6, 8, 10])

        assert report.kmax_values == [4, 5, 5, 6]
        assert 2.6 <= report.gate_exponent <= 3.4
        assert 2.6 <= report.depth_exponent <= 3.4
        assert 0.8 <= report.phi_add_depth_exponent <= 1.2


class TestCSV:
    @pytest.mark.resources
    def test_report_csv(self):
        constructed = estimate(2)
        extrapolated = ResourceReport(
            n=20, kmax=7, qubits=43, gate_counts={"H": 5}, gates_total=5, extrapolated=True
        )
        lines = report_csv([constructed, extrapolated]).splitlines()

        assert lines[0] == "n,kmax,qubits,gates_total,depth"
        assert lines[1] == "2,3,7,%d,%d" % (constructed.gates_total, constructed.depth)
        assert lines[2] == "20,7,43,5,"
