import numpy as np
import pytest

import oracles
from consensus_seminorms.certify import (
    CertificationError,
    MatrixClassReport,
    certification_report,
    certify_induced_inf,
    certify_metric_inf,
    classify,
    counterexample_matrix,
    feasibility_matrix,
    verify_counterexample,
)
from consensus_seminorms.matcore import validate_stochastic
from consensus_seminorms.products import random_scrambling, random_stochastic
from consensus_seminorms.seminorms import ergodicity_coefficient, vector_seminorm


class TestClassify:
    def test_counterexample_classes(self, counterexample_s):
        report = classify(counterexample_s)
        assert report.scrambling
        assert not report.positive_column
        assert report.positive_diagonal  # the pattern has a full diagonal
        assert report.rooted
        assert not report.doubly_stochastic

    def test_identity(self):
        for n in (2, 4):
            report = classify(validate_stochastic(np.eye(n)))
            assert not report.scrambling
            assert not report.rooted
            assert report.positive_diagonal

    def test_positive_column_implies_scrambling(self, rng):
        a = np.zeros((4, 4))
        a[:, 0] = 1 / 4
        a += np.eye(4) * 3 / 4
        report = classify(validate_stochastic(a))
        assert report.positive_column and report.scrambling

    def test_report_invariant_enforced(self):
        with pytest.raises(CertificationError):
            MatrixClassReport(stochastic=True, doubly_stochastic=False,
                              scrambling=False, positive_column=True,
                              positive_diagonal=False, rooted=False)

    def test_scrambling_matches_tau_dual_route(self, rng):
        for _ in range(60):
            s = random_stochastic(rng, int(rng.integers(2, 7)),
                                  density=float(rng.uniform(0.3, 0.9)))
            assert classify(s).scrambling == \
                (ergodicity_coefficient(s).value < 1.0 - 1e-12)

    def test_rooted_cycle(self):
        # cycle graph: every vertex reaches all others, no scrambling
        a = np.roll(np.eye(4), 1, axis=1)
        report = classify(validate_stochastic(a))
        assert report.rooted and not report.scrambling

    def test_rejects_rectangular(self, rng):
        s = random_stochastic(rng, 2, 3)
        with pytest.raises(ValueError):
            classify(s)


class TestCertifyMetricInf:
    def test_all_positive_contractive(self):
        s = validate_stochastic(np.full((3, 3), 1 / 3))
        cert = certify_metric_inf(s)
        assert cert.contractive
        assert cert.witness["type"] == "feasible_y"
        a = feasibility_matrix(s)
        assert (a @ cert.witness["y"]).max() < 0

    def test_counterexample_matrix_not_contractive(self, counterexample_s):
        cert = certify_metric_inf(counterexample_s)
        assert not cert.contractive
        assert cert.value == pytest.approx(1.0, abs=1e-7)
        x = np.asarray(cert.witness["x"])
        assert np.abs(x - [0, 1, 1, 1, 1, 0]).max() <= 1e-8
        a = feasibility_matrix(counterexample_s)
        assert (x @ a).min() >= -1e-8

    def test_identity_not_contractive(self):
        for n in (2, 3):
            cert = certify_metric_inf(validate_stochastic(np.eye(n)))
            assert not cert.contractive

    def test_json_shape(self, counterexample_s):
        doc = certify_metric_inf(counterexample_s).to_dict()
        assert doc["seminorm"] == {"kind": "metric", "p": "inf"}
        assert doc["witness"]["type"] == "farkas_x"
        assert isinstance(doc["witness"]["x"], list)


class TestCertifyInducedInf:
    def test_counterexample_matrix_contractive_two_thirds(self, counterexample_s):
        cert = certify_induced_inf(counterexample_s)
        assert cert.contractive
        assert cert.value == pytest.approx(2 / 3, abs=1e-12)
        u, v = cert.witness["row_pair"]
        z = np.asarray(cert.witness["z"])
        assert vector_seminorm(counterexample_s.data @ z, "inf").value == pytest.approx(
            cert.value, abs=1e-12)
        assert u != v

    def test_scrambling_always_contractive(self, rng):
        for _ in range(25):
            s = random_scrambling(rng, int(rng.integers(2, 7)))
            assert certify_induced_inf(s).contractive

    def test_identity_not_contractive(self):
        cert = certify_induced_inf(validate_stochastic(np.eye(2)))
        assert not cert.contractive
        assert cert.value == 1.0

    def test_metric_implies_induced(self, rng):
        for _ in range(40):
            s = random_stochastic(rng, int(rng.integers(2, 6)),
                                  density=float(rng.uniform(0.4, 1.0)))
            m_cert = certify_metric_inf(s)
            i_cert = certify_induced_inf(s)
            if m_cert.contractive:
                assert i_cert.contractive
            assert i_cert.value <= m_cert.value + 1e-9


class TestCertificationReport:
    def test_combined_schema(self, counterexample_s):
        doc = certification_report(counterexample_s)
        assert set(doc) == {"class", "certificates", "witnesses"}
        assert doc["class"]["scrambling"] is True
        kinds = [c["seminorm"]["kind"] for c in doc["certificates"]]
        assert kinds == ["metric", "induced"]
        assert len(doc["witnesses"]) == 2
        # standalone witness re-verification from the serialized report
        farkas = next(w for w in doc["witnesses"] if w["type"] == "farkas_x")
        x = np.asarray(farkas["x"])
        assert (x @ feasibility_matrix(counterexample_s)).min() >= -1e-8

    def test_json_serializable(self, counterexample_s):
        import json
        json.dumps(certification_report(counterexample_s))


class TestCounterexample:
    def test_matrix_is_the_scaled_pattern(self, counterexample_s):
        from consensus_seminorms.certify import COUNTEREXAMPLE_PATTERN
        assert np.array_equal(counterexample_s.data * 3, np.asarray(COUNTEREXAMPLE_PATTERN))
        assert oracles.scrambling_oracle(counterexample_s.data)

    def test_default_run_passes_all_five(self):
        report = verify_counterexample()
        assert report.all_passed and report.failed_step is None
        assert [s.name for s in report.steps] == [
            "stochastic", "scrambling", "ergodicity_below_threshold",
            "strict_feasibility_infeasible", "metric_inf_equals_one"]
        assert report.steps[2].detail["value"] == pytest.approx(2 / 3, abs=1e-12)

    def test_perturbed_run_flips_step_four(self):
        report = verify_counterexample(perturb=0.01)
        assert not report.all_passed
        assert report.failed_step == 4
        assert report.steps[3].detail["feasible"] is True
        assert len(report.steps) == 4  # aborted before step five

    def test_tau_threshold_half_fails_step_three(self):
        report = verify_counterexample(tau_threshold=0.5)
        assert report.failed_step == 3
        assert report.steps[2].detail["value"] > 0.5

    def test_report_serializes(self):
        doc = verify_counterexample().to_dict()
        assert doc["all_passed"] is True
        assert len(doc["steps"]) == 5

    def test_negative_perturbation_rejected(self):
        with pytest.raises(ValueError):
            counterexample_matrix(perturb=-0.1)
