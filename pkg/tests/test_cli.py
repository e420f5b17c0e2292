import json

import numpy as np
import pytest

from consensus_seminorms.cli import main
from consensus_seminorms.matcore import save_matrix_csv


@pytest.fixture
def counterexample_csv(tmp_path):
    from consensus_seminorms.certify import counterexample_matrix
    path = tmp_path / "counterexample.csv"
    save_matrix_csv(counterexample_matrix(), path)
    return str(path)


@pytest.fixture
def identity_csv(tmp_path):
    path = tmp_path / "identity.csv"
    save_matrix_csv(np.eye(3), path)
    return str(path)


@pytest.fixture
def consensus_csv(tmp_path):
    path = tmp_path / "consensus.csv"
    save_matrix_csv(np.outer(np.ones(4), [0.1, 0.2, 0.3, 0.4]), path)
    return str(path)


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestSeminormCommand:
    def test_metric_inf_counterexample(self, capsys, counterexample_csv):
        code, doc = run_json(capsys, ["seminorm", "--input", counterexample_csv,
                                      "--kind", "metric", "--p", "inf"])
        assert code == 0
        assert doc["value"] == pytest.approx(1.0, abs=1e-7)
        assert doc["method"] == "lp"
        assert "tolerance" in doc

    def test_coe_counterexample(self, capsys, counterexample_csv):
        code, doc = run_json(capsys, ["seminorm", "--input", counterexample_csv,
                                      "--kind", "coe"])
        assert code == 0
        assert doc["value"] == pytest.approx(2 / 3, abs=1e-12)

    def test_consensus_matrix_zero_for_all_kinds(self, capsys, consensus_csv):
        for kind, p in (("metric", "1"), ("metric", "2"), ("metric", "inf"),
                        ("induced", "2"), ("induced", "inf"), ("coe", None)):
            argv = ["seminorm", "--input", consensus_csv, "--kind", kind]
            if p:
                argv += ["--p", p]
            code, doc = run_json(capsys, argv)
            assert code == 0
            assert doc["value"] <= 1e-9

    def test_sampling_route_records_provenance(self, capsys, counterexample_csv):
        code, doc = run_json(capsys, ["seminorm", "--input", counterexample_csv,
                                      "--kind", "induced", "--p", "1",
                                      "--trials", "300", "--seed", "7"])
        assert code == 0
        assert doc["method"] == "sampling_lower_bound"
        assert doc["trials"] == 300 and doc["seed"] == 7

    def test_induced_requires_equal_row_sums(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        save_matrix_csv(np.array([[1.0, 0.0], [0.0, 2.0]]), path)
        assert main(["seminorm", "--input", str(path), "--kind", "induced",
                     "--p", "inf"]) == 2

    def test_parse_error_exits_two(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\n1,zz\n")
        assert main(["seminorm", "--input", str(path), "--kind", "metric",
                     "--p", "1"]) == 2

    def test_missing_file_exits_two(self):
        assert main(["seminorm", "--input", "/nonexistent.csv",
                     "--kind", "metric", "--p", "1"]) == 2

    def test_trials_with_metric_rejected(self, counterexample_csv):
        assert main(["seminorm", "--input", counterexample_csv,
                     "--kind", "metric", "--p", "inf", "--trials", "10"]) == 2

    def test_coe_with_p_rejected(self, counterexample_csv):
        assert main(["seminorm", "--input", counterexample_csv,
                     "--kind", "coe", "--p", "2"]) == 2

    def test_rational_entries_parse(self, tmp_path, capsys):
        path = tmp_path / "frac.csv"
        path.write_text("1/3,1/3,1/3\n1/3,1/3,1/3\n1/3,1/3,1/3\n")
        code, doc = run_json(capsys, ["seminorm", "--input", str(path),
                                      "--kind", "metric", "--p", "1"])
        assert code == 0
        assert doc["value"] <= 1e-12


class TestCertifyCommand:
    def test_metric_inf_not_contractive(self, capsys, counterexample_csv):
        code, doc = run_json(capsys, ["certify", "--input", counterexample_csv,
                                      "--seminorm", "metric-inf"])
        assert code == 3
        x = np.asarray(doc["witness"]["x"])
        assert np.abs(x - [0, 1, 1, 1, 1, 0]).max() <= 1e-8

    def test_induced_inf_contractive(self, capsys, counterexample_csv):
        code, doc = run_json(capsys, ["certify", "--input", counterexample_csv,
                                      "--seminorm", "induced-inf"])
        assert code == 0
        assert doc["value"] == pytest.approx(2 / 3, abs=1e-12)
        assert doc["witness"]["type"] == "sign_vector"

    def test_identity_induced_not_contractive(self, capsys, identity_csv):
        code, doc = run_json(capsys, ["certify", "--input", identity_csv,
                                      "--seminorm", "induced-inf"])
        assert code == 3

    def test_nonstochastic_metric_exits_two(self, tmp_path):
        path = tmp_path / "ers.csv"
        save_matrix_csv(np.array([[1.5, -0.5], [0.25, 0.75]]), path)
        assert main(["certify", "--input", str(path),
                     "--seminorm", "metric-inf"]) == 2


class TestClassifyCommand:
    def test_counterexample_classes(self, capsys, counterexample_csv):
        code, doc = run_json(capsys, ["classify", "--input", counterexample_csv])
        assert code == 0
        assert doc["class"]["scrambling"] is True
        assert doc["class"]["positive_column"] is False

    def test_invalid_input(self, tmp_path):
        path = tmp_path / "neg.csv"
        save_matrix_csv(np.array([[1.1, -0.1], [0.5, 0.5]]), path)
        assert main(["classify", "--input", str(path)]) == 2


class TestSimulateCommand:
    def test_counterexample_ensemble_passes(self, capsys, counterexample_csv,
                                            tmp_path):
        out = tmp_path / "trace.csv"
        code, doc = run_json(capsys, [
            "simulate", "--ensemble", counterexample_csv, "--schedule", "cyclic",
            "--steps", "40", "--seminorm", "induced-inf", "--out", str(out)])
        assert code == 0
        assert doc["lam"] == pytest.approx(2 / 3, abs=1e-12)
        assert doc["rate"]["passed"] is True
        assert out.exists()
        header = out.read_text().splitlines()[0]
        assert header == "step,product_seminorm,residual,r_i,lambda_pow_i"

    def test_identity_refused_exit_three(self, capsys, identity_csv, tmp_path):
        out = tmp_path / "trace.csv"
        code, doc = run_json(capsys, ["simulate", "--ensemble", identity_csv,
                                      "--steps", "5", "--out", str(out)])
        assert code == 3
        assert doc["refused"] is True
        assert not out.exists()

    def test_force_writes_trace_anyway(self, capsys, identity_csv, tmp_path):
        out = tmp_path / "trace.csv"
        code, doc = run_json(capsys, ["simulate", "--ensemble", identity_csv,
                                      "--steps", "5", "--out", str(out),
                                      "--force"])
        assert code == 3
        assert doc["refused"] is True
        assert out.exists()

    def test_two_positive_matrices_metric_inf(self, capsys, tmp_path, rng):
        paths = []
        for k in range(2):
            a = rng.uniform(0.05, 1.0, size=(4, 4))
            a /= a.sum(axis=1, keepdims=True)
            p = tmp_path / f"m{k}.csv"
            save_matrix_csv(a, p)
            paths.append(str(p))
        out = tmp_path / "trace.csv"
        code, doc = run_json(capsys, ["simulate", "--ensemble", *paths,
                                      "--schedule", "random", "--seed", "3",
                                      "--steps", "50",
                                      "--seminorm", "metric-inf",
                                      "--out", str(out)])
        assert code == 0
        assert doc["lam"] < 1.0
        assert doc["rate"]["passed"] is True

    def test_ensemble_directory(self, capsys, tmp_path, counterexample_csv):
        ens_dir = tmp_path / "ens"
        ens_dir.mkdir()
        save_matrix_csv(np.full((6, 6), 1 / 6), ens_dir / "avg.csv")
        import shutil
        shutil.copy(counterexample_csv, ens_dir / "s.csv")
        out = tmp_path / "trace.csv"
        code, doc = run_json(capsys, ["simulate", "--ensemble", str(ens_dir),
                                      "--steps", "20", "--out", str(out)])
        assert code == 0
        assert doc["lam"] == pytest.approx(2 / 3, abs=1e-12)


class TestCounterexampleCommand:
    def test_default_run_exits_zero(self, capsys):
        assert main(["counterexample"]) == 0
        out = capsys.readouterr().out
        assert "step 5" in out and "all checks passed" in out

    def test_json_verdict(self, capsys):
        code, doc = run_json(capsys, ["counterexample", "--json"])
        assert code == 0
        assert doc["all_passed"] is True

    def test_perturbed_fails_step_four(self, capsys):
        code, doc = run_json(capsys, ["counterexample", "--perturb", "0.01",
                                      "--json"])
        assert code == 5
        assert doc["failed_step"] == 4

    def test_tau_threshold_fails_step_three(self, capsys):
        code, doc = run_json(capsys, ["counterexample", "--tau-threshold", "0.5",
                                      "--json"])
        assert code == 5
        assert doc["failed_step"] == 3

    def test_dump_matrix_round_trips_through_cli(self, capsys, tmp_path):
        from consensus_seminorms.certify import counterexample_matrix
        path = tmp_path / "dumped.csv"
        assert main(["counterexample", "--dump-matrix", str(path), "--json"]) == 0
        capsys.readouterr()
        code, doc = run_json(capsys, ["seminorm", "--input", str(path),
                                      "--kind", "coe"])
        assert code == 0
        assert doc["value"] == pytest.approx(2 / 3, abs=1e-12)
        from consensus_seminorms.matcore import load_matrix
        assert np.abs(load_matrix(path).data
                      - counterexample_matrix().data).max() <= 1e-15


class TestEquivalenceCommand:
    def test_basic_run(self, capsys):
        code, doc = run_json(capsys, ["equivalence", "--a", "metric-2",
                                      "--b", "induced-2", "--n", "4",
                                      "--samples", "100", "--seed", "1"])
        assert code == 0
        assert doc["c_m_hat"] <= doc["c_M_hat"]
        assert doc["a"] == {"kind": "metric", "p": "2"}

    def test_bad_token_exits_two(self):
        assert main(["equivalence", "--a", "foo-9", "--b", "metric-1"]) == 2
