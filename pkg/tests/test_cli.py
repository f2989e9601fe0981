import json
import math

import pytest

from cmentropy import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestReport:
    def test_gaussian_report_values(self, capsys):
        code, out, _ = run(capsys, "report", "gaussian:mu=0,var=1", "--noise-var", "1")
        assert code == 0
        doc = json.loads(out)
        assert doc["schema_version"] == 1
        assert doc["h_cond_mean"]["value"] == pytest.approx(1.07236, abs=1e-5)
        assert doc["h_cond_mean"]["abs_error"] < 1e-6
        assert doc["mmse"]["value"] == pytest.approx(0.5, abs=1e-8)

    def test_bits_units(self, capsys):
        _, out_nats, _ = run(capsys, "report", "gaussian:mu=0,var=1")
        _, out_bits, _ = run(capsys, "report", "gaussian:mu=0,var=1", "--units", "bits")
        h_nats = json.loads(out_nats)["h_cond_mean"]["value"]
        h_bits = json.loads(out_bits)["h_cond_mean"]["value"]
        assert h_bits == pytest.approx(h_nats / math.log(2), rel=1e-12)

    def test_parse_error_exit_code(self, capsys):
        code, _, err = run(capsys, "report", "gauss:var=1")
        assert code == 1
        assert "unknown distribution" in err

    def test_domain_error_exit_code(self, capsys):
        code, _, err = run(capsys, "report", "gaussian:mu=0,var=1", "--noise-var", "-1")
        assert code == 2

    def test_file_output(self, capsys, tmp_path):
        out = tmp_path / "rep.json"
        code, _, _ = run(capsys, "report", "laplace:var=1", "--out", str(out))
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["input"] == "laplace:var=1"

    def test_matches_shipped_schema(self, capsys):
        jsonschema = pytest.importorskip("jsonschema")
        from pathlib import Path
        schema_path = Path(__file__).resolve().parent.parent / "docs" / "report.schema.json"
        _, out, _ = run(capsys, "report", "uniform:var=1")
        jsonschema.validate(json.loads(out), json.loads(schema_path.read_text()))


class TestSweep:
    def test_csv_shape_and_ordering(self, capsys):
        code, out, _ = run(capsys, "sweep", "uniform", "--var-grid", "1,2,4")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0].startswith("sigma_x2,truth,truth_err,lower_main")
        assert len(lines) == 4
        for line in lines[1:]:
            vals = dict(zip(lines[0].split(","), map(float, line.split(","))))
            assert vals["lower_main"] <= vals["truth"] + 1e-6
            assert vals["truth"] <= vals["ub_jensen"] + 1e-6
            assert vals["ub_jensen"] <= vals["ub_linear"] + 1e-6

    def test_unknown_family(self, capsys):
        code, _, _ = run(capsys, "sweep", "betaprime", "--var-grid", "1,2")
        assert code == 1

    def test_bad_grid(self, capsys):
        code, _, _ = run(capsys, "sweep", "uniform", "--var-grid", "2,1")
        assert code == 1


class TestRateLoss:
    def test_schema_header(self, capsys):
        code, out, _ = run(capsys, "rate-loss", "gaussian:mu=0,var=1",
                           "--agents", "2", "--d-grid", "0.5,0.75")
        assert code == 0
        header = out.split("\n")[0]
        assert header == ("D,remote_lb1,remote_lb2,coop_tight,coop_weak,ceo_ub,"
                          "loss_lb,loss_ub_thm9,loss_ub_thm10,loss_ub_prev,"
                          "loss_gauss_exact")

    def test_spot_value(self, capsys):
        _, out, _ = run(capsys, "rate-loss", "gaussian:mu=0,var=1",
                        "--agents", "2", "--d-grid", "0.75")
        row = out.strip().split("\n")[1].split(",")
        assert float(row[-1]) == pytest.approx(0.09116078, abs=1e-6)

    def test_infinite_agents_rejected_for_loss_curve(self, capsys):
        code, _, _ = run(capsys, "rate-loss", "gaussian:mu=0,var=1",
                         "--agents", "inf", "--d-grid", "0.5")
        assert code == 2


class TestExpofam:
    def test_gap_curve(self, capsys):
        code, out, _ = run(capsys, "expofam", "--d-grid", "0.5,1,3")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == ("d,gap_analytic,guide_small_d,guide_large_d,"
                            "gap_numeric,gap_numeric_err")
        row = dict(zip(lines[0].split(","), lines[2].split(",")))
        assert float(row["gap_analytic"]) == pytest.approx(0.8378770664, abs=1e-9)
        assert row["gap_numeric"] == ""


class TestVector:
    def test_vector_record(self, capsys):
        spec = "vec:n=2,input=prod(uniform:var=1;laplace:var=1),A=[[1,0],[0,1]],Kw=[[1,0],[0,1]]"
        code, out, _ = run(capsys, "vector", spec,
                           "--n-output-samples", "120000",
                           "--n-logdet-samples", "200")
        assert code == 0
        doc = json.loads(out)
        assert doc["lower_main"]["value"] <= doc["truth"]["value"] + 0.05
        assert doc["truth"]["value"] <= doc["ub_jensen"]["value"] + 0.05
        assert len(doc["mmse_matrix"]) == 2

    @pytest.mark.parametrize("bad", [
        "vec:n=2,input=prod(uniform:var=1),A=[[1,0],[0,1]],Kw=[[1,0],[0,1]]",
        "vec:n=2,input=prod(uniform:var=1;uniform:var=1),A=[[1,0]],Kw=[[1,0],[0,1]]",
        "vec:input=prod(uniform:var=1;uniform:var=1),A=[[1,0],[0,1]],Kw=[[1,0],[0,1]]",
        "vek:n=1,input=prod(uniform:var=1),A=[[1]],Kw=[[1]]",
    ])
    def test_bad_specs(self, capsys, bad):
        code, _, _ = run(capsys, "vector", bad)
        assert code == 1


class TestFigures:
    def test_fig3_files(self, capsys, tmp_path):
        code, _, _ = run(capsys, "figure", "fig3", "--out-dir", str(tmp_path),
                         "--var-grid", "1.25,2,4")
        assert code == 0
        for name in ("fig3_gm2.csv", "fig3_exponential.csv", "fig3_uniform.csv",
                     "fig3_manifest.json"):
            assert (tmp_path / name).exists()
        manifest = json.loads((tmp_path / "fig3_manifest.json").read_text())
        assert manifest["figure"] == "fig3"
        assert manifest["sigma_x2_grid"] == [1.25, 2, 4]
        header = (tmp_path / "fig3_uniform.csv").read_text().split("\n")[0]
        assert header == ("sigma_x2,truth,truth_err,lower_main,lower_main_err,"
                          "ub_jensen,ub_jensen_err,ub_linear,ub_linear_err")

    def test_fig5_files(self, capsys, tmp_path):
        code, _, _ = run(capsys, "figure", "fig5", "--out-dir", str(tmp_path),
                         "--d-grid", "0.4,0.6,0.8")
        assert code == 0
        for name in ("fig5_uniform.csv", "fig5_laplace.csv",
                     "fig5_exponential.csv", "fig5_manifest.json"):
            assert (tmp_path / name).exists()
        assert json.loads((tmp_path / "fig5_manifest.json").read_text())["agents"] == 2

    def test_fig7_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "figure", "fig7", "--out-dir", str(tmp_path),
                         "--d-grid", "0.5,1,5")
        assert code == 0
        lines = (tmp_path / "fig7.csv").read_text().strip().split("\n")
        assert len(lines) == 4

    def test_deterministic_output(self, capsys, tmp_path):
        run(capsys, "figure", "fig3", "--out-dir", str(tmp_path / "a"),
            "--var-grid", "1.5,2")
        run(capsys, "figure", "fig3", "--out-dir", str(tmp_path / "b"),
            "--var-grid", "1.5,2")
        for name in ("fig3_gm2.csv", "fig3_manifest.json"):
            assert (tmp_path / "a" / name).read_bytes() == \
                (tmp_path / "b" / name).read_bytes()


class TestSelftest:
    def test_passes_and_deterministic(self, capsys):
        code1, out1, _ = run(capsys, "selftest", "--seed", "42")
        code2, out2, _ = run(capsys, "selftest", "--seed", "42")
        assert code1 == 0 and code2 == 0
        assert out1 == out2
        assert out1.count("PASS") == 12
        assert "FAIL" not in out1
