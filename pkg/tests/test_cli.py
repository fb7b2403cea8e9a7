import json
import sys

import numpy as np
import pytest

from linnet import matrixio
from linnet.cli import main
from linnet.exceptions import ParseError
from linnet.network import TrainingSet, predict, train


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_mat(tmp_path, name, a):
    path = tmp_path / name
    matrixio.write_matrix(path, np.asarray(a, dtype=float))
    return str(path)


def parse_csv_floats(line):
    return [float(t) for t in line.split(",")]


class TestMatrixFiles:
    def test_roundtrip_is_bit_identical(self):
        rng = np.random.default_rng(113)
        a = rng.normal(size=(4, 3)) * 10.0 ** rng.integers(-8, 8, size=(4, 3))
        again = matrixio.parse_matrix(matrixio.matrix_to_csv(a))
        assert np.array_equal(a, again)

    def test_header_comment_declares_shape(self):
        text = matrixio.matrix_to_csv(np.eye(2))
        assert text.splitlines()[0] == "# 2 2"
        with pytest.raises(ParseError, match="declared shape"):
            matrixio.parse_matrix("# 3 2\n1,2\n3,4\n")

    def test_bad_token_names_the_line(self):
        with pytest.raises(ParseError, match="data.csv:2.*'abc'"):
            matrixio.parse_matrix("1,2\n3,abc\n", source="data.csv")

    def test_non_finite_rejected(self):
        with pytest.raises(ParseError, match="non-finite"):
            matrixio.parse_matrix("1,nan\n")
        with pytest.raises(ParseError, match="non-finite"):
            matrixio.parse_matrix("1,inf\n")

    def test_ragged_rows_rejected(self):
        with pytest.raises(ParseError, match="row has 3 values, expected 2"):
            matrixio.parse_matrix("1,2\n1,2,3\n")

    def test_empty_file_rejected(self):
        with pytest.raises(ParseError, match="no data rows"):
            matrixio.parse_matrix("# just a comment\n")

    def test_vector_reading(self, tmp_path):
        row = tmp_path / "row.csv"
        row.write_text("1.5,2.5\n")
        np.testing.assert_array_equal(matrixio.read_vector(row), [1.5, 2.5])
        col = tmp_path / "col.csv"
        col.write_text("1.0\n2.0\n3.0\n")
        np.testing.assert_array_equal(matrixio.read_vector(col), [1.0, 2.0, 3.0])


class TestInspectionCommands:
    def test_svd(self, tmp_path, capsys):
        path = write_mat(tmp_path, "a.csv", np.diag([2.0, 1.0]))
        code, out, _ = run(capsys, "svd", path)
        assert code == 0
        assert parse_csv_floats(out.strip()) == [2.0, 1.0]

    def test_pinv(self, tmp_path, capsys):
        path = write_mat(tmp_path, "a.csv", [[1.0, 0.0], [0.0, 0.0]])
        code, out, _ = run(capsys, "pinv", path)
        assert code == 0
        lines = out.strip().splitlines()
        assert parse_csv_floats(lines[0]) == [1.0, 0.0]
        assert parse_csv_floats(lines[1]) == [0.0, 0.0]

    def test_rank(self, tmp_path, capsys):
        path = write_mat(tmp_path, "a.csv", np.eye(2))
        code, out, _ = run(capsys, "rank", path)
        assert code == 0
        assert out.strip() == "2"

    def test_parse_error_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("1,2\n3,abc\n")
        code, _, err = run(capsys, "rank", str(bad))
        assert code == 2
        assert "ParseError" in err
        assert "bad.csv:2" in err

    def test_missing_file_exits_2(self, capsys):
        code, _, err = run(capsys, "rank", "/nonexistent/nowhere.csv")
        assert code == 2
        assert "ParseError" in err


class TestSolve:
    def test_pseudo_least_squares(self, tmp_path, capsys):
        a = write_mat(tmp_path, "a.csv", [[1.0, 0.0], [0.0, 0.0]])
        f = write_mat(tmp_path, "f.csv", [[1.0, 1.0]])
        code, out, _ = run(capsys, "solve", a, f)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "q,1.0,0.0"
        assert lines[1] == "residual_norm,1.0"
        assert lines[2] == "solution_norm,1.0"
        assert lines[3] == "method,pseudo"

    def test_pseudo_rank_deficient_diagonal(self, tmp_path, capsys):
        a = write_mat(tmp_path, "a.csv", np.diag([1.0, 10.0, 0.0]))
        f = write_mat(tmp_path, "f.csv", [[1.0, 1.0, 1.0]])
        code, out, _ = run(capsys, "solve", a, f)
        assert code == 0
        q = parse_csv_floats(out.splitlines()[0].split(",", 1)[1])
        np.testing.assert_allclose(q, [1.0, 0.1, 0.0], atol=1e-12)

    def test_json_output(self, tmp_path, capsys):
        a = write_mat(tmp_path, "a.csv", np.eye(2))
        f = write_mat(tmp_path, "f.csv", [[2.0, 4.0]])
        code, out, _ = run(capsys, "solve", a, f, "--method", "tikhonov",
                           "--alpha", "1.0", "--json")
        assert code == 0
        doc = json.loads(out)
        assert set(doc) == {"q", "residual_norm", "solution_norm",
                            "alpha", "stop_index", "method"}
        np.testing.assert_allclose(doc["q"], [1.0, 2.0], atol=1e-12)
        assert doc["alpha"] == 1.0
        assert doc["method"] == "tikhonov"
        assert doc["stop_index"] is None

    def test_tikhonov_picks_alpha_from_delta(self, tmp_path, capsys):
        a = write_mat(tmp_path, "a.csv", np.eye(2))
        f = write_mat(tmp_path, "f.csv", [[1.0, 0.0]])
        code, out, _ = run(capsys, "solve", a, f, "--method", "tikhonov",
                           "--delta", "0.5")
        assert code == 0
        alpha_line = [l for l in out.splitlines() if l.startswith("alpha,")][0]
        assert float(alpha_line.split(",")[1]) == pytest.approx(1.0, abs=1e-8)

    def test_tikhonov_without_alpha_or_delta(self, tmp_path, capsys):
        a = write_mat(tmp_path, "a.csv", np.eye(2))
        f = write_mat(tmp_path, "f.csv", [[1.0, 0.0]])
        code, _, err = run(capsys, "solve", a, f, "--method", "tikhonov")
        assert code == 4
        assert "BadAlpha" in err

    def test_landweber_with_rule_prints_stop_index(self, tmp_path, capsys):
        a = write_mat(tmp_path, "a.csv", np.eye(2))
        f = write_mat(tmp_path, "f.csv", [[1.0, 0.0]])
        code, out, _ = run(capsys, "solve", a, f, "--method", "landweber",
                           "--delta", "0.1", "--rule", "2", "--max-iter", "10")
        assert code == 0
        assert "stop_index,1" in out.splitlines()

    def test_gd(self, tmp_path, capsys):
        a = write_mat(tmp_path, "a.csv", np.eye(2))
        f = write_mat(tmp_path, "f.csv", [[2.0, 3.0]])
        code, out, _ = run(capsys, "solve", a, f, "--method", "gd",
                           "--max-iter", "60")
        assert code == 0
        q = parse_csv_floats(out.splitlines()[0].split(",", 1)[1])
        np.testing.assert_allclose(q, [2.0, 3.0], atol=1e-6)
        assert "stop_index,60" in out.splitlines()

    def test_anchor_file(self, tmp_path, capsys):
        a = write_mat(tmp_path, "a.csv", [[1.0, 0.0], [0.0, 0.0]])
        f = write_mat(tmp_path, "f.csv", [[1.0, 0.0]])
        q0 = write_mat(tmp_path, "q0.csv", [[0.0, 5.0]])
        code, out, _ = run(capsys, "solve", a, f, "--q0-file", q0)
        assert code == 0
        q = parse_csv_floats(out.splitlines()[0].split(",", 1)[1])
        np.testing.assert_allclose(q, [1.0, 5.0], atol=1e-12)

    def test_dimension_mismatch_exits_3(self, tmp_path, capsys):
        a = write_mat(tmp_path, "a.csv", np.eye(2))
        f = write_mat(tmp_path, "f.csv", [[1.0, 2.0, 3.0]])
        code, _, err = run(capsys, "solve", a, f)
        assert code == 3
        assert "DimMismatch" in err

    def test_rule_consts_arity_checked(self, tmp_path, capsys):
        a = write_mat(tmp_path, "a.csv", np.eye(2))
        f = write_mat(tmp_path, "f.csv", [[1.0, 0.0]])
        code, _, err = run(capsys, "solve", a, f, "--method", "landweber",
                           "--delta", "0.1", "--rule", "3",
                           "--rule-consts", "1,2")
        assert code == 2
        assert "3 constants" in err
        code, _, err = run(capsys, "solve", a, f, "--method", "landweber",
                           "--rule-consts", "1,2")
        assert code == 2
        assert "requires --rule" in err


class TestSelectAlpha:
    def test_discrepancy(self, tmp_path, capsys):
        a = write_mat(tmp_path, "a.csv", np.eye(2))
        f = write_mat(tmp_path, "f.csv", [[1.0, 0.0]])
        code, out, _ = run(capsys, "select-alpha", a, f, "--delta", "0.5")
        assert code == 0
        lines = dict(l.split(",", 1) for l in out.strip().splitlines())
        assert float(lines["alpha"]) == pytest.approx(1.0, abs=1e-8)
        assert abs(float(lines["gap"])) <= 1e-10
        assert int(lines["iterations"]) >= 1

    def test_apriori(self, tmp_path, capsys):
        a = write_mat(tmp_path, "a.csv", np.eye(2))
        f = write_mat(tmp_path, "f.csv", [[1.0, 0.0]])
        code, out, _ = run(capsys, "select-alpha", a, f, "--principle", "apriori",
                           "--h", "5e-7", "--delta", "5e-7", "--p", "2")
        assert code == 0
        assert float(out.split(",")[1]) == pytest.approx(1e-3)

    def test_delta_too_large_exits_4(self, tmp_path, capsys):
        a = write_mat(tmp_path, "a.csv", np.eye(2))
        f = write_mat(tmp_path, "f.csv", [[1.0, 0.0]])
        code, _, err = run(capsys, "select-alpha", a, f, "--delta", "10")
        assert code == 4
        assert "DeltaTooLarge" in err

    def test_discrepancy_requires_delta(self, tmp_path, capsys):
        a = write_mat(tmp_path, "a.csv", np.eye(2))
        f = write_mat(tmp_path, "f.csv", [[1.0, 0.0]])
        code, _, err = run(capsys, "select-alpha", a, f)
        assert code == 2
        assert "--delta" in err


class TestTrainPredictDiagnose:
    def test_train_prints_model_json(self, tmp_path, capsys):
        g = write_mat(tmp_path, "g.csv", [[1.0, 0.0], [0.0, 0.0]])
        h = write_mat(tmp_path, "h.csv", [[1.0, 0.0], [1.0, 0.0]])
        code, out, _ = run(capsys, "train", g, h)
        assert code == 0
        doc = json.loads(out)
        np.testing.assert_allclose(doc["q"], [[1.0, 0.0], [1.0, 0.0]], atol=1e-12)
        assert doc["method_tag"] == "pseudo"
        assert "bias" not in doc

    def test_train_predict_roundtrip_matches_library(self, tmp_path, capsys):
        rng = np.random.default_rng(127)
        g_mat = rng.uniform(-1, 1, size=(3, 5))
        h_mat = rng.uniform(-1, 1, size=(2, 5))
        g = write_mat(tmp_path, "g.csv", g_mat)
        h = write_mat(tmp_path, "h.csv", h_mat)
        model_path = str(tmp_path / "model.json")
        code, out, _ = run(capsys, "train", g, h, "--model-out", model_path)
        assert code == 0
        for i, line in enumerate(out.strip().splitlines()):
            parts = line.split(",")
            assert parts[0] == "row" and int(parts[1]) == i
            assert parts[2] == "residual_norm"
        lib_model = train(TrainingSet(g_mat, h_mat))
        sample = write_mat(tmp_path, "sample.csv", g_mat[:, [0]].T)
        code, out, _ = run(capsys, "predict", sample, "--model-in", model_path)
        assert code == 0
        got = parse_csv_floats(out.strip())
        expect = predict(lib_model, g_mat[:, 0])
        assert got == [float(v) for v in expect]

    def test_train_with_bias(self, tmp_path, capsys):
        g = write_mat(tmp_path, "g.csv", [[0.0]])
        h = write_mat(tmp_path, "h.csv", [[7.0]])
        code, out, _ = run(capsys, "train", g, h, "--bias")
        assert code == 0
        doc = json.loads(out)
        np.testing.assert_allclose(doc["bias"], [7.0], atol=1e-12)
        np.testing.assert_allclose(doc["q"], [[0.0]], atol=1e-12)

    def test_predict_wrong_length_exits_3(self, tmp_path, capsys):
        model_path = tmp_path / "model.json"
        model_path.write_text(json.dumps({"q": [[1.0, 2.0]], "method_tag": "pseudo"}))
        sample = write_mat(tmp_path, "s.csv", [[1.0, 2.0, 3.0]])
        code, _, err = run(capsys, "predict", sample, "--model-in", str(model_path))
        assert code == 3
        assert "DimMismatch" in err

    def test_model_json_schema_checked(self, tmp_path, capsys):
        model_path = tmp_path / "model.json"
        model_path.write_text(json.dumps({"weights": [[1.0]]}))
        sample = write_mat(tmp_path, "s.csv", [[1.0]])
        code, _, err = run(capsys, "predict", sample, "--model-in", str(model_path))
        assert code == 2
        assert "ParseError" in err

    def test_diagnose(self, tmp_path, capsys):
        g = write_mat(tmp_path, "g.csv", [[1.0, 0.0], [0.0, 0.0]])
        h = write_mat(tmp_path, "h.csv", [[1.0, 0.0], [1.0, 0.0]])
        code, out, _ = run(capsys, "diagnose", g, h)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "rank,1"
        assert lines[1] == "full_rank,false"
        assert lines[2] == "n_identifiable,1"
        assert lines[3] == "n_stable,1"
        assert lines[4] == "condition,inf"
        assert parse_csv_floats(lines[5].split(",", 1)[1]) == [1.0, 0.0]

    def test_diagnose_full_rank(self, tmp_path, capsys):
        g = write_mat(tmp_path, "g.csv", np.diag([2.0, 1.0]))
        h = write_mat(tmp_path, "h.csv", np.eye(2))
        code, out, _ = run(capsys, "diagnose", g, h, "--noise-floor", "1.5")
        lines = out.strip().splitlines()
        assert code == 0
        assert lines[1] == "full_rank,true"
        assert lines[3] == "n_stable,1"
        assert lines[4] == "condition,2.0"


def write_spec(tmp_path, doc, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


BASE_SPEC = {
    "a": [[1.0, 0.0], [0.0, 0.0]],
    "f": [1.0, 1.0],
    "epsilons": [1e-2, 1e-4, 1e-6],
    "perturbation": {"mode": "operator_entry", "row": 2, "col": 2},
    "methods": [
        {"method": "pseudo"},
        {"method": "tikhonov", "alpha": "eps^(2/3)"},
    ],
    "seed": 7,
    "reference": [1.0, 0.0],
}


class TestExperiment:
    def test_instability_table(self, tmp_path, capsys):
        spec = write_spec(tmp_path, BASE_SPEC)
        code, out, _ = run(capsys, "experiment", spec)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == ("epsilon,method,alpha_or_n,residual,"
                            "error_to_reference,solution_norm")
        rows = [l.split(",") for l in lines[1:]]
        assert len(rows) == 6
        by_key = {(r[0], r[1]): r for r in rows}
        # the unregularized solution norm blows up like 1/eps
        norm = float(by_key[(repr(1e-6), "pseudo")][5])
        assert norm == pytest.approx(1e6, rel=1e-3)
        err = float(by_key[(repr(1e-6), "pseudo")][4])
        assert err == pytest.approx(1e6, rel=1e-3)
        # the a-priori rule keeps the error at the eps^(1/3) scale
        err = float(by_key[(repr(1e-6), "tikhonov")][4])
        assert err == pytest.approx(1e-2, rel=0.1)
        alpha = float(by_key[(repr(1e-6), "tikhonov")][2])
        assert alpha == pytest.approx(1e-4)
        # pseudo errors grow while tikhonov errors shrink as eps drops
        pseudo_errs = [float(by_key[(repr(e), "pseudo")][4]) for e in (1e-2, 1e-4, 1e-6)]
        tik_errs = [float(by_key[(repr(e), "tikhonov")][4]) for e in (1e-2, 1e-4, 1e-6)]
        assert pseudo_errs[0] < pseudo_errs[1] < pseudo_errs[2]
        assert tik_errs[0] > tik_errs[1] > tik_errs[2]

    def test_deterministic_output(self, tmp_path, capsys):
        doc = {
            "a": [[1.0, 0.0], [0.0, 1.0]],
            "f": [1.0, 1.0],
            "epsilons": [0.5, 0.25],
            "perturbation": {"mode": "data_vector"},
            "methods": [{"method": "pseudo"}],
            "seed": 3,
        }
        spec = write_spec(tmp_path, doc)
        _, first, _ = run(capsys, "experiment", spec)
        _, second, _ = run(capsys, "experiment", spec)
        assert first == second
        doc["seed"] = 4
        spec2 = write_spec(tmp_path, doc, name="spec2.json")
        _, third, _ = run(capsys, "experiment", spec2)
        assert third != first

    def test_matrix_form_base_system(self, tmp_path, capsys):
        doc = dict(BASE_SPEC)
        del doc["a"], doc["f"]
        doc = {"inputs": [[1.0, 0.0], [0.0, 0.0]], "targets": [[1.0, 1.0]], **doc}
        _, from_matrix, _ = run(capsys, "experiment", write_spec(tmp_path, doc))
        _, from_system, _ = run(capsys, "experiment",
                                write_spec(tmp_path, BASE_SPEC, name="sys.json"))
        assert from_matrix == from_system

    def test_failed_row_continues(self, tmp_path, capsys):
        doc = dict(BASE_SPEC)
        doc["methods"] = [
            {"method": "tikhonov"},  # no alpha: fails per row
            {"method": "pseudo"},
        ]
        spec = write_spec(tmp_path, doc)
        code, out, err = run(capsys, "experiment", spec)
        assert code == 4
        lines = out.strip().splitlines()[1:]
        assert len(lines) == 6
        failed = [l for l in lines if ",FAILED,,," in l]
        assert len(failed) == 3
        assert all(",tikhonov,FAILED" in l for l in failed)
        assert "needs 'alpha'" in err
        # pseudo rows are still complete
        assert sum(",pseudo," in l for l in lines) == 3

    @pytest.mark.parametrize("mangle", [
        lambda d: d.update(epsilons=[]),
        lambda d: d.update(epsilons=[1e-4, 1e-2]),
        lambda d: d.update(epsilons=[1e-2, -1.0]),
        lambda d: d.update(methods=[{"method": "cg"}]),
        lambda d: d.update(methods=[{"method": "tikhonov", "alpha": "eps^9"}]),
        lambda d: d.update(perturbation={"mode": "everything"}),
        lambda d: d.update(perturbation={"mode": "operator_entry", "row": 5, "col": 1}),
        lambda d: d.update(perturbation={"mode": "operator_entry"}),
        lambda d: d.update(seed="zero"),
        lambda d: d.update(reference=[1.0, 0.0, 0.0]),
        lambda d: d.pop("a"),
    ])
    def test_bad_specs_exit_2(self, tmp_path, capsys, mangle):
        doc = json.loads(json.dumps(BASE_SPEC))
        mangle(doc)
        code, _, err = run(capsys, "experiment", write_spec(tmp_path, doc))
        assert code == 2
        assert "ParseError" in err

    def test_invalid_json_exits_2(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        code, _, err = run(capsys, "experiment", str(path))
        assert code == 2
        assert "invalid JSON" in err


class TestColor:
    def _fail(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("1,abc\n")
        return run(capsys, "rank", str(bad))

    def test_plain_when_not_a_tty(self, tmp_path, capsys):
        _, _, err = self._fail(tmp_path, capsys)
        assert "\x1b[" not in err

    def test_red_on_a_tty(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setattr(type(sys.stderr), "isatty", lambda self: True)
        monkeypatch.delenv("NO_COLOR", raising=False)
        _, _, err = self._fail(tmp_path, capsys)
        assert err.startswith("\x1b[31m")

    def test_no_color_wins_over_tty(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setattr(type(sys.stderr), "isatty", lambda self: True)
        monkeypatch.setenv("NO_COLOR", "1")
        _, _, err = self._fail(tmp_path, capsys)
        assert "\x1b[" not in err
