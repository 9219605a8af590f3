"""Schema round trips and CLI behaviour (commands, formats, exit codes)."""

import json
import os
from pathlib import Path

import numpy as np
import pytest

from charfock.cli import main
from charfock.examples import build_example_lifting
from charfock.randomgen import case_rng, random_colligation, random_minimal_lifting
from charfock.rowcon import RowContraction, char_symbol
from charfock.schemas import (
    SchemaError,
    colligation_from_json,
    colligation_to_json,
    dump_json,
    lifting_from_json,
    lifting_to_json,
    matrix_from_json,
    matrix_to_json,
    rowcon_from_json,
    rowcon_to_json,
    series_from_json,
    series_to_json,
)

DATA = Path(__file__).parent / "data"


class TestSchemas:
    def test_matrix_round_trip(self):
        rng = case_rng(701, 0)
        m = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
        again = matrix_from_json(matrix_to_json(m))
        np.testing.assert_array_equal(m, again)

    def test_rowcon_round_trip(self):
        t = RowContraction((np.array([[0.1 + 0.2j]]), np.array([[0.3]])))
        doc = rowcon_to_json(t)
        again = rowcon_from_json(json.loads(dump_json(doc)))
        for b1, b2 in zip(t.blocks, again.blocks):
            np.testing.assert_array_equal(b1, b2)

    def test_series_round_trip(self):
        s = char_symbol(RowContraction((np.array([[0.5]]),)), 5)
        doc = series_to_json(s)
        again = series_from_json(json.loads(dump_json(doc)))
        for w in s.words():
            np.testing.assert_array_equal(s.coeff(w), again.coeff(w))

    def test_colligation_round_trip(self):
        w = random_colligation(case_rng(702, 0), 2, 2, 2, 1)
        again = colligation_from_json(colligation_to_json(w))
        np.testing.assert_array_equal(w.matrix(), again.matrix())

    def test_lifting_round_trips_both_forms(self):
        lifted = random_minimal_lifting(case_rng(703, 0), 2, 2, 2)
        again = lifting_from_json(lifting_to_json(lifted))
        assert np.max(np.abs(again.E().row() - lifted.E().row())) <= 1e-9
        split_doc = {
            "E": rowcon_to_json(lifted.E()),
            "split": lifted.dim_c,
        }
        again2 = lifting_from_json(split_doc)
        np.testing.assert_array_equal(again2.E().row(), lifted.E().row())

    def test_split_form_requires_exact_zeros(self):
        lifted = build_example_lifting("5.2")
        doc = {"E": rowcon_to_json(lifted.E()), "split": 1}
        doc["E"]["blocks"][0]["data"][1] = [1e-14, 0.0]  # upper-right entry
        with pytest.raises(SchemaError):
            lifting_from_json(doc)

    def test_bad_scalar_rejected(self):
        with pytest.raises(SchemaError):
            matrix_from_json({"rows": 1, "cols": 1, "data": [[1.0]]})


def run_cli(*argv):
    return main(list(argv))


class TestCli:
    def test_charfn_writes_series(self, tmp_path, capsys):
        out = tmp_path / "series.json"
        code = run_cli(
            "charfn", str(DATA / "rowcon_half.json"),
            "--degree", "6", "--format", "json", "--output", str(out),
        )
        assert code == 0
        doc = json.loads(out.read_text())
        series = series_from_json(doc["series"])
        np.testing.assert_allclose(series.coeff(()), [[-0.5]])
        assert doc["cnc"] is True

    def test_examples_52_report(self, capsys):
        code = run_cli("examples", "--which", "5.2", "--tol", "1e-10")
        captured = capsys.readouterr().out
        assert code == 0
        assert "0.816496" in captured  # sqrt(2/3), the constant coefficient
        assert "ok: true" in captured

    def test_examples_all_pass(self, capsys):
        assert run_cli("examples", "--which", "all") == 0
        capsys.readouterr()

    def test_check_coisom_on_defect_colligation(self, capsys):
        code = run_cli("check", "coisom", str(DATA / "colligation_defect_half.json"))
        capsys.readouterr()
        assert code == 0

    def test_check_minimal_and_resolving(self, capsys):
        assert run_cli("check", "minimal", str(DATA / "lifting_53.json")) == 0
        assert run_cli("check", "resolving", str(DATA / "lifting_53.json")) == 0
        assert run_cli("check", "cnc", str(DATA / "rowcon_half.json")) == 0
        capsys.readouterr()

    def test_malformed_json_exits_2(self, capsys):
        code = run_cli("charfn", str(DATA / "malformed.json"))
        capsys.readouterr()
        assert code == 2

    def test_missing_file_exits_2(self, capsys):
        code = run_cli("charfn", str(DATA / "missing.json"))
        capsys.readouterr()
        assert code == 2

    def test_lift_charfn_both_methods_agree(self, capsys):
        code = run_cli(
            "lift-charfn", str(DATA / "lifting_53.json"),
            "--method", "both", "--degree", "8",
        )
        capsys.readouterr()
        assert code == 0

    def test_equiv_confirmed_and_refuted(self, capsys):
        assert (
            run_cli(
                "equiv",
                str(DATA / "series_half.json"),
                str(DATA / "series_half_rotated.json"),
            )
            == 0
        )
        assert (
            run_cli(
                "equiv",
                str(DATA / "series_half.json"),
                str(DATA / "series_half_scaled.json"),
            )
            == 1
        )
        capsys.readouterr()

    def test_coincide_confirmed(self, capsys):
        code = run_cli(
            "coincide",
            str(DATA / "series_half.json"),
            str(DATA / "series_half_rotated.json"),
            "--seed", "7",
        )
        capsys.readouterr()
        assert code == 0

    def test_mobius_on_lifting(self, capsys):
        code = run_cli(
            "mobius", str(DATA / "lifting_53.json"), "--a", "0.4",
            "--samples", "0,0.3,-0.3", "--degree", "40",
        )
        capsys.readouterr()
        assert code == 0

    def test_mobius_on_contraction(self, capsys):
        code = run_cli(
            "mobius", str(DATA / "rowcon_half.json"), "--a", "0.3",
            "--samples", "0,0.2j",
        )
        capsys.readouterr()
        assert code == 0

    def test_proptest_small(self, capsys):
        code = run_cli(
            "proptest", "--suite", "rowcon", "--cases", "3", "--seed", "42",
            "--format", "json",
        )
        out = capsys.readouterr().out
        assert code == 0
        doc = json.loads(out)
        assert doc["ok"] is True
        assert all(p["failures"] == 0 for p in doc["properties"])

    def test_proptest_zero_cases_vacuous(self, capsys):
        code = run_cli("proptest", "--suite", "lifting", "--cases", "0")
        capsys.readouterr()
        assert code == 0

    def test_reports_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        for out in (out1, out2):
            assert (
                run_cli(
                    "proptest", "--suite", "mobius", "--cases", "2",
                    "--seed", "9", "--format", "json", "--output", str(out),
                )
                == 0
            )
        assert out1.read_bytes() == out2.read_bytes()

    def test_env_seed_override(self, capsys, monkeypatch):
        monkeypatch.setenv("CHARFOCK_SEED", "123")
        code = run_cli(
            "proptest", "--suite", "rowcon", "--cases", "1",
            "--seed", "42", "--format", "json",
        )
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["seed"] == 123

    def test_transfer_command(self, capsys):
        code = run_cli(
            "transfer", str(DATA / "colligation_defect_half.json"),
            "--format", "json",
        )
        out = capsys.readouterr().out
        assert code == 0
        doc = json.loads(out)
        assert doc["coisometric"] is True
        series = series_from_json(doc["series"])
        np.testing.assert_allclose(series.coeff(()), [[-0.5]])
