import io as _io
import json
import os

import pytest

from semistrict import io
from semistrict.cli import main

ROOT = os.path.join(os.path.dirname(__file__), "..", "corpus")


def path(*parts):
    return os.path.join(ROOT, *parts)


def run(*argv):
    buf = _io.StringIO()
    code = main(list(argv) + ["--json"], stdout=buf)
    return code, json.loads(buf.getvalue())


def orders(pis):
    return [p["order"] for p in pis]


def test_homotopy_examples():
    assert orders(run("homotopy", path("n1", "disc_Z2.json"))[1]["pi"]) == [2, 1]
    assert orders(run("homotopy", path("n1", "one_Z2.json"))[1]["pi"]) == [1, 2]
    assert orders(run("homotopy", path("n2", "one_Z2_tensor_disc.json"))[1]["pi"]) == [1, 2, 1]


def test_compare_examples():
    code, out = run("compare", path("n1", "pair_Z2.json"), path("n1", "disc_1.json"))
    assert code == 0 and out["isomorphic"]
    code, out = run("compare", path("n1", "one_Z2.json"), path("n1", "disc_Z2.json"))
    assert code == 1 and not out["isomorphic"]


@pytest.mark.parametrize("argv, code", [
    (("validate", "n2/running2.json"), 0),
    (("validate", "weq/weq00.json"), 0),
    (("validate", "invalid/s3_trivial_operators.json"), 1),
    (("validate", "invalid/malformed.json"), 2),
    (("validate", "n2/missing.json"), 2),
    (("segal", "n2/running2.json"), 0),
    (("check-contractible", "n1/pair_Z2.json"), 0),
    (("check-contractible", "n1/one_Z2.json"), 1),
    (("check-special", "n2/running2.json"), 1),
    (("check-special", "n2/disc2_Z3.json"), 0),
    (("specialize", "n2/running2.json"), 0),
    (("globularize", "n2/disc2_Z3.json"), 0),
    (("globularize", "n2/running2.json"), 1),
    (("deloop", "n2/disc2_Z3.json"), 0),
    (("deloop", "n2/running2.json"), 1),
    (("pipeline", "invalid/infeasible_pair_S3.json"), 3),
])
def test_exit_codes(argv, code):
    cmd, rel = argv
    assert run(cmd, path(*rel.split("/")))[0] == code


def test_validate_error_reports_witness():
    code, out = run("validate", path("invalid", "s3_trivial_operators.json"))
    assert code == 1 and out["error"] == "AxiomIII" and len(out["info"]["witness"]) == 2


def test_infeasible_reports_stage_and_level():
    code, out = run("pipeline", path("invalid", "infeasible_pair_S3.json"))
    assert code == 3 and out["info"]["stage"] == "D_n" and out["info"]["level"] == 0


def test_pipeline_running_example_with_covers_file(tmp_path):
    out_file = tmp_path / "report.json"
    code, out = run("pipeline", path("n2", "running2.json"), "--covers", path("covers", "running2_stage1.json"),
                    "--out", str(out_file))
    assert code == 0 and out["ok"] and all(out["verification"].values())
    kind, rep = io.load(out_file)
    assert kind == "report" and rep["ok"]
    assert "timings" not in out


def test_pipeline_globular_input_is_unchanged():
    code, out = run("pipeline", path("n2", "disc2_Z3.json"))
    sp = next(s for s in out["stages"] if s["stage"] == "Sp")
    assert code == 0 and sp["unchanged"]
    dn = next(s for s in out["stages"] if s["stage"] == "D_n")
    assert set(dn["levels"].values()) == {3} and not dn["identity_defects"]
    assert out["pis"]["Sp"] == out["pis"]["D_n"] == out["pis"]["V_n"] == out["pis"]["input"]


@pytest.mark.parametrize("rel", ["n2/running2.json", "n3/running3.json"])
def test_pipeline_seed_adds_property_check(rel):
    for seed in range(4):
        code, out = run("pipeline", path(*rel.split("/")), "--seed", str(seed))
        assert code == 0 and out["verification"]["tau1_fibre_product"], seed


def test_deloop_tower_output_validates(tmp_path):
    f = tmp_path / "tower.json"
    assert run("deloop", path("n2", "disc2_Z3.json"), "--out", str(f))[0] == 0
    for mode in ("T", "H"):
        assert run("validate", str(f), "--mode", mode)[0] == 0


def test_specialize_output_is_special(tmp_path):
    f = tmp_path / "sp.json"
    assert run("specialize", path("n2", "running2.json"), "--out", str(f))[0] == 0
    assert run("check-special", str(f))[0] == 0
