import json

import pytest

from groupwl import catalog, harness
from groupwl.cli import main
from groupwl.io import parse_group, write_group


@pytest.fixture
def files(tmp_path):
    out = {}
    for name in ("C4", "C2xC2", "D8", "Q8"):
        path = tmp_path / f"{name}.mt"
        write_group(catalog.get(name), path)
        out[name] = str(path)
    return out


class TestHarness:
    def test_config_validation(self):
        with pytest.raises(ValueError):
            harness.SuiteConfig(caps={6: 8})
        with pytest.raises(ValueError):
            harness.SuiteConfig(caps={2: 0})

    def test_config_json(self, tmp_path):
        path = tmp_path / "suite.json"
        path.write_text(json.dumps({"max_order": 8, "versions": ["II"], "invariants": ["center"]}))
        cfg = harness.SuiteConfig.from_json(path)
        assert cfg.versions == ("II",) and cfg.invariants == ("center",)

    def test_trivial_group_all_detected(self):
        recs = harness.run_detectability_suite(harness.SuiteConfig(max_order=1))
        assert {r.invariant for r in recs} == set(harness.row_names())
        assert all(r.detected and not r.failed for r in recs)

    def test_small_suite_passes(self):
        cfg = harness.SuiteConfig(max_order=8)
        doc = harness.report(harness.run_detectability_suite(cfg))
        assert doc["summary"]["passed"], doc["summary"]["failures"]
        assert "center@2-II" in doc["summary"]["rows"]

    def test_empty_report(self):
        doc = harness.report([])
        assert harness.exit_code(doc) == 0 and doc["summary"]["rows"] == {}

    def test_one_failure(self):
        rec = harness.DetectabilityRecord("X", "center", 2, "II", False, True, 3, 1)
        doc = harness.report([rec])
        assert harness.exit_code(doc) == 2
        assert doc["summary"]["failures"] == ["X: center@2-II"]

    def test_negative_instance_recorded_as_data(self):
        rec = harness.DetectabilityRecord("X", "derived", 2, "II", False, False, 3, 1)
        assert not rec.failed

    def test_expression_rows(self):
        cfg = harness.SuiteConfig(max_order=8, invariants=("commuting",), expressions=[
            {"name": "commuting", "selectors": ["Id", "Id"], "relators": ["[x1,x2]"],
             "mode": "forall", "k": 2, "version": "II"}])
        recs = harness.run_detectability_suite(cfg)
        assert recs and all(r.detected for r in recs)

    def test_pairs(self):
        cfg = harness.SuiteConfig(max_order=4, pairs=True, caps={2: 8, 3: 8, 4: 8, 5: 8})
        pairs = harness.run_pair_suite(cfg)
        assert [(p.group_a, p.group_b, p.min_k) for p in pairs] == [("C4", "C2xC2", 2)]
        assert harness.minimal_distinguishing_k(catalog.get("D8"), catalog.get("D8"), [2, 3]) is None

    def test_deterministic_bytes(self, tmp_path):
        cfg = dict(max_order=8, invariants=("center", "derived", "fitting"))
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        harness.run_suite(harness.SuiteConfig(out=str(a), **cfg))
        harness.run_suite(harness.SuiteConfig(out=str(b), **cfg))
        assert a.read_bytes() == b.read_bytes()

    def test_directory_catalog(self, tmp_path, files):
        cfg = harness.SuiteConfig(catalog=str(tmp_path), invariants=("center",))
        doc, code = harness.run_suite(cfg)
        assert code == 0 and doc["summary"]["rows"]["center@2-II"]["pass"] == 4

    def test_missing_catalog_is_infra_error(self, tmp_path):
        doc, code = harness.run_suite(harness.SuiteConfig(catalog=str(tmp_path / "nope")))
        assert code == harness.EXIT_INFRA and "error" in doc


class TestCli:
    def test_make_families(self, tmp_path):
        out = tmp_path / "d5.mt"
        assert main(["make", "dihedral", "5", "--out", str(out)]) == 0
        assert parse_group(out).order == 10
        assert main(["make", "abelian", "2", "4", "--out", str(tmp_path / "a.json")]) == 0
        assert parse_group(tmp_path / "a.json").order == 8
        assert main(["make", "catalog", "--name", "Q8", "--out", str(tmp_path / "q8.mt")]) == 0

    def test_make_product(self, tmp_path, files):
        out = tmp_path / "p.mt"
        assert main(["make", "product", "--files", files["C4"], files["D8"], "--out", str(out)]) == 0
        assert parse_group(out).order == 32

    def test_catalog_export(self, tmp_path):
        assert main(["make", "catalog", "--out", str(tmp_path / "cat"), "--max-order", "6"]) == 0
        assert len(list((tmp_path / "cat").iterdir())) == len(catalog.names(max_order=6))

    def test_refine(self, tmp_path, files):
        out = tmp_path / "r.json"
        assert main(["refine", "--k", "2", "--version", "II", "--group", files["D8"], "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["k"] == 2 and len(doc["elementColors"]) == 8

    def test_compare_exit_codes(self, files, capsys):
        assert main(["compare", "--k", "2", "--version", "II", files["D8"], files["Q8"]]) == 3
        assert "round 0" in capsys.readouterr().err
        assert main(["compare", "--k", "2", files["D8"], files["D8"]]) == 0

    def test_game(self, tmp_path, files, capsys):
        assert main(["game", files["C4"], files["C2xC2"], "--pebbles", "3", "--version", "I"]) == 0
        assert "winner: Spoiler" in capsys.readouterr().out
        chain = tmp_path / "chain.json"
        chain.write_text(json.dumps({"G": [[0]], "H": [[0]]}))
        assert main(["game", files["D8"], files["D8"], "--pebbles", "2", "--chain", str(chain),
                     "--config", "1,1"]) == 0
        assert "winner: Duplicator" in capsys.readouterr().out

    def test_invariants(self, tmp_path, files):
        out = tmp_path / "i.json"
        assert main(["invariants", files["D8"], "--select", "center,radical:pi=2,3,socle", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert len(doc["center"]) == 2 and len(doc["pi_radical[2,3]"]) == 8
        assert main(["invariants", files["Q8"], "--all", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["composition_factors"] == ["C2", "C2", "C2"]

    def test_decompose(self, tmp_path, files):
        out = tmp_path / "d.json"
        write_group(catalog.get("D8xC2"), tmp_path / "dc.mt")
        assert main(["decompose", str(tmp_path / "dc.mt"), "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert sorted(f["label"] for f in doc["factors"]) == ["C2", "D8"]
        assert doc["filtration"]["sides"] in (["L", "R"], ["R", "L"])
        assert main(["decompose", files["C4"], "--components", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["components"] is None

    def test_suite(self, tmp_path, capsys):
        out = tmp_path / "rep.json"
        assert main(["suite", "--max-order", "6", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["summary"]["passed"]
        assert "center@2-II" in capsys.readouterr().out

    def test_parse_error_exit(self, tmp_path, capsys):
        bad = tmp_path / "bad.mt"
        bad.write_text("2\n0 1\n1\n")
        assert main(["refine", "--k", "2", "--group", str(bad)]) == 1
        assert "line 3" in capsys.readouterr().err
