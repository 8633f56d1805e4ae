import json

import numpy as np
import pytest

from excir import io as eio
from excir.core import cir_scores
from excir.data import GroupFamily
from excir.errors import (InvalidGroup, IoError, ParseError, SchemaError, UnknownColumn,
                          UnknownFeature)
from excir.transfer import TransferConfig, pareto_knee, run_transfer

from synthetic import regression_table


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestLoadTable:
    def test_basic(self, tmp_path):
        p = write(tmp_path, "d.csv", "x1,x2,y\n1,2,3\n4,5,6\n7,8,9.5\n")
        t = eio.load_table(p, "y")
        assert (t.n, t.d) == (3, 2)
        assert t.feature_names == ("x1", "x2")
        np.testing.assert_array_equal(t.outputs["y"], [3, 6, 9.5])

    def test_class_columns(self, tmp_path):
        p = write(tmp_path, "d.csv", "a,c0,b,c1\n1,0,2,1\n3,1,4,0\n")
        t = eio.load_table(p, class_columns=["c0", "c1"])
        assert t.feature_names == ("a", "b") and set(t.outputs) == {"c0", "c1"}

    def test_blank_cell(self, tmp_path):
        p = write(tmp_path, "d.csv", "x1,x2,y\n1,2,3\n4,,6\n")
        with pytest.raises(ParseError) as e:
            eio.load_table(p, "y")
        assert e.value.line == 3 and e.value.column == "x2"
        assert "line 3" in str(e.value) and "x2" in str(e.value)

    @pytest.mark.parametrize("cell", ["abc", "nan", "inf", "1,5"])
    def test_bad_cells(self, tmp_path, cell):
        p = write(tmp_path, "d.csv", f'x1,y\n"{cell}",3\n')
        with pytest.raises(ParseError):
            eio.load_table(p, "y")

    def test_ragged(self, tmp_path):
        p = write(tmp_path, "d.csv", "x1,x2,y\n1,2,3\n4,5\n")
        with pytest.raises(ParseError) as e:
            eio.load_table(p, "y")
        assert e.value.line == 3

    def test_duplicate_header(self, tmp_path):
        p = write(tmp_path, "d.csv", "x1,x1,y\n1,2,3\n")
        with pytest.raises(SchemaError):
            eio.load_table(p, "y")

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoError):
            eio.load_table(tmp_path / "nope.csv", "y")

    def test_unknown_target(self, tmp_path):
        p = write(tmp_path, "d.csv", "x1,y\n1,2\n")
        with pytest.raises(UnknownColumn):
            eio.load_table(p, "z")


class TestGroupsAndWeights:
    def test_groups(self, tmp_path):
        p = write(tmp_path, "g.json", json.dumps({"groups": {"g1": ["x1", "x2"]}}))
        fam = eio.load_groups(p, ["x1", "x2", "x3"])
        assert fam.groups == {"g1": (0, 1)}

    def test_unknown_feature(self, tmp_path):
        p = write(tmp_path, "g.json", json.dumps({"groups": {"g1": ["x9"]}}))
        with pytest.raises(UnknownFeature) as e:
            eio.load_groups(p, ["x1"])
        assert e.value.name == "x9"

    def test_overlap_allowed(self, tmp_path):
        p = write(tmp_path, "g.json", json.dumps({"groups": {"a": ["x1", "x2"], "b": ["x1"]}}))
        fam = eio.load_groups(p, ["x1", "x2"])
        assert fam.groups == {"a": (0, 1), "b": (0,)}

    def test_empty_group(self, tmp_path):
        p = write(tmp_path, "g.json", json.dumps({"groups": {"a": []}}))
        with pytest.raises(InvalidGroup):
            eio.load_groups(p, ["x1"])

    def test_schema(self, tmp_path):
        p = write(tmp_path, "g.json", json.dumps({"a": ["x1"]}))
        with pytest.raises(SchemaError):
            eio.load_groups(p, ["x1"])

    def test_weights(self, tmp_path):
        p = write(tmp_path, "w.csv", "w\n1\n0.5\n2\n")
        np.testing.assert_array_equal(eio.load_weights(p, 3), [1, 0.5, 2])
        p2 = write(tmp_path, "w2.csv", "1\n2\n")
        np.testing.assert_array_equal(eio.load_weights(p2, 2), [1, 2])
        with pytest.raises(SchemaError):
            eio.load_weights(p2, 3)


@pytest.fixture
def report():
    t, _ = regression_table(500, d=10, informative=3, seed=0)
    t = t.with_output("y", t.outputs["y"])
    X = np.column_stack([t.X, np.ones(t.n)])
    from excir.data import DataTable
    t = DataTable(X, t.feature_names + ("const",), t.outputs)
    return cir_scores(t, "y", GroupFamily({"g": [0, 1], "h": [2]}))


class TestEmit:
    def test_json_roundtrip(self, report, tmp_path):
        path = tmp_path / "r.json"
        text = eio.emit_report(report, "json", path)
        doc = json.loads(path.read_text())
        assert text == path.read_text()
        assert doc["meta"]["rows_used"] == 500
        assert doc["meta"]["centering"] == {"method": "midmean", "source": "exact"}
        names = [f["name"] for f in doc["features"]]
        assert names == report.ranks
        assert [f["rank"] for f in doc["features"]] == list(range(1, 12))
        parsed = eio.load_scores(path)
        for s in report.features:
            assert parsed[s.name] == pytest.approx(s.cir, rel=1e-11)
        again = eio.reports_text([report], "json")
        assert again == text

    def test_ratio_identity_and_neutral(self, report):
        doc = eio.report_to_dict(report)
        for row in doc["features"] + doc["groups"]:
            if not row["neutral"]:
                assert row["cir"] == pytest.approx((1 + row["ratio_nd"]) / 2, abs=1e-11)
        const = [r for r in doc["features"] if r["name"] == "const"][0]
        assert const["neutral"] is True and const["cir"] == 0.5

    def test_csv_roundtrip_sorted(self, report, tmp_path):
        path = tmp_path / "r.csv"
        eio.emit_report(report, "csv", path)
        lines = path.read_text().splitlines()
        assert lines[0] == "kind,name,cir,ratio_nd,neutral,rank"
        feat_names = [ln.split(",")[1] for ln in lines[1:] if ln.startswith("feature")]
        assert feat_names == report.ranks
        assert sum(ln.startswith("group") for ln in lines) == 2
        parsed = eio.load_scores(path)
        assert parsed == eio.load_scores(path)
        for s in report.features:
            assert parsed[s.name] == pytest.approx(s.cir, rel=1e-11)

    def test_curve_csv_columns(self, tmp_path):
        t, _ = regression_table(800, d=10, informative=3, seed=1)
        curve = run_transfer(t, "y", config=TransferConfig((0.5,), k=4))
        text = eio.emit_report(curve, "csv")
        header, *rows = text.splitlines()
        assert header.split(",") == list(eio.CURVE_COLUMNS)
        assert len(rows) == 2
        doc = json.loads(eio.curve_text(curve, "json", pareto_knee(curve, 0.5), 0.5))
        assert doc["knee"]["target_jaccard"] == 0.5
        assert [r["fraction"] for r in doc["curve"]] == [0.5, 1.0]
        assert len(doc["runs"][0]["features"]) == 10

    def test_unwritable(self, report, tmp_path):
        with pytest.raises(IoError):
            eio.emit_report(report, "json", tmp_path / "missing" / "r.json")
