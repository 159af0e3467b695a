import json

import numpy as np
import pytest

from fxrange.affine import Interval
from fxrange.analysis import VARIABLES
from fxrange.bitwidth import FixedPointFormat
from fxrange.data import (
    Dataset,
    DatasetError,
    ReportSchemaError,
    RunConfig,
    gen_synthetic,
    init_weights,
    load_csv,
    read_report,
    report_to_dict,
    write_report,
    write_trace_csv,
)

from conftest import make_config
from fxrange.pipeline import aa_pipeline


class TestRunConfig:
    def test_round_trip(self):
        cfg = make_config(4, 5, 3, seed=9)
        assert RunConfig.from_dict(cfg.to_dict()) == cfg

    def test_unknown_field_rejected(self):
        with pytest.raises(ReportSchemaError):
            RunConfig.from_dict({"n": 1, "n_hidden": 1, "m": 1, "bogus": 2})

    def test_bad_dimensions_rejected(self):
        with pytest.raises(DatasetError):
            RunConfig(n=0, n_hidden=1, m=1)
        with pytest.raises(DatasetError):
            RunConfig(n=1, n_hidden=1, m=1, frac_bits=-1)


class TestInitWeights:
    def test_deterministic_per_seed(self):
        a1, b1 = init_weights(3, 4, 5)
        a2, b2 = init_weights(3, 4, 5)
        np.testing.assert_array_equal(a1, a2)
        np.testing.assert_array_equal(b1, b2)
        a3, _ = init_weights(4, 4, 5)
        assert not np.array_equal(a1, a3)

    def test_shapes_and_range(self):
        alpha, bias = init_weights(0, 6, 7)
        assert alpha.shape == (6, 7) and bias.shape == (7,)
        assert alpha.min() >= -1.0 and alpha.max() <= 1.0
        assert bias.min() >= -1.0 and bias.max() <= 1.0


class TestSynthetic:
    def test_split_sizes(self):
        ds = gen_synthetic(0, 3, 2, (10, 20, 5))
        assert ds.initial_x.shape == (10, 3) and ds.online_x.shape == (20, 3)
        assert ds.test_x.shape == (5, 3)

    def test_targets_in_unit_interval(self):
        ds = gen_synthetic(1, 4, 3, (30, 60, 10))
        for t in (ds.initial_t, ds.online_t, ds.test_t):
            assert t.min() >= 0.0 and t.max() <= 1.0

    def test_deterministic(self):
        a = gen_synthetic(5, 2, 2, (5, 5, 1))
        b = gen_synthetic(5, 2, 2, (5, 5, 1))
        np.testing.assert_array_equal(a.online_x, b.online_x)
        np.testing.assert_array_equal(a.online_t, b.online_t)

    def test_empty_split_rejected(self):
        with pytest.raises(DatasetError):
            Dataset(*(np.zeros((0, 2)),) * 6)


class TestLoadCsv:
    def _write(self, path, rows, n=2):
        lines = [",".join([f"f{i}" for i in range(n)] + ["label"])]
        lines += [",".join(str(v) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n")

    def test_normalization_and_one_hot(self, tmp_path):
        p = tmp_path / "d.csv"
        self._write(p, [[0.0, 10.0, 0], [2.0, 30.0, 1], [1.0, 20.0, 2], [2.0, 10.0, 0]])
        ds = load_csv(p, 2, 3, (2, 2, 0))
        # stats come from the 4 initial+online rows: col0 in [0,2], col1 in [10,30]
        np.testing.assert_allclose(ds.initial_x, [[0.0, 0.0], [1.0, 1.0]])
        np.testing.assert_allclose(ds.online_x, [[0.5, 0.5], [1.0, 0.0]])
        np.testing.assert_array_equal(ds.initial_t, [[1, 0, 0], [0, 1, 0]])
        np.testing.assert_array_equal(ds.online_t, [[0, 0, 1], [1, 0, 0]])

    def test_constant_column_maps_to_zero(self, tmp_path):
        p = tmp_path / "d.csv"
        self._write(p, [[5.0, 1.0, 0], [5.0, 2.0, 1]])
        ds = load_csv(p, 2, 2, (1, 1, 0))
        assert ds.initial_x[0, 0] == 0.0 and ds.online_x[0, 0] == 0.0

    def test_label_out_of_range(self, tmp_path):
        p = tmp_path / "d.csv"
        self._write(p, [[0.0, 1.0, 5]])
        with pytest.raises(DatasetError, match="label 5"):
            load_csv(p, 2, 3, (1, 0, 0))

    def test_bad_column_count(self, tmp_path):
        p = tmp_path / "d.csv"
        self._write(p, [[0.0, 0]], n=1)
        with pytest.raises(DatasetError, match="columns"):
            load_csv(p, 2, 3, (1, 0, 0))

    def test_not_enough_rows(self, tmp_path):
        p = tmp_path / "d.csv"
        self._write(p, [[0.0, 1.0, 0]])
        with pytest.raises(DatasetError, match="rows"):
            load_csv(p, 2, 3, (5, 5, 0))

    def test_non_numeric_feature(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("f0,f1,label\nx,1.0,0\n")
        with pytest.raises(DatasetError):
            load_csv(p, 2, 3, (1, 0, 0))

    def test_empty_file(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("")
        with pytest.raises(DatasetError, match="empty"):
            load_csv(p, 2, 3, (1, 0, 0))


@pytest.fixture(scope="module")
def pipeline_report():
    cfg = make_config(4, 5, 3, seed=7, initial=30, online=30)
    report, table, _, _ = aa_pipeline(cfg)
    return cfg, report, table


class TestReportJson:
    def test_round_trip_bit_exact(self, tmp_path, pipeline_report):
        cfg, report, table = pipeline_report
        path = tmp_path / "r.json"
        write_report(path, report, table, cfg)
        report2, table2, cfg2, counters = read_report(path)
        assert cfg2 == cfg
        assert counters is None
        assert table2 == table
        for name in VARIABLES:
            assert report2[name] == report[name]  # exact, not approximate

    def test_counters_preserved(self, tmp_path, pipeline_report):
        cfg, report, table = pipeline_report
        path = tmp_path / "r.json"
        write_report(path, report, table, cfg, counters={"overflows": 3})
        *_, counters = read_report(path)
        assert counters == {"overflows": 3}

    def test_missing_variable_rejected(self, tmp_path, pipeline_report):
        cfg, report, table = pipeline_report
        doc = report_to_dict(report, table, cfg)
        del doc["variables"]["gamma5"]
        path = tmp_path / "r.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ReportSchemaError, match="gamma5"):
            read_report(path)

    def test_unknown_top_level_key_rejected(self, tmp_path, pipeline_report):
        cfg, report, table = pipeline_report
        doc = report_to_dict(report, table, cfg)
        doc["extra"] = 1
        path = tmp_path / "r.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ReportSchemaError, match="extra"):
            read_report(path)

    def test_unknown_variable_key_rejected(self, tmp_path, pipeline_report):
        cfg, report, table = pipeline_report
        doc = report_to_dict(report, table, cfg)
        doc["variables"]["h"]["note"] = "hi"
        path = tmp_path / "r.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ReportSchemaError, match="note"):
            read_report(path)

    def test_schema_shape(self, pipeline_report):
        cfg, report, table = pipeline_report
        doc = report_to_dict(report, table, cfg)
        assert set(doc) == {"config", "variables", "counters"}
        entry = doc["variables"]["P"]
        assert set(entry) == {"interval", "signed", "int_bits", "frac_bits"}
        assert entry["interval"] == [report["P"].lo, report["P"].hi]


class TestTraceCsv:
    def test_columns_and_count(self, tmp_path):
        from fxrange.analysis import HypothesisTrace

        trace = HypothesisTrace({"h": [(0.0, 1.0), (0.25, 0.75)], "e": [(-1.0, 1.0), (-0.5, 0.5)]})
        path = tmp_path / "t.csv"
        rows = write_trace_csv(path, trace)
        assert rows == 4
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "step,variable,min,max"
        assert lines[1] == "1,h,0.0,1.0"
