import datetime as dt

import numpy as np
import pytest

from restakelab.errors import RenderError
from restakelab.interface.manifest import RunManifest
from restakelab.interface.render import (
    coef_stars,
    regression_table,
    scan_stars,
    stress_text,
    write_artifacts,
)
from restakelab.interface.svgplot import Series, timeseries_svg
from restakelab.interface import ops
from restakelab.stress import run_scenario


@pytest.fixture(scope="module")
def manifest():
    return RunManifest.build("test", [], {"global": 0})


class TestStars:
    def test_coefficient_legend_thresholds(self):
        assert coef_stars(0.0005) == "***"
        assert coef_stars(0.005) == "**"
        assert coef_stars(0.03) == "*"
        assert coef_stars(0.07) == "˙"
        assert coef_stars(0.2) == ""

    def test_scan_legend_thresholds(self):
        assert scan_stars(0.005) == "***"
        assert scan_stars(0.03) == "**"
        assert scan_stars(0.07) == "*"
        assert scan_stars(0.2) == ""


class TestRegressionTable:
    def test_legend_and_layout(self, fixture_frame, manifest):
        fits = ops.regress_models(fixture_frame, (1, 2, 3))
        text = regression_table(fits, "Regression Results", manifest)
        assert "Significance levels: ˙ p < 0.10, * p < 0.05" in text
        assert "(Intercept)" in text
        assert "Observations" in text and "452 451 450" in " ".join(text.split())
        # standard errors in parentheses
        assert "(" in text and ")" in text

    def test_empty_bundle_rejected(self, manifest):
        with pytest.raises(RenderError):
            regression_table({}, "x", manifest)


class TestStressText:
    def test_four_significant_digit_rendering(self, linea_scenario, manifest):
        result = run_scenario(None, linea_scenario)
        text = stress_text(linea_scenario, result, manifest)
        assert "0.002296" in text  # local coverage at 4 significant digits
        assert "0.08092" in text
        assert "0.00764" in text
        assert "liquidatable           yes" in text


class TestWriteArtifacts:
    def test_empty_bundle_errors_without_writing(self, tmp_path):
        target = tmp_path / "out"
        with pytest.raises(RenderError):
            write_artifacts(target, {})
        assert not target.exists()

    def test_empty_file_content_rejected(self, tmp_path):
        target = tmp_path / "out"
        with pytest.raises(RenderError):
            write_artifacts(target, {"a.txt": "ok", "b.txt": ""})
        assert not target.exists()

    def test_writes_all_files(self, tmp_path):
        target = tmp_path / "out"
        written = write_artifacts(target, {"a.txt": "alpha\n", "sub/b.txt": "beta\n"})
        assert sorted(p.name for p in written) == ["a.txt", "b.txt"]
        assert (target / "sub" / "b.txt").read_text() == "beta\n"


class TestSvg:
    def test_event_lines_counted(self):
        dates = tuple(dt.date(2024, 1, 1) + dt.timedelta(days=i) for i in range(50))
        values = tuple(float(i) for i in range(50))
        events = (dates[5], dates[10], dates[20], dates[30])
        svg = timeseries_svg(dates, [Series("x", values)], "Test", event_dates=events)
        assert svg.count('class="event-line"') == 4
        assert svg.count("stroke-dasharray") == 4

    def test_event_outside_window_ignored(self):
        dates = tuple(dt.date(2024, 1, 1) + dt.timedelta(days=i) for i in range(10))
        svg = timeseries_svg(
            dates,
            [Series("x", tuple(range(10)))],
            "Test",
            event_dates=(dt.date(2030, 1, 1),),
        )
        assert 'class="event-line"' not in svg

    def test_byte_determinism(self):
        dates = tuple(dt.date(2024, 1, 1) + dt.timedelta(days=i) for i in range(30))
        rng = np.random.default_rng(0)
        values = tuple(rng.standard_normal(30))
        a = timeseries_svg(dates, [Series("x", values)], "Test")
        b = timeseries_svg(dates, [Series("x", values)], "Test")
        assert a == b

    def test_multi_series(self):
        dates = tuple(dt.date(2024, 1, 1) + dt.timedelta(days=i) for i in range(10))
        svg = timeseries_svg(
            dates,
            [Series("a", tuple(range(10))), Series("b", tuple(range(10, 20)))],
            "Two",
        )
        assert svg.count("<polyline") == 2


class TestManifest:
    def test_deterministic_timestamp(self, tmp_path, monkeypatch):
        monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
        a = RunManifest.build("x", [], {})
        b = RunManifest.build("x", [], {})
        assert a == b
        assert a.timestamp == "1970-01-01T00:00:00Z"

    def test_source_date_epoch_honored(self, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
        manifest = RunManifest.build("x", [], {})
        assert manifest.timestamp == "2023-11-14T22:13:20Z"

    def test_input_hashes(self, tmp_path):
        f = tmp_path / "config.json"
        f.write_text("{}", encoding="utf-8")
        manifest = RunManifest.build("x", [f], {"global": 3})
        assert str(f) in manifest.input_hashes
        assert manifest.seeds == {"global": 3}
