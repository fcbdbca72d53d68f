import json
import math
import threading
import xml.etree.ElementTree as ET
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from hailchi.cli import EXIT_DATA, EXIT_OK, main
from hailchi.data import laurel_storm_path
from hailchi.report import report_from_json

SVG_NS = "{http://www.w3.org/2000/svg}"


def svg_root(path):
    return ET.parse(path).getroot()  # raises on malformed XML


def count_long_line_paths(root, min_segments=40):
    """Data series render as line2d groups holding one long inline path."""
    count = 0
    for g in root.iter(f"{SVG_NS}g"):
        if g.attrib.get("id", "").startswith("line2d"):
            for p in g.iter(f"{SVG_NS}path"):
                if p.attrib.get("d", "").count("L") >= min_segments:
                    count += 1
    return count


def count_marker_series(root, min_markers=20):
    """Marker-only series render as line2d groups holding many <use> refs."""
    count = 0
    for g in root.iter(f"{SVG_NS}g"):
        if g.attrib.get("id", "").startswith("line2d"):
            if len(list(g.iter(f"{SVG_NS}use"))) >= min_markers:
                count += 1
    return count


@pytest.fixture()
def fitted_dir(tmp_path):
    out = tmp_path / "run"
    rc = main(["fit", "--input", str(laurel_storm_path()), "--out", str(out),
               "--single-storm"])
    assert rc == EXIT_OK
    return out


class TestCluster:
    def test_fixture_is_one_storm(self, tmp_path, capsys):
        rc = main(["cluster", "--input", str(laurel_storm_path()), "--out", str(tmp_path)])
        assert rc == EXIT_OK
        mapping = json.loads((tmp_path / "clusters.json").read_text())
        assert len(mapping) == 46
        assert set(mapping.values()) == {0}
        assert "storm 0: 46 events" in capsys.readouterr().out

    def test_two_shifted_copies_are_two_storms(self, tmp_path):
        text = laurel_storm_path().read_text()
        header, *rows = text.strip().split("\n")
        shifted = []
        for row in rows:
            t, lon, lat, prob = row.split(",")
            shifted.append(f"{t},{float(lon) + 10.0},{lat},{prob}")
        double = tmp_path / "double.csv"
        double.write_text("\n".join([header, *rows, *shifted]) + "\n")
        rc = main(["cluster", "--input", str(double), "--out", str(tmp_path)])
        assert rc == EXIT_OK
        mapping = json.loads((tmp_path / "clusters.json").read_text())
        labels = [mapping[str(i)] for i in range(92)]
        assert set(labels[:46]) == {0} and set(labels[46:]) == {1}

    def test_empty_input_is_data_error(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("ZTIME,LON,LAT,PROB\n")
        rc = main(["cluster", "--input", str(empty), "--out", str(tmp_path)])
        assert rc == EXIT_DATA

    def test_missing_file_is_data_error(self, tmp_path):
        rc = main(["cluster", "--input", str(tmp_path / "nope.csv"), "--out", str(tmp_path)])
        assert rc == EXIT_DATA


class TestFit:
    def test_reference_values_in_report(self, fitted_dir):
        report = report_from_json((fitted_dir / "storm0.json").read_text())
        assert report.event_count == 46
        assert report.metric == "covariance"
        assert report.chi.lambda_hat == pytest.approx(7.308, abs=0.02)
        assert report.chi.sse == pytest.approx(0.067, abs=0.002)
        assert report.lognormal.mu_hat == pytest.approx(-1.862, abs=0.01)
        assert report.lognormal.sigma_hat == pytest.approx(0.6227, abs=0.005)
        assert report.lognormal.sse == pytest.approx(0.0483, abs=0.001)
        assert report.lognormal_euclidean.sse == pytest.approx(0.045, abs=0.002)
        assert 0.112 < report.gof.p_value < 0.172

    def test_report_json_round_trip(self, fitted_dir):
        from hailchi.report import report_to_json

        text = (fitted_dir / "storm0.json").read_text()
        report = report_from_json(text)
        assert report_from_json(report_to_json(report)) == report

    def test_artifacts_exist_and_svg_structure(self, fitted_dir):
        cdf = svg_root(fitted_dir / "cdf0.svg")
        assert count_long_line_paths(cdf) == 3  # empirical step + two fitted curves
        qq = svg_root(fitted_dir / "qq0.svg")
        assert count_marker_series(qq) == 2  # chi and log-normal point series
        contours = svg_root(fitted_dir / "contours0.svg")
        assert count_long_line_paths(contours) == 4  # one ring per level
        scatter_groups = [g for g in contours.iter(f"{SVG_NS}g")
                          if g.attrib.get("id", "").startswith("PathCollection")]
        assert len(scatter_groups) == 1
        assert len(list(scatter_groups[0].iter(f"{SVG_NS}use"))) == 46

    def test_byte_identical_reruns(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            rc = main(["fit", "--input", str(laurel_storm_path()), "--out", str(out),
                       "--single-storm"])
            assert rc == EXIT_OK
        for name in ("storm0.json", "cdf0.svg", "qq0.svg", "contours0.svg", "fit_run.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_requires_clusters_or_single_storm_flag(self, tmp_path):
        rc = main(["fit", "--input", str(laurel_storm_path()), "--out", str(tmp_path)])
        assert rc == EXIT_DATA

    def test_uses_clusters_json(self, tmp_path):
        rc = main(["cluster", "--input", str(laurel_storm_path()), "--out", str(tmp_path)])
        assert rc == EXIT_OK
        rc = main(["fit", "--input", str(laurel_storm_path()), "--out", str(tmp_path)])
        assert rc == EXIT_OK
        assert (tmp_path / "storm0.json").exists()

    def test_two_event_storm_skipped_with_note(self, tmp_path, capsys):
        csv = tmp_path / "two.csv"
        csv.write_text("ZTIME,LON,LAT,PROB\n"
                       "2010-01-20T12:00:00Z,-89.0,31.0,0.5\n"
                       "2010-01-20T12:05:00Z,-89.1,31.1,0.5\n")
        rc = main(["fit", "--input", str(csv), "--out", str(tmp_path), "--single-storm"])
        assert rc == EXIT_OK
        assert not (tmp_path / "storm0.json").exists()
        note = json.loads((tmp_path / "fit_run.json").read_text())
        assert note["storms_fitted"] == 0
        assert note["skipped"][0]["storm"] == 0
        assert note["skipped"][0]["events"] == 2
        assert "skipped" in capsys.readouterr().out

    def test_metric_flag_mahalanobis(self, tmp_path):
        rc = main(["fit", "--input", str(laurel_storm_path()), "--out", str(tmp_path),
                   "--single-storm", "--metric", "mahalanobis"])
        assert rc == EXIT_OK
        report = report_from_json((tmp_path / "storm0.json").read_text())
        assert report.metric == "mahalanobis"
        # the proper inverse-covariance distance gives a unit-scale fit
        assert report.chi.lambda_hat == pytest.approx(1.136, abs=0.01)

    def test_fits_subset(self, tmp_path):
        rc = main(["fit", "--input", str(laurel_storm_path()), "--out", str(tmp_path),
                   "--single-storm", "--fits", "chi"])
        assert rc == EXIT_OK
        report = report_from_json((tmp_path / "storm0.json").read_text())
        assert report.chi is not None
        assert report.lognormal is None and report.gof is None
        assert not (tmp_path / "cdf0.svg").exists()
        assert (tmp_path / "contours0.svg").exists()


class TestSimulate:
    def test_deterministic_output(self, tmp_path):
        out1, out2 = tmp_path / "s1", tmp_path / "s2"
        for out in (out1, out2):
            rc = main(["simulate", "--out", str(out), "--count", "10", "--seed", "1"])
            assert rc == EXIT_OK
        assert (out1 / "events.csv").read_bytes() == (out2 / "events.csv").read_bytes()

    def test_zero_count_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            main(["simulate", "--out", str(tmp_path), "--count", "0"])
        assert err.value.code == 2

    def test_bad_velocity_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            main(["simulate", "--out", str(tmp_path), "--count", "5", "--velocity", "fast"])
        assert err.value.code == 2

    def test_pipeline_simulate_then_fit(self, tmp_path):
        rc = main(["simulate", "--out", str(tmp_path), "--count", "10000",
                   "--velocity", "1,1", "--seed", "2718"])
        assert rc == EXIT_OK
        rc = main(["fit", "--input", str(tmp_path / "events.csv"), "--out", str(tmp_path),
                   "--single-storm", "--metric", "mahalanobis"])
        assert rc == EXIT_OK
        report = report_from_json((tmp_path / "storm0.json").read_text())
        assert math.isfinite(report.chi.lambda_hat)
        assert report.chi.lambda_hat == pytest.approx(1.0, abs=0.02)


class TestReport:
    def test_reference_row(self, fitted_dir, capsys):
        rc = main(["report", "--out", str(fitted_dir)])
        assert rc == EXIT_OK
        out = capsys.readouterr().out
        assert "0.067" in out and "0.045" in out and "0.048" in out
        lines = (fitted_dir / "summary.csv").read_text().strip().split("\n")
        assert lines[0] == "storm,events,S_F,S_G,S_G_d"
        storm, events, s_f, s_g, s_g_d = lines[1].split(",")
        assert (storm, events) == ("0", "46")
        assert float(s_f) == pytest.approx(0.067, abs=0.002)
        assert float(s_g) == pytest.approx(0.045, abs=0.002)
        assert float(s_g_d) == pytest.approx(0.0483, abs=0.001)

    def test_no_reports_is_data_error(self, tmp_path):
        rc = main(["report", "--out", str(tmp_path)])
        assert rc == EXIT_DATA


class _FixtureHandler(BaseHTTPRequestHandler):
    def do_GET(self):
        body = laurel_storm_path().read_bytes()
        self.send_response(200)
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


class TestSwdiInput:
    def test_fit_from_stub_service(self, tmp_path):
        server = HTTPServer(("127.0.0.1", 0), _FixtureHandler)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            base = f"http://127.0.0.1:{server.server_port}"
            rc = main(["fit", "--input", "swdi:2010-01-20:2010-01-21",
                       "--swdi-base", base, "--out", str(tmp_path), "--single-storm"])
            assert rc == EXIT_OK
            report = report_from_json((tmp_path / "storm0.json").read_text())
            assert report.chi.lambda_hat == pytest.approx(7.308, abs=0.02)
        finally:
            server.shutdown()
            thread.join(timeout=5)

    def test_unreachable_service_is_data_error(self, tmp_path):
        rc = main(["fit", "--input", "swdi:2010-01-20:2010-01-21",
                   "--swdi-base", "http://127.0.0.1:9", "--out", str(tmp_path),
                   "--single-storm"])
        assert rc == EXIT_DATA
