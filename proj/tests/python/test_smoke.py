"""Smoke tests for the python extension module."""

import json
import math
import os
import xml.etree.ElementTree as ET

import pytest

import renecast as rc

REPO_DIR = os.environ.get("RENECAST_REPO_DIR", os.path.join(os.path.dirname(__file__), "..", ".."))


def test_rng_reference_vector():
    rng = rc.DeterministicRng(0)
    assert rng.next_u64() == 0xE220A8397B1DCDAF
    assert rng.next_u64() == 0x6E789E6AA1B965F4
    assert 0.0 <= rc.DeterministicRng(7).next_f64() < 1.0


def test_metrics():
    assert rc.mae([1, 2, 3], [2, 2, 2]) == pytest.approx(2 / 3)
    assert rc.rmse([0, 0], [3, 4]) == pytest.approx(math.sqrt(12.5))
    assert rc.r_squared([1, 2], [2, 1]) == pytest.approx(-3.0)
    percent, excluded = rc.mape([0, 100], [5, 110])
    assert percent == pytest.approx(10.0)
    assert excluded == 1
    with pytest.raises(ArithmeticError):
        rc.r_squared([2, 2, 2], [1, 2, 3])


def test_split_partition():
    plan = rc.split(5, 0.8, 42)
    assert plan.train_indices == [1, 2, 0, 4]
    assert plan.test_indices == [3]


def test_impute():
    series = rc.impute_series("BRA", rc.Source.Hydro, [2000, 2001, 2002], [1.0, None, 3.0])
    assert series.values == [1.0, 2.0, 3.0]
    assert series.imputed == [False, True, False]


def test_gbrt_exact_fit():
    rows = [(float(i), 0.0) for i in range(8)]
    targets = [10.0 * i for i in range(8)]
    hyper = rc.Hyperparams()
    hyper.n_estimators = 1
    hyper.learning_rate = 1.0
    hyper.max_depth = 3
    model = rc.fit_ensemble(rows, targets, hyper)
    for (year, code), want in zip(rows, targets):
        assert model.predict(year, code) == pytest.approx(want)


def test_forecast_shape_and_band_order():
    series = rc.impute_series(
        "BRA", rc.Source.Wind, list(range(1992, 2022)),
        [3.0 + 0.8 * i for i in range(30)])
    forecast = rc.forecast_source(series, 2050)
    assert forecast.years[0] == 2022
    assert forecast.years[-1] == 2050
    assert len(forecast.years) == 29
    for lo, point, hi in zip(forecast.lo, forecast.point, forecast.hi):
        assert lo <= point <= hi
        assert lo >= 0.0


def test_centroid():
    lon, lat = rc.polygon_centroid([[(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)]])
    assert lon == pytest.approx(0.5)
    assert lat == pytest.approx(0.5)


def test_end_to_end_pipeline(tmp_path):
    config_doc = {
        "data_path": os.path.join(REPO_DIR, "data", "sample_energy.csv"),
        "geojson_path": os.path.join(REPO_DIR, "data", "south_america.geojson"),
        "output_dir": str(tmp_path / "out"),
        "horizon_year": 2050,
        "seed": 42,
        "gbrt": {"n_estimators": 20, "max_depth": 3},
        "trend": {"n_simulations": 200},
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config_doc))
    config = rc.RunConfig.load(str(config_path))

    summary = rc.cmd_ingest(config)
    assert "countries: 12" in summary
    rc.cmd_forecast(config)
    rc.cmd_render(config)

    out = tmp_path / "out"
    report = json.loads((out / "report.json").read_text())
    assert report["growth_ratio"] == pytest.approx(
        report["total_horizon_twh"] / report["baseline_twh"])
    assert len(report["per_country"]) == 12

    for name in ("choropleth.svg", "stacked_generation.svg", "share_lines.svg"):
        root = ET.fromstring((out / name).read_text())
        assert root.tag.endswith("svg")

    report_text = rc.cmd_report(config)
    assert "Growth ratio" in report_text
