import json
import math
import os
from pathlib import Path

import pytest

import solarzoning as sz

DATA = Path(os.environ.get("SOLARZONING_DATA", Path(__file__).resolve().parents[2] / "data"))


def test_crf_and_lcoe():
    assert sz.crf(0.05, 20) == pytest.approx(0.080243, rel=1e-5)
    c = sz.CostAssumptions()
    c.capex_usd_per_kw = 100.0 / sz.crf(0.07, 30)
    c.discount_rate = 0.07
    c.lifetime_yr = 30
    assert sz.lcoe(0.25, c) == pytest.approx(100000.0 / 2190.0)
    with pytest.raises(ValueError):
        sz.lcoe(0.0, c)


def test_site_capacity_defaults_to_solar_density():
    assert sz.SOLAR_POWER_DENSITY_W_M2 == 7.1
    assert sz.WIND_POWER_DENSITY_W_M2 == 0.8
    assert sz.site_capacity(1e6) == pytest.approx(7.1)
    assert sz.site_capacity(1e6, sz.WIND_POWER_DENSITY_W_M2) == pytest.approx(0.8)


def test_polygon_area():
    assert sz.polygon_area([(0, 0), (1, 0), (1, 1), (0, 1)]) == 1.0
    with pytest.raises(ValueError):
        sz.polygon_area([(0, 0), (1, 1), (1, 0), (0, 1)])


def test_developable_area():
    square = [(0, 0), (200, 0), (200, 200), (0, 200)]
    d = sz.developable_area(square, nppl_setback_m=50)
    assert d["area_m2"] == pytest.approx(10000.0, rel=1e-6)
    assert d["limiting_rule"] == "nppl_setback"
    assert len(d["parts"]) == 1

    # Only the south edge (vertex 0 to 1) is a road, in either orientation.
    road_south = sz.developable_area(square, ["road", "ppl", "ppl", "ppl"], road_setback_m=30)
    assert road_south["area_m2"] == pytest.approx(200 * 170, rel=1e-6)
    cw = [(0, 0), (0, 200), (200, 200), (200, 0)]
    road_west = sz.developable_area(cw, ["road", "ppl", "ppl", "ppl"], road_setback_m=30)
    assert road_west["area_m2"] == pytest.approx(200 * 170, rel=1e-6)

    small = sz.developable_area(square, min_lot_size_m2=50000)
    assert small["area_m2"] == 0.0


def test_supply_curve_orders_by_cost():
    curve = sz.supply_curve([("A", 2.0, 50.0), ("B", 3.0, 40.0), ("Z", 0.0, 1.0)])
    assert [p[0] for p in curve] == ["B", "A"]
    assert [p[3] for p in curve] == [3.0, 5.0]


def test_config_and_solver():
    cfg = json.loads(sz.load_config(str(DATA.parent / "config.json")))
    assert cfg["solar_share_target"] == 0.1
    assert sz.solver_version().startswith("HiGHS ")
    with pytest.raises(ValueError):
        sz.load_config("/nonexistent/config.json")


@pytest.mark.skipif(not (DATA / "ordinances.csv").exists(), reason="shipped data not found")
def test_run_and_compare(tmp_path):
    config = str(DATA.parent / "config.json")
    code, message = sz.run_scenario(config, str(tmp_path / "base"), target=0.05)
    assert code == 0, message
    code, message = sz.run_scenario(config, str(tmp_path / "unreg"), scenario="unregulated", target=0.05)
    assert code == 0, message
    rows = {m: (a, b) for m, a, b in sz.compare(str(tmp_path / "unreg"), str(tmp_path / "base"))}
    a, b = rows["objective_usd"]
    assert b >= a * (1 - 1e-9)
    assert math.isfinite(a)
    assert (tmp_path / "base" / "plan.json").exists()
