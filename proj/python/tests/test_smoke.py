import math

import pytest

import mdcpp


def test_presets_round_trip():
    assert set(mdcpp.preset_names()) == {"table1", "ld_2c", "ld_3c", "sd_2c", "sd_3c"}
    for name in mdcpp.preset_names():
        cfg = mdcpp.preset(name)
        assert mdcpp.parse_scenario(cfg.to_json()) == cfg


def test_bad_config_raises_value_error():
    with pytest.raises(ValueError, match="robots"):
        mdcpp.parse_scenario('{"robots": []}')


def test_run_is_deterministic():
    cfg = mdcpp.preset("table1")
    a = mdcpp.run(cfg, mdcpp.Strategy.MDCPP)
    b = mdcpp.run(cfg, mdcpp.Strategy.MDCPP)
    assert a == b
    assert not a["aborted"]
    assert a["completion_time"] == max(a["per_robot_finish_time"].values())


def test_strategy_ordering_on_large_difference_scenario():
    cfg = mdcpp.preset("ld_2c")
    times = {s: mdcpp.run(cfg, s)["completion_time"] for s in
             (mdcpp.Strategy.MDCPP, mdcpp.Strategy.DYNAMIC, mdcpp.Strategy.SWEEPING)}
    assert times[mdcpp.Strategy.MDCPP] < times[mdcpp.Strategy.SWEEPING]


def test_comm_range_property():
    cfg = mdcpp.preset("sd_2c")
    assert cfg.comm_range is None
    cfg.comm_range = 20.0
    assert cfg.comm_range == 20.0
    assert '"comm_range": 20.0' in cfg.to_json()


def test_batch_and_plot_data(tmp_path):
    rows, aggs = mdcpp.run_batch([mdcpp.preset("table1")], repeats=2,
                                 strategies=[mdcpp.Strategy.SWEEPING], out_dir=str(tmp_path))
    assert len(rows) == 2 and len(aggs) == 1
    run_dir = tmp_path / "table1" / "sweeping" / "seed_1"
    files = mdcpp.emit_plot_data(str(run_dir), "trajectories", str(tmp_path / "plots"))
    assert len(files) == 4
    with pytest.raises(ValueError, match="summary_bars"):
        mdcpp.emit_plot_data(str(run_dir), "nope", str(tmp_path / "plots"))


def test_small_operations():
    assert mdcpp.largest_remainder(10, [1.0, 3.0]) == [3, 7]
    order, length = mdcpp.nearest_neighbor_path((0, 0), [(1, 0), (2, 0), (0, 5)])
    assert order == [0, 1, 2]
    assert length == pytest.approx(2 + math.sqrt(29))
    labels, centroids, wcss = mdcpp.kmeans([(0, 0), (0, 1), (10, 0), (10, 1)], 2, seed=3)
    assert wcss == pytest.approx(1.0)
    support = [(float(x), float(y)) for y in range(5) for x in range(5)]
    a = [0.0] * 25
    b = [0.0] * 25
    a[0] = 1.0
    b[4 * 5 + 3] = 1.0
    assert mdcpp.sliced_wasserstein(a, b, support, 1000, 1) == pytest.approx(10 / math.pi, rel=0.05)
