import math

import pytest

import stacost


def test_speed_limit_time():
    assert stacost.qsl_time() == pytest.approx(22.14297, rel=1e-6)


def test_lz_shortcuts_reach_target():
    for protocol in ("cd", "lcd"):
        run = stacost.lz_run(protocol, 1.0)
        assert run["final_fidelity"] >= 1 - 1e-8
    assert stacost.lz_run("bare", 1.0)["final_fidelity"] < 0.5


def test_ramp_json_round_trip():
    ramp = stacost.poly_smooth_ramp(-0.2, 0.4, 3.0)
    back = stacost.Ramp.from_json(ramp.to_json())
    assert back.duration == 3.0
    assert back.value(1.3) == ramp.value(1.3)
    assert ramp.to_json()["kind"] == "polynomial"


def test_cost_crossover():
    grid = [0.1 * 1000 ** (i / 40) for i in range(41)]
    assert stacost.cd_lcd_crossover(grid) == pytest.approx(11.11, rel=2e-3)


def test_oscillator_costs_and_trap_inversion():
    ie = stacost.oscillator_cost("ie", 2.5)
    cd = stacost.oscillator_cost("cd", 2.5)
    assert ie["cost"] <= cd["cost"]
    with pytest.raises(ValueError):
        stacost.oscillator_cost("cd", 1.0)
    assert stacost.cd_min_valid_duration() == pytest.approx(1.52, rel=0.02)


def test_coherent_weights():
    p = stacost.coherent_weights(2.0, 40)
    assert p[4] == pytest.approx(math.exp(-4) * 256 / 24)
    assert stacost.coherent_tail(2.0, 40) < 1e-20
    with pytest.raises(ValueError):
        stacost.jc_ensemble("cd", 10.0, alpha=5.0, cutoff=40)


def test_jc_ensemble():
    out = stacost.jc_ensemble("cd", 10.0, alpha=2.0)
    assert out["final_fidelity"] >= 1 - 1e-8
    assert len(out["times"]) == len(out["fidelity"])


def test_oc_objective_and_short_optimisation():
    zero = stacost.oc_objective(40.0, [0.0] * 4)
    assert zero["objective"] <= zero["cost"]
    res = stacost.oc_optimize(40.0, n_max=2, max_evaluations=200)
    assert set(res) >= {"tau", "q", "C", "best_params", "reached_target"}
    assert len(res["best_params"]) == 4
    with pytest.raises(Exception):
        stacost.oc_optimize(20.0)


def test_presets_and_config_run(tmp_path):
    assert stacost.preset_names() == ["fig1", "fig3", "fig4", "fig5"]
    report = stacost.validate_config(stacost.preset_config("fig4"))
    assert report == {"errors": [], "warnings": []}
    config = {
        "name": "smoke",
        "model": "oscillator",
        "protocols": ["bare", "ie"],
        "scan": [2.0, 4.0],
    }
    summary = stacost.run_config(config, str(tmp_path))
    assert summary["failures"] == []
    assert (tmp_path / "osc_cost_scan.csv").exists()
