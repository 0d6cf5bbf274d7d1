import csv
import io
import json
import math

import numpy as np
import pytest

from hybridcap.montecarlo import (
    CSV_COLUMNS,
    Experiment,
    KneeNotDetected,
    SweepError,
    SweepSpec,
    detect_knee,
    fit_loglog,
    load_experiment,
    packaged_experiments,
    run_series,
    run_sweep,
    scaled_config,
    trial_seed,
    verify_exponent_empirical,
    verify_xki_scaling,
)
from hybridcap.scaling import ScalingPoint
from hybridcap.topology import NetworkConfig

SMALL = NetworkConfig(n=256, m=4, l=2)


def test_trial_seeds_are_stable_and_distinct():
    assert trial_seed(0, 0) == trial_seed(0, 0)
    seeds = {trial_seed(s, t) for s in range(5) for t in range(50)}
    assert len(seeds) == 250
    assert all(0 <= s < 2**64 for s in seeds)


def test_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec(SMALL, "r_bs", [], 2)
    with pytest.raises(ValueError):
        SweepSpec(SMALL, "power", [1.0], 2)
    with pytest.raises(ValueError):
        SweepSpec(SMALL, "r_bs", [1.0], 0)
    with pytest.raises(SweepError) as err:
        SweepSpec(SMALL, "m", [4, 15], 2)
    assert err.value.value == 15


def test_identical_values_give_identical_rows():
    res = run_sweep(SweepSpec(SMALL, "l", [2, 2], trials=1))
    a, b = res.rows
    assert a.summary() == b.summary()


def test_sweep_is_reproducible_byte_for_byte():
    spec = SweepSpec(SMALL, "r_bs", [0.1, 1.0, 10.0], trials=5, seed=3)
    assert run_sweep(spec).to_csv() == run_sweep(spec).to_csv()
    assert run_sweep(spec).to_json(per_trial=True) == run_sweep(spec).to_json(per_trial=True)
    other = SweepSpec(SMALL, "r_bs", [0.1, 1.0, 10.0], trials=5, seed=4)
    assert run_sweep(spec).to_csv() != run_sweep(other).to_csv()


def test_backhaul_sweep_matches_series_over_other_variable():
    spec = SweepSpec(SMALL, "r_bs", [0.5, 5.0], trials=4, seed=1)
    direct = run_sweep(spec)
    series = run_series(SweepSpec(SMALL, "n", [256], trials=4, seed=1), [0.5, 5.0])
    for row, r in zip(direct.rows, (0.5, 5.0)):
        assert series[r].rows[0].t_n_mean == pytest.approx(row.t_n_mean, rel=1e-12)


def test_rows_are_consistent():
    res = run_sweep(SweepSpec(SMALL, "r_bs", [0.1, 1.0, 3.0, 100.0], trials=6))
    for row in res.rows:
        assert min(row.t_n) <= row.t_n_mean <= max(row.t_n)
        assert row.ci95 >= 0
        assert row.t_n_mean >= max(row.t_ish_mean, row.t_imh_mean) - 1e-9
        assert 0 < row.bottleneck_fraction <= 1
    assert np.all(np.diff(res.t_n_mean) >= 0)


def test_csv_layout():
    res = run_sweep(SweepSpec(SMALL, "r_bs", [0.1, 1.0], trials=2))
    text = res.to_csv()
    assert text.splitlines()[0] == "variable,value,t_ish_mean,t_imh_mean,t_n_mean,ci95,bottleneck_mode"
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["variable"] for r in rows] == ["r_bs", "r_bs"]
    assert float(rows[1]["value"]) == 1.0
    assert tuple(rows[0]) == CSV_COLUMNS
    doc = json.loads(res.to_json(per_trial=True))
    assert len(doc["rows"][0]["trials"]) == 2


def test_ci_shrinks_with_more_trials():
    spec = lambda t: SweepSpec(SMALL, "r_bs", [math.inf], trials=t, seed=11)
    small = run_sweep(spec(50)).rows[0].ci95
    big = run_sweep(spec(200)).rows[0].ci95
    assert 0.7 <= (small / big) / 2 <= 1.3


def test_config_errors_name_the_value():
    with pytest.raises(SweepError, match="n=50"):
        SweepSpec(NetworkConfig(n=1296, m=16, l=4), "n", [1296, 50], trials=1)


# -- knee -----------------------------------------------------------------------
def test_knee_piecewise_linear():
    x = np.arange(1, 11, dtype=float)
    assert detect_knee((x, np.minimum(x, 5))) == pytest.approx(4.95, abs=0.05)


def test_knee_constant_rows():
    x = np.arange(1, 6, dtype=float)
    assert detect_knee((x, np.full(5, 3.0))) == 1.0


def test_knee_rejects_non_saturating():
    x = np.arange(1, 6, dtype=float)
    with pytest.raises(KneeNotDetected):
        detect_knee((x, x))
    with pytest.raises(ValueError):
        detect_knee((x[:3], x[:3]))


def test_knee_requires_backhaul_sweep():
    res = run_sweep(SweepSpec(SMALL, "l", [1, 2, 3, 4], trials=1))
    with pytest.raises(ValueError):
        detect_knee(res)


# -- fits ---------------------------------------------------------------------------
def test_loglog_fit_recovers_power():
    x = np.array([10, 100, 1000, 10000.0])
    fit = fit_loglog(x, 3 * x**0.4)
    assert fit.slope == pytest.approx(0.4, abs=1e-12)
    assert fit.stderr == pytest.approx(0, abs=1e-9)
    assert fit.intercept == pytest.approx(math.log(3))


def test_xki_fit_power_branch():
    rep = verify_xki_scaling(0.7, 0.4, [2**k for k in range(10, 17, 2)], 20, seed=1)
    assert rep.exponent.slope == pytest.approx(0.3, abs=0.05)
    assert rep.branch == "power"


def test_xki_fit_log_branch():
    n = [2**10, 2**12, 2**14]
    rep = verify_xki_scaling(0.2, 0.6, n, 20, seed=2)
    assert rep.branch == "log"
    assert all(mx <= rep.log_constant * math.log(v) + 1e-12 for mx, v in zip(rep.max_x, n))
    assert 0 <= rep.max_vs_log.slope <= 2


def test_xki_rejects_bad_input():
    with pytest.raises(ValueError):
        verify_xki_scaling(0.5, 0.5, [2**10, 2**12, 2**14], 19)
    with pytest.raises(ValueError):
        verify_xki_scaling(0.5, 0.5, [2**10, 2**12], 20)
    with pytest.raises(ValueError):
        verify_xki_scaling(0, 0.5, [2**10, 2**12, 2**14], 20)


def test_xki_upper_percentile_grows_at_most_logarithmically():
    # a <= b: the 99th percentile of the largest count over seeds, regressed on log n
    rng = np.random.default_rng(0)
    ns = [2**10, 2**12, 2**14]
    p99 = []
    for n in ns:
        cells, src = round(n**0.5), round(n**0.4)
        off = ~np.eye(cells, dtype=bool)
        maxes = [rng.multinomial(src, np.full(cells, 1 / cells), size=cells)[off].max()
                 for _ in range(200)]
        p99.append(np.percentile(maxes, 99))
    slope = np.polyfit(np.log(ns), p99, 1)[0]
    assert 0 <= slope <= 2


def test_scaled_config():
    c = scaled_config(ScalingPoint(3.5, 0.25, 0.25, 2.0), 4096)
    assert (c.n, c.m, c.l, c.r_bs) == (4096, 9, 8, 4096.0**2)
    c = scaled_config(ScalingPoint(4.0, 0.5, 0.3, 0.0), 1024)
    assert (c.m, c.l, c.r_bs) == (36, 8, 1.0)


def test_exponent_verification_input_checks():
    p = ScalingPoint(3.5, 0.25, 0.25, 2.0)
    with pytest.raises(ValueError):
        verify_exponent_empirical(p, [256, 1024], 0)
    with pytest.raises(ValueError):
        verify_exponent_empirical(p, [256, 1024], 2)


def test_exponent_verification_reports_failing_n():
    p = ScalingPoint(3.5, 0.25, 0.25, -1.0)
    rep = verify_exponent_empirical(p, [256, 1024, 4096], 2, base=NetworkConfig(epsilon0=0.45))
    assert set(rep.errors) == {256, 1024, 4096}
    assert rep.fit is None


def test_exponent_verification_small():
    p = ScalingPoint(3.5, 0.25, 0.25, -1.0)
    rep = verify_exponent_empirical(p, [256, 1024, 4096], 3)
    assert rep.predicted == -0.5
    assert rep.fit.slope == pytest.approx(-0.5, abs=0.3)


# -- experiments ---------------------------------------------------------------
def test_packaged_experiments_load():
    names = packaged_experiments()
    assert set(names) >= {"fig8_a35", "fig8_a375", "fig8_a40", "fig9", "fig10", "fig11"}
    for name in names:
        exp = load_experiment(name)
        assert exp.spec.base.alpha in (3.5, 3.75, 4.0)
    assert len(load_experiment("fig8_a35").spec.values) == 8
    assert load_experiment("fig9").series == (0.1, 1.0, 5.0, 10.0)


def test_experiment_rejects_unknown_keys():
    with pytest.raises(ValueError):
        Experiment.from_dict({"variable": "r_bs", "values": [1], "colour": 1})
    with pytest.raises(ValueError):
        Experiment.from_dict({"variable": "r_bs", "values": [1], "series": [1]})
