import json
import math

import pytest

import brwx
from brwx import theory


def test_progeny_law_basics():
    law = brwx.ProgenyLaw(0.5)
    assert law.sample(0.5) == 4.0
    assert law.tail(4) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        brwx.ProgenyLaw(1.2)


def test_displacement_quantiles():
    pareto = brwx.DisplacementLaw.pareto(1.0)
    assert pareto.quantile_from_tail(1e-6) == pytest.approx(1e6)
    gauss = brwx.DisplacementLaw.gaussian()
    assert gauss.quantile(0.975) == pytest.approx(1.959963984540054, abs=1e-12)
    assert gauss.inverse_hazard(gauss.hazard(1.3)) == pytest.approx(1.3, abs=1e-9)


def test_theory_constants():
    assert theory.light_tail_constant(0.5, 2.0) == pytest.approx(math.sqrt(2.0))
    assert theory.f_closed(0.5, 2.0, 3) == pytest.approx(math.sqrt(1.875))
    assert theory.f_recursive(0.5, 2.0, 3) == pytest.approx(theory.f_closed(0.5, 2.0, 3))
    assert theory.frechet_kth_cdf(1.0, 1, 1.0) == pytest.approx(math.exp(-1.0))
    assert theory.cloud_speed_heavy(0.8) == pytest.approx(-math.log(0.8))


def test_stable_sampler_is_pure():
    a = brwx.sample_positive_stable(0.7, 0.25, 0.75)
    b = brwx.sample_positive_stable(0.7, 0.25, 0.75)
    assert a == b and a > 0


def test_population_and_run_are_deterministic():
    law = brwx.ProgenyLaw(0.6)
    path = brwx.simulate_exact_sizes(law, 5, 1e6, brwx.RngStream(42, 1))
    again = brwx.simulate_exact_sizes(law, 5, 1e6, brwx.RngStream(42, 1))
    assert path.log_sizes == again.log_sizes
    est = brwx.estimate_w(path)
    assert est.value >= 0.0

    disp = brwx.DisplacementLaw.pareto(1.0)
    res = brwx.run_brw(law, disp, n=3, k=4, thresholds=[1.0, 2.0],
                       cap=100000, rng=brwx.RngStream(7, 0))
    assert res.record.top_k == sorted(res.record.top_k, reverse=True)
    assert all(c0 >= c1 for c0, c1 in zip(res.points.counts, res.points.counts[1:]))


def test_stats_ks():
    grid = [(i + 0.5) / 100 for i in range(100)]
    stat = brwx.stats.ks_statistic(grid, lambda x: min(max(x, 0.0), 1.0))
    assert stat <= 0.01 + 1e-12


def test_experiment_roundtrip(tmp_path):
    kv = "\n".join([
        "experiment = constants_table",
        "alpha = 0.5",
        "beta_or_r = 2",
        "k = 10",
    ])
    status, report_json = brwx.experiment.run_kv(kv)
    assert status == "pass"
    report = json.loads(report_json)
    names = {row["name"]: row for row in report["aggregates"]}
    assert names["light_constant"]["value"] == pytest.approx(math.sqrt(2.0))
    assert "constants_table" == report["experiment"]
