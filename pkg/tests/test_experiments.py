import io
import math

import numpy as np
import pytest

from hyperlp import experiments as ex
from hyperlp.errors import InvalidArgumentError, WalkExtinctionError
from hyperlp.experiments import (ExperimentConfig, param_grid, run_cluster_benchmark,
                                 run_concentration_check, run_meanfield_sweep,
                                 run_phase_diagram, write_table)
from hyperlp.model import HsbmParams


def test_grid_skips_invalid_points():
    grid = param_grid(0.05, 0.95, 0.05, 0.95, 0.05)
    assert len(grid) == 19 * 18 // 2
    assert all(0 < q < p <= 1 for p, q in grid)
    assert (0.4, 0.1) in grid


def test_sweep_ce_norm_and_equal_row():
    rows, norms = run_meanfield_sweep(100, 3, [(0.4, 0.1), (0.3, 0.3)], K=20)
    k = np.arange(1, 21)
    assert norms[("ce", 0.4, 0.1)] == pytest.approx(0.02 * math.sqrt(np.sum((3 / 7) ** (2 * k))))
    assert all(r[4] == 0 for r in rows if r[1] == 0.3)


@pytest.mark.parametrize("d", [3, 4])
def test_sweep_tensor_dominates(d):
    grid = param_grid(0.05, 0.95, 0.05, 0.95, 0.1)
    _, norms = run_meanfield_sweep(100, d, grid, K=20)
    assert all(norms[("tensor", p, q)] >= norms[("ce", p, q)] for p, q in grid)


def test_phase_monotone_in_q():
    grid = param_grid(0.05, 0.95, 0.05, 0.95, 0.05)
    rows = run_phase_diagram(100, 10, grid, K=50)
    by_p = {}
    for p, q, w, _ in rows:
        by_p.setdefault(p, []).append((q, w))
    for series in by_p.values():
        w = [v for _, v in sorted(series)]
        assert all(b <= a + 1e-12 for a, b in zip(w, w[1:]))


def test_concentration_refuses_degenerate():
    with pytest.raises(InvalidArgumentError):
        run_concentration_check(HsbmParams(20, 3, 0.3, 0.3), 3, 1, 0)


def test_concentration_error_shrinks_with_n():
    def median_ce(n):
        rows = run_concentration_check(HsbmParams(n, 3, 0.4, 0.1), 6, 5, 0, methods=("ce",))
        return np.median([r.rel_err for r in rows if r.k > 0])
    small, large = median_ce(200), median_ce(400)
    assert small / 4 <= large <= small


def test_trial_seeds_independent_of_count():
    base = dict(kind="cluster", n=40, d=3, p=0.5, q=0.3, steps=4, method="tensor", seed=3)
    short = run_cluster_benchmark(ExperimentConfig(trials=2, **base))
    long = run_cluster_benchmark(ExperimentConfig(trials=4, **base))
    assert [r.accuracy for r in short.records] == [r.accuracy for r in long.records[:2]]


def test_resample_then_fail():
    calls = []

    def walk(spec, K, rng):
        calls.append(1)
        if len(calls) < 4:
            raise WalkExtinctionError(1)
        return "profile"

    assert ex._run_walk(walk, "single", 3, None) == ("profile", 3)

    def dead(spec, K, rng):
        raise WalkExtinctionError(1)

    with pytest.raises(WalkExtinctionError):
        ex._run_walk(dead, "single", 3, None)


def test_failed_trials_reported(monkeypatch):
    def dead(walk, init, K, rng):
        raise WalkExtinctionError(2)

    monkeypatch.setattr(ex, "_run_walk", dead)
    res = run_cluster_benchmark(ExperimentConfig(kind="cluster", n=20, d=3, trials=3, steps=3))
    assert res.failed == 3 and math.isnan(res.mean)
    assert all(r.status == "extinct" and r.resamples == ex.MAX_RESAMPLES for r in res.records)


def test_cet_uses_empirical_gap():
    cfg = ExperimentConfig(kind="cluster", n=20, d=4, p=0.5, q=0.2, steps=3, trials=2,
                           method="cet", cet_order=3, calibration_trials=2)
    res = run_cluster_benchmark(cfg)
    assert res.weight_source == "empirical-gap"
    assert res.gap[0] == pytest.approx(0.1)
    with pytest.raises(InvalidArgumentError):
        run_cluster_benchmark(ExperimentConfig(kind="cluster", n=20, d=3, method="cet",
                                               cet_order=3))


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        ExperimentConfig(kind="cluster", trials=0)
    with pytest.raises(InvalidArgumentError):
        ExperimentConfig(kind="cluster", steps=0)
    assert ExperimentConfig(kind="cluster", d=5).cet_order == 4


def test_table_format():
    buf = io.StringIO()
    write_table(buf, ["a", "b"], [(0.1, "x"), (1, 1 / 3)], "meta")
    lines = buf.getvalue().splitlines()
    assert lines[0].startswith("# hyperlp ") and lines[0].endswith("meta")
    assert lines[1:] == ["a,b", "0.10000000000000001,x", "1,0.33333333333333331"]
