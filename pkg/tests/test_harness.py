import csv
import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fareybary import continuous, weighted
from fareybary.errors import PrecisionExhausted
from fareybary.harness import (
    CSV_COLUMNS,
    ExperimentConfig,
    RandomPoint,
    am_gm_ok,
    check_t_l_bounds,
    collect_traces,
    continuous_t_l,
    continuous_t_l_bound,
    log10_fraction,
    median,
    r3_bound_ok,
    random_cells,
    rho_step_bound,
    rho_step_ok,
    run_partition_failure,
    run_ratio_experiment,
    run_salem_1d,
    run_sn_over_n,
    run_type1_runs,
    sample_rng,
    survival_exact,
    trace_sample,
    write_csv,
)
from fareybary.projective import M0, barycentric, triangle_area

F = Fraction


def test_config_validation_and_json():
    cfg = ExperimentConfig(weights=(3, 2, 1), samples=5, depth=4)
    assert cfg.weights == weighted.Weights(3, 2, 1)
    assert ExperimentConfig.from_json(cfg.to_json()) == cfg
    assert cfg.base == 6
    assert ExperimentConfig(map="continuous").base == 6
    with pytest.raises(ValueError):
        ExperimentConfig(map="continuous", weights=(1, 1, 1))
    with pytest.raises(ValueError):
        ExperimentConfig(map="other")
    with pytest.raises(ValueError):
        ExperimentConfig(samples=0)


def test_sample_rng_is_per_index():
    a = sample_rng(0, 3).getrandbits(64)
    assert a == sample_rng(0, 3).getrandbits(64)
    assert a != sample_rng(0, 4).getrandbits(64)
    assert a != sample_rng(1, 3).getrandbits(64)


def test_random_point_box_in_triangle():
    rng = sample_rng(0, 0)
    for _ in range(50):
        p = RandomPoint(rng, bits=16)
        for c in p.plane_corners():
            assert 0 <= c[1] <= c[0] <= 1
        before = p.plane_corners()
        p.refine(0)
        after = p.plane_corners()
        # refinement stays inside the previous box
        lo_x, hi_x = min(c[0] for c in before), max(c[0] for c in before)
        assert all(lo_x <= c[0] <= hi_x for c in after)


def test_random_point_on_other_triangle():
    verts = [(F(1, 2), 0), (1, 0), (1, F(1, 2))]
    rows = ((F(1, 2), 1, 1), (0, 0, F(1, 2)), (1, 1, 1))
    rng = sample_rng(2, 0)
    for _ in range(30):
        p = RandomPoint(rng, bits=20, vertices=verts)
        for c in p.plane_corners():
            assert all(x >= 0 for x in barycentric(c, rows))


def test_random_point_bit_cap():
    p = RandomPoint(sample_rng(0, 1), bits=64, step=32, max_bits=96)
    p.refine(0)
    with pytest.raises(PrecisionExhausted):
        p.refine(3)


def test_trace_deterministic_and_order_free():
    cfg = ExperimentConfig(samples=6, depth=10, seed=7)
    traces = collect_traces(cfg)
    assert trace_sample(cfg, 4) == traces[4]
    assert collect_traces(ExperimentConfig(samples=6, depth=10, seed=7, workers=2)) == traces


@pytest.mark.parametrize("cfg", [ExperimentConfig(samples=8, depth=12, weights=(2, 1, 1)), ExperimentConfig(map="continuous", samples=8, depth=8)])
def test_trace_rho_matches_cell_areas(cfg):
    # oracle: rebuild each cell from its runs and divide the two areas
    for t in collect_traces(cfg):
        moves = []
        for rec in t.records:
            if cfg.map == "weighted":
                moves += weighted.moves_from_runs([weighted.Run(rec.a, rec.kind)])
                cell = weighted.cell_from_moves(moves, cfg.weights)
            else:
                moves += [rec.kind] * rec.a
                cell = continuous.cell_from_moves(moves)
            assert rec.s == len(moves)
            assert rec.rho == triangle_area(cell.bary) / triangle_area(cell.farey)
            assert rec.r_row == cell.farey.rows[2]


def test_depth_zero_trace():
    t = trace_sample(ExperimentConfig(samples=1, depth=0), 0)
    assert t.rhos == [1]


def test_reports_are_byte_identical():
    cfg = ExperimentConfig(samples=8, depth=15, seed=3)
    a = json.dumps(run_ratio_experiment(cfg).to_json(), sort_keys=True)
    b = json.dumps(run_ratio_experiment(cfg).to_json(), sort_keys=True)
    assert a == b


def test_continuous_t_l_at_one():
    assert continuous_t_l(M0.rows, 1) == F(5, 6)
    assert continuous_t_l_bound(1) == F(7, 8)


def test_per_trace_checks():
    cfg = ExperimentConfig(samples=10, depth=20)
    for t in collect_traces(cfg):
        assert am_gm_ok(t)
        assert r3_bound_ok(t, 3)
    for t in collect_traces(ExperimentConfig(map="continuous", samples=10, depth=20)):
        assert rho_step_ok(t)


def test_rho_step_bound_values():
    assert rho_step_bound(1) == F(8, 6)
    assert rho_step_bound(3) == F(216, 216)
    assert rho_step_bound(10) == F(8000, 6**10)


@given(st.lists(st.fractions(), min_size=1, max_size=30))
def test_median(values):
    m = median(values)
    assert sum(v < m for v in values) <= len(values) // 2
    assert sum(v > m for v in values) <= len(values) // 2


def test_median_empty():
    with pytest.raises(ValueError):
        median([])


def test_log10_fraction():
    assert log10_fraction(F(1, 1000)) == pytest.approx(-3)
    big = F(1, 10**400)
    assert log10_fraction(big) == pytest.approx(-400)
    assert log10_fraction(F(0)) == float("-inf")


def test_small_ratio_experiment():
    cfg = ExperimentConfig(samples=20, depth=30)
    s = run_ratio_experiment(cfg)
    assert s.am_gm_ok and s.r3_bound_ok and s.rho_step_ok is None
    assert s.below[0.1] >= s.below[0.001] >= s.below[1e-6]
    assert s.median_min_rho < 1
    assert set(s.to_json()) >= {"below", "median_min_rho_log10", "config"}


def test_sn_over_n_requires_m3_one():
    with pytest.raises(ValueError):
        run_sn_over_n(ExperimentConfig(weights=(1, 1, 2), samples=2, depth=60))
    with pytest.raises(ValueError):
        run_sn_over_n(ExperimentConfig(samples=2, depth=10))
    s = run_sn_over_n(ExperimentConfig(samples=10, depth=20), checkpoints=(5, 20))
    assert all(v >= 1 for v in s.medians.values())


def test_type1_small():
    cfg = ExperimentConfig(map="continuous", samples=10, depth=20)
    s = run_type1_runs(cfg, checkpoints=(10, 20), t_l_cells=20)
    assert s.medians[10] <= s.medians[20]
    assert s.t_l_ok and s.t_l_checked == 20 * 12
    with pytest.raises(ValueError):
        run_type1_runs(ExperimentConfig(samples=2, depth=20))


def test_t_l_bounds_weighted():
    rng = sample_rng(0, 99)
    for w in (weighted.Weights(1, 1, 1), weighted.Weights(2, 3, 1), weighted.Weights(1, 1, 2)):
        cells = random_cells(weighted.weighted_grammar(w), 30, 6, rng)
        checked, ok, worst = check_t_l_bounds("weighted", cells, 12, w)
        assert checked == 360 and ok and worst >= 0


def test_survival_exact_hand_computed():
    # limit triangles of the base cell for m = (1,1,2):
    # (0,0),(1,0),(2/3,1/3); (1,0),(1,1),(5/6,1/2); (0,0),(1,1),(2/3,1/2)
    lim = weighted.limit_triangles(M0.rows, (1, 1, 2))
    assert lim["I"][2] == (F(2, 3), F(1, 3))
    assert lim["II"][2] == (F(5, 6), F(1, 2))
    assert lim["III"][2] == (F(2, 3), F(1, 2))
    assert survival_exact(M0.rows, weighted.Weights(1, 1, 2)) == F(1, 3)


def test_partition_failure_small():
    rep = run_partition_failure((1, 1, 2), depth=3, samples=150)
    assert rep.bound == F(2, 3)
    assert len(rep.stages) == 3
    assert rep.stages[0].exact_mean == F(1, 3)
    for s in rep.stages:
        assert s.factor <= 2 / 3 + 0.05
        assert s.exact_mean <= F(2, 3)
    control = run_partition_failure((1, 1, 1), depth=2, samples=50)
    assert all(s.factor == 1 for s in control.stages)
    assert run_partition_failure((1, 1, 2), depth=0).surviving_fraction == 1


def test_salem_small():
    s = run_salem_1d(samples=20, depth=12, checkpoints=(4, 12))
    assert s.medians[12] < s.medians[4]
    with pytest.raises(ValueError):
        run_salem_1d(samples=1, depth=5, checkpoints=(10,))


def test_write_csv(tmp_path):
    cfg = ExperimentConfig(samples=3, depth=5)
    traces = collect_traces(cfg)
    path = tmp_path / "out.csv"
    write_csv(traces, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 1 + 3 * 5
    first = rows[1]
    assert F(int(first[3]), int(first[4])) == traces[0].records[0].rho
