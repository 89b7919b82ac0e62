import numpy as np
import pytest

from portmoea.instance import parse_orlibrary
from portmoea.problem import (
    ConstraintError,
    ConstraintSet,
    ObjectiveVector,
    Portfolio,
    RawPortfolio,
    check_feasibility,
    evaluate,
    lot_denominator,
    preset_constraints,
)


def make_portfolio(n, selected, lots_by_asset, t=125):
    sel = np.zeros(n, dtype=bool)
    lots = np.zeros(n, dtype=np.int64)
    for i, y in zip(selected, lots_by_asset):
        sel[i] = True
        lots[i] = y
    return Portfolio(selection=sel, lots=lots, lot_denominator=t)


class TestLotDenominator:
    def test_common_lot_size(self):
        assert lot_denominator(0.008) == 125
        assert lot_denominator(0.01) == 100
        assert lot_denominator(1.0) == 1

    def test_integer_passthrough(self):
        assert lot_denominator(125) == 125

    def test_non_divisor_rejected(self):
        with pytest.raises(ConstraintError, match="not divisible"):
            lot_denominator(0.3)

    def test_out_of_range_rejected(self):
        with pytest.raises(ConstraintError):
            lot_denominator(0)
        with pytest.raises(ConstraintError):
            lot_denominator(-5)


class TestConstraintSet:
    def test_lot_bounds_derived(self):
        c = ConstraintSet.uniform(5, cardinality=2, floor=0.01, ceiling=1.0, lot=0.008)
        assert c.lot_denominator == 125
        assert c.min_lots.tolist() == [2] * 5  # ceil(0.01 / 0.008) = 2
        assert c.max_lots.tolist() == [125] * 5
        assert c.lot == pytest.approx(0.008)

    def test_floor_above_ceiling_rejected(self):
        with pytest.raises(ConstraintError, match="floor_i <= ceiling_i"):
            ConstraintSet.uniform(3, cardinality=2, floor=0.5, ceiling=0.4)

    def test_cardinality_bounds(self):
        with pytest.raises(ConstraintError, match="cardinality"):
            ConstraintSet.uniform(3, cardinality=4)
        with pytest.raises(ConstraintError, match="cardinality"):
            ConstraintSet.uniform(3, cardinality=1, preassigned=(0, 1))

    def test_empty_lot_window_rejected(self):
        # floor 0.01 needs 2 lots but ceiling 0.012 allows only 1
        with pytest.raises(ConstraintError, match="no lot count"):
            ConstraintSet.uniform(3, cardinality=2, floor=0.01, ceiling=0.012, lot=0.008)

    def test_worst_case_floor_mass_rejected(self):
        with pytest.raises(ConstraintError, match="floors are infeasible"):
            ConstraintSet.uniform(5, cardinality=2, floor=0.9, ceiling=1.0, lot=0.008)

    def test_ceiling_coverage_rejected(self):
        with pytest.raises(ConstraintError, match="ceilings are infeasible"):
            ConstraintSet.uniform(5, cardinality=2, floor=0.0, ceiling=0.4, lot=0.008)

    def test_preassigned_index_bounds(self):
        with pytest.raises(ConstraintError, match="out of range"):
            ConstraintSet.uniform(5, cardinality=2, preassigned=(5,))


class TestPresets:
    def test_preset_i(self):
        c = preset_constraints("i", 31)
        assert c.cardinality == 10
        assert c.preassigned.tolist() == [i == 29 for i in range(31)]
        assert c.lot_denominator == 125
        assert float(c.floors[0]) == 0.01
        assert float(c.ceilings[0]) == 1.0

    def test_preset_ii(self):
        c = preset_constraints("ii", 31)
        assert c.cardinality == 15
        assert c.preassigned.tolist() == [i == 4 for i in range(31)]

    def test_preset_i_needs_30_assets(self):
        with pytest.raises(ConstraintError, match="asset 30"):
            preset_constraints("i", 20)

    def test_unknown_preset(self):
        with pytest.raises(ConstraintError, match="unknown"):
            preset_constraints("iii", 31)


class TestPortfolio:
    def test_weights_derived_from_lots(self):
        p = make_portfolio(3, [0, 2], [100, 25])
        assert p.weights.tolist() == [0.8, 0.0, 0.2]

    def test_csv_rows(self):
        p = make_portfolio(3, [0, 2], [100, 25])
        assert p.csv_rows() == ["asset,lots,weight", "1,100,0.8", "3,25,0.2"]

    def test_unselected_must_hold_zero(self):
        with pytest.raises(ValueError, match="zero lots"):
            Portfolio(
                selection=np.array([True, False]),
                lots=np.array([100, 25]),
                lot_denominator=125,
            )

    def test_negative_lots_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            Portfolio(
                selection=np.array([True, True]),
                lots=np.array([-1, 126]),
                lot_denominator=125,
            )

    def test_raw_portfolio_checks(self):
        with pytest.raises(ValueError, match="zero weight"):
            RawPortfolio(selection=np.array([False, True]), weights=np.array([0.5, 0.5]))


def test_objective_vector_minimization_form():
    v = ObjectiveVector(risk=0.25, ret=0.1)
    assert v.minimization().tolist() == [0.25, -0.1]


class TestEvaluate:
    def test_single_asset_fully_invested(self):
        inst = parse_orlibrary("1\n0.001 0.02\n1 1 1.0")
        p = make_portfolio(1, [0], [125])
        obj = evaluate(p, inst)
        assert obj.ret == pytest.approx(0.001)
        assert obj.risk == pytest.approx(0.02**2)

    def test_two_assets_zero_correlation(self):
        inst = parse_orlibrary("2\n0.001 0.02\n0.002 0.03\n1 2 0.0")
        p = make_portfolio(2, [0, 1], [50, 50], t=100)
        obj = evaluate(p, inst)
        assert obj.risk == pytest.approx(0.25 * (0.02**2 + 0.03**2))
        assert obj.ret == pytest.approx(0.5 * 0.001 + 0.5 * 0.002)

    def test_sparse_path_matches_dense_double_loop(self, synth31, rng):
        # dense O(N^2) oracle over the full weight vector, in plain loops
        for _ in range(25):
            k = int(rng.integers(2, 12))
            chosen = rng.choice(synth31.n_assets, size=k, replace=False)
            lots = rng.multinomial(125 - k, np.full(k, 1 / k)) + 1
            p = make_portfolio(synth31.n_assets, chosen, lots)
            w = p.weights
            risk = 0.0
            for i in range(synth31.n_assets):
                for j in range(synth31.n_assets):
                    risk += w[i] * w[j] * synth31.covariance(i, j)
            ret = sum(w[i] * synth31.mu[i] for i in range(synth31.n_assets))
            obj = evaluate(p, synth31)
            assert obj.risk == pytest.approx(risk, rel=1e-12)
            assert obj.ret == pytest.approx(ret, rel=1e-12)

    def test_return_scales_exactly_with_weights(self, synth10):
        p1 = make_portfolio(10, [1, 4, 7], [50, 50, 25], t=125)
        p2 = make_portfolio(10, [1, 4, 7], [50, 50, 25], t=250)  # alpha = 1/2
        r1 = evaluate(p1, synth10).ret
        r2 = evaluate(p2, synth10).ret
        assert r2 == 0.5 * r1

    def test_dimension_mismatch(self, synth10):
        p = make_portfolio(3, [0], [125])
        with pytest.raises(ValueError, match="assets"):
            evaluate(p, synth10)


class TestCheckFeasibility:
    def setup_method(self):
        self.c = ConstraintSet.uniform(5, cardinality=2, floor=0.01, ceiling=1.0, lot=0.008)

    def test_all_families_pass(self):
        p = make_portfolio(5, [1, 3], [29, 96])
        report = check_feasibility(p, self.c)
        assert report.ok
        assert str(report).count("ok") == 5

    def test_preassignment_violated(self):
        c = ConstraintSet.uniform(5, cardinality=2, floor=0.01, preassigned=(0,), lot=0.008)
        p = make_portfolio(5, [1, 3], [29, 96])  # asset 1 required but unselected
        report = check_feasibility(p, c)
        assert not report.preassignment
        assert not report.ok
        assert report.sum_to_one and report.cardinality and report.floor_ceiling

    def test_sum_to_one_is_exact_integer_check(self):
        p = make_portfolio(5, [1, 3], [29, 95])  # one lot short
        report = check_feasibility(p, self.c)
        assert not report.sum_to_one
        assert report.cardinality

    def test_cardinality_violated(self):
        p = make_portfolio(5, [0, 1, 3], [10, 29, 86])
        assert not check_feasibility(p, self.c).cardinality

    def test_floor_violated(self):
        p = make_portfolio(5, [1, 3], [1, 124])  # asset 1 below 2-lot floor
        report = check_feasibility(p, self.c)
        assert not report.floor_ceiling
        assert report.sum_to_one

    def test_ceiling_violated(self):
        c = ConstraintSet.uniform(5, cardinality=2, floor=0.01, ceiling=0.6, lot=0.008)
        p = make_portfolio(5, [1, 3], [100, 25])  # 0.8 over the 0.6 ceiling
        assert not check_feasibility(p, c).floor_ceiling

    def test_round_lot_tracks_denominator(self):
        p = make_portfolio(5, [1, 3], [29, 96], t=250)
        assert not check_feasibility(p, self.c).round_lot

    def test_str_marks_violations(self):
        p = make_portfolio(5, [1, 3], [29, 95])
        assert "sum_to_one=VIOLATED" in str(check_feasibility(p, self.c))
