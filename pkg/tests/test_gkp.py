"""Tests for the grid-state correction-failure model and gain surfaces."""

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from clustergauss import (
    CORRECTION_VARIANCE_UNITS,
    GKP_X_OFFSET,
    GKP_Y_OFFSET,
    MODE_GAUSSIAN_FIXED,
    MODE_GAUSSIAN_OPTIMIZED,
    DomainError,
    ErrorSurfaceSpec,
    PerrInput,
    SqueezingSpec,
    WeightConfig,
    gain_surface,
    p_err,
    p_err_values,
)

SQZ = SqueezingSpec.from_db(-15.0)


def _erf_oracle(x_er, y_er, var_s):
    """Direct 1 - erf*erf form, adequate away from the cancellation regime."""
    amp = math.sqrt(math.pi) / (2.0 * math.sqrt(2.0))
    ex = math.erf(amp / math.sqrt(var_s * (x_er + GKP_X_OFFSET)))
    ey = math.erf(amp / math.sqrt(var_s * (y_er + GKP_Y_OFFSET)))
    return 1.0 - ex * ey


class TestOffsets:
    def test_offset_values(self):
        assert GKP_X_OFFSET == pytest.approx((math.sqrt(5.0) + 1.0) / 2.0,
                                             rel=1e-15)
        assert GKP_Y_OFFSET == pytest.approx(math.sqrt(5.0) + 1.0, rel=1e-15)
        assert GKP_Y_OFFSET == pytest.approx(2.0 * GKP_X_OFFSET, rel=1e-15)

    def test_variance_unit_bridge(self):
        assert CORRECTION_VARIANCE_UNITS == 2.0


class TestPerrInput:
    def test_accepts_zero_multipliers(self):
        PerrInput(0.0, 0.0, 0.1)

    @pytest.mark.parametrize("bad", [
        dict(x_er=-0.1, y_er=0.0, var_s=0.1),
        dict(x_er=0.0, y_er=-0.1, var_s=0.1),
        dict(x_er=0.0, y_er=0.0, var_s=0.0),
        dict(x_er=0.0, y_er=0.0, var_s=-1.0),
        dict(x_er=float("nan"), y_er=0.0, var_s=0.1),
        dict(x_er=0.0, y_er=0.0, var_s=float("inf")),
    ])
    def test_rejects_bad_values(self, bad):
        with pytest.raises(DomainError):
            PerrInput(**bad)


class TestPerr:
    @pytest.mark.parametrize("x_er,y_er,var_s", [
        (0.0, 0.0, 0.1),
        (2.0, 2.0, 0.015811388300841896),
        (1.0, 3.0, 0.5),
        (10.0, 0.5, 0.02),
        (0.3, 0.3, 1.0),
    ])
    def test_matches_erf_product_oracle(self, x_er, y_er, var_s):
        got = p_err(PerrInput(x_er, y_er, var_s))
        want = _erf_oracle(x_er, y_er, var_s)
        assert got == pytest.approx(want, abs=1e-15)

    def test_bounded_probability(self):
        for var_s in (0.01, 0.1, 1.0, 100.0):
            p = p_err(PerrInput(2.0, 2.0, var_s))
            assert 0.0 < p < 1.0
        # far below any representable probability the result underflows
        # to an exact zero rather than going negative
        assert p_err(PerrInput(2.0, 2.0, 1e-4)) == 0.0

    @given(
        x_lo=st.floats(min_value=0.0, max_value=20.0),
        bump=st.floats(min_value=0.01, max_value=20.0),
    )
    def test_monotone_in_x_multiplier(self, x_lo, bump):
        lo = p_err(PerrInput(x_lo, 1.0, 0.05))
        hi = p_err(PerrInput(x_lo + bump, 1.0, 0.05))
        assert hi > lo

    @given(
        y_lo=st.floats(min_value=0.0, max_value=20.0),
        bump=st.floats(min_value=0.01, max_value=20.0),
    )
    def test_monotone_in_y_multiplier(self, y_lo, bump):
        lo = p_err(PerrInput(1.0, y_lo, 0.05))
        hi = p_err(PerrInput(1.0, y_lo + bump, 0.05))
        assert hi > lo

    @given(var_s=st.floats(min_value=1e-3, max_value=1.0))
    def test_monotone_in_variance(self, var_s):
        assert p_err(PerrInput(2.0, 2.0, 1.5 * var_s)) \
            > p_err(PerrInput(2.0, 2.0, var_s))

    def test_quadratures_enter_asymmetrically(self):
        assert p_err(PerrInput(3.0, 0.0, 0.05)) \
            != p_err(PerrInput(0.0, 3.0, 0.05))

    def test_vectorised_matches_scalar(self):
        x = np.array([0.0, 1.0, 2.0, 5.0])
        y = np.array([0.5, 0.5, 3.0, 3.0])
        vals = p_err_values(x, y, 0.1)
        for i in range(4):
            assert vals[i] == p_err(PerrInput(float(x[i]), float(y[i]), 0.1))

    def test_nan_multipliers_propagate(self):
        vals = p_err_values(np.array([np.nan, 1.0]), np.array([1.0, np.nan]), 0.1)
        assert np.all(np.isnan(vals))

    def test_tiny_variance_underflows_gracefully(self):
        p = p_err(PerrInput(0.0, 0.0, 1e-8))
        assert p >= 0.0 and p < 1e-300


def _spec(w, mode, n=21):
    return ErrorSurfaceSpec((-5.0, 5.0), (-5.0, 5.0), n, n, w, mode)


class TestGainSurface:
    def test_weights_only_gain_frozen(self, unit_weights, strong_weights):
        gs = gain_surface(
            _spec(unit_weights, MODE_GAUSSIAN_FIXED),
            _spec(strong_weights, MODE_GAUSSIAN_FIXED),
            SQZ,
        )
        assert gs.max_ratio == pytest.approx(36.546759531920344, rel=1e-9)
        assert gs.argmax_cell == (-1.0, -3.5)

    def test_phase_optimization_multiplies_gain(self, unit_weights, strong_weights):
        gs = gain_surface(
            _spec(unit_weights, MODE_GAUSSIAN_FIXED),
            _spec(strong_weights, MODE_GAUSSIAN_OPTIMIZED),
            SQZ,
        )
        assert gs.max_ratio == pytest.approx(359.8595063639527, rel=1e-9)
        assert gs.argmax_cell == (0.5, -5.0)

    def test_pole_cells_are_nan_in_both(self, unit_weights, strong_weights):
        gs = gain_surface(
            _spec(unit_weights, MODE_GAUSSIAN_FIXED),
            _spec(strong_weights, MODE_GAUSSIAN_FIXED),
            SQZ,
        )
        invalid = ~np.isfinite(gs.ratio)
        assert int(invalid.sum()) == 20
        assert np.array_equal(invalid, ~np.isfinite(gs.p_base))
        assert np.array_equal(invalid, ~np.isfinite(gs.p_opt))

    def test_cell_probability_uses_doubled_variance(self, unit_weights, strong_weights):
        gs = gain_surface(
            _spec(unit_weights, MODE_GAUSSIAN_FIXED),
            _spec(strong_weights, MODE_GAUSSIAN_FIXED),
            SQZ,
        )
        i, j = 3, 7
        expect = p_err_values(
            gs.baseline.ex[i, j], gs.baseline.ey[i, j],
            CORRECTION_VARIANCE_UNITS * SQZ.var_y,
        )
        assert gs.p_base[i, j] == pytest.approx(float(expect), rel=1e-15)

    def test_grid_mismatch_rejected(self, unit_weights, strong_weights):
        base = _spec(unit_weights, MODE_GAUSSIAN_FIXED)
        with pytest.raises(DomainError):
            gain_surface(
                base, _spec(strong_weights, MODE_GAUSSIAN_FIXED, n=11), SQZ
            )
        with pytest.raises(DomainError):
            gain_surface(
                base,
                ErrorSurfaceSpec((-4.0, 5.0), (-5.0, 5.0), 21, 21,
                                 strong_weights, MODE_GAUSSIAN_FIXED),
                SQZ,
            )

    def test_worker_count_does_not_change_result(self, unit_weights, strong_weights):
        args = (
            _spec(unit_weights, MODE_GAUSSIAN_FIXED),
            _spec(strong_weights, MODE_GAUSSIAN_OPTIMIZED),
            SQZ,
        )
        one = gain_surface(*args, n_workers=1)
        three = gain_surface(*args, n_workers=3)
        np.testing.assert_array_equal(one.ratio, three.ratio)

    def test_rows_and_json(self, unit_weights, strong_weights):
        gs = gain_surface(
            _spec(unit_weights, MODE_GAUSSIAN_FIXED, n=5),
            _spec(strong_weights, MODE_GAUSSIAN_FIXED, n=5),
            SQZ,
        )
        rows = gs.to_rows()
        assert len(rows) == 25
        assert rows[0][:2] == [-5.0, -5.0]
        assert rows[1][:2] == [-5.0, -2.5]
        doc = json.loads(json.dumps(gs.to_json_dict(), allow_nan=False))
        assert doc["max_ratio"] == pytest.approx(gs.max_ratio)
        assert doc["squeezing_db"] == pytest.approx(-15.0)
        # the b = 0 row holds the pole cells -> nulls in JSON
        assert any(v is None for row in doc["ratio"] for v in row)

    def test_more_squeezing_smaller_failure_probability(self, unit_weights,
                                                        strong_weights):
        specs = (
            _spec(unit_weights, MODE_GAUSSIAN_FIXED, n=5),
            _spec(strong_weights, MODE_GAUSSIAN_FIXED, n=5),
        )
        strong = gain_surface(*specs, SqueezingSpec.from_db(-20.0))
        weak = gain_surface(*specs, SqueezingSpec.from_db(-10.0))
        both = np.isfinite(strong.p_base)
        assert np.all(strong.p_base[both] < weak.p_base[both])

    def test_ratio_at_least_one_when_optimized_dominates(self, unit_weights,
                                                         strong_weights):
        # The optimized surface here is cellwise at most the baseline, so
        # by monotonicity of the failure probability every ratio >= 1.
        gs = gain_surface(
            _spec(unit_weights, MODE_GAUSSIAN_FIXED),
            _spec(strong_weights, MODE_GAUSSIAN_OPTIMIZED),
            SQZ,
        )
        valid = np.isfinite(gs.ratio)
        ex_ok = gs.optimized.ex[valid] <= gs.baseline.ex[valid] + 1e-12
        ey_ok = gs.optimized.ey[valid] <= gs.baseline.ey[valid] + 1e-12
        assert np.all(ex_ok) and np.all(ey_ok)
        assert np.all(gs.ratio[valid] >= 1.0)

    def test_gain_compresses_toward_unity_with_less_squeezing(self, unit_weights,
                                                              strong_weights):
        # In the exponential-tail regime the log-ratio of two
        # complementary error functions scales like 1/var_s, so weaker
        # squeezing always moves every cell's ratio toward 1.
        specs = (
            _spec(unit_weights, MODE_GAUSSIAN_FIXED),
            _spec(strong_weights, MODE_GAUSSIAN_OPTIMIZED),
        )
        g15 = gain_surface(*specs, SqueezingSpec.from_db(-15.0))
        g10 = gain_surface(*specs, SqueezingSpec.from_db(-10.0))
        both = np.isfinite(g15.ratio) & np.isfinite(g10.ratio)
        assert np.all(g10.ratio[both] <= g15.ratio[both])
        assert np.all(g10.ratio[both] >= 1.0)
