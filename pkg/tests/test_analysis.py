from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chainstab.analysis import (
    RAMP_ERROR_SIGN, FitError, OracleParams, ScalingReport, error_metric, fig2_steps, fit_exponent,
    lemma1_oracle, lemma_window_T, lemma_window_steps, oracle_series, oracle_spacing,
    summary_metric, theorem2_exponent, validity_window, windowed_history,
)
from chainstab.core import GridError
from chainstab.disturbances import ParameterError


def free_chain_errors(N, n_last, alpha=Fraction(1), dt=Fraction(1, 10)):
    """Uncontrolled chain under the ramp in exact rational arithmetic."""
    x = [Fraction(0)] * (N + 1)
    v = [Fraction(0)] * (N + 1)
    out = []
    for _ in range(n_last):
        x = [x[k] + v[k] * dt + alpha * k * dt**2 / N for k in range(N + 1)]
        v = [v[k] + alpha * k * dt / N for k in range(N + 1)]
    return x[0] - x[1], v[0] - v[1]


class TestOracle:
    def test_first_step(self):
        e, edot = lemma1_oracle(OracleParams(1.0, 10, 0.1), 0.1)
        assert e == pytest.approx(0.001, rel=1e-12)
        assert edot == pytest.approx(0.01, rel=1e-12)

    def test_origin(self):
        assert lemma1_oracle(OracleParams(1.0, 10, 0.1), 0.0) == (0.0, 0.0)

    def test_one_second(self):
        e, edot = lemma1_oracle(OracleParams(1.0, 50, 0.1), 1.0)
        assert e == pytest.approx(0.011, rel=1e-12)
        assert edot == pytest.approx(0.02, rel=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 5, 13])
    def test_matches_exact_free_chain(self, n):
        e, edot = free_chain_errors(7, n)
        got = lemma1_oracle(OracleParams(1.0, 7, 0.1), n * 0.1)
        assert got[0] == pytest.approx(float(-e), rel=1e-12)
        assert got[1] == pytest.approx(float(-edot), rel=1e-12)

    def test_signed_values(self):
        p = OracleParams(2.0, 20, 0.1)
        mag = lemma1_oracle(p, 0.5)
        assert oracle_spacing(p, 0.5) == (RAMP_ERROR_SIGN * mag[0], RAMP_ERROR_SIGN * mag[1])
        e, edot = oracle_series(p, 5)
        assert e[-1] == pytest.approx(-mag[0], rel=1e-14) and edot[0] == 0.0

    def test_off_grid(self):
        with pytest.raises(GridError):
            lemma1_oracle(OracleParams(1.0, 10, 0.1), 0.15)

    def test_strictly_increasing(self):
        e, _ = oracle_series(OracleParams(0.3, 40, 0.1), 30)
        assert np.all(np.diff(np.abs(e)) > 0)


class TestWindow:
    def test_interior(self):
        assert list(validity_window(OracleParams(1.0, 50, 0.1), 1.0)) == list(range(11, 40))

    def test_at_start(self):
        assert list(validity_window(OracleParams(1.0, 50, 0.1), 0.0)) == list(range(1, 50))

    def test_bounds_meet(self):
        assert len(validity_window(OracleParams(1.0, 10, 0.1), 0.5)) == 0

    def test_asymmetric_radii(self):
        assert list(validity_window(OracleParams(1.0, 20, 0.1, m1=2, m2=0), 0.3)) == list(range(7, 20))

    def test_lemma_T(self):
        assert lemma_window_T(50, 0.1, 1, 1) == pytest.approx(1.2)
        assert lemma_window_T(10, 0.1, 1, 0) == pytest.approx(0.5)
        assert lemma_window_steps(80, 2, 2) * 2 == lemma_window_steps(80, 1, 1)
        with pytest.raises(ValueError):
            lemma_window_steps(10, 0, 0)

    def test_fig2_steps(self):
        assert fig2_steps(10) == 2 and fig2_steps(50) == 10

    @pytest.mark.parametrize("N", range(4, 400, 7))
    @pytest.mark.parametrize("m1, m2", [(1, 1), (1, 0), (0, 2), (2, 3)])
    def test_coverage(self, N, m1, m2):
        p = OracleParams(1.0, N, 0.1, m1, m2)
        assert len(validity_window(p, lemma_window_T(N, 0.1, m1, m2))) >= N // 2 - 1

    def test_windowed_history(self):
        p = OracleParams(1.0, 10, 0.1)
        hist = np.arange(50.0).reshape(5, 10)
        sub, vehicles, notes = windowed_history(hist, p, 2)
        assert list(vehicles) == list(range(3, 8)) and notes == []
        np.testing.assert_array_equal(sub, hist[:3, 2:7])

    def test_empty_window_is_reported(self):
        p = OracleParams(1.0, 10, 0.1)
        with pytest.warns(RuntimeWarning):
            sub, vehicles, notes = windowed_history(np.ones((8, 10)), p, 5)
        assert sub.shape == (6, 0) and len(notes) == 1


class TestMetric:
    @pytest.mark.parametrize("definition_id", [1, 2, 3, 4])
    def test_zero_history(self, definition_id):
        assert summary_metric(np.zeros((4, 3)), definition_id, 2, 2, 0.1) == 0.0

    def test_single_sample(self):
        np.testing.assert_allclose(error_metric([[2.0]], 1, 2, 2, 0.1), [0.4])

    def test_def2_sums_vehicles(self):
        hist = np.array([[1.0, 2.0], [1.0, 0.0]])
        # per vehicle: 2 and 4 with dt = 1, then outer power q/p = 3/2
        assert error_metric(hist, 2, 2, 3, 1.0) == pytest.approx(2**1.5 + 4**1.5)

    def test_def3_ignores_q(self):
        hist = np.array([[1.0, -3.0]])
        np.testing.assert_array_equal(error_metric(hist, 3, 1, 7, 0.5), [0.5, 1.5])

    def test_def4_on_oracle(self):
        p = OracleParams(0.7, 40, 0.1)
        n_last = lemma_window_steps(40, 1, 1)
        e, _ = oracle_series(p, n_last)
        T = n_last * 0.1
        assert error_metric(e[:, None], 4) == pytest.approx(T * (T + 0.1) * 0.7 / 80, rel=1e-12)

    def test_empty(self):
        with pytest.raises(ValueError):
            error_metric(np.zeros((0, 3)), 4)


@settings(max_examples=60, deadline=None)
@given(
    hist=st.lists(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3), min_size=1, max_size=6),
    p=st.integers(1, 4), q=st.integers(1, 4),
)
def test_def2_dominates_def1(hist, p, q):
    # the per-vehicle value enters the sum raised to q/p
    d1 = summary_metric(hist, 1, p, q, 0.1)
    d2 = error_metric(hist, 2, p, q, 0.1)
    assert d2 >= d1 ** (q / p) * (1 - 1e-12)
    if p == q:
        assert error_metric(hist, 2, p, p, 0.1) >= d1 * (1 - 1e-12)


class TestExponents:
    @pytest.mark.parametrize("args, expected", [
        ((1, 2, 2), 1.0), ((1, 3, 1), 0.0), ((1, 1, 1), 0.0), ((1, 4, 2), 2.0),
        ((2, 2, 3), 3.0), ((3, 2, 5), 2.0), ((4, 1, 1), 1.0),
    ])
    def test_table(self, args, expected):
        assert theorem2_exponent(*args) == expected

    def test_invalid(self):
        with pytest.raises(ParameterError):
            theorem2_exponent(1, 0, 2)


class TestFit:
    def test_power_law(self):
        assert fit_exponent([(N, 3 * N**2) for N in (10, 20, 40, 80)]) == pytest.approx(2.0, abs=1e-12)

    def test_constant(self):
        assert fit_exponent([(N, 5.0) for N in (10, 20, 40)]) == pytest.approx(0.0, abs=1e-12)

    def test_unsorted_input(self):
        assert fit_exponent([(40, 1600.0), (10, 100.0), (20, 400.0)]) == pytest.approx(2.0)

    def test_def4_oracle_sweep(self):
        samples = []
        for N in (40, 80, 160, 320):
            n_last = lemma_window_steps(N, 1, 1)
            T = n_last * 0.1
            samples.append((N, lemma1_oracle(OracleParams(1.0, N, 0.1), T)[0]))
        assert 0.9 <= fit_exponent(samples) <= 1.1

    @pytest.mark.parametrize("samples", [
        [(10, 1.0), (20, 2.0)],
        [(10, 1.0), (10, 2.0), (20, 3.0)],
        [(10, 1.0), (20, 0.0), (40, 3.0)],
        [(10, 1.0), (20, -1.0), (40, 3.0)],
        [(10, 1.0), (20, float("nan")), (40, 3.0)],
    ])
    def test_errors(self, samples):
        with pytest.raises(FitError):
            fit_exponent(samples)

    def test_report(self):
        report = ScalingReport.from_samples(4, 1, 1, [(40, 4.0), (10, 1.0), (20, 2.0)])
        assert report.samples[0] == (10, 1.0)
        assert report.fitted_exponent == pytest.approx(1.0)
        assert report.deviation == pytest.approx(0.0, abs=1e-12)
        assert report.to_dict()["samples"][2] == [40, 4.0]
