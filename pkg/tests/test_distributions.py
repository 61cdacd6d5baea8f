"""Distribution tails against an independent continued-fraction oracle."""

import math

import pytest

from restakelab.econometrics.distributions import (
    f_sf,
    t_sf,
    t_sf_twosided,
    tau_critical_value,
    tau_pvalue,
)


# -- oracle: regularized incomplete beta via Lentz's continued fraction -------


def _betacf(a: float, b: float, x: float) -> float:
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 400):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return h


def oracle_betainc(a: float, b: float, x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log(1.0 - x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def oracle_t_sf(t: float, df: float) -> float:
    x = df / (df + t * t)
    half = 0.5 * oracle_betainc(df / 2.0, 0.5, x)
    return half if t >= 0 else 1.0 - half


def oracle_f_sf(x: float, d1: float, d2: float) -> float:
    if x <= 0:
        return 1.0
    return oracle_betainc(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x))


T_GRID = [-8.0, -3.2, -1.0, -0.3, 0.0, 0.5, 1.96, 2.575, 4.0, 10.0]
DF_GRID = [1, 2, 5, 10, 30, 120, 450]
F_GRID = [0.01, 0.5, 1.0, 2.5, 4.0, 10.0, 50.0]
F_DF_GRID = [(1, 10), (2, 30), (5, 100), (5, 440), (11, 440), (24, 400)]


class TestStudentT:
    @pytest.mark.parametrize("df", DF_GRID)
    @pytest.mark.parametrize("t", T_GRID)
    def test_matches_continued_fraction_oracle(self, t, df):
        assert t_sf(t, df) == pytest.approx(oracle_t_sf(t, df), abs=1e-8)

    def test_symmetry(self):
        assert t_sf(1.5, 7) + t_sf(-1.5, 7) == pytest.approx(1.0, abs=1e-12)

    def test_two_sided(self):
        assert t_sf_twosided(1.96, 1000) == pytest.approx(0.05, abs=2e-3)

    def test_extremes(self):
        assert t_sf(math.inf, 5) == 0.0
        assert t_sf(-math.inf, 5) == 1.0


class TestFDistribution:
    @pytest.mark.parametrize("dfs", F_DF_GRID)
    @pytest.mark.parametrize("x", F_GRID)
    def test_matches_continued_fraction_oracle(self, x, dfs):
        d1, d2 = dfs
        assert f_sf(x, d1, d2) == pytest.approx(oracle_f_sf(x, d1, d2), abs=1e-8)

    def test_f1_equals_t_squared(self):
        # F(1, df) upper tail at t^2 equals the two-sided t tail
        for t, df in ((1.3, 17), (2.4, 90)):
            assert f_sf(t * t, 1, df) == pytest.approx(t_sf_twosided(t, df), abs=1e-10)

    def test_below_zero(self):
        assert f_sf(-1.0, 3, 9) == 1.0


class TestTauTable:
    def test_published_critical_values_constant(self):
        # classic asymptotic unit-root critical values
        assert tau_critical_value(0.01, "ConstantOnly") == pytest.approx(-3.43, abs=0.05)
        assert tau_critical_value(0.05, "ConstantOnly") == pytest.approx(-2.86, abs=0.04)
        assert tau_critical_value(0.10, "ConstantOnly") == pytest.approx(-2.57, abs=0.04)

    def test_published_critical_values_trend(self):
        assert tau_critical_value(0.01, "ConstantTrend") == pytest.approx(-3.96, abs=0.06)
        assert tau_critical_value(0.05, "ConstantTrend") == pytest.approx(-3.41, abs=0.05)
        assert tau_critical_value(0.10, "ConstantTrend") == pytest.approx(-3.12, abs=0.05)

    def test_pvalue_monotone_in_statistic(self):
        stats = [-6.0, -4.0, -3.0, -2.5, -1.0, 0.0, 1.0, 2.0]
        ps = [tau_pvalue(s, "ConstantOnly") for s in stats]
        assert all(b >= a for a, b in zip(ps, ps[1:]))

    def test_pvalue_clamps_at_table_edges(self):
        assert tau_pvalue(-50.0, "ConstantOnly") == pytest.approx(0.0005)
        assert tau_pvalue(50.0, "ConstantOnly") == pytest.approx(0.999)

    def test_interpolation_round_trip(self):
        for level in (0.01, 0.05, 0.10, 0.50):
            cv = tau_critical_value(level, "ConstantTrend")
            assert tau_pvalue(cv, "ConstantTrend") == pytest.approx(level, rel=1e-9)

    def test_unknown_spec(self):
        with pytest.raises(ValueError):
            tau_pvalue(-1.0, "Quadratic")
