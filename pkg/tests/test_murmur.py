import math

import pytest
from hypothesis import given, settings, strategies as st

from sqmurmur.arith import constant_A, constant_B, constant_C, norm_constant
from sqmurmur.murmur import (
    DensityConfig,
    RSumMode,
    Window,
    density_r_values,
    empirical_average,
    nearest_prime,
    predicted_density,
    h_average_check,
    h_average_parts,
    h1_sum_check,
    sweep,
)
from sqmurmur.trace import TraceParams, trace_rhs

FULL = DensityConfig()
LITERAL = DensityConfig(r_sum_mode=RSumMode.HALF_RANGE)


def test_density_at_one():
    A, B, n = constant_A().value, constant_B().value, norm_constant().value
    want = n * (A + B * constant_C(1) * math.sqrt(3) - math.pi)
    assert predicted_density(1.0, FULL) == pytest.approx(want, rel=1e-12)
    assert predicted_density(1.0, LITERAL) == pytest.approx(want, rel=1e-12)


def test_density_near_zero():
    assert abs(predicted_density(1e-12)) < 1e-5
    assert predicted_density(0.01) > 0
    with pytest.raises(ValueError):
        predicted_density(0)


def test_r_values():
    assert density_r_values(0.25, RSumMode.FULL_SUPPORT) == []
    assert density_r_values(0.26, RSumMode.FULL_SUPPORT) == [1]
    assert density_r_values(0.26, RSumMode.HALF_RANGE) == []
    assert density_r_values(1.0, RSumMode.FULL_SUPPORT) == [1]
    assert density_r_values(4.0, RSumMode.FULL_SUPPORT) == [1, 2, 3]
    assert density_r_values(4.0, RSumMode.HALF_RANGE) == [1, 2]


def test_empty_r_sum_below_quarter():
    A, n = constant_A().value, norm_constant().value
    for y in (0.01, 0.1, 0.2, 0.25):
        assert predicted_density(y) == pytest.approx(n * (A * math.sqrt(y) - math.pi * y), rel=1e-12)


@given(st.floats(0.01, 6.0))
def test_density_lipschitz_away_from_entries(y):
    h = 1e-6
    if any(abs(y - r * r / 4) < 1e-3 for r in range(1, 6)):
        return
    assert abs(predicted_density(y + h) - predicted_density(y)) <= 600 * h


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_density_holder_at_entry(r):
    # sqrt(4y - r^2) switches on with infinite slope, so the modulus is sqrt(h), not h
    y = r * r / 4
    for h in (1e-6, 1e-8, 1e-10):
        jump = abs(predicted_density(y + h) - predicted_density(y - h))
        assert jump <= 40 * math.sqrt(h)


def test_density_shape():
    assert predicted_density(0.06) > 0
    assert predicted_density(0.22) < 0
    assert predicted_density(0.5) > 0
    assert predicted_density(0.9) < 0


def test_nearest_prime():
    assert nearest_prime(100) == 101
    assert nearest_prime(12) == 11  # 11 and 13 tie; go down
    assert nearest_prime(2.2) == 3
    assert nearest_prime(97.0) == 97


def test_window_validation():
    with pytest.raises(ValueError):
        Window(100, 200)
    with pytest.raises(ValueError):
        Window(100, 10, 0.2, 0.3)
    w = Window.from_regime(10 ** 4, 0.25, 0.2)
    assert w.Y == 1000 and w.delta_prime == pytest.approx(0.075)
    with pytest.raises(ValueError):
        w.check_prime(1009)


def test_single_level_window():
    w = Window(11, 1)  # levels 11, 12; 12 is not squarefree
    pt = empirical_average(w, 3)
    assert pt.numerator == trace_rhs(TraceParams(11, 3, 2))
    assert pt.denominator == 1
    assert pt.empirical == pt.numerator


def test_point_fields():
    pt = empirical_average(Window(3000, 300), 53)
    assert isinstance(pt.numerator, int) and pt.denominator > 0
    assert pt.residual == pt.empirical - pt.predicted
    assert pt.y == pytest.approx(53 ** 2 / 3000)
    assert pt.excluded_levels >= 0


def test_exact_numerator_thread_independent():
    w = Window(5000, 600)
    a = empirical_average(w, 71, threads=1)
    b = empirical_average(w, 71, threads=3)
    assert a.numerator == b.numerator and a.empirical == b.empirical


def test_asymptotic_denominator_close():
    gaps = []
    for X in (20000, 100000):
        w = Window(X, 3000)
        a = empirical_average(w, nearest_prime(math.sqrt(X)))
        b = empirical_average(w, nearest_prime(math.sqrt(X)), asymptotic=True)
        gaps.append(abs(a.denominator / b.denominator - 1))
    assert gaps[1] < gaps[0] and gaps[1] < 0.03


def test_rejects_bad_prime():
    with pytest.raises(ValueError):
        empirical_average(Window(3000, 300), 51)


def test_sweep_shapes():
    assert sweep([2000], []) == []
    pts = sweep([2000], [0.5, 1.0])
    assert [p.P for p in pts] == [nearest_prime(math.sqrt(0.5 * 2000)), nearest_prime(math.sqrt(2000))]
    single = empirical_average(Window.from_regime(2000, 0.25, 0.2), pts[0].P)
    assert pts[0] == single


def test_h_average_parts_sum():
    w = Window(4000, 500)
    parts = h_average_parts(w, 67)
    total = h_average_check(w, 67)
    assert total.lhs == pytest.approx(sum(a for a, _ in parts.values()))
    # the sub-term mains add to A(P + 1)/sqrt(X); the h(-N), h(-4N) share is lower order
    assert sum(m for _, m in parts.values()) == pytest.approx(total.main * 68 / 67)
    assert 0.8 < total.ratio < 1.2


def test_h_average_small_terms_shrink_with_P():
    X = 20000
    w = Window(X, 2000)
    rel = []
    for P in (31, 139):
        parts = h_average_parts(w, P)
        small = parts["N"][0] + parts["4N"][0]
        rel.append(small / h_average_check(w, P).main)
    assert rel[1] < rel[0]


def test_h1_sum_precondition():
    with pytest.raises(ValueError):
        h1_sum_check(Window(10000, 1000), 47, 1)


def test_h1_sum_r_dependence():
    X, Y, P = 40000, 4000, 307
    y = P * P / X
    one = h1_sum_check(Window(X, Y), P, 1)
    two = h1_sum_check(Window(X, Y), P, 2)
    want = math.sqrt(4 * y - 4) / math.sqrt(4 * y - 1) * constant_C(2) / constant_C(1)
    assert two.lhs / one.lhs == pytest.approx(want, rel=0.05)
