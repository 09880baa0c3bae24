import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sqmurmur import classnum as cn
from sqmurmur.arith import ZETA2, factorize, is_squarefree, newform_density_product, primes_up_to
from sqmurmur.trace import (
    CurveModel,
    TraceParams,
    count_points,
    dim_s2_new,
    dim_s2_new_squarefree,
    epsilon_consistency,
    genus_x0,
    hurwitz_decomposition,
    hurwitz_via_decomposition,
    load_curves,
    sigma1_prime_power,
    trace_discriminants,
    trace_rhs,
    trace_rhs_many,
)

ODD_PRIMES = [int(p) for p in primes_up_to(60) if p > 2]


def slow_trace(N, P, k):
    """Same formula, class numbers through the square-divisor route."""
    Pk = P ** k
    total = cn.hurwitz_from_h(4 * Pk * N) / 2
    r = 1
    while r * r * N < 4 * Pk:
        total += cn.hurwitz_from_h(4 * Pk * N - r * r * N * N)
        r += 1
    return total - sum(P ** i for i in range(k + 1))


def test_params_validation():
    with pytest.raises(ValueError):
        TraceParams(12, 5, 2)
    with pytest.raises(ValueError):
        TraceParams(11, 11, 2)
    with pytest.raises(ValueError):
        TraceParams(11, 2, 2)
    with pytest.raises(ValueError):
        TraceParams(11, 9, 2)
    with pytest.raises(ValueError):
        TraceParams(11, 3, 0)


def test_trace_level_11():
    assert trace_rhs(TraceParams(11, 3, 2)) == -2
    c = load_curves()[11]
    a3 = count_points(c, 3)
    assert a3 == -1
    assert trace_rhs(TraceParams(11, 3, 2)) == a3 * a3 - 3


def test_trace_zero_on_empty_new_space():
    for N in (2, 3, 5, 6, 7, 10, 13):
        for P in ODD_PRIMES:
            if N % P:
                assert dim_s2_new(N) == 0
                assert trace_rhs(TraceParams(N, P, 2)) == 0


@given(st.sampled_from(ODD_PRIMES[:8]), st.integers(2, 400).filter(is_squarefree))
@settings(max_examples=60, deadline=None)
def test_trace_matches_square_divisor_route(P, N):
    if N % P == 0:
        return
    assert trace_rhs(TraceParams(N, P, 2)) == slow_trace(N, P, 2)


def test_trace_integral_small_grid():
    for P in ODD_PRIMES[:6]:
        for N in range(2, 120):
            if N % P and is_squarefree(N):
                assert trace_rhs(TraceParams(N, P, 2)).denominator == 1


def test_trace_bounded_by_dimension():
    # each eigenvalue satisfies |a_f(P^2)| <= 3 P (Deligne)
    for P in (3, 5, 7):
        for N in range(2, 200):
            if N % P and is_squarefree(N):
                assert abs(trace_rhs(TraceParams(N, P, 2))) <= 3 * P * dim_s2_new(N)


def test_empty_r_range():
    N, P = 101, 3
    assert 4 * P * P < N
    d0, ds = trace_discriminants(TraceParams(N, P, 2))
    assert ds == []
    assert trace_rhs(TraceParams(N, P, 2)) == cn.hurwitz_H1(4 * P * P * N) / 2 - (1 + P + P * P)


def test_boundary_rejected():
    with pytest.raises(ValueError):
        trace_discriminants(TraceParams(1, 3, 2))


def test_many_matches_single():
    Ns = [N for N in range(2, 300) if is_squarefree(N) and N % 7]
    assert trace_rhs_many(Ns, 7, 2, threads=2) == [trace_rhs(TraceParams(N, 7, 2)) for N in Ns]


def test_sigma1():
    assert sigma1_prime_power(3, 2) == 13
    assert sigma1_prime_power(5, 0) == 1


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_hurwitz_decomposition(k):
    for P in (3, 5, 7):
        for N in range(1, 80):
            if N % P and is_squarefree(N):
                assert cn.hurwitz_H1(4 * P ** k * N) == hurwitz_via_decomposition(N, P, k)


def test_decomposition_k2_shape():
    assert hurwitz_decomposition(11, 3, 2) == [396, 99, 44, 11]


def test_dimension_examples():
    assert dim_s2_new(11) == 1
    assert dim_s2_new(1) == 0
    assert genus_x0(11) == 1
    assert genus_x0(37) == 2
    assert dim_s2_new(37) == 2


def test_dimension_additivity():
    def d0(n):
        return sum(1 for i in range(1, n + 1) if n % i == 0)

    for N in range(1, 1001):
        total = sum(d0(N // M) * dim_s2_new(M) for M in range(1, N + 1) if N % M == 0)
        assert total == genus_x0(N)
        assert dim_s2_new(N) >= 0


def test_squarefree_closed_form():
    for N in range(1, 3000):
        if is_squarefree(N):
            assert dim_s2_new_squarefree(N) == dim_s2_new(N)


def test_dimension_count_asymptotic():
    X = 10 ** 4
    total = sum(dim_s2_new_squarefree(N) for N in range(1, X + 1) if is_squarefree(N))
    expect = (X * X / 2) / (12 * ZETA2) * newform_density_product().value
    assert abs(total / expect - 1) < 0.02


def test_curve_table():
    curves = load_curves()
    assert sorted(curves) == [11, 14, 15, 17, 19, 21]
    for N, c in curves.items():
        assert dim_s2_new(N) == 1
        assert all(c.discriminant % p == 0 for p in factorize(N))


def test_singular_curve_rejected():
    with pytest.raises(ValueError):
        CurveModel("bad", 1, 0, 0, 0, 0, 0)


def test_hasse_bound_all_curves():
    for c in load_curves().values():
        for P in primes_up_to(1000)[1:]:
            P = int(P)
            if c.discriminant % P:
                assert count_points(c, P) ** 2 <= 4 * P


def test_count_points_matches_naive():
    c = load_curves()[11]
    for P in (3, 5, 7, 13, 17):
        pts = 1 + sum(
            1 for x in range(P) for y in range(P)
            if (y * y + c.a1 * x * y + c.a3 * y - x ** 3 - c.a2 * x * x - c.a4 * x - c.a6) % P == 0
        )
        assert count_points(c, P) == P + 1 - pts


def test_count_points_bad_prime():
    with pytest.raises(ValueError):
        count_points(load_curves()[11], 11)


def test_epsilon_level_11():
    c = load_curves()[11]
    ps = [int(p) for p in primes_up_to(97) if p not in (2, 11)]
    assert epsilon_consistency(c, ps) in (1, -1)


def test_epsilon_rejects_higher_dimension():
    with pytest.raises(ValueError):
        epsilon_consistency(CurveModel("37a1", 37, 0, 0, 1, -1, 0), [3, 5])


def test_a_p_squared_relation():
    # a_f(P^2) = a_P^2 - P, so trace = eps * (a_P^2 - P) on one-dimensional levels
    c = load_curves()[14]
    for P in (3, 5, 11, 13):
        a = count_points(c, P)
        assert trace_rhs(TraceParams(14, P, 2)) == a * a - P
