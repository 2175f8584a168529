from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from etacong.qseries import (IntegerRing, NonUnitError, PrecisionError, QSeries, ResidueRing,
                             RingMismatch, eta_series, series_inv, series_mul, series_pow)
from brute import colored_partitions, euler_product, poly_product

ZZ = IntegerRing()
F = Fraction


def test_eta_series_precision_4():
    e = eta_series(4)
    assert e.terms() == {F(1, 24): 1, F(25, 24): -1, F(49, 24): -1}


def test_eta_series_tiny_precision():
    assert eta_series(F(1, 12)).terms() == {F(1, 24): 1}


def test_eta_coefficient_at_5():
    assert eta_series(7).coefficient(5 + F(1, 24)) == euler_product(7)[5] == 1


def test_eta_pentagonal_signs():
    e = eta_series(200)
    signs = {}
    for k in range(-12, 13):
        g = k * (3 * k - 1) // 2
        if g < 200:
            signs[F(1, 24) + g] = (-1) ** k
    assert e.terms() == signs
    assert set(e.terms().values()) <= {-1, 1}


def test_coefficient_beyond_precision_is_error():
    with pytest.raises(PrecisionError):
        eta_series(4).coefficient(5)


def test_telescoping_product():
    f = QSeries.from_terms(ZZ, {-1: 1, 0: -1}, 50)
    g = QSeries(ZZ, 0, 1, [1] * 50, 50)
    assert series_mul(f, g).terms() == {-1: 1}


def test_mul_by_one():
    e = eta_series(30)
    assert series_mul(e, QSeries.one(ZZ, 40)).equal_terms(e)


def test_eta_squared_against_convolution():
    e = eta_series(10)
    sq = series_mul(e, e)
    ref = poly_product([euler_product(11), euler_product(11)], 10)
    assert sq.coefficient(F(2, 24) + 3) == ref[3]
    assert all(sq.coefficient(F(2, 24) + i) == ref[i] for i in range(10))


def test_geometric_inverse():
    f = QSeries.from_terms(ZZ, {0: 1, 1: -1}, 30)
    assert series_inv(f).terms() == {i: 1 for i in range(30)}


def test_eta_inverse_times_eta():
    e = eta_series(50)
    prod = series_mul(e, series_inv(e))
    assert prod.terms() == {0: 1}


def test_inverse_delta_against_colored_partitions():
    d = series_pow(eta_series(8), 24)
    inv = series_inv(d)
    assert inv.valuation() == -1
    assert inv.coefficient(-1 + 4) == colored_partitions(24, 4)
    assert inv.coefficient(-1 + 5) == colored_partitions(24, 5)


def test_pow_identity_and_negative():
    e = eta_series(20)
    assert series_pow(e, 1).equal_terms(e)
    assert series_pow(e, -1).valuation() == F(-1, 24)


def test_cube_against_jacobi():
    e = eta_series(6)
    cube = series_pow(e, 3)
    ref = poly_product([euler_product(7)] * 3, 6)
    # Jacobi: sum (-1)^n (2n+1) q^{n(n+1)/2}
    assert [cube.coefficient(F(3, 24) + i) for i in range(3)] == ref[:3] == [1, -3, 0]


def test_pow_precision_is_tracked():
    e = eta_series(10)
    with pytest.raises(PrecisionError):
        series_pow(e, 2, prec=20)
    with pytest.raises(PrecisionError):
        series_inv(e, prec=100)


def test_non_unit_inverse():
    R = ResidueRing(9)
    f = QSeries.from_terms(R, {0: 3, 1: 1}, 10)
    with pytest.raises(NonUnitError):
        series_inv(f)


def test_ring_mismatch():
    with pytest.raises(RingMismatch):
        series_mul(eta_series(5), eta_series(5, ResidueRing(7)))


def random_series(draw_coeffs, ring, den=1, shift=0, prec=40):
    return QSeries(ring, shift, den, draw_coeffs, prec)


coeff_lists = st.lists(st.integers(-50, 50), min_size=1, max_size=40)


@settings(max_examples=40, deadline=None)
@given(coeff_lists, coeff_lists, coeff_lists)
def test_mul_commutative_associative(a, b, c):
    f, g, h = (QSeries(ZZ, 0, 1, x, 200) for x in (a, b, c))
    assert series_mul(f, g).equal_terms(series_mul(g, f))
    assert series_mul(series_mul(f, g), h).equal_terms(series_mul(f, series_mul(g, h)))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=30), st.integers(-3, 3))
def test_inverse_property(a, v):
    a = [1] + a
    f = QSeries(ZZ, v, 1, a, v + 60)
    prod = series_mul(f, series_inv(f))
    assert prod.terms() == {0: 1}


@settings(max_examples=30, deadline=None)
@given(coeff_lists, coeff_lists, st.sampled_from([2, 3, 7, 9, 1000003]))
def test_reduction_commutes(a, b, m):
    f, g = QSeries(ZZ, 0, 1, a, 40), QSeries(ZZ, 0, 1, b, 40)
    lhs = series_mul(f, g).reduce(m)
    rhs = series_mul(f.reduce(m), g.reduce(m))
    assert lhs.terms() == rhs.terms()


@settings(max_examples=20, deadline=None)
@given(st.integers(-6, 6).filter(bool), st.sampled_from([3, 5, 13, 25]))
def test_pow_reduction_commutes(r, m):
    e = eta_series(60)
    lhs = series_pow(e, r).reduce(m)
    rhs = series_pow(eta_series(60, ResidueRing(m)), r)
    assert lhs.terms() == rhs.terms()


def test_fractional_exponents_and_stretch():
    e = eta_series(10).stretch(24)
    assert e.valuation() == 1
    assert e.coefficient(25) == -1
    s = e.shifted(F(-1, 2))
    assert s.valuation() == F(1, 2)
    added = eta_series(4) + eta_series(4)
    assert added.terms() == {F(1, 24): 2, F(25, 24): -2, F(49, 24): -2}


def test_sparse_and_dense_paths_agree():
    # eta is sparse (pentagonal), eta^-1 dense: both multiplication paths
    e = eta_series(400)
    inv = series_inv(e)
    assert series_mul(e, inv).terms() == {0: 1}
    dense = QSeries(ZZ, 0, 1, list(range(1, 401)), 400)
    assert series_mul(dense, e).equal_terms(series_mul(e, dense))
