import random
from fractions import Fraction
from math import inf

import pytest

from tmotive.errors import NeighborhoodError, PrecisionError
from tmotive.ffield import ambient_field
from tmotive.cinf import CinfElem, c_inv, theta_ij, t_uniformizer
from tmotive.anderson import (exp_coeffs, exp_eval, exp_eval_scalar,
                              functional_residual, make_tmotive, tau_matrix)

N, PU = 8, 200


@pytest.fixture(scope="module")
def F():
    return ambient_field(3, 1, 4)


@pytest.fixture(scope="module")
def base(F):
    return make_tmotive([[CinfElem.zero(F, N, PU * N)]])


def test_base_point_flagged(F, base):
    assert base.is_base_point()
    t = t_uniformizer(F, N, PU)
    assert not make_tmotive([[t]]).is_base_point()


def test_neighborhood_rejection(F):
    th_entry = c_inv(t_uniformizer(F, N, PU))  # valuation -1
    with pytest.raises(NeighborhoodError):
        make_tmotive([[th_entry]])
    t = t_uniformizer(F, N, PU)
    make_tmotive([[t]])  # valuation 1 is accepted


def test_odd_coefficients_vanish_at_base(F, base):
    co = exp_coeffs(base, imax=6)
    assert co.C[1][0][0].is_zero()
    assert co.C[3][0][0].is_zero()
    assert co.C[5][0][0].is_zero()


def test_closed_form_even_coefficients(F, base):
    # independent oracle: invert the product of theta-differences, a
    # different computational path from the recursion's twisted inverses
    co = exp_coeffs(base, imax=8)
    assert co.C[2][0][0].same_terms(c_inv(theta_ij(F, N, PU, 2, 0)))
    assert co.C[4][0][0].same_terms(
        c_inv(theta_ij(F, N, PU, 4, 2) * theta_ij(F, N, PU, 4, 0)))
    for i in range(1, 5):
        prod = None
        for j in range(i):
            f = theta_ij(F, N, PU, 2 * i, 2 * j)
            prod = f if prod is None else prod * f
        assert co.C[2 * i][0][0].same_terms(c_inv(prod))


def test_coefficient_valuations_grow(F, base):
    co = exp_coeffs(base, imax=8)
    vals = [co.C[2 * i][0][0].valuation() for i in range(1, 5)]
    assert vals == sorted(vals)
    assert vals[0] == Fraction(9)    # q^2
    assert vals[1] == Fraction(162)  # 2 q^4


def test_first_coefficient_linear_in_A(F):
    a = t_uniformizer(F, N, PU) ** 3
    co = exp_coeffs(make_tmotive([[a]]))
    assert co.C[1][0][0].same_terms(a * c_inv(theta_ij(F, N, PU, 1, 0)))


def test_valuation_growth_persists_off_base(F):
    a = t_uniformizer(F, N, PU) ** 2
    co = exp_coeffs(make_tmotive([[a]]))
    vals = [co.C[i][0][0].valuation() for i in range(1, co.imax + 1)]
    finite = [v for v in vals if v != inf]
    assert all(b > a_ for a_, b in zip(finite, finite[1:]))


def test_exp_eval_linearity(F):
    a = t_uniformizer(F, N, PU) ** 3
    co = exp_coeffs(make_tmotive([[a]]))
    t = t_uniformizer(F, N, PU)
    x, y = t, t * t
    ex = exp_eval_scalar(co, x)
    ey = exp_eval_scalar(co, y)
    assert (exp_eval_scalar(co, x + y) - ex - ey).is_zero()
    z0 = CinfElem.zero(F, N, PU * N)
    assert exp_eval_scalar(co, z0).is_zero()


def test_exp_eval_reproduces_base_series(F, base):
    # at the base point the evaluation is z + z^9/theta_20 + ... termwise
    co = exp_coeffs(base, imax=6)
    t = t_uniformizer(F, N, PU)
    got = exp_eval_scalar(co, t)
    want = t + (CinfElem.monomial(F, N, PU * N * 9, 9 * N, F.one)
                * c_inv(theta_ij(F, N, PU, 2, 0)))
    want = want + (CinfElem.monomial(F, N, PU * N * 81, 81 * N, F.one)
                   * c_inv(theta_ij(F, N, PU, 4, 2) * theta_ij(F, N, PU, 4, 0)))
    assert got.same_terms(want.truncate(got.prec))


def test_functional_residual_vanishes(F):
    rng = random.Random(0)
    for n in (1, 2):
        A = [[t_uniformizer(F, N, PU) ** rng.randrange(1, 4) for _ in range(n)]
             for _ in range(n)]
        motive = make_tmotive(A)
        co = exp_coeffs(motive)
        z = [t_uniformizer(F, N, PU) ** rng.randrange(1, 3) for _ in range(n)]
        _, vals = functional_residual(motive, z, coeffs=co)
        assert all(v >= PU - 10 for v in vals)
        z0 = [CinfElem.zero(F, N, PU * N) for _ in range(n)]
        resid, _ = functional_residual(motive, z0, coeffs=co)
        assert all(x.is_zero() for x in resid)


def test_tau_matrix_blocks(F):
    a = t_uniformizer(F, N, PU) ** 2
    motive = make_tmotive([[a]])
    tm = tau_matrix(motive)
    assert tm.R[0][0].is_zero()
    assert tm.R[0][1].degree() == 0
    assert tm.R[1][0].degree() == 1           # (T - theta) block
    assert tm.R[1][0].coeffs[0].same_terms(-c_inv(t_uniformizer(F, N, PU)))
    assert tm.R[1][1].coeffs[0].same_terms(-a)


def test_eval_below_certified_floor_raises(F, base):
    # coefficients certified for the period's valuation cannot certify an
    # evaluation point that is much larger
    co = exp_coeffs(base)
    far = c_inv(t_uniformizer(F, N, PU)) ** 5  # valuation -5
    with pytest.raises(PrecisionError):
        exp_eval_scalar(co, far)
