import random

import pytest

from tmotive.errors import SingularMatrixError
from tmotive.ffield import ambient_field
from tmotive.cinf import CinfElem, PolyT, theta, t_uniformizer
from tmotive.linalg import (eye, kron_left, kron_right, mat_det, mat_eq, mat_inv,
                            mat_mul, mat_same_terms, mat_solve, pm_det, pm_mul,
                            unvec_rowmajor, vec_rowmajor, zeros)

N, PU = 8, 120


@pytest.fixture(scope="module")
def F():
    return ambient_field(3, 1, 4)


def rand_mat(F, rng, n, vmin=-2, vmax=8):
    out = []
    for _ in range(n):
        row = []
        for _ in range(n):
            terms = {rng.randrange(vmin * N, vmax * N): F.el(rng.randrange(1, F.order))
                     for _ in range(rng.randrange(1, 4))}
            row.append(CinfElem.from_terms(F, N, PU * N, terms.items()))
        out.append(row)
    return out


def test_inverse_roundtrip(F):
    rng = random.Random(0)
    for n in (1, 2, 3):
        for _ in range(6):
            m = rand_mat(F, rng, n)
            try:
                inv = mat_inv(m)
            except SingularMatrixError:
                continue
            prod = mat_mul(m, inv)
            for i in range(n):
                for j in range(n):
                    x = prod[i][j]
                    if i == j:
                        assert x.coeff_at(0) == F.one and len(x.exps) == 1
                    else:
                        assert x.is_zero()


def test_solve_matches_inverse(F):
    rng = random.Random(1)
    m = rand_mat(F, rng, 3)
    rhs = rand_mat(F, rng, 3)
    x = mat_solve(m, rhs)
    assert mat_same_terms(mat_mul(m, x), [[e.truncate(x[0][0].prec) for e in r] for r in rhs]) or \
        all((mat_mul(m, x)[i][j] - rhs[i][j]).is_zero() for i in range(3) for j in range(3))


def test_det_multiplicative(F):
    rng = random.Random(2)
    for _ in range(5):
        a = rand_mat(F, rng, 2)
        b = rand_mat(F, rng, 2)
        lhs = mat_det(mat_mul(a, b))
        rhs = mat_det(a) * mat_det(b)
        assert (lhs - rhs).is_zero()


def test_singular_raises(F):
    z = CinfElem.zero(F, N, PU * N)
    one = CinfElem.const(F, N, PU * N, F.one)
    with pytest.raises(SingularMatrixError):
        mat_inv([[one, one], [one, one]])


def test_kron_identities_brute_force(F):
    # the defining equations of the vectorization operators, on explicit
    # small matrices
    rng = random.Random(3)
    for n in (2, 3):
        a = rand_mat(F, rng, n)
        m = rand_mat(F, rng, n)
        va = mat_mul(kron_left(a), [[x] for x in vec_rowmajor(m)])
        direct = vec_rowmajor(mat_mul(a, m))
        for got, want in zip(va, direct):
            assert (got[0] - want).is_zero()
        vb = mat_mul(kron_right(a), [[x] for x in vec_rowmajor(m)])
        direct = vec_rowmajor(mat_mul(m, a))
        for got, want in zip(vb, direct):
            assert (got[0] - want).is_zero()
        assert unvec_rowmajor(vec_rowmajor(m), n) == m


def test_pm_det_2x2(F):
    th = theta(F, N, PU)
    one = CinfElem.const(F, N, PU * N, F.one)
    m = [[PolyT.t_minus(th), PolyT.const(th)],
         [PolyT(F), PolyT.t_minus(th)]]
    d = pm_det(m)
    # (T - th)^2 = T^2 - 2 th T + th^2
    assert d.degree() == 2
    assert d.coeffs[0].same_terms(th * th)
    assert d.coeffs[1].same_terms(th.scale(F.scalar(-2)))
