from fractions import Fraction

import pytest

from mcred.connection import Connection
from mcred.errors import ScalarLeadingTerm
from mcred.field import FieldTower
from mcred.leading import (
    eigen_block_split,
    is_scalar_matrix,
    jordan_chevalley,
    rational_roots,
    sibuya_normalize,
    splitting_from_semisimple,
)
from mcred.matrices import LaurentMatrix
from mcred.series import LaurentSeries

QQ = FieldTower()


def S(coeffs, **kw):
    return LaurentSeries(QQ, coeffs, **kw)


def grid(rows):
    return [[QQ.coerce(x) for x in row] for row in rows]


def _mat_mul(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), QQ.zero())
             for j in range(n)] for i in range(n)]


def _grids_equal(a, b):
    return all((x - y).is_zero() for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def test_jordan_chevalley_classical_jordan_block():
    m = grid([[2, 1], [0, 2]])
    jp = jordan_chevalley(m)
    assert _grids_equal(jp.semisimple, grid([[2, 0], [0, 2]]))
    assert _grids_equal(jp.nilpotent, grid([[0, 1], [0, 0]]))


def test_jordan_chevalley_distinct_eigenvalues_is_semisimple():
    m = grid([[1, 1], [0, 2]])
    jp = jordan_chevalley(m)
    assert all(x.is_zero() for row in jp.nilpotent for x in row)
    assert _grids_equal(jp.semisimple, m)


def test_jordan_chevalley_needs_no_eigenvalues():
    # x^2 - 2 is irreducible over the rationals; the matrix is semisimple
    # and the decomposition must see that without adjoining anything
    m = grid([[0, 1], [2, 0]])
    jp = jordan_chevalley(m)
    assert all(x.is_zero() for row in jp.nilpotent for x in row)


def test_jordan_chevalley_parts_commute_and_sum():
    m = grid([[3, 1, 0], [0, 3, 0], [0, 4, 7]])
    jp = jordan_chevalley(m)
    s, n = jp.semisimple, jp.nilpotent
    total = [[s[i][j] + n[i][j] for j in range(3)] for i in range(3)]
    assert _grids_equal(total, m)
    assert _grids_equal(_mat_mul(s, n), _mat_mul(n, s))
    # nilpotent part actually vanishes when raised to the size
    power = n
    for _ in range(2):
        power = _mat_mul(power, n)
    assert all(x.is_zero() for row in power for x in row)
    # the semisimple part of a semisimple matrix is itself
    again = jordan_chevalley(s)
    assert all(x.is_zero() for row in again.nilpotent for x in row)


def test_rational_roots():
    # x(x - 2)
    assert rational_roots([QQ.zero(), QQ.rational(-2), QQ.one()]) == [0, 2]
    # 2x^2 - x  has roots 0 and 1/2
    roots = rational_roots([QQ.zero(), QQ.rational(-1), QQ.rational(2)])
    assert roots == [0, Fraction(1, 2)]
    # x^2 - 2 has none
    assert rational_roots([QQ.rational(-2), QQ.zero(), QQ.one()]) == []


def test_is_scalar_matrix():
    assert is_scalar_matrix(grid([[3, 0], [0, 3]]))
    assert not is_scalar_matrix(grid([[3, 0], [0, 2]]))
    assert not is_scalar_matrix(grid([[3, 1], [0, 3]]))


def test_split_rejects_scalar_semisimple_part():
    c = Connection(LaurentMatrix(QQ, [[S({-2: 5}), S({})],
                                      [S({}), S({-2: 5})]]).truncate(0))
    with pytest.raises(ScalarLeadingTerm):
        eigen_block_split(c, c.leading())


def _sample(prec=2):
    m = LaurentMatrix(QQ, [
        [S({-2: 1, -1: 2}), S({-1: 3, 0: 1})],
        [S({-1: 1, 1: 4}), S({-2: -1, 0: 5})],
    ])
    return Connection(m.truncate(prec))


def test_sibuya_normalize_pushes_tails_into_kernel():
    c = _sample()
    rec = sibuya_normalize(c, splitting_from_semisimple(c.leading()))
    lead = rec.connection.leading()
    # every known coefficient above the lead commutes with the lead
    r = rec.connection.pole_order
    for e in range(-r + 1, rec.connection.prec):
        coeff = rec.connection.coeff(e)
        bracket = [[QQ.zero()] * 2 for _ in range(2)]
        lc = _mat_mul(lead, coeff)
        cl = _mat_mul(coeff, lead)
        assert _grids_equal(lc, cl), f"coefficient at {e} escapes the kernel"


def test_sibuya_normalize_is_a_recorded_gauge():
    c = _sample()
    rec = sibuya_normalize(c, splitting_from_semisimple(c.leading()))
    assert c.gauge(rec.gauge).matrix.coincides_with(rec.connection.matrix)


def test_sibuya_locality():
    # the step-i correction depends only on coefficients up to -r + i, so a
    # perturbation strictly above -r + 2 cannot change the first two steps
    c = _sample(prec=3)
    bumped = Connection(
        (c.matrix + LaurentMatrix(QQ, [[S({}), S({1: 7})], [S({}), S({})]])
         ).truncate(3))
    rec = sibuya_normalize(c, splitting_from_semisimple(c.leading()))
    rec2 = sibuya_normalize(bumped, splitting_from_semisimple(bumped.leading()))
    assert str(rec.corrections[0]) == str(rec2.corrections[0])
    assert str(rec.corrections[1]) == str(rec2.corrections[1])
    assert str(rec.corrections[2]) != str(rec2.corrections[2])


def test_eigen_block_split_rational_eigenvalues():
    m = LaurentMatrix(QQ, [[S({-2: 0}), S({-2: 1})], [S({-2: 1}), S({})]])
    c = Connection(m.truncate(1))
    rec = sibuya_normalize(c, splitting_from_semisimple(c.leading()))
    out = eigen_block_split(rec.connection, rec.connection.leading())
    assert out.sizes == [1, 1]
    assert out.tower.depth == 0      # +-1 need no extension
    joined = Connection.direct_sum(out.blocks)
    moved = rec.connection.gauge(out.transform)
    assert moved.matrix.coincides_with(joined.matrix)


def test_eigen_block_split_adjoins_a_root_when_needed():
    m = LaurentMatrix(QQ, [[S({}), S({-2: 1})], [S({-2: 2}), S({})]])
    c = Connection(m.truncate(1))
    rec = sibuya_normalize(c, splitting_from_semisimple(c.leading()))
    out = eigen_block_split(rec.connection, rec.connection.leading())
    assert out.sizes == [1, 1]
    assert out.tower.depth == 1      # a root of x^2 - 2 was adjoined
    lead0 = out.blocks[0].leading()[0][0]
    # the adjoined root really squares to 2
    assert (lead0 * lead0 - out.tower.rational(2)).is_zero()
