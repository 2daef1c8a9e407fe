"""Exact linear algebra over field-tower scalars.

Matrices are plain ``list[list[FieldElement]]`` in row-major order.  All
eliminations use the first nonzero entry as pivot, so the results are
deterministic functions of the input.  Division by a zero divisor inside an
algebraic extension raises ``ZeroDivisorSplit`` from the scalar layer; callers
that know how to refine the tower catch it, everyone else lets it propagate.

A few routines (``det``, ``adjugate``) deliberately avoid division so that
they also work verbatim over non-field coefficient rings (truncated series);
those take the ring's zero element explicitly.
"""

from __future__ import annotations

from typing import Sequence

from .errors import DomainViolation, LinearSolveFailed, NotInvertible
from .field import FieldElement, FieldTower, common_tower

Matrix = list  # list[list[FieldElement]]
Vector = list  # list[FieldElement]


# ---------------------------------------------------------------------------
# construction and shape
# ---------------------------------------------------------------------------


def mat_shape(m: Matrix) -> tuple[int, int]:
    rows = len(m)
    cols = len(m[0]) if rows else 0
    for row in m:
        if len(row) != cols:
            raise DomainViolation("ragged matrix")
    return rows, cols


def _context(m: Matrix) -> tuple[FieldTower, int]:
    """Deepest tower and highest level appearing among the entries."""
    tower = None
    level = 0
    for row in m:
        for x in row:
            tower = x.tower if tower is None else common_tower(tower, x.tower)
            level = max(level, x.level)
    if tower is None:
        raise DomainViolation("cannot infer coefficient field of an empty matrix")
    return tower, level


def zeros(tower: FieldTower, rows: int, cols: int) -> Matrix:
    return [[tower.zero() for _ in range(cols)] for _ in range(rows)]


def identity(tower: FieldTower, n: int) -> Matrix:
    m = zeros(tower, n, n)
    for i in range(n):
        m[i][i] = tower.one()
    return m


def mat_from_rows(tower: FieldTower, rows: Sequence[Sequence]) -> Matrix:
    """Coerce a nested sequence of ints/Fractions/elements into a matrix."""
    return [[tower.coerce(x) for x in row] for row in rows]


def mat_copy(m: Matrix) -> Matrix:
    return [list(row) for row in m]


def transpose(m: Matrix) -> Matrix:
    rows, cols = mat_shape(m)
    return [[m[i][j] for i in range(rows)] for j in range(cols)]


# ---------------------------------------------------------------------------
# arithmetic
# ---------------------------------------------------------------------------


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    if mat_shape(a) != mat_shape(b):
        raise DomainViolation("matrix shapes differ in addition")
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    if mat_shape(a) != mat_shape(b):
        raise DomainViolation("matrix shapes differ in subtraction")
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_neg(a: Matrix) -> Matrix:
    return [[-x for x in row] for row in a]


def mat_scale(c, a: Matrix) -> Matrix:
    return [[x * c for x in row] for row in a]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    ra, ca = mat_shape(a)
    rb, cb = mat_shape(b)
    if ca != rb:
        raise DomainViolation("matrix shapes incompatible in product")
    out = []
    for i in range(ra):
        row = []
        for j in range(cb):
            acc = a[i][0] * b[0][j]
            for k in range(1, ca):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def mat_vec(a: Matrix, v: Vector) -> Vector:
    ra, ca = mat_shape(a)
    if ca != len(v):
        raise DomainViolation("matrix/vector shapes incompatible")
    out = []
    for i in range(ra):
        acc = a[i][0] * v[0]
        for k in range(1, ca):
            acc = acc + a[i][k] * v[k]
        out.append(acc)
    return out


def mat_eq(a: Matrix, b: Matrix) -> bool:
    if mat_shape(a) != mat_shape(b):
        return False
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def is_zero_matrix(a: Matrix) -> bool:
    return all(x.is_zero() for row in a for x in row)


def trace(a: Matrix):
    n, c = mat_shape(a)
    if n != c:
        raise DomainViolation("trace of a non-square matrix")
    acc = a[0][0]
    for i in range(1, n):
        acc = acc + a[i][i]
    return acc


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def mat_pow(a: Matrix, k: int) -> Matrix:
    n, c = mat_shape(a)
    if n != c or k < 0:
        raise DomainViolation("matrix power needs a square base and k >= 0")
    tower, _ = _context(a)
    result = identity(tower, n)
    base = a
    while k:
        if k & 1:
            result = mat_mul(result, base)
        k >>= 1
        if k:
            base = mat_mul(base, base)
    return result


# ---------------------------------------------------------------------------
# elimination
# ---------------------------------------------------------------------------


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns.

    Pivoting picks the first row with a nonzero entry, so over a fixed tower
    the output is deterministic.
    """
    rows, cols = mat_shape(m)
    r = mat_copy(m)
    pivots: list[int] = []
    lead = 0
    for col in range(cols):
        if lead >= rows:
            break
        pivot_row = None
        for i in range(lead, rows):
            if not r[i][col].is_zero():
                pivot_row = i
                break
        if pivot_row is None:
            continue
        r[lead], r[pivot_row] = r[pivot_row], r[lead]
        inv = r[lead][col].inverse()
        r[lead] = [x * inv for x in r[lead]]
        for i in range(rows):
            if i != lead and not r[i][col].is_zero():
                f = r[i][col]
                r[i] = [x - f * y for x, y in zip(r[i], r[lead])]
        pivots.append(col)
        lead += 1
    return r, pivots


def rank(m: Matrix) -> int:
    if not m or not m[0]:
        return 0
    _, pivots = rref(m)
    return len(pivots)


def nullspace(m: Matrix) -> list[Vector]:
    """Basis of the right kernel, one vector per free column.

    The basis vector for free column ``f`` has a 1 in slot ``f`` and the
    negated reduced column above the pivots, so the basis is canonical.
    """
    rows, cols = mat_shape(m)
    tower, _ = _context(m)
    r, pivots = rref(m)
    pivot_set = set(pivots)
    basis = []
    for f in range(cols):
        if f in pivot_set:
            continue
        v = [tower.zero() for _ in range(cols)]
        v[f] = tower.one()
        for i, p in enumerate(pivots):
            v[p] = -r[i][f]
        basis.append(v)
    return basis


def solve(a: Matrix, b: Vector) -> Vector:
    """One solution of ``a x = b`` with every free variable set to zero.

    Raises ``LinearSolveFailed`` when the system is inconsistent.
    """
    rows, cols = mat_shape(a)
    if len(b) != rows:
        raise DomainViolation("right-hand side has the wrong length")
    tower, _ = _context(a)
    aug = [list(a[i]) + [tower.coerce(b[i])] for i in range(rows)]
    r, pivots = rref(aug)
    if cols in pivots:
        raise LinearSolveFailed("inconsistent linear system")
    x = [tower.zero() for _ in range(cols)]
    for i, p in enumerate(pivots):
        x[p] = r[i][cols]
    return x


def inverse(m: Matrix) -> Matrix:
    n, c = mat_shape(m)
    if n != c:
        raise DomainViolation("inverse of a non-square matrix")
    tower, _ = _context(m)
    aug = [list(m[i]) + identity(tower, n)[i] for i in range(n)]
    r, pivots = rref(aug)
    if pivots != list(range(n)):
        raise NotInvertible("matrix is singular")
    return [row[n:] for row in r]


def column_space_basis(m: Matrix) -> list[Vector]:
    """The pivot columns of ``m`` (a canonical basis of the image)."""
    _, pivots = rref(m)
    return [[row[p] for row in m] for p in pivots]


# ---------------------------------------------------------------------------
# division-free determinants (work over any commutative coefficient ring)
# ---------------------------------------------------------------------------


def det(m: Matrix):
    """Determinant by cofactor expansion; no divisions are performed.

    Exponential in ``n`` but the engine only ever needs small matrices, and
    avoiding division means this is safe over truncated series and never
    triggers a tower refinement.
    """
    n, c = mat_shape(m)
    if n != c:
        raise DomainViolation("determinant of a non-square matrix")
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    acc = None
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        term = m[0][j] * det(minor)
        if j % 2 == 1:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def adjugate(m: Matrix) -> Matrix:
    """Classical adjugate, division-free: ``m @ adjugate(m) == det(m) * I``."""
    n, c = mat_shape(m)
    if n != c:
        raise DomainViolation("adjugate of a non-square matrix")
    if n == 1:
        raise DomainViolation("adjugate of a 1x1 matrix needs an explicit one")
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [r[:i] + r[i + 1 :] for k, r in enumerate(m) if k != j]
            cof = det(minor)
            if (i + j) % 2 == 1:
                cof = -cof
            row.append(cof)
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# characteristic polynomial and polynomial evaluation
# ---------------------------------------------------------------------------


def charpoly(m: Matrix) -> list[FieldElement]:
    """Coefficients of ``det(x I - m)``, ascending, monic of degree ``n``.

    Faddeev-LeVerrier: only divisions by the integers ``1..n`` occur, which
    are exact in characteristic zero.
    """
    n, c = mat_shape(m)
    if n != c:
        raise DomainViolation("characteristic polynomial of a non-square matrix")
    tower, _ = _context(m)
    coeffs = [tower.zero() for _ in range(n + 1)]
    coeffs[n] = tower.one()
    mk = zeros(tower, n, n)
    for k in range(1, n + 1):
        mk = mat_mul(m, mk)
        ck = coeffs[n - k + 1]
        for i in range(n):
            mk[i][i] = mk[i][i] + ck
        coeffs[n - k] = -trace(mat_mul(m, mk)) / k
    return coeffs


def poly_at_matrix(coeffs: Sequence[FieldElement], m: Matrix) -> Matrix:
    """Evaluate a scalar polynomial (ascending coefficients) at a matrix."""
    n, c = mat_shape(m)
    if n != c:
        raise DomainViolation("polynomial evaluation at a non-square matrix")
    tower, _ = _context(m)
    out = zeros(tower, n, n)
    for ck in reversed(list(coeffs)):
        out = mat_mul(out, m)
        for i in range(n):
            out[i][i] = out[i][i] + ck
    return out


# ---------------------------------------------------------------------------
# vectorisation and the adjoint action
# ---------------------------------------------------------------------------


def vec(m: Matrix) -> Vector:
    """Row-major flattening: entry (i, j) lands in slot i*n + j."""
    return [x for row in m for x in row]


def unvec(v: Vector, rows: int, cols: int) -> Matrix:
    if len(v) != rows * cols:
        raise DomainViolation("vector length does not match the target shape")
    return [list(v[i * cols : (i + 1) * cols]) for i in range(rows)]


def ad_matrix(m: Matrix) -> Matrix:
    """Matrix of ``X -> m X - X m`` on row-major coordinates.

    Column ``a*n + b`` is ``vec([m, E_ab])``:  ``+m[i][a]`` in row ``i*n + b``
    and ``-m[b][j]`` in row ``a*n + j``.
    """
    n, c = mat_shape(m)
    if n != c:
        raise DomainViolation("adjoint action of a non-square matrix")
    tower, _ = _context(m)
    size = n * n
    out = zeros(tower, size, size)
    for a in range(n):
        for b in range(n):
            col = a * n + b
            for i in range(n):
                out[i * n + b][col] = out[i * n + b][col] + m[i][a]
            for j in range(n):
                out[a * n + j][col] = out[a * n + j][col] - m[b][j]
    return out
