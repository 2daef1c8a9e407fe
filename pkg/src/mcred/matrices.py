"""Square (and occasionally rectangular) matrices of truncated Laurent series.

All entries of one matrix share the same coefficient tower and ramification
index; the constructor normalises both.  Valuation and precision of a matrix
are the minima over its entries, which is exactly the right aggregate for the
gauge-theoretic precision bookkeeping done upstream.

Inverses go through the classical adjugate so that the only series inversion
is the determinant's; the determinant itself is computed division-free.  The
exponential and logarithm are honest about precision: for a truncated
argument of valuation >= 1 the result carries the argument's precision, and
an exact argument must be nilpotent (or given an explicit cap) because its
exponential would not terminate otherwise.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from . import linalg
from .errors import DomainViolation, NotInvertible, NotNilpotent
from .field import FieldElement, FieldTower, common_tower
from .series import INF, LaurentSeries


def _as_series(tower: FieldTower, ram: int, x) -> LaurentSeries:
    if isinstance(x, LaurentSeries):
        return x
    if isinstance(x, (int, Fraction, FieldElement)):
        return LaurentSeries.constant(tower, x, ram)
    raise DomainViolation(f"cannot use {type(x).__name__} as a matrix entry")


class LaurentMatrix:
    """A matrix with :class:`LaurentSeries` entries."""

    __slots__ = ("tower", "ram", "entries")

    def __init__(self, tower: FieldTower, entries: Sequence[Sequence], ram: int = 1):
        rows = [list(r) for r in entries]
        if not rows or not rows[0]:
            raise DomainViolation("matrices must have at least one entry")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DomainViolation("ragged matrix")
        # first pass: find the common tower and ramification
        for r in rows:
            for x in r:
                if isinstance(x, LaurentSeries):
                    tower = common_tower(tower, x.tower)
                    g = math.gcd(ram, x.ram)
                    ram = ram // g * x.ram
                elif isinstance(x, FieldElement):
                    tower = common_tower(tower, x.tower)
        normalised = []
        for r in rows:
            out = []
            for x in r:
                s = _as_series(tower, ram, x)
                s = s.lift_ramification(ram // s.ram).with_tower(tower)
                out.append(s)
            normalised.append(out)
        self.tower = tower
        self.ram = ram
        self.entries = normalised

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, tower: FieldTower, rows: int, cols: int | None = None, ram: int = 1):
        cols = rows if cols is None else cols
        z = LaurentSeries.zero(tower, ram)
        return cls(tower, [[z] * cols for _ in range(rows)], ram)

    @classmethod
    def identity(cls, tower: FieldTower, n: int, ram: int = 1):
        z = LaurentSeries.zero(tower, ram)
        one = LaurentSeries.one(tower, ram)
        return cls(
            tower, [[one if i == j else z for j in range(n)] for i in range(n)], ram
        )

    @classmethod
    def constant(cls, tower: FieldTower, rows: Sequence[Sequence], ram: int = 1):
        """Exact matrix of constants (ints, Fractions or field elements)."""
        return cls(
            tower,
            [[LaurentSeries.constant(tower, x, ram) for x in r] for r in rows],
            ram,
        )

    @classmethod
    def diagonal(cls, tower: FieldTower, diag: Sequence, ram: int = 1):
        n = len(diag)
        z = LaurentSeries.zero(tower, ram)
        rows = [[z] * n for _ in range(n)]
        for i, d in enumerate(diag):
            rows[i][i] = _as_series(tower, ram, d)
        return cls(tower, rows, ram)

    @classmethod
    def monomial_diagonal(cls, tower: FieldTower, exps: Sequence[int], ram: int = 1):
        """``diag(u**e_1, ..., u**e_n)`` -- the standard shearing gauge."""
        return cls.diagonal(
            tower,
            [LaurentSeries.monomial(tower, 1, e, ram) for e in exps],
            ram,
        )

    @classmethod
    def from_coeff_map(cls, tower: FieldTower, coeff_map, size: int,
                       prec=INF, ram: int = 1):
        """Build from ``{exponent: scalar matrix}`` with one shared precision."""
        grids: dict[int, list] = {}
        for exp, grid in coeff_map.items():
            grids[exp] = [[tower.coerce(x) for x in row] for row in grid]
        rows = []
        for i in range(size):
            row = []
            for j in range(size):
                coeffs = {e: g[i][j] for e, g in grids.items()}
                row.append(LaurentSeries(tower, coeffs, prec, ram))
            rows.append(row)
        return cls(tower, rows, ram)

    # -- shape and access ------------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.entries[0])

    @property
    def size(self) -> int:
        if self.nrows != self.ncols:
            raise DomainViolation("matrix is not square")
        return self.nrows

    def entry(self, i: int, j: int) -> LaurentSeries:
        return self.entries[i][j]

    @property
    def valuation(self):
        return min(s.valuation for r in self.entries for s in r)

    @property
    def prec(self):
        return min(s.prec for r in self.entries for s in r)

    def support(self) -> list[int]:
        exps = {e for r in self.entries for s in r for e in s.coeffs}
        return sorted(exps)

    def coeff_matrix(self, exp: int) -> list:
        """The scalar matrix of ``u**exp`` coefficients (entries must know it)."""
        return [[s.coeff(exp) for s in r] for r in self.entries]

    def is_zero(self) -> bool:
        return all(s.is_zero() for r in self.entries for s in r)

    def is_zero_to_precision(self) -> bool:
        return all(s.is_zero_to_precision() for r in self.entries for s in r)

    def is_exact(self) -> bool:
        return all(s.is_exact() for r in self.entries for s in r)

    # -- housekeeping ------------------------------------------------------------

    def truncate(self, prec) -> "LaurentMatrix":
        return LaurentMatrix(
            self.tower, [[s.truncate(prec) for s in r] for r in self.entries], self.ram
        )

    def lift_ramification(self, m: int) -> "LaurentMatrix":
        return LaurentMatrix(
            self.tower,
            [[s.lift_ramification(m) for s in r] for r in self.entries],
            self.ram * m,
        )

    def with_tower(self, tower: FieldTower) -> "LaurentMatrix":
        tower = common_tower(self.tower, tower)
        return LaurentMatrix(
            tower, [[s.with_tower(tower) for s in r] for r in self.entries], self.ram
        )

    def map_coefficients(self, tower: FieldTower, fn) -> "LaurentMatrix":
        return LaurentMatrix(
            tower,
            [[s.map_coefficients(tower, fn) for s in r] for r in self.entries],
            self.ram,
        )

    def transpose(self) -> "LaurentMatrix":
        return LaurentMatrix(
            self.tower,
            [[self.entries[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
            self.ram,
        )

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "LaurentMatrix":
        return LaurentMatrix(
            self.tower,
            [[self.entries[i][j] for j in col_idx] for i in row_idx],
            self.ram,
        )

    # -- arithmetic ---------------------------------------------------------------

    def _align(self, other: "LaurentMatrix") -> tuple["LaurentMatrix", "LaurentMatrix"]:
        tower = common_tower(self.tower, other.tower)
        a, b = self, other
        if a.ram != b.ram:
            g = math.gcd(a.ram, b.ram)
            lcm = a.ram // g * b.ram
            a = a.lift_ramification(lcm // a.ram)
            b = b.lift_ramification(lcm // b.ram)
        return a.with_tower(tower), b.with_tower(tower)

    def __add__(self, other):
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        a, b = self._align(other)
        if (a.nrows, a.ncols) != (b.nrows, b.ncols):
            raise DomainViolation("matrix shapes differ in addition")
        return LaurentMatrix(
            a.tower,
            [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a.entries, b.entries)],
            a.ram,
        )

    def __sub__(self, other):
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return LaurentMatrix(
            self.tower, [[-s for s in r] for r in self.entries], self.ram
        )

    def __mul__(self, other):
        if isinstance(other, LaurentMatrix):
            a, b = self._align(other)
            if a.ncols != b.nrows:
                raise DomainViolation("matrix shapes incompatible in product")
            out = []
            for i in range(a.nrows):
                row = []
                for j in range(b.ncols):
                    acc = a.entries[i][0] * b.entries[0][j]
                    for k in range(1, a.ncols):
                        acc = acc + a.entries[i][k] * b.entries[k][j]
                    row.append(acc)
                out.append(row)
            return LaurentMatrix(a.tower, out, a.ram)
        if isinstance(other, (int, Fraction, FieldElement, LaurentSeries)):
            return LaurentMatrix(
                self.tower, [[s * other for s in r] for r in self.entries], self.ram
            )
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, FieldElement, LaurentSeries)):
            return self * other
        return NotImplemented

    def scale(self, factor) -> "LaurentMatrix":
        return self * factor

    def shift(self, k: int) -> "LaurentMatrix":
        return LaurentMatrix(
            self.tower, [[s.shift(k) for s in r] for r in self.entries], self.ram
        )

    def derivative(self) -> "LaurentMatrix":
        """Entrywise derivative with respect to the local variable ``u``."""
        return LaurentMatrix(
            self.tower, [[s.derivative() for s in r] for r in self.entries], self.ram
        )

    def trace(self) -> LaurentSeries:
        n = self.size
        acc = self.entries[0][0]
        for i in range(1, n):
            acc = acc + self.entries[i][i]
        return acc

    # -- comparison ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            return False
        a, b = self._align(other)
        return all(
            x == y for ra, rb in zip(a.entries, b.entries) for x, y in zip(ra, rb)
        )

    __hash__ = None  # type: ignore[assignment]

    def coincides_with(self, other: "LaurentMatrix") -> bool:
        """Entrywise agreement on each pair's common known window."""
        a, b = self._align(other)
        if (a.nrows, a.ncols) != (b.nrows, b.ncols):
            return False
        return all(
            x.coincides_with(y)
            for ra, rb in zip(a.entries, b.entries)
            for x, y in zip(ra, rb)
        )

    # -- inversion ---------------------------------------------------------------

    def det(self) -> LaurentSeries:
        n = self.size  # noqa: F841  (shape check)
        return linalg.det(self.entries)

    def inverse(self, prec_cap=None) -> "LaurentMatrix":
        """Inverse via the adjugate; the determinant is the only inversion.

        ``prec_cap`` is forwarded to the determinant's series inverse, which
        is only needed when the matrix is exact with a non-monomial
        determinant (a truncated determinant caps itself).
        """
        n = self.size
        d = self.det()
        d_inv = d.inverse(prec_cap)
        if n == 1:
            return LaurentMatrix(self.tower, [[d_inv]], self.ram)
        adj = linalg.adjugate(self.entries)
        return LaurentMatrix(
            self.tower, [[s * d_inv for s in r] for r in adj], self.ram
        )

    def __repr__(self) -> str:
        rows = [", ".join(repr(s) for s in r) for r in self.entries]
        return "LaurentMatrix[\n  " + "\n  ".join(rows) + "\n]"


def block_diag(blocks: Sequence[LaurentMatrix]) -> LaurentMatrix:
    if not blocks:
        raise DomainViolation("block_diag needs at least one block")
    tower = blocks[0].tower
    ram = blocks[0].ram
    for b in blocks[1:]:
        tower = common_tower(tower, b.tower)
        g = math.gcd(ram, b.ram)
        ram = ram // g * b.ram
    blocks = [b.lift_ramification(ram // b.ram).with_tower(tower) for b in blocks]
    total = sum(b.size for b in blocks)
    z = LaurentSeries.zero(tower, ram)
    rows = [[z] * total for _ in range(total)]
    offset = 0
    for b in blocks:
        for i in range(b.size):
            for j in range(b.size):
                rows[offset + i][offset + j] = b.entries[i][j]
        offset += b.size
    return LaurentMatrix(tower, rows, ram)


def matrix_exp(xi: LaurentMatrix, prec_cap=None) -> LaurentMatrix:
    """``exp(xi)`` for ``valuation(xi) >= 1``.

    A truncated argument with precision ``p`` yields a result with precision
    ``p`` (terms ``xi**k / k!`` have valuation ``>= k`` and stop mattering).
    An exact argument must be nilpotent unless ``prec_cap`` limits the output.
    """
    n = xi.size
    if xi.valuation < 1:
        raise DomainViolation("matrix exponential requires valuation >= 1")
    if xi.is_exact():
        if prec_cap is not None:
            return matrix_exp(xi.truncate(prec_cap))
        result = LaurentMatrix.identity(xi.tower, n, xi.ram)
        power = xi
        k = 1
        fact = 1
        while not power.is_zero():
            if k > n:
                raise NotNilpotent(
                    "exponential of an exact non-nilpotent argument does not "
                    "terminate; pass prec_cap"
                )
            result = result + power * Fraction(1, fact)
            k += 1
            fact *= k
            power = power * xi
        return result
    p = xi.prec
    result = LaurentMatrix.identity(xi.tower, n, xi.ram).truncate(p)
    power = xi
    k = 1
    fact = 1
    while k < p and not power.is_zero_to_precision():
        result = result + power * Fraction(1, fact)
        k += 1
        fact *= k
        power = power * xi
    return result.truncate(p)


def matrix_log(g: LaurentMatrix, prec_cap=None) -> LaurentMatrix:
    """``log(g)`` for ``g = 1 + x`` with ``valuation(x) >= 1``.

    Mirror image of :func:`matrix_exp`, with the same precision contract.
    """
    n = g.size
    x = g - LaurentMatrix.identity(g.tower, n, g.ram)
    if x.valuation < 1:
        raise DomainViolation("matrix logarithm requires g = 1 + O(u)")
    if x.is_exact():
        if prec_cap is not None:
            return matrix_log(g.truncate(prec_cap))
        result = LaurentMatrix.zero(x.tower, n, None, x.ram)
        power = x
        k = 1
        while not power.is_zero():
            if k > n:
                raise NotNilpotent(
                    "logarithm of an exact non-unipotent argument does not "
                    "terminate; pass prec_cap"
                )
            result = result + power * Fraction((-1) ** (k + 1), k)
            k += 1
            power = power * x
        return result
    p = x.prec
    result = LaurentMatrix.zero(x.tower, n, None, x.ram).truncate(p)
    power = x
    k = 1
    while k < p and not power.is_zero_to_precision():
        result = result + power * Fraction((-1) ** (k + 1), k)
        k += 1
        power = power * x
    return result.truncate(p)


def dlog(g: LaurentMatrix, prec_cap=None) -> LaurentMatrix:
    """Logarithmic derivative ``(dg/dt) g^{-1}`` in the *t* coordinate.

    For a ramified matrix (``u**ram = t``) this is
    ``u^(1-ram)/ram * (dg/du) g^{-1}``.
    """
    inv = g.inverse(prec_cap)
    out = g.derivative() * inv
    if g.ram != 1:
        out = out.shift(1 - g.ram) * Fraction(1, g.ram)
    return out
