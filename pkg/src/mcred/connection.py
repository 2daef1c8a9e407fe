"""Meromorphic connections on the formal punctured disk.

A connection is ``d + G(u) du`` where ``G`` is a square matrix of truncated
Laurent series in the local variable ``u``, with ``u**ram = t``.  The stored
matrix is always the ``du``-coefficient *in the current variable*; pulling
back along ``u = w**b`` (:meth:`Connection.ramify`) rewrites it accordingly,
including the Jacobian factor ``b * w**(b-1)``.

The gauge action used throughout is

    gauge_g(G) = g G g^{-1} - (dg/du) g^{-1},

i.e. ``g`` carries old coordinates to new ones.  It composes covariantly:
``gauge_{gh} = gauge_g . gauge_h``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import DomainViolation, NotBlockDiagonal
from .field import FieldElement, FieldTower
from .matrices import LaurentMatrix, block_diag
from .series import INF, LaurentSeries


class Connection:
    """``d + G(u) du`` with ``G`` an n-by-n truncated Laurent series matrix."""

    __slots__ = ("matrix",)

    def __init__(self, matrix: LaurentMatrix):
        if matrix.nrows != matrix.ncols:
            raise DomainViolation("connection matrices must be square")
        self.matrix = matrix

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_coeff_map(cls, tower: FieldTower, coeff_map, size: int,
                       prec=INF, ram: int = 1) -> "Connection":
        return cls(LaurentMatrix.from_coeff_map(tower, coeff_map, size, prec, ram))

    @classmethod
    def zero(cls, tower: FieldTower, size: int, ram: int = 1) -> "Connection":
        return cls(LaurentMatrix.zero(tower, size, None, ram))

    @classmethod
    def direct_sum(cls, parts: Sequence["Connection"]) -> "Connection":
        return cls(block_diag([p.matrix for p in parts]))

    # -- inspection -------------------------------------------------------------

    @property
    def tower(self) -> FieldTower:
        return self.matrix.tower

    @property
    def ram(self) -> int:
        return self.matrix.ram

    @property
    def size(self) -> int:
        return self.matrix.size

    @property
    def prec(self):
        return self.matrix.prec

    @property
    def valuation(self):
        return self.matrix.valuation

    @property
    def pole_order(self):
        """``r`` with ``G = G_{-r} u^{-r} + ...`` (may be <= 0 when regular)."""
        v = self.valuation
        return -v if v is not INF else -INF

    def coeff(self, exp: int) -> list:
        """Scalar matrix of ``u**exp`` coefficients."""
        return self.matrix.coeff_matrix(exp)

    def leading(self) -> list:
        """The scalar matrix at the pole order (the lowest known exponent)."""
        v = self.valuation
        if v is INF or v == self.prec:
            raise DomainViolation("no nonzero coefficient in the known window")
        return self.coeff(v)

    def residue(self) -> list:
        """``du``-coefficient at ``u**-1`` (divide by ``ram`` for dt/t units)."""
        return self.coeff(-1)

    # -- housekeeping -------------------------------------------------------------

    def truncate(self, prec) -> "Connection":
        return Connection(self.matrix.truncate(prec))

    def with_tower(self, tower: FieldTower) -> "Connection":
        return Connection(self.matrix.with_tower(tower))

    def map_coefficients(self, tower: FieldTower, fn) -> "Connection":
        return Connection(self.matrix.map_coefficients(tower, fn))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Connection):
            return NotImplemented
        return self.matrix == other.matrix

    __hash__ = None  # type: ignore[assignment]

    def coincides_with(self, other: "Connection") -> bool:
        return self.matrix.coincides_with(other.matrix)

    def __repr__(self) -> str:
        return f"Connection(ram={self.ram}, size={self.size}, G={self.matrix!r})"

    # -- the three reduction moves ---------------------------------------------

    def gauge(self, g: LaurentMatrix, prec_cap=None) -> "Connection":
        """Apply ``gauge_g``: ``g G g^{-1} - (dg/du) g^{-1}``.

        ``prec_cap`` caps the inversion of ``g`` when that inversion does not
        terminate (exact ``g`` with non-monomial determinant); truncated or
        monomial-determinant gauges never need it.
        """
        if g.nrows != g.ncols or g.nrows != self.size:
            raise DomainViolation("gauge shape does not match the connection")
        gi = g.inverse(prec_cap)
        new = g * self.matrix * gi - g.derivative() * gi
        return Connection(new)

    def ramify(self, b: int) -> "Connection":
        """Pull back along ``u = w**b`` (so ``w**(b*ram) = t``).

        Exponents map ``i -> b*i + b - 1`` and the matrix is scaled by ``b``;
        a pole of order ``r`` becomes one of order ``b*(r-1) + 1``.
        """
        if not isinstance(b, int) or b < 1:
            raise DomainViolation("ramification degree must be a positive int")
        if b == 1:
            return self
        m = self.matrix.lift_ramification(b).shift(b - 1) * b
        return Connection(m)

    def scalar_twist(self, phi) -> "Connection":
        """Add ``phi * I`` to the matrix (twist by the rank-one ``d + phi du``)."""
        if isinstance(phi, (int, Fraction, FieldElement)):
            phi = LaurentSeries.constant(self.tower, phi, self.ram)
        if not isinstance(phi, LaurentSeries):
            raise DomainViolation("scalar twists take a Laurent series")
        twist = LaurentMatrix.diagonal(self.tower, [phi] * self.size, phi.ram)
        return Connection(self.matrix + twist)

    # -- block structure -----------------------------------------------------------

    def block_split(self, sizes: Sequence[int]) -> list:
        """Split a block-diagonal connection into its diagonal blocks.

        Off-diagonal blocks must vanish on the whole known window.
        """
        if sum(sizes) != self.size or any(s < 1 for s in sizes):
            raise DomainViolation("block sizes must be positive and sum to n")
        bounds = [0]
        for s in sizes:
            bounds.append(bounds[-1] + s)
        for bi in range(len(sizes)):
            for bj in range(len(sizes)):
                if bi == bj:
                    continue
                for i in range(bounds[bi], bounds[bi + 1]):
                    for j in range(bounds[bj], bounds[bj + 1]):
                        if not self.matrix.entry(i, j).is_zero_to_precision():
                            raise NotBlockDiagonal(
                                f"entry ({i}, {j}) is nonzero across blocks"
                            )
        parts = []
        for bi in range(len(sizes)):
            idx = list(range(bounds[bi], bounds[bi + 1]))
            parts.append(Connection(self.matrix.submatrix(idx, idx)))
        return parts

    # -- the covariant derivative ----------------------------------------------------

    def apply_nabla(self, v: LaurentMatrix) -> LaurentMatrix:
        """``du``-coefficient of the covariant derivative of a column (or a
        matrix of columns): ``dv/du + G v``."""
        if v.nrows != self.size:
            raise DomainViolation("section has the wrong number of rows")
        return v.derivative() + self.matrix * v
