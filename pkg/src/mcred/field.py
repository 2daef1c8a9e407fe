"""Exact scalars: towers of algebraic extensions of the rationals.

The base level is ``fractions.Fraction``.  Each further level adjoins a root
of a monic polynomial whose coefficients live one level down.  Minimal
polynomials are taken on trust (dynamic evaluation): inverting a zero divisor
reports the discovered factorization through :class:`ZeroDivisorSplit`
instead of ever producing a silently wrong answer.

Internally an element is a *payload*: a ``Fraction`` at level 0 and, at level
k, a tuple of level-(k-1) payloads of length ``deg(m_k)`` (coordinates in the
power basis of the adjoined root).  :class:`FieldElement` is a thin wrapper
that pairs a payload with its tower and level and provides operators.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainViolation, NotInvertible, ZeroDivisorSplit

Payload = object  # Fraction | tuple[Payload, ...]


# ---------------------------------------------------------------------------
# payload arithmetic


def _zero_payload(tower: "FieldTower", level: int) -> Payload:
    if level == 0:
        return Fraction(0)
    deg = tower.degree(level)
    below = _zero_payload(tower, level - 1)
    return tuple(below for _ in range(deg))


def _rational_payload(tower: "FieldTower", level: int, q: Fraction) -> Payload:
    if level == 0:
        return q
    deg = tower.degree(level)
    zero = _zero_payload(tower, level - 1)
    first = _rational_payload(tower, level - 1, q)
    return (first,) + tuple(zero for _ in range(deg - 1))


def _lift_payload(tower: "FieldTower", level_from: int, level_to: int, p: Payload) -> Payload:
    while level_from < level_to:
        level_from += 1
        deg = tower.degree(level_from)
        zero = _zero_payload(tower, level_from - 1)
        p = (p,) + tuple(zero for _ in range(deg - 1))
    return p


def _payload_is_zero(p: Payload) -> bool:
    if isinstance(p, Fraction):
        return p == 0
    return all(_payload_is_zero(c) for c in p)


def _add(tower: "FieldTower", level: int, a: Payload, b: Payload) -> Payload:
    if level == 0:
        return a + b
    return tuple(_add(tower, level - 1, x, y) for x, y in zip(a, b))


def _neg(tower: "FieldTower", level: int, a: Payload) -> Payload:
    if level == 0:
        return -a
    return tuple(_neg(tower, level - 1, x) for x in a)


def _sub(tower: "FieldTower", level: int, a: Payload, b: Payload) -> Payload:
    if level == 0:
        return a - b
    return tuple(_sub(tower, level - 1, x, y) for x, y in zip(a, b))


def _mul(tower: "FieldTower", level: int, a: Payload, b: Payload) -> Payload:
    if level == 0:
        return a * b
    deg = tower.degree(level)
    below = level - 1
    zero = _zero_payload(tower, below)
    # schoolbook product of coordinate polynomials, then reduce mod minpoly
    prod = [zero] * (2 * deg - 1)
    for i, x in enumerate(a):
        if _payload_is_zero(x):
            continue
        for j, y in enumerate(b):
            if _payload_is_zero(y):
                continue
            prod[i + j] = _add(tower, below, prod[i + j], _mul(tower, below, x, y))
    reduced = _poly_mod(tower, below, prod, list(tower.levels[level - 1]))
    reduced = reduced + [zero] * (deg - len(reduced))
    return tuple(reduced[:deg])


def _inv(tower: "FieldTower", level: int, a: Payload) -> Payload:
    if _payload_is_zero(a):
        raise NotInvertible("division by zero")
    if level == 0:
        return Fraction(1) / a
    below = level - 1
    deg = tower.degree(level)
    m = list(tower.levels[level - 1])
    # extended Euclid for gcd(a, m) over the level below
    r0, r1 = m, _poly_trim(list(a))
    t0: list[Payload] = []
    t1: list[Payload] = [_rational_payload(tower, below, Fraction(1))]
    while r1:
        q, r = _poly_divmod(tower, below, r0, r1)
        r0, r1 = r1, r
        t0, t1 = t1, _poly_sub(tower, below, t0, _poly_mul(tower, below, q, t1))
    # r0 = gcd(a, m), t0 satisfies t0*a = r0 (mod m)
    if len(r0) == 1:
        lead_inv = _inv(tower, below, r0[0])
        inv_poly = [_mul(tower, below, c, lead_inv) for c in t0]
        inv_poly = _poly_mod(tower, below, inv_poly, m)
        zero = _zero_payload(tower, below)
        inv_poly = inv_poly + [zero] * (deg - len(inv_poly))
        return tuple(inv_poly[:deg])
    # nontrivial gcd: the minimal polynomial factors
    g = _poly_monic(tower, below, r0)
    h, rem = _poly_divmod(tower, below, m, g)
    if rem:  # pragma: no cover - the gcd divides m by construction
        raise NotInvertible("exact gcd failed to divide the minimal polynomial")
    raise ZeroDivisorSplit(
        "zero divisor at tower level %d: minimal polynomial factors as a "
        "product of degrees %d and %d" % (level, len(g) - 1, len(h) - 1),
        level,
        (tuple(g), tuple(h)),
        tower,
    )


# ---------------------------------------------------------------------------
# polynomials with payload coefficients (ascending degree, trimmed)


def _poly_trim(cs: list) -> list:
    while cs and _payload_is_zero(cs[-1]):
        cs.pop()
    return cs


def _poly_add(tower, level, a: list, b: list) -> list:
    n = max(len(a), len(b))
    zero = _zero_payload(tower, level)
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else zero
        y = b[i] if i < len(b) else zero
        out.append(_add(tower, level, x, y))
    return _poly_trim(out)


def _poly_sub(tower, level, a: list, b: list) -> list:
    return _poly_add(tower, level, a, [_neg(tower, level, c) for c in b])


def _poly_mul(tower, level, a: list, b: list) -> list:
    if not a or not b:
        return []
    zero = _zero_payload(tower, level)
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if _payload_is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = _add(tower, level, out[i + j], _mul(tower, level, x, y))
    return _poly_trim(out)


def _poly_divmod(tower, level, a: list, b: list) -> tuple[list, list]:
    b = _poly_trim(list(b))
    if not b:
        raise NotInvertible("polynomial division by zero")
    lead_inv = _inv(tower, level, b[-1])
    r = list(a)
    _poly_trim(r)
    q: list = []
    zero = _zero_payload(tower, level)
    while len(r) >= len(b):
        c = _mul(tower, level, r[-1], lead_inv)
        d = len(r) - len(b)
        if len(q) < d + 1:
            q.extend([zero] * (d + 1 - len(q)))
        q[d] = _add(tower, level, q[d], c)
        for i, bc in enumerate(b):
            r[d + i] = _sub(tower, level, r[d + i], _mul(tower, level, c, bc))
        _poly_trim(r)
    return _poly_trim(q), r


def _poly_mod(tower, level, a: list, m: list) -> list:
    return _poly_divmod(tower, level, a, m)[1]


def _poly_monic(tower, level, a: list) -> list:
    a = _poly_trim(list(a))
    if not a:
        return a
    inv = _inv(tower, level, a[-1])
    return _poly_trim([_mul(tower, level, c, inv) for c in a])


# ---------------------------------------------------------------------------
# public wrapper types


class FieldTower:
    """An extension tower over the rationals.

    ``levels`` is a tuple of monic minimal polynomials; polynomial ``k``
    (0-based) defines level ``k+1`` and its coefficients are payloads at
    level ``k``, stored ascending and including the leading 1.
    """

    __slots__ = ("levels",)

    def __init__(self, levels: tuple = ()):
        self.levels = tuple(tuple(m) for m in levels)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def degree(self, level: int) -> int:
        """Degree of the extension adjoined at ``level`` (1-based)."""
        return len(self.levels[level - 1]) - 1

    def total_degree(self) -> int:
        d = 1
        for k in range(1, self.depth + 1):
            d *= self.degree(k)
        return d

    # -- construction ------------------------------------------------------

    def extend(self, minpoly: Sequence) -> "FieldTower":
        """Adjoin a root of ``minpoly`` (coefficients at the current top level).

        ``minpoly`` must be monic of degree >= 2.  Irreducibility is *not*
        checked; see module docstring.
        """
        coeffs = [self.coerce(c) for c in minpoly]
        if len(coeffs) < 3:
            raise DomainViolation("extensions must have degree >= 2")
        payloads = [c._lifted(self, self.depth).payload for c in coeffs]
        if not _payload_is_zero(_sub(self, self.depth, payloads[-1],
                                     _rational_payload(self, self.depth, Fraction(1)))):
            raise DomainViolation("minimal polynomial must be monic")
        return FieldTower(self.levels + (tuple(payloads),))

    # -- elements ----------------------------------------------------------

    def rational(self, q) -> "FieldElement":
        return FieldElement(self, 0, Fraction(q))

    def zero(self, level: int | None = None) -> "FieldElement":
        lv = self.depth if level is None else level
        return FieldElement(self, lv, _zero_payload(self, lv))

    def one(self, level: int | None = None) -> "FieldElement":
        lv = self.depth if level is None else level
        return FieldElement(self, lv, _rational_payload(self, lv, Fraction(1)))

    def gen(self, level: int | None = None) -> "FieldElement":
        """The root adjoined at ``level`` (default: the top level)."""
        lv = self.depth if level is None else level
        if lv < 1:
            raise DomainViolation("the rational level has no generator")
        deg = self.degree(lv)
        zero = _zero_payload(self, lv - 1)
        one = _rational_payload(self, lv - 1, Fraction(1))
        coords = [zero] * deg
        coords[1 if deg > 1 else 0] = one
        return FieldElement(self, lv, tuple(coords))

    def coerce(self, x) -> "FieldElement":
        """View ``x`` as an element of this tower (or of ``x``'s own tower,
        whichever is deeper -- prefix-compatible towers share payloads)."""
        if isinstance(x, FieldElement):
            target = common_tower(x.tower, self)
            return FieldElement(target, x.level, x.payload)
        if isinstance(x, (int, Fraction)):
            return self.rational(x)
        raise DomainViolation(f"cannot coerce {type(x).__name__} into the tower")

    # -- comparison --------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldTower) and self.levels == other.levels

    def __hash__(self) -> int:
        return hash(self.levels)

    def __repr__(self) -> str:
        if not self.levels:
            return "FieldTower(QQ)"
        degs = ",".join(str(self.degree(k)) for k in range(1, self.depth + 1))
        return f"FieldTower(QQ; degrees {degs})"


def _compatible(a: FieldTower, b: FieldTower) -> bool:
    short, long_ = (a, b) if a.depth <= b.depth else (b, a)
    return long_.levels[: short.depth] == short.levels


def common_tower(a: FieldTower, b: FieldTower) -> FieldTower:
    """The deeper of two prefix-compatible towers."""
    if not _compatible(a, b):
        raise DomainViolation("towers are not prefix-compatible")
    return a if a.depth >= b.depth else b


def _refinement_projector(tower: FieldTower, level: int, factor: Sequence):
    """The payload quotient map behind :func:`refine_tower`.

    Returns ``(proj, collapse)`` where ``proj(payload, lv)`` carries a
    level-``lv`` payload of ``tower`` into the refined tower.  Levels below
    the refinement are untouched; at the refined level coordinates are
    reduced modulo the factor (or evaluated at the root a linear factor pins
    down, which removes the level); levels above are rebuilt coordinatewise.
    """
    if not 1 <= level <= tower.depth:
        raise DomainViolation("refinement level out of range")
    fac = _poly_trim(list(factor))
    if len(fac) < 2:
        raise DomainViolation("refinement factor must have degree >= 1")
    collapse = len(fac) == 2
    below = level - 1
    theta = _neg(tower, below, fac[0]) if collapse else None
    deg = len(fac) - 1
    zero = _zero_payload(tower, below)

    def proj(p: Payload, lv: int) -> Payload:
        if lv < level:
            return p
        if lv == level:
            coords = list(p)
            if collapse:
                acc = zero
                for c in reversed(coords):
                    acc = _add(tower, below, _mul(tower, below, acc, theta), c)
                return acc
            reduced = _poly_mod(tower, below, coords, fac)
            return tuple((reduced + [zero] * deg)[:deg])
        return tuple(proj(c, lv - 1) for c in p)

    return proj, collapse


def refine_tower(tower: FieldTower, level: int, factor: Sequence) -> FieldTower:
    """Tower with the minimal polynomial at ``level`` replaced by a factor.

    This is the dynamic-evaluation retry step after a :class:`ZeroDivisorSplit`:
    the reported factors are monic with payload coefficients one level below
    the split.  A degree-one factor pins the adjoined root to an element of
    the level below, so that level disappears and everything above shifts
    down; the minimal polynomials above the refined level have their
    coefficients projected through the quotient map.
    """
    proj, collapse = _refinement_projector(tower, level, factor)
    fac = _poly_trim(list(factor))
    new_levels = list(tower.levels[: level - 1])
    if not collapse:
        new_levels.append(tuple(fac))
    for k in range(level + 1, tower.depth + 1):
        old_m = tower.levels[k - 1]
        new_levels.append(tuple(proj(c, k - 1) for c in old_m))
    return FieldTower(tuple(new_levels))


def project_element(x: "FieldElement", refined: FieldTower, level: int,
                    factor: Sequence) -> "FieldElement":
    """Image of ``x`` under the quotient map behind :func:`refine_tower`.

    ``refined`` must be ``refine_tower(T, level, factor)`` for a tower ``T``
    that ``x``'s own tower is a prefix of.  Elements living entirely below
    the refined level pass through unchanged.
    """
    if x.tower.depth < level:
        return x
    proj, collapse = _refinement_projector(x.tower, level, factor)
    new_level = x.level
    if x.level >= level and collapse:
        new_level -= 1
    target = refined
    if x.tower.depth > level:
        # x's tower may carry fewer upper levels than the refined reference;
        # rebuild its own refinement so degrees line up, then let coercion
        # reconcile the prefixes.
        target = refine_tower(x.tower, level, factor)
        target = common_tower(target, refined)
    return FieldElement(target, new_level, proj(x.payload, x.level))


class FieldElement:
    """An exact scalar in a :class:`FieldTower`."""

    __slots__ = ("tower", "level", "payload")

    def __init__(self, tower: FieldTower, level: int, payload: Payload):
        self.tower = tower
        self.level = level
        self.payload = payload

    # -- helpers -----------------------------------------------------------

    def _lifted(self, tower: FieldTower, level: int) -> "FieldElement":
        p = _lift_payload(tower, self.level, level, self.payload)
        return FieldElement(tower, level, p)

    @staticmethod
    def _pair(a: "FieldElement", b) -> tuple["FieldElement", "FieldElement"]:
        if isinstance(b, (int, Fraction)):
            b = a.tower.rational(b)
        if not isinstance(b, FieldElement):
            return NotImplemented, NotImplemented  # type: ignore[return-value]
        tower = common_tower(a.tower, b.tower)
        level = max(a.level, b.level)
        return a._lifted(tower, level), b._lifted(tower, level)

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return _payload_is_zero(self.payload)

    def is_rational(self) -> bool:
        return not self.flatten()[1:] or all(q == 0 for q in self.flatten()[1:])

    def flatten(self) -> tuple[Fraction, ...]:
        """Coordinates over Q in the full power basis of this element's level."""

        def walk(p: Payload) -> Iterable[Fraction]:
            if isinstance(p, Fraction):
                yield p
            else:
                for c in p:
                    yield from walk(c)

        return tuple(walk(self.payload))

    def to_fraction(self) -> Fraction:
        flat = self.flatten()
        if any(q != 0 for q in flat[1:]):
            raise DomainViolation("element is not rational")
        return flat[0]

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        a, b = FieldElement._pair(self, other)
        if a is NotImplemented:
            return NotImplemented
        return FieldElement(a.tower, a.level, _add(a.tower, a.level, a.payload, b.payload))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.tower, self.level, _neg(self.tower, self.level, self.payload))

    def __sub__(self, other):
        a, b = FieldElement._pair(self, other)
        if a is NotImplemented:
            return NotImplemented
        return FieldElement(a.tower, a.level, _sub(a.tower, a.level, a.payload, b.payload))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        a, b = FieldElement._pair(self, other)
        if a is NotImplemented:
            return NotImplemented
        return FieldElement(a.tower, a.level, _mul(a.tower, a.level, a.payload, b.payload))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        return FieldElement(self.tower, self.level, _inv(self.tower, self.level, self.payload))

    def __truediv__(self, other):
        a, b = FieldElement._pair(self, other)
        if a is NotImplemented:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse().__mul__(other)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.tower.one(self.level)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparison ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.tower.rational(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        if not _compatible(self.tower, other.tower):
            return False
        level = max(self.level, other.level)
        tower = common_tower(self.tower, other.tower)
        return (self._lifted(tower, level).payload == other._lifted(tower, level).payload)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        if self.level == 0:
            return f"{self.payload}"
        return f"FieldElement(level={self.level}, {self.payload})"


# ---------------------------------------------------------------------------
# polynomials over FieldElement (used for characteristic/minimal polynomials)


def poly_trim(cs: list[FieldElement]) -> list[FieldElement]:
    while cs and cs[-1].is_zero():
        cs.pop()
    return cs


def poly_degree(cs: Sequence[FieldElement]) -> int:
    return len(cs) - 1


def poly_add(a: list[FieldElement], b: list[FieldElement]) -> list[FieldElement]:
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        if i < len(a) and i < len(b):
            out.append(a[i] + b[i])
        elif i < len(a):
            out.append(a[i])
        else:
            out.append(b[i])
    return poly_trim(out)


def poly_sub(a: list[FieldElement], b: list[FieldElement]) -> list[FieldElement]:
    return poly_add(a, [-c for c in b])


def poly_mul(a: list[FieldElement], b: list[FieldElement]) -> list[FieldElement]:
    if not a or not b:
        return []
    zero = a[0] - a[0]
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return poly_trim(out)


def poly_divmod(a: list[FieldElement], b: list[FieldElement]) -> tuple[list[FieldElement], list[FieldElement]]:
    b = poly_trim(list(b))
    if not b:
        raise NotInvertible("polynomial division by zero")
    lead_inv = b[-1].inverse()
    r = poly_trim(list(a))
    q: list[FieldElement] = []
    zero = b[-1] - b[-1]
    while len(r) >= len(b):
        c = r[-1] * lead_inv
        d = len(r) - len(b)
        if len(q) < d + 1:
            q.extend([zero] * (d + 1 - len(q)))
        q[d] = q[d] + c
        for i, bc in enumerate(b):
            r[d + i] = r[d + i] - c * bc
        poly_trim(r)
    return poly_trim(q), r


def poly_monic(a: list[FieldElement]) -> list[FieldElement]:
    a = poly_trim(list(a))
    if not a:
        return a
    inv = a[-1].inverse()
    return poly_trim([c * inv for c in a])


def poly_gcd(a: list[FieldElement], b: list[FieldElement]) -> list[FieldElement]:
    """Monic gcd by the Euclidean algorithm."""
    r0, r1 = poly_trim(list(a)), poly_trim(list(b))
    while r1:
        _, r = poly_divmod(r0, r1)
        r0, r1 = r1, r
    return poly_monic(r0)


def poly_derivative(a: Sequence[FieldElement]) -> list[FieldElement]:
    return poly_trim([a[k] * k for k in range(1, len(a))])


def poly_squarefree_part(a: list[FieldElement]) -> list[FieldElement]:
    """``a / gcd(a, a')`` — the radical of ``a`` in characteristic zero."""
    a = poly_monic(a)
    g = poly_gcd(a, poly_derivative(a))
    q, r = poly_divmod(a, g)
    if r:  # pragma: no cover - gcd divides
        raise NotInvertible("squarefree division failed")
    return poly_monic(q)


def poly_eval(a: Sequence[FieldElement], x: FieldElement) -> FieldElement:
    acc = x.tower.zero(x.level) if isinstance(x, FieldElement) else None
    for c in reversed(list(a)):
        acc = acc * x + c
    return acc
