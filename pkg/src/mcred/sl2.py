"""sl2 structure adapted to a nilpotent matrix.

Jordan chains are extracted greedily from the kernel filtration of the
nilpotent matrix ``f`` (longest chains first, deterministically).  The chain
basis carries the standard triple: ``f`` acts as the lowering operator, ``h``
as the integer weight grading, and ``e`` as the raising operator with
``e . f^i v = i (k - i) f^(i-1) v`` on a chain of length ``k``.  Conjugating
back gives an honest triple ``[e, f] = h``, ``[h, e] = 2e``, ``[h, f] = -2f``
through the original ``f`` (the zero matrix gets the zero triple).

The tail of the module is pure combinatorics of nilpotent orbits: partitions,
orbit dimensions via the transpose partition, and the largest weight spread
among orbits of a given dimension.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from . import linalg
from .errors import EngineError, NotNilpotent


def nilpotency_order(f: Sequence[Sequence]) -> int:
    """Least ``d`` with ``f**d = 0``; raises :class:`NotNilpotent` otherwise."""
    n = len(f)
    tower, _ = linalg._context(f)
    power = linalg.identity(tower, n)
    for d in range(n + 1):
        if linalg.is_zero_matrix(power):
            return d
        power = linalg.mat_mul(power, f)
    raise NotNilpotent("matrix is not nilpotent")


def _complete_basis(have: list, candidates: list) -> list:
    """Members of ``candidates`` that greedily extend ``span(have)``."""
    rows = [list(v) for v in have]
    base_rank = linalg.rank(rows) if rows else 0
    chosen = []
    for cand in candidates:
        trial = rows + [list(cand)]
        if linalg.rank(trial) > base_rank + len(chosen):
            rows = trial
            chosen.append(cand)
    return chosen


def jordan_chains(f: Sequence[Sequence]) -> list:
    """Jordan chains ``[v, f v, ..., f^(k-1) v]`` of a nilpotent ``f``.

    Chains come out ordered by decreasing length.  Tops of length-``j``
    chains are chosen to complete ``ker(f^(j-1))`` plus the pushed-down
    vectors of the longer chains inside ``ker(f^j)``.
    """
    n = len(f)
    d = nilpotency_order(f)
    if d == 0:  # pragma: no cover - only for n = 0, which matrices exclude
        return []
    power = None
    kernels = [[]]
    for j in range(1, d + 1):
        power = f if power is None else linalg.mat_mul(power, f)
        kernels.append(linalg.nullspace(power))
    if len(kernels[d]) != n:  # pragma: no cover
        raise EngineError("kernel filtration of a nilpotent matrix is broken")
    chains: list = []
    for j in range(d, 0, -1):
        carried = [ch[len(ch) - j] for ch in chains]
        for top in _complete_basis(kernels[j - 1] + carried, kernels[j]):
            chain = [top]
            for _ in range(j - 1):
                chain.append(linalg.mat_vec(f, chain[-1]))
            chains.append(chain)
    if sum(len(ch) for ch in chains) != n:  # pragma: no cover
        raise EngineError("Jordan chains do not form a basis")
    return chains


@dataclass
class Sl2Triple:
    """``[e, f] = h`` through a prescribed nilpotent ``f``, plus the chain
    basis ``P`` (columns), the weight of each basis column, and the chain
    lengths."""

    e: list
    h: list
    f: list
    basis: list
    weights: list
    block_sizes: list


def chain_basis_triple(tower, sizes: Sequence[int]) -> tuple:
    """Standard ``(e, h, f)`` for chains of the given lengths.

    In a basis ``c_0, ..., c_{k-1}`` per chain: ``f`` shifts down the chain
    (ones on the subdiagonal), ``h`` is diagonal with weights ``k - 1 - 2i``,
    and ``e`` raises with coefficients ``i (k - i)``.
    """
    n = sum(sizes)
    e_std = linalg.zeros(tower, n, n)
    h_std = linalg.zeros(tower, n, n)
    f_std = linalg.zeros(tower, n, n)
    offset = 0
    for k in sizes:
        for i in range(k):
            h_std[offset + i][offset + i] = tower.rational(k - 1 - 2 * i)
            if i >= 1:
                e_std[offset + i - 1][offset + i] = tower.rational(i * (k - i))
                f_std[offset + i][offset + i - 1] = tower.one()
        offset += k
    return e_std, h_std, f_std


def jacobson_morozov(f: Sequence[Sequence]) -> Sl2Triple:
    n = len(f)
    tower, _ = linalg._context(f)
    chains = jordan_chains(f)
    sizes = [len(ch) for ch in chains]
    cols = [v for ch in chains for v in ch]
    p = [[cols[j][i] for j in range(n)] for i in range(n)]
    p_inv = linalg.inverse(p)
    weights = [k - 1 - 2 * i for k in sizes for i in range(k)]
    e_std, h_std, _ = chain_basis_triple(tower, sizes)
    e = linalg.mat_mul(p, linalg.mat_mul(e_std, p_inv))
    h = linalg.mat_mul(p, linalg.mat_mul(h_std, p_inv))
    if not linalg.mat_eq(linalg.commutator(e, f), h):  # pragma: no cover
        raise EngineError("triple construction failed: [e, f] != h")
    if not linalg.mat_eq(linalg.commutator(h, e), linalg.mat_scale(2, e)):  # pragma: no cover
        raise EngineError("triple construction failed: [h, e] != 2e")
    if not linalg.mat_eq(linalg.commutator(h, f), linalg.mat_scale(-2, f)):  # pragma: no cover
        raise EngineError("triple construction failed: [h, f] != -2f")
    return Sl2Triple(e, h, f, p, weights, sizes)


# ---------------------------------------------------------------------------
# weight gradings in a fixed diagonal basis of h
# ---------------------------------------------------------------------------


def graded_component(m: Sequence[Sequence], weights: Sequence[int], j: int) -> list:
    """Entries of ``m`` with weight difference ``w_a - w_b`` exactly ``j``
    (the degree-``j`` piece of the ad-h grading, read in the chain basis)."""
    n = len(m)
    tower, _ = linalg._context(m)
    zero = tower.zero()
    return [
        [m[a][b] if weights[a] - weights[b] == j else zero for b in range(n)]
        for a in range(n)
    ]


def grading_support(m: Sequence[Sequence], weights: Sequence[int]) -> list:
    """The sorted weights ``j`` with a nonzero degree-``j`` component."""
    n = len(m)
    out = set()
    for a in range(n):
        for b in range(n):
            if not m[a][b].is_zero():
                out.add(weights[a] - weights[b])
    return sorted(out)


# ---------------------------------------------------------------------------
# nilpotent orbit combinatorics
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def partitions(n: int) -> tuple:
    """All partitions of ``n`` as descending tuples."""

    def gen(remaining: int, cap: int):
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, cap), 0, -1):
            for rest in gen(remaining - first, first):
                yield (first,) + rest

    return tuple(gen(n, n))


def transpose_partition(shape: Sequence[int]) -> tuple:
    if not shape:
        return ()
    return tuple(
        sum(1 for part in shape if part >= k) for k in range(1, shape[0] + 1)
    )


def orbit_dim(shape: Sequence[int], n: int) -> int:
    """Dimension of the conjugation orbit of a nilpotent with Jordan type
    ``shape``: ``n^2`` minus the centralizer dimension ``sum((shape^t)_k^2)``."""
    if sum(shape) != n:
        raise EngineError("partition does not match the matrix size")
    return n * n - sum(k * k for k in transpose_partition(shape))


def weight_spread(shape: Sequence[int]) -> int:
    """Largest ad-h weight ``2 * (max part - 1)`` of the orbit's grading."""
    return 2 * (max(shape) - 1) if shape else 0


def realized_orbit_dims(n: int) -> list:
    """All orbit dimensions that actually occur for nilpotent n-by-n
    matrices, including 0 (the zero matrix)."""
    return sorted({orbit_dim(shape, n) for shape in partitions(n)})


def max_spread_for_dim(n: int, delta: int) -> int:
    """The largest weight spread among nilpotent orbits of dimension
    ``delta`` in gl_n."""
    spreads = [
        weight_spread(shape)
        for shape in partitions(n)
        if orbit_dim(shape, n) == delta
    ]
    if not spreads:
        raise EngineError(f"no nilpotent orbit of dimension {delta} in gl_{n}")
    return max(spreads)


def partition_of_nilpotent(f: Sequence[Sequence]) -> tuple:
    """Jordan type of a nilpotent matrix, as a descending partition."""
    return tuple(sorted((len(ch) for ch in jordan_chains(f)), reverse=True))
