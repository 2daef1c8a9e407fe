import random
from fractions import Fraction

import pytest

from mcred import checks
from mcred.connection import Connection
from mcred.errors import PrecisionExhausted
from mcred.field import FieldTower
from mcred.matrices import LaurentMatrix
from mcred.reduction import (
    KNOWN_SHARP,
    compute_alpha,
    default_working_precision,
    reduce,
    replay,
    shear,
    slodowy_prediction,
    stability_constant,
)
from mcred.series import LaurentSeries
from mcred.sl2 import jacobson_morozov

QQ = FieldTower()


def _leaves(node):
    if not node.children:
        return [node]
    out = []
    for ch in node.children:
        out.extend(_leaves(ch))
    return out


def _residue_fractions(node):
    return [[x.to_fraction() for x in row] for row in node.residue]


# ---------------------------------------------------------------------------
# shearing machinery
# ---------------------------------------------------------------------------


def test_compute_alpha_golden():
    c = checks.sample_ramified_pair().truncate(6)
    weights = jacobson_morozov(c.leading()).weights
    sd = compute_alpha(c, weights)
    assert sd.alpha == Fraction(1, 4)
    assert sd.pole == 2
    assert sd.critical == [(-1, 2)]


def test_compute_alpha_empty_set_is_none():
    # nothing above the lead: the minimum runs over an empty set
    m = LaurentMatrix(QQ, [[LaurentSeries(QQ, {}), LaurentSeries(QQ, {})],
                           [LaurentSeries(QQ, {-2: 1}), LaurentSeries(QQ, {})]])
    c = Connection(m.truncate(4))
    weights = jacobson_morozov(c.leading()).weights
    assert compute_alpha(c, weights).alpha is None


def test_shear_ramifies_by_denominator():
    c = checks.sample_ramified_pair().truncate(6)
    weights = jacobson_morozov(c.leading()).weights
    sheared, b, gauge = shear(c, weights, Fraction(-1, 4))
    assert b == 4
    assert sheared.ram == 4
    assert sheared.pole_order == 3
    # recorded gauge is diag(u^-1, u) over u = t^{1/4}
    assert gauge.entry(0, 0).support() == [-1]
    assert gauge.entry(1, 1).support() == [1]


def test_slodowy_prediction_matches_sheared_lead():
    c = checks.sample_ramified_pair().truncate(6)
    tr = jacobson_morozov(c.leading())
    sd = compute_alpha(c, tr.weights)
    sheared, b, _ = shear(c, tr.weights, -sd.alpha)
    predicted = slodowy_prediction(c, tr.weights, tr.f, sd.alpha)
    got = sheared.leading()
    for prow, grow in zip(predicted, got):
        for p, g in zip(prow, grow):
            # sheared lead is in du units: divide by the cover degree
            assert (g - p * sheared.tower.rational(b)).is_zero()


# ---------------------------------------------------------------------------
# full reductions
# ---------------------------------------------------------------------------


def test_saddle_node_reduces_to_regular_singular():
    tree = reduce(checks.sample_saddle_node())
    root = tree.root
    assert root.leaf is not None
    assert root.kind == "regular_singular"
    assert root.ram == 2
    assert _residue_fractions(root) == [
        [Fraction(1, 2), Fraction(1)],
        [Fraction(1), Fraction(-1, 2)],
    ]
    # the shear is recorded as the monomial gauge diag(t^{-1/2}, t^{1/2})
    diag = [g for kind, g in root.ops if kind == "gauge" and g.ram == 2]
    assert any(g.entry(0, 0).support() == [-1] and g.entry(1, 1).support() == [1]
               for g in diag)
    assert ("ramify", 2) in root.ops


def test_ramified_pair_splits_into_rank_one_leaves():
    tree = reduce(checks.sample_ramified_pair())
    root = tree.root
    assert root.kind == "descend"
    assert root.alpha == Fraction(1, 4)
    # recorded shear gauge diag(t^{-1/4}, t^{1/4})
    diag = [g for kind, g in root.ops if kind == "gauge" and g.ram == 4]
    assert any(g.entry(0, 0).support() == [-1] and g.entry(1, 1).support() == [1]
               for g in diag)
    (inner,) = root.children
    assert inner.kind == "split"
    assert inner.sizes == [1, 1]
    leaves = _leaves(root)
    assert [leaf.kind for leaf in leaves] == ["rank_one", "rank_one"]
    assert all(leaf.ram == 4 for leaf in leaves)


def test_jump_family_is_regular_singular_after_shear():
    tree = reduce(checks.sample_jump_family(1))
    assert tree.root.kind == "regular_singular"
    assert tree.root.ram == 2


def test_replay_reproduces_leaves():
    for sample in (checks.sample_saddle_node(), checks.sample_ramified_pair(),
                   checks.sample_jump_family(Fraction(1, 2))):
        tree = reduce(sample)
        assert replay(tree)


def test_replay_on_random_connections():
    rng = random.Random(23)
    for k in range(6):
        c = checks.random_connection(rng, 2, 2, kind=checks.KINDS[k % 4])
        tree = reduce(c)
        assert replay(tree, c)


def test_measure_strictly_decreases_on_recursion_edges():
    rng = random.Random(31)
    seen = 0
    for k in range(8):
        c = checks.random_connection(rng, rng.choice((2, 3)), 2,
                                     kind=("nilpotent_lead", "generic")[k % 2])
        tree = reduce(c)
        stack = [tree.root]
        while stack:
            node = stack.pop()
            for ch in node.children:
                if ch.measure is not None and node.measure is not None:
                    assert ch.measure < node.measure
                    seen += 1
                stack.extend([ch])
    assert seen > 0


def test_default_working_precision_covers_stability_window():
    c = checks.sample_ramified_pair()
    wp = default_working_precision(c)
    assert wp >= -c.pole_order + 1
    assert isinstance(wp, int)


def test_reduce_reports_missing_precision_honestly():
    with pytest.raises(PrecisionExhausted) as info:
        reduce(checks.sample_saddle_node().truncate(0))
    assert info.value.needed is not None
    with pytest.raises(PrecisionExhausted) as info:
        reduce(checks.sample_saddle_node().truncate(-1))
    assert "slope" in str(info.value) or "window" in str(info.value)


# ---------------------------------------------------------------------------
# stability constants
# ---------------------------------------------------------------------------


def _partitions(n, cap=None):
    cap = n if cap is None else cap
    if n == 0:
        return [()]
    out = []
    for k in range(min(n, cap), 0, -1):
        out.extend((k,) + rest for rest in _partitions(n - k, k))
    return out


def _oracle_constant(n, r):
    """Brute-force evaluation of the tail-bound recursion, written from the
    inequalities directly: the minimal admissible value takes equality in
    every condition, quantifiers range over orbit dimensions realized by
    nilpotent matrices (one partition per Jordan type), and the grading
    degree attached to a dimension is the largest weight spread among its
    partitions."""
    spread_by_dim = {}

    def realized(size):
        table = {}
        for shape in _partitions(size):
            width = shape[0]
            transpose = [sum(1 for m in shape if m > j) for j in range(width)]
            dim = size * size - sum(x * x for x in transpose)
            table[dim] = max(table.get(dim, 0), 2 * (width - 1))
        return table

    memo = {}

    def full(size, pole):
        if size == 1 or pole <= 1:
            return 0
        return max(graded(size, pole, d) for d in realized(size))

    def graded(size, pole, delta):
        key = (size, pole, delta)
        if key in memo:
            return memo[key]
        if size == 1 or pole <= 1:
            return 0
        table = realized(size)
        j = table[delta]
        half = Fraction(pole - 1, 2)
        deeper_pole = (j + 2) * (pole - 1) + 1
        bound = max(Fraction(-1) + j * half, Fraction(0))
        for smaller in range(1, size):
            bound = max(bound, (j + 2) * j * half + full(smaller, deeper_pole))
        for other in table:
            if other > delta:
                bound = max(bound, (j + 2) * j * half
                            + graded(size, deeper_pole, other))
        memo[key] = bound
        return bound

    value = full(n, r)
    assert value == int(value)
    return int(value)


def test_stability_base_cases():
    for r in range(1, 11):
        assert stability_constant(1, r) == 0
    for n in range(1, 5):
        assert stability_constant(n, 1) == 0


def test_stability_matches_independent_recursion():
    assert stability_constant(2, 2) == _oracle_constant(2, 2) == 8
    assert stability_constant(2, 3) == _oracle_constant(2, 3)
    assert stability_constant(3, 2) == _oracle_constant(3, 2)


def test_known_sharp_table():
    assert KNOWN_SHARP[(2, 2)] == 1
    # the recursion is deliberately cruder than the sharp value
    assert stability_constant(2, 2) >= KNOWN_SHARP[(2, 2)]


def test_stability_rejects_bad_arguments():
    from mcred.errors import DomainViolation
    with pytest.raises(DomainViolation):
        stability_constant(0, 2)
    with pytest.raises(DomainViolation):
        stability_constant(2, -1)
    assert stability_constant(2, 0) == 0   # no pole, nothing to stabilize


def test_tail_perturbation_preserves_leaf_structure():
    failures = checks.suite_tail_stability(seed=2, trials=2)
    assert failures == []
