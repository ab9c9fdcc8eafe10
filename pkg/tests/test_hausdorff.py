import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metric_pairs import (
    ChainLengthMismatch,
    CrossMetric,
    DifferentAmbient,
    GlueMismatch,
    InvalidSubset,
    MetricPair,
    MetricTuple,
    ball,
    hausdorff,
    hausdorff_between,
    pair_hausdorff,
    tuple_hausdorff,
    validate_metric,
)

import oracles
from conftest import line_space, random_space, random_subset


def test_hausdorff_fixtures(derived):
    fx = derived["hausdorff_line4"]
    space = validate_metric(np.array(fx["dist"]))
    assert hausdorff(space, space.subset(fx["a"]), space.subset(fx["b"])) == fx["value"]
    fx = derived["hausdorff_random6"]
    sp6 = validate_metric(np.array(fx["dist"]))
    got = hausdorff(sp6, sp6.subset(fx["a"]), sp6.subset(fx["b"]))
    assert got == pytest.approx(fx["value"], abs=1e-12)


def test_hausdorff_basics():
    space = line_space([0, 1, 2, 3])
    a = space.subset([0, 2])
    assert hausdorff(space, a, a) == 0.0
    assert hausdorff(space, space.subset([0]), space.subset([3])) == 3.0


def test_hausdorff_between_requires_shared_ambient():
    s1 = line_space([0, 1, 2])
    s2 = line_space([0, 1, 2.5])
    with pytest.raises(DifferentAmbient):
        hausdorff_between(MetricPair(s1, s1.subset([0])), MetricPair(s2, s2.subset([0])))
    assert hausdorff_between(MetricPair(s1, s1.subset([0])), MetricPair(s1, s1.subset([2]))) == 2.0


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_hausdorff_is_a_metric_on_subsets(seed):
    rng = np.random.default_rng(seed)
    space = random_space(rng, int(rng.integers(3, 8)))
    n = len(space)
    subs = [space.subset(random_subset(rng, n)) for _ in range(3)]
    a, b, c = subs
    assert hausdorff(space, a, b) == hausdorff(space, b, a)
    assert hausdorff(space, a, c) <= hausdorff(space, a, b) + hausdorff(space, b, c) + 2 * space.tol
    assert (hausdorff(space, a, b) == 0.0) == (a.indices == b.indices)
    # double-loop oracle agreement
    assert hausdorff(space, a, b) == pytest.approx(
        oracles.hausdorff_double_loop(space.dist, a.indices, b.indices), abs=1e-12
    )


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_enlarging_target_never_increases_distance(seed):
    rng = np.random.default_rng(seed)
    space = random_space(rng, int(rng.integers(3, 8)))
    n = len(space)
    small = random_subset(rng, n, k=int(rng.integers(1, n)))
    extra = sorted(set(small) | set(random_subset(rng, n)))
    b = random_subset(rng, n)
    d_small = float(max(min(space.dist[x, p] for p in small) for x in b))
    d_big = float(max(min(space.dist[x, p] for p in extra) for x in b))
    assert d_big <= d_small + space.tol


def _diagonal_glue(space, offset=None):
    if offset is None:
        return CrossMetric(space, space, space.dist.copy(), pseudo=True)
    return CrossMetric(space, space, space.dist + offset, pseudo=False)


def test_pair_hausdorff_diagonal_and_offset():
    space = line_space([0, 1, 2, 3])
    pair = MetricPair(space, space.subset([0, 2]))
    assert pair_hausdorff(_diagonal_glue(space), pair, pair) == 0.0
    c = 0.7
    assert pair_hausdorff(_diagonal_glue(space, c), pair, pair) == pytest.approx(2 * c)


def test_pair_hausdorff_hand_fixture(derived):
    fx = derived["pair_hausdorff_hand"]
    left = validate_metric(np.array(fx["dl"]))
    right = validate_metric(np.array(fx["dr"]))
    glue = CrossMetric(left, right, np.array(fx["cross"]))
    got = pair_hausdorff(glue, MetricPair(left, left.subset(fx["a"])), MetricPair(right, right.subset(fx["b"])))
    assert got == pytest.approx(fx["value"], abs=1e-12)


def test_pair_hausdorff_full_subsets_double_the_space_term():
    rng = np.random.default_rng(5)
    space = random_space(rng, 4)
    glue = _diagonal_glue(space, 0.3)
    pair = MetricPair(space, space.full_subset())
    d_xy = float(max(glue.cross.min(axis=1).max(), glue.cross.min(axis=0).max()))
    assert pair_hausdorff(glue, pair, pair) == pytest.approx(2 * d_xy)


def test_pair_hausdorff_glue_mismatch():
    s1, s2 = line_space([0, 1]), line_space([0, 2])
    glue = _diagonal_glue(s1)
    with pytest.raises(GlueMismatch):
        pair_hausdorff(glue, MetricPair(s2, s2.subset([0])), MetricPair(s1, s1.subset([0])))


def test_tuple_hausdorff_reduces_to_pair_and_fixture(derived):
    space = line_space([0, 1, 2, 3])
    glue = _diagonal_glue(space, 0.5)
    a = space.subset([0, 2])
    pair_val = pair_hausdorff(glue, MetricPair(space, a), MetricPair(space, a))
    tup_val = tuple_hausdorff(glue, MetricTuple(space, (a,)), MetricTuple(space, (a,)))
    assert pair_val == tup_val

    fx = derived["tuple_hausdorff_random4"]
    left = validate_metric(np.array(fx["dl"]))
    right = validate_metric(np.array(fx["dr"]))
    glue4 = CrossMetric(left, right, np.array(fx["cross"]))
    t_l = MetricTuple(left, tuple(left.subset(c) for c in fx["chain_l"]))
    t_r = MetricTuple(right, tuple(right.subset(c) for c in fx["chain_r"]))
    assert tuple_hausdorff(glue4, t_l, t_r) == pytest.approx(fx["value"], abs=1e-12)


def test_tuple_hausdorff_identical_diagonal_is_zero():
    space = line_space([0, 1, 2])
    t = MetricTuple(space, (space.subset([0]), space.subset([0, 1])))
    assert tuple_hausdorff(_diagonal_glue(space), t, t) == 0.0


def test_tuple_chain_validation_and_mismatch():
    space = line_space([0, 1, 2])
    with pytest.raises(InvalidSubset):
        MetricTuple(space, (space.subset([0, 1]), space.subset([2])))
    t1 = MetricTuple(space, (space.subset([0]),))
    t2 = MetricTuple(space, (space.subset([0]), space.subset([0, 1])))
    with pytest.raises(ChainLengthMismatch):
        tuple_hausdorff(_diagonal_glue(space), t1, t2)


def test_ball_lemma_on_grid_surrogate():
    # shortest-path line approximates a length space; one grid step of slack
    h = 0.1
    coords = np.arange(0.0, 2.0 + h / 2, h)
    space = line_space(coords)
    a = space.subset([3])
    b = space.subset([12, 13])
    for r, s in [(0.25, 0.55), (0.4, 0.4), (0.75, 0.3)]:
        ball_a = ball(space, a, r, "closed")
        ball_b = ball(space, b, s, "closed")
        lhs = hausdorff(space, ball_a, ball_b)
        rhs = hausdorff(space, a, b) + abs(r - s)
        assert lhs <= rhs + h + space.tol
