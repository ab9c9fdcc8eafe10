import itertools

import numpy as np
import pytest

from metric_pairs import (
    CrossMetric,
    EmptyLimit,
    GlueMismatch,
    LengthMismatch,
    MetricPair,
    ShortcutDetected,
    build_chain,
    chain_convergence_report,
    glue_from_approximation,
    limit_proxy,
    pair_isometry_search,
    validate_metric,
)

from conftest import line_space, random_space


def _identity_chain(space, a_idx, k, eps_list):
    pair = MetricPair(space, space.subset(a_idx))
    pairs = [pair] * k
    glues = [glue_from_approximation(space, space, range(len(space)), e) for e in eps_list]
    return pairs, glues


def test_build_chain_embeds_members():
    rng = np.random.default_rng(0)
    space = random_space(rng, 4, hi=2.0)
    pairs, glues = _identity_chain(space, [0, 1], 2, [0.5])
    chain = build_chain(pairs, glues, [0.6])
    for i, off in enumerate(chain.offsets):
        block = chain.ambient.dist[off : off + 4, off : off + 4]
        assert np.abs(block - space.dist).max() <= chain.ambient.tol


def test_chain_twin_distances_bounded_by_offsets():
    rng = np.random.default_rng(1)
    space = random_space(rng, 3, hi=2.0)
    eps_list = [2.0 ** -(i + 1) for i in range(4)]
    pairs, glues = _identity_chain(space, [0], 5, eps_list)
    chain = build_chain(pairs, glues, eps_list)
    total = sum(e / 2 for e in eps_list)  # identity gluing puts twins at eps/2
    first, last = chain.offsets[0], chain.offsets[-1]
    for x in range(3):
        assert chain.ambient.dist[first + x, last + x] <= total + 1e-9


def test_build_chain_rejects_corrupted_glue():
    space = line_space([0.0, 5.0])
    pairs, glues = _identity_chain(space, [0], 3, [0.3, 0.3])
    doctored = glues[1].cross.copy()
    doctored[0, 1] = 0.01  # far twin suddenly adjacent: member distances collapse
    object.__setattr__(glues[1], "cross", doctored)
    with pytest.raises(ShortcutDetected) as err:
        build_chain(pairs, glues, [0.3, 0.3])
    assert err.value.pair == (0, 1)


def test_build_chain_length_and_match_errors():
    space = line_space([0, 1])
    other = line_space([0, 2])
    pairs, glues = _identity_chain(space, [0], 2, [0.2])
    with pytest.raises(LengthMismatch):
        build_chain(pairs[:1], [], [])
    with pytest.raises(LengthMismatch):
        build_chain(pairs, glues, [0.2, 0.2])
    bad_glue = glue_from_approximation(other, other, [0, 1], 0.2)
    with pytest.raises(GlueMismatch):
        build_chain(pairs, [bad_glue], [0.2])


def test_limit_proxy_full_when_budgets_cover():
    rng = np.random.default_rng(2)
    space = random_space(rng, 4, hi=2.0)
    eps_list = [0.5, 0.25, 0.125]
    pairs, glues = _identity_chain(space, [0, 2], 4, eps_list)
    chain = build_chain(pairs, glues, eps_list)  # budget eps > offset eps/2
    proxy = limit_proxy(chain)
    assert proxy.z_pair.a.indices == (0, 2)
    for path in proxy.chains:
        assert len(path) == 4
    assert pair_isometry_search(pairs[-1], proxy.z_pair) is not None


def test_limit_proxy_empty_when_budgets_too_small():
    rng = np.random.default_rng(3)
    space = random_space(rng, 3, hi=2.0)
    pairs, glues = _identity_chain(space, [0], 3, [0.4, 0.4])
    with pytest.raises(EmptyLimit):
        limit_proxy(build_chain(pairs, glues, [0.1, 0.1]))  # every cross step is 0.2


def test_limit_proxy_matches_brute_force_paths():
    rng = np.random.default_rng(4)
    space = random_space(rng, 4, hi=1.0)
    subsets = [[0, 1], [1, 2, 3], [0, 2]]
    pairs = [MetricPair(space, space.subset(s)) for s in subsets]
    glues = [
        glue_from_approximation(space, space, range(4), 0.3),
        glue_from_approximation(space, space, range(4), 0.6),
    ]
    budgets = [0.8, 1.4]
    chain = build_chain(pairs, glues, budgets)

    dist, offs = chain.ambient.dist, chain.offsets
    reachable = set()
    for path in itertools.product(*subsets):
        if all(
            dist[offs[i] + path[i], offs[i + 1] + path[i + 1]] <= budgets[i] + chain.ambient.tol
            for i in range(len(budgets))
        ):
            reachable.add(path[-1])
    try:
        got = set(limit_proxy(chain).z_pair.a.indices)
    except EmptyLimit:
        got = set()
    assert got == reachable and reachable


def test_limit_proxy_monotone_in_budgets():
    rng = np.random.default_rng(5)
    space = random_space(rng, 4, hi=2.0)
    subsets = [[0, 1, 2], [0, 1, 3], [1, 2]]
    pairs = [MetricPair(space, space.subset(s)) for s in subsets]
    glues = [glue_from_approximation(space, space, range(4), 0.4) for _ in range(2)]
    small = limit_proxy(build_chain(pairs, glues, [0.25, 0.25]))
    large = limit_proxy(build_chain(pairs, glues, [0.25, 1.5]))
    assert set(small.z_pair.a.indices) <= set(large.z_pair.a.indices)


def test_subset_to_limit_hausdorff_bounded_by_tail_budgets():
    rng = np.random.default_rng(8)
    space = random_space(rng, 4, hi=2.0)
    eps_list = [0.5, 0.25, 0.125, 0.0625]
    pairs, glues = _identity_chain(space, [0, 2], 5, eps_list)
    chain = build_chain(pairs, glues, eps_list)
    proxy = limit_proxy(chain)
    dist, offs = chain.ambient.dist, chain.offsets
    w_global = [offs[-1] + w for w in proxy.z_pair.a.indices]
    for i, pair in enumerate(pairs):
        a_global = [offs[i] + a for a in pair.a.indices]
        d_aw = max(
            max(min(dist[x, y] for y in w_global) for x in a_global),
            max(min(dist[x, y] for x in a_global) for y in w_global),
        )
        tail = sum(eps_list[i:])
        assert d_aw <= tail + chain.ambient.tol + 1e-12


def test_chain_convergence_report_constant_chain():
    rng = np.random.default_rng(6)
    space = random_space(rng, 3, hi=2.0)
    eps_list = [0.5, 0.25]
    pairs, glues = _identity_chain(space, [0, 1], 3, eps_list)
    chain = build_chain(pairs, glues, eps_list)
    proxy = limit_proxy(chain)
    report = chain_convergence_report(chain, proxy, 1e-3)
    assert report["all_dominated"]
    for member in report["members"]:
        assert member["compact_hi"] <= 1e-3  # identical pairs throughout
        assert member["truncated_hi"] <= 1e-3


def test_chain_report_two_members_single_bracket():
    rng = np.random.default_rng(7)
    space = random_space(rng, 3, hi=2.0)
    pairs, glues = _identity_chain(space, [0], 2, [0.5])
    chain = build_chain(pairs, glues, [0.5])
    proxy = limit_proxy(chain)
    report = chain_convergence_report(chain, proxy, 1e-3)
    assert len(report["members"]) == 2
