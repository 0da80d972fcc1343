import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperenum.hypercore import Hypergraph, NonDivisible
from hyperenum.oracle import (
    DegenerateCycle,
    DegenerateDenominator,
    EmptyClass,
    InstanceTooLarge,
    Structure,
    count_all,
    count_avoiding,
    count_containing,
    count_loose_hamilton,
    count_perfect_matchings,
    enumerate_avoiding,
    expectation_exact,
    hc_complete,
    iter_hypergraphs,
    iter_loose_hamilton,
    pm_complete,
    prob_avoid_exact,
    xi_exact,
)

ONES6 = (1,) * 6
ONES9 = (1,) * 9
THROUGH_ZERO = [e for e in itertools.combinations(range(6), 3) if 0 in e]


def brute_force_count(k, r, X=()):
    """Count edge subsets of the complete hypergraph with degrees ``k`` avoiding ``X``."""
    n = len(k)
    pool = [e for e in itertools.combinations(range(n), r) if e not in set(X)]
    m = sum(k) // r
    count = 0
    for sub in itertools.combinations(pool, m):
        deg = [0] * n
        for e in sub:
            for v in e:
                deg[v] += 1
        count += deg == list(k)
    return count


def is_loose_cycle(edges, n, r):
    t = len(edges)
    deg = [0] * n
    for e in edges:
        for v in e:
            deg[v] += 1
    if sorted(deg) != [1] * (n - t) + [2] * t:
        return False
    nbrs = {i: [] for i in range(t)}
    for i, j in itertools.combinations(range(t), 2):
        shared = len(set(edges[i]) & set(edges[j]))
        if shared > 1:
            return False
        if shared == 1:
            nbrs[i].append(j)
            nbrs[j].append(i)
    if any(len(v) != 2 for v in nbrs.values()):
        return False
    # connected 2-regular graph on t nodes is a single cycle
    seen, stack = {0}, [0]
    while stack:
        for w in nbrs[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == t


def brute_force_loose_cycles(h):
    t = h.n // (h.r - 1)
    return sum(is_loose_cycle(sub, h.n, h.r) for sub in itertools.combinations(h.edges, t))


def test_avoiding_single_edge():
    assert count_avoiding(ONES6, 3, [(0, 1, 2)]) == 9


def test_avoiding_all_edges_through_a_vertex():
    assert count_avoiding(ONES6, 3, THROUGH_ZERO) == 0
    assert brute_force_count(ONES6, 3, THROUGH_ZERO) == 0


def test_empty_forbidden_set_is_full_class():
    assert count_avoiding((2,) * 6, 3, []) == count_all((2,) * 6, 3) == 75


@pytest.mark.parametrize(
    "k,r,expected",
    [(ONES6, 3, 10), (ONES9, 3, 280), ((1,) * 12, 3, 15400), ((1,) * 8, 4, 35), ((2,) * 6, 3, 75)],
)
def test_class_sizes(k, r, expected):
    assert count_all(k, r) == expected


@pytest.mark.parametrize(
    "k,X",
    [((2, 2, 2, 2, 2, 2), [(0, 1, 2)]), ((2, 2, 1, 1, 1, 1, 1), [(0, 1, 2), (3, 4, 5)]), ((3, 2, 2, 1, 1, 0), [])],
)
def test_counts_match_brute_force(k, X):
    assert count_avoiding(k, 3, X) == brute_force_count(k, 3, X)


def test_enumeration_is_duplicate_free_and_valid():
    k = (2, 2, 2, 1, 1, 1, 0)
    seen = list(iter_hypergraphs(k, 3))
    assert len(seen) == len(set(seen)) == count_all(k, 3)
    assert all(h.degrees().degrees == k for h in seen)


def test_infeasible_is_zero_with_reason():
    res = enumerate_avoiding((1,) * 5, 3)
    assert res.count == 0 and "divisible" in res.reason


def test_budget_guard():
    with pytest.raises(InstanceTooLarge):
        count_all((2,) * 9, 3, budget=50)


def test_worker_count_does_not_change_count():
    k = (2,) * 9
    assert count_all(k, 3, workers=1) == count_all(k, 3, workers=3) == 122220


def test_containing():
    assert count_containing(ONES6, 3, [(0, 1, 2)], check=True) == 1
    assert count_containing(ONES6, 3, [], check=True) == 10
    assert count_containing(ONES6, 3, [(0, 1, 2), (0, 3, 4)]) == 0


def test_xi_and_probabilities():
    assert xi_exact(ONES6, 3, (0, 1, 2)) == Fraction(1, 9)
    assert xi_exact(ONES9, 3, (0, 1, 2)) == Fraction(1, 27)
    assert xi_exact((0, 1, 1, 1, 1, 1, 1), 3, (0, 1, 2)) == 0
    assert prob_avoid_exact(ONES6, 3, [(0, 1, 2)]) == Fraction(9, 10)
    assert prob_avoid_exact(ONES6, 3, []) == 1
    assert prob_avoid_exact(ONES9, 3, [(0, 1, 2)]) == Fraction(27, 28)


def test_xi_degenerate_denominator():
    with pytest.raises(DegenerateDenominator):
        xi_exact((1, 1, 1), 3, (0, 1, 2))


def test_empty_class():
    with pytest.raises(EmptyClass):
        prob_avoid_exact((2, 0, 0, 1), 3, [])


def test_perfect_matching_counts():
    assert count_perfect_matchings(Hypergraph.complete(6, 3)) == 10
    assert count_perfect_matchings(Hypergraph(6, 3, ((0, 1, 2), (3, 4, 5)))) == 1
    assert count_perfect_matchings(Hypergraph.complete(9, 3)) == 280
    assert count_perfect_matchings(Hypergraph.complete(7, 3)) == 0


@pytest.mark.parametrize("n,r,expected", [(6, 3, 10), (9, 3, 280), (3, 3, 1), (12, 3, 15400), (8, 4, 35)])
def test_pm_complete(n, r, expected):
    assert pm_complete(n, r) == expected
    assert count_perfect_matchings(Hypergraph.complete(n, r)) == expected


def test_pm_complete_nondivisible():
    with pytest.raises(NonDivisible):
        pm_complete(7, 3)


@pytest.mark.parametrize("n,r,expected", [(6, 3, 120), (8, 3, 5040), (9, 4, 7560), (8, 4, None)])
def test_hc_complete(n, r, expected):
    if n % (r - 1):
        with pytest.raises(NonDivisible):
            hc_complete(n, r)
        return
    assert hc_complete(n, r) == expected
    assert count_loose_hamilton(Hypergraph.complete(n, r)) == expected


def test_degenerate_cycle_length():
    with pytest.raises(DegenerateCycle):
        hc_complete(4, 3)
    with pytest.raises(DegenerateCycle):
        count_loose_hamilton(Hypergraph.complete(4, 3))
    with pytest.raises(DegenerateCycle):
        hc_complete(6, 4)


def test_single_loose_cycle():
    h = Hypergraph(6, 3, ((0, 1, 2), (2, 3, 4), (0, 4, 5)))
    assert count_loose_hamilton(h) == 1
    assert count_loose_hamilton(Hypergraph(6, 3, ((0, 1, 2), (2, 3, 4)))) == 0


@pytest.mark.parametrize("seed", range(6))
def test_loose_cycles_against_subset_search(seed):
    rng = random.Random(seed)
    n, r = rng.choice([(6, 3), (8, 3), (9, 4)])
    pool = list(itertools.combinations(range(n), r))
    h = Hypergraph(n, r, tuple(rng.sample(pool, min(len(pool), 18))))
    assert count_loose_hamilton(h) == brute_force_loose_cycles(h)
    cycles = list(iter_loose_hamilton(h))
    assert len(cycles) == len({frozenset(c) for c in cycles})


def test_expectation_degenerate_cases():
    assert expectation_exact(ONES6, 3, Structure.PERFECT_MATCHING, check=True) == 1
    assert expectation_exact(ONES6, 3, Structure.LOOSE_HAMILTON, check=True) == 0
    assert expectation_exact(ONES9, 3, Structure.PERFECT_MATCHING) == 1


def test_expectation_two_regular():
    assert expectation_exact((2,) * 6, 3, "pm", check=True) == Fraction(6, 5)
    assert expectation_exact((2,) * 6, 3, "hc", check=True) == Fraction(8, 5)


def test_expectation_budget():
    with pytest.raises(InstanceTooLarge):
        expectation_exact((1,) * 12, 3, "pm", budget=1000)


@st.composite
def small_instances(draw):
    n = draw(st.integers(4, 7))
    k = draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    if sum(k) % 3:
        k[0] += 3 - sum(k) % 3
    pool = list(itertools.combinations(range(n), 3))
    X = draw(st.lists(st.sampled_from(pool), unique=True, max_size=4))
    return tuple(k), sorted(X)


@given(small_instances())
@settings(max_examples=40)
def test_duality(inst):
    k, X = inst
    x = [sum(v in e for e in X) for v in range(len(k))]
    if any(b > a for a, b in zip(k, x)):
        assert count_containing(k, 3, X) == 0
        return
    residual = tuple(a - b for a, b in zip(k, x))
    assert count_containing(k, 3, X, check=True) == count_avoiding(residual, 3, X)


@given(small_instances(), st.data())
@settings(max_examples=40)
def test_monotone_in_forbidden_set(inst, data):
    k, X = inst
    sub = data.draw(st.lists(st.sampled_from(X), unique=True)) if X else []
    assert count_avoiding(k, 3, X) <= count_avoiding(k, 3, sub)


@given(small_instances(), st.data())
@settings(max_examples=40)
def test_relabel_symmetry(inst, data):
    k, X = inst
    perm = data.draw(st.permutations(range(len(k))))
    k2 = [0] * len(k)
    for v, d in enumerate(k):
        k2[perm[v]] = d
    X2 = [tuple(sorted(perm[v] for v in e)) for e in X]
    assert count_avoiding(k, 3, X) == count_avoiding(tuple(k2), 3, X2)


@given(small_instances())
@settings(max_examples=30)
def test_sandwich(inst):
    k, X = inst
    total = count_all(k, 3)
    if not total:
        return
    xis = []
    for e in X:
        try:
            xis.append(xi_exact(k, 3, e))
        except DegenerateDenominator:
            return
    if sum(xis) <= 1:
        assert 1 - sum(xis) <= prob_avoid_exact(k, 3, X) <= 1
