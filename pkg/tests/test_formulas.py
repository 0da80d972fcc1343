import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperenum.formulas import (
    InfeasibleContainment,
    DegenerateDenominator,
    beta_term,
    containment_main_term,
    containment_probability_formula,
    error_envelope,
    expected_hc_formula,
    expected_pm_formula,
    expected_structure_factorial_form,
    log_avoiding_formula,
    log_count_formula,
    pairing_count,
    rho_term,
)
from hyperenum.hypercore import DegreeSequence, ForbiddenSet, Instance, NonDivisible, falling_factorial
from hyperenum.oracle import count_all, pm_complete, prob_contain_exact

mpmath.mp.prec = 128


def close(a, b, rel=1e-12):
    return abs(a - b) <= rel * max(abs(a), abs(b), 1)


def test_count_formula_k1_is_exact():
    res = log_count_formula((1,) * 6, 3)
    assert res.main_term_exact == 10 and res.correction_exponent == 0
    assert log_count_formula((1, 1, 1), 3).main_term_exact == 1


def test_count_formula_two_regular():
    res = log_count_formula((2,) * 6, 3)
    assert res.main_term_exact == Fraction(479001600, 24 * 1296 * 64) == Fraction(1925, 8)
    assert res.correction_exponent == -1
    assert close(res.log_value, mpmath.log(240.625) - 1)


def test_count_formula_nondivisible():
    with pytest.raises(NonDivisible):
        log_count_formula((1,) * 5, 3)


def test_empty_degree_sequence():
    res = log_avoiding_formula((0,) * 4, 3, [])
    assert res.log_value == 0 and res.main_term_exact == 1 and res.envelope.rho == 0


def test_avoiding_formula_matches_count_formula():
    base = log_count_formula((2,) * 6, 3)
    empty = log_avoiding_formula((2,) * 6, 3, [])
    assert empty == base
    one = log_avoiding_formula((1,) * 6, 3, [(0, 1, 2)])
    assert one.log_value == log_count_formula((1,) * 6, 3).log_value
    assert close(one.envelope.rho, 1 / 36 + 1 / 72)


@pytest.mark.parametrize("n,expected", [(6, Fraction(1, 10)), (9, Fraction(1, 28))])
def test_containment_k1(n, expected):
    res = containment_probability_formula((1,) * n, 3, [(0, 1, 2)])
    assert res.main_term_exact == expected and res.correction_exponent == 0
    assert prob_contain_exact((1,) * n, 3, [(0, 1, 2)]) == expected


def test_containment_empty_is_one():
    res = containment_probability_formula((2,) * 6, 3, [])
    assert res.main_term_exact == 1 and res.correction_exponent == 0


def test_containment_infeasible():
    with pytest.raises(InfeasibleContainment):
        containment_probability_formula((1,) * 6, 3, [(0, 1, 2), (0, 3, 4)])


def test_containment_all_degree_used():
    res = containment_probability_formula((1, 1, 1), 3, [(0, 1, 2)])
    assert res.main_term_exact == 1
    assert res.notes


def test_expected_pm_values():
    assert close(expected_pm_formula(6, 3, 2).value, mpmath.sqrt(3) / 4 * mpmath.e)
    assert close(expected_pm_formula(12, 3, 2).value, mpmath.e * mpmath.sqrt(3) / 16)
    assert abs(float(expected_pm_formula(6, 3, 2).value) - 1.1770505590) < 1e-9
    assert abs(float(expected_pm_formula(12, 3, 2).value) - 0.2942626398) < 1e-9


def test_expected_pm_degenerate():
    res = expected_pm_formula(9, 3, 1)
    assert res.degenerate and res.value == 1 and res.main_term_exact == 1


def test_expected_hc_values():
    assert close(expected_hc_formula(6, 3, 2).value, mpmath.sqrt(mpmath.pi / 12) * mpmath.e)
    assert abs(float(expected_hc_formula(6, 3, 2).value) - 1.3908451974) < 1e-9
    assert abs(float(expected_hc_formula(8, 3, 2).value) - 0.9560180570) < 1e-9
    assert expected_hc_formula(8, 3, 2).notes


def test_expected_hc_errors():
    with pytest.raises(NonDivisible):
        expected_hc_formula(7, 3, 2)
    with pytest.raises(DegenerateDenominator):
        expected_hc_formula(6, 3, 1)


def reference_hc(n, r, k):
    """The expected loose cycle count written out term by term."""
    a, b = r * k - k - r, r * k - k
    base = (k - 1) * (r - 1) * mpmath.power(mpmath.mpf(a) / b, mpmath.mpf((r - 1) * a) / r)
    return (
        mpmath.sqrt(mpmath.pi / (2 * n))
        * (r - 1)
        * mpmath.power(base, mpmath.mpf(n) / (r - 1))
        * mpmath.exp(mpmath.mpf((r - 1) * (r * k - r - 2)) / (2 * a))
    )


@pytest.mark.parametrize("n,r,k", [(6, 3, 2), (12, 3, 3), (30, 4, 3), (60, 5, 4)])
def test_expected_hc_independent(n, r, k):
    assert close(expected_hc_formula(n, r, k).value, reference_hc(n, r, k), rel=1e-25)


@pytest.mark.parametrize("structure,formula,r,k", [("pm", expected_pm_formula, 3, 2), ("hc", expected_hc_formula, 3, 3)])
def test_factorial_form_approaches_asymptotic(structure, formula, r, k):
    gaps = []
    for n in (60, 600, 6000):
        exact = expected_structure_factorial_form(n, r, k, structure)
        gaps.append(abs(exact.log_value - formula(n, r, k).log_value))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-3


def test_factorial_form_matches_small_oracle():
    res = expected_structure_factorial_form(6, 3, 1, "pm")
    assert res.main_term_exact == 1


def test_rho_and_beta():
    assert rho_term(0, 3, 10, 3) == 0
    assert close(rho_term(1, 1, 6, 3), 1 / 24)
    assert close(beta_term(1, 1, 3, 3), 81 / 3 + 1 / 9 + 3 / 27)
    assert beta_term(1, 1, 0, 3) == math.inf


def test_error_envelope_flags():
    env = error_envelope(Instance.build((1,) * 6, 3, [(0, 1, 2)]))
    assert close(env.rho, 1 / 24)
    assert close(env.beta, 27 + 2 / 9)
    assert env.small_o_flags == {"base_term": False, "rho": True, "beta": False}
    assert error_envelope(Instance.build((1,) * 6, 3)).rho == 0


@pytest.mark.parametrize("n,r", [(6, 3), (9, 3), (12, 3), (8, 4), (15, 5)])
def test_k1_main_term_is_complete_matching_count(n, r):
    assert log_count_formula((1,) * n, r).main_term_exact == pm_complete(n, r)


@st.composite
def degree_sequences(draw, r=3, max_n=9, max_k=4):
    n = draw(st.integers(r, max_n))
    k = draw(st.lists(st.integers(0, max_k), min_size=n, max_size=n))
    if sum(k) % r:
        k[0] += r - sum(k) % r
    if sum(k) == 0:
        k[:r] = [1] * r
    return DegreeSequence(tuple(k))


@given(degree_sequences())
def test_log_and_exact_paths_agree(k):
    res = log_count_formula(k, 3)
    assert close(res.exact_log(), res.log_value)


def pairing_reference(degrees, r):
    m = sum(degrees)
    den = math.factorial(m // r) * math.factorial(r) ** (m // r) * math.prod(map(math.factorial, degrees))
    return Fraction(math.factorial(m), den)


@given(degree_sequences(r=4, max_k=5))
def test_pairing_count_reference(k):
    assert pairing_count(k, 4) == pairing_reference(k.degrees, 4)


def random_triple(rng):
    r = rng.choice([3, 4])
    n = rng.randint(r, 12)
    while True:
        k = [rng.randint(0, 5) for _ in range(n)]
        if sum(k) % r == 0 and 0 < sum(k) <= 60:
            break
    x = [0] * n
    edges = set()
    for _ in range(rng.randint(0, 4)):
        e = tuple(sorted(rng.sample(range(n), r)))
        if e in edges or any(x[v] + 1 > k[v] for v in e):
            continue
        edges.add(e)
        for v in e:
            x[v] += 1
    return tuple(k), r, sorted(edges), tuple(x)


@pytest.mark.parametrize("seed", range(5))
def test_factorial_identity_random(seed):
    rng = random.Random(seed)
    for _ in range(20):
        k, r, X, x = random_triple(rng)
        lhs = containment_main_term(k, r, X) * pairing_count(k, r)
        rest = tuple(a - b for a, b in zip(k, x))
        assert lhs == pairing_reference(rest, r)
        assert ForbiddenSet.of(len(k), r, X).x.degrees == x


def test_count_formula_trend_small():
    for n in (6, 9):
        exact = count_all((2,) * n, 3)
        res = log_count_formula((2,) * n, 3)
        assert abs(math.log(exact) - float(res.log_value)) < 0.2


def test_falling_factorial_used_in_main_term():
    k = DegreeSequence((2, 2, 2, 1, 1, 1, 0, 0, 0))
    X = [(0, 1, 2)]
    num = falling_factorial(3, 1) * 6 * 2 * 2 * 2
    assert containment_main_term(k, 3, X) == Fraction(num, falling_factorial(9, 3))
