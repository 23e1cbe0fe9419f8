from fractions import Fraction

import pytest

from core.dimensions import DimensionCalculator, formula_terms, weight_coeffs
from core.dirichlet import DirichletEngine, FunctionRegistry
from utils.exceptions import InternalConsistencyError, PreconditionError, UnsupportedWeightError, UsageError


@pytest.mark.parametrize("family, N, k, expected", [
    ("g0", 11, 2, 1),
    ("g0", 1, 12, 1),
    ("g0", 1, 14, 0),
    ("g0", 1, 24, 2),
    ("g0", 37, 2, 2),
    ("g0", 35, 2, 3),
    ("g0", 25, 2, 0),
    ("g0", 49, 2, 1),
    ("g0", 50, 2, 2),
    ("g0", 169, 2, 8),
    ("g0", 343, 2, 26),
    ("g0plus", 35, 2, 3),
    ("g0plus", 48, 2, 1),
    ("g0plus", 96, 2, 2),
    ("g0plus", 121, 2, 4),
    ("g0plus", 22, 2, 0),
    ("g0star", 2, 2, 0),
    ("g1", 11, 2, 1),
    ("g1", 13, 2, 2),
    ("g1", 16, 2, 2),
    ("g1", 17, 2, 5),
    ("g1", 19, 2, 7),
    ("g1", 20, 2, 3),
    ("g1plus", 11, 2, 1),
    ("g1", 4, 3, 0),
    ("g1", 1, 2, 0),
    ("g1", 2, 2, 0),
    ("g1", 1, 3, 0),
])
def test_known_dimensions(calculator, family, N, k, expected):
    result = calculator.dimension(family, N, k)
    assert result.value == expected
    assert (result.family, result.N, result.k) == (family, N, k)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_gamma1_agrees_with_gamma0_at_small_levels(calculator, N):
    for k in range(2, 31, 2):
        assert calculator.value("g1", N, k) == calculator.value("g0", N, k)
    if N <= 2:
        assert all(calculator.value("g1", N, k) == 0 for k in range(3, 31, 2))


def test_odd_weight_vanishes_for_gamma0(calculator):
    for family in ("g0", "g0plus", "g0star"):
        assert formula_terms(family, 5) == ()
        assert calculator.value(family, 77, 5) == 0


def test_weight_coefficients():
    w2 = weight_coeffs(2)
    assert (w2.c2, w2.c3) == (Fraction(-1, 4), Fraction(-1, 3))
    w12 = weight_coeffs(12)
    assert (w12.c2, w12.c3) == (Fraction(1, 4), Fraction(1, 3))
    for k in range(2, 60):
        w = weight_coeffs(k)
        assert abs(w.c2) <= Fraction(1, 2) and abs(w.c3) <= Fraction(1, 2)
        assert w.b3 == w.c3


def test_invalid_arguments(calculator):
    with pytest.raises(UnsupportedWeightError):
        calculator.value("g0", 10, 1)
    with pytest.raises(UsageError):
        calculator.value("g2", 10, 2)


def test_batch_and_levelwise_agree(calculator):
    for family in ("g0plus", "g1star"):
        for k in (2, 3, 8):
            assert calculator.values(family, k, 1, 300) == calculator.values(family, k, 1, 300, levelwise=True)
    assert calculator.values("g0", 2, 50, 60) == [calculator.value("g0", n, 2) for n in range(50, 61)]


def test_squarefree_formula_matches_star_dimension(calculator, toolkit):
    for N in range(1, 400):
        if not toolkit.is_squarefree(N):
            continue
        for k in range(2, 15, 2):
            if (N, k) == (1, 2):
                continue
            assert calculator.gekeler_squarefree(N, k) == calculator.value("g0star", N, k)


def test_squarefree_formula_preconditions(calculator):
    with pytest.raises(PreconditionError):
        calculator.gekeler_squarefree(12, 2)
    with pytest.raises(PreconditionError):
        calculator.gekeler_squarefree(15, 3)
    with pytest.raises(PreconditionError):
        calculator.gekeler_squarefree(1, 2)


def test_rho(calculator):
    assert calculator.rho("rho0", 1, 2) == 1
    assert calculator.rho("rho0", 35, 2) == 1
    assert calculator.rho("rho0", 22, 2) == 0
    assert 0 <= calculator.rho("rho1", 100, 2) <= 1
    with pytest.raises(UsageError):
        calculator.rho("rho2", 10, 2)


def test_genus(calculator):
    assert calculator.genus("gamma0", 37) == 2
    assert calculator.genus("gamma1", 13) == 2
    with pytest.raises(UsageError):
        calculator.genus("gamma2", 13)


def test_prime_residue_table(calculator):
    table = calculator.prime_residue_table(2000)
    assert table == {
        1: [Fraction(-7, 6)],
        2: [Fraction(-1, 4)],
        3: [Fraction(-1, 3)],
        5: [Fraction(-1, 2)],
        7: [Fraction(-2, 3)],
        11: [Fraction(0)],
    }


def test_non_integral_formula_raises(toolkit):
    broken = FunctionRegistry().with_override("nu2", lambda p, a: 1)
    calculator = DimensionCalculator(DirichletEngine(toolkit, broken))
    with pytest.raises(InternalConsistencyError):
        calculator.value("g0", 3, 2)


@pytest.mark.parametrize("family", ["g0", "g0plus", "g0star"])
def test_every_gamma0_dimension_is_a_nonnegative_integer(calculator, family):
    for k in (2, 4):
        values = calculator.values(family, k, 1, 20_000)
        assert len(values) == 20_000
        assert all(isinstance(v, int) and v >= 0 for v in values)


@pytest.mark.parametrize("new, star, full, weights, hi", [
    ("g0plus", "g0star", "g0", (2, 4, 12), 5000),
    ("g1plus", "g1star", "g1", (2, 3, 4), 2000),
])
def test_new_star_full_ordering(calculator, new, star, full, weights, hi):
    for k in weights:
        rows = zip(calculator.values(new, k, 1, hi), calculator.values(star, k, 1, hi),
                   calculator.values(full, k, 1, hi))
        bad = [N for N, (a, b, c) in enumerate(rows, start=1) if not 0 <= a <= b <= c]
        assert bad == []


@pytest.mark.parametrize("k", [2, 4, 6, 12, 14])
def test_squarefree_star_dimension_depends_on_level_mod_12(calculator, toolkit, k):
    offsets = {}
    for N in range(2, 3000):
        if toolkit.is_squarefree(N):
            offsets.setdefault(N % 12, set()).add(12 * calculator.value("g0star", N, k) - (k - 1) * N)
    assert sorted(offsets) == [1, 2, 3, 5, 6, 7, 9, 10, 11]
    assert all(len(seen) == 1 for seen in offsets.values())
