from fractions import Fraction

import pytest

from agents.average_agent import AverageAgent, RationalSum, exact_tree_sum
from utils.exceptions import PreconditionError, UsageError


@pytest.fixture(scope="module")
def averages(calculator, scanner, constants, config):
    return AverageAgent(calculator, scanner, constants, config)


@pytest.mark.parametrize("target", ["g0", "g0star", "g0plus", "g1", "g1star", "g1plus"])
def test_dimension_averages_at_1e5(averages, target):
    check = averages.average_ratio(target, 2, 100_000)
    assert abs(check.ratio - 1) < 0.01
    assert check.limit == 100_000


def test_exact_sums_are_exact(averages, calculator):
    total = averages.empirical_sum("g0", 2, 1000)
    assert isinstance(total, Fraction)
    assert total == sum(calculator.value("g0", n, 2) for n in range(1, 1001))
    rho = averages.empirical_sum("rho0", 2, 200)
    assert rho == sum(calculator.rho("rho0", n, 2) for n in range(1, 201))


def test_rho1_sum_is_exact(averages, calculator):
    total = averages.empirical_sum("rho1", 2, 300)
    assert isinstance(total, RationalSum)
    exact = sum(calculator.rho("rho1", n, 2) for n in range(1, 301))
    assert total.reduced() == exact
    assert int(total.decimal(20).replace(".", "")) == exact.numerator * 10 ** 20 // exact.denominator
    assert float(total) == float(exact)


def test_tree_sum_handles_large_denominators():
    terms = {2 ** 3000 + 1: 1, 3 ** 2000: 2, 7: 3, 5 ** 1500: 4, 11: 5}
    total = exact_tree_sum(terms)
    assert total.reduced() == sum(Fraction(a, q) for q, a in terms.items())
    assert exact_tree_sum({}).reduced() == 0


@pytest.mark.slow
@pytest.mark.parametrize("target", ["rho0", "rho1"])
def test_rho_averages_at_1e6(averages, target):
    assert abs(averages.average_ratio(target, 2, 1_000_000).ratio - 1) < 0.03


def test_average_preconditions(averages):
    with pytest.raises(PreconditionError):
        averages.average_ratio("g0", 2, 999)
    with pytest.raises(UsageError):
        averages.average_ratio("g7", 2, 1000)


def test_rho_floor(averages):
    report = averages.rho_floor_scan(2, 1000, 100_000)
    assert report.minimum_decimal > 0.2
    assert 1000 <= report.argmin <= 100_000
    assert averages.rho_floor_scan(2, 1, 1).minimum == "1"
    assert abs(report.asymptote - 0.206418) < 1e-5
