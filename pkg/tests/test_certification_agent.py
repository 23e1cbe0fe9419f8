import math

import pytest

from agents.certification_agent import (
    OMEGA_CONSTANT,
    OMEGA_EXPONENT,
    CertificationAgent,
    first_exceeding,
    verify_increasing,
)
from utils.exceptions import InternalConsistencyError, PreconditionError

LEVELS_AT_100 = [
    1213, 1331, 2169, 2583, 2662, 2745, 3208, 3232, 3465, 3608, 4040, 4302, 4338, 4772, 4804, 4848,
    5084, 5092, 5166, 5252, 5324, 5490, 5572, 5904, 6336, 6820, 6930, 7056, 7188, 7212, 7920, 8052,
    8484, 8652, 8676, 8940, 9060, 10332, 10980, 13860,
]


@pytest.fixture(scope="module")
def certifier(calculator, scanner, constants, config):
    return CertificationAgent(calculator, scanner, constants, config)


def test_omega_constants():
    assert math.isclose(OMEGA_EXPONENT, math.log(2) / math.log(11))
    assert OMEGA_CONSTANT * 210 ** OMEGA_EXPONENT >= 16 * (1 - 1e-12)


def test_certified_cutoff_for_bound_100(certifier):
    certificate = certifier.certified_cutoff("g0plus", 2, 100)
    assert certificate.cutoff <= 132_000
    nonsquare, square = certificate.branches
    assert nonsquare.variable == "N" and square.variable == "M"
    assert nonsquare.value_at_threshold > 100
    assert square.threshold ** 2 <= certificate.cutoff
    assert certificate.a0plus_lower < 0.373956


def test_full_space_cutoff_for_bound_1000(certifier):
    certificate = certifier.certified_cutoff("g0", 2, 1000)
    assert 13_000 < certificate.cutoff <= 13_500
    assert certifier.certified_cutoff("g0", 2, 10_000).cutoff <= 124_000


def test_unsupported_family_or_weight(certifier):
    with pytest.raises(PreconditionError):
        certifier.certified_cutoff("g1plus", 2, 10)
    with pytest.raises(PreconditionError):
        certifier.certified_cutoff("g0plus", 4, 10)
    with pytest.raises(PreconditionError):
        certifier.certified_cutoff("g0plus", 2, -1)


def test_enumeration_up_to_100(certifier):
    result = certifier.enumerate_small_dim("g0plus", 2, 100)
    assert result.certified
    assert len(result.levels) == 2965
    assert [n for n, v in result.levels if v == 100] == LEVELS_AT_100
    assert result.count_at(100) == 40
    assert all(v <= 100 for _, v in result.levels)


def test_enumeration_of_zero_dimension(certifier):
    result = certifier.enumerate_small_dim("g0plus", 2, 0)
    assert [n for n, _ in result.levels] == [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 16, 18, 22, 25, 28, 60]


def test_user_cutoff_is_uncertified(certifier):
    result = certifier.enumerate_small_dim("g0plus", 2, 1, cutoff=100)
    assert not result.certified
    assert result.certificate is None
    assert (11, 1) in result.levels


def test_curve_helpers():
    line = lambda x: 2.0 * x  # noqa: E731
    assert first_exceeding(line, 1, 10) == 6
    assert first_exceeding(line, 50, 10) == 50
    start, ratio, points = verify_increasing(line, 1, 6)
    assert start == 1 and points > 1 and ratio > 1
    with pytest.raises(InternalConsistencyError):
        verify_increasing(lambda x: -x, 1, 6)
