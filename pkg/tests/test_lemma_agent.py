import pytest

from agents.lemma_agent import CONVOLUTION_IDENTITIES, LemmaAgent


@pytest.fixture(scope="module")
def lemmas(calculator, scanner, constants, config):
    return LemmaAgent(calculator, scanner, constants, config)


def test_convolution_identities(lemmas):
    report = lemmas.verify_convolution_identities(10_000)
    assert report.failures == {}
    assert len(report.identities) == len(CONVOLUTION_IDENTITIES)


def test_suite_small_range_has_no_failures(lemmas):
    report = lemmas.run_suite(10_000)
    assert report.failed == []
    names = {check.name for check in report.checks}
    assert {"g0plus.upper", "two.primes", "sixth.power", "three.primes", "six.divides",
            "primes.equality", "star.s0", "s0.primorial", "primes.residue", "average.c(s0)",
            "average.c(s1plus)"} <= names


def test_suite_full_range(lemmas):
    report = lemmas.run_suite(100_000)
    assert report.failed == []
    sixth = next(check for check in report.checks if check.name == "sixth.power")
    assert sixth.checked > 0


def test_primorial_check_window(lemmas):
    assert lemmas.primorial_check().violations == []
    assert 16 in lemmas.primorial_check(y_min=16, y_max=16).violations


def test_zeta2_partial_products(lemmas):
    check = lemmas.zeta2_partial_products(10_000)
    assert check.violations == []
    assert check.checked == 9_999


def test_average_constants_match_closed_forms(lemmas):
    checks = lemmas.average_constant_checks(100_000)
    assert [check.name for check in checks] == [
        "average.c(s0)", "average.c(s0star)", "average.c(s0plus)",
        "average.c(s1)", "average.c(s1star)", "average.c(s1plus)",
    ]
    assert all(check.violations == [] for check in checks)
