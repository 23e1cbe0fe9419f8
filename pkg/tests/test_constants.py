import math

import pytest

from core.constants import classical_value, partial_zeta2_product, zeta2_product_gaps

PUBLISHED = {
    "A0plus": 0.373956,
    "A1star": 0.322634,
    "A1plus": 0.125487,
    "B0": 0.444301,
    "B1": 0.652036,
}


@pytest.mark.parametrize("name", sorted(PUBLISHED))
def test_euler_products_match_published_digits(constants, name):
    value = getattr(constants, name)
    assert abs(value.value - PUBLISHED[name]) <= 5e-7 + value.radius
    assert value.radius < 1e-5
    assert value.cutoff_prime == 100_000


def test_certified_radius_at_default_cutoff():
    from core.constants import compute_constants

    constants = compute_constants(10 ** 7)
    assert constants.A0plus.digits >= 7
    for name, expected in PUBLISHED.items():
        assert abs(getattr(constants, name).value - expected) <= 5e-7


def test_classical_constants(constants):
    assert math.isclose(constants.pi.value, math.pi, rel_tol=1e-15)
    assert math.isclose(constants.zeta2.value, math.pi ** 2 / 6, rel_tol=1e-15)
    assert math.isclose(constants.gammaEuler.value, 0.5772156649015329, rel_tol=1e-15)
    assert math.isclose(float(classical_value("zeta3")), 1.2020569031595942, rel_tol=1e-15)


def test_rho1_floor_asymptote(constants):
    floor = constants.rho1_floor_asymptote
    assert abs(floor.value - 0.206418) <= 5e-7 + floor.radius
    assert math.isclose(floor.value, constants.A1plus.value * math.pi ** 2 / 6, rel_tol=1e-12)


def test_partial_zeta2_products_bounded():
    assert partial_zeta2_product(2) == pytest.approx(0.75)
    gaps = zeta2_product_gaps(10_000)
    assert len(gaps) == 9_999
    assert all(0 < gap <= 1 for gap in gaps.values())
