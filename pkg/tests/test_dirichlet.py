import math
from fractions import Fraction

import mpmath
import pytest

from core.dirichlet import (MEMO_PRIME_BOUND, DirichletEngine, FunctionRegistry, certified_digits, euler_tail_radius,
                            prime_square_tail)
from utils.config import ScanConfig
from utils.exceptions import DomainError, ResourceError, UsageError


def test_lookup_and_aliases(registry):
    assert registry.lookup("lam").name == "lambda"
    assert registry.lookup("t").name == "u_plus"
    assert "psi" in registry
    with pytest.raises(UsageError):
        registry.lookup("no_such_function")


def test_eval_exact(engine):
    assert engine.eval("s0", 6) == Fraction(2, 1)
    assert engine.eval("Ns0", 6) == 12
    assert engine.eval("u", 9) == 16
    assert engine.eval("nu_inf", 12) == 6
    assert engine.eval("nu2", 5) == 2 and engine.eval("nu2", 3) == 0 and engine.eval("nu2", 4) == 0
    assert engine.eval("nu3", 7) == 2 and engine.eval("nu3", 9) == 0


def test_elliptic_counts_at_prime_powers(engine):
    # split primes keep two elliptic points at every exponent
    assert [engine.eval("nu2", 5 ** a) for a in range(1, 5)] == [2, 2, 2, 2]
    assert [engine.eval("nu3", 7 ** a) for a in range(1, 5)] == [2, 2, 2, 2]
    assert engine.eval("nu2", 25) == 2 and engine.eval("nu3", 49) == 2 and engine.eval("nu2", 50) == 2
    assert [engine.eval("nu2", 2 ** a) for a in range(1, 4)] == [1, 0, 0]
    assert [engine.eval("nu3", 3 ** a) for a in range(1, 4)] == [1, 0, 0]
    assert engine.eval("nu2", 9) == 0 and engine.eval("nu3", 25) == 0


def test_convolution_with_mu_inverts_one(engine):
    assert engine.agrees(engine.convolve("one", "mu"), "delta", 2000) == []
    assert engine.agrees(engine.convolve("tau", "lambda"), "delta", 2000) == []
    assert engine.agrees(engine.convolve("mu", "mu"), "lambda", 2000) == []


def test_batch_matches_pointwise(engine):
    for name in ("Ns0plus", "nu2_plus", "u_star", "s1plus", "N2s1star"):
        batch = engine.sieve_batch_eval(name, 500)
        assert batch == [engine.eval(name, n) for n in range(1, 501)]


def test_batch_respects_memory_cap(toolkit, registry):
    tight = DirichletEngine(toolkit, registry, ScanConfig(memory_cap_bytes=1000))
    with pytest.raises(ResourceError):
        tight.sieve_batch_eval("phi", 100)


def test_override_returns_fresh_registry(registry):
    changed = registry.with_override("nu2", lambda p, a: 7)
    assert changed.lookup("nu2").at_prime_power(5, 1) == 7
    assert registry.lookup("nu2").at_prime_power(5, 1) == 2


def test_summatory(engine):
    report = engine.summatory("phi", 10)
    assert report.partial_sum == "32"
    assert engine.summatory("id", 10, beta=1).partial_sum == "385"
    assert engine.summatory("s0", 3).partial_sum == "23/6"


@pytest.mark.parametrize("name, expected", [
    ("s0", lambda: 15 / mpmath.pi ** 2),
    ("s0star", lambda: 90 / mpmath.pi ** 4),
    ("s0plus", lambda: 540 / mpmath.pi ** 6),
    ("s1", lambda: 1 / mpmath.zeta(3)),
    ("s1star", lambda: 1 / mpmath.zeta(3) ** 2),
    ("s1plus", lambda: 1 / mpmath.zeta(3) ** 3),
])
def test_average_constants_within_radius(engine, name, expected):
    result = engine.euler_product_constant(name, cutoff_prime=100_000)
    assert result.name == f"c({name})"
    assert abs(result.value - float(expected())) <= result.radius
    assert result.digits >= 4


def test_divergent_product_rejected(engine):
    with pytest.raises(DomainError):
        engine.euler_product_constant("tau", cutoff_prime=10_000)


def test_tail_helpers():
    assert prime_square_tail(10 ** 7) < 3.4e-8
    radius = euler_tail_radius(0.373956, 2.0, 10 ** 7)
    assert 4e-8 < radius < 6e-8
    assert certified_digits(radius) == 7
    assert certified_digits(0.4e-6) == 6
    assert math.isclose(euler_tail_radius(1.0, 0.0, 100), 1e-13)


def test_memo_keeps_only_small_primes():
    phi = FunctionRegistry().lookup("phi")
    for p in (10_007, 10_009, 99_991):
        for a in range(1, 4):
            assert phi.at_prime_power(p, a) == p ** (a - 1) * (p - 1)
    assert phi.memo_size() == 0
    phi.at_prime_power(7, 2)
    assert phi.memo_size() == 1


def test_memo_stays_bounded_over_a_batch(toolkit):
    fresh = DirichletEngine(toolkit, FunctionRegistry())
    fresh.sieve_batch_eval("Ns0plus", 200_000)
    memo = fresh.registry.lookup("Ns0plus")._memo
    assert memo and all(p < MEMO_PRIME_BOUND for p, _ in memo)
    assert fresh.registry.lookup("Ns0plus").memo_size() <= 1229 * 17


def test_decay_bound_is_enforced(engine):
    with pytest.raises(DomainError):
        engine.euler_product_constant("s0plus", cutoff_prime=1000, decay=0.5)
    explicit = engine.euler_product_constant("s0plus", cutoff_prime=1000, decay=2.0)
    assert explicit.value == engine.euler_product_constant("s0plus", cutoff_prime=1000).value
