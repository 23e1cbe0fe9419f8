"""Euler-product constants with certified radii, and the classical constants from mpmath."""

import logging
import math
from typing import Dict

import mpmath
import numpy as np
from pydantic import BaseModel

from core.dirichlet import certified_digits, euler_product
from utils.records import ConstantValue
from utils.sieve import primes_up_to

logger = logging.getLogger("Constants")

CLASSICAL_DPS = 30

# Deviation x_p = L_p - 1 of each local factor L_p, and a constant C with |x_p| <= C/p^2.
_DEVIATIONS: Dict[str, tuple] = {
    "A0plus": (lambda p: -1.0 / (p * (p - 1.0)), 2.0),
    "A1star": (lambda p: -2.0 / p ** 2, 2.0),
    "A1plus": (lambda p: -3.0 / p ** 2, 3.0),
    "B0": (lambda p: (-2.0 / p ** 2 - 1.0 / p ** 4 + 1.0 / p ** 6) / (1.0 + 1.0 / p), 3.0),
    "B1": (lambda p: (-2.0 / p ** 3 - 2.0 / p ** 4 - 2.0 / p ** 5 + p ** -6.0 + p ** -7.0 + p ** -8.0) / (1.0 + 1.0 / p), 2.0),
}


class Constants(BaseModel):
    A0plus: ConstantValue
    A1star: ConstantValue
    A1plus: ConstantValue
    B0: ConstantValue
    B1: ConstantValue
    gammaEuler: ConstantValue
    zeta2: ConstantValue
    zeta3: ConstantValue
    zeta4: ConstantValue
    pi: ConstantValue
    rho1_floor_asymptote: ConstantValue


def _classical(name: str, value: mpmath.mpf) -> ConstantValue:
    return ConstantValue(name=name, value=float(value), radius=float(mpmath.mpf(10) ** (-CLASSICAL_DPS + 2)),
                         digits=15)


def compute_constants(cutoff_prime: int = 10_000_000) -> Constants:
    """
    Compute every constant the dimension formulas and bounds refer to.

    Args:
        cutoff_prime: Largest prime multiplied in exactly for the Euler products

    Returns:
        Constants model
    """
    logger.info(f"Computing Euler-product constants over primes <= {cutoff_prime}")
    primes = primes_up_to(cutoff_prime)
    p = primes.astype(np.float64)
    products = {
        name: euler_product(name, deviation(p), decay, cutoff_prime, primes)
        for name, (deviation, decay) in _DEVIATIONS.items()
    }
    with mpmath.workdps(CLASSICAL_DPS):
        pi = +mpmath.pi
        classical = {
            "gammaEuler": _classical("gammaEuler", +mpmath.euler),
            "zeta2": _classical("zeta2", mpmath.zeta(2)),
            "zeta3": _classical("zeta3", mpmath.zeta(3)),
            "zeta4": _classical("zeta4", mpmath.zeta(4)),
            "pi": _classical("pi", pi),
        }
        scale = float(pi ** 2 / 6)
    a1plus = products["A1plus"]
    floor_radius = a1plus.radius * scale + 1e-15
    floor = ConstantValue(name="rho1_floor_asymptote", value=a1plus.value * scale, radius=floor_radius,
                          digits=certified_digits(floor_radius), cutoff_prime=cutoff_prime)
    for item in products.values():
        logger.info(f"{item.name} = {item.formatted()} (radius {item.radius:.1e})")
    return Constants(rho1_floor_asymptote=floor, **products, **classical)


def partial_zeta2_product(y: int) -> float:
    """Product of (1 - 1/p^2) over primes p <= y."""
    primes = primes_up_to(y).astype(np.float64)
    return math.exp(math.fsum(np.log1p(-1.0 / primes ** 2).tolist()))


def zeta2_product_gaps(limit: int) -> Dict[int, float]:
    """
    Scaled gap y * (prod_{p<=y}(1 - 1/p^2) - 6/pi^2) for every 2 <= y <= limit.

    The partial products exceed 6/pi^2 and the scaled gap stays below 1.
    """
    primes = primes_up_to(limit)
    logs = np.cumsum(np.log1p(-1.0 / primes.astype(np.float64) ** 2))
    target = 6.0 / math.pi ** 2
    gaps: Dict[int, float] = {}
    index = -1
    for y in range(2, limit + 1):
        while index + 1 < len(primes) and primes[index + 1] <= y:
            index += 1
        gaps[y] = y * (math.exp(logs[index]) - target)
    return gaps


def classical_value(name: str) -> mpmath.mpf:
    """High-precision value of pi, gamma, zeta(2), zeta(3) or zeta(4)."""
    with mpmath.workdps(CLASSICAL_DPS):
        table = {
            "pi": lambda: +mpmath.pi,
            "gammaEuler": lambda: +mpmath.euler,
            "zeta2": lambda: mpmath.zeta(2),
            "zeta3": lambda: mpmath.zeta(3),
            "zeta4": lambda: mpmath.zeta(4),
        }
        return table[name]()
