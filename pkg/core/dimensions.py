import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from core.arithmetic import ArithmeticToolkit, Factorization
from core.dirichlet import DirichletEngine, FunctionRegistry
from utils.config import DIMENSION_FAMILIES, GROUPS, RHO_FAMILIES, ScanConfig
from utils.exceptions import InternalConsistencyError, PreconditionError, UnsupportedWeightError, UsageError

logger = logging.getLogger("DimensionCalculator")

GAMMA0_FAMILIES = ("g0", "g0plus", "g0star")
GAMMA1_FAMILIES = ("g1", "g1plus", "g1star")
FULL_SPACE = {"gamma0": "g0", "gamma1": "g1"}
NEWFORM_FAMILY = {"gamma0": "g0plus", "gamma1": "g1plus"}
STAR_FAMILY = {"gamma0": "g0star", "gamma1": "g1star"}
RHO_PARTS = {"rho0": ("g0plus", "g0"), "rho1": ("g1plus", "g1")}

# Every formula is evaluated as 24 times the dimension, so each term is an integer.
SCALE = 24

# A term (c, f, i) contributes c * f(N/i) whenever i divides N.
Term = Tuple[int, str, int]


@dataclass(frozen=True)
class WeightCoefficients:
    k: int
    c2: Fraction
    c3: Fraction
    b1: Fraction
    b2: Fraction
    b3: Fraction
    b4: Fraction


@dataclass(frozen=True)
class DimensionValue:
    family: str
    N: int
    k: int
    value: int


def check_weight(k: int) -> int:
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise UnsupportedWeightError(f"weight must be an integer >= 2, got {k!r}")
    return k


def _c2(k: int) -> Fraction:
    return Fraction(1, 4) + k // 4 - Fraction(k, 4)


def _c3(k: int) -> Fraction:
    return Fraction(1, 3) + k // 3 - Fraction(k, 3)


@lru_cache(maxsize=None)
def weight_coeffs(k: int) -> WeightCoefficients:
    """
    Weight-dependent coefficients of the dimension formulas.

    Args:
        k: Integer weight >= 2

    Returns:
        WeightCoefficients with c2, c3 and b1..b4
    """
    check_weight(k)
    sign = -1 if k % 2 else 1
    c2, c3 = _c2(k), _c3(k)
    b1 = Fraction(sign * (k - 7), 24) + (c2 + c3 if k % 2 == 0 else 0)
    b2 = (sign * (k // 4 - 1) + c2) / 2
    return WeightCoefficients(k=k, c2=c2, c3=c3, b1=b1, b2=b2, b3=c3, b4=-_c2(2 * k))


def _scaled(coefficient: Fraction) -> int:
    scaled = coefficient * SCALE
    if scaled.denominator != 1:
        raise InternalConsistencyError(f"coefficient {coefficient} is not a multiple of 1/{SCALE}")
    return int(scaled)


@lru_cache(maxsize=None)
def formula_terms(family: str, k: int) -> Tuple[Term, ...]:
    """
    Integer terms of 24 * dimension(family, N, k).

    The gamma0 families are 0 for odd k and then have no terms.
    """
    if family not in DIMENSION_FAMILIES:
        raise UsageError(f"unknown dimension family {family!r}; expected one of {DIMENSION_FAMILIES}")
    w = weight_coeffs(k)
    weight_two = 1 if k == 2 else 0
    if family in GAMMA0_FAMILIES:
        if k % 2:
            return ()
        suffix = {"g0": "", "g0plus": "plus", "g0star": "star"}[family]
        tail = {"g0": "one", "g0plus": "mu", "g0star": "delta"}[family]
        sep = "_" if suffix else ""
        terms = [
            (2 * (k - 1), "Ns0" + suffix, 1),
            (-12, "nu_inf" + sep + suffix, 1),
            (_scaled(w.c2), "nu2" + sep + suffix, 1),
            (_scaled(w.c3), "nu3" + sep + suffix, 1),
            (SCALE * weight_two, tail, 1),
        ]
    else:
        suffix = {"g1": "", "g1plus": "plus", "g1star": "star"}[family]
        tail = {"g1": "one", "g1plus": "mu", "g1star": "delta"}[family]
        small = {"g1": "delta", "g1plus": "lambda", "g1star": "mu"}[family]
        sep = "_" if suffix else ""
        terms = [
            (k - 1, "N2s1" + suffix, 1),
            (-6, "u" + sep + suffix, 1),
            (SCALE * weight_two, tail, 1),
            (_scaled(w.b1), small, 1),
            (_scaled(w.b2), small, 2),
            (_scaled(w.b3), small, 3),
            (_scaled(w.b4), small, 4),
        ]
    return tuple(term for term in terms if term[0] != 0)


class DimensionCalculator:
    def __init__(self, engine: Optional[DirichletEngine] = None, config: Optional[ScanConfig] = None):
        """
        Initialize the closed-form dimension calculator.

        Args:
            engine: Dirichlet engine whose registry supplies every multiplicative function
            config: Scan configuration, used when no engine is given
        """
        logger.info("Initializing DimensionCalculator...")
        self.engine = engine or DirichletEngine(config=config)
        self.toolkit: ArithmeticToolkit = self.engine.toolkit
        self.registry: FunctionRegistry = self.engine.registry

    def weight_coeffs(self, k: int) -> WeightCoefficients:
        return weight_coeffs(k)

    def scaled_value(self, family: str, fac: Factorization, k: int) -> int:
        """24 times the formula value at the level with factorization fac, without any checks."""
        total = 0
        n = fac.value
        for coefficient, name, shift in formula_terms(family, check_weight(k)):
            f = self.registry.lookup(name)
            if shift == 1:
                total += coefficient * f.evaluate(fac)
            elif n % shift == 0:
                total += coefficient * f.evaluate(self.toolkit.factorize(n // shift))
        return int(total)

    def value_from_factorization(self, family: str, fac: Factorization, k: int) -> int:
        return _checked(family, fac.value, k, self.scaled_value(family, fac, k))

    def value(self, family: str, N: int, k: int) -> int:
        """Dimension as a plain int, with integrality and nonnegativity asserted."""
        return self.value_from_factorization(family, self.toolkit.factorize(N), k)

    def dimension(self, family: str, N: int, k: int) -> DimensionValue:
        """
        Evaluate one of the six dimension formulas exactly.

        Args:
            family: g0, g0plus, g0star, g1, g1plus or g1star
            N: Level >= 1
            k: Weight >= 2 (odd weights give 0 for the gamma0 families)

        Returns:
            DimensionValue with a nonnegative integer value
        """
        return DimensionValue(family=family, N=N, k=k, value=self.value(family, N, k))

    def scaled_values(self, family: str, k: int, lo: int, hi: int) -> List[int]:
        """24 times the formula for every level in [lo, hi], from batch evaluations over [1, hi]."""
        terms = formula_terms(family, check_weight(k))
        total = [0] * (hi - lo + 1)
        for coefficient, name, shift in terms:
            if shift == 1:
                column = self.engine.sieve_batch_eval(name, hi)[lo - 1:]
                total = [t + coefficient * v for t, v in zip(total, column)]
                continue
            column = self.engine.sieve_batch_eval(name, max(hi // shift, 1))
            first = -(-lo // shift) * shift
            for n in range(first, hi + 1, shift):
                total[n - lo] += coefficient * column[n // shift - 1]
        return [int(t) for t in total]

    def values(self, family: str, k: int, lo: int, hi: int, levelwise: bool = False) -> List[int]:
        """
        Dimensions for every level lo..hi, in level order.

        Args:
            family: Dimension family
            k: Weight
            lo: First level (>= 1)
            hi: Last level
            levelwise: Factorize each level separately instead of batch evaluating [1, hi]

        Returns:
            List of nonnegative integers
        """
        if lo < 1 or hi < lo:
            raise UsageError(f"empty level range {lo}..{hi}")
        if levelwise:
            scaled = [self.scaled_value(family, self.toolkit.factorize(n), k) for n in range(lo, hi + 1)]
        else:
            scaled = self.scaled_values(family, k, lo, hi)
        return [_checked(family, lo + i, k, s) for i, s in enumerate(scaled)]

    def gekeler_squarefree(self, N: int, k: int) -> int:
        """
        Star dimension at squarefree level through its residue class mod 12.

        Args:
            N: Squarefree level
            k: Even weight >= 2

        Returns:
            (k-1)N/12 - 1/2 + c2(k) chi_-4(N) + c3(k) chi_-3(N)
        """
        check_weight(k)
        if k % 2:
            raise PreconditionError(f"the squarefree formula needs even weight, got {k}")
        if not self.toolkit.is_squarefree(N):
            raise PreconditionError(f"level {N} is not squarefree")
        if (k, N) == (2, 1):
            raise PreconditionError("the squarefree formula excludes (k, N) = (2, 1)")
        w = weight_coeffs(k)
        value = (Fraction((k - 1) * N, 12) - Fraction(1, 2)
                 + w.c2 * self.toolkit.character("chi_minus4", N)
                 + w.c3 * self.toolkit.character("chi_minus3", N))
        if value.denominator != 1 or value < 0:
            raise InternalConsistencyError(f"squarefree formula gave {value} at N={N}, k={k}")
        return int(value)

    def rho(self, family: str, N: int, k: int) -> Fraction:
        """Proportion of new forms in the cusp space, 1 when the space is zero."""
        if family not in RHO_FAMILIES:
            raise UsageError(f"unknown rho family {family!r}; expected one of {RHO_FAMILIES}")
        new, full = RHO_PARTS[family]
        denominator = self.value(full, N, k)
        if denominator == 0:
            return Fraction(1)
        return Fraction(self.value(new, N, k), denominator)

    def genus(self, group: str, N: int) -> int:
        if group not in GROUPS:
            raise UsageError(f"unknown group {group!r}; expected one of {GROUPS}")
        return self.value(FULL_SPACE[group], N, 2)

    def prime_residue_table(self, limit: int, k: int = 2) -> Dict[int, List[Fraction]]:
        """
        Offsets g0plus(p, k) - (k-1)(p+1)/12 for primes p <= limit, grouped by p mod 12.

        Returns:
            Map residue -> sorted distinct offsets seen in that class
        """
        table: Dict[int, set] = {}
        sieve = self.toolkit.sieve_covering(max(limit, 2))
        for p in range(2, limit + 1):
            if not sieve.is_prime(p):
                continue
            offset = self.value("g0plus", p, k) - Fraction((k - 1) * (p + 1), 12)
            table.setdefault(p % 12, set()).add(offset)
        return {residue: sorted(offsets) for residue, offsets in sorted(table.items())}


def _checked(family: str, N: int, k: int, scaled: int) -> int:
    value, remainder = divmod(scaled, SCALE)
    if remainder:
        raise InternalConsistencyError(f"{family}({N},{k}) = {Fraction(scaled, SCALE)} is not an integer")
    if value < 0:
        raise InternalConsistencyError(f"{family}({N},{k}) = {value} is negative")
    return value


_worker_calculators: Dict[int, DimensionCalculator] = {}


def worker_values(task: Tuple[str, int, int, int, int]) -> List[int]:
    """Process-pool entry point: (family, k, lo, hi, sieve_limit) -> dimensions for lo..hi."""
    family, k, lo, hi, sieve_limit = task
    calculator = _worker_calculators.get(sieve_limit)
    if calculator is None:
        calculator = DimensionCalculator(config=ScanConfig(sieve_limit=sieve_limit))
        _worker_calculators[sieve_limit] = calculator
    return calculator.values(family, k, lo, hi, levelwise=True)
