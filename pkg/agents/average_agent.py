import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Union

import mpmath

from core.constants import CLASSICAL_DPS, Constants, compute_constants
from core.dimensions import RHO_PARTS, DimensionCalculator, check_weight
from utils.config import DIMENSION_FAMILIES, RHO_FAMILIES, ScanConfig
from utils.exceptions import PreconditionError, UsageError
from utils.records import AverageCheck, RhoFloorReport, format_fraction
from utils.scanner import LevelScanner

logger = logging.getLogger("AverageAgent")

# Pairs whose denominators together stay below this many bits are added as reduced fractions.
REDUCE_BELOW_BITS = 4096


@dataclass(frozen=True)
class RationalSum:
    """An exact rational kept as an unreduced numerator/denominator pair.

    The rho1 partial sums have denominators with millions of digits at x = 10^6, where
    normalising would need a gcd of that size. Conversion to a decimal is exact.
    """

    numerator: int
    denominator: int

    def __float__(self) -> float:
        return self.numerator / self.denominator

    def reduced(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def decimal(self, digits: int = 40) -> str:
        """Decimal expansion truncated to the given number of digits (the sum is nonnegative)."""
        whole, rest = divmod(self.numerator * 10 ** digits // self.denominator, 10 ** digits)
        return f"{whole}.{rest:0{digits}d}"


def exact_tree_sum(terms: Dict[int, int]) -> RationalSum:
    """
    Sum numerator/denominator terms exactly in a balanced tree.

    Args:
        terms: Reduced denominator -> summed numerator

    Returns:
        RationalSum equal to the sum of numerator/denominator over all terms
    """
    pairs = [(a, q) for q, a in terms.items()] or [(0, 1)]
    while len(pairs) > 1:
        merged = []
        for (a, b), (c, d) in zip(pairs[0::2], pairs[1::2]):
            if b == d:
                merged.append((a + c, b))
            elif b.bit_length() + d.bit_length() < REDUCE_BELOW_BITS:
                total = Fraction(a, b) + Fraction(c, d)
                merged.append((total.numerator, total.denominator))
            else:
                merged.append((a * d + c * b, b * d))
        if len(pairs) % 2:
            merged.append(pairs[-1])
        pairs = merged
    return RationalSum(*pairs[0])


class AverageAgent:
    def __init__(self, calculator: Optional[DimensionCalculator] = None,
                 scanner: Optional[LevelScanner] = None,
                 constants: Optional[Constants] = None,
                 config: Optional[ScanConfig] = None):
        """
        Initialize the agent comparing partial sums with their predicted main terms.

        Args:
            calculator: Closed-form dimension calculator
            scanner: Level scanner
            constants: Precomputed constants (B0, B1); computed lazily when omitted
            config: Scan configuration
        """
        logger.info("Initializing AverageAgent...")
        self.config = config or ScanConfig()
        self.calculator = calculator or DimensionCalculator(config=self.config)
        self.scanner = scanner or LevelScanner(self.calculator, self.config)
        self._constants = constants

    @property
    def constants(self) -> Constants:
        if self._constants is None:
            self._constants = compute_constants(self.config.euler_cutoff_prime)
        return self._constants

    def average_constant(self, target: str, k: int) -> mpmath.mpf:
        """Constant c of the average order: c N for the gamma0 families, c N^2 for gamma1, c for rho."""
        with mpmath.workdps(CLASSICAL_DPS):
            pi = mpmath.pi
            zeta3 = mpmath.zeta(3)
            table = {
                "g0": 5 * (k - 1) / (4 * pi ** 2),
                "g0star": 15 * (k - 1) / (2 * pi ** 4),
                "g0plus": 45 * (k - 1) / pi ** 6,
                "g1": (k - 1) / (24 * zeta3),
                "g1star": (k - 1) / (24 * zeta3 ** 2),
                "g1plus": (k - 1) / (24 * zeta3 ** 3),
            }
            if target in table:
                return table[target]
        if target == "rho0":
            return mpmath.mpf(self.constants.B0.value)
        if target == "rho1":
            return mpmath.mpf(self.constants.B1.value)
        raise UsageError(f"unknown average target {target!r}")

    def predicted_sum(self, target: str, k: int, limit: int) -> float:
        c = self.average_constant(target, k)
        if target in RHO_FAMILIES:
            return float(c * limit)
        if target.startswith("g0"):
            return float(c * mpmath.mpf(limit) ** 2 / 2)
        return float(c * mpmath.mpf(limit) ** 3 / 3)

    def empirical_sum(self, target: str, k: int, limit: int) -> Union[Fraction, RationalSum]:
        """
        Exact sum of target(N, k) over N <= limit.

        Dimension sums and rho0 sums come back as Fraction. The reduced denominators of rho1 are
        distinct values of g1 of size about N^2, so rho1 comes back as an unreduced RationalSum.
        """
        if target in DIMENSION_FAMILIES:
            return Fraction(sum(self.scanner.scan(target, k, 1, limit)))
        new_family, full_family = RHO_PARTS[target]
        new = self.scanner.scan(new_family, k, 1, limit)
        full = self.scanner.scan(full_family, k, 1, limit)
        grouped = self._group_by_denominator(new, full)
        if target == "rho0":
            return self._common_denominator_sum(grouped)
        return exact_tree_sum(grouped)

    @staticmethod
    def _group_by_denominator(new, full) -> Dict[int, int]:
        # rho = new/full reduced, with rho = 1 on zero-dimensional spaces
        grouped: Dict[int, int] = defaultdict(int)
        for a, b in zip(new, full):
            if b == 0:
                grouped[1] += 1
                continue
            g = math.gcd(a, b)
            grouped[b // g] += a // g
        return grouped

    def _common_denominator_sum(self, grouped: Dict[int, int]) -> Fraction:
        # One common denominator built from prime powers of the reduced denominators.
        exponents: Dict[int, int] = {}
        for q in grouped:
            for p, e in self.calculator.toolkit.factorize(q):
                if e > exponents.get(p, 0):
                    exponents[p] = e
        common = 1
        for p, e in exponents.items():
            common *= p ** e
        numerator = sum(s * (common // q) for q, s in grouped.items())
        return Fraction(numerator, common)

    def average_ratio(self, target: str, k: int, limit: int) -> AverageCheck:
        """
        Ratio of the exact partial sum to the predicted main term.

        Args:
            target: A dimension family or rho0 / rho1
            k: Weight
            limit: Upper limit x >= 1000

        Returns:
            AverageCheck
        """
        check_weight(k)
        if limit < 1000:
            raise PreconditionError(f"average checks need x >= 1000, got {limit}")
        if target not in DIMENSION_FAMILIES and target not in RHO_FAMILIES:
            raise UsageError(f"unknown average target {target!r}")
        logger.info(f"📈 Average order of {target} at k={k} up to {limit}")
        total = self.empirical_sum(target, k, limit)
        predicted = self.predicted_sum(target, k, limit)
        ratio = float(total) / predicted
        logger.info(f"{target}: empirical/predicted = {ratio:.6f}")
        shown = format_fraction(total) if isinstance(total, Fraction) else total.decimal(40)
        return AverageCheck(target=target, k=k, limit=limit, empirical_sum=shown,
                            predicted=predicted, ratio=ratio)

    def rho_floor_scan(self, k: int, lo: int, hi: int) -> RhoFloorReport:
        """
        Exact minimum of rho1(N, k) over lo <= N <= hi.

        Returns:
            RhoFloorReport with the minimum as a fraction, its first argmin and the
            asymptotic floor A1plus pi^2/6 for comparison
        """
        check_weight(k)
        if lo < 1 or hi < lo:
            raise PreconditionError(f"empty level range {lo}..{hi}")
        logger.info(f"📉 Scanning rho1(N,{k}) for {lo} <= N <= {hi}")
        new = self.scanner.scan("g1plus", k, lo, hi)
        full = self.scanner.scan("g1", k, lo, hi)
        best = Fraction(1)
        argmin = lo
        for offset, (a, b) in enumerate(zip(new, full)):
            value = Fraction(a, b) if b else Fraction(1)
            if value < best:
                best, argmin = value, lo + offset
        return RhoFloorReport(k=k, lo=lo, hi=hi, minimum=format_fraction(best),
                              minimum_decimal=float(best), argmin=argmin,
                              asymptote=self.constants.rho1_floor_asymptote.value)
