import itertools
import logging
from typing import Dict, Iterable, List, Optional

from core.arithmetic import Factorization
from core.dimensions import DimensionCalculator
from utils.exceptions import PreconditionError
from utils.records import BoundReport, PowerOfTwoReport, ResidualReport
from utils.scanner import LevelScanner

logger = logging.getLogger("BennettAgent")

RESIDUAL_PRIMES = (7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
RESIDUAL_MAX_EXPONENT = 5


class BennettAgent:
    def __init__(self, calculator: Optional[DimensionCalculator] = None, scanner: Optional[LevelScanner] = None):
        """
        Initialize the agent that checks the sharp upper bounds for weight-2 newforms.

        Args:
            calculator: Closed-form dimension calculator
            scanner: Level scanner for range scans
        """
        logger.info("Initializing BennettAgent...")
        self.calculator = calculator or DimensionCalculator()
        self.scanner = scanner or LevelScanner(self.calculator)

    def verify_sharp_bound(self, max_level: int) -> BoundReport:
        """
        Check g0plus(N, 2) <= (N + 1)/12 for every N <= max_level.

        Args:
            max_level: Largest level scanned

        Returns:
            BoundReport with violations and the levels where equality holds
        """
        if max_level < 1:
            raise PreconditionError(f"max level must be >= 1, got {max_level}")
        logger.info(f"🔍 Checking g0plus(N,2) <= (N+1)/12 up to {max_level}")
        values = self.scanner.scan("g0plus", 2, 1, max_level)
        violations: List[int] = []
        equality: List[int] = []
        for N, g in enumerate(values, start=1):
            if 12 * g > N + 1:
                violations.append(N)
            elif 12 * g == N + 1:
                equality.append(N)
        logger.info(f"{len(violations)} violations, {len(equality)} equality levels")
        return BoundReport(max_level=max_level, violations=violations, equality_set=equality)

    def verify_power_of_two(self, max_odd_level: int, alphas: Iterable[int], weights: Iterable[int]) -> PowerOfTwoReport:
        """
        Check the closed form at levels 2^alpha N for odd squarefree N >= 3.

        g0plus(2^alpha N, k) = (k - 1) 2^(alpha - 5) phi(N) for alpha >= 4, and
        g0plus(2N, k) <= (k - 1) phi(N).

        Args:
            max_odd_level: Largest odd N
            alphas: Exponents alpha >= 4
            weights: Even weights

        Returns:
            PowerOfTwoReport listing every failing case
        """
        alphas = sorted(set(alphas))
        weights = sorted(set(weights))
        if any(alpha < 4 for alpha in alphas):
            raise PreconditionError("the power-of-two identity needs alpha >= 4")
        logger.info(f"🔍 Checking power-of-two identity for odd squarefree N <= {max_odd_level}")
        toolkit = self.calculator.toolkit
        failures: List[Dict[str, int]] = []
        checked = 0
        for N in range(3, max_odd_level + 1, 2):
            fac = toolkit.factorize(N)
            if not fac.is_squarefree:
                continue
            phi = toolkit.arithmetic_function("phi", N)
            for k in weights:
                # 2^(alpha-5) (k-1) phi(N) is an integer: phi(N) is even for N >= 3.
                for alpha in alphas:
                    level = Factorization(((2, alpha),) + fac.pairs)
                    actual = self.calculator.value_from_factorization("g0plus", level, k)
                    expected = (k - 1) * phi * 2 ** alpha // 32
                    checked += 1
                    if actual != expected:
                        failures.append({"N": N, "alpha": alpha, "k": k, "actual": actual, "expected": expected})
                doubled = self.calculator.value_from_factorization("g0plus", Factorization(((2, 1),) + fac.pairs), k)
                checked += 1
                if doubled > (k - 1) * phi:
                    failures.append({"N": N, "alpha": 1, "k": k, "actual": doubled, "expected": (k - 1) * phi})
        logger.info(f"Power-of-two check: {checked} cases, {len(failures)} failures")
        return PowerOfTwoReport(max_odd_level=max_odd_level, alphas=alphas, weights=weights,
                                cases_checked=checked, failures=failures)

    @staticmethod
    def residual_levels() -> List[Factorization]:
        """Levels 2^a 3^b 5^c p^d with 7 <= p <= 41, exponents <= 5 and at least three of them positive."""
        seen = {}
        for p in RESIDUAL_PRIMES:
            exponent_range = range(RESIDUAL_MAX_EXPONENT + 1)
            for a, b, c, d in itertools.product(exponent_range, repeat=4):
                if sum(1 for e in (a, b, c, d) if e > 0) < 3:
                    continue
                fac = Factorization.from_exponents({2: a, 3: b, 5: c, p: d})
                seen[fac.value] = fac
        return [seen[n] for n in sorted(seen)]

    def verify_bennett_residual(self) -> ResidualReport:
        """Check g0plus(N, 2) <= N/12 - 3/2 on the residual levels the general lemmas leave open."""
        logger.info("🔍 Checking the residual levels of the sharp bound")
        violations: List[int] = []
        tight: List[int] = []
        levels = self.residual_levels()
        for fac in levels:
            g = self.calculator.value_from_factorization("g0plus", fac, 2)
            N = fac.value
            if 12 * g > N - 18:
                violations.append(N)
            elif 12 * g == N - 18:
                tight.append(N)
        logger.info(f"Residual check over {len(levels)} levels: {len(violations)} violations")
        return ResidualReport(levels_checked=len(levels), violations=violations, tight_levels=tight)
