import logging
import math
from typing import Callable, List, Optional, Tuple

from core.constants import Constants, compute_constants
from core.dimensions import DimensionCalculator, check_weight
from utils.config import ScanConfig
from utils.exceptions import InternalConsistencyError, PreconditionError
from utils.records import BranchCertificate, EnumerationResult, SearchCertificate
from utils.scanner import LevelScanner

logger = logging.getLogger("CertificationAgent")

# 2^omega(N) <= OMEGA_CONSTANT * N^OMEGA_EXPONENT for every N >= 1.
OMEGA_EXPONENT = math.log(2) / math.log(11)
OMEGA_CONSTANT = 2 ** (4 - 4 * OMEGA_EXPONENT)

# Points past which each lower-bound curve is increasing.
NONSQUARE_TURNING = 9_000
SQUARE_TURNING = 170
FULL_SPACE_TURNING = 200

GRID_POINTS = 400
GRID_SPAN = 64.0
MARGIN = 1e-9


class CertificationAgent:
    def __init__(self, calculator: Optional[DimensionCalculator] = None,
                 scanner: Optional[LevelScanner] = None,
                 constants: Optional[Constants] = None,
                 config: Optional[ScanConfig] = None):
        """
        Initialize the certification agent.

        Args:
            calculator: Closed-form dimension calculator
            scanner: Level scanner for the enumeration below the cutoff
            constants: Precomputed constants; computed lazily when omitted
            config: Scan configuration (Euler cutoff prime for the constants)
        """
        logger.info("Initializing CertificationAgent...")
        self.config = config or ScanConfig()
        self.calculator = calculator or DimensionCalculator(config=self.config)
        self.scanner = scanner or LevelScanner(self.calculator, self.config)
        self._constants = constants

    @property
    def constants(self) -> Constants:
        if self._constants is None:
            self._constants = compute_constants(self.config.euler_cutoff_prime)
        return self._constants

    def a0plus_lower(self) -> float:
        a0 = self.constants.A0plus
        return a0.value - a0.radius

    def nonsquare_curve(self, a0: float) -> Callable[[float], float]:
        """Lower bound for g0plus(N, 2) at non-square N."""
        return lambda n: (a0 / 12) * n * math.log(2) / math.log(2 * n) - (7 / 12) * OMEGA_CONSTANT * n ** OMEGA_EXPONENT - 1

    def square_curve(self, a0: float) -> Callable[[float], float]:
        """Lower bound for g0plus(M^2, 2) as a function of M."""
        return lambda m: ((a0 / 12) * m * m * math.log(2) / math.log(2 * m) - m / 2
                          - (7 / 12) * OMEGA_CONSTANT * m ** OMEGA_EXPONENT - 1)

    @staticmethod
    def full_space_curve() -> Callable[[float], float]:
        """Lower bound for g0(N, 2), valid for N > 36."""
        return lambda n: (n - 6 * math.sqrt(n)) / 12 - (7 / 12) * OMEGA_CONSTANT * n ** OMEGA_EXPONENT

    def _branch(self, name: str, curve: Callable[[float], float], text: str, variable: str,
                turning: int, bound: int) -> BranchCertificate:
        threshold = first_exceeding(curve, turning, bound)
        grid_start, ratio, points = verify_increasing(curve, turning, threshold)
        return BranchCertificate(name=name, curve=text, variable=variable, turning_point=turning,
                                 threshold=threshold, value_at_threshold=curve(threshold),
                                 grid_start=grid_start, grid_ratio=ratio, grid_points=points)

    def certified_cutoff(self, family: str, k: int, bound: int) -> SearchCertificate:
        """
        Certify a level X with dim(N) > bound for every N > X.

        Args:
            family: g0plus or g0 (both at weight 2)
            k: Weight, must be 2
            bound: Dimension bound B >= 0

        Returns:
            SearchCertificate with one branch per lower-bound curve
        """
        check_weight(k)
        if bound < 0:
            raise PreconditionError(f"dimension bound must be >= 0, got {bound}")
        if k != 2 or family not in ("g0plus", "g0"):
            raise PreconditionError(f"no certified lower-bound curve for {family} at weight {k}")
        logger.info(f"🎯 Certifying cutoff for {family}(N,{k}) <= {bound}")
        if family == "g0":
            branch = self._branch("all", self.full_space_curve(),
                                  "(N - 6 sqrt N)/12 - (7/12) C N^a", "N", FULL_SPACE_TURNING, bound)
            certificate = SearchCertificate(family=family, k=k, bound=bound, cutoff=branch.threshold,
                                            a0plus_lower=0.0, omega_constant=OMEGA_CONSTANT,
                                            omega_exponent=OMEGA_EXPONENT, branches=[branch])
        else:
            a0 = self.a0plus_lower()
            nonsquare = self._branch("non-square", self.nonsquare_curve(a0),
                                     "(A/12) N log2/log(2N) - (7/12) C N^a - 1", "N", NONSQUARE_TURNING, bound)
            square = self._branch("square", self.square_curve(a0),
                                  "(A/12) M^2 log2/log(2M) - M/2 - (7/12) C M^a - 1", "M", SQUARE_TURNING, bound)
            cutoff = max(nonsquare.threshold, square.threshold ** 2)
            certificate = SearchCertificate(family=family, k=k, bound=bound, cutoff=cutoff, a0plus_lower=a0,
                                            omega_constant=OMEGA_CONSTANT, omega_exponent=OMEGA_EXPONENT,
                                            branches=[nonsquare, square])
        logger.info(f"Certified cutoff X={certificate.cutoff} for bound {bound}")
        return certificate

    def enumerate_small_dim(self, family: str, k: int, bound: int, cutoff: Optional[int] = None) -> EnumerationResult:
        """
        List every level with dimension <= bound.

        Args:
            family: Dimension family
            k: Weight
            bound: Dimension bound B
            cutoff: Explicit scan limit; the result is then marked uncertified

        Returns:
            EnumerationResult sorted by level
        """
        certificate = None
        if cutoff is None:
            certificate = self.certified_cutoff(family, k, bound)
            cutoff = certificate.cutoff
        else:
            logger.warning(f"Enumerating {family} up to user cutoff {cutoff}: result is uncertified")
        values = self.scanner.scan(family, k, 1, cutoff)
        levels: List[Tuple[int, int]] = [(n, v) for n, v in enumerate(values, start=1) if v <= bound]
        logger.info(f"Found {len(levels)} levels with {family}(N,{k}) <= {bound} below {cutoff}")
        return EnumerationResult(family=family, k=k, bound=bound, cutoff=cutoff, certified=certificate is not None,
                                 certificate=certificate, levels=levels)


def first_exceeding(curve: Callable[[float], float], start: int, bound: float) -> int:
    """Smallest integer n >= start with curve(n) > bound + margin, for a curve increasing past start."""
    target = bound + MARGIN
    if curve(start) > target:
        return start
    lo, hi = start, 2 * start
    while curve(hi) <= target:
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if curve(mid) > target:
            hi = mid
        else:
            lo = mid
    return hi


def verify_increasing(curve: Callable[[float], float], start: int, threshold: int) -> Tuple[int, float, int]:
    """
    Check monotonicity on a geometric grid from start to GRID_SPAN times the threshold.

    Returns:
        (grid start, ratio, number of points) recorded in the certificate
    """
    end = max(threshold, start + 1) * GRID_SPAN
    ratio = (end / start) ** (1.0 / (GRID_POINTS - 1))
    previous = curve(start)
    for i in range(1, GRID_POINTS):
        value = curve(start * ratio ** i)
        if value <= previous:
            raise InternalConsistencyError(f"lower-bound curve is not increasing near {start * ratio ** i:.1f}")
        previous = value
    return start, ratio, GRID_POINTS
