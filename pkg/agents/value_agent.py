import logging
from typing import List, Optional

import numpy as np

from agents.certification_agent import CertificationAgent
from core.dimensions import DimensionCalculator
from utils.exceptions import PreconditionError
from utils.records import CoverageReport, MissingValuesReport
from utils.scanner import LevelScanner

logger = logging.getLogger("ValueAgent")


class ValueAgent:
    def __init__(self, calculator: Optional[DimensionCalculator] = None,
                 scanner: Optional[LevelScanner] = None,
                 certifier: Optional[CertificationAgent] = None):
        """
        Initialize the agent that studies which dimensions occur as values.

        Args:
            calculator: Closed-form dimension calculator
            scanner: Level scanner
            certifier: Certification agent naming the cutoff a value limit requires
        """
        logger.info("Initializing ValueAgent...")
        self.calculator = calculator or DimensionCalculator()
        self.scanner = scanner or LevelScanner(self.calculator)
        self.certifier = certifier or CertificationAgent(self.calculator, self.scanner)

    def _histogram(self, family: str, k: int, max_level: int) -> np.ndarray:
        values = np.asarray(self.scanner.scan(family, k, 1, max_level), dtype=np.int64)
        return np.bincount(values)

    def missing_values(self, family: str, k: int, value_limit: int, cutoff: int) -> MissingValuesReport:
        """
        Integers in [0, value_limit] that are not a dimension at any level <= cutoff.

        A nonempty answer is only complete when the cutoff reaches the certified one; a shorter
        cutoff raises PreconditionError naming the required cutoff.

        Args:
            family: Dimension family (g0 or g0plus at weight 2 can be certified)
            k: Weight
            value_limit: Largest value V considered
            cutoff: Largest level scanned

        Returns:
            MissingValuesReport
        """
        logger.info(f"🔍 Looking for values of {family}(N,{k}) <= {value_limit} missing below N={cutoff}")
        counts = self._histogram(family, k, cutoff)
        padded = np.zeros(value_limit + 1, dtype=np.int64)
        head = counts[: value_limit + 1]
        padded[: len(head)] = head
        missing = np.flatnonzero(padded == 0).tolist()
        required = None
        if missing:
            required = self.certifier.certified_cutoff(family, k, value_limit).cutoff
            if cutoff < required:
                raise PreconditionError(
                    f"cutoff {cutoff} cannot certify missing values up to {value_limit}; need at least {required}",
                    required_cutoff=required,
                )
        logger.info(f"{len(missing)} missing values up to {value_limit}")
        return MissingValuesReport(family=family, k=k, value_limit=value_limit, cutoff=cutoff,
                                   required_cutoff=required, missing=missing,
                                   attained=value_limit + 1 - len(missing))

    def value_coverage(self, family: str, k: int, max_level: int, value_limit: int) -> CoverageReport:
        """
        Multiplicity of every value v <= value_limit among the levels N <= max_level.

        Args:
            family: Dimension family
            k: Weight
            max_level: Largest level X
            value_limit: Largest value V

        Returns:
            CoverageReport with the histogram and its summary statistics
        """
        if max_level < 1 or value_limit < 0:
            raise PreconditionError("coverage needs max_level >= 1 and value_limit >= 0")
        logger.info(f"📊 Value coverage of {family}(N,{k}) for N <= {max_level}, values <= {value_limit}")
        counts = self._histogram(family, k, max_level)
        histogram = np.zeros(value_limit + 1, dtype=np.int64)
        head = counts[: value_limit + 1]
        histogram[: len(head)] = head
        absent = np.flatnonzero(counts == 0)
        initial_run = int(absent[0]) - 1 if absent.size else len(counts) - 1
        odd_missing: List[int] = [v for v in np.flatnonzero(histogram == 0).tolist() if v % 2]
        return CoverageReport(
            family=family, k=k, max_level=max_level, value_limit=value_limit,
            histogram=histogram.tolist(),
            min_multiplicity=int(histogram.min()), min_value=int(histogram.argmin()),
            max_multiplicity=int(histogram.max()), max_value=int(histogram.argmax()),
            attained=int(np.count_nonzero(histogram)),
            initial_run=initial_run, odd_missing=odd_missing,
        )
