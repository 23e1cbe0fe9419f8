import concurrent.futures
import logging
from typing import Any, Callable, List, Optional, Sequence, Tuple

from core.dimensions import worker_values
from utils.config import ScanConfig

logger = logging.getLogger("LevelScanner")


class LevelScanner:
    def __init__(self, calculator, config: Optional[ScanConfig] = None):
        """
        Initialize the range scanner.

        Args:
            calculator: DimensionCalculator used for inline scans
            config: Scan configuration; threads > 1 enables the process pool
        """
        self.calculator = calculator
        self.config = config or ScanConfig()
        logger.info(f"Initializing LevelScanner with threads={self.config.threads}, chunk_size={self.config.chunk_size}")

    @property
    def parallel(self) -> bool:
        return self.config.threads > 1

    def chunks(self, lo: int, hi: int) -> List[Tuple[int, int]]:
        size = self.config.chunk_size
        return [(start, min(start + size - 1, hi)) for start in range(lo, hi + 1, size)]

    def scan(self, family: str, k: int, lo: int, hi: int) -> List[int]:
        """
        Dimensions of one family for every level lo..hi, in level order.

        Args:
            family: Dimension family
            k: Weight
            lo: First level
            hi: Last level

        Returns:
            List of dimensions, identical for every worker count
        """
        if not self.parallel or hi - lo + 1 <= self.config.chunk_size:
            return self.calculator.values(family, k, lo, hi)
        tasks = [(family, k, a, b, self.config.sieve_limit) for a, b in self.chunks(lo, hi)]
        logger.info(f"Scanning {family} k={k} over {lo}..{hi} in {len(tasks)} chunks")
        results: List[int] = []
        for part in self.map(worker_values, tasks):
            results.extend(part)
        return results

    def map(self, func: Callable[[Any], Any], tasks: Sequence[Any]) -> List[Any]:
        """Apply a module-level function to each task, results in task order."""
        if not self.parallel or len(tasks) <= 1:
            return [func(task) for task in tasks]
        with concurrent.futures.ProcessPoolExecutor(max_workers=self.config.threads) as executor:
            return list(executor.map(func, tasks))
