import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from core.dimensions import FULL_SPACE, NEWFORM_FAMILY, SCALE, STAR_FAMILY, DimensionCalculator, check_weight
from utils.config import GROUPS, ScanConfig
from utils.exceptions import InternalConsistencyError, SequencingError, UsageError
from utils.records import ConsistencyMismatch, ConsistencyReport, format_fraction, model_to_dict

logger = logging.getLogger("NewformOracle")


@dataclass
class OracleTable:
    """Solved levels for one group and weight: level -> (newform dim, star dim)."""

    group: str
    k: int
    entries: Dict[int, Tuple[int, int]] = field(default_factory=dict)
    limit: int = 0


class NewformOracle:
    def __init__(self, calculator: Optional[DimensionCalculator] = None, scanner=None):
        """
        Initialize the recursive oracle.

        Only the full-space formulas g0 / g1 and the divisor function enter the recursion.

        Args:
            calculator: Closed-form calculator used for the full spaces and for comparison
            scanner: Optional LevelScanner; when parallel, weights are scanned in worker processes
        """
        logger.info("Initializing NewformOracle...")
        self.calculator = calculator or DimensionCalculator()
        self.toolkit = self.calculator.toolkit
        self.scanner = scanner
        self._divisors: Dict[int, List[int]] = {}
        self._tau: List[int] = [1]

    def _proper_divisors(self, N: int) -> List[int]:
        divisors = self._divisors.get(N)
        if divisors is None:
            divisors = self.toolkit.divisors(N)[:-1]
            self._divisors[N] = divisors
        return divisors

    def _tau_of(self, n: int) -> int:
        if n > len(self._tau):
            self._tau = [int(t) for t in self.calculator.engine.sieve_batch_eval("tau", max(n, 2 * len(self._tau)))]
        return self._tau[n - 1]

    def new_table(self, group: str, k: int) -> OracleTable:
        if group not in GROUPS:
            raise UsageError(f"unknown group {group!r}; expected one of {GROUPS}")
        return OracleTable(group=group, k=check_weight(k))

    def recursive_newform_dim(self, group: str, N: int, k: int, table: OracleTable,
                              full_value: Optional[int] = None) -> int:
        """
        Solve the oldform recursion for the newform dimension at level N.

        g(N) = sum over d | N of tau(N/d) g+(d), so g+(N) = g(N) minus the proper-divisor terms.

        Args:
            group: gamma0 or gamma1
            N: Level whose proper divisors are already in the table
            k: Weight
            table: Oracle table, updated in place
            full_value: Precomputed full-space dimension at N, if available

        Returns:
            The newform dimension at N
        """
        if N in table.entries:
            return table.entries[N][0]
        if full_value is None:
            full_value = self.calculator.value(FULL_SPACE[group], N, k)
        new = full_value
        star = 0
        for d in self._proper_divisors(N):
            entry = table.entries.get(d)
            if entry is None:
                raise SequencingError(f"level {N} requested before its divisor {d} ({group}, k={k})")
            new -= self._tau_of(N // d) * entry[0]
            star += entry[0]
        if new < 0:
            raise InternalConsistencyError(f"recursion gave a negative newform dimension {new} at N={N}, k={k}")
        table.entries[N] = (new, star + new)
        table.limit = max(table.limit, N)
        return new

    def recursive_star_dim(self, group: str, N: int, k: int, table: OracleTable) -> int:
        """Sum of the newform dimensions over all divisors of N."""
        if N not in table.entries:
            self.recursive_newform_dim(group, N, k, table)
        return table.entries[N][1]

    def build_table(self, group: str, k: int, limit: int) -> OracleTable:
        """Solve every level 1..limit in increasing order."""
        table = self.new_table(group, k)
        full = self.calculator.values(FULL_SPACE[group], k, 1, limit)
        for N in range(1, limit + 1):
            self.recursive_newform_dim(group, N, k, table, full_value=full[N - 1])
        return table

    def consistency_scan(self, group: str, limit: int, weights: Iterable[int]) -> ConsistencyReport:
        """
        Compare the closed-form newform and star dimensions against the recursion.

        A closed-form value that is not a nonnegative integer is recorded as a mismatch.

        Args:
            group: gamma0 or gamma1
            limit: Largest level
            weights: Weights to scan

        Returns:
            ConsistencyReport listing every mismatch in (k, family, N) order
        """
        if group not in GROUPS:
            raise UsageError(f"unknown group {group!r}; expected one of {GROUPS}")
        weights = sorted(set(weights))
        for k in weights:
            check_weight(k)
        logger.info(f"🔍 Consistency scan {group} up to N={limit} for weights {weights}")
        mismatches: List[ConsistencyMismatch] = []
        if self.scanner is not None and self.scanner.parallel:
            tasks = [(group, limit, k, self.scanner.config.sieve_limit) for k in weights]
            for part in self.scanner.map(scan_weight_worker, tasks):
                mismatches.extend(ConsistencyMismatch(**item) for item in part)
        else:
            for k in weights:
                mismatches.extend(self.scan_weight(group, limit, k))
        logger.info(f"Consistency scan finished with {len(mismatches)} mismatches")
        return ConsistencyReport(group=group, max_level=limit, weights=weights,
                                 levels_checked=limit * len(weights), mismatches=mismatches)

    def scan_weight(self, group: str, limit: int, k: int) -> List[ConsistencyMismatch]:
        table = self.build_table(group, k, limit)
        found: List[ConsistencyMismatch] = []
        for family, slot in ((NEWFORM_FAMILY[group], 0), (STAR_FAMILY[group], 1)):
            closed = self.calculator.scaled_values(family, k, 1, limit)
            for N, scaled in enumerate(closed, start=1):
                expected = table.entries[N][slot]
                if scaled != SCALE * expected:
                    found.append(ConsistencyMismatch(family=family, N=N, k=k,
                                                     closed_form=format_fraction(Fraction(scaled, SCALE)),
                                                     oracle=expected))
        return found


def scan_weight_worker(task: Tuple[str, int, int, int]) -> List[dict]:
    """Process-pool entry point: (group, limit, k, sieve_limit) -> mismatches as dicts."""
    group, limit, k, sieve_limit = task
    oracle = NewformOracle(DimensionCalculator(config=ScanConfig(sieve_limit=sieve_limit)))
    return [model_to_dict(m) for m in oracle.scan_weight(group, limit, k)]
