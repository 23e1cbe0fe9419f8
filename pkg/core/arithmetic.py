import logging
import math
import threading
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from utils.exceptions import DomainError, ResourceError, UsageError
from utils.sieve import SmallestPrimeFactorSieve

logger = logging.getLogger("ArithmeticToolkit")

ARITHMETIC_FUNCTIONS = ["phi", "mu", "tau", "omega", "delta", "one", "id"]
CHARACTERS = ["chi_minus4", "chi_minus3"]

# Sieve tables start small and double until they cover the request or hit the configured limit.
_INITIAL_SIEVE = 1 << 16


@dataclass(frozen=True)
class Factorization:
    """Canonical prime-power decomposition, pairs strictly increasing by prime."""

    pairs: Tuple[Tuple[int, int], ...] = ()

    @property
    def value(self) -> int:
        n = 1
        for p, e in self.pairs:
            n *= p ** e
        return n

    @property
    def omega(self) -> int:
        return len(self.pairs)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.pairs)

    @property
    def is_square(self) -> bool:
        return all(e % 2 == 0 for _, e in self.pairs)

    @classmethod
    def from_exponents(cls, exponents: Dict[int, int]) -> "Factorization":
        return cls(tuple((p, e) for p, e in sorted(exponents.items()) if e > 0))

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


class ArithmeticToolkit:
    def __init__(self, sieve_limit: int = 10_000_000):
        """
        Initialize the integer toolkit.

        Args:
            sieve_limit: Largest n factorized through the smallest-prime-factor table;
                larger n fall back to trial division
        """
        logger.info(f"Initializing ArithmeticToolkit with sieve_limit={sieve_limit}")
        self.sieve_limit = sieve_limit
        self._sieve: Optional[SmallestPrimeFactorSieve] = None
        self._lock = threading.Lock()

    def sieve_covering(self, n: int) -> SmallestPrimeFactorSieve:
        """Return a sieve whose table covers n, growing it when needed."""
        if n > self.sieve_limit:
            raise ResourceError(f"requested sieve up to {n} exceeds the configured limit {self.sieve_limit}")
        sieve = self._sieve
        if sieve is not None and sieve.limit >= n:
            return sieve
        with self._lock:
            sieve = self._sieve
            if sieve is None or sieve.limit < n:
                target = max(n, _INITIAL_SIEVE, 2 * sieve.limit if sieve else 0)
                target = min(target, self.sieve_limit)
                sieve = SmallestPrimeFactorSieve(target)
                self._sieve = sieve
        return sieve

    def factorize(self, n: int) -> Factorization:
        """
        Factorize a positive integer.

        Args:
            n: Integer >= 1

        Returns:
            Canonical Factorization; the empty one for n = 1
        """
        if not isinstance(n, int) or isinstance(n, bool):
            raise DomainError(f"factorize expects an integer, got {n!r}")
        if n <= 0:
            raise DomainError(f"factorize expects n >= 1, got {n}")
        if n <= self.sieve_limit:
            return self._factor_with_sieve(n)
        return self._factor_by_trial_division(n)

    def _factor_with_sieve(self, n: int) -> Factorization:
        sieve = self.sieve_covering(n)
        pairs: List[Tuple[int, int]] = []
        while n > 1:
            p = sieve.smallest_factor(n)
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            pairs.append((p, e))
        return Factorization(tuple(pairs))

    def _factor_by_trial_division(self, n: int) -> Factorization:
        pairs: List[Tuple[int, int]] = []
        for p in (2, 3):
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                pairs.append((p, e))
        d = 5
        step = 2
        while d * d <= n:
            if n % d == 0:
                e = 0
                while n % d == 0:
                    n //= d
                    e += 1
                pairs.append((d, e))
            d += step
            step = 6 - step
        if n > 1:
            pairs.append((n, 1))
        return Factorization(tuple(pairs))

    def divisors(self, n: int) -> List[int]:
        """All positive divisors of n in increasing order."""
        divs = [1]
        for p, e in self.factorize(n):
            divs = [d * p ** i for d in divs for i in range(e + 1)]
        return sorted(divs)

    def arithmetic_function(self, name: str, n: int) -> int:
        """
        Evaluate a classical arithmetic function.

        Args:
            name: One of phi, mu, tau, omega, delta, one, id
            n: Integer >= 1

        Returns:
            The integer value
        """
        if name not in ARITHMETIC_FUNCTIONS:
            raise UsageError(f"unknown arithmetic function {name!r}; expected one of {ARITHMETIC_FUNCTIONS}")
        fac = self.factorize(n)
        if name == "phi":
            result = 1
            for p, e in fac:
                result *= p ** (e - 1) * (p - 1)
            return result
        if name == "mu":
            if not fac.is_squarefree:
                return 0
            return -1 if fac.omega % 2 else 1
        if name == "tau":
            return math.prod(e + 1 for _, e in fac)
        if name == "omega":
            return fac.omega
        if name == "delta":
            return 1 if n == 1 else 0
        if name == "one":
            return 1
        return n

    def character(self, name: str, n: int) -> int:
        """
        Evaluate one of the two real characters used by the squarefree formula.

        chi_minus4 is the nonprincipal character mod 4, chi_minus3 the one mod 3.
        """
        if name not in CHARACTERS:
            raise UsageError(f"unknown character {name!r}; expected one of {CHARACTERS}")
        if n <= 0:
            raise DomainError(f"character expects n >= 1, got {n}")
        if name == "chi_minus4":
            return (0, 1, 0, -1)[n % 4]
        return (0, 1, -1)[n % 3]

    def is_squarefree(self, n: int) -> bool:
        return self.factorize(n).is_squarefree

    def omega(self, n: int) -> int:
        return self.factorize(n).omega
