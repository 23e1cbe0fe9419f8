import logging
import math
from typing import List

import numpy as np

logger = logging.getLogger("SmallestPrimeFactorSieve")


def primes_up_to(limit: int) -> np.ndarray:
    """
    Return all primes p <= limit in ascending order.

    Args:
        limit: Inclusive upper bound

    Returns:
        int64 numpy array of primes (empty when limit < 2)
    """
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p: limit + 1: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


class SmallestPrimeFactorSieve:
    """Table spf[n] = smallest prime factor of n for 2 <= n <= limit.

    The table is immutable once built; growing it means building a new sieve.
    """

    def __init__(self, limit: int):
        if limit < 1:
            limit = 1
        if limit > np.iinfo(np.int32).max:
            raise ValueError(f"sieve limit {limit} does not fit the int32 table")
        logger.debug(f"Building smallest-prime-factor sieve up to {limit}")
        spf = np.zeros(limit + 1, dtype=np.int32)
        for p in range(2, math.isqrt(limit) + 1):
            if spf[p] == 0:
                block = spf[p * p:: p]
                block[block == 0] = p
        untouched = np.flatnonzero(spf == 0)
        spf[untouched] = untouched
        spf.setflags(write=False)
        self.limit = limit
        self._spf = spf

    def smallest_factor(self, n: int) -> int:
        return int(self._spf[n])

    def as_list(self, upto: int) -> List[int]:
        """Plain Python list of spf[0..upto], for tight interpreter loops."""
        return self._spf[: upto + 1].tolist()

    def is_prime(self, n: int) -> bool:
        return n >= 2 and int(self._spf[n]) == n
