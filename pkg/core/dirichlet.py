import logging
import math
import threading
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Union

import numpy as np

from core.arithmetic import ArithmeticToolkit, Factorization
from utils.config import ScanConfig
from utils.exceptions import DomainError, ResourceError, UsageError
from utils.records import ConstantValue, SummatoryReport, format_fraction
from utils.sieve import primes_up_to

logger = logging.getLogger("DirichletEngine")

Value = Union[int, Fraction]
Rule = Callable[[int, int], Value]

# Rough per-entry footprint of a batch evaluation (three Python lists of ints).
BATCH_BYTES_PER_ENTRY = 96

# Prime powers are memoized only for p below this bound; larger primes are recomputed on demand.
MEMO_PRIME_BOUND = 10_000

# C with |L_p - 1| <= C/p^2 for every prime, read off the local factors of the average-order products.
EULER_DECAY: Dict[str, float] = {
    "s0": 1.0,       # 1/p^2
    "s0star": 1.0,   # -1/p^4
    "s0plus": 2.0,   # -1/p^2 - 1/p^4 + 1/p^6
    "s1": 1.0,       # -1/p^3
    "s1star": 1.0,   # -2/p^3 + 1/p^6
    "s1plus": 2.0,   # -3/p^3 + 3/p^6 - 1/p^9
}


class MultiplicativeFunction:
    """A multiplicative function given by its values on prime powers.

    Args:
        name: Registry identifier
        rule: Callable (p, alpha) -> int or Fraction, alpha >= 1
        description: One line shown in listings
    """

    def __init__(self, name: str, rule: Rule, description: str = ""):
        self.name = name
        self.rule = rule
        self.description = description
        self._memo: Dict[tuple, Value] = {}
        self._lock = threading.Lock()

    def at_prime_power(self, p: int, alpha: int) -> Value:
        if alpha == 0:
            return 1
        key = (p, alpha)
        try:
            return self._memo[key]
        except KeyError:
            pass
        value = self.rule(p, alpha)
        if p < MEMO_PRIME_BOUND:
            with self._lock:
                self._memo.setdefault(key, value)
        return value

    def memo_size(self) -> int:
        return len(self._memo)

    def evaluate(self, fac: Factorization) -> Value:
        result: Value = 1
        for p, e in fac:
            result *= self.at_prime_power(p, e)
            if result == 0:
                return 0
        return result

    def __repr__(self) -> str:
        return f"MultiplicativeFunction({self.name!r})"


def convolve(f: MultiplicativeFunction, g: MultiplicativeFunction, name: Optional[str] = None) -> MultiplicativeFunction:
    """
    Dirichlet convolution of two multiplicative functions.

    Args:
        f: Left factor
        g: Right factor
        name: Optional name for the result

    Returns:
        The function with (f*g)(p^a) = sum over b of f(p^b) g(p^(a-b))
    """

    def rule(p: int, alpha: int) -> Value:
        return sum(f.at_prime_power(p, b) * g.at_prime_power(p, alpha - b) for b in range(alpha + 1))

    return MultiplicativeFunction(name or f"({f.name}*{g.name})", rule, f"Dirichlet convolution of {f.name} and {g.name}")


def _residue_rule(special_prime: int, special_values: List[int], modulus: int,
                  split_values: List[int], inert_values: List[int], repeat_last: bool = False) -> Rule:
    """Rule for the elliptic-point families: one table at the special prime, one per residue class.

    Tables list the values for alpha = 1, 2, ...; exponents past the table read 0, or the
    final table entry when repeat_last is set.
    split_values apply to p = 1 mod modulus, inert_values to the remaining primes.
    """

    def rule(p: int, alpha: int) -> int:
        if p == special_prime:
            table = special_values
        elif p % modulus == 1:
            table = split_values
        else:
            table = inert_values
        if alpha <= len(table):
            return table[alpha - 1]
        return table[-1] if repeat_last else 0

    return rule


def _nu_inf(p: int, alpha: int) -> int:
    if alpha % 2:
        return 2 * p ** ((alpha - 1) // 2)
    return p ** (alpha // 2) + p ** (alpha // 2 - 1)


def _nu_inf_plus(p: int, alpha: int) -> int:
    if alpha % 2:
        return 0
    if alpha == 2:
        return p - 2
    return p ** (alpha // 2 - 2) * (p - 1) ** 2


def _nu_inf_star(p: int, alpha: int) -> int:
    if alpha == 1:
        return 1
    return p ** (alpha // 2 - 1) * (p - 1)


def _s0(p: int, alpha: int) -> Fraction:
    return 1 + Fraction(1, p)


def _s0_plus(p: int, alpha: int) -> Fraction:
    if alpha == 1:
        return 1 - Fraction(1, p)
    if alpha == 2:
        return 1 - Fraction(1, p) - Fraction(1, p * p)
    return (1 - Fraction(1, p)) * (1 - Fraction(1, p * p))


def _s0_star(p: int, alpha: int) -> Fraction:
    if alpha == 1:
        return Fraction(1)
    return 1 - Fraction(1, p * p)


def _s1(p: int, alpha: int) -> Fraction:
    return 1 - Fraction(1, p * p)


def _s1_plus(p: int, alpha: int) -> Fraction:
    if alpha == 1:
        return 1 - Fraction(3, p ** 2)
    if alpha == 2:
        return 1 - Fraction(3, p ** 2) + Fraction(3, p ** 4)
    return (1 - Fraction(1, p ** 2)) ** 3


def _s1_star(p: int, alpha: int) -> Fraction:
    if alpha == 1:
        return 1 - Fraction(2, p ** 2)
    return (1 - Fraction(1, p ** 2)) ** 2


# u, u+ and u* carry negative powers of p in their closed forms; the products below are
# exact multiples of the divisor, so floor division is exact.
def _u(p: int, alpha: int) -> int:
    return (p - 1) * ((alpha + 1) * p - alpha + 1) * p ** alpha // p ** 2


def _u_plus(p: int, alpha: int) -> int:
    if alpha == 1:
        return 2 * p - 4
    if alpha == 2:
        return 3 * p * p - 8 * p + 6
    return (p - 1) ** 3 * ((alpha + 1) * p - alpha + 3) * p ** alpha // p ** 4


def _u_star(p: int, alpha: int) -> int:
    if alpha == 1:
        return 2 * p - 3
    return (p - 1) ** 2 * ((alpha + 1) * p - alpha + 2) * p ** alpha // p ** 3


def _n_s0(p: int, alpha: int) -> int:
    return p ** alpha + p ** (alpha - 1)


def _n_s0_plus(p: int, alpha: int) -> int:
    if alpha == 1:
        return p - 1
    if alpha == 2:
        return p * p - p - 1
    return p ** (alpha - 3) * (p - 1) * (p * p - 1)


def _n_s0_star(p: int, alpha: int) -> int:
    if alpha == 1:
        return p
    return p ** (alpha - 2) * (p * p - 1)


def _n2_s1(p: int, alpha: int) -> int:
    return p ** (2 * alpha - 2) * (p * p - 1)


def _n2_s1_plus(p: int, alpha: int) -> int:
    if alpha == 1:
        return p ** 2 - 3
    if alpha == 2:
        return p ** 4 - 3 * p ** 2 + 3
    return p ** (2 * alpha - 6) * (p * p - 1) ** 3


def _n2_s1_star(p: int, alpha: int) -> int:
    if alpha == 1:
        return p ** 2 - 2
    return p ** (2 * alpha - 4) * (p * p - 1) ** 2


def _lambda(p: int, alpha: int) -> int:
    return {1: -2, 2: 1}.get(alpha, 0)


def _default_rules() -> Dict[str, tuple]:
    return {
        # classical
        "one": (lambda p, a: 1, "constant function 1"),
        "delta": (lambda p, a: 0, "identity of convolution, 1 only at n = 1"),
        "id": (lambda p, a: p ** a, "identity map n"),
        "mu": (lambda p, a: -1 if a == 1 else 0, "Moebius function"),
        "tau": (lambda p, a: a + 1, "number of divisors"),
        "phi": (lambda p, a: p ** (a - 1) * (p - 1), "Euler totient"),
        "two_omega": (lambda p, a: 2, "2 to the number of distinct prime factors"),
        "lambda": (_lambda, "mu*mu, convolution inverse of tau"),
        # gamma0 ingredients
        "s0": (_s0, "index factor of Gamma0(N) divided by N"),
        "s0plus": (_s0_plus, "newform analogue of s0"),
        "s0star": (_s0_star, "star analogue of s0"),
        "nu_inf": (_nu_inf, "number of cusps of Gamma0(N)"),
        "nu_inf_plus": (_nu_inf_plus, "nu_inf convolved with lambda"),
        "nu_inf_star": (_nu_inf_star, "nu_inf convolved with mu"),
        "nu2": (_residue_rule(2, [1, 0], 4, [2], [0], repeat_last=True), "elliptic points of order 2"),
        "nu2_plus": (_residue_rule(2, [-1, -1, 1], 4, [0, -1], [-2, 1]), "nu2 convolved with lambda"),
        "nu2_star": (_residue_rule(2, [0, -1], 4, [1], [-1]), "nu2 convolved with mu"),
        "nu3": (_residue_rule(3, [1, 0], 3, [2], [0], repeat_last=True), "elliptic points of order 3"),
        "nu3_plus": (_residue_rule(3, [-1, -1, 1], 3, [0, -1], [-2, 1]), "nu3 convolved with lambda"),
        "nu3_star": (_residue_rule(3, [0, -1], 3, [1], [-1]), "nu3 convolved with mu"),
        # gamma1 ingredients
        "s1": (_s1, "index factor of Gamma1(N) divided by N^2"),
        "s1plus": (_s1_plus, "newform analogue of s1"),
        "s1star": (_s1_star, "star analogue of s1"),
        "u": (_u, "twice the number of cusps of Gamma1(N)"),
        "u_plus": (_u_plus, "u convolved with lambda"),
        "u_star": (_u_star, "u convolved with mu"),
        # integer scalings used by the formulas
        "Ns0": (_n_s0, "N*s0(N), the index of Gamma0(N)"),
        "Ns0plus": (_n_s0_plus, "N*s0plus(N)"),
        "Ns0star": (_n_s0_star, "N*s0star(N)"),
        "N2s1": (_n2_s1, "N^2*s1(N)"),
        "N2s1plus": (_n2_s1_plus, "N^2*s1plus(N)"),
        "N2s1star": (_n2_s1_star, "N^2*s1star(N)"),
    }


ALIASES = {
    "lam": "lambda",
    "psi": "Ns0",
    "nuinf": "nu_inf",
    "t": "u_plus",
    "1": "one",
}


class FunctionRegistry:
    """Named multiplicative functions, looked up by name or alias."""

    def __init__(self, functions: Optional[Dict[str, MultiplicativeFunction]] = None):
        if functions is None:
            functions = {
                name: MultiplicativeFunction(name, rule, description)
                for name, (rule, description) in _default_rules().items()
            }
        self._functions = dict(functions)

    def lookup(self, name: str) -> MultiplicativeFunction:
        key = ALIASES.get(name, name)
        try:
            return self._functions[key]
        except KeyError:
            raise UsageError(f"unknown multiplicative function {name!r}") from None

    def names(self) -> List[str]:
        return sorted(self._functions)

    def with_override(self, name: str, rule: Rule) -> "FunctionRegistry":
        """Copy of the registry with one rule replaced (fresh memo for that function)."""
        original = self.lookup(name)
        functions = dict(self._functions)
        functions[original.name] = MultiplicativeFunction(original.name, rule, original.description + " (overridden)")
        logger.warning(f"Registry rule for {original.name} overridden")
        return FunctionRegistry(functions)

    def __contains__(self, name: str) -> bool:
        return ALIASES.get(name, name) in self._functions


class DirichletEngine:
    def __init__(self, toolkit: Optional[ArithmeticToolkit] = None,
                 registry: Optional[FunctionRegistry] = None,
                 config: Optional[ScanConfig] = None):
        """
        Initialize the evaluation engine.

        Args:
            toolkit: Integer toolkit providing factorizations and sieves
            registry: Function registry (defaults to the full standard registry)
            config: Scan configuration (memory budget)
        """
        self.config = config or ScanConfig()
        self.toolkit = toolkit or ArithmeticToolkit(self.config.sieve_limit)
        self.registry = registry or FunctionRegistry()
        logger.info("Initializing DirichletEngine with %d registered functions", len(self.registry.names()))

    def resolve(self, f: Union[str, MultiplicativeFunction]) -> MultiplicativeFunction:
        return self.registry.lookup(f) if isinstance(f, str) else f

    def eval(self, f: Union[str, MultiplicativeFunction], n: int) -> Value:
        """Evaluate f(n) exactly."""
        return self.resolve(f).evaluate(self.toolkit.factorize(n))

    def convolve(self, f: Union[str, MultiplicativeFunction], g: Union[str, MultiplicativeFunction]) -> MultiplicativeFunction:
        return convolve(self.resolve(f), self.resolve(g))

    def sieve_batch_eval(self, f: Union[str, MultiplicativeFunction], x: int) -> List[Value]:
        """
        Evaluate f at every n in [1, x] in one pass over the smallest-prime-factor table.

        Args:
            f: Function or registry name
            x: Upper limit (inclusive)

        Returns:
            List whose entry i is f(i + 1)
        """
        f = self.resolve(f)
        if x < 1:
            raise DomainError(f"batch evaluation needs x >= 1, got {x}")
        needed = (x + 1) * BATCH_BYTES_PER_ENTRY
        if needed > self.config.memory_cap_bytes:
            raise ResourceError(
                f"batch of {x} values needs about {needed} bytes, over the cap of {self.config.memory_cap_bytes}"
            )
        spf = self.toolkit.sieve_covering(x).as_list(x)
        values: List[Value] = [0] * (x + 1)
        prime_part = [1] * (x + 1)
        exponent = [0] * (x + 1)
        if x >= 1:
            values[1] = 1
        at = f.at_prime_power
        for n in range(2, x + 1):
            p = spf[n]
            m = n // p
            if m % p == 0:
                prime_part[n] = prime_part[m] * p
                exponent[n] = exponent[m] + 1
            else:
                prime_part[n] = p
                exponent[n] = 1
            values[n] = values[n // prime_part[n]] * at(p, exponent[n])
        return values[1:]

    def agrees(self, f: Union[str, MultiplicativeFunction], g: Union[str, MultiplicativeFunction], limit: int) -> List[int]:
        """Levels n <= limit where f(n) != g(n)."""
        left = self.sieve_batch_eval(f, limit)
        right = self.sieve_batch_eval(g, limit)
        return [i + 1 for i, (a, b) in enumerate(zip(left, right)) if a != b]

    def summatory(self, f: Union[str, MultiplicativeFunction], x: int, beta: int = 0) -> SummatoryReport:
        """
        Exact partial sum of n^beta f(n) over n <= x.

        Args:
            f: Function or registry name
            x: Upper limit
            beta: Nonnegative integer weight

        Returns:
            SummatoryReport with the exact sum as a fraction string
        """
        f = self.resolve(f)
        if beta < 0:
            raise DomainError(f"beta must be >= 0, got {beta}")
        values = self.sieve_batch_eval(f, x)
        total = _exact_sum(v * (i + 1) ** beta for i, v in enumerate(values))
        return SummatoryReport(function=f.name, limit=x, beta=beta, partial_sum=format_fraction(total))

    def euler_product_constant(self, f: Union[str, MultiplicativeFunction], cutoff_prime: Optional[int] = None,
                               decay: Optional[float] = None, max_exponent: int = 40) -> ConstantValue:
        """
        Average-order constant of f as an Euler product with a certified radius.

        The local factor at p is (1 - 1/p) * sum_a f(p^a)/p^a = 1 + sum_a g(p^a)/p^a with
        g = f * mu. The tail past the cutoff is bounded with a decay constant C satisfying
        |L_p - 1| <= C/p^2 for every prime.

        Args:
            f: Function or registry name
            cutoff_prime: Largest prime multiplied in exactly
            decay: C for the tail bound; taken from EULER_DECAY when omitted
            max_exponent: Largest exponent kept in each local series

        Returns:
            ConstantValue carrying the partial product and its error radius
        """
        f = self.resolve(f)
        cutoff_prime = cutoff_prime or self.config.euler_cutoff_prime
        if decay is None:
            if f.name not in EULER_DECAY:
                raise DomainError(f"no decay bound known for the local factors of {f.name}; "
                                  f"its Euler product cannot be certified")
            decay = EULER_DECAY[f.name]
        g = convolve(f, self.registry.lookup("mu"))
        primes = primes_up_to(cutoff_prime)
        deviations: List[float] = []
        truncation = 0.0
        for p in primes.tolist():
            depth = max_exponent if p < 100 else 6
            terms = [g.at_prime_power(p, a) / Fraction(p) ** a for a in range(1, depth + 1)]
            deviations.append(float(sum(terms)))
            truncation += abs(float(terms[-1]))
        result = euler_product(f"c({f.name})", np.array(deviations), decay, cutoff_prime, primes)
        if truncation:
            radius = result.radius + abs(result.value) * math.expm1(truncation)
            result = ConstantValue(name=result.name, value=result.value, radius=radius,
                                   digits=certified_digits(radius), cutoff_prime=cutoff_prime)
        logger.info(f"Euler product for {f.name}: {result.value:.12f} +/- {result.radius:.2e} over primes <= {cutoff_prime}")
        return result


def euler_product(name: str, deviations: np.ndarray, decay: float, cutoff_prime: int,
                  primes: np.ndarray) -> ConstantValue:
    """
    Partial Euler product over p <= cutoff_prime with a certified tail radius.

    Args:
        name: Label of the constant
        deviations: L_p - 1 for each prime in primes
        decay: C such that |L_p - 1| <= C/p^2 for every prime
        cutoff_prime: Largest prime included exactly
        primes: The primes up to the cutoff, aligned with deviations

    Returns:
        ConstantValue with value, radius and correct digit count
    """
    p = primes.astype(np.float64)
    if np.any(deviations <= -1.0):
        raise DomainError(f"a local factor of {name} vanishes or changes sign")
    if np.any(np.abs(deviations) * p ** 2 > decay * (1 + 1e-12)):
        raise DomainError(f"local factors of {name} exceed the decay bound {decay}/p^2")
    log_product = math.fsum(np.log1p(deviations).tolist())
    value = math.exp(log_product)
    radius = euler_tail_radius(value, decay, cutoff_prime)
    return ConstantValue(name=name, value=value, radius=radius, digits=certified_digits(radius),
                         cutoff_prime=cutoff_prime)


def prime_square_tail(cutoff_prime: int) -> float:
    """Upper bound for the sum of 1/p^2 over primes p > cutoff_prime (primes past 3 are +-1 mod 6)."""
    q = cutoff_prime + 1
    return 2.0 / q ** 2 + 1.0 / (3.0 * q)


def euler_tail_radius(partial_product: float, decay: float, cutoff_prime: int) -> float:
    """Error radius of a partial Euler product whose deviations satisfy |x_p| <= decay/p^2 past the cutoff."""
    log_tail = 2.0 * decay * prime_square_tail(cutoff_prime)
    return abs(partial_product) * math.expm1(log_tail) + 1e-13


def certified_digits(radius: float) -> int:
    if radius <= 0:
        return 15
    return max(0, int(math.floor(-math.log10(2 * radius))))


def _exact_sum(values: Iterable[Value]) -> Fraction:
    """Sum exact values, keeping integers on the fast path and pairing fractions in a balanced tree."""
    integer_part = 0
    fractions: List[Fraction] = []
    for v in values:
        if isinstance(v, int):
            integer_part += v
        else:
            fractions.append(v)
    while len(fractions) > 1:
        paired = [fractions[i] + fractions[i + 1] for i in range(0, len(fractions) - 1, 2)]
        if len(fractions) % 2:
            paired.append(fractions[-1])
        fractions = paired
    return Fraction(integer_part) + (fractions[0] if fractions else 0)
