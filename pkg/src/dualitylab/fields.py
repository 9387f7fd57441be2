"""Exact scalar arithmetic: the rational field and word-size prime fields.

Every computation in this package runs over one of these backends; no
floating point is ever used.  Rational scalars are `fractions.Fraction`,
prime-field scalars are plain ints in ``[0, p)``.  The prime moduli are
kept below ``MAX_ELIM_PRIME`` so that a single row-elimination update
``c*x - y`` on int64 numpy arrays cannot overflow.
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from typing import Union

Scalar = Union[Fraction, int]

# Row updates compute c*x - y with 0 <= c, x, y < p; int64 headroom needs
# p*p < 2**63 - p, hence this ceiling (3.03e9^2 ~ 9.18e18 < 9.22e18).
MAX_ELIM_PRIME = 3_030_000_000
# Default moduli are drawn above 2e9.
MIN_DEFAULT_PRIME = 2_000_000_001
DEFAULT_PRIME_COUNT = 3


class FieldError(Exception):
    """Base class for scalar-backend failures."""


class ReductionError(FieldError):
    """A rational value cannot be reduced modulo the chosen prime."""


_MILLER_RABIN_BOUND = 3_215_031_751  # bases 2,3,5,7 decide below this


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3,215,031,751."""
    if n >= _MILLER_RABIN_BOUND:
        raise ValueError(f"primality test only valid below {_MILLER_RABIN_BOUND}")
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # Bases 2, 3, 5, 7 decide primality below 3,215,031,751.
    for a in (2, 3, 5, 7):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(rng: random.Random,
                 lo: int = MIN_DEFAULT_PRIME,
                 hi: int = MAX_ELIM_PRIME) -> int:
    while True:
        candidate = rng.randrange(lo, hi) | 1
        if is_prime(candidate):
            return candidate


def default_primes(seed: int, count: int = DEFAULT_PRIME_COUNT) -> tuple[int, ...]:
    """Deterministic stream of distinct elimination-safe primes."""
    rng = random.Random(f"dualitylab-primes:{seed}")
    primes: list[int] = []
    while len(primes) < count:
        p = random_prime(rng)
        if p not in primes:
            primes.append(p)
    return tuple(primes)


class RationalField:
    """The field of rationals; scalars are `fractions.Fraction`."""

    char = 0
    zero = Fraction(0)
    one = Fraction(1)

    def convert(self, x) -> Fraction:
        return Fraction(x)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def inv(a):
        return 1 / a

    def div(self, a, b):
        return a / b

    @staticmethod
    def is_zero(a) -> bool:
        return a == 0

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("RationalField")


class PrimeField:
    """GF(p) for a word-size prime p; scalars are ints in [0, p)."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise FieldError(f"modulus {p} is not prime")
        self.p = p
        self.char = p
        self.zero = 0
        self.one = 1

    def convert(self, x) -> int:
        if isinstance(x, int):
            return x % self.p
        fr = Fraction(x)
        den = fr.denominator % self.p
        if den == 0:
            raise ReductionError(
                f"denominator {fr.denominator} vanishes mod {self.p}")
        return fr.numerator * pow(den, -1, self.p) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero in prime field")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p

    @staticmethod
    def is_zero(a) -> bool:
        return a == 0

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))


Field = Union[RationalField, PrimeField]

QQ = RationalField()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)
