"""Elementary exact arithmetic: Kronecker symbols, squarefree sieving, the
multiplicative function eta and the Euler-product constants A, B, C(r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

ZETA2 = math.pi ** 2 / 6

# Rosser-Schoenfeld: pi(x) < 1.25506 x / log x for x > 1.
_PI_UPPER = 1.25506


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n) for arbitrary integers a, n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    res = 1
    if n < 0:
        n = -n
        if a < 0:
            res = -res
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            res = -res
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                res = -res
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            res = -res
        a %= n
    return res if n == 1 else 0


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.flatnonzero(is_p).astype(np.int64)


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; fine for the small levels and moduli used here."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p = 5
    step = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += step
        step = 6 - step
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(n).values())


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return factorize(n) == {n: 1}


def euler_phi(n: int) -> int:
    out = n
    for p in factorize(n):
        out -= out // p
    return out


@dataclass(frozen=True)
class SquarefreeSieve:
    lo: int
    hi: int
    flags: np.ndarray = field(repr=False)

    def __contains__(self, n: int) -> bool:
        return bool(self.flags[n - self.lo])

    def values(self) -> np.ndarray:
        return np.flatnonzero(self.flags) + self.lo

    def count(self) -> int:
        return int(self.flags.sum())


def sieve_squarefree(lo: int, hi: int) -> SquarefreeSieve:
    """Flags mu(n)^2 on [lo, hi] by striking multiples of p^2."""
    if not 1 <= lo <= hi:
        raise ValueError(f"invalid range [{lo}, {hi}]")
    flags = np.ones(hi - lo + 1, dtype=bool)
    for p in primes_up_to(math.isqrt(hi)):
        q = int(p) * int(p)
        start = -(-lo // q) * q
        flags[start - lo :: q] = False
    return SquarefreeSieve(lo, hi, flags)


@lru_cache(maxsize=65536)
def eta(m: int) -> Fraction:
    """prod_{p | m} p/(p+1)."""
    if m <= 0:
        raise ValueError("eta needs m >= 1")
    out = Fraction(1)
    for p in factorize(m):
        out *= Fraction(p, p + 1)
    return out


# --- Euler products -------------------------------------------------------


@dataclass(frozen=True)
class EulerProductConfig:
    prime_bound: int = 10 ** 6

    def __post_init__(self):
        if self.prime_bound < 2:
            raise ValueError("prime_bound must be >= 2")


@dataclass(frozen=True)
class EulerValue:
    """Truncated Euler product with a certified bound.

    ``tail_bound`` bounds |log(truncated / full)|; ``error`` is the induced
    bound on |truncated - full|.
    """

    value: float
    tail_bound: float

    @property
    def error(self) -> float:
        return abs(self.value) * math.expm1(self.tail_bound)

    def __float__(self) -> float:
        return self.value


def _prime_power_tail(s: float, const: float, bound: int) -> float:
    """Upper bound for sum_{p > bound} const * p^-s (s > 1).

    Partial summation against pi(t) < 1.25506 t / log t.
    """
    return _PI_UPPER * s * const / ((s - 1) * math.log(bound) * bound ** (s - 1))


@lru_cache(maxsize=16)
def _primes_float(bound: int) -> np.ndarray:
    return primes_up_to(bound).astype(np.float64)


def _log_product(logs: np.ndarray) -> float:
    return math.exp(math.fsum(logs.tolist()))


def constant_A(cfg: EulerProductConfig = EulerProductConfig()) -> EulerValue:
    """A = prod_p (1 + p / ((p+1)^2 (p-1)))."""
    p = _primes_float(cfg.prime_bound)
    val = _log_product(np.log1p(p / ((p + 1) ** 2 * (p - 1))))
    # p/((p+1)^2(p-1)) <= p^-2 and log(1+x) <= x
    return EulerValue(val, _prime_power_tail(2, 1.0, cfg.prime_bound))


def constant_B(cfg: EulerProductConfig = EulerProductConfig()) -> EulerValue:
    """B = prod_p (p^4 - 2p^2 - p + 1) / (p^2 - 1)^2 = prod_p (1 - p/(p^2-1)^2)."""
    p = _primes_float(cfg.prime_bound)
    val = _log_product(np.log1p(-p / (p * p - 1) ** 2))
    # u = p/(p^2-1)^2 <= 2 p^-3 and |log(1-u)| <= 2u for u <= 1/2
    return EulerValue(val, _prime_power_tail(3, 4.0, cfg.prime_bound))


def constant_C(r: int) -> float:
    """C(r) = prod_{p | r} (1 + p^2 / (p^4 - 2p^2 - p + 1)); a finite product."""
    if r < 1:
        raise ValueError("C(r) needs r >= 1")
    return float(constant_C_exact(r))


@lru_cache(maxsize=4096)
def constant_C_exact(r: int) -> Fraction:
    out = Fraction(1)
    for p in factorize(r):
        out *= 1 + Fraction(p * p, p ** 4 - 2 * p * p - p + 1)
    return out


def newform_density_product(cfg: EulerProductConfig = EulerProductConfig()) -> EulerValue:
    """prod_p (1 - 1/(p(p+1)))."""
    p = _primes_float(cfg.prime_bound)
    val = _log_product(np.log1p(-1.0 / (p * (p + 1))))
    # v = 1/(p(p+1)) <= p^-2 and |log(1-v)| <= v/(1-v) <= 1.2 v
    return EulerValue(val, _prime_power_tail(2, 1.2, cfg.prime_bound))


def norm_constant(cfg: EulerProductConfig = EulerProductConfig()) -> EulerValue:
    """12 / (pi prod_p (1 - 1/(p(p+1)))); the log-tail bound carries over unchanged."""
    prod = newform_density_product(cfg)
    return EulerValue(12 / (math.pi * prod.value), prod.tail_bound)


# --- partial sums of eta(m)/m^2 --------------------------------------------------


def eta_table(n: int) -> np.ndarray:
    """eta(m) as floats for 0 <= m <= n (entry 0 unused)."""
    out = np.ones(n + 1)
    for p in primes_up_to(n):
        out[p::p] *= p / (p + 1)
    return out


def eta_partial_sums(K: int, P: int) -> dict[str, float]:
    """The five partial sums up to K: all m, odd m, eta(2m), m coprime to 2P, eta(2m) with P not dividing m."""
    if P == 2 or not is_prime(P):
        raise ValueError("P must be an odd prime")
    et = eta_table(2 * K)
    m = np.arange(1, K + 1)
    base = et[1 : K + 1] / m.astype(float) ** 2
    twice = et[2 : 2 * K + 1 : 2] / m.astype(float) ** 2
    odd = m % 2 == 1
    coP = m % P != 0
    return {
        "all": math.fsum(base),
        "odd": math.fsum(base[odd]),
        "double": math.fsum(twice),
        "coprime_2P": math.fsum(base[odd & coP]),
        "double_coprime_P": math.fsum(twice[coP]),
    }


def eta_sum_limits(P: int, cfg: EulerProductConfig = EulerProductConfig()) -> dict[str, float]:
    """Limits of eta_partial_sums as K grows; the P-restricted ones drop the Euler factor at P."""
    A = constant_A(cfg).value
    at_P = 1 + P / ((P + 1) ** 2 * (P - 1))
    return {
        "all": A,
        "odd": 9 * A / 11,
        "double": 8 * A / 11,
        "coprime_2P": 9 * A / 11 / at_P,
        "double_coprime_P": 8 * A / 11 / at_P,
    }
