"""Trace of (-1) T_{P^k} o W_N on S_2^new(Gamma_0(N)) for squarefree N, via
Hurwitz class numbers, plus newform dimensions and an elliptic-curve oracle
for the levels where the new space is one-dimensional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import numpy as np

from . import classnum
from .arith import factorize, is_prime, is_squarefree, kronecker


@dataclass(frozen=True)
class TraceParams:
    N: int
    P: int
    k: int = 2

    def __post_init__(self):
        if self.N < 1 or not is_squarefree(self.N):
            raise ValueError(f"level N={self.N} must be a positive squarefree integer")
        if self.P == 2 or not is_prime(self.P):
            raise ValueError(f"P={self.P} must be an odd prime")
        if self.N % self.P == 0:
            raise ValueError(f"P={self.P} divides N={self.N}")
        if self.k < 1:
            raise ValueError("k must be >= 1")


def sigma1_prime_power(P: int, k: int) -> int:
    return sum(P ** i for i in range(k + 1))


def trace_discriminants(params: TraceParams) -> tuple[int, list[int]]:
    """(4 P^k N, [4 P^k N - r^2 N^2 for r >= 1 with r^2 N < 4 P^k])."""
    N, Pk = params.N, params.P ** params.k
    rs = []
    r = 1
    while r * r * N < 4 * Pk:
        rs.append(N * (4 * Pk - r * r * N))
        r += 1
    if r * r * N == 4 * Pk:
        # the discriminant-zero term of the general formula; outside the simplified form
        raise ValueError(f"r={r} gives r^2 N = 4 P^k; the simplified trace formula does not cover N={N}")
    return 4 * Pk * N, rs


def trace_rhs(params: TraceParams, cache=None) -> Fraction:
    """H_1(-4P^kN)/2 + sum_r H_1(r^2N^2 - 4P^kN) - sigma_1(P^k), exactly."""
    d0, ds = trace_discriminants(params)
    six = cache.six_h1 if cache is not None else classnum.hurwitz6
    twelve = six(d0) + 2 * sum(six(d) for d in ds)
    return Fraction(twelve, 12) - sigma1_prime_power(params.P, params.k)


def trace_rhs_many(Ns, P: int, k: int = 2, cache=None, threads=None) -> list[Fraction]:
    """trace_rhs for a batch of levels sharing P and k; class numbers computed in one batch."""
    plist = [TraceParams(int(N), P, k) for N in Ns]
    shapes = [trace_discriminants(p) for p in plist]
    flat = []
    for d0, ds in shapes:
        flat.append(d0)
        flat.extend(ds)
    if cache is not None:
        vals = cache.six_h1_many(flat)
    else:
        vals = classnum.hurwitz6_many(flat, threads=threads)
    out = []
    i = 0
    s1 = sigma1_prime_power(P, k)
    for d0, ds in shapes:
        twelve = int(vals[i]) + 2 * int(vals[i + 1 : i + 1 + len(ds)].sum())
        i += 1 + len(ds)
        out.append(Fraction(twelve, 12) - s1)
    return out


def hurwitz_decomposition(N: int, P: int, k: int) -> list[int]:
    """The d with -4P^kN = -d f^2 for some f, i.e. the square-divisor quotients of 4P^kN.

    Even k: 4P^{2i}N and P^{2i}N for i = 0..k/2; odd k: the same times P.
    """
    base = P if k % 2 else 1
    out = []
    for i in range(k // 2, -1, -1):
        out.append(4 * P ** (2 * i) * base * N)
        out.append(P ** (2 * i) * base * N)
    return out


def hurwitz_via_decomposition(N: int, P: int, k: int) -> Fraction:
    return sum((classnum.weighted_h(d) for d in hurwitz_decomposition(N, P, k)), Fraction(0))


# --- dimensions ----------------------------------------------------------------


def _divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n).items():
        ds = [d * p ** i for d in ds for i in range(e + 1)]
    return sorted(ds)


@lru_cache(maxsize=None)
def genus_x0(N: int) -> int:
    """Genus of X_0(N) = dim S_2(Gamma_0(N))."""
    fac = factorize(N) if N > 1 else {}
    mu = Fraction(N)
    for p in fac:
        mu *= Fraction(p + 1, p)
    nu2 = 0 if N % 4 == 0 else math.prod(1 + kronecker(-4, p) for p in fac)
    nu3 = 0 if N % 9 == 0 else math.prod(1 + kronecker(-3, p) for p in fac)
    cusps = 0
    for d in _divisors(N):
        g = math.gcd(d, N // d)
        cusps += sum(1 for x in range(1, g + 1) if math.gcd(x, g) == 1)
    g = 1 + mu / 12 - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(cusps, 2)
    assert g.denominator == 1
    return int(g)


def _beta(n: int) -> int:
    out = 1
    for e in factorize(n).values() if n > 1 else []:
        out *= {1: -2, 2: 1}.get(e, 0)
    return out


@lru_cache(maxsize=None)
def dim_s2_new(N: int) -> int:
    if N < 1:
        raise ValueError("N must be >= 1")
    return sum(_beta(N // M) * genus_x0(M) for M in _divisors(N))


def dim_s2_new_squarefree(N: int) -> int:
    """Closed form for squarefree N, from summing the genus formula against prod (-2):

    (-1)^w + phi(N)/12 - prod((-4|p) - 1)/4 - prod((-3|p) - 1)/3, minus 1/2 at N = 1.
    """
    ps = list(factorize(N)) if N > 1 else []
    val = Fraction((-1) ** len(ps)) + Fraction(math.prod(p - 1 for p in ps), 12)
    val -= Fraction(math.prod(kronecker(-4, p) - 1 for p in ps), 4)
    val -= Fraction(math.prod(kronecker(-3, p) - 1 for p in ps), 3)
    if N == 1:
        val -= Fraction(1, 2)
    assert val.denominator == 1
    return int(val)


# --- elliptic curve oracle -------------------------------------------------------


@dataclass(frozen=True)
class CurveModel:
    label: str
    level: int
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def __post_init__(self):
        if self.discriminant == 0:
            raise ValueError(f"curve {self.label} is singular")

    @property
    def discriminant(self) -> int:
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def load_curves(path=None) -> dict[int, CurveModel]:
    """Curve table keyed by level; lines are "label level a1 a2 a3 a4 a6"."""
    if path is None:
        text = resources.files("sqmurmur").joinpath("data/curves.txt").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    out = {}
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        label, level, *coeffs = ln.split()
        c = CurveModel(label, int(level), *map(int, coeffs))
        out[c.level] = c
    return out


def count_points(curve: CurveModel, P: int) -> int:
    """a_P = P + 1 - #E(F_P) by summing Legendre symbols over x."""
    if P == 2 or not is_prime(P):
        raise ValueError("P must be an odd prime")
    if curve.discriminant % P == 0:
        raise ValueError(f"{curve.label} has bad reduction at {P}")
    x = np.arange(P, dtype=np.int64)
    rhs = (((x + curve.a2) * x + curve.a4) * x + curve.a6) % P
    lin = (curve.a1 * x + curve.a3) % P
    q = (4 * rhs + lin * lin) % P
    chi = -np.ones(P, dtype=np.int64)
    chi[(x * x) % P] = 1
    chi[0] = 0
    a = -int(chi[q].sum())
    assert a * a <= 4 * P, "Hasse bound violated"
    return a


def epsilon_consistency(curve: CurveModel, primes) -> int:
    """Recover the root number from trace_rhs(N, P, 2) = (a_P^2 - P) * eps for each P.

    Raises if the ratios are not one common sign.
    """
    N = curve.level
    if dim_s2_new(N) != 1:
        raise ValueError(f"level {N} is not one-dimensional")
    ratios = set()
    for P in primes:
        den = count_points(curve, P) ** 2 - P
        ratios.add(trace_rhs(TraceParams(N, P, 2)) / den)
    if not ratios:
        raise ValueError("no usable primes")
    if len(ratios) != 1 or next(iter(ratios)) not in (1, -1):
        raise ValueError(f"inconsistent ratios at level {N}: {sorted(ratios)}")
    return int(ratios.pop())
