"""Residue classes of levels N for which (r^2N^2 - 4P^2N)/d^2 is a discriminant,
the character sums theta_r and phi~_{r,d}, and the window sums S_{n,d,r}.

Each closed form has a brute-force twin that only uses the definitions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .arith import factorize, is_prime, sieve_squarefree
from .classnum import factor_tables


@dataclass(frozen=True)
class ResidueSet:
    """Admissible residues of N mod d^2; ``fine`` holds the same set mod 4d^2."""

    r: int
    d: int
    P: int
    residues: frozenset
    fine: frozenset

    @property
    def modulus(self) -> int:
        return self.d * self.d

    def __len__(self):
        return len(self.residues)

    def __contains__(self, N):
        return N % self.modulus in self.residues

    def sorted(self) -> list[int]:
        return sorted(self.residues)


def _check_triple(r, d, P):
    if r < 1 or d < 1:
        raise ValueError("r and d must be positive")
    if P == 2 or not is_prime(P):
        raise ValueError("P must be an odd prime")
    if math.gcd(P, r) != 1 or math.gcd(P, d) != 1:
        raise ValueError(f"P={P} must be coprime to r={r} and d={d}")


def _lift(residues, d) -> frozenset:
    d2 = d * d
    return frozenset(a + j * d2 for a in residues for j in range(4) if (a + j * d2) % 4)


def residue_set(r: int, d: int, P: int) -> ResidueSet:
    """Admissible residues by the parity case analysis on r and d."""
    _check_triple(r, d, P)
    d2 = d * d
    res = set()
    if r % 2:
        if d % 2 == 0 or math.gcd(r, d) != 1:
            pass
        else:
            res.add(4 * P * P * pow(r * r, -1, d2) % d2)
    else:
        l = r // 2
        if d % 2:
            if math.gcd(l, d) == 1:
                res.add(P * P * pow(l * l, -1, d2) % d2)
        else:
            b = d // 2
            if math.gcd(l, b) == 1:
                # 4 | k branch
                if l % 2:
                    res.add(P * P * pow(l * l, -1, d2) % d2)
                # 4 does not divide k: needs exactly one of l, b even
                if (l + b) % 2:
                    res.add(P * P * pow(l * l - b * b, -1, d2) % d2)
    return ResidueSet(r, d, P, frozenset(res), _lift(res, d))


def residue_set_bruteforce(r: int, d: int, P: int) -> ResidueSet:
    """Scan N mod 4d^2 and test the defining congruences directly."""
    _check_triple(r, d, P)
    odd = np.array([p for p in factorize(d) if p > 2] if d > 1 else [], dtype=np.int64)
    flags = K.residue_set_scan(r, d, P, odd)
    fine = frozenset(int(x) for x in np.flatnonzero(flags))
    return ResidueSet(r, d, P, frozenset(x % (d * d) for x in fine), fine)


def expected_size(r: int, d: int) -> int:
    """Cardinality table for the admissible set."""
    g = math.gcd(r, d)
    if g == 1 and d % 2:
        return 1
    if r % 2 == 0 and g == 1:
        return 1
    if g == 2 and d % 4:
        return 1
    if r % 2 == 0 and g == 2 and d % 4 == 0:
        return 2
    return 0


def is_admissible(r: int, d: int) -> bool:
    return expected_size(r, d) > 0


# --- theta_r ------------------------------------------------------------------


def theta_bruteforce(m: int, r: int, P: int) -> int:
    """sum_{a mod m} (a|m)((a r^2 - 4P^2)|m) straight from Kronecker symbols."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return int(K.theta_bruteforce(m, r, P))


def theta_bruteforce_table(mmax: int, rs, P: int) -> np.ndarray:
    """Brute-force theta_r(m) for all m <= mmax and r in rs; row j is r = rs[j]."""
    spf, _, _ = factor_tables(mmax + 1)
    return K.theta_bruteforce_grid(mmax, np.asarray(rs, dtype=np.int64), P, spf)


def theta_prime_power(p: int, alpha: int, r: int) -> int:
    if alpha == 0:
        return 1
    if p == 2:
        return 0 if r % 2 == 0 else (-1) ** alpha * 2 ** (alpha - 1)
    if r % p:
        return -(p ** (alpha - 1)) if alpha % 2 else p ** (alpha - 1) * (p - 2)
    return 0 if alpha % 2 else p ** (alpha - 1) * (p - 1)


def theta_closed(m: int, r: int, P: int, fac: dict[int, int] | None = None) -> int:
    """theta_r(m) by multiplicativity over the prime-power table; needs gcd(m, P) = 1.
    A known factorization of m may be passed."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if math.gcd(m, P) != 1:
        raise ValueError(f"closed form needs gcd(m, P) = 1, got m={m}, P={P}")
    if fac is None:
        fac = factorize(m) if m > 1 else {}
    out = 1
    for p, a in fac.items():
        out *= theta_prime_power(p, a, r)
    return out


def theta_r(m: int, r: int, P: int, method: str = "closed") -> int:
    if method == "closed":
        return theta_closed(m, r, P)
    if method == "brute":
        return theta_bruteforce(m, r, P)
    raise ValueError(f"unknown method {method!r}")


# --- phi~_{r,d} -------------------------------------------------------------------


def _require_admissible(r, d, P) -> ResidueSet:
    rs = residue_set(r, d, P)
    if not rs.residues:
        raise ValueError(f"(r, d) = ({r}, {d}) is not admissible")
    return rs


def phi_tilde_bruteforce(r: int, d: int, g: int, P: int) -> int:
    """sum over a mod d^2 g, a mod d^2 admissible, of (a|g)(((a r^2 - 4P^2)/d^2)|g)."""
    rs = _require_admissible(r, d, P)
    res = np.array(rs.sorted(), dtype=np.int64)
    return int(K.residue_sum(res, d, g, d * d * g, r, P))


def _is_square(n: int) -> bool:
    return math.isqrt(n) ** 2 == n


def phi_tilde_closed(r: int, d: int, g: int, P: int) -> int:
    _require_admissible(r, d, P)
    if not _is_square(g):
        return 0
    phi = g
    for p in (factorize(g) if g > 1 else {}):
        phi -= phi // p
    if g % 2:
        return phi if d % 4 else 2 * phi
    if math.gcd(d, r) == 2 and (r % 4 == 0 or d % 4 == 0):
        return 2 * phi
    return 0


def phi_tilde(r: int, d: int, g: int, P: int, method: str = "closed") -> int:
    if method == "closed":
        return phi_tilde_closed(r, d, g, P)
    if method == "brute":
        return phi_tilde_bruteforce(r, d, g, P)
    raise ValueError(f"unknown method {method!r}")


# --- the factorization of the residue character sum ------------------------------


@dataclass(frozen=True)
class CharSumParams:
    r: int
    d: int
    n: int
    P: int

    @property
    def g(self) -> int:
        """Largest divisor of n supported on the primes of d."""
        g = 1
        for p, e in (factorize(self.n).items() if self.n > 1 else []):
            if self.d % p == 0:
                g *= p ** e
        return g

    @property
    def n_prime(self) -> int:
        return self.n // self.g

    @property
    def f(self) -> int:
        return 4 if self.n % 2 == 0 else 1


def residue_character_sum(r: int, d: int, n: int, P: int) -> int:
    """sum over b mod f d^2 n, b mod d^2 admissible, of (b|n)(((r^2 b - 4P^2)/d^2)|n)."""
    rs = _require_admissible(r, d, P)
    c = CharSumParams(r, d, n, P)
    res = np.array(rs.sorted(), dtype=np.int64)
    return int(K.residue_sum(res, d, n, c.f * d * d * n, r, P))


def char_sum_factorization_check(r: int, d: int, n: int, P: int) -> bool:
    """Brute-force residue character sum against f * phi~(g) * theta_r(n')."""
    if math.gcd(n, P) != 1:
        raise ValueError("n must be coprime to P")
    c = CharSumParams(r, d, n, P)
    lhs = residue_character_sum(r, d, n, P)
    rhs = c.f * phi_tilde_closed(r, d, c.g, P) * theta_closed(c.n_prime, r, P)
    return lhs == rhs


# --- window sums -------------------------------------------------------------------


def _check_window(r, P, X, Y):
    if not 0 < Y < X:
        raise ValueError("need 0 < Y < X")
    if 4 * P * P <= r * r * (X + Y):
        raise ValueError(f"need 4P^2 > r^2 (X+Y); got P={P}, r={r}, X+Y={X + Y}")


def s_ndr(n: int, d: int, r: int, P: int, X: int, Y: int, order: str = "level") -> int:
    """S_{n,d,r}: sum over squarefree N in [X, X+Y], P not dividing N, in the admissible set,
    of (N|n)(((r^2 N - 4P^2)/d^2)|n).

    order="level" walks N and tests the defining conditions; order="residue" walks the
    admissible residue classes mod d^2.
    """
    _check_triple(r, d, P)
    _check_window(r, P, X, Y)
    sq = sieve_squarefree(X, X + Y)
    d2 = d * d
    total = 0
    if order == "level":
        for N in range(X, X + Y + 1):
            if N not in sq or N % P == 0:
                continue
            x = r * r * N - 4 * P * P
            if x % d2:
                continue
            q = x // d2
            if (N * q) % 4 > 1:
                continue
            total += K.kron(N, n) * K.kron(q, n)
    elif order == "residue":
        for a in residue_set(r, d, P).sorted():
            N = X + (a - X) % d2
            while N <= X + Y:
                if N in sq and N % P:
                    q = (r * r * N - 4 * P * P) // d2
                    total += K.kron(N, n) * K.kron(q, n)
                N += d2
    else:
        raise ValueError(f"unknown order {order!r}")
    return int(total)


def s_ndr_leading(n: int, d: int, r: int, P: int, Y: int) -> float:
    """Y eta(d^2 n) phi~(g) theta_r(n') / (zeta(2) phi(d^2 n))."""
    from .arith import ZETA2, eta, euler_phi

    c = CharSumParams(r, d, n, P)
    m = d * d * n
    return Y * float(eta(m)) * phi_tilde_closed(r, d, c.g, P) * theta_closed(c.n_prime, r, P) / (
        ZETA2 * euler_phi(m)
    )
