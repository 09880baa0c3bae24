"""Grid checks of every closed form against its brute-force twin.

Each check returns a CheckResult; the verify subcommand and the acceptance
tests both drive these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import residue as R
from .arith import eta_partial_sums, eta_sum_limits, factorize, is_squarefree, primes_up_to
from .classnum import hurwitz_H1, weighted_h
from .trace import epsilon_consistency, hurwitz_decomposition, load_curves, trace_rhs_many


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int
    failures: list = field(default_factory=list)
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  {self.note}" if self.note else ""
        return f"{status}  {self.name:<28} cases={self.cases}{extra}"


def _coprime_triples(rmax, dmax, primes):
    for P in primes:
        for r in range(1, rmax + 1):
            for d in range(1, dmax + 1):
                if math.gcd(P, r) == 1 and math.gcd(P, d) == 1:
                    yield r, d, P


def check_residue_tables(rmax=48, dmax=48, primes=(5, 7, 11, 101)) -> CheckResult:
    fails = []
    n = 0
    for r, d, P in _coprime_triples(rmax, dmax, primes):
        n += 1
        a = R.residue_set(r, d, P)
        b = R.residue_set_bruteforce(r, d, P)
        if a.residues != b.residues or a.fine != b.fine or len(a) != R.expected_size(r, d):
            fails.append((r, d, P))
    return CheckResult("residue tables", not fails, n, fails[:10])


def check_theta(mmax=20000, rmax=30, primes=(5, 7, 11)) -> CheckResult:
    fails = []
    n = 0
    rs = list(range(1, rmax + 1))
    for P in primes:
        tab = R.theta_bruteforce_table(mmax, rs, P).tolist()
        for m in range(1, mmax + 1):
            if m % P == 0:
                continue
            fac = factorize(m) if m > 1 else {}
            for j, r in enumerate(rs):
                n += 1
                if tab[j][m] != R.theta_closed(m, r, P, fac):
                    fails.append((m, r, P))
    return CheckResult("theta_r closed form", not fails, n, fails[:10])


def check_theta_multiplicative(limit=10000, r_values=(1, 2, 3, 6), P=7) -> CheckResult:
    """theta_r(m1 m2) = theta_r(m1) theta_r(m2) for coprime m1, m2 on the brute-force path."""
    fails = []
    n = 0
    tab = R.theta_bruteforce_table(limit, r_values, P).tolist()
    for j, r in enumerate(r_values):
        for m1 in range(2, int(math.isqrt(limit)) + 1):
            for m2 in range(m1 + 1, limit // m1 + 1):
                if math.gcd(m1, m2) != 1:
                    continue
                n += 1
                if tab[j][m1 * m2] != tab[j][m1] * tab[j][m2]:
                    fails.append((m1, m2, r))
    return CheckResult("theta_r multiplicativity", not fails, n, fails[:10])


def check_phi_tilde(rmax=24, dmax=24, primes=(5, 7, 11), bound=200000) -> CheckResult:
    """phi~_{r,d}(g) for g supported on the primes of d with d^2 g <= bound."""
    fails = []
    n = 0
    for r, d, P in _coprime_triples(rmax, dmax, primes):
        if not R.is_admissible(r, d):
            continue
        gs = [1]
        for p in (factorize(d) if d > 1 else {}):
            new = []
            for g in gs:
                q = g
                while q * d * d <= bound:
                    new.append(q)
                    q *= p
            gs = new
        for g in gs:
            n += 1
            if R.phi_tilde_bruteforce(r, d, g, P) != R.phi_tilde_closed(r, d, g, P):
                fails.append((r, d, g, P))
    return CheckResult("phi~ closed form", not fails, n, fails[:10])


def check_char_sum_factorization(rmax=12, dmax=12, nmax=60, primes=(5, 7)) -> CheckResult:
    fails = []
    n = 0
    for r, d, P in _coprime_triples(rmax, dmax, primes):
        if not R.is_admissible(r, d):
            continue
        for m in range(1, nmax + 1):
            if math.gcd(m, P) != 1:
                continue
            n += 1
            if not R.char_sum_factorization_check(r, d, m, P):
                fails.append((r, d, m, P))
    return CheckResult("residue sum factorization", not fails, n, fails[:10])


def check_eta_sums(Ks=(1000, 10000, 100000), primes=(3, 5, 7, 11), c_max=10.0) -> CheckResult:
    """K * |partial - limit| <= c for all five sums; reports the fitted c."""
    worst = 0.0
    n = 0
    for P in primes:
        lim = eta_sum_limits(P)
        for K in Ks:
            s = eta_partial_sums(K, P)
            for key in s:
                n += 1
                worst = max(worst, K * abs(s[key] - lim[key]))
    ok = worst <= c_max
    return CheckResult("eta sums", ok, n, [] if ok else [worst], note=f"c={worst:.4f}")


def check_epsilon(min_primes=20, pmax=150) -> CheckResult:
    fails = []
    signs = {}
    for N, curve in sorted(load_curves().items()):
        ps = [int(p) for p in primes_up_to(pmax) if p > 2 and N % p and curve.discriminant % p]
        if len(ps) < min_primes:
            fails.append((N, "too few primes"))
            continue
        try:
            signs[N] = epsilon_consistency(curve, ps)
        except ValueError as e:
            fails.append((N, str(e)))
    note = " ".join(f"{N}:{s:+d}" for N, s in signs.items())
    return CheckResult("root-number consistency", not fails, len(signs) + len(fails), fails, note)


def check_trace_integrality(Nmax=500, Pmax=50) -> CheckResult:
    """trace_rhs(N, P, 2) is an integer for squarefree 2 <= N <= Nmax and odd P <= Pmax."""
    fails = []
    n = 0
    for P in (int(p) for p in primes_up_to(Pmax) if p > 2):
        Ns = [N for N in range(2, Nmax + 1) if N % P and is_squarefree(N)]
        for N, t in zip(Ns, trace_rhs_many(Ns, P, 2)):
            n += 1
            if t.denominator != 1:
                fails.append((N, P, t))
    return CheckResult("trace integrality", not fails, n, fails[:10])


def check_hurwitz_decomposition(Nmax=300, Pmax=20, ks=(2,)) -> CheckResult:
    fails = []
    n = 0
    for P in (int(p) for p in primes_up_to(Pmax) if p > 2):
        for N in range(1, Nmax + 1):
            if N % P == 0 or not is_squarefree(N):
                continue
            for k in ks:
                n += 1
                rhs = sum(weighted_h(d) for d in hurwitz_decomposition(N, P, k))
                if hurwitz_H1(4 * P ** k * N) != rhs:
                    fails.append((N, P, k))
    return CheckResult("Hurwitz decomposition", not fails, n, fails[:10])


GRIDS = {
    "small": dict(
        residue=dict(rmax=16, dmax=16, primes=(5, 7, 11)),
        theta=dict(mmax=600, rmax=12, primes=(5, 7)),
        phi=dict(rmax=12, dmax=12, primes=(5, 7), bound=20000),
        factorization=dict(rmax=6, dmax=8, nmax=30, primes=(5, 7)),
        eta=dict(Ks=(1000, 10000)),
        epsilon=dict(),
    ),
    "full": dict(
        residue=dict(),
        theta=dict(),
        phi=dict(),
        factorization=dict(),
        eta=dict(),
        epsilon=dict(),
    ),
}


def run_all(grid: str = "small") -> list[CheckResult]:
    g = GRIDS[grid]
    return [
        check_residue_tables(**g["residue"]),
        check_theta(**g["theta"]),
        check_phi_tilde(**g["phi"]),
        check_char_sum_factorization(**g["factorization"]),
        check_eta_sums(**g["eta"]),
        check_epsilon(**g["epsilon"]),
    ]

