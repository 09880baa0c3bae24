"""numba kernels for the class-number hot paths.

Everything here is int64 and nogil so batches can run on a thread pool.
"""

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def isqrt(n):
    if n <= 0:
        return 0
    x = np.int64(np.sqrt(np.float64(n)))
    while x * x > n:
        x -= 1
    while (x + 1) * (x + 1) <= n:
        x += 1
    return x


@njit(**_JIT)
def gcd(a, b):
    a = abs(a)
    b = abs(b)
    while b:
        a, b = b, a % b
    return a


@njit(**_JIT)
def kron(a, n):
    if n == 0:
        return 1 if (a == 1 or a == -1) else 0
    res = 1
    if n < 0:
        n = -n
        if a < 0:
            res = -res
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v > 0:
        if a % 2 == 0:
            return 0
        r8 = a % 8
        if v % 2 == 1 and (r8 == 3 or r8 == 5):
            res = -res
    a = a % n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            r8 = n % 8
            if r8 == 3 or r8 == 5:
                res = -res
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            res = -res
        a = a % n
    return res if n == 1 else 0


@njit(**_JIT)
def powmod(b, e, m):
    r = 1
    b %= m
    while e > 0:
        if e & 1:
            r = r * b % m
        b = b * b % m
        e >>= 1
    return r


@njit(**_JIT)
def invmod(a, m):
    a %= m
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 != 0:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    return s0 % m


@njit(**_JIT)
def sqrt_mod_prime(n, p):
    """A square root of a quadratic residue n modulo an odd prime p (Tonelli-Shanks)."""
    n %= p
    if n == 0:
        return 0
    if p % 4 == 3:
        return powmod(n, (p + 1) // 4, p)
    q = p - 1
    s = 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while powmod(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m = s
    c = powmod(z, q, p)
    t = powmod(n, q, p)
    r = powmod(n, (q + 1) // 2, p)
    while t != 1:
        i = 0
        tt = t
        while tt != 1:
            tt = tt * tt % p
            i += 1
        b = c
        for _ in range(m - i - 1):
            b = b * b % p
        m = i
        c = b * b % p
        t = t * c % p
        r = r * b % p
    return r


@njit(**_JIT)
def sqrt_mod_prime_power(n, p, k):
    """Root of x^2 = n mod p^k for odd p not dividing n, by Hensel lifting."""
    s = sqrt_mod_prime(n, p)
    q = p
    for _ in range(1, k):
        q *= p
        fx = (s * s - n) % q
        s = (s - fx * invmod(2 * s, q)) % q
    return s


# --- tables -----------------------------------------------------------------


@njit(**_JIT)
def factor_tables(n):
    """Smallest prime factor, its exact power, and the cofactor for 1..n."""
    spf = np.zeros(n + 1, dtype=np.int32)
    for i in range(2, n + 1):
        if spf[i] == 0:
            for j in range(i, n + 1, i):
                if spf[j] == 0:
                    spf[j] = i
    pk = np.ones(n + 1, dtype=np.int32)
    rest = np.ones(n + 1, dtype=np.int32)
    for i in range(2, n + 1):
        p = spf[i]
        m = i // p
        if spf[m] == p:
            pk[i] = pk[m] * p
            rest[i] = rest[m]
        else:
            pk[i] = p
            rest[i] = m
    return spf, pk, rest


@njit(**_JIT)
def trial_factor(n):
    """Prime factorization of n >= 1 by trial division; returns (primes, exponents)."""
    ps = np.zeros(64, dtype=np.int64)
    es = np.zeros(64, dtype=np.int64)
    cnt = 0
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            ps[cnt] = p
            es[cnt] = e
            cnt += 1
        p += 1 if p == 2 else 2
    if n > 1:
        ps[cnt] = n
        es[cnt] = 1
        cnt += 1
    return ps[:cnt], es[:cnt]


# --- form counting by the b-loop ---------------------------------------------


@njit(**_JIT)
def count_forms(d, primitive, weighted):
    """Reduced forms (a, b, c) of discriminant -d found by looping over b.

    Unweighted: number of classes (primitive only if requested).
    Weighted: 6 * (class count with (a,0,a) at 1/2 and (a,a,a) at 1/3).
    """
    total = 0
    bmax = isqrt(d // 3)
    for b in range(d % 2, bmax + 1, 2):
        m = (b * b + d) // 4
        amax = isqrt(m)
        a0 = b if b > 0 else 1
        for a in range(a0, amax + 1):
            if m % a != 0:
                continue
            c = m // a
            if primitive and gcd(gcd(a, b), c) != 1:
                continue
            single = b == 0 or a == b or a == c
            if weighted:
                if b == 0 and a == c:
                    total += 3
                elif a == b and a == c:
                    total += 2
                elif single:
                    total += 6
                else:
                    total += 12
            else:
                total += 1 if single else 2
    return total


@njit(**_JIT)
def list_forms(d, primitive):
    n = count_forms(d, primitive, False)
    out = np.zeros((n, 3), dtype=np.int64)
    i = 0
    bmax = isqrt(d // 3)
    for b in range(d % 2, bmax + 1, 2):
        m = (b * b + d) // 4
        amax = isqrt(m)
        a0 = b if b > 0 else 1
        for a in range(a0, amax + 1):
            if m % a != 0:
                continue
            c = m // a
            if primitive and gcd(gcd(a, b), c) != 1:
                continue
            out[i, 0] = a
            out[i, 1] = b
            out[i, 2] = c
            i += 1
            if not (b == 0 or a == b or a == c):
                out[i, 0] = a
                out[i, 1] = -b
                out[i, 2] = c
                i += 1
    return out


@njit(**_JIT)
def bruteforce_class_histogram(dmax):
    """Primitive reduced-form counts for every 0 < d <= dmax from one triple scan.

    No b-loop or divisor shortcuts: walk a, b in (-a, a], c >= a and test the
    reduction conditions directly.
    """
    hist = np.zeros(dmax + 1, dtype=np.int64)
    a = 1
    while 3 * a * a <= dmax:
        for b in range(-a + 1, a + 1):
            c = a
            while True:
                d = 4 * a * c - b * b
                if d > dmax:
                    break
                ok = True
                if c == a and b < 0:
                    ok = False
                if ok and gcd(gcd(a, b), c) == 1:
                    hist[d] += 1
                c += 1
        a += 1
    return hist


# --- Hurwitz class numbers by root counting ---------------------------------


@njit(**_JIT)
def _two_adic_count(D, j):
    """#{b mod 2^j : b^2 = -D mod 2^j}."""
    mod = np.int64(1) << j
    if D % mod == 0:
        return np.int64(1) << (j // 2)
    v = 0
    t = D
    while t % 2 == 0:
        t //= 2
        v += 1
    if v % 2 == 1:
        return 0
    u8 = (-t) % 8
    rem = j - v
    if rem == 1:
        n = 1
    elif rem == 2:
        n = 2 if u8 % 4 == 1 else 0
    else:
        n = 4 if u8 == 1 else 0
    return n << (v // 2)


@njit(**_JIT)
def _local_counts(D, A, spf):
    """loc[q] for prime powers q <= A: roots of b^2 = -D mod 4a counted mod 2a at a = q."""
    loc = np.zeros(A + 1, dtype=np.int64)
    for p in range(2, A + 1):
        if spf[p] != p:
            continue
        if p == 2:
            q = 2
            e = 1
            while q <= A:
                loc[q] = _two_adic_count(D, e + 2) // 2
                q *= 2
                e += 1
            continue
        if D % p != 0:
            val = 1 + kron(-(D % p), p)
            q = p
            while q <= A:
                loc[q] = val
                q *= p
            continue
        v = 0
        t = D
        while t % p == 0:
            t //= p
            v += 1
        q = p
        k = 1
        while q <= A:
            if k <= v:
                f = 1
                for _ in range(k // 2):
                    f *= p
                loc[q] = f
            else:
                if v % 2 == 1:
                    loc[q] = 0
                else:
                    f = 1
                    for _ in range(v // 2):
                        f *= p
                    loc[q] = f * (1 + kron(-(t % p), p))
            q *= p
            k += 1
    return loc


@njit(**_JIT)
def _crt_merge(r1, n1, m1, r2, n2, m2, out):
    inv = invmod(m1, m2)
    i = 0
    for x in range(n1):
        for y in range(n2):
            t = ((r2[y] - r1[x]) % m2) * inv % m2
            out[i] = r1[x] + m1 * t
            i += 1
    return i


@njit(**_JIT)
def _tail_weight(D, a, spf, pk, rest, cur, nxt, part):
    """6 * weighted count of reduced forms with leading coefficient a, 4a^2 >= D.

    cur, nxt, part are scratch buffers at least as long as the root count.
    """
    # 2-part: b mod 2^(e+1) with b^2 = -D mod 2^(e+2)
    e = 0
    m = a
    while m % 2 == 0:
        m //= 2
        e += 1
    mod = np.int64(1) << (e + 1)
    big = mod * 2
    ncur = 0
    for b in range(D & 1, mod, 2):
        if (b * b + D) % big == 0:
            cur[ncur] = b
            ncur += 1
    cm = mod
    while m > 1 and ncur > 0:
        p = np.int64(spf[m])
        q = np.int64(pk[m])
        k = 0
        t = q
        while t > 1:
            t //= p
            k += 1
        m = np.int64(rest[m])
        npart = 0
        if D % p != 0:
            s = sqrt_mod_prime_power((-D) % q, p, k)
            part[0] = s
            part[1] = (q - s) % q
            npart = 2
        else:
            v = 0
            u = D
            while u % p == 0:
                u //= p
                v += 1
            if k <= v:
                step = 1
                for _ in range((k + 1) // 2):
                    step *= p
                x = 0
                while x < q:
                    part[npart] = x
                    npart += 1
                    x += step
            else:
                ph = 1
                for _ in range(v // 2):
                    ph *= p
                qk = q // (ph * ph)
                s = sqrt_mod_prime_power((-u) % qk, p, k - v)
                for sgn in range(2):
                    base = s if sgn == 0 else (qk - s) % qk
                    for j in range(ph):
                        part[npart] = (ph * (base + j * qk)) % q
                        npart += 1
        ncur = _crt_merge(cur, ncur, cm, part, npart, q, nxt)
        cm *= q
        cur, nxt = nxt, cur
    w = 0
    two_a = 2 * a
    for i in range(ncur):
        b = cur[i] % two_a
        if b > a:
            b -= two_a
        num = b * b + D
        c = num // (4 * a)
        if c < a:
            continue
        if c == a:
            if b < 0:
                continue
            if b == 0:
                w += 3
            elif b == a:
                w += 2
            else:
                w += 6
        else:
            w += 6
    return w


@njit(**_JIT)
def hurwitz6(D, spf, pk, rest):
    """6 * H_1(-D) for D > 0, D = 0 or 3 mod 4; factor tables must reach sqrt(D/3)."""
    A = isqrt(D // 3)
    if A < 1:
        return 0
    h = isqrt((D - 1) // 4)
    loc = _local_counts(D, A, spf)
    rho = np.zeros(A + 1, dtype=np.int64)
    rho[1] = 1
    total = 0
    if h >= 1:
        total = 6
    for a in range(2, A + 1):
        r = rho[rest[a]] * loc[pk[a]]
        rho[a] = r
        if a <= h:
            total += 6 * r
    lo = max(h + 1, 1)
    if lo <= A:
        nbuf = max(2, rho[lo : A + 1].max())
        cur = np.zeros(nbuf, dtype=np.int64)
        nxt = np.zeros(nbuf, dtype=np.int64)
        part = np.zeros(nbuf, dtype=np.int64)
        for a in range(lo, A + 1):
            if rho[a] != 0:
                total += _tail_weight(D, a, spf, pk, rest, cur, nxt, part)
    return total


@njit(**_JIT)
def hurwitz6_batch(Ds, spf, pk, rest):
    out = np.zeros(Ds.shape[0], dtype=np.int64)
    for i in range(Ds.shape[0]):
        out[i] = hurwitz6(Ds[i], spf, pk, rest)
    return out


@njit(**_JIT)
def l_partial_sum(D, T):
    """sum_{n <= T} (-D|n)/n."""
    s = 0.0
    for n in range(1, T + 1):
        k = kron(-D, n)
        if k != 0:
            s += k / n
    return s


# --- character sums for the residue-class analysis ----------------------------


@njit(**_JIT)
def _kron2(a):
    """(a|2) for any integer a."""
    r = a % 8
    if r == 1 or r == 7:
        return 1
    if r == 3 or r == 5:
        return -1
    return 0


@njit(**_JIT)
def odd_kron_table(m, spf, out):
    """out[x] = (x|m) for 0 <= x < m, m odd, filled by complete multiplicativity in x."""
    if m == 1:
        out[0] = 1
        return
    out[0] = 0
    out[1] = 1
    for x in range(2, m):
        p = spf[x]
        if p == x:
            out[x] = kron(x, m)
        else:
            out[x] = out[p] * out[x // p]


@njit(**_JIT)
def theta_bruteforce_grid(mmax, rs, P, spf):
    """theta_r(m) = sum_{a mod m} (a|m)((a r^2 - 4P^2)|m) for 1 <= m <= mmax, every r in rs.

    The 2-part of each symbol is evaluated on the actual integers, the odd part
    through a lookup table of (x|m_odd).
    """
    out = np.zeros((rs.shape[0], mmax + 1), dtype=np.int64)
    tab = np.zeros(mmax + 1, dtype=np.int64)
    c = 4 * P * P
    for m in range(1, mmax + 1):
        e = 0
        mo = m
        while mo % 2 == 0:
            mo //= 2
            e += 1
        odd_kron_table(mo, spf, tab)
        for j in range(rs.shape[0]):
            r2 = rs[j] * rs[j]
            s = 0
            xo = (-c) % mo
            step = r2 % mo
            ao = 0
            for a in range(m):
                t = tab[ao] * tab[xo]
                if t != 0 and e > 0:
                    x = a * r2 - c
                    k1 = _kron2(a)
                    k2 = _kron2(x)
                    if e % 2 == 1:
                        t *= k1 * k2
                    else:
                        t *= k1 * k1 * k2 * k2
                s += t
                ao += 1
                if ao == mo:
                    ao = 0
                xo += step
                if xo >= mo:
                    xo -= mo
            out[j, m] = s
    return out


@njit(**_JIT)
def theta_bruteforce(m, r, P):
    s = 0
    for a in range(m):
        s += kron(a, m) * kron(a * r * r - 4 * P * P, m)
    return s


@njit(**_JIT)
def residue_sum(residues, d, n, tmod, r, P):
    """sum over b mod tmod with b mod d^2 in residues of (b|n)((r^2 b - 4P^2)/d^2 | n)."""
    d2 = d * d
    s = 0
    for i in range(residues.shape[0]):
        a0 = residues[i]
        b = a0
        while b < tmod:
            q = (r * r * b - 4 * P * P) // d2
            s += kron(b, n) * kron(q, n)
            b += d2
    return s


@njit(**_JIT)
def residue_set_scan(r, d, P, odd_primes):
    """Flags over N mod 4d^2 meeting the defining congruences directly.

    odd_primes: the odd primes dividing d (classes with p^2 | N hold no squarefree N).
    """
    d2 = d * d
    M = 4 * d2
    ok = np.zeros(M, dtype=np.bool_)
    for N in range(M):
        if N % 4 == 0:
            continue
        bad = False
        for p in odd_primes:
            if N % (p * p) == 0:
                bad = True
        if bad:
            continue
        x = r * r * N - 4 * P * P
        if x % d2 != 0:
            continue
        q = x // d2
        if (N * q) % 4 <= 1:
            ok[N] = True
    return ok
