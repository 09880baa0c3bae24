"""Gauss and Hurwitz class numbers of imaginary quadratic discriminants.

h(-d) counts primitive reduced forms; H_1(-d) counts all reduced forms with
(a,0,a) weighted 1/2 and (a,a,a) weighted 1/3, so 6*H_1 is an integer.
Non-discriminants (d = 1, 2 mod 4) get class number 0.
"""

from __future__ import annotations

import hashlib
import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import _kernels as K
from .arith import factorize, kronecker

# b-loop enumeration is used for gauss_h below this size
SMALL_D = 10 ** 7

_tables_lock = threading.Lock()
_tables = K.factor_tables(1000)


def factor_tables(n: int):
    """spf/pk/rest tables covering 1..n, grown on demand and shared."""
    global _tables
    tabs = _tables
    if tabs[0].shape[0] > n:
        return tabs
    with _tables_lock:
        if _tables[0].shape[0] <= n:
            _tables = K.factor_tables(max(n, int(1.5 * (_tables[0].shape[0] - 1))))
        return _tables


def is_discriminant(d: int) -> bool:
    return d > 0 and d % 4 in (0, 3)


def _check(d: int):
    if not is_discriminant(d):
        raise ValueError(f"-{d} is not a negative discriminant (need d > 0, d = 0 or 3 mod 4)")


def n_threads() -> int:
    env = os.environ.get("SQMURMUR_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True, order=True)
class ReducedForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c


def reduced_forms(d: int, primitive: bool = True) -> list[ReducedForm]:
    _check(d)
    return [ReducedForm(int(a), int(b), int(c)) for a, b, c in K.list_forms(d, primitive)]


# --- fundamental discriminants and conductors -------------------------------


def fundamental_split(d: int, fac: dict[int, int] | None = None) -> tuple[int, int]:
    """Write -d = D0 f^2 with D0 fundamental; returns (|D0|, f)."""
    _check(d)
    if fac is None:
        fac = factorize(d)
    core, f = 1, 1
    for p, e in fac.items():
        f *= p ** (e // 2)
        if e % 2:
            core *= p
    # -core is 1 mod 4 or we need to pull a factor 4 back out of f^2
    if (-core) % 4 != 1:
        core *= 4
        f //= 2
    return core, f


def _unit_index(d0: int, f: int) -> int:
    if f == 1:
        return 1
    return {3: 3, 4: 2}.get(d0, 1)


def conductor_factor(d0: int, f: int) -> Fraction:
    """f prod_{p|f} (1 - (D0|p)/p): ratio h(D0 f^2)/h(D0) before the unit index."""
    out = Fraction(f)
    for p in factorize(f) if f > 1 else {}:
        out *= 1 - Fraction(kronecker(-d0, p), p)
    return out


def gauss_h(d: int, fac: dict[int, int] | None = None) -> int:
    """h(-d); 0 when d = 1, 2 mod 4. A known factorization of d may be passed."""
    if d <= 0:
        raise ValueError("gauss_h needs d > 0")
    if not is_discriminant(d):
        return 0
    if d <= SMALL_D and fac is None:
        return int(K.count_forms(d, True, False))
    d0, f = fundamental_split(d, fac)
    h0 = _fundamental_h(d0)
    val = h0 * conductor_factor(d0, f) / _unit_index(d0, f)
    assert val.denominator == 1
    return int(val)


def _fundamental_h(d0: int) -> int:
    if d0 <= SMALL_D:
        return int(K.count_forms(d0, True, False))
    # a fundamental discriminant has no proper square divisor that is a discriminant
    six = hurwitz6(d0)
    return six // 6


def hurwitz6(d: int) -> int:
    """6 * H_1(-d) as an exact integer."""
    _check(d)
    spf, pk, rest = factor_tables(math.isqrt(d // 3) + 1)
    return int(K.hurwitz6(d, spf, pk, rest))


def hurwitz_H1(d: int) -> Fraction:
    return Fraction(hurwitz6(d), 6)


def hurwitz6_many(ds, threads: int | None = None) -> np.ndarray:
    """6*H_1 for many discriminants; parallel over chunks, order preserved."""
    ds = np.asarray(ds, dtype=np.int64)
    if ds.size == 0:
        return np.zeros(0, dtype=np.int64)
    for d in np.unique(ds % 4):
        if d not in (0, 3):
            raise ValueError("all entries must be discriminants")
    if ds.min() <= 0:
        raise ValueError("all entries must be positive")
    spf, pk, rest = factor_tables(math.isqrt(int(ds.max()) // 3) + 1)
    threads = threads or n_threads()
    if threads == 1 or ds.size < 8:
        return K.hurwitz6_batch(ds, spf, pk, rest)
    chunks = np.array_split(ds, min(threads * 4, ds.size))
    with ThreadPoolExecutor(threads) as ex:
        parts = list(ex.map(lambda c: K.hurwitz6_batch(c, spf, pk, rest), chunks))
    return np.concatenate(parts)


def weighted_h(d: int) -> Fraction:
    """h(-d) with the 1/3 and 1/2 weights at d = 3, 4; 0 off discriminants."""
    if d == 3:
        return Fraction(1, 3)
    if d == 4:
        return Fraction(1, 2)
    return Fraction(gauss_h(d))


def hurwitz_from_h(d: int) -> Fraction:
    """H_1(-d) as the sum of weighted h(-d/f^2) over square divisors: an independent route."""
    _check(d)
    fac = factorize(d)
    out = Fraction(0)
    fs = [1]
    for p, e in fac.items():
        fs = [f * p ** i for f in fs for i in range(e // 2 + 1)]
    for f in fs:
        out += weighted_h(d // (f * f))
    return out


def approx_h_via_L(d: int, T: int) -> float:
    """(sqrt(d)/pi) * sum_{n<=T} (-d|n)/n with the symbol of -d taken literally."""
    _check(d)
    if T < 1:
        raise ValueError("T must be >= 1")
    return math.sqrt(d) / math.pi * K.l_partial_sum(d, T)


# --- on-disk cache ------------------------------------------------------------


class ClassNumberCache:
    """Append-only "d h sixH1" records with a sha256 footer over the record lines.

    h is "-" when only H_1 was needed.
    """

    def __init__(self, path, spot_check: int = 3):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._h: dict[int, int | None] = {}
        self._six: dict[int, int] = {}
        if self.path.exists():
            self._load(spot_check)

    def _load(self, spot_check):
        lines = self.path.read_text().splitlines()
        body = [ln for ln in lines if ln and not ln.startswith("#")]
        footer = [ln for ln in lines if ln.startswith("# sha256 ")]
        if footer:
            _, _, digest, count = footer[-1].split()
            if digest != _digest(body) or int(count) != len(body):
                raise ValueError(f"cache checksum mismatch in {self.path}")
        for ln in body:
            d, h, six = ln.split()
            self._six[int(d)] = int(six)
            if h != "-" or int(d) not in self._h:
                self._h[int(d)] = None if h == "-" else int(h)
        keys = sorted(self._six)
        for d in keys[:: max(1, len(keys) // max(spot_check, 1))][:spot_check]:
            if is_discriminant(d) and d < 10 ** 9 and hurwitz6(d) != self._six[d]:
                raise ValueError(f"cache entry for d={d} disagrees with recomputation")

    def __len__(self):
        return len(self._six)

    def __contains__(self, d):
        return d in self._six

    def six_h1(self, d: int) -> int:
        v = self._six.get(d)
        if v is None:
            v = hurwitz6(d)
            self.put(d, v)
        return v

    def hurwitz_H1(self, d: int) -> Fraction:
        return Fraction(self.six_h1(d), 6)

    def gauss_h(self, d: int) -> int:
        h = self._h.get(d)
        if h is None:
            h = gauss_h(d)
            self.put(d, self.six_h1(d) if is_discriminant(d) else 0, h)
        return h

    def six_h1_many(self, ds) -> np.ndarray:
        ds = [int(x) for x in ds]
        missing = sorted({d for d in ds if d not in self._six})
        if missing:
            vals = hurwitz6_many(missing)
            with self._lock:
                for d, v in zip(missing, vals):
                    self._six.setdefault(d, int(v))
                    self._h.setdefault(d, None)
        return np.array([self._six[d] for d in ds], dtype=np.int64)

    def put(self, d: int, six: int, h: int | None = None):
        with self._lock:
            self._six[d] = six
            if h is not None or d not in self._h:
                self._h[d] = h

    def save(self):
        """Append records not yet on disk and rewrite the footer."""
        with self._lock:
            body = []
            if self.path.exists():
                body = [ln for ln in self.path.read_text().splitlines() if ln and not ln.startswith("#")]
            # d -> whether h is on disk; a later record supersedes an earlier "-"
            on_disk = {}
            for ln in body:
                d, h, _ = ln.split()
                on_disk[int(d)] = on_disk.get(int(d), False) or h != "-"
            for d in self._six:
                h = self._h.get(d)
                if d not in on_disk or (h is not None and not on_disk[d]):
                    body.append(f"{d} {'-' if h is None else h} {self._six[d]}")
            tmp = self.path.with_suffix(self.path.suffix + ".tmp")
            tmp.parent.mkdir(parents=True, exist_ok=True)
            tmp.write_text("\n".join(body + [f"# sha256 {_digest(body)} {len(body)}"]) + "\n")
            os.replace(tmp, self.path)


def _digest(lines) -> str:
    return hashlib.sha256("\n".join(lines).encode()).hexdigest()
