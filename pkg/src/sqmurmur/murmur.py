"""Window averages of P a_f(P^2)-type traces over squarefree levels, the predicted
murmuration density, and main-term checks for the class-number window sums.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import classnum
from .arith import (
    ZETA2,
    EulerProductConfig,
    constant_A,
    constant_B,
    constant_C,
    factorize,
    is_prime,
    newform_density_product,
    norm_constant,
    sieve_squarefree,
)
from .trace import dim_s2_new_squarefree, trace_rhs_many


class RSumMode(enum.Enum):
    HALF_RANGE = "half_range"  # r <= sqrt(y)
    FULL_SUPPORT = "full_support"  # r < 2 sqrt(y)


@dataclass(frozen=True)
class DensityConfig:
    euler: EulerProductConfig = field(default_factory=EulerProductConfig)
    r_sum_mode: RSumMode = RSumMode.FULL_SUPPORT


@dataclass(frozen=True)
class Window:
    X: int
    Y: int
    delta: float | None = None
    delta2: float | None = None

    def __post_init__(self):
        if not 0 < self.Y < self.X:
            raise ValueError(f"need 0 < Y < X, got X={self.X}, Y={self.Y}")
        if self.delta is not None and self.delta2 is not None:
            if not 0 < self.delta2 < self.delta:
                raise ValueError("need 0 < delta2 < delta")

    @classmethod
    def from_regime(cls, X: int, delta: float, delta2: float) -> "Window":
        return cls(X, round(X ** (1 - delta)), delta, delta2)

    @property
    def hi(self) -> int:
        return self.X + self.Y

    @property
    def delta_prime(self) -> float | None:
        if self.delta is None or self.delta2 is None:
            return None
        return self.delta2 - self.delta / 2

    def check_prime(self, P: int):
        """P^2 <= X^(1 + delta2) when the window carries a regime."""
        if self.delta2 is not None and P * P > self.X ** (1 + self.delta2):
            raise ValueError(f"P={P} violates P^2 <= X^(1+delta2) for X={self.X}")


@dataclass(frozen=True)
class MurmurationPoint:
    X: int
    Y: int
    P: int
    y: float
    empirical: float
    predicted: float
    mode: RSumMode = RSumMode.FULL_SUPPORT
    excluded_levels: int = 0
    numerator: int = 0
    denominator: float = 0

    @property
    def residual(self) -> float:
        return self.empirical - self.predicted


# --- predicted density -----------------------------------------------------------


@lru_cache(maxsize=8)
def _constants(prime_bound: int):
    cfg = EulerProductConfig(prime_bound)
    return constant_A(cfg).value, constant_B(cfg).value, norm_constant(cfg).value


def density_r_values(y: float, mode: RSumMode) -> list[int]:
    out = []
    r = 1
    while 4 * y - r * r > 0:
        if mode is RSumMode.FULL_SUPPORT or r * r <= y:
            out.append(r)
        r += 1
    return out


def predicted_density(y: float, cfg: DensityConfig = DensityConfig()) -> float:
    """norm * (A sqrt(y) + B sum_r C(r) sqrt(4y - r^2) - pi y)."""
    if y <= 0:
        raise ValueError("y must be positive")
    A, B, norm = _constants(cfg.euler.prime_bound)
    rsum = math.fsum(constant_C(r) * math.sqrt(4 * y - r * r) for r in density_r_values(y, cfg.r_sum_mode))
    return norm * (A * math.sqrt(y) + B * rsum - math.pi * y)


# --- empirical averages ------------------------------------------------------------


def nearest_prime(t: float) -> int:
    """Odd prime nearest to t; ties go to the smaller prime."""
    if t < 3:
        return 3
    lo = math.floor(t)
    hi = lo + 1
    while lo >= 3 and not (lo % 2 and is_prime(lo)):
        lo -= 1
    while not (hi % 2 and is_prime(hi)):
        hi += 1
    if lo < 3:
        return hi
    return lo if t - lo <= hi - t else hi


def window_levels(window: Window, P: int) -> tuple[np.ndarray, int]:
    """Squarefree N in the window with P not dividing N, and the count of excluded ones."""
    sq = sieve_squarefree(window.X, window.hi).values()
    keep = sq[sq % P != 0]
    return keep, int(sq.size - keep.size)


def asymptotic_newform_count(window: Window, cfg: EulerProductConfig = EulerProductConfig()) -> float:
    """XY/(12 zeta(2)) prod_p (1 - 1/(p(p+1)))."""
    return window.X * window.Y / (12 * ZETA2) * newform_density_product(cfg).value


def empirical_average(
    window: Window,
    P: int,
    cfg: DensityConfig = DensityConfig(),
    cache=None,
    asymptotic: bool = False,
    threads: int | None = None,
) -> MurmurationPoint:
    """Exact sum of traces over the window divided by the new-subspace dimension count.

    Levels divisible by P are left out of both sums and counted in excluded_levels.
    """
    if P == 2 or not is_prime(P):
        raise ValueError("P must be an odd prime")
    window.check_prime(P)
    Ns, excluded = window_levels(window, P)
    traces = trace_rhs_many(Ns, P, 2, cache=cache, threads=threads)
    num = 0
    for t in traces:
        if t.denominator != 1:
            raise ArithmeticError(f"non-integral trace {t} at P={P}")
        num += int(t)
    if asymptotic:
        den = asymptotic_newform_count(window, cfg.euler)
    else:
        den = sum(dim_s2_new_squarefree(int(N)) for N in Ns)
    if den == 0:
        raise ZeroDivisionError("window contains no newforms")
    y = P * P / window.X
    return MurmurationPoint(
        X=window.X,
        Y=window.Y,
        P=P,
        y=y,
        empirical=num / den,
        predicted=predicted_density(y, cfg),
        mode=cfg.r_sum_mode,
        excluded_levels=excluded,
        numerator=num,
        denominator=den,
    )


def sweep(x_grid, y_grid, regime=(0.25, 0.2), cfg: DensityConfig = DensityConfig(), cache=None, threads=None):
    """One MurmurationPoint per (X, y) cell, X-major."""
    delta, delta2 = regime
    out = []
    for X in x_grid:
        w = Window.from_regime(int(X), delta, delta2)
        for y in y_grid:
            P = nearest_prime(math.sqrt(y * X))
            out.append(empirical_average(w, P, cfg, cache=cache, threads=threads))
    return out


# --- main-term checks ----------------------------------------------------------


class MainTermCheck(NamedTuple):
    lhs: float
    main: float

    @property
    def ratio(self) -> float:
        return self.lhs / self.main


def _level_factorizations(Ns):
    return [factorize(int(N)) for N in Ns]


def h_average_parts(window: Window, P: int, cfg: EulerProductConfig = EulerProductConfig()) -> dict:
    """The four normalized window averages zeta(2) pi/(XY) sum h(-D)/2 and their main terms.

    Keys: "P2N", "N", "4P2N", "4N"; values are (average, main term).
    """
    Ns, _ = window_levels(window, P)
    sums = {"P2N": 0, "N": 0, "4P2N": 0, "4N": 0}
    for N, fac in zip(Ns, _level_factorizations(Ns)):
        N = int(N)
        withP = dict(fac)
        withP[P] = 2
        with2 = dict(fac)
        with2[2] = with2.get(2, 0) + 2
        with2P = dict(withP)
        with2P[2] = with2P.get(2, 0) + 2
        sums["N"] += classnum.gauss_h(N, fac)
        sums["P2N"] += classnum.gauss_h(P * P * N, withP)
        sums["4N"] += classnum.gauss_h(4 * N, with2)
        sums["4P2N"] += classnum.gauss_h(4 * P * P * N, with2P)
    A = constant_A(cfg).value
    scale = ZETA2 * math.pi / (window.X * window.Y) / 2
    rx = math.sqrt(window.X)
    mains = {
        "P2N": 2 * A * P / (11 * rx),
        "N": 2 * A / (11 * rx),
        "4P2N": 9 * A * P / (11 * rx),
        "4N": 9 * A / (11 * rx),
    }
    return {k: (scale * sums[k], mains[k]) for k in sums}


def h_average_check(window: Window, P: int, cfg: EulerProductConfig = EulerProductConfig()) -> MainTermCheck:
    """zeta(2) pi/(XY) sum (h(-P^2N) + h(-N) + h(-4P^2N) + h(-4N))/2 against A P / sqrt(X)."""
    parts = h_average_parts(window, P, cfg)
    lhs = math.fsum(v[0] for v in parts.values())
    return MainTermCheck(lhs, constant_A(cfg).value * P / math.sqrt(window.X))


def h1_sum_check(window: Window, P: int, r: int, cfg: EulerProductConfig = EulerProductConfig(), cache=None):
    """sum H_1(r^2N^2 - 4P^2N) over the window against Y sqrt(4P^2X - r^2X^2) B C(r)/(zeta(2) pi)."""
    if 4 * P * P <= r * r * window.hi:
        raise ValueError("need 4P^2 > r^2 (X+Y)")
    Ns, _ = window_levels(window, P)
    ds = [int(N) * (4 * P * P - r * r * int(N)) for N in Ns]
    six = cache.six_h1_many(ds) if cache is not None else classnum.hurwitz6_many(ds)
    lhs = Fraction(int(np.sum(six)), 6)
    X = window.X
    main = window.Y * math.sqrt(4 * P * P * X - r * r * X * X) / (ZETA2 * math.pi)
    main *= constant_B(cfg).value * constant_C(r)
    return MainTermCheck(float(lhs), main)
