"""Spherical Bessel functions, their zeros and the Riccati-Bessel eigenbasis.

The radial operator ``-d^2/dr^2 + l(l+1)/r^2`` on (0, 1) with Dirichlet
conditions has eigenfunctions ``u_n(r) ~ r j_l(k_n r)`` where ``k_n`` is the
n-th positive zero of the spherical Bessel function ``j_l`` (equivalently of
``J_{l+1/2}``) and ``rho_n = k_n**2``.

Sign gauge: every eigenfunction returned here is positive just to the right
of the origin.  Off-diagonal matrix elements built from these functions
depend on that choice; eigenvalues do not.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SectorConfig",
    "BesselRoot",
    "RadialEigenfunction",
    "BesselRootError",
    "spherical_bessel_j",
    "bessel_zero",
    "bessel_zeros",
    "radial_eigenfunction",
    "eigenfunction_u",
    "eigenfunction_du",
    "eigenfunction_d2u",
]

_ROOT_FTOL = 1e-12
_MAX_NEWTON = 100


class BesselRootError(RuntimeError):
    """Root iteration failed to converge inside its bracket."""

    def __init__(self, l: int, n: int, bracket: tuple[float, float]):
        self.l, self.n, self.bracket = l, n, bracket
        super().__init__(
            f"zero #{n} of j_{l} did not converge in bracket "
            f"[{bracket[0]!r}, {bracket[1]!r}]"
        )


@dataclass(frozen=True)
class SectorConfig:
    """Spherical-harmonic degree of the decoupled radial problem."""

    l: int = 0

    def __post_init__(self):
        if int(self.l) != self.l or self.l < 0:
            raise ValueError(f"l must be a non-negative integer, got {self.l!r}")


@dataclass(frozen=True)
class BesselRoot:
    l: int
    n: int
    sqrt_rho: float

    @property
    def rho(self) -> float:
        return self.sqrt_rho * self.sqrt_rho


@dataclass(frozen=True)
class RadialEigenfunction:
    """Normalized ``u_n(r) = normalization * r * j_l(sqrt_rho * r)``.

    ``normalization`` is the coefficient in front of ``r j_l``; it is
    always positive, which realizes the canonical sign ``u_n(0+) > 0``.
    """

    l: int
    n: int
    sqrt_rho: float
    normalization: float
    sign_convention: str = "positive-at-origin"

    def __call__(self, r):
        return self.normalization * r * spherical_bessel_j(self.l, self.sqrt_rho * np.asarray(r, float))

    def derivative(self, r):
        r = np.asarray(r, float)
        k, l = self.sqrt_rho, self.l
        x = k * r
        # d/dr [r j_l(kr)] = (l+1) j_l(kr) - kr j_{l+1}(kr)
        return self.normalization * ((l + 1) * spherical_bessel_j(l, x) - x * spherical_bessel_j(l + 1, x))

    def second_derivative(self, r):
        r = np.asarray(r, float)
        k, l = self.sqrt_rho, self.l
        x = k * r
        # d/dr [(l+1) j_l(kr) - kr j_{l+1}(kr)], expanded with
        # j_l' = l/x j_l - j_{l+1} and j_{l+1}' = j_l - (l+2)/x j_{l+1}
        jl = spherical_bessel_j(l, x)
        jl1 = spherical_bessel_j(l + 1, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            djl = np.where(x > 0, l * jl / np.where(x > 0, x, 1.0) - jl1, 1.0 / 3.0 if l == 1 else 0.0)
            djl1 = np.where(x > 0, jl - (l + 2) * jl1 / np.where(x > 0, x, 1.0), 1.0 / 3.0 if l == 0 else 0.0)
        return self.normalization * k * ((l + 1) * djl - jl1 - x * djl1)


def _series_j(l: int, x: np.ndarray) -> np.ndarray:
    # x^l/(2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
    pref = 1.0
    for i in range(1, 2 * l + 2, 2):
        pref /= i
    term = np.ones_like(x)
    total = np.ones_like(x)
    h = -0.5 * x * x
    for k in range(1, 12):
        term = term * h / (k * (2 * l + 2 * k + 1))
        total = total + term
    return pref * x**l * total


def _upward(l: int, x: np.ndarray) -> np.ndarray:
    s, c = np.sin(x), np.cos(x)
    j0 = s / x
    if l == 0:
        return j0
    j1 = (s / x - c) / x
    for k in range(1, l):
        j0, j1 = j1, (2 * k + 1) / x * j1 - j0
    return j1


def _downward(l: int, x: np.ndarray) -> np.ndarray:
    # Miller's algorithm, normalized against whichever of j0, j1 is larger.
    start = l + int(math.sqrt(40.0 * (l + float(np.max(x))))) + 16
    jp1 = np.zeros_like(x)
    jk = np.full_like(x, 1e-300)
    out = np.zeros_like(x)
    for k in range(start, 0, -1):
        jp1, jk = jk, (2 * k + 1) / x * jk - jp1
        if k - 1 == l:
            out = jk.copy()
        big = np.abs(jk) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            jk, jp1, out = jk * scale, jp1 * scale, out * scale
    s, c = np.sin(x), np.cos(x)
    t0 = s / x
    t1 = (s / x - c) / x
    norm = np.where(np.abs(t0) >= np.abs(t1), t0 / jk, t1 / jp1)
    return out * norm


def spherical_bessel_j(l: int, x):
    """Spherical Bessel function ``j_l(x)`` for real ``x >= 0``.

    Upward recurrence from the trigonometric seeds where ``x > l``,
    downward (Miller) recurrence below that, and a power series near the
    origin.  Accepts scalars or arrays.
    """
    if l < 0:
        raise ValueError("l must be non-negative")
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    out = np.empty_like(xa)
    small = np.abs(xa) < 1e-3 * (l + 1) ** 0.5
    up = ~small & (xa >= l)
    down = ~small & ~up
    if np.any(small):
        out[small] = _series_j(l, xa[small])
    if np.any(up):
        out[up] = _upward(l, xa[up])
    if np.any(down):
        out[down] = _downward(l, xa[down])
    return float(out[0]) if scalar else out


def _dj(l: int, x: float) -> float:
    return l / x * spherical_bessel_j(l, x) - spherical_bessel_j(l + 1, x)


def _mcmahon(l: int, n: int) -> float:
    nu = l + 0.5
    mu = 4.0 * nu * nu
    b = (n + 0.5 * nu - 0.25) * math.pi
    return b - (mu - 1) / (8 * b) - 4 * (mu - 1) * (7 * mu - 31) / (3 * (8 * b) ** 3)


def _refine(l: int, n: int, a: float, b: float, fa: float, guess: float) -> float:
    x = guess if a < guess < b else 0.5 * (a + b)
    for _ in range(_MAX_NEWTON):
        fx = spherical_bessel_j(l, x)
        if abs(fx) <= _ROOT_FTOL or b - a <= 4e-16 * b:
            return x
        if (fx > 0) == (fa > 0):
            a, fa = x, fx
        else:
            b = x
        step = fx / _dj(l, x)
        xn = x - step
        if not (a < xn < b):
            xn = 0.5 * (a + b)
        elif abs(step) <= 1e-15 * x:
            return xn
        x = xn
    raise BesselRootError(l, n, (a, b))


_zero_cache: dict[int, list[float]] = {}
_cache_lock = threading.Lock()


def bessel_zeros(l: int, count: int) -> np.ndarray:
    """First ``count`` positive zeros of ``j_l``, ascending."""
    if l < 0:
        raise ValueError("l must be non-negative")
    if count < 1:
        return np.zeros(0)
    cached = _zero_cache.get(l, [])
    if len(cached) >= count:
        return np.array(cached[:count])
    zeros = list(cached)
    # Zeros of J_nu, nu >= 1/2, are spaced by at least pi, so a pi/2 scan
    # brackets them one at a time.  None lie below nu.
    step = 0.5 * math.pi
    a = zeros[-1] + 0.25 * math.pi if zeros else max(l + 0.5, 1e-3)
    fa = spherical_bessel_j(l, a)
    while len(zeros) < count:
        b = a + step
        fb = spherical_bessel_j(l, b)
        if fb == 0.0:
            zeros.append(b)
            a = b + 0.25 * math.pi
            fa = spherical_bessel_j(l, a)
            continue
        if (fa > 0) != (fb > 0):
            k = len(zeros) + 1
            zeros.append(_refine(l, k, a, b, fa, _mcmahon(l, k)))
        a, fa = b, fb
    with _cache_lock:
        if len(_zero_cache.get(l, [])) < len(zeros):
            _zero_cache[l] = zeros
    return np.array(zeros[:count])


def bessel_zero(l: int, n: int) -> BesselRoot:
    """The n-th positive zero of ``J_{l+1/2}``, as a :class:`BesselRoot`."""
    if n < 1:
        raise ValueError(f"root ordinal must be >= 1, got {n}")
    return BesselRoot(l, n, float(bessel_zeros(l, n)[n - 1]))


def radial_eigenfunction(l: int, n: int) -> RadialEigenfunction:
    """Normalized Dirichlet eigenfunction of index ``n`` (``n >= 1``)."""
    k = bessel_zero(l, n).sqrt_rho
    # int_0^1 (r j_l(kr))^2 dr = j_{l+1}(k)^2 / 2 at a zero of j_l
    norm = math.sqrt(2.0) / abs(spherical_bessel_j(l + 1, k))
    return RadialEigenfunction(l, n, k, norm)


def eigenfunction_u(l: int, n: int, r):
    return radial_eigenfunction(l, n)(r)


def eigenfunction_du(l: int, n: int, r):
    return radial_eigenfunction(l, n).derivative(r)


def eigenfunction_d2u(l: int, n: int, r):
    return radial_eigenfunction(l, n).second_derivative(r)
