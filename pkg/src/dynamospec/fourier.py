"""Alpha profiles, their Fourier content on [0, 1] and resonance factors.

A perturbation is expanded as

    phi(r) = a0/2 + sum_k [a_k cos(2 pi k r) + b_k sin(2 pi k r)]

with ``a0`` equal to *twice* the mean of ``phi``.  Keep that factor in mind
when reading ``a0`` off a profile file, which stores the mean instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy.interpolate import CubicSpline

from .quadrature import integrate, rule_for_modes

__all__ = ["FourierSpectrum", "AlphaProfile", "fourier_coefficients", "q_factor", "as_perturbation"]


@dataclass(frozen=True)
class FourierSpectrum:
    a0: float = 0.0
    harmonics: tuple[tuple[int, float, float], ...] = ()

    def __post_init__(self):
        hs = tuple(sorted((int(k), float(a), float(b)) for k, a, b in self.harmonics))
        ks = [k for k, _, _ in hs]
        if any(k < 1 for k in ks):
            raise ValueError("harmonic numbers must be positive")
        if len(set(ks)) != len(ks):
            raise ValueError(f"duplicate harmonic numbers in {ks}")
        object.__setattr__(self, "harmonics", hs)
        object.__setattr__(self, "a0", float(self.a0))

    @classmethod
    def from_arrays(cls, a0: float, a: Iterable[float], b: Iterable[float]) -> "FourierSpectrum":
        """Build from dense ``a_1..a_K`` and ``b_1..b_K``; zero pairs are dropped."""
        hs = [(k, ak, bk) for k, (ak, bk) in enumerate(zip(a, b), start=1) if ak != 0.0 or bk != 0.0]
        return cls(a0, tuple(hs))

    @property
    def max_k(self) -> int:
        return max((k for k, _, _ in self.harmonics), default=0)

    def a(self, k: int) -> float:
        for kk, ak, _ in self.harmonics:
            if kk == k:
                return ak
        return 0.0

    def b(self, k: int) -> float:
        for kk, _, bk in self.harmonics:
            if kk == k:
                return bk
        return 0.0

    def dense(self, K: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        K = self.max_k if K is None else K
        a, b = np.zeros(K), np.zeros(K)
        for k, ak, bk in self.harmonics:
            if k <= K:
                a[k - 1], b[k - 1] = ak, bk
        return a, b

    def scaled(self, c: float) -> "FourierSpectrum":
        return FourierSpectrum(c * self.a0, tuple((k, c * a, c * b) for k, a, b in self.harmonics))

    def __add__(self, other: "FourierSpectrum") -> "FourierSpectrum":
        K = max(self.max_k, other.max_k)
        a1, b1 = self.dense(K)
        a2, b2 = other.dense(K)
        return FourierSpectrum.from_arrays(self.a0 + other.a0, a1 + a2, b1 + b2)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.full_like(r, 0.5 * self.a0)
        for k, ak, bk in self.harmonics:
            w = 2 * math.pi * k
            out = out + ak * np.cos(w * r) + bk * np.sin(w * r)
        return out

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for k, ak, bk in self.harmonics:
            w = 2 * math.pi * k
            out = out + w * (bk * np.cos(w * r) - ak * np.sin(w * r))
        return out


@dataclass(frozen=True)
class AlphaProfile:
    """``alpha(r) = alpha0 + epsilon_scale * phi(r)``.

    ``phi`` comes from ``fourier`` or, when ``samples`` is given, from a
    natural cubic spline through values on a uniform grid that includes
    both endpoints (``interpolate=False`` uses piecewise-linear instead).
    """

    alpha0: float = 0.0
    epsilon_scale: float = 1.0
    fourier: FourierSpectrum | None = None
    samples: tuple[float, ...] | None = None
    interpolate: bool = True
    _spline: Callable | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.samples is not None:
            if self.fourier is not None:
                raise ValueError("give either fourier harmonics or samples, not both")
            vals = np.asarray(self.samples, dtype=float)
            if vals.ndim != 1 or len(vals) < 4:
                raise ValueError("samples need at least 4 values on a uniform grid")
            if not np.all(np.isfinite(vals)):
                raise ValueError("samples must be finite")
            object.__setattr__(self, "samples", tuple(float(v) for v in vals))
            grid = np.linspace(0.0, 1.0, len(vals))
            if self.interpolate:
                spline = CubicSpline(grid, vals, bc_type="natural")
            else:
                spline = _Linear(grid, vals)
            object.__setattr__(self, "_spline", spline)
        elif self.fourier is None:
            object.__setattr__(self, "fourier", FourierSpectrum())

    @property
    def max_mode(self) -> int:
        """Highest oscillation count of ``phi``, in units of ``pi r``."""
        if self.samples is not None:
            return len(self.samples)
        return 2 * self.fourier.max_k

    def phi(self, r):
        if self._spline is not None:
            return np.asarray(self._spline(np.asarray(r, float)), dtype=float)
        return self.fourier(r)

    def dphi(self, r):
        if self._spline is not None:
            return np.asarray(self._spline(np.asarray(r, float), 1), dtype=float)
        return self.fourier.derivative(r)

    def delta(self, r):
        """``Delta alpha(r) = epsilon_scale * phi(r)``."""
        return self.epsilon_scale * self.phi(r)

    def __call__(self, r):
        return self.alpha0 + self.delta(r)

    def spectrum(self, K: int = 16) -> FourierSpectrum:
        """Fourier content of ``phi``; exact for harmonic profiles."""
        if self.samples is None:
            return self.fourier
        return fourier_coefficients(self.phi, K, max_mode=self.max_mode)

    def delta_spectrum(self, K: int = 16) -> FourierSpectrum:
        return self.spectrum(K).scaled(self.epsilon_scale)

    def with_alpha0(self, alpha0: float) -> "AlphaProfile":
        return AlphaProfile(alpha0, self.epsilon_scale, self.fourier, self.samples, self.interpolate)

    def with_scale(self, epsilon_scale: float) -> "AlphaProfile":
        return AlphaProfile(self.alpha0, epsilon_scale, self.fourier, self.samples, self.interpolate)


class _Linear:
    def __init__(self, x, y):
        self.x, self.y = x, y
        self.slope = np.diff(y) / np.diff(x)

    def __call__(self, r, nu=0):
        if nu == 0:
            return np.interp(r, self.x, self.y)
        i = np.clip(np.searchsorted(self.x, r, side="right") - 1, 0, len(self.slope) - 1)
        return self.slope[i]


def as_perturbation(phi) -> tuple[Callable, int]:
    """Normalize a perturbation argument to ``(callable, max_mode)``.

    Accepts an :class:`AlphaProfile` (its unscaled ``phi`` is used), a
    :class:`FourierSpectrum`, or a plain vectorized callable (assumed
    smooth, mode count 0).
    """
    if isinstance(phi, AlphaProfile):
        return phi.phi, phi.max_mode
    if isinstance(phi, FourierSpectrum):
        return phi, 2 * phi.max_k
    if callable(phi):
        return phi, 0
    raise TypeError(f"cannot use {type(phi).__name__} as a perturbation")


def fourier_coefficients(phi, K: int, max_mode: int | None = None) -> FourierSpectrum:
    """``a0, a_1..a_K, b_1..b_K`` of ``phi`` on [0, 1] by quadrature."""
    if not 1 <= K <= 64:
        raise ValueError("K must lie in 1..64")
    f, mode = as_perturbation(phi)
    mode = mode if max_mode is None else max_mode
    rule = rule_for_modes(max(2 * K, mode))
    r = rule.nodes
    fr = np.asarray(f(r), dtype=float)
    a0 = 2.0 * integrate(lambda _: fr, rule)
    ks = np.arange(1, K + 1)
    arg = 2 * math.pi * np.outer(ks, r)
    a = 2.0 * (np.cos(arg) * fr) @ rule.weights
    b = 2.0 * (np.sin(arg) * fr) @ rule.weights
    return FourierSpectrum.from_arrays(a0, a, b)


def q_factor(spec: FourierSpectrum, j: int) -> float:
    """Resonance factor ``Q_j``: the part of the spectrum seen by ``cos(j pi r)``.

    Even ``j`` picks the single cosine harmonic ``|j|/2``; odd ``j`` sums
    all sine harmonics with weights ``(8/pi) k / (4k^2 - j^2)``.
    """
    j = int(j)
    if j == 0:
        raise ValueError("Q_j is only defined for j != 0")
    if j % 2 == 0:
        return spec.a(abs(j) // 2)
    return 8.0 / math.pi * sum(b * k / (4 * k * k - j * j) for k, _, b in spec.harmonics)
