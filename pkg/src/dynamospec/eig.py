"""Dense real nonsymmetric eigenvalues and branch tracking over alpha0 sweeps.

``eigenvalues`` runs the textbook pipeline: diagonal balancing, Householder
reduction to upper Hessenberg form, then Francis implicit double-shift QR
with 1x1/2x2 deflation.  Complex pairs come out of 2x2 blocks as exact
conjugates.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.optimize import linear_sum_assignment

from .fourier import AlphaProfile
from .galerkin import GalerkinBasis, perturbation_block

__all__ = [
    "Spectrum",
    "EigenvalueError",
    "balance",
    "hessenberg",
    "hqr",
    "eigenvalues",
    "SweepTable",
    "SweepError",
    "sweep",
]

_EPS = np.finfo(float).eps


class EigenvalueError(ArithmeticError):
    """QR iteration hit its cap; ``partial`` holds the deflated eigenvalues."""

    def __init__(self, message: str, partial: np.ndarray):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    iterations: int
    balanced_norm: float = field(default=0.0)

    def backward_errors(self, A) -> np.ndarray:
        """``sigma_min(A - lambda I) / ||A||`` for every eigenvalue."""
        A = np.asarray(A, dtype=float)
        scale = max(np.linalg.norm(A, 2), 1e-300)
        eye = np.eye(len(A))
        return np.array([np.linalg.svd(A - lam * eye, compute_uv=False)[-1] / scale
                         for lam in self.eigenvalues])


def balance(a: np.ndarray) -> np.ndarray:
    """Similarity-scale rows and columns by powers of two to even out norms."""
    a = np.array(a, dtype=float)
    n = len(a)
    radix, sqrdx = 2.0, 4.0
    done = False
    while not done:
        done = True
        for i in range(n):
            c = np.sum(np.abs(a[:, i])) - abs(a[i, i])
            r = np.sum(np.abs(a[i, :])) - abs(a[i, i])
            if c == 0.0 or r == 0.0:
                continue
            g, f, s = r / radix, 1.0, c + r
            while c < g:
                f *= radix
                c *= sqrdx
            g = r * radix
            while c > g:
                f /= radix
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                a[i, :] /= f
                a[:, i] *= f
    return a


def hessenberg(a: np.ndarray) -> np.ndarray:
    """Upper Hessenberg form by Householder similarity transforms."""
    h = np.array(a, dtype=float)
    n = len(h)
    for k in range(n - 2):
        x = h[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        v = x.copy()
        v[0] += math.copysign(alpha, x[0])
        v /= np.linalg.norm(v)
        h[k + 1:, k:] -= 2.0 * np.outer(v, v @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0
    return h


def hqr(h: np.ndarray, max_iter: int | None = None) -> tuple[np.ndarray, int]:
    """Eigenvalues of an upper Hessenberg matrix (destroys a copy only).

    Francis double-shift QR with exceptional shifts after 10 and 20
    stagnant iterations.  Returns ``(eigenvalues, total_iterations)``.
    """
    a = np.array(h, dtype=float)
    n = len(a)
    wr, wi = np.zeros(n), np.zeros(n)
    max_iter = 40 * n if max_iter is None else max_iter
    anorm = float(np.sum(np.abs(np.triu(a, -1))))
    nn = n - 1
    t = 0.0
    total = 0
    while nn >= 0:
        its = 0
        while True:
            l = nn
            while l >= 1:
                s = abs(a[l - 1, l - 1]) + abs(a[l, l])
                if s == 0.0:
                    s = anorm
                if abs(a[l, l - 1]) <= _EPS * s:
                    a[l, l - 1] = 0.0
                    break
                l -= 1
            x = a[nn, nn]
            if l == nn:
                wr[nn], wi[nn] = x + t, 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + math.copysign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1], wi[nn] = -z, z
                nn -= 2
                break
            if total >= max_iter:
                done = np.arange(n) > nn
                raise EigenvalueError(
                    f"QR iteration cap {max_iter} reached with {nn + 1} eigenvalues left",
                    (wr + 1j * wi)[done],
                )
            if its in (10, 20):
                t += x
                a[np.arange(nn + 1), np.arange(nn + 1)] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                x = y = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            total += 1
            m = nn - 2
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p, q, r = p / s, q / s, r / s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u <= _EPS * v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0
            for k in range(m, nn):
                if k != m:
                    p, q = a[k, k - 1], a[k + 1, k - 1]
                    r = a[k + 2, k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p, q, r = p / x, q / x, r / x
                s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x, y, z = p / s, q / s, r / s
                q, r = q / p, r / p
                cols = slice(k, nn + 1)
                row = a[k, cols] + q * a[k + 1, cols]
                if k != nn - 1:
                    row = row + r * a[k + 2, cols]
                    a[k + 2, cols] -= row * z
                a[k + 1, cols] -= row * y
                a[k, cols] -= row * x
                rows = slice(l, min(nn, k + 3) + 1)
                col = x * a[rows, k] + y * a[rows, k + 1]
                if k != nn - 1:
                    col = col + z * a[rows, k + 2]
                    a[rows, k + 2] -= col * r
                a[rows, k + 1] -= col * q
                a[rows, k] -= col
    return wr + 1j * wi, total


def _order(values: np.ndarray) -> np.ndarray:
    return values[np.lexsort((values.imag, values.real))]


def eigenvalues(A, max_iter: int | None = None) -> Spectrum:
    """All eigenvalues of a real square matrix, sorted by (Re, Im)."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"need a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if len(A) == 1:
        return Spectrum(np.array([complex(A[0, 0])]), 0, abs(A[0, 0]))
    b = balance(A)
    vals, its = hqr(hessenberg(b), max_iter)
    return Spectrum(_order(vals), its, float(np.linalg.norm(b, 1)))


@dataclass
class SweepTable:
    """Eigenvalues along an alpha0 grid with continuity-matched labels.

    ``labels[g, i]`` is the basis index whose unperturbed branch the
    eigenvalue ``values[g, i]`` continues.
    """

    alpha0: np.ndarray
    labels: np.ndarray
    values: np.ndarray
    l: int = 0
    basis: tuple[int, ...] = ()

    def rows(self) -> Iterable[tuple[float, int, float, float]]:
        for g, a0 in enumerate(self.alpha0):
            order = np.argsort(-self.labels[g], kind="stable")
            for i in order:
                lam = self.values[g, i]
                yield float(a0), int(self.labels[g, i]), float(lam.real), float(lam.imag)

    def complex_mask(self, rtol: float = 1e-9) -> np.ndarray:
        scale = np.maximum(np.abs(self.values), 1.0)
        return np.abs(self.values.imag) > rtol * scale


class SweepError(ArithmeticError):
    def __init__(self, alpha0: float, cause: Exception):
        super().__init__(f"eigensolver failed at alpha0={alpha0!r}: {cause}")
        self.alpha0 = alpha0
        self.cause = cause


def _match(prev: np.ndarray, cur: np.ndarray) -> np.ndarray:
    cost = np.abs(prev[:, None] - cur[None, :])
    _, cols = linear_sum_assignment(cost)
    return cols


def _min_gap(vals: np.ndarray) -> float:
    if len(vals) < 2:
        return math.inf
    d = np.abs(vals[:, None] - vals[None, :])
    d[np.diag_indices_from(d)] = math.inf
    return float(d.min())


def sweep(l: int, basis: GalerkinBasis, profile: AlphaProfile, alpha0_grid,
          rule=None) -> SweepTable:
    """Galerkin spectra over ``alpha0_grid`` for ``alpha0 + profile.delta(r)``.

    The perturbation block is assembled once; only the diagonal moves with
    ``alpha0``.  Labels start from the unperturbed branches at the first
    grid point.  At each later point every label is advanced along its
    unperturbed slope and matched to the new eigenvalues by optimal
    assignment.
    """
    grid = np.asarray(alpha0_grid, dtype=float)
    if grid.ndim != 1:
        raise ValueError("alpha0 grid must be one-dimensional")
    if len(grid) > 1 and not (np.all(np.diff(grid) > 0) or np.all(np.diff(grid) < 0)):
        raise ValueError("alpha0 grid must be strictly monotone")
    N = basis.N
    eta = basis.eta
    off = eta[:, None] * perturbation_block(l, basis, profile, rule)
    values = np.empty((len(grid), N), dtype=complex)
    labels = np.empty((len(grid), N), dtype=int)
    idx = np.array(basis.indices)
    # d lambda / d alpha0 of each unperturbed branch, used to predict where
    # a label moves between grid points
    slope = dict(zip(basis.indices, eta * np.sqrt(-basis.branch_values(0.0))))
    prev = None
    warned = False
    for g, a0 in enumerate(grid):
        A = np.diag(basis.branch_values(a0)) + off
        try:
            vals = eigenvalues(A).eigenvalues
        except (EigenvalueError, ValueError) as exc:
            raise SweepError(float(a0), exc) from exc
        if prev is None:
            vals = vals[_match(basis.branch_values(a0).astype(complex), vals)]
            labels[g] = idx
        else:
            labels[g] = labels[g - 1]
            step = np.array([slope[int(n)] for n in labels[g]]) * (a0 - grid[g - 1])
            predicted = prev + step
            vals = vals[_match(predicted, vals)]
            miss = np.max(np.abs(vals - predicted))
            if not warned and miss > 0.5 * _min_gap(predicted) and miss > 1e-9 * np.max(np.abs(vals)):
                warnings.warn(
                    f"alpha0 step near {a0:.6g} moves eigenvalues by more than half the "
                    "minimal gap; branch labels may jump",
                    RuntimeWarning, stacklevel=2,
                )
                warned = True
        values[g] = vals
        prev = vals
    return SweepTable(grid, labels, values, l, tuple(basis.indices))
