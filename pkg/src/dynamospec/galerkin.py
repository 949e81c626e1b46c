"""Galerkin approximation of the dynamo operator over a Krein subspace.

Over the states ``v_{n_1}, ..., v_{n_N}`` (``n_1 > ... > n_N``) the
operator becomes the real matrix ``A = eta^{-1} A_tilde`` where
``A_tilde[i, j] = [A v_{n_i}, v_{n_j}]`` is symmetric and
``eta = diag(sign(n_i))`` is the Pontryagin metric.  Consequently
``A == eta @ A.T @ eta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fourier import AlphaProfile, FourierSpectrum, q_factor
from .mesh import branch_eigenvalue, krein_sign
from .quadrature import QuadratureRule
from .unfolding import element_matrix

__all__ = [
    "GalerkinBasis",
    "GalerkinMatrix",
    "perturbation_block",
    "assemble",
    "assemble_l0_closed_form",
    "krein_product",
]


@dataclass(frozen=True)
class GalerkinBasis:
    l: int
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if not idx:
            raise ValueError("basis is empty")
        if any(i == 0 for i in idx):
            raise ValueError("state number 0 does not exist")
        if any(a <= b for a, b in zip(idx, idx[1:])):
            raise ValueError(f"indices must be strictly decreasing, got {idx}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def symmetric(cls, l: int, N: int) -> "GalerkinBasis":
        """``N/2, ..., 1, -1, ..., -N/2``."""
        if N < 2 or N % 2:
            raise ValueError("symmetric basis needs an even N >= 2")
        h = N // 2
        return cls(l, tuple(range(h, 0, -1)) + tuple(range(-1, -h - 1, -1)))

    @property
    def N(self) -> int:
        return len(self.indices)

    @property
    def N_plus(self) -> int:
        return sum(1 for i in self.indices if i > 0)

    @property
    def N_minus(self) -> int:
        return self.N - self.N_plus

    @property
    def eta(self) -> np.ndarray:
        return np.array([krein_sign(i) for i in self.indices], dtype=float)

    def branch_values(self, alpha0: float) -> np.ndarray:
        return np.array([branch_eigenvalue(self.l, n, alpha0) for n in self.indices])


@dataclass(frozen=True)
class GalerkinMatrix:
    basis: GalerkinBasis
    eta: np.ndarray = field(repr=False)
    entries: np.ndarray = field(repr=False)
    alpha0: float
    profile_tag: str = ""

    def pseudo_symmetry_residual(self) -> float:
        A = self.entries
        return float(np.max(np.abs(A - self.eta[:, None] * A.T * self.eta[None, :])))


def perturbation_block(l: int, basis: GalerkinBasis, profile: AlphaProfile,
                       rule: QuadratureRule | None = None) -> np.ndarray:
    """Symmetric ``int Delta_alpha g_mn`` block (the ``A_tilde`` off-constant part)."""
    P = element_matrix(l, basis.indices, profile, rule)
    return profile.epsilon_scale * P


def _from_tilde(basis, alpha0, P, tag):
    eta = basis.eta
    entries = np.diag(basis.branch_values(alpha0)) + eta[:, None] * P
    return GalerkinMatrix(basis, eta, entries, float(alpha0), tag)


def assemble(l: int, basis: GalerkinBasis, profile: AlphaProfile,
             rule: QuadratureRule | None = None, tag: str = "") -> GalerkinMatrix:
    """``A_mn = lambda_m delta_mn + sign(m) int Delta_alpha g_mn`` at ``profile.alpha0``."""
    if basis.l != l:
        raise ValueError(f"basis belongs to l={basis.l}, not l={l}")
    return _from_tilde(basis, profile.alpha0, perturbation_block(l, basis, profile, rule), tag)


def assemble_l0_closed_form(basis: GalerkinBasis, alpha0: float, spec: FourierSpectrum,
                            tag: str = "") -> GalerkinMatrix:
    """``l = 0`` matrix from the Fourier content of ``Delta_alpha`` alone.

    ``A_mn = lambda_m delta_mn + sign(m) (pi/2) sqrt|mn| Q_{m-n}``, with the
    mean ``a0`` entering the diagonal (``Q_0 = a0``).
    """
    if basis.l != 0:
        raise ValueError("closed form exists for l=0 only")
    idx = basis.indices
    P = np.empty((basis.N, basis.N))
    for i, m in enumerate(idx):
        for j, n in enumerate(idx):
            q = spec.a0 if m == n else q_factor(spec, m - n)
            P[i, j] = 0.5 * math.pi * math.sqrt(abs(m * n)) * q
    return _from_tilde(basis, alpha0, P, tag)


def krein_product(c, d, eta) -> complex:
    """Indefinite inner product ``sum eta_i conj(c_i) d_i``."""
    c, d, eta = np.asarray(c), np.asarray(d), np.asarray(eta)
    if not (c.shape == d.shape == eta.shape) or c.ndim != 1:
        raise ValueError(f"dimension mismatch: {c.shape}, {d.shape}, {eta.shape}")
    return complex(np.sum(eta * np.conj(c) * d))
