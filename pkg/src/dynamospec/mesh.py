"""Unperturbed spectrum and the diabolical points of the spectral mesh.

Branches carry a signed state number ``n != 0``: ``|n|`` picks the Bessel
root, ``sign(n)`` is the Krein type.  For constant ``alpha0`` the branch
eigenvalue is ``-rho_|n| + sign(n) * alpha0 * sqrt(rho_|n|)``, a straight
line in the ``(alpha0, lambda)`` plane.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import bessel_zeros

__all__ = [
    "krein_sign",
    "branch_eigenvalue",
    "DiabolicalPoint",
    "make_dp",
    "dp_from_node_l0",
    "enumerate_dps",
    "dp_parabola_l0",
]


def krein_sign(n: int) -> int:
    if n == 0:
        raise ValueError("state number 0 does not exist")
    return 1 if n > 0 else -1


def sqrt_rho(l: int, n: int) -> float:
    return float(bessel_zeros(l, abs(n))[abs(n) - 1])


def branch_eigenvalue(l: int, n: int, alpha0):
    """Eigenvalue of branch ``n`` at constant profile ``alpha0``."""
    k = sqrt_rho(l, n)
    if np.ndim(alpha0):
        alpha0 = np.asarray(alpha0, dtype=float)
    return -k * k + krein_sign(n) * alpha0 * k


@dataclass(frozen=True)
class DiabolicalPoint:
    """Crossing of branches ``branch_a`` and ``branch_b``.

    Ordered so that ``|a| < |b|``, or ``a > 0`` when ``b == -a`` (the
    crossings on the ``alpha0 = 0`` axis).

    For ``l = 0`` the node also carries its parabola index ``j = b - a``
    and line index ``M = a + b`` (``alpha0_node = pi M``); both are
    ``None`` otherwise.
    """

    l: int
    branch_a: int
    branch_b: int
    alpha0_node: float
    lambda_node: float
    same_type: bool
    j: int | None = None
    M: int | None = None

    @property
    def n(self) -> int:
        return self.branch_a


def make_dp(l: int, a: int, b: int) -> DiabolicalPoint:
    """Node where distinct nonzero branches ``a`` and ``b`` cross."""
    if a == b or a == 0 or b == 0:
        raise ValueError(f"branches {a}, {b} do not form a diabolical point")
    if (abs(a), -a) > (abs(b), -b):
        a, b = b, a
    ka, kb = sqrt_rho(l, a), sqrt_rho(l, b)
    ea, eb = krein_sign(a), krein_sign(b)
    alpha0 = ea * ka + eb * kb
    lam = ea * eb * ka * kb
    j = M = None
    if l == 0:
        j, M = b - a, a + b
    return DiabolicalPoint(l, a, b, alpha0, lam, ea == eb, j, M)


def dp_from_node_l0(n: int, j: int) -> DiabolicalPoint:
    """The ``(n, n + j)`` node of the ``l = 0`` mesh."""
    return make_dp(0, n, n + j)


def enumerate_dps(l: int, n_max: int, alpha0_range=(-math.inf, math.inf),
                  lambda_range=(-math.inf, math.inf)) -> list[DiabolicalPoint]:
    """All branch crossings with ``|n| <= n_max`` inside a closed window.

    Includes the ``n, -n`` pairs meeting at ``alpha0 = 0``.  Sorted by
    ``(alpha0_node, lambda_node)``.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    a_lo, a_hi = alpha0_range
    l_lo, l_hi = lambda_range
    found: dict[tuple, DiabolicalPoint] = {}
    states = [s * n for n in range(1, n_max + 1) for s in (1, -1)]
    for a in states:
        for b in states:
            if a == b or (abs(a), -a) > (abs(b), -b):
                continue
            dp = make_dp(l, a, b)
            if not (a_lo <= dp.alpha0_node <= a_hi and l_lo <= dp.lambda_node <= l_hi):
                continue
            key = (round(dp.alpha0_node * 1e8), round(dp.lambda_node * 1e8), frozenset((a, b)))
            found.setdefault(key, dp)
    return sorted(found.values(), key=lambda d: (d.alpha0_node, d.lambda_node, d.branch_a, d.branch_b))


def dp_parabola_l0(M: int, j: int) -> tuple[float, float]:
    """``(alpha0, lambda)`` of the ``l = 0`` node on line ``M``, parabola ``j``."""
    if (M - j) % 2:
        raise ValueError(f"M={M} and j={j} must have equal parity")
    n = (M - j) // 2
    if j == 0 or n == 0 or n + j == 0:
        raise ValueError(f"M={M}, j={j} does not pair two distinct branches")
    return math.pi * M, math.pi**2 * (M * M - j * j) / 4.0
