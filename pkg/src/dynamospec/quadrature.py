"""Composite Gauss-Legendre quadrature on (0, 1).

Every inner product in the package is an integral over the unit radius of
a product of a few bounded-frequency oscillations, so a fixed-order
composite rule with a frequency-aware panel count is enough.  No node ever
sits on an endpoint, which keeps the centrifugal ``1/r**2`` term finite.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = ["QuadratureRule", "QuadratureError", "gauss_legendre", "rule_for_modes", "integrate"]

DEFAULT_ORDER = 20
MIN_PANELS = 16


class QuadratureError(ArithmeticError):
    """The integrand returned a non-finite value at a node."""

    def __init__(self, node: float, value: float):
        self.node, self.value = node, value
        super().__init__(f"integrand is not finite at r={node!r} (value {value!r})")


@dataclass(frozen=True)
class QuadratureRule:
    scheme: str
    panels: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    open_at_endpoints: bool = True

    def __post_init__(self):
        if self.panels < 1:
            raise ValueError("panel count must be positive")
        if self.nodes.shape != self.weights.shape:
            raise ValueError("nodes and weights differ in length")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        if self.open_at_endpoints and (self.nodes.min() <= 0.0 or self.nodes.max() >= 1.0):
            raise ValueError("open rule has a node on the boundary")

    def refined(self) -> "QuadratureRule":
        """Same order, twice the panels."""
        return gauss_legendre(2 * self.panels, order=len(self.nodes) // self.panels)


@lru_cache(maxsize=64)
def _rule(panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    h = 1.0 / panels
    left = np.arange(panels) * h
    nodes = (left[:, None] + 0.5 * h * (x[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * h * w, panels)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(panels: int = MIN_PANELS, order: int = DEFAULT_ORDER) -> QuadratureRule:
    """Composite Gauss-Legendre rule with ``panels`` equal panels on (0, 1)."""
    if order < 1 or panels < 1:
        raise ValueError(f"panels and order must be positive, got {panels}, {order}")
    nodes, weights = _rule(int(panels), int(order))
    return QuadratureRule(f"gauss-legendre-{order}", int(panels), nodes, weights)


def rule_for_modes(max_mode: int, order: int = DEFAULT_ORDER) -> QuadratureRule:
    """Rule sized for integrands oscillating up to ``max_mode`` half-waves.

    ``max_mode`` counts in units of ``pi r``: a basis function of index n
    contributes n, a harmonic ``cos(2 pi k r)`` contributes 2k.
    """
    return gauss_legendre(max(MIN_PANELS, 4 * int(max_mode)), order)


def integrate(f, rule: QuadratureRule | None = None) -> float:
    """Integrate ``f`` over (0, 1).

    ``f`` is called once with the full node array and must return an array
    of the same shape.
    """
    rule = rule or gauss_legendre()
    values = np.asarray(f(rule.nodes), dtype=float)
    if values.shape != rule.nodes.shape:
        values = np.broadcast_to(values, rule.nodes.shape)
    bad = ~np.isfinite(values)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise QuadratureError(float(rule.nodes[i]), float(values[i]))
    return float(values @ rule.weights)
