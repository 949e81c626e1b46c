"""First-order unfolding of diabolical points under profile perturbations.

Matrix elements are taken between Krein-normalized states ``v_n``
(``[v_n, v_m] = sign(n) delta_nm``) and written as integrals of the
perturbation against the gradient kernels ``g_mn^l(r)``:

    [B v_m, v_n] = int_0^1 phi(r) g_mn(r) dr

The general-l path below is the production path for every ``l``; the
``*_l0`` helpers are the closed-form ``l = 0`` results that serve as an
independent check.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .fourier import FourierSpectrum, as_perturbation, q_factor
from .mesh import DiabolicalPoint, krein_sign
from .quadrature import QuadratureError, QuadratureRule, rule_for_modes
from .specfun import radial_eigenfunction

__all__ = [
    "Regime",
    "Classification",
    "PerturbationElement",
    "UnfoldingResult",
    "EPEstimate",
    "gradient_g",
    "element_matrix",
    "perturb_matrix_element",
    "unfold_dp",
    "lambda1_l0",
    "critical_offset_l0",
    "ep_offset_estimate_l0",
    "critical_profile_residual_l0",
    "classify_intersection",
]

REGIME_RTOL = 1e-10


class Regime(str, enum.Enum):
    REAL = "real_unfolding"
    COMPLEX = "complex_unfolding"
    MARGINAL = "marginal"


class Classification(str, enum.Enum):
    REAL = "real"
    COMPLEX = "complex"
    MARGINAL = "marginal"


@dataclass(frozen=True)
class PerturbationElement:
    l: int
    m: int
    n: int
    value: float


def gradient_g(l: int, m: int, n: int, r):
    """Perturbation-gradient kernel ``g_mn^l(r)`` for signed states ``m, n``."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(r > 1):
        raise ValueError("gradient kernel is defined on 0 < r <= 1 only")
    um, un = radial_eigenfunction(l, abs(m)), radial_eigenfunction(l, abs(n))
    km, kn = um.sqrt_rho, un.sqrt_rho
    coef = krein_sign(m) * krein_sign(n) * km * kn + l * (l + 1) / r**2
    g = coef * um(r) * un(r) + um.derivative(r) * un.derivative(r)
    g = g / (2.0 * math.sqrt(km * kn))
    return float(g) if g.ndim == 0 else g


def _rule_for(states, phi_mode: int, l: int) -> QuadratureRule:
    top = sorted(abs(s) for s in states)[-2:]
    return rule_for_modes(sum(top) + phi_mode + l)


def _tables(l: int, states, r):
    efs = {a: radial_eigenfunction(l, a) for a in sorted({abs(s) for s in states})}
    U = np.array([efs[abs(s)](r) for s in states])
    D = np.array([efs[abs(s)].derivative(r) for s in states])
    k = np.array([efs[abs(s)].sqrt_rho for s in states])
    e = np.array([krein_sign(s) for s in states], dtype=float)
    return U, D, k, e


def element_matrix(l: int, states, phi, rule: QuadratureRule | None = None) -> np.ndarray:
    """``P[i, j] = int phi g_{s_i s_j}`` for all pairs of ``states``.

    Exactly symmetric.  ``phi`` is anything :func:`as_perturbation` accepts.
    """
    states = list(states)
    f, mode = as_perturbation(phi)
    rule = rule or _rule_for(states, mode, l)
    r, w = rule.nodes, rule.weights
    fw = np.asarray(f(r), dtype=float) * w
    if not np.all(np.isfinite(fw)):
        i = int(np.argmax(~np.isfinite(fw)))
        raise QuadratureError(float(r[i]), float(fw[i]))
    U, D, k, e = _tables(l, states, r)
    centrifugal = l * (l + 1) / r**2
    P = np.outer(e * k, e * k) * ((U * fw) @ U.T) + (U * (fw * centrifugal)) @ U.T + (D * fw) @ D.T
    P /= 2.0 * np.sqrt(np.outer(k, k))
    return 0.5 * (P + P.T)


def perturb_matrix_element(l: int, m: int, n: int, phi, rule: QuadratureRule | None = None,
                           form: str = "gradient") -> PerturbationElement:
    """``[B v_m, v_n]`` by quadrature.

    ``form="gradient"`` integrates against ``g_mn`` (symmetric form).
    ``form="second_derivative"`` uses ``u_m''`` instead of the centrifugal
    term, and ``form="operator"`` applies the perturbation operator
    directly, which needs ``phi'`` (profiles and spectra provide it).
    """
    if form == "gradient":
        return PerturbationElement(l, m, n, float(element_matrix(l, [m, n], phi, rule)[0, 1]))
    f, mode = as_perturbation(phi)
    rule = rule or _rule_for([m, n], mode, l)
    r, w = rule.nodes, rule.weights
    um, un = radial_eigenfunction(l, abs(m)), radial_eigenfunction(l, abs(n))
    km, kn = um.sqrt_rho, un.sqrt_rho
    cross = krein_sign(m) * krein_sign(n) * km * kn
    if form == "second_derivative":
        integrand = f(r) * ((km * km + cross) * um(r) * un(r)
                            + um.second_derivative(r) * un(r) + um.derivative(r) * un.derivative(r))
    elif form == "operator":
        dphi = getattr(phi, "dphi", None) or getattr(phi, "derivative", None)
        if dphi is None:
            raise TypeError("operator form needs a perturbation with a derivative")
        integrand = f(r) * (km * km + cross) * um(r) * un(r) - dphi(r) * um.derivative(r) * un(r)
    else:
        raise ValueError(f"unknown form {form!r}")
    return PerturbationElement(l, m, n, float(integrand @ w) / (2.0 * math.sqrt(km * kn)))


@dataclass(frozen=True)
class UnfoldingResult:
    """First-order splitting of a diabolical point.

    ``ray_ratio_*`` is ``gamma_1/gamma_2`` for the zeroth-order eigenvector
    ``gamma_1 v_a + gamma_2 v_b`` in the Krein-normalized basis, or
    ``None`` when the perturbation leaves the direction undetermined.
    """

    dp: DiabolicalPoint
    lambda1_plus: complex
    lambda1_minus: complex
    ray_ratio_plus: complex | None
    ray_ratio_minus: complex | None
    regime: Regime
    elements: tuple[float, float, float]
    discriminant: float
    epsilon_scale: float = 1.0

    @property
    def eigenvalues(self) -> tuple[complex, complex]:
        """First-order eigenvalue predictions ``lambda0 + eps * lambda1``."""
        lam0, eps = self.dp.lambda_node, self.epsilon_scale
        return lam0 + eps * self.lambda1_plus, lam0 + eps * self.lambda1_minus


def _reduced(dp: DiabolicalPoint, phi, rule=None):
    P = element_matrix(dp.l, [dp.branch_a, dp.branch_b], phi, rule)
    return P[0, 0], P[1, 1], P[0, 1]


def _split(ea, eb, p_aa, p_bb, p_ab, same_type):
    tr = ea * p_aa + eb * p_bb
    diff = ea * p_aa - eb * p_bb
    disc = diff * diff + 4 * ea * eb * p_ab * p_ab
    scale = max(diff * diff, 4 * p_ab * p_ab)
    if same_type:
        regime = Regime.REAL if scale > 0 else Regime.MARGINAL
    elif abs(disc) <= REGIME_RTOL * scale or scale == 0:
        regime = Regime.MARGINAL
    else:
        regime = Regime.COMPLEX if disc < 0 else Regime.REAL
    if regime is Regime.MARGINAL:
        root = 0.0
    elif same_type:
        root = math.sqrt(max(disc, 0.0))
    else:
        root = cmath.sqrt(disc)
    return complex(0.5 * (tr + root)), complex(0.5 * (tr - root)), regime, disc


def _ray(ea, eb, p_aa, p_bb, p_ab, lam):
    d1 = p_aa - ea * lam
    d2 = p_ab
    if max(abs(d1), abs(d2)) <= 1e-14 * max(abs(p_aa), abs(p_bb), abs(p_ab), 1e-300):
        return None
    if abs(d1) >= abs(d2):
        return complex(-p_ab / d1)
    return complex(-(p_bb - eb * lam) / d2)


def unfold_dp(dp: DiabolicalPoint, phi, epsilon_scale: float = 1.0,
              rule: QuadratureRule | None = None) -> UnfoldingResult:
    """Split a diabolical point to first order in the perturbation ``phi``."""
    ea, eb = krein_sign(dp.branch_a), krein_sign(dp.branch_b)
    p_aa, p_bb, p_ab = _reduced(dp, phi, rule)
    lp, lm, regime, disc = _split(ea, eb, p_aa, p_bb, p_ab, dp.same_type)
    return UnfoldingResult(
        dp, lp, lm,
        _ray(ea, eb, p_aa, p_bb, p_ab, lp),
        _ray(ea, eb, p_aa, p_bb, p_ab, lm),
        regime, (float(p_aa), float(p_bb), float(p_ab)), float(disc), float(epsilon_scale),
    )


def classify_intersection(l: int, dp: DiabolicalPoint, phi,
                          rule: QuadratureRule | None = None) -> Classification:
    """Can ``phi`` push this node into a complex-conjugate pair?

    Only mixed-type crossings can; they do when the off-diagonal filter
    term beats the averaged diagonal term.
    """
    if dp.l != l:
        raise ValueError(f"diabolical point belongs to l={dp.l}, not l={l}")
    if dp.same_type:
        return Classification.REAL
    p_aa, p_bb, p_ab = _reduced(dp, phi, rule)
    offset = (0.5 * (p_aa + p_bb)) ** 2
    filt = p_ab * p_ab
    scale = max(offset, filt)
    if scale == 0 or abs(offset - filt) <= REGIME_RTOL * scale:
        return Classification.MARGINAL
    return Classification.COMPLEX if offset < filt else Classification.REAL


def lambda1_l0(n: int, j: int, a0: float, Q_j: float) -> tuple[complex, complex]:
    """Closed-form ``l = 0`` first-order shifts at the ``(n, n + j)`` node."""
    root = cmath.sqrt(j * j * a0 * a0 + 4 * n * (n + j) * Q_j * Q_j)
    base = (2 * n + j) * a0
    return math.pi / 4 * (base + root), math.pi / 4 * (base - root)


def critical_offset_l0(n: int, j: int, Q_j: float) -> float:
    """``|a0|`` at which the ``(n, n + j)`` node switches complex to real."""
    if j == 0 or n * (n + j) >= 0:
        raise ValueError(f"node (n={n}, j={j}) has no complex sector")
    return math.sqrt(-4.0 * n * (n + j) / (j * j)) * abs(Q_j)


@dataclass(frozen=True)
class EPEstimate:
    offset: float
    asymptotic: float | None = None


def _check_lower(M: int, j: int):
    if abs(j) < abs(M) + 2:
        raise ValueError(f"need |j| >= |M| + 2, got M={M}, j={j}")
    if (M - j) % 2:
        raise ValueError(f"M={M} and j={j} must have equal parity")


def ep_offset_estimate_l0(M: int, j: int, Q_j: float | None = None,
                          spec: FourierSpectrum | None = None) -> EPEstimate:
    """Distance in ``alpha0`` from the ``(M, j)`` node to its exceptional points.

    Pass ``Q_j`` directly or a spectrum to compute it from.  With a
    spectrum holding a single sine harmonic the large-``j`` approximation
    ``4 |b_k| k / (pi j^2)`` is reported too.
    """
    _check_lower(M, j)
    if Q_j is None:
        if spec is None:
            raise TypeError("need Q_j or spec")
        Q_j = q_factor(spec, j)
    offset = 0.5 * math.sqrt(1.0 - (M * M) / (j * j)) * abs(Q_j)
    asym = None
    if spec is not None:
        sines = [(k, b) for k, a, b in spec.harmonics if b != 0.0]
        if len(sines) == 1 and all(a == 0.0 for _, a, _ in spec.harmonics):
            k, b = sines[0]
            asym = 4.0 * abs(b) * k / (math.pi * j * j)
    return EPEstimate(offset, asym)


def critical_profile_residual_l0(M: int, j: int, Q_j: float) -> float:
    """First-order ``Re lambda`` at the exceptional point of the ``(M, j)`` node.

    A sign change to positive flags a candidate oscillatory growing mode.
    """
    _check_lower(M, j)
    return (math.pi**2 / 4) * (M * M - j * j) + (math.pi / 4) * M * math.sqrt(1.0 - (M * M) / (j * j)) * abs(Q_j)
