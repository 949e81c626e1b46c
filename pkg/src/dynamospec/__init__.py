"""Spectral toolkit for the spherically symmetric alpha^2-dynamo.

Bessel eigenbasis, the spectral mesh and its diabolical points, first-order
Krein-space unfolding, Galerkin matrices and a dense nonsymmetric
eigensolver with alpha0 sweeps.
"""
__version__ = "0.1.0"

from .specfun import (BesselRoot, BesselRootError, RadialEigenfunction, SectorConfig,
                      bessel_zero, bessel_zeros, eigenfunction_d2u, eigenfunction_du,
                      eigenfunction_u, radial_eigenfunction, spherical_bessel_j)
from .quadrature import QuadratureError, QuadratureRule, gauss_legendre, integrate, rule_for_modes
from .fourier import AlphaProfile, FourierSpectrum, as_perturbation, fourier_coefficients, q_factor
from .mesh import (DiabolicalPoint, branch_eigenvalue, dp_from_node_l0, dp_parabola_l0,
                   enumerate_dps, krein_sign, make_dp)
from .unfolding import (Classification, EPEstimate, PerturbationElement, Regime, UnfoldingResult,
                        classify_intersection, critical_offset_l0, critical_profile_residual_l0,
                        element_matrix, ep_offset_estimate_l0, gradient_g, lambda1_l0,
                        perturb_matrix_element, unfold_dp)
from .galerkin import (GalerkinBasis, GalerkinMatrix, assemble, assemble_l0_closed_form,
                       krein_product, perturbation_block)
from .eig import (EigenvalueError, Spectrum, SweepError, SweepTable, balance, eigenvalues,
                  hessenberg, hqr, sweep)
