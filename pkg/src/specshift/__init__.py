"""Higher-order spectral shift densities for Hermitian matrix pairs.

For a pair ``(H0, V)`` and order ``p`` the library computes the density
``eta_p`` with

    tr R_p(f) = int f^(p)(t) eta_p(t) dt,

where ``R_p(f)`` is the order-``p`` Taylor remainder of ``f(H0 + tV)`` at
``t = 1``, together with the divided-difference, multilinear-measure and
Cauchy-transform machinery behind it and a verification harness.
"""
from .cauchy import (MeasureSpec, cauchy_derivative, cauchy_transform, herglotz_constants,
                     integration_by_parts_check, log_boundary_value, log_transform, stieltjes_invert)
from .divdiff import (NodeMultiset, basic_spline, cumulative_spline_kernel, divided_difference,
                      divided_difference_resolvent, divided_differences, spline_to_piecewise)
from .ensembles import ensemble, random_pair, wide_spectrum_pair
from .errors import (CapacityError, DegenerateSplineError, DomainError, EigensolverError,
                     PoleCollisionError, SpecShiftError, SymmetryViolationError)
from .functions import Exponential, LinearCombination, Polynomial, ResolventPower, TruncatedPower, f_z
from .multimeasure import MultiSpectralMeasure, build_measure, integrate_divided_difference
from .operator_core import HermitianOperator, apply_function, spectral_decompose
from .pair import Perturbation
from .piecewise import PiecewisePolynomial, piecewise_integrate
from .ssf_engine import SSFDensity, asymptotics_report, eta_recursive, eta_sequence, krein_xi, trace_formula_rhs
from .taylor_remainder import (fd_remainder_trace, gateaux_trace, remainder, remainder_operator,
                               remainder_trace)
from .verify import VerificationReport, run_verification

__version__ = "0.1.0"
