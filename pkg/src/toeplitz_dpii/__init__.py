"""Toeplitz determinants, OPUC and the discrete Painleve II hierarchy.

Numeric side: :mod:`symbolcore` (symbol and Fourier coefficients),
:mod:`toeplitz` (determinants, gap probabilities), :mod:`opuc`
(``x_n = pi_n(0)``), :mod:`asymptotics` (Bessel comparisons).

Symbolic side: :mod:`shiftpoly` (exact shift-polynomial ring), :mod:`lax`
(Lax matrices and their identities), :mod:`hierarchy` (the equations and the
numeric bridge), :mod:`continuum` (continuum limits).
"""

from .errors import *  # noqa: F401,F403
from .shiftpoly import BACKEND, ShiftPolynomial, OperatorExpr
from .symbolcore import SymbolParams, FourierTable, h_coefficients, fourier_table, quadrature_oracle
from .toeplitz import DeterminantSequence, GapProbabilities, determinant_sequence, gap_probabilities, recursion_residual
from .opuc import OPUCSequence, szego_sequence, sign_check
from .lax import LaxMatrix, build_U, build_T, verify_identities, compatibility_residual, cresswell_joshi_map
from .hierarchy import HierarchyEquation, scalar_L, generate_equation, residual_trace, equation_consistency
from .asymptotics import GBFSpec, bessel_j, gbf, compare_asymptotics
from .continuum import FormalSeries, continuum_limit, cancellation_report

__version__ = "0.1.0"
