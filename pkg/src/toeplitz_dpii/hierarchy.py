"""The discrete Painleve II hierarchy from the scalar recursion operator.

The recursion operator acts on the ring of shift polynomials as

    L = x_{n+1} (2 Delta^{-1} + I) (S x_n Perm - x_n) + v_{n+1} S - x_n x_{n+1}

(``S`` the lattice shift, ``Delta = S - I``).  The ``N``-th equation is

    n x_n + (2 x_n Delta^{-1} (x_n - S x_n Perm) - v_n - v_n Perm) L^N(0) = 0.

The ``i``-th application of ``L`` uses the integration constant
``-theta_{N-i+1}/2``; the outer integration uses 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from ._numeric import GUARD_BITS
from .errors import RouteMismatch, WindowUnderflow
from .lax import build_T, build_U, compatibility_residual
from .shiftpoly import OperatorExpr, ShiftPolynomial, const, n_sym, perm, term_value, theta, v, x

__all__ = [
    "HierarchyEquation",
    "recursion_operator",
    "scalar_L",
    "generate_equation",
    "residual_trace",
    "equation_consistency",
]

_I = OperatorExpr.identity()
_S = OperatorExpr.shift(1)
_DINV = OperatorExpr.delta_inverse()
_P = OperatorExpr.perm()


def _mul(p):
    return OperatorExpr.mul(p)


def recursion_operator() -> OperatorExpr:
    """The operator ``L`` as an expression tree."""
    inner = _S @ _mul(x(0)) @ _P - _mul(x(0))
    return (_mul(x(1)) @ (2 * _DINV + _I) @ inner
            + _mul(v(1)) @ _S
            - _mul(x(0) * x(1)))


def closing_operator() -> OperatorExpr:
    """``2 x_n Delta^{-1} (x_n - S x_n Perm) - v_n - v_n Perm``."""
    inner = _mul(x(0)) - _S @ _mul(x(0)) @ _P
    return 2 * (_mul(x(0)) @ _DINV @ inner) - _mul(v(0)) - _mul(v(0)) @ _P


_L = recursion_operator()
_CLOSE = closing_operator()


def scalar_L(u: ShiftPolynomial, constant=None) -> ShiftPolynomial:
    """One application of ``L`` with the given integration constant.

    ``constant`` defaults to 0; the hierarchy uses ``-theta_k/2``.
    """
    if constant is None:
        constant = const(0)
    return _L.apply(u, constant)


@dataclass(frozen=True)
class HierarchyEquation:
    """The ``N``-th equation ``lhs = 0`` and the chain ``T_{k,12} = L^{k-1}(0)``."""

    big_n: int
    lhs: ShiftPolynomial
    t_chain: tuple = field(repr=False)

    def to_text(self):
        return self.lhs.to_grouped_text()

    def to_latex(self):
        return self.lhs.to_grouped_latex() + " = 0"

    def to_json_obj(self):
        return {"N": self.big_n, "terms": self.lhs.to_json_obj()}


def generate_equation(big_n: int) -> HierarchyEquation:
    """Expanded ``N``-th equation of the hierarchy.

    Raises
    ------
    NotSummable
        Propagated from the discrete integrations.
    """
    if big_n < 1:
        raise ValueError("big_n must be >= 1")
    u = ShiftPolynomial()
    chain = [u]
    for i in range(1, big_n + 1):
        u = scalar_L(u, theta(big_n - i + 1) * Fraction(-1, 2))
        chain.append(u)
    lhs = n_sym() * x(0) + _CLOSE.apply(u, const(0))
    return HierarchyEquation(big_n, lhs, tuple(chain[1:]))


def residual_trace(eq: HierarchyEquation, xseq, n_range, relative: bool = False) -> list:
    """Evaluate ``eq.lhs`` on numeric ``x_n`` for every ``n`` in ``n_range``.

    Parameters
    ----------
    eq : HierarchyEquation
    xseq : OPUCSequence
        Supplies ``x_n`` and the numeric ``theta``.
    n_range : iterable of int
    relative : bool
        Divide each residual by the largest absolute term value at that ``n``.

    Raises
    ------
    WindowUnderflow
        If some ``n - N < 0`` (or ``n + N`` exceeds the available data).
    """
    params = xseq.params
    big_n = eq.big_n
    out = []
    terms = eq.lhs.sorted_terms()
    with mpmath.workprec(params.precision_bits + GUARD_BITS):
        thetas = params.theta_mpf
        for n in n_range:
            if n - big_n < 0:
                raise WindowUnderflow(f"n={n} needs x_{n - big_n}")
            if n + big_n > xseq.n_max:
                raise WindowUnderflow(f"n={n} needs x_{n + big_n}, have up to {xseq.n_max}")
            values = [term_value(m, c, xseq.x, thetas, n) for m, c in terms]
            total = mpmath.fsum(values)
            if relative:
                scale = max((abs(t) for t in values), default=mpmath.mpf(0))
                total = total / scale if scale else total
            out.append(total)
    return out


def equation_consistency(big_n: int) -> dict:
    """Compare the scalar route with the matrix route.

    The scalar route is :func:`generate_equation`; the matrix route is the
    leftover relation of the compatibility condition of ``(U, T)``.  Also
    checks that ``L^N(0)`` is the off-diagonal entry ``T_{N+1,12}``.

    Returns
    -------
    dict
        ``sign`` (+1 or -1) relating the two routes and the equation.

    Raises
    ------
    RouteMismatch
    """
    eq = generate_equation(big_n)
    T = build_T(big_n)
    matrix_route = compatibility_residual(T, build_U(), big_n)
    if matrix_route == eq.lhs:
        sign = 1
    elif matrix_route == -eq.lhs:
        sign = -1
    else:
        diff = matrix_route - eq.lhs
        raise RouteMismatch(f"routes disagree: {diff.to_text()}", diff)
    t12 = T.T_k(big_n + 1)[0][1]
    if t12 != eq.t_chain[-1]:
        diff = t12 - eq.t_chain[-1]
        raise RouteMismatch(f"T_(N+1),12 differs from L^N(0): {diff.to_text()}", diff)
    if perm(eq.lhs) != eq.lhs:
        diff = perm(eq.lhs) - eq.lhs
        raise RouteMismatch(f"equation is not reflection invariant: {diff.to_text()}", diff)
    return {"N": big_n, "sign": sign, "equation": eq.lhs, "terms": len(eq.lhs)}
