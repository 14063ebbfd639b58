"""Monic orthogonal polynomials on the unit circle for the symbol's measure.

``x_n = pi_n(0)`` is the constant term of the monic polynomial of degree
``n``.  The polynomials follow

    pi_{n+1}(z) = z pi_n(z) + x_{n+1} pi_n^*(z),

with ``pi_n^*(z) = z^n pi_n(1/z)`` (real coefficients), and orthogonality to
the constant 1 fixes ``x_{n+1}``.  All inner products are finite sums of
Fourier coefficients, so everything stays real.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import mpmath

from ._numeric import GUARD_BITS, fmt
from .errors import DegenerateMeasure, SignMismatch
from .symbolcore import FourierTable, SymbolParams

__all__ = ["OPUCSequence", "szego_sequence", "sign_check", "opuc_csv"]


@dataclass(frozen=True)
class OPUCSequence:
    """``x_0..x_{n_max}`` and ``kappa_0^2..kappa_{n_max}^2``.

    ``x_0 = 1`` because ``pi_0 = 1``.  ``norms[n]`` is ``||pi_n||^2``
    computed directly from the moments; ``kappa_sq`` is chained through
    ``kappa_n^2 = kappa_{n-1}^2 / (1 - x_n^2)`` from ``kappa_0^2 = 1/phi_0``.
    """

    params: SymbolParams
    x: tuple
    kappa_sq: tuple
    norms: tuple
    pi_coeffs: tuple | None = None

    @property
    def n_max(self):
        return len(self.x) - 1

    def as_map(self):
        """``{n: x_n}``, the form expected by symbolic evaluation."""
        return dict(enumerate(self.x))


def szego_sequence(table: FourierTable, n_max: int, store_pi: bool | None = None) -> OPUCSequence:
    """Run the recursion up to degree ``n_max``.

    Parameters
    ----------
    table : FourierTable
        Must cover ``|k| <= n_max``.
    n_max : int
    store_pi : bool, optional
        Keep the coefficient lists of every ``pi_n``; default on for
        ``n_max <= 256``.

    Raises
    ------
    DegenerateMeasure
        If some ``|x_n| >= 1``, which cannot happen for a positive measure
        and means the precision is exhausted.
    """
    if n_max > table.k_max:
        raise ValueError(f"table covers |k| <= {table.k_max}, need {n_max}")
    if store_pi is None:
        store_pi = n_max <= 256
    params = table.params
    with mpmath.workprec(params.precision_bits + GUARD_BITS):
        phi = [table[k] for k in range(n_max + 1)]
        c = [mpmath.mpf(1)]  # coefficients of pi_n, constant term first
        xs = [mpmath.mpf(1)]
        norms = [phi[0]]
        kappa = [1 / phi[0]]
        stored = [tuple(c)] if store_pi else None
        for n in range(n_max):
            num = mpmath.fsum(c[j] * phi[j + 1] for j in range(n + 1))
            den = mpmath.fsum(c[j] * phi[n - j] for j in range(n + 1))
            x_new = -num / den
            if not abs(x_new) < 1:
                raise DegenerateMeasure(f"|x_{n + 1}| = {mpmath.nstr(abs(x_new), 10)} >= 1")
            # z pi_n + x pi_n^*: pi_n^* has coefficients c reversed
            shifted = [mpmath.mpf(0)] + c
            rev = c[::-1] + [mpmath.mpf(0)]
            c = [a + x_new * b for a, b in zip(shifted, rev)]
            xs.append(x_new)
            kappa.append(kappa[-1] / (1 - x_new * x_new))
            norms.append(mpmath.fsum(c[j] * phi[n + 1 - j] for j in range(n + 2)))
            if store_pi:
                stored.append(tuple(c))
    return OPUCSequence(params, tuple(xs), tuple(kappa), tuple(norms),
                        tuple(stored) if store_pi else None)


def sign_check(x: OPUCSequence, seq, n_top: int = 12) -> list:
    """Cross-check ``x_n`` against the bordered-determinant formula.

    ``pi_n(0) = det(B_n) / D_{n-1}`` where ``B_n`` is the Toeplitz matrix of
    size ``n+1`` with its last row replaced by ``(1, 0, ..., 0)``.

    Returns
    -------
    list of dict
        One record per ``n`` with both values and whether the signs agree.

    Raises
    ------
    SignMismatch
        If the two signs disagree anywhere.
    """
    params = x.params
    table = seq.table
    n_top = min(n_top, x.n_max, seq.n_max)
    report = []
    with mpmath.workprec(params.precision_bits + GUARD_BITS):
        for n in range(1, n_top + 1):
            rows = [[table[i - j] for j in range(n + 1)] for i in range(n)]
            rows.append([1] + [0] * n)
            bordered = mpmath.det(mpmath.matrix(rows)) / seq.D(n - 1)
            xn = x.x[n]
            agree = mpmath.sign(bordered) == mpmath.sign(xn)
            report.append({"n": n, "x_n": xn, "bordered": bordered, "agree": agree,
                           "difference": abs(bordered - xn)})
            if not agree:
                raise SignMismatch(
                    f"x_{n}: recursion gives {mpmath.nstr(xn, 10)}, "
                    f"bordered determinant gives {mpmath.nstr(bordered, 10)}")
    return report


def opuc_csv(x: OPUCSequence) -> str:
    """CSV with columns ``n, x_n, kappa_n^2, 1 - x_n^2``."""
    bits = x.params.precision_bits
    out = io.StringIO()
    out.write("n,x_n,kappa_n_sq,one_minus_x_n_sq\n")
    with mpmath.workprec(bits + GUARD_BITS):
        for n, (xn, k2) in enumerate(zip(x.x, x.kappa_sq)):
            out.write(f"{n},{fmt(xn, bits)},{fmt(k2, bits)},{fmt(1 - xn * xn, bits)}\n")
    return out.getvalue()
