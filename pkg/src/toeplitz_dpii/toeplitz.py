"""Toeplitz determinants of the symbol and the associated gap probabilities.

``D_n`` is the determinant of the ``(n+1) x (n+1)`` matrix ``(phi_{i-j})``.
All ``D_0..D_{n_max}`` come out of one bordered ``L D L^T`` factorisation:
adding a row only needs a forward solve with the current factor, so the
whole sequence costs ``O(n_max^3)``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import mpmath

from ._numeric import GUARD_BITS, fmt, mpf_to_fraction
from .errors import NotPositiveDefinite
from .symbolcore import FourierTable, SymbolParams, fourier_table

__all__ = [
    "DeterminantSequence",
    "GapProbabilities",
    "determinant_sequence",
    "gap_probabilities",
    "recursion_residual",
    "toeplitz_matrix",
    "bareiss_determinant",
    "cofactor_determinant",
    "determinants_csv",
]


@dataclass(frozen=True)
class DeterminantSequence:
    """``D_0..D_{n_max}`` and their natural logarithms.

    ``D(-1)`` returns 1 by convention.
    """

    params: SymbolParams
    values: tuple
    log_values: tuple
    table: FourierTable

    @property
    def n_max(self):
        return len(self.values) - 1

    def D(self, n):
        if n == -1:
            return mpmath.mpf(1)
        if n < -1:
            raise IndexError(n)
        return self.values[n]

    def log_D(self, n):
        if n == -1:
            return mpmath.mpf(0)
        if n < -1:
            raise IndexError(n)
        return self.log_values[n]

    def ratio(self, n):
        """``D_n D_{n-2} / D_{n-1}^2`` for ``n >= 1``, computed from the logs."""
        bits = self.params.precision_bits + GUARD_BITS
        with mpmath.workprec(bits):
            return mpmath.exp(self.log_D(n) + self.log_D(n - 2) - 2 * self.log_D(n - 1))


@dataclass(frozen=True)
class GapProbabilities:
    """``q_n = D_{n-1}/Z`` and its analogue ``r_n`` for the alternated parameters.

    ``q[n]`` and ``r[n]`` are stored for ``n = 0..n_max + 1`` with ``q[0] = 1/Z``.
    """

    params: SymbolParams
    z_const: object
    q: tuple
    r: tuple


def toeplitz_matrix(table: FourierTable, size: int):
    """The ``size x size`` matrix ``(phi_{i-j})`` as nested lists."""
    return [[table[i - j] for j in range(size)] for i in range(size)]


def determinant_sequence(table: FourierTable, n_max: int) -> DeterminantSequence:
    """Determinants ``D_0..D_{n_max}`` by bordered symmetric factorisation.

    Raises
    ------
    NotPositiveDefinite
        If a pivot is not strictly positive.
    """
    if n_max > table.k_max:
        raise ValueError(f"table covers |k| <= {table.k_max}, need {n_max}")
    params = table.params
    with mpmath.workprec(params.precision_bits + GUARD_BITS):
        phi = [table[k] for k in range(n_max + 1)]
        lower = []  # lower[i][j] = L_{ij} for j < i
        pivots = []
        values, logs = [], []
        log_d = mpmath.mpf(0)
        for n in range(n_max + 1):
            # forward solve L y = c with c_i = phi_{n-i}
            y = []
            for i in range(n):
                row = lower[i]
                acc = phi[n - i] - mpmath.fsum(row[j] * y[j] for j in range(i))
                y.append(acc)
            d = phi[0] - mpmath.fsum(yi * yi / di for yi, di in zip(y, pivots))
            if not d > 0:
                raise NotPositiveDefinite(f"pivot {n} is {mpmath.nstr(d, 5)}")
            lower.append([yi / di for yi, di in zip(y, pivots)])
            pivots.append(d)
            log_d += mpmath.log(d)
            logs.append(log_d)
            values.append(mpmath.exp(log_d))
    return DeterminantSequence(params, tuple(values), tuple(logs), table)


def _sequence_for(params: SymbolParams, n_max: int) -> DeterminantSequence:
    return determinant_sequence(fourier_table(params, n_max), n_max)


def gap_probabilities(seq: DeterminantSequence) -> GapProbabilities:
    """``q_n = exp(-sum theta_j^2/j) D_{n-1}`` and ``r_n`` from the alternated thetas."""
    params = seq.params
    alt = params.alternated()
    if all(a == b for a, b in zip(alt.theta_mpf, params.theta_mpf)):
        alt_seq = seq
    else:
        alt_seq = _sequence_for(alt, seq.n_max)
    with mpmath.workprec(params.precision_bits + GUARD_BITS):
        log_z = mpmath.fsum(t * t / j for j, t in enumerate(params.theta_mpf, 1))
        z_const = mpmath.exp(log_z)
        q = tuple(mpmath.exp(seq.log_D(n - 1) - log_z) for n in range(seq.n_max + 2))
        r = tuple(mpmath.exp(alt_seq.log_D(n - 1) - log_z) for n in range(seq.n_max + 2))
    return GapProbabilities(params, z_const, q, r)


def recursion_residual(seq: DeterminantSequence, x) -> list:
    """``D_n D_{n-2} / D_{n-1}^2 - (1 - x_n^2)`` for ``n = 1..n_max``.

    ``x`` is an :class:`~toeplitz_dpii.opuc.OPUCSequence`; entry ``i`` of the
    result belongs to ``n = i + 1``.
    """
    n_top = min(seq.n_max, len(x.x) - 1)
    with mpmath.workprec(seq.params.precision_bits + GUARD_BITS):
        return [seq.ratio(n) - (1 - x.x[n] ** 2) for n in range(1, n_top + 1)]


def bareiss_determinant(matrix) -> Fraction:
    """Exact determinant by fraction-free Gaussian elimination.

    Entries may be ints, Fractions or ``mpf`` (converted exactly).  The
    rationals are brought to a common denominator so elimination runs on
    integers only.
    """
    rows = [[e if isinstance(e, (int, Fraction)) else mpf_to_fraction(e) for e in r]
            for r in matrix]
    size = len(rows)
    if size == 0:
        return Fraction(1)
    den = 1
    for r in rows:
        for e in r:
            den = lcm(den, Fraction(e).denominator)
    a = [[int(Fraction(e) * den) for e in r] for r in rows]
    sign = 1
    prev = 1
    for k in range(size - 1):
        if a[k][k] == 0:
            for i in range(k + 1, size):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return Fraction(sign * a[-1][-1], den ** size)


def cofactor_determinant(matrix):
    """Laplace expansion along the first row; factorial cost, small sizes only."""
    size = len(matrix)
    if size == 0:
        return 1
    if size == 1:
        return matrix[0][0]
    total = 0
    for j in range(size):
        if not matrix[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = matrix[0][j] * cofactor_determinant(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def determinants_csv(seq: DeterminantSequence, gaps: GapProbabilities | None = None,
                     x=None) -> str:
    """CSV with columns ``n, D_n, log D_n, q_n, r_n, ratio, residual``.

    ``ratio`` and ``residual`` need the OPUC data ``x``; they are left empty
    at ``n = 0`` (and everywhere if ``x`` is not given).
    """
    bits = seq.params.precision_bits
    if gaps is None:
        gaps = gap_probabilities(seq)
    res = recursion_residual(seq, x) if x is not None else []
    out = io.StringIO()
    out.write("n,D_n,log_D_n,q_n,r_n,ratio,residual\n")
    for n in range(seq.n_max + 1):
        ratio = fmt(seq.ratio(n), bits) if n >= 1 else ""
        resid = mpmath.nstr(res[n - 1], 6) if 1 <= n <= len(res) else ""
        out.write(",".join([
            str(n), fmt(seq.values[n], bits), fmt(seq.log_values[n], bits),
            fmt(gaps.q[n], bits), fmt(gaps.r[n], bits), ratio, resid]) + "\n")
    return out.getvalue()
