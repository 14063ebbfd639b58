"""The symbol ``phi(z) = exp(v(z) + v(1/z))`` and its Fourier coefficients.

Here ``v(z) = sum_{j=1}^N theta_j z^j / j``.  Writing
``exp(v(z)) = sum_k h_k z^k`` the Fourier coefficients of ``phi`` on the unit
circle are the autocorrelations ``phi_k = sum_m h_m h_{m+|k|}``.  The infinite
sum is truncated at an adaptively chosen order ``M`` and the neglected part is
bounded rigorously (see :func:`fourier_table`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import mpmath

from ._numeric import GUARD_BITS, fmt, to_mpf
from .errors import TailNotCertified

__all__ = [
    "SymbolParams",
    "FourierTable",
    "h_coefficients",
    "fourier_table",
    "quadrature_oracle",
]


@dataclass(frozen=True)
class SymbolParams:
    """Parameters ``(N, theta_1..theta_N)`` of the symbol.

    Parameters
    ----------
    big_n : int
        Degree of ``v``.
    thetas : sequence
        ``theta_1 .. theta_N``.  Accepts ints, Fractions, decimal strings or
        floats (floats are read through their decimal repr).
    precision_bits : int
        Working precision of every derived numeric quantity.
    """

    big_n: int
    thetas: tuple
    precision_bits: int = 256

    def __post_init__(self):
        if not isinstance(self.big_n, int) or self.big_n < 1:
            raise ValueError("big_n must be a positive integer")
        thetas = tuple(self.thetas)
        if len(thetas) != self.big_n:
            raise ValueError(f"expected {self.big_n} thetas, got {len(thetas)}")
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be at least 64")
        object.__setattr__(self, "thetas", thetas)

    @property
    def theta_mpf(self):
        with mpmath.workprec(self.precision_bits + GUARD_BITS):
            return [to_mpf(t) for t in self.thetas]

    def alternated(self):
        """Parameters with ``theta_i -> (-1)^(i-1) theta_i``."""
        thetas = tuple(t if i % 2 == 0 else -to_mpf(t) for i, t in enumerate(self.thetas))
        return SymbolParams(self.big_n, thetas, self.precision_bits)

    def with_precision(self, bits):
        return SymbolParams(self.big_n, self.thetas, bits)

    def is_zero(self):
        return all(to_mpf(t) == 0 for t in self.thetas)


def _guard(params):
    # absolute errors scale with exp(2*sum|theta_j|/j), the size of phi_0
    s = sum(abs(float(to_mpf(t))) / j for j, t in enumerate(params.thetas, 1))
    return params.precision_bits + GUARD_BITS + int(3 * s) + 1


def _h_recursion(thetas, m_max):
    n = len(thetas)
    h = [mpmath.mpf(1)]
    for k in range(1, m_max + 1):
        acc = mpmath.mpf(0)
        for j in range(1, min(n, k) + 1):
            acc += thetas[j - 1] * h[k - j]
        h.append(acc / k)
    return h


def h_coefficients(params: SymbolParams, m_max: int) -> list:
    """Taylor coefficients ``h_0..h_{m_max}`` of ``exp(v(z))``.

    Uses ``k h_k = sum_{j=1}^{min(N,k)} theta_j h_{k-j}``, obtained by
    differentiating ``exp(v)``.
    """
    if m_max < 0:
        raise ValueError("m_max must be non-negative")
    with mpmath.workprec(_guard(params)):
        return _h_recursion(params.theta_mpf, m_max)


@dataclass(frozen=True)
class FourierTable:
    """Fourier coefficients ``phi_0..phi_{k_max}`` with certified error bounds.

    Attributes
    ----------
    coeffs : tuple
        ``phi_k`` for ``k = 0..k_max``; negative ``k`` are served by symmetry.
    tail_bound : mpf
        Upper bound for ``|phi_k|`` with ``|k| > k_max``.
    truncation_bound : mpf
        Upper bound for the error of every stored coefficient caused by
        truncating the convolution sum.
    h_coeffs : tuple
        ``h_0..h_M`` used in the convolution.
    """

    params: SymbolParams
    k_max: int
    coeffs: tuple
    tail_bound: object
    truncation_bound: object
    h_coeffs: tuple = field(repr=False)

    def __getitem__(self, k):
        k = abs(k)
        if k > self.k_max:
            raise IndexError(f"phi_{k} outside the table (k_max={self.k_max})")
        return self.coeffs[k]

    def phi(self, k):
        return self[k]

    def to_json_obj(self):
        bits = self.params.precision_bits
        return {
            "N": self.params.big_n,
            "thetas": [str(t) for t in self.params.thetas],
            "k_max": self.k_max,
            "coeffs": [fmt(c, bits) for c in self.coeffs],
            "tail_bound": mpmath.nstr(self.tail_bound, 6),
        }

    def to_json(self):
        return json.dumps(self.to_json_obj(), indent=1)


def _majorant_bounds(habs, big_n, s_abs, m_top):
    """Geometric majorant for ``|h_m|``, ``m > m_top``: ``B * rho**((m - m_top)/N)``."""
    rho = s_abs / (m_top + 1)
    lo = max(0, m_top - big_n + 1)
    b = max(habs[lo:m_top + 1])
    return b, rho


def _truncation_error(habs, b, rho, big_n, m_top, k):
    """Bound on ``sum_{m > m_top - k} |h_m h_{m+k}|``."""
    if rho == 0:
        return mpmath.mpf(0)
    total = mpmath.mpf(0)
    for m in range(max(0, m_top - k + 1), m_top + 1):
        total += habs[m] * b * rho ** (mpmath.mpf(m + k - m_top) / big_n)
    r = rho ** (mpmath.mpf(2) / big_n)
    total += b * b * rho ** (mpmath.mpf(k) / big_n) * r / (1 - r)
    return total


def fourier_table(params: SymbolParams, k_max: int, max_terms: int = 1 << 16) -> FourierTable:
    """Compute ``phi_0..phi_{k_max}`` by the convolution of Taylor coefficients.

    The Taylor series is cut at ``M`` and ``M`` is doubled until the error
    bound of every stored coefficient is below ``2**(8 - precision_bits)``.

    The bound comes from the majorant series ``H_m`` (the ``h_m`` of the
    parameters ``|theta_j|``): with ``S = sum |theta_j|``,
    ``rho = S/(M+1) < 1`` and ``B = max_{M-N < i <= M} H_i`` induction on
    the recursion gives ``|h_m| <= B rho**((m-M)/N)`` for ``m > M``.

    Raises
    ------
    TailNotCertified
        If ``M`` would exceed ``max_terms``.
    """
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    bits = params.precision_bits
    big_n = params.big_n
    with mpmath.workprec(_guard(params)):
        thetas = params.theta_mpf
        abs_thetas = [abs(t) for t in thetas]
        s_abs = sum(abs_thetas)
        target = mpmath.ldexp(1, 8 - bits)
        m_top = max(2 * k_max + 16, int(4 * s_abs) + 16)
        while True:
            if m_top > max_terms:
                raise TailNotCertified(
                    f"could not certify the Fourier tail below 2^{8 - bits} with {max_terms} terms")
            if s_abs >= m_top + 1:
                m_top *= 2
                continue
            habs = _h_recursion(abs_thetas, m_top)
            b, rho = _majorant_bounds(habs, big_n, s_abs, m_top)
            trunc = max(_truncation_error(habs, b, rho, big_n, m_top, k) for k in range(k_max + 1))
            if trunc < target:
                break
            m_top *= 2
        h = _h_recursion(thetas, m_top)
        coeffs = []
        for k in range(k_max + 1):
            acc = mpmath.fsum(h[m] * h[m + k] for m in range(m_top - k + 1))
            coeffs.append(acc)
        mass = mpmath.exp(sum(a / j for j, a in enumerate(abs_thetas, 1)))
        beyond = [habs[j] for j in range(k_max + 1, m_top + 1)]
        sup_h = max(beyond + [b * rho ** (mpmath.mpf(1) / big_n)])
        tail = mass * sup_h
    return FourierTable(params, k_max, tuple(coeffs), tail, trunc, tuple(h))


def quadrature_oracle(params: SymbolParams, k: int, nodes: int | None = None):
    """Trapezoidal rule for ``(1/2pi) int exp(-ik beta) phi(exp(i beta)) d beta``.

    The symbol is entire, so the rule converges geometrically; its error is
    the aliased coefficient sum ``phi_{k+nodes} + phi_{nodes-k} + ...``.
    Independent of :func:`fourier_table`.
    """
    k = abs(k)
    if nodes is None:
        s = sum(abs(float(to_mpf(t))) for t in params.thetas)
        nodes = 2 * k + int(8 * s) + params.big_n * params.precision_bits // 2 + 32
    nodes = max(nodes, 16)
    with mpmath.workprec(_guard(params)):
        thetas = params.theta_mpf
        total = mpmath.mpf(0)
        step = 2 * mpmath.pi / nodes
        for ell in range(nodes):
            beta = ell * step
            w = 2 * sum(t * mpmath.cos(j * beta) / j for j, t in enumerate(thetas, 1))
            total += mpmath.cos(k * beta) * mpmath.exp(w)
        return total / nodes
