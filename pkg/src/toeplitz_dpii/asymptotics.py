"""Bessel functions, generalised Bessel functions and the large-``n`` comparison.

``J_n(x)`` is computed by Miller's backward recurrence normalised with
``1 = J_0 + 2 sum_k J_{2k}``, or by the power series when ``|x| <= 2n``.

The ``N``-variable generalised Bessel function is the Fourier coefficient

    J_n^{(N)}(xi) = (1/2pi) int cos(n beta - 2 sum_k xi_k sin(k beta)) d beta
                  = sum_{m_1 + 2 m_2 + ... + N m_N = n} prod_k J_{m_k}(2 xi_k),

evaluated here as the truncated discrete convolution on the right.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import mpmath

from ._numeric import GUARD_BITS, fmt, to_mpf
from .errors import TruncationNotCertified

__all__ = [
    "GBFSpec",
    "bessel_j",
    "bessel_j_range",
    "bessel_quadrature",
    "gbf",
    "gbf_quadrature",
    "asymptotic_xis",
    "compare_asymptotics",
    "comparison_csv",
]


def _series(n, x):
    half = x / 2
    term = half ** n / mpmath.factorial(n)
    total = term
    q = -half * half
    k = 0
    eps = mpmath.ldexp(1, -mpmath.mp.prec)
    while True:
        k += 1
        term = term * q / (k * (n + k))
        total += term
        if abs(term) <= eps * abs(total) or term == 0:
            return total


def _start_order(m_top, x, bits):
    """Order where ``(x/2)^m / m!`` has dropped below ``2^-bits`` (relative to 1)."""
    m = max(m_top, int(abs(x))) + 2
    log_target = -(bits + 16) * mpmath.log(2)
    half = abs(x) / 2
    while True:
        if m * mpmath.log(half) - mpmath.loggamma(m + 1) < log_target:
            return m + (m % 2)
        m += 8


def bessel_j_range(m_top: int, x, precision_bits: int = 256) -> list:
    """``[J_0(x), ..., J_{m_top}(x)]`` from a single backward recurrence."""
    with mpmath.workprec(precision_bits + GUARD_BITS):
        x = to_mpf(x)
        if x == 0:
            return [mpmath.mpf(1)] + [mpmath.mpf(0)] * m_top
        sign = 1
        if x < 0:
            x, sign = -x, -1
        start = _start_order(m_top, x, precision_bits + GUARD_BITS)
        j_next = mpmath.mpf(0)
        j_cur = mpmath.ldexp(1, -precision_bits)
        vals = [mpmath.mpf(0)] * (start + 1)
        vals[start] = j_cur
        for k in range(start, 0, -1):
            j_prev = 2 * k / x * j_cur - j_next
            vals[k - 1] = j_prev
            j_next, j_cur = j_cur, j_prev
        norm = vals[0] + 2 * mpmath.fsum(vals[2::2])
        out = [vals[m] / norm for m in range(m_top + 1)]
        if sign < 0:
            out = [v if m % 2 == 0 else -v for m, v in enumerate(out)]
        return out


def bessel_j(n: int, x, precision_bits: int = 256):
    """Bessel function of the first kind ``J_n(x)`` for integer ``n``.

    Uses ``J_{-n}(x) = (-1)^n J_n(x)``.
    """
    if n < 0:
        val = bessel_j(-n, x, precision_bits)
        return val if n % 2 == 0 else -val
    with mpmath.workprec(precision_bits + GUARD_BITS):
        x = to_mpf(x)
        if x == 0:
            return mpmath.mpf(1 if n == 0 else 0)
        if abs(x) <= 2 * n or abs(x) <= 2:
            # the alternating series loses about |x|/ln 2 bits; pay for them
            with mpmath.workprec(precision_bits + GUARD_BITS + int(2 * abs(x))):
                return +_series(n, x)
    return bessel_j_range(n, x, precision_bits)[n]


def bessel_quadrature(n: int, x, nodes: int | None = None, precision_bits: int = 256):
    """Trapezoidal rule for ``(1/2pi) int cos(n beta - x sin beta) d beta``."""
    return _fourier_quadrature(n, [(1, to_mpf(x))], nodes, precision_bits)


def _fourier_quadrature(n, freqs, nodes, precision_bits):
    with mpmath.workprec(precision_bits + GUARD_BITS):
        amp = sum(abs(a) for _, a in freqs)
        kmax = max(k for k, _ in freqs)
        if nodes is None:
            nodes = 2 * abs(n) + int(4 * amp * kmax) + kmax * precision_bits // 2 + 32
        step = 2 * mpmath.pi / nodes
        total = mpmath.mpf(0)
        for ell in range(nodes):
            beta = ell * step
            phase = n * beta - mpmath.fsum(a * mpmath.sin(k * beta) for k, a in freqs)
            total += mpmath.cos(phase)
        return total / nodes


@dataclass(frozen=True)
class GBFSpec:
    """Arguments ``xi_1..xi_N`` and the order range of a generalised Bessel function."""

    big_n: int
    xis: tuple
    n_min: int
    n_max: int
    precision_bits: int = 256

    def __post_init__(self):
        if self.big_n < 1:
            raise ValueError("big_n must be >= 1")
        if len(self.xis) != self.big_n:
            raise ValueError(f"expected {self.big_n} arguments, got {len(self.xis)}")
        if self.n_min > self.n_max:
            raise ValueError("empty order range")
        object.__setattr__(self, "xis", tuple(self.xis))


@dataclass(frozen=True)
class GBFResult:
    """Values ``{n: J_n^{(N)}}`` with the certified truncation bound."""

    values: dict
    truncation_bound: object

    def __getitem__(self, n):
        return self.values[n]

    def items(self):
        return self.values.items()


def gbf(spec: GBFSpec, max_order: int = 20000) -> GBFResult:
    """Generalised Bessel function ``J_n^{(N)}(xi)`` for ``n_min <= n <= n_max``.

    The factor ``J_m(2 xi_k)`` is kept for ``|m| <= M_k``.  With
    ``|J_m(x)| <= |x/2|^|m| / |m|!`` the dropped mass of factor ``k`` is at
    most ``tau_k = 2 |xi_k|^(M+1)/(M+1)! / (1 - |xi_k|/(M+2))`` and every
    factor has total mass ``A_k <= 2 exp|xi_k|``, so the error of every
    order is below ``sum_k tau_k prod_{l != k} A_l``.

    Raises
    ------
    TruncationNotCertified
        If the bound cannot reach ``2^-precision_bits`` with orders up to
        ``max_order``.
    """
    bits = spec.precision_bits
    with mpmath.workprec(bits + GUARD_BITS):
        xis = [to_mpf(t) for t in spec.xis]
        target = mpmath.ldexp(1, -bits)
        masses = [2 * mpmath.exp(abs(t)) for t in xis]
        orders = []
        for k, t in enumerate(xis):
            others = mpmath.fprod(masses[:k] + masses[k + 1:])
            share = target / (len(xis) * others)
            m = int(2 * abs(t)) + 2
            while True:
                if m > max_order:
                    raise TruncationNotCertified(
                        f"factor {k + 1} needs more than {max_order} orders")
                a = abs(t)
                tau = (2 * a ** (m + 1) / mpmath.factorial(m + 1) / (1 - a / (m + 2))
                       if a else mpmath.mpf(0))
                if tau < share:
                    break
                m = m * 2
            orders.append((m, tau))
        bound = mpmath.fsum(tau * mpmath.fprod(masses[:k] + masses[k + 1:])
                            for k, (_, tau) in enumerate(orders))

        # sequences as {index: value}; start from the delta at 0
        seq = {0: mpmath.mpf(1)}
        for k, (t, (m, _)) in enumerate(zip(xis, orders), start=1):
            js = bessel_j_range(m, 2 * t, bits)
            factor = {}
            for j in range(-m, m + 1):
                val = js[abs(j)]
                if j < 0 and j % 2:
                    val = -val
                if val:
                    factor[k * j] = val
            new = {}
            for i, a in seq.items():
                for j, b in factor.items():
                    new[i + j] = new.get(i + j, 0) + a * b
            seq = new
        values = {n: seq.get(n, mpmath.mpf(0)) for n in range(spec.n_min, spec.n_max + 1)}
    return GBFResult(values, bound)


def gbf_quadrature(n: int, xis, nodes: int | None = None, precision_bits: int = 256):
    """Independent trapezoidal evaluation of ``J_n^{(N)}(xi)``."""
    with mpmath.workprec(precision_bits + GUARD_BITS):
        freqs = [(k, 2 * to_mpf(t)) for k, t in enumerate(xis, start=1)]
    return _fourier_quadrature(n, freqs, nodes, precision_bits)


def asymptotic_xis(thetas) -> tuple:
    """``xi_k = (-1)^(k+1) theta_k / k``.

    With this choice ``J_n^{(N)}(xi)`` is the ``n``-th Fourier coefficient
    of ``prod_k exp((-1)^(k+1) theta_k/k (e^{ik beta} - e^{-ik beta}))``.
    """
    out = []
    for k, t in enumerate(thetas, start=1):
        t = to_mpf(t)
        out.append((t if k % 2 else -t) / k)
    return tuple(out)


def compare_asymptotics(x, xis=None, regime_fraction: float = 0.05) -> list:
    """Tabulate ``x_n`` against ``(-1)^n J_n^{(N)}(xi)``.

    Parameters
    ----------
    x : OPUCSequence
    xis : sequence, optional
        GBF arguments; defaults to :func:`asymptotic_xis` of the thetas.
    regime_fraction : float
        Rows from the first ``n >= 1`` after which ``|difference|`` stays
        below ``regime_fraction * max |x_n|`` are flagged as asymptotic.

    Returns
    -------
    list of dict
        Keys ``n, x_n, gbf, difference, ratio, asymptotic`` for ``n >= 1``.
    """
    params = x.params
    bits = params.precision_bits
    if xis is None:
        xis = asymptotic_xis(params.theta_mpf)
    res = gbf(GBFSpec(params.big_n, xis, 1, x.n_max, bits))
    rows = []
    with mpmath.workprec(bits + GUARD_BITS):
        for n in range(1, x.n_max + 1):
            g = res[n] if n % 2 == 0 else -res[n]
            xn = x.x[n]
            diff = xn - g
            ratio = xn / g if g else (mpmath.mpf(1) if xn == 0 else mpmath.inf)
            rows.append({"n": n, "x_n": xn, "gbf": g, "difference": diff, "ratio": ratio})
        scale = max((abs(r["x_n"]) for r in rows), default=mpmath.mpf(0))
        threshold = regime_fraction * scale
        onset = len(rows)
        for i in range(len(rows) - 1, -1, -1):
            if abs(rows[i]["difference"]) <= threshold:
                onset = i
            else:
                break
        for i, r in enumerate(rows):
            r["asymptotic"] = i >= onset
    return rows


def comparison_csv(rows, precision_bits: int = 256) -> str:
    """CSV with columns ``n, x_n, gbf, difference, ratio, asymptotic``."""
    out = io.StringIO()
    out.write("n,x_n,gbf,difference,ratio,asymptotic\n")
    for r in rows:
        ratio = r["ratio"]
        ratio_s = "inf" if mpmath.isinf(ratio) else fmt(ratio, precision_bits)
        out.write(",".join([
            str(r["n"]), fmt(r["x_n"], precision_bits), fmt(r["gbf"], precision_bits),
            fmt(r["difference"], precision_bits), ratio_s, "1" if r["asymptotic"] else "0",
        ]) + "\n")
    return out.getvalue()
