"""Continuum limit of the discrete hierarchy.

With a small parameter ``eps`` the scaling is

    theta_i = c_i theta,   theta = d eps^-(2N+1),   n = b d eps^-(2N+1) + t/eps,
    x_{n+K} = (-1)^(n+K) eps u(t + K eps),

where ``c_i = (N-1)!(N+1)!/((N-i)!(N+i)!)``, ``b = (N+1)/N`` and
``d = binomial(2N, N-1)``; in particular ``eps^(2N+1) = d/theta``.  Every
equation term has odd degree in ``x``, so ``(-1)^n`` factors out.  Taylor
expanding ``u`` turns the equation into a series in ``eps`` whose
coefficients are polynomials in ``t, u, u', u'', ...``.  The coefficients of
``eps^-2N .. eps^-1`` must vanish and the ``eps^0`` coefficient (that is,
``theta^-1`` after dividing by ``theta (1 - x_n^2)``) is the limiting ODE.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .errors import LeadingOrderNonzero
from .hierarchy import generate_equation

__all__ = [
    "FormalSeries",
    "scaling_constants",
    "continuum_limit",
    "cancellation_report",
    "ContinuumResult",
]


def scaling_constants(big_n: int):
    """``(b, d, [c_1..c_N])`` of the scaling limit."""
    nn = big_n
    b = Fraction(nn + 1, nn)
    d = comb(2 * nn, nn - 1)
    cs = [Fraction(factorial(nn - 1) * factorial(nn + 1),
                   factorial(nn - i) * factorial(nn + i)) for i in range(1, nn + 1)]
    return b, d, cs


class FormalSeries:
    """Truncated series in ``eps`` with coefficients in ``Q[t, u, u', ...]``.

    Keys are ``(eps power, t power, (e_0, e_1, ..., e_D))`` where ``e_m`` is
    the exponent of the ``m``-th derivative of ``u``.  Terms with an eps power
    above ``max_power`` are dropped on every product.
    """

    __slots__ = ("terms", "n_derivs", "max_power")

    def __init__(self, terms, n_derivs, max_power):
        self.terms = {k: c for k, c in terms.items() if c}
        self.n_derivs = n_derivs
        self.max_power = max_power

    @classmethod
    def constant(cls, c, n_derivs, max_power, eps_power=0, t_power=0):
        return cls({(eps_power, t_power, (0,) * (n_derivs + 1)): Fraction(c)},
                   n_derivs, max_power)

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return FormalSeries(out, self.n_derivs, self.max_power)

    def scale(self, c):
        return FormalSeries({k: v * c for k, v in self.terms.items()},
                            self.n_derivs, self.max_power)

    def __mul__(self, other):
        out = {}
        top = self.max_power
        for (p1, t1, e1), c1 in self.terms.items():
            for (p2, t2, e2), c2 in other.terms.items():
                p = p1 + p2
                if p > top:
                    continue
                k = (p, t1 + t2, tuple(a + b for a, b in zip(e1, e2)))
                out[k] = out.get(k, 0) + c1 * c2
        return FormalSeries(out, self.n_derivs, top)

    def min_power(self):
        return min((k[0] for k in self.terms), default=None)

    def coefficient(self, power):
        """Polynomial in ``t, u, u', ...`` multiplying ``eps**power``."""
        return ODEPolynomial({(t, e): c for (p, t, e), c in self.terms.items() if p == power})


class ODEPolynomial:
    """Polynomial in ``t`` and the derivatives of ``u``; keys ``(t power, exponents)``."""

    def __init__(self, terms):
        self.terms = {k: Fraction(c) for k, c in terms.items() if c}

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, ODEPolynomial) and self.terms == other.terms

    def scale(self, c):
        return ODEPolynomial({k: v * c for k, v in self.terms.items()})

    def coeff(self, t_power, exponents):
        for (tp, e), c in self.terms.items():
            if tp == t_power and tuple(e[:len(exponents)]) == tuple(exponents) \
                    and not any(e[len(exponents):]):
                return c
        return Fraction(0)

    @classmethod
    def from_dict(cls, spec):
        """Build from ``{(t power, ((deriv order, exponent), ...)): coefficient}``.

        Repeated keys are not possible in a dict; callers summing duplicate
        monomials should add the coefficients first.
        """
        width = 1 + max((max((m for m, _ in e), default=0) for (_, e) in spec), default=0)
        terms = {}
        for (tp, e), c in spec.items():
            exps = [0] * width
            for m, k in e:
                exps[m] = k
            terms[(tp, tuple(exps))] = c
        return cls(terms)

    def normalized(self):
        """Exponent tuples with trailing zeros removed, for comparison."""
        out = {}
        for (tp, e), c in self.terms.items():
            e = list(e)
            while e and e[-1] == 0:
                e.pop()
            out[(tp, tuple(e))] = c
        return out

    def _sort_key(self, item):
        (tp, e), _ = item
        order = sum(m * k for m, k in enumerate(e))
        return (-tp, -sum(e), order, tuple(-k for k in e))

    def _factor_text(self, m, k, latex):
        if latex:
            base = "u" + ("'" * m if m <= 3 else f"^{{({m})}}")
            return base if k == 1 else (f"{base}^{{{k}}}" if m == 0 else f"({base})^{{{k}}}")
        base = "u" + ("'" * m if m <= 3 else f"^({m})")
        return base if k == 1 else f"{base}^{k}"

    def render(self, latex=False):
        pieces = []
        for (tp, e), c in sorted(self.terms.items(), key=self._sort_key):
            factors = []
            if tp:
                factors.append("t" if tp == 1 else f"t^{tp}")
            factors.extend(self._factor_text(m, k, latex) for m, k in enumerate(e) if k)
            a = abs(c)
            if latex and a.denominator != 1:
                cs = f"\\frac{{{a.numerator}}}{{{a.denominator}}}"
            else:
                cs = str(a)
            sep = " " if latex else "*"
            body = sep.join(([cs] if a != 1 or not factors else []) + factors)
            pieces.append((c < 0, body))
        if not pieces:
            return "0"
        out = []
        for i, (neg, body) in enumerate(pieces):
            if i == 0:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"ODEPolynomial({self.render()})"


@dataclass(frozen=True)
class ContinuumResult:
    """Limiting ODE and the certified cancellations below it."""

    big_n: int
    ode: ODEPolynomial
    raw: ODEPolynomial
    normalization: Fraction
    cancelled_orders: tuple
    series: FormalSeries

    def theta_exponent(self, eps_power):
        """``eps^k`` is ``(d/theta)^(k/(2N+1))``; returns ``-k/(2N+1)``."""
        return Fraction(-eps_power, 2 * self.big_n + 1)

    def to_json_obj(self):
        return {
            "N": self.big_n,
            "ode": self.ode.render(),
            "normalization": str(self.normalization),
            "cancelled": [
                {"eps_power": p, "theta_power": str(self.theta_exponent(p)), "zero": True}
                for p in self.cancelled_orders
            ],
        }

    def to_json(self):
        return json.dumps(self.to_json_obj(), indent=1)


def _taylor(shift, n_derivs, max_power, sign):
    """``sign * eps * u(t + shift*eps)`` up to ``u^(n_derivs)``."""
    terms = {}
    for m in range(n_derivs + 1):
        e = [0] * (n_derivs + 1)
        e[m] = 1
        c = Fraction(shift ** m, factorial(m)) * sign
        if c:
            terms[(1 + m, 0, tuple(e))] = c
    return FormalSeries(terms, n_derivs, max_power)


def _expand(big_n, n_derivs=None):
    nn = big_n
    if n_derivs is None:
        n_derivs = 2 * nn + 2
    b, d, cs = scaling_constants(nn)
    lhs = generate_equation(nn).lhs
    top = 0
    big = 2 * nn + 1
    one = FormalSeries.constant(1, n_derivs, top)
    n_series = (FormalSeries.constant(b * d, n_derivs, top, eps_power=-big)
                + FormalSeries.constant(1, n_derivs, top, eps_power=-1, t_power=1))
    cache = {}
    total = FormalSeries({}, n_derivs, top)
    for (xs, ths, npow), c in lhs.items():
        term = one.scale(c)
        for i, p in ths:
            term = term * FormalSeries.constant((cs[i - 1] * d) ** p, n_derivs, top,
                                                eps_power=-big * p)
        for _ in range(npow):
            term = term * n_series
        for k, p in xs:
            # (-1)^(n+k): (-1)^n is common to all terms (odd x-degree)
            sign = -1 if k % 2 else 1
            if (k, sign) not in cache:
                cache[(k, sign)] = _taylor(k, n_derivs, top, sign)
            for _ in range(p):
                term = term * cache[(k, sign)]
        total = total + term
    return total


def continuum_limit(big_n: int) -> ContinuumResult:
    """Substitute the scaling into the ``N``-th equation and extract the ODE.

    The returned ``ode`` is normalised so the coefficient of ``t u`` is +1;
    ``normalization`` is the factor applied to the raw ``eps^0`` coefficient.

    Raises
    ------
    LeadingOrderNonzero
        If some coefficient of ``eps^k``, ``k < 0``, is not identically zero.
    """
    series = _expand(big_n)
    cancelled = []
    for p in range(-(2 * big_n + 1), 0):
        coeff = series.coefficient(p)
        if not coeff.is_zero():
            raise LeadingOrderNonzero(
                f"coefficient of eps^{p} does not cancel: {coeff.render()}", coeff)
        cancelled.append(p)
    raw = series.coefficient(0)
    tu = raw.coeff(1, (1,))
    if tu == 0:
        raise LeadingOrderNonzero("no t*u term in the limiting equation", raw)
    norm = 1 / tu
    return ContinuumResult(big_n, raw.scale(norm), raw, norm, tuple(cancelled), series)


def cancellation_report(big_n: int) -> dict:
    """Certify the vanishing of every order below the limiting one.

    Returns
    -------
    dict
        ``orders``: list of ``{eps_power, theta_power, zero}`` (``zero`` is
        always True; a nonzero order raises), plus the normalised ODE.
    """
    res = continuum_limit(big_n)
    b, d, cs = scaling_constants(big_n)
    return {
        "N": big_n,
        "b": b,
        "d": d,
        "c": cs,
        "orders": [{"eps_power": p, "theta_power": res.theta_exponent(p), "zero": True}
                   for p in res.cancelled_orders],
        "ode": res.ode,
        "normalization": res.normalization,
    }
