"""Exact sparse polynomials in shifted lattice variables.

The ring is Q[x_{n+j} (j in Z), theta_1, theta_2, ..., n]: the ``x`` are
the values of a lattice function at offsets from the running index ``n``,
the ``theta_i`` are formal parameters and ``n`` is the affine lattice symbol
itself.  On top of the ring this module provides the lattice shift ``S``,
the reflection ``Perm`` (x_{n+j} -> x_{n-j}), the forward difference
``Delta = S - I`` and its inverse on the image of ``Delta``.

Coefficients are :class:`fractions.Fraction` (plain ints where possible);
nothing here touches floating point.
"""

from __future__ import annotations

import json
import os
from fractions import Fraction
from math import comb

from .errors import MissingValue, NotSummable

if os.environ.get("TOEPLITZ_DPII_PURE_PYTHON"):
    from . import _kernels_py as _k
    BACKEND = "python"
else:
    try:
        from . import _kernels as _k
        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _kernels_py as _k
        BACKEND = "python"

__all__ = [
    "BACKEND",
    "ShiftPolynomial",
    "OperatorExpr",
    "x",
    "v",
    "theta",
    "n_sym",
    "const",
    "shift",
    "perm",
    "delta",
    "delta_inverse",
    "eval_numeric",
]

_ONE = ((), (), 0)


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class ShiftPolynomial:
    """Immutable sparse polynomial; ``terms`` maps monomial -> coefficient.

    See :mod:`toeplitz_dpii._kernels_py` for the monomial layout.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        self._terms = {m: _norm(c) for m, c in terms.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, terms):
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self):
        return not self._terms

    # -- ring structure ---------------------------------------------------
    @staticmethod
    def _coerce(other):
        if isinstance(other, ShiftPolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ShiftPolynomial._raw(_k.add_terms(self._terms, other._terms))

    __radd__ = __add__

    def __neg__(self):
        return ShiftPolynomial._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ShiftPolynomial._raw(_k.add_terms(self._terms, other._terms, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return ShiftPolynomial()
            return ShiftPolynomial._raw(
                {m: _norm(c * other) for m, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ShiftPolynomial._raw(_k.mul_terms(self._terms, other._terms))

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- structure --------------------------------------------------------
    @property
    def window(self):
        """``(min shift, max shift)`` over all x variables, or ``None``."""
        shifts = [j for (xs, _, _) in self._terms for j, _ in xs]
        if not shifts:
            return None
        return min(shifts), max(shifts)

    def x_degree(self):
        return max((sum(p for _, p in xs) for (xs, _, _) in self._terms), default=0)

    def constant_term(self):
        return self._terms.get(_ONE, 0)

    def x_free_part(self):
        """Terms that involve no ``x`` at all (polynomial in theta and n)."""
        return ShiftPolynomial._raw({m: c for m, c in self._terms.items() if not m[0]})

    def n_free(self):
        return all(m[2] == 0 for m in self._terms)

    def truncate_x_degree(self, max_degree):
        """Drop all terms whose x-degree exceeds ``max_degree``."""
        return ShiftPolynomial._raw({
            m: c for m, c in self._terms.items()
            if sum(p for _, p in m[0]) <= max_degree})

    def subs_theta(self, values):
        """Substitute exact rationals for some theta's; ``values`` maps index -> value."""
        out = {}
        for (xs, ths, npow), c in self._terms.items():
            keep = []
            for i, p in ths:
                if i in values:
                    c = c * Fraction(values[i]) ** p
                else:
                    keep.append((i, p))
            if not c:
                continue
            m = (xs, tuple(keep), npow)
            out[m] = out.get(m, 0) + c
        return ShiftPolynomial(out)

    def coefficient_in_theta(self, ths):
        """Part of the polynomial multiplying exactly the theta-monomial ``ths``."""
        return ShiftPolynomial._raw({
            (xs, (), npow): c for (xs, t, npow), c in self._terms.items() if t == ths})

    def thetas_used(self):
        return sorted({i for (_, ths, _) in self._terms for i, _ in ths})

    # -- rendering --------------------------------------------------------
    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda mc: _mono_key(mc[0]))

    def to_text(self):
        return _render(self.sorted_terms(), _TEXT)

    def to_latex(self):
        return _render(self.sorted_terms(), _LATEX)

    def to_grouped_text(self):
        return _render_grouped(self, _TEXT)

    def to_grouped_latex(self):
        return _render_grouped(self, _LATEX)

    def to_json_obj(self):
        return [
            {
                "coeff": str(Fraction(c)),
                "x": [list(t) for t in xs],
                "theta": [list(t) for t in ths],
                "n": npow,
            }
            for (xs, ths, npow), c in self.sorted_terms()
        ]

    def to_json(self):
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj):
        terms = {}
        for t in obj:
            m = (tuple(sorted(tuple(p) for p in t["x"])),
                 tuple(sorted(tuple(p) for p in t["theta"])),
                 int(t["n"]))
            terms[m] = terms.get(m, 0) + Fraction(t["coeff"])
        return cls(terms)

    def __repr__(self):
        return f"ShiftPolynomial({self.to_text()})"

    __str__ = to_text


# -- constructors -------------------------------------------------------------
def const(c):
    return ShiftPolynomial({_ONE: c} if c else {})


def x(j=0):
    """The lattice variable ``x_{n+j}``."""
    return ShiftPolynomial._raw({(((j, 1),), (), 0): 1})


def v(j=0):
    """``v_{n+j} = 1 - x_{n+j}**2``."""
    return ShiftPolynomial._raw({_ONE: 1, (((j, 2),), (), 0): -1})


def theta(i):
    if i < 1:
        raise ValueError("theta indices start at 1")
    return ShiftPolynomial._raw({((), ((i, 1),), 0): 1})


def n_sym():
    return ShiftPolynomial._raw({((), (), 1): 1})


# -- polynomials in n alone (dict power -> coefficient) -----------------------
def _npoly_shift(poly, s):
    """Return ``q(n) = poly(n + s)``."""
    if s == 0:
        return dict(poly)
    out = {}
    for k, c in poly.items():
        for i in range(k + 1):
            out[i] = out.get(i, 0) + c * comb(k, i) * s ** (k - i)
    return {i: c for i, c in out.items() if c}


def _npoly_add(a, b, scale=1):
    out = dict(a)
    for k, c in b.items():
        out[k] = out.get(k, 0) + scale * c
    return {k: c for k, c in out.items() if c}


def _npoly_antidifference(c):
    """Solve ``g(n+1) - g(n) = c(n)`` with ``g(0) = 0``.

    Triangular solve in the power basis, top degree first.
    """
    if not c:
        return {}
    d = max(c)
    g = {}
    for i in range(d, -1, -1):
        rhs = Fraction(c.get(i, 0))
        for k in range(i + 2, d + 2):
            if k in g:
                rhs -= g[k] * comb(k, i)
        if rhs:
            g[i + 1] = rhs / (i + 1)
    return {k: _norm(v_) for k, v_ in g.items() if v_}


# -- lattice operators --------------------------------------------------------
def shift(p, s=1):
    """``x_{n+j} -> x_{n+j+s}`` and ``n -> n + s``; theta untouched."""
    if s == 0:
        return p
    terms = _k.shift_xs(p._terms, s)
    if p.n_free():
        return ShiftPolynomial._raw(terms)
    out = {}
    for (xs, ths, npow), c in terms.items():
        if npow == 0:
            m = (xs, ths, 0)
            out[m] = out.get(m, 0) + c
            continue
        for i in range(npow + 1):
            m = (xs, ths, i)
            out[m] = out.get(m, 0) + c * comb(npow, i) * s ** (npow - i)
    return ShiftPolynomial(out)


def perm(p):
    """Reflection ``x_{n+j} -> x_{n-j}``; fixes theta and n.  An involution."""
    out = {}
    for (xs, ths, npow), c in p.items():
        out[(tuple(sorted((-j, q) for j, q in xs)), ths, npow)] = c
    return ShiftPolynomial._raw(out)


def delta(p):
    """Forward difference ``p(n+1) - p(n)``."""
    return shift(p, 1) - p


def delta_inverse(p, constant=None):
    """Antidifference of ``p`` normalised to have no theta-only part, plus ``constant``.

    Monomials are grouped into translation classes ``S^a m0`` (``m0`` with
    minimal shift 0) carrying polynomial-in-``n`` coefficients ``c_a(n)``.
    Writing the result as ``sum_b g_b(n) S^b m0`` turns ``Delta G = p`` into
    the triangular system ``g_{b-1}(n+1) - g_b(n) = c_b(n)``, solved from the
    top shift down; the bottom equation is the summability condition.

    Raises
    ------
    NotSummable
        If ``p`` is not in the image of ``Delta``.
    """
    classes = {}
    pure = {}
    for (xs, ths, npow), c in p.items():
        if not xs:
            pure.setdefault(ths, {})[npow] = c
            continue
        a = xs[0][0]
        pattern = tuple((j - a, q) for j, q in xs)
        cls = classes.setdefault((pattern, ths), {})
        cls.setdefault(a, {})[npow] = c

    out = {}
    for ths, cpoly in pure.items():
        for k, c in _npoly_antidifference(cpoly).items():
            out[((), ths, k)] = c

    failed = {}
    for (pattern, ths), coeffs in classes.items():
        lo, hi = min(coeffs), max(coeffs)
        g = {}
        for b in range(hi, lo, -1):
            nxt = _npoly_add(coeffs.get(b, {}), g.get(b, {}))
            gb = _npoly_shift(nxt, -1)
            if gb:
                g[b - 1] = gb
        check = _npoly_add(coeffs.get(lo, {}), g.get(lo, {}))
        if check:
            for k, c in check.items():
                failed[(tuple((j + lo, q) for j, q in pattern), ths, k)] = c
            continue
        for b, gb in g.items():
            xs = tuple((j + b, q) for j, q in pattern)
            for k, c in gb.items():
                out[(xs, ths, k)] = c
    if failed:
        residual = ShiftPolynomial(failed)
        raise NotSummable(
            f"expression is not a discrete derivative; obstruction: {residual.to_text()}",
            residual)
    result = ShiftPolynomial(out)
    if constant is not None:
        result = result + constant
    return result


def eval_numeric(p, x_values, theta_values, n_value):
    """Evaluate ``p`` at ``n = n_value``.

    Parameters
    ----------
    p : ShiftPolynomial
    x_values : mapping or sequence
        ``x_values[m]`` is the value of ``x_m`` at *absolute* index ``m``; the
        variable ``x_{n+j}`` reads ``x_values[n_value + j]``.
    theta_values : sequence
        ``theta_values[i-1]`` is the value of ``theta_i``.
    n_value : int

    Arithmetic follows the types of the supplied values (mpmath numbers give
    arbitrary precision evaluation at the ambient precision).
    """
    total = 0
    for m, c in p.sorted_terms():
        total = total + term_value(m, c, x_values, theta_values, n_value)
    return total


def term_value(m, c, x_values, theta_values, n_value):
    xs, ths, npow = m
    val = _num(c)
    for j, q in xs:
        idx = n_value + j
        try:
            if idx < 0 and not isinstance(x_values, dict):
                raise IndexError
            val = val * x_values[idx] ** q
        except (KeyError, IndexError):
            raise MissingValue(f"no value supplied for x_{idx}") from None
    for i, q in ths:
        try:
            val = val * theta_values[i - 1] ** q
        except IndexError:
            raise MissingValue(f"no value supplied for theta_{i}") from None
    if npow:
        val = val * n_value ** npow
    return val


def _num(c):
    if isinstance(c, Fraction):
        import mpmath
        return mpmath.mpf(c.numerator) / c.denominator
    return c


# -- operator expressions -----------------------------------------------------
class OperatorExpr:
    """Expression tree of linear lattice operators.

    Built from :meth:`identity`, :meth:`shift`, :meth:`delta`,
    :meth:`delta_inverse`, :meth:`perm` and :meth:`mul`, combined with ``+``,
    ``-``, scalar ``*`` and composition ``@`` (``(A @ B)(u) == A(B(u))``).
    The tree is applied structurally, never expanded, because ``Delta^{-1}``
    is only defined on sums that are exact differences as a whole.
    """

    __slots__ = ("kind", "args")

    def __init__(self, kind, args=()):
        self.kind = kind
        self.args = tuple(args)

    @classmethod
    def identity(cls):
        return cls("I")

    @classmethod
    def shift(cls, s=1):
        return cls("S", (s,))

    @classmethod
    def delta(cls):
        return cls("D")

    @classmethod
    def delta_inverse(cls):
        return cls("Dinv")

    @classmethod
    def perm(cls):
        return cls("P")

    @classmethod
    def mul(cls, p):
        return cls("M", (p,))

    def __add__(self, other):
        return OperatorExpr("+", (self, other))

    def __sub__(self, other):
        return OperatorExpr("+", (self, OperatorExpr("k", (-1, other))))

    def __neg__(self):
        return OperatorExpr("k", (-1, self))

    def __rmul__(self, c):
        return OperatorExpr("k", (c, self))

    def __matmul__(self, other):
        return OperatorExpr("o", (self, other))

    def apply(self, u, constant=None):
        """Apply to ``u``; every ``Delta^{-1}`` node adds ``constant``."""
        kind, args = self.kind, self.args
        if kind == "I":
            return u
        if kind == "S":
            return shift(u, args[0])
        if kind == "D":
            return delta(u)
        if kind == "Dinv":
            return delta_inverse(u, constant)
        if kind == "P":
            return perm(u)
        if kind == "M":
            return args[0] * u
        if kind == "+":
            return args[0].apply(u, constant) + args[1].apply(u, constant)
        if kind == "k":
            return args[0] * args[1].apply(u, constant)
        if kind == "o":
            return args[0].apply(args[1].apply(u, constant), constant)
        raise ValueError(f"unknown operator node {kind!r}")

    __call__ = apply

    def __repr__(self):
        kind, args = self.kind, self.args
        if kind in ("I", "D", "Dinv", "P"):
            return {"I": "I", "D": "Delta", "Dinv": "Delta^-1", "P": "Perm"}[kind]
        if kind == "S":
            return f"S^{args[0]}"
        if kind == "M":
            return f"[{args[0].to_text()}]"
        if kind == "+":
            return f"({args[0]!r} + {args[1]!r})"
        if kind == "k":
            return f"{args[0]}*{args[1]!r}"
        return f"{args[0]!r}.{args[1]!r}"


# -- canonical ordering and rendering -----------------------------------------
def _rank(j):
    # x_n, x_{n+1}, x_{n-1}, x_{n+2}, x_{n-2}, ...
    return 2 * j - 1 if j > 0 else -2 * j


def _mono_key(m):
    xs, ths, npow = m
    deg = sum(q for _, q in xs) + sum(q for _, q in ths) + npow
    return (deg,
            tuple(sorted((_rank(j), -q) for j, q in xs)),
            tuple((i, -q) for i, q in ths),
            -npow)


class _Style:
    def __init__(self, xname, thname, nname, power, times, frac, paren):
        self.xname = xname
        self.thname = thname
        self.nname = nname
        self.power = power
        self.times = times
        self.frac = frac
        self.paren = paren


def _offset(j):
    return "n" if j == 0 else (f"n+{j}" if j > 0 else f"n-{-j}")


_TEXT = _Style(
    xname=lambda j: f"x[{_offset(j)}]",
    thname=lambda i: f"th{i}",
    nname="n",
    power=lambda b, q: b if q == 1 else f"{b}^{q}",
    times="*",
    frac=lambda c: str(c),
    paren=lambda s: f"({s})",
)

_LATEX = _Style(
    xname=lambda j: f"x_{{{_offset(j)}}}",
    thname=lambda i: f"\\theta_{{{i}}}",
    nname="n",
    power=lambda b, q: b if q == 1 else f"{b}^{{{q}}}",
    times=" ",
    frac=lambda c: (str(c) if c.denominator == 1
                    else f"\\frac{{{c.numerator}}}{{{c.denominator}}}"),
    paren=lambda s: f"\\left({s}\\right)",
)


def _factors(m, style):
    xs, ths, npow = m
    out = [style.power(style.thname(i), q) for i, q in ths]
    if npow:
        out.append(style.power(style.nname, npow))
    out.extend(style.power(style.xname(j), q)
               for j, q in sorted(xs, key=lambda t: _rank(t[0])))
    return out


def _term_body(c, factors, style):
    """Render ``|c| * factors``; the sign is handled by the caller."""
    a = abs(Fraction(c))
    if not factors:
        return style.frac(a)
    if a == 1:
        return style.times.join(factors)
    return style.times.join([style.frac(a)] + factors)


def _join(pieces):
    """``pieces`` is a list of (negative?, body)."""
    if not pieces:
        return "0"
    out = []
    for k, (neg, body) in enumerate(pieces):
        if k == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def _render(sorted_terms, style):
    return _join([(c < 0, _term_body(c, _factors(m, style), style))
                  for m, c in sorted_terms])


def divide_by_v(p, j=0):
    """Exact quotient of ``p`` by ``v_{n+j}``, or ``None`` if it does not divide."""
    by_power = {}
    for (xs, ths, npow), c in p.items():
        e = 0
        rest = []
        for s, q in xs:
            if s == j:
                e = q
            else:
                rest.append((s, q))
        by_power.setdefault(e, {})[(tuple(rest), ths, npow)] = c
    if not by_power:
        return ShiftPolynomial()
    top = max(by_power)
    q = {}
    for k in range(top + 1):
        qk = _k.add_terms(by_power.get(k, {}), q.get(k - 2, {}))
        if qk:
            q[k] = qk
    if q.get(top) or q.get(top - 1):
        return None
    out = {}
    for k, qk in q.items():
        for (rest, ths, npow), c in qk.items():
            xs = tuple(sorted(rest + (((j, k),) if k else ())))
            out[(xs, ths, npow)] = c
    return ShiftPolynomial(out)


def _render_grouped(p, style):
    """Group terms by their theta/n monomial and factor ``v_n`` where it divides."""
    groups = {}
    for (xs, ths, npow), c in p.items():
        groups.setdefault((ths, npow), {})[(xs, (), 0)] = c

    def gkey(k):
        ths, npow = k
        return (sum(q for _, q in ths), tuple((i, -q) for i, q in ths), -npow)

    vtext = _render(v(0).sorted_terms(), style)
    pieces = []
    for key in sorted(groups, key=gkey):
        ths, npow = key
        inner = ShiftPolynomial(groups[key])
        prefix = _factors(((), ths, npow), style)
        quotient = divide_by_v(inner) if inner.x_degree() >= 2 else None
        factors = list(prefix)
        body = quotient if quotient is not None and len(quotient) else inner
        if quotient is not None and len(quotient):
            factors.append(style.paren(vtext))
        terms = body.sorted_terms()
        if len(terms) == 1:
            (m, c), = terms
            pieces.append((c < 0, _term_body(c, factors + _factors(m, style), style)))
            continue
        neg = all(c < 0 for _, c in terms)
        if neg:
            terms = [(m, -c) for m, c in terms]
        factors.append(style.paren(_render(terms, style)))
        pieces.append((neg, style.times.join(factors)))
    return _join(pieces)
