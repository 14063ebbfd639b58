"""Lax matrices ``U(n;z)`` and ``T(n;z)`` over the shift-polynomial ring.

``U(n;z) = sigma_+ z + U_0(n)`` with ``sigma_+ = [[1, 0], [0, 0]]`` and

    U_0 = [[x_n x_{n+1}, -x_{n+1}], [-v_{n+1} x_n, v_{n+1}]],  v_j = 1 - x_j^2.

``T(n;z) = sum_{k=1}^{2N+1} T_k(n) z^{N-k}`` starts from
``T_1 = (theta_N/2) sigma_3``.  ``T_2..T_{N+1}`` come from the z-power
equations of ``sigma_+ - T(n+1;z) U(n;z) + U(n;z) T(n;z) = 0``; the diagonal
needs a discrete integration, the off-diagonal entries are explicit.  The
rest is filled in by ``T_k = -K T_{2N+2-k} K`` with
``K = [[x_n, -1], [-v_n, -x_n]]`` (``K^2 = I``).
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import GaugeMismatch, IdentityViolation, UnexpectedResidual
from .shiftpoly import ShiftPolynomial, const, delta, delta_inverse, n_sym, perm, shift, theta, v, x

__all__ = [
    "LaxMatrix",
    "build_U",
    "build_T",
    "build_K",
    "verify_identities",
    "compatibility_residual",
    "cresswell_joshi_map",
    "scalar_relation",
]

ZERO = ShiftPolynomial()
HALF = Fraction(1, 2)


# -- 2x2 matrices of ShiftPolynomials (tuples of rows) -------------------------
def mat(a, b, c, d):
    return ((a, b), (c, d))


def mzero():
    return mat(ZERO, ZERO, ZERO, ZERO)


def midentity():
    one = const(1)
    return mat(one, ZERO, ZERO, one)


def madd(p, q):
    return tuple(tuple(p[i][j] + q[i][j] for j in range(2)) for i in range(2))


def msub(p, q):
    return tuple(tuple(p[i][j] - q[i][j] for j in range(2)) for i in range(2))


def mscale(c, p):
    return tuple(tuple(c * p[i][j] for j in range(2)) for i in range(2))


def mmul(p, q):
    return tuple(tuple(p[i][0] * q[0][j] + p[i][1] * q[1][j] for j in range(2))
                 for i in range(2))


def mmap(fn, p):
    return tuple(tuple(fn(p[i][j]) for j in range(2)) for i in range(2))


def miszero(p):
    return all(p[i][j].is_zero() for i in range(2) for j in range(2))


SIGMA_PLUS = mat(const(1), ZERO, ZERO, ZERO)
SIGMA_3 = mat(const(1), ZERO, ZERO, const(-1))


class LaxMatrix:
    """Laurent polynomial in ``z`` with 2x2 shift-polynomial coefficients.

    Parameters
    ----------
    coeff : dict
        ``{power: ((a, b), (c, d))}``; zero matrices are dropped.
    big_n : int, optional
        Set for ``T`` so that :meth:`T_k` can translate indices to powers.
    """

    def __init__(self, coeff, big_n=None):
        self.coeff = {k: m for k, m in coeff.items() if not miszero(m)}
        self.big_n = big_n

    @property
    def z_min(self):
        return min(self.coeff, default=0)

    @property
    def z_max(self):
        return max(self.coeff, default=0)

    def __getitem__(self, power):
        return self.coeff.get(power, mzero())

    def T_k(self, k):
        """Coefficient ``T_k`` of ``z^{N-k}``."""
        return self[self.big_n - k]

    def __add__(self, other):
        out = dict(self.coeff)
        for k, m in other.coeff.items():
            out[k] = madd(out[k], m) if k in out else m
        return LaxMatrix(out)

    def __neg__(self):
        return LaxMatrix({k: mscale(-1, m) for k, m in self.coeff.items()})

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other):
        out = {}
        for a, ma in self.coeff.items():
            for b, mb in other.coeff.items():
                prod = mmul(ma, mb)
                out[a + b] = madd(out[a + b], prod) if a + b in out else prod
        return LaxMatrix(out)

    def map(self, fn):
        return LaxMatrix({k: mmap(fn, m) for k, m in self.coeff.items()}, self.big_n)

    def shift(self, s):
        """Lattice shift ``n -> n + s`` of every entry."""
        return self.map(lambda p: shift(p, s))

    def trace(self):
        return {k: m[0][0] + m[1][1] for k, m in self.coeff.items()}

    def is_zero(self):
        return not self.coeff

    def __eq__(self, other):
        return isinstance(other, LaxMatrix) and self.coeff == other.coeff

    def to_json_obj(self):
        return {
            str(k): [[self.coeff[k][i][j].to_json_obj() for j in range(2)] for i in range(2)]
            for k in sorted(self.coeff, reverse=True)
        }

    def to_json(self):
        return json.dumps(self.to_json_obj())

    def to_text(self):
        lines = []
        for k in sorted(self.coeff, reverse=True):
            m = self.coeff[k]
            rows = "; ".join(", ".join(m[i][j].to_grouped_text() for j in range(2)) for i in range(2))
            lines.append(f"z^{k}: [{rows}]")
        return "\n".join(lines)

    def to_latex(self):
        parts = []
        for k in sorted(self.coeff, reverse=True):
            m = self.coeff[k]
            body = r" \\ ".join(" & ".join(m[i][j].to_grouped_latex() for j in range(2))
                                for i in range(2))
            zpow = "" if k == 0 else (f"z^{{{k}}}" if k != 1 else "z")
            parts.append(f"{zpow}\\begin{{pmatrix}} {body} \\end{{pmatrix}}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"LaxMatrix(z^{self.z_min}..z^{self.z_max})"


def build_U() -> LaxMatrix:
    """``U(n;z) = sigma_+ z + U_0(n)``."""
    u0 = mat(x(0) * x(1), -x(1), -v(1) * x(0), v(1))
    return LaxMatrix({1: SIGMA_PLUS, 0: u0})


def build_K(s=0):
    """``K(n+s) = [[x, -1], [-v, -x]]`` at ``n + s``."""
    return mat(x(s), const(-1), -v(s), -x(s))


def build_T(big_n: int) -> LaxMatrix:
    """Build ``T(n;z)`` for the ``N``-th member of the hierarchy.

    The entries of ``T_{i+1}`` for ``i = 1..N`` are

    * ``Delta T_{i+1,11} = -x_n x_{n+1} Delta T_{i,11} + x_n v_{n+1} T_{i,12}(n+1)
      - x_{n+1} T_{i,21}(n) + [i == N]``,
    * ``T_{i+1,12} = -x_{n+1} T_{i,11}(n+1) + v_{n+1} T_{i,12}(n+1)
      - x_n x_{n+1} T_{i,12} + x_{n+1} T_{i,22}``,
    * ``T_{i+1,21}(n+1) = -x_n x_{n+1} T_{i,21}(n+1) + x_n v_{n+1} T_{i,22}(n+1)
      - x_n v_{n+1} T_{i,11} + v_{n+1} T_{i,21}``,

    with ``T_{i+1,22} = -T_{i+1,11}`` for ``i < N`` and
    ``T_{N+1,22} = n - T_{N+1,11}``.  The integration constant makes the
    x-free part of ``T_{i+1,11}`` equal to ``theta_{N-i}/2`` for ``i < N``
    and ``n`` for ``i = N``.

    Raises
    ------
    NotSummable
        Propagated from the discrete integration.
    """
    if big_n < 1:
        raise ValueError("big_n must be >= 1")
    nn = big_n
    x0, x1 = x(0), x(1)
    v1 = v(1)
    x0x1 = x0 * x1
    x0v1 = x0 * v1
    t1 = theta(nn) * HALF
    blocks = {1: mat(t1, ZERO, ZERO, -t1)}
    for i in range(1, nn + 1):
        (a, b), (c, d) = blocks[i]
        rhs11 = -x0x1 * delta(a) + x0v1 * shift(b, 1) - x1 * c
        if i == nn:
            rhs11 = rhs11 + 1
            a_new = delta_inverse(rhs11, const(0))
        else:
            a_new = delta_inverse(rhs11, theta(nn - i) * HALF)
        b_new = -x1 * shift(a, 1) + v1 * shift(b, 1) - x0x1 * b + x1 * d
        c_up = -x0x1 * shift(c, 1) + x0v1 * shift(d, 1) - x0v1 * a + v1 * c
        c_new = shift(c_up, -1)
        d_new = (n_sym() - a_new) if i == nn else -a_new
        blocks[i + 1] = mat(a_new, b_new, c_new, d_new)
    k_mat = build_K()
    for k in range(nn + 2, 2 * nn + 2):
        blocks[k] = mscale(-1, mmul(mmul(k_mat, blocks[2 * nn + 2 - k]), k_mat))
    return LaxMatrix({nn - k: m for k, m in blocks.items()}, big_n=nn)


def _fail(exc, what, residual):
    raise exc(f"{what}: residual {residual.to_text()}", residual)


def scalar_relation(T: LaxMatrix, big_n: int) -> ShiftPolynomial:
    """Off-diagonal factor ``R_12`` of ``T_{N+1} + K T_{N+1} K - n I``.

    That matrix is always ``R_12 [[-x_n, 1], [v_n, x_n]]``; ``R_12 = 0`` is
    (minus) the hierarchy equation.
    """
    (a, b), (c, _d) = T.T_k(big_n + 1)
    return n_sym() * x(0) + v(0) * b + c - 2 * x(0) * a


def verify_identities(T: LaxMatrix, big_n: int) -> dict:
    """Check the algebraic identities satisfied by ``T`` as exact polynomials.

    Checks
    ------
    * ``Tr T_k = 0`` except ``Tr T_{N+1} = n``;
    * ``K^2 = I`` and ``T_j = -K T_{2N+2-j} K`` for ``j = 1..N``;
    * ``T_{N+1} + K T_{N+1} K - n I = R_12 [[-x_n, 1], [v_n, x_n]]``, i.e. the
      middle coefficient is self-conjugate up to the scalar relation;
    * ``C_i = alpha_i I`` for ``i = 1..N`` and
      ``C_{N+1} = theta_N n sigma_+ + alpha_{N+1} I`` where
      ``C_i = sum_{a+b=i+1} T_a T_b`` are the coefficients of ``T^2``;
    * ``T_{i,21} = v_n Perm(T_{i,12})`` for ``i = 1..N+1``.

    Returns
    -------
    dict
        ``alphas`` (``{i: alpha_i}``), ``scalar_relation`` (``R_12``) and the
        list of passed ``checks``.

    Raises
    ------
    IdentityViolation
        Carrying the offending residual polynomial.
    """
    nn = big_n
    checks = []
    n_poly = n_sym()
    for k in range(1, 2 * nn + 2):
        tr = T.T_k(k)[0][0] + T.T_k(k)[1][1]
        expected = n_poly if k == nn + 1 else ZERO
        if tr != expected:
            _fail(IdentityViolation, f"trace of T_{k}", tr - expected)
    checks.append("trace")

    k_mat = build_K()
    k_sq = msub(mmul(k_mat, k_mat), midentity())
    if not miszero(k_sq):
        _fail(IdentityViolation, "K^2 = I", k_sq[0][0] + k_sq[0][1] + k_sq[1][0] + k_sq[1][1])
    for j in range(1, nn + 1):
        res = madd(T.T_k(j), mmul(mmul(k_mat, T.T_k(2 * nn + 2 - j)), k_mat))
        for row in res:
            for e in row:
                if e:
                    _fail(IdentityViolation, f"K-symmetry of T_{j}", e)
    checks.append("K-symmetry")

    mid = T.T_k(nn + 1)
    r_mat = msub(madd(mid, mmul(mmul(k_mat, mid), k_mat)), mscale(n_poly, midentity()))
    r12 = scalar_relation(T, nn)
    pattern = mat(-x(0), const(1), v(0), x(0))
    diff = msub(r_mat, mscale(r12, pattern))
    for row in diff:
        for e in row:
            if e:
                _fail(IdentityViolation, "middle coefficient symmetry", e)
    checks.append("middle-symmetry")

    alphas = {}
    for i in range(1, nn + 2):
        c_i = mzero()
        for a in range(1, i + 1):
            c_i = madd(c_i, mmul(T.T_k(a), T.T_k(i + 1 - a)))
        (c11, c12), (c21, c22) = c_i
        for what, e in (("C_%d,12" % i, c12), ("C_%d,21" % i, c21)):
            if e:
                _fail(IdentityViolation, what, e)
        expected_gap = theta(nn) * n_poly if i == nn + 1 else ZERO
        gap = c11 - c22 - expected_gap
        if gap:
            _fail(IdentityViolation, f"C_{i} diagonal", gap)
        alpha = c22
        if alpha.window is not None or not alpha.n_free():
            _fail(IdentityViolation, f"alpha_{i} is not constant", alpha)
        alphas[i] = alpha
    checks.append("C-scalar")

    for i in range(1, nn + 2):
        (_, b), (c, _) = T.T_k(i)
        res = c - v(0) * perm(b)
        if res:
            _fail(IdentityViolation, f"Perm relation for T_{i}", res)
    checks.append("perm-relation")
    return {"alphas": alphas, "scalar_relation": r12, "checks": checks}


def compatibility_residual(T: LaxMatrix, U: LaxMatrix, big_n: int) -> ShiftPolynomial:
    """Scalar left over by ``sigma_+ - T(n+1;z) U(n;z) + U(n;z) T(n;z)``.

    Every z-coefficient except ``z^{-1}`` must vanish identically.  The
    ``z^{-1}`` coefficient must equal
    ``-K(n+1) (R(n+1) sigma_+ - sigma_+ R(n)) K(n)`` with
    ``R = R_12 [[-x_n, 1], [v_n, x_n]]``, so it vanishes exactly when
    ``R_12 = 0``.  Returns ``-R_12``, the hierarchy equation.

    Raises
    ------
    UnexpectedResidual
        If any coefficient deviates from this structure.
    """
    zc = LaxMatrix({0: SIGMA_PLUS}) - T.shift(1) @ U + U @ T
    r12 = scalar_relation(T, big_n)
    r_mat = LaxMatrix({0: mscale(r12, mat(-x(0), const(1), v(0), x(0)))})
    inner = r_mat.shift(1) @ LaxMatrix({0: SIGMA_PLUS}) - LaxMatrix({0: SIGMA_PLUS}) @ r_mat
    expected = -(LaxMatrix({0: build_K(1)}) @ inner @ LaxMatrix({0: build_K(0)}))
    expected = LaxMatrix({-1: expected[0]})
    diff = zc - expected
    for k, m in diff.coeff.items():
        for row in m:
            for e in row:
                if e:
                    _fail(UnexpectedResidual, f"compatibility condition at z^{k}", e)
    return -r12


def cresswell_joshi_map(T: LaxMatrix, U: LaxMatrix):
    """Gauge ``(U, T)`` into the pair ``(L_n(z), M_n(z))``.

    ``L_{ij} = s_i s_j z^{j-i-1} (A_n U(n-1;z^2) A_{n-1}^{-1})_{ij}`` with
    ``A_n = [[1, 0], [-x_n, 1]]`` and ``s = (1, -1)``; it must reduce to
    ``[[z, x_n], [x_n, 1/z]]``.

    ``M_n(z) = z^{-1} diag(3/2 - n, 1/2 - n)
    + 2 z sigma_3 diag(z, 1) A_{n-1} T(n-1;z^2) A_{n-1}^{-1} diag(1/z, 1) sigma_3``
    must be traceless with powers inside ``[-2N-2, 2N-1]``.

    Raises
    ------
    GaugeMismatch
    """
    big_n = T.big_n

    def a_mat(s):
        return mat(const(1), ZERO, -x(s), const(1))

    def a_inv(s):
        return mat(const(1), ZERO, x(s), const(1))

    def squared(lm):
        return LaxMatrix({2 * k: m for k, m in lm.coeff.items()})

    sign = (1, -1)
    core = LaxMatrix({0: a_mat(0)}) @ squared(U.shift(-1)) @ LaxMatrix({0: a_inv(-1)})
    l_out = {}
    for k, m in core.coeff.items():
        for i in range(2):
            for j in range(2):
                e = m[i][j]
                if not e:
                    continue
                power = k + j - i - 1
                cur = l_out.setdefault(power, [[ZERO, ZERO], [ZERO, ZERO]])
                cur[i][j] = cur[i][j] + sign[i] * sign[j] * e
    L = LaxMatrix({k: tuple(tuple(r) for r in m) for k, m in l_out.items()})
    expected_L = LaxMatrix({1: mat(const(1), ZERO, ZERO, ZERO),
                            0: mat(ZERO, x(0), x(0), ZERO),
                            -1: mat(ZERO, ZERO, ZERO, const(1))})
    if L != expected_L:
        bad = (L - expected_L).coeff
        k = next(iter(bad))
        _fail(GaugeMismatch, f"L_n at z^{k}", bad[k][0][0] + bad[k][0][1] + bad[k][1][0] + bad[k][1][1])

    conj = LaxMatrix({0: a_mat(-1)}) @ squared(T.shift(-1)) @ LaxMatrix({0: a_inv(-1)})
    m_out = {}
    for k, m in conj.coeff.items():
        for i in range(2):
            for j in range(2):
                e = m[i][j]
                if not e:
                    continue
                # diag(z,1) . diag(1/z,1) shifts entry (i,j) by (1-i)-(1-j); sigma_3 twice
                power = k + (1 - i) - (1 - j) + 1
                cur = m_out.setdefault(power, [[ZERO, ZERO], [ZERO, ZERO]])
                cur[i][j] = cur[i][j] + 2 * sign[i] * sign[j] * e
    m_out = {k: tuple(tuple(r) for r in m) for k, m in m_out.items()}
    n_poly = n_sym()
    diag = mat(HALF * 3 - n_poly, ZERO, ZERO, HALF - n_poly)
    m_out[-1] = madd(m_out.get(-1, mzero()), diag)
    M = LaxMatrix(m_out)
    for k, tr in M.trace().items():
        if tr:
            _fail(GaugeMismatch, f"trace of M_n at z^{k}", tr)
    lo, hi = -2 * big_n - 2, 2 * big_n - 1
    if M.z_min < lo or M.z_max > hi:
        raise GaugeMismatch(f"M_n has powers z^{M.z_min}..z^{M.z_max} outside [{lo}, {hi}]")
    return L, M
