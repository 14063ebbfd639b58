from fractions import Fraction

import mpmath
import pytest

from conftest import numeric_chain
from toeplitz_dpii.errors import WindowUnderflow
from toeplitz_dpii.hierarchy import (
    equation_consistency, generate_equation, residual_trace, scalar_L)
from toeplitz_dpii.opuc import szego_sequence
from toeplitz_dpii.shiftpoly import ShiftPolynomial, n_sym, perm, theta, v, x
from toeplitz_dpii.symbolcore import SymbolParams, fourier_table

HALF = Fraction(1, 2)


def test_L_of_zero():
    assert scalar_L(ShiftPolynomial(), -theta(1) * HALF) == -theta(1) * x(1)
    assert scalar_L(ShiftPolynomial()) == 0


def test_L_second_step():
    got = scalar_L(-theta(2) * x(1), -theta(1) * HALF)
    assert got == theta(2) * (x(0) * x(1) ** 2 - v(1) * x(2)) - theta(1) * x(1)


def test_N1_equation():
    eq = generate_equation(1)
    assert eq.lhs == n_sym() * x(0) + theta(1) * v(0) * (x(1) + x(-1))
    assert eq.to_text() == "n*x[n] + th1*(1 - x[n]^2)*(x[n+1] + x[n-1])"
    assert eq.to_latex().endswith("= 0")


@pytest.mark.parametrize("big_n,count", [(1, 5), (2, 19), (3, 69), (4, 246)])
def test_term_counts(big_n, count):
    assert len(generate_equation(big_n).lhs) == count


@pytest.mark.parametrize("big_n", [1, 2, 3, 4])
def test_structure(big_n):
    lhs = generate_equation(big_n).lhs
    assert perm(lhs) == lhs
    assert lhs.window == (-big_n, big_n)
    assert lhs.thetas_used() == list(range(1, big_n + 1))
    # n enters only through n x_n; every term is odd in x
    assert all(npow == 0 or (xs == ((0, 1),) and not ths) for (xs, ths, npow) in lhs.terms)
    assert all(sum(p for _, p in xs) % 2 == 1 for (xs, _, _) in lhs.terms)


@pytest.mark.parametrize("big_n", [2, 3, 4])
def test_top_theta_off_gives_previous_equation(big_n):
    lhs = generate_equation(big_n).lhs.subs_theta({big_n: 0})
    assert lhs == generate_equation(big_n - 1).lhs


@pytest.mark.parametrize("big_n", [1, 2, 3, 4])
def test_scalar_and_matrix_routes_agree(big_n):
    rep = equation_consistency(big_n)
    assert rep["sign"] in (1, -1)
    assert rep["equation"] == generate_equation(big_n).lhs


def test_json_obj():
    obj = generate_equation(2).to_json_obj()
    assert obj["N"] == 2
    assert ShiftPolynomial.from_json_obj(obj["terms"]) == generate_equation(2).lhs


def test_residual_window_underflow():
    _, _, _, xs = numeric_chain(2, ("3", "1.2"), 42)
    eq = generate_equation(2)
    with pytest.raises(WindowUnderflow):
        residual_trace(eq, xs, [1])
    with pytest.raises(WindowUnderflow):
        residual_trace(eq, xs, [41])


def test_residual_zero_symbol():
    params = SymbolParams(2, ("0", "0"))
    xs = szego_sequence(fourier_table(params, 10), 10)
    assert all(r == 0 for r in residual_trace(generate_equation(2), xs, range(2, 9)))


@pytest.mark.parametrize("thetas", [("3", "1.2", "2.6", "-0.7"), ("0.5", "-1", "0.25", "1.5")])
def test_N4_numeric(thetas):
    params = SymbolParams(4, thetas)
    xs = szego_sequence(fourier_table(params, 24), 24)
    res = residual_trace(generate_equation(4), xs, range(4, 21), relative=True)
    assert max(abs(r) for r in res) < mpmath.mpf("1e-60")


def test_wrong_equation_has_large_residual():
    _, _, _, xs = numeric_chain(2, ("3", "1.2"), 42)
    eq = generate_equation(2)
    bad = type(eq)(2, eq.lhs + theta(2) * x(0), eq.t_chain)
    res = residual_trace(bad, xs, range(2, 20), relative=True)
    assert max(abs(r) for r in res) > mpmath.mpf("1e-5")
