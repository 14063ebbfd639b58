"""Fourier coefficients, Toeplitz determinants and OPUC coefficients."""

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import numeric_chain
from toeplitz_dpii.errors import (
    DegenerateMeasure, NotPositiveDefinite, SignMismatch, TailNotCertified)
from toeplitz_dpii.opuc import OPUCSequence, opuc_csv, sign_check, szego_sequence
from toeplitz_dpii.symbolcore import (
    FourierTable, SymbolParams, fourier_table, h_coefficients, quadrature_oracle)
from toeplitz_dpii.toeplitz import (
    bareiss_determinant, cofactor_determinant, determinant_sequence, determinants_csv,
    gap_probabilities, recursion_residual, toeplitz_matrix)

TIGHT = mpmath.mpf("1e-70")


# -- symbol ------------------------------------------------------------------------
def test_params_validation():
    with pytest.raises(ValueError):
        SymbolParams(0, ())
    with pytest.raises(ValueError):
        SymbolParams(2, ("1",))
    with pytest.raises(ValueError):
        SymbolParams(1, ("1",), 32)


def test_alternated_signs():
    alt = SymbolParams(3, ("1", "2", "3")).alternated()
    assert alt.theta_mpf == [1, -2, 3]


def test_h_coefficients_single_theta():
    # exp(theta z): h_k = theta^k / k!
    h = h_coefficients(SymbolParams(1, ("3",)), 10)
    for k, hk in enumerate(h):
        assert abs(hk - mpmath.mpf(3) ** k / mpmath.factorial(k)) < TIGHT


def test_phi_matches_modified_bessel():
    # N = 1: phi_k = I_k(2 theta)
    table = fourier_table(SymbolParams(1, ("3",)), 12)
    for k in range(13):
        assert abs(table[k] - mpmath.besseli(k, 6)) < TIGHT * table[0]


@pytest.mark.parametrize("thetas", [("3", "1.2"), ("3", "1.2", "2.6"), ("-1", "0.5", "0", "2")])
def test_phi_matches_quadrature(thetas):
    params = SymbolParams(len(thetas), thetas)
    table = fourier_table(params, 8)
    for k in (0, 1, 5, 8):
        assert abs(table[k] - quadrature_oracle(params, k)) < TIGHT * table[0]


def test_phi_symmetric_and_bounded():
    table = fourier_table(SymbolParams(2, ("3", "1.2")), 6)
    assert table[-4] == table[4]
    assert table.tail_bound < abs(table[6]) * 10
    assert table.truncation_bound < mpmath.ldexp(1, 8 - 256)
    with pytest.raises(IndexError):
        table[7]


def test_phi_sum_rule():
    # sum_k phi_k = phi(1) = exp(2 sum theta_j / j)
    params = SymbolParams(2, ("1", "-0.5"))
    table = fourier_table(params, 120)
    total = table[0] + 2 * mpmath.fsum(table[k] for k in range(1, 121))
    assert abs(total - mpmath.exp(2 * (1 - mpmath.mpf("0.25")))) < mpmath.mpf("1e-60")


def test_zero_symbol():
    params = SymbolParams(2, ("0", "0"))
    assert params.is_zero()
    table = fourier_table(params, 5)
    assert table[0] == 1 and all(table[k] == 0 for k in range(1, 6))
    xs = szego_sequence(table, 5)
    assert all(xn == 0 for xn in xs.x[1:])
    assert determinant_sequence(table, 5).values == (1,) * 6


def test_tail_not_certified():
    with pytest.raises(TailNotCertified):
        fourier_table(SymbolParams(1, ("40",)), 4, max_terms=64)


def test_table_json():
    obj = fourier_table(SymbolParams(1, ("3",), 128), 3).to_json_obj()
    assert obj["N"] == 1 and obj["thetas"] == ["3"] and obj["k_max"] == 3
    assert len(obj["coeffs"]) == 4
    assert abs(mpmath.mpf(obj["coeffs"][0]) - mpmath.besseli(0, 6)) < mpmath.mpf("1e-30")


# -- determinants ------------------------------------------------------------------
def test_bordered_vs_mpmath_det():
    _, table, seq, _ = numeric_chain(2, ("3", "1.2"), 43)
    for n in (0, 3, 10, 15):
        ref = mpmath.det(mpmath.matrix(toeplitz_matrix(table, n + 1)))
        assert abs(seq.values[n] / ref - 1) < mpmath.mpf("1e-60")


def test_exact_determinant_oracles_agree():
    m = [[Fraction(i + 1, j + 2) + (i == j) for j in range(5)] for i in range(5)]
    assert bareiss_determinant(m) == cofactor_determinant(m)
    assert bareiss_determinant([[0, 1], [1, 0]]) == -1
    assert bareiss_determinant([]) == 1


def test_ratio_is_one_minus_x_squared():
    _, _, seq, xs = numeric_chain(3, ("3", "1.2", "2.6"), 43)
    res = recursion_residual(seq, xs)
    assert len(res) == seq.n_max
    assert max(abs(r) for r in res) < mpmath.mpf("1e-60")


def test_norms_match_determinant_ratios():
    # ||pi_n||^2 = D_n / D_{n-1} = 1 / kappa_n^2
    _, _, seq, xs = numeric_chain(2, ("3", "1.2"), 43)
    for n in range(1, 30):
        assert abs(xs.norms[n] / (seq.values[n] / seq.values[n - 1]) - 1) < mpmath.mpf("1e-60")
        assert abs(xs.norms[n] * xs.kappa_sq[n] - 1) < mpmath.mpf("1e-60")


def test_gap_probabilities_tend_to_one():
    _, _, seq, _ = numeric_chain(1, ("3",), 40)
    gaps = gap_probabilities(seq)
    assert len(gaps.q) == seq.n_max + 2
    assert gaps.q[0] == 1 / gaps.z_const
    assert all(0 < q <= 1 for q in gaps.q)
    assert all(a <= b for a, b in zip(gaps.q, gaps.q[1:]))
    assert abs(gaps.q[-1] - 1) < mpmath.mpf("1e-20")
    # N = 1 with theta -> -theta gives the same determinants
    assert all(abs(q - r) < TIGHT for q, r in zip(gaps.q, gaps.r))


def test_not_positive_definite():
    params = SymbolParams(1, ("1",))
    bogus = FourierTable(params, 1, (mpmath.mpf(1), mpmath.mpf(2)), 0, 0, ())
    with pytest.raises(NotPositiveDefinite):
        determinant_sequence(bogus, 1)


def test_determinants_csv():
    _, _, seq, xs = numeric_chain(1, ("3",), 40)
    text = determinants_csv(seq, x=xs)
    lines = text.splitlines()
    assert lines[0] == "n,D_n,log_D_n,q_n,r_n,ratio,residual"
    assert len(lines) == seq.n_max + 2
    assert lines[1].split(",")[5] == ""
    assert text == determinants_csv(seq, x=xs)


# -- OPUC --------------------------------------------------------------------------
def test_x0_and_kappa0():
    _, table, _, xs = numeric_chain(1, ("3",), 40)
    assert xs.x[0] == 1
    assert abs(xs.kappa_sq[0] - 1 / table[0]) < TIGHT


def test_x_inside_unit_disk():
    _, _, _, xs = numeric_chain(3, ("3", "1.2", "2.6"), 43)
    assert all(abs(xn) < 1 for xn in xs.x[1:])


def test_pi_orthogonal_to_lower_powers():
    _, table, _, xs = numeric_chain(2, ("3", "1.2"), 43)
    c = xs.pi_coeffs[6]
    for m in range(6):
        # <pi_6, z^m> = sum_j c_j phi_{j-m}
        val = mpmath.fsum(c[j] * table[j - m] for j in range(7))
        assert abs(val) < mpmath.mpf("1e-60") * table[0]


@pytest.mark.parametrize("big_n,thetas", [(1, ("3",)), (2, ("3", "1.2"))])
def test_sign_check(big_n, thetas):
    _, _, seq, xs = numeric_chain(big_n, thetas, 40 + big_n)
    report = sign_check(xs, seq)
    assert len(report) == 12 and all(r["agree"] for r in report)
    assert max(r["difference"] for r in report) < mpmath.mpf("1e-50")


def test_sign_check_detects_flip():
    _, _, seq, xs = numeric_chain(1, ("3",), 40)
    flipped = OPUCSequence(xs.params, (xs.x[0],) + tuple(-a for a in xs.x[1:]),
                           xs.kappa_sq, xs.norms)
    with pytest.raises(SignMismatch):
        sign_check(flipped, seq, 3)


def test_degenerate_measure():
    params = SymbolParams(1, ("1",))
    bogus = FourierTable(params, 2, (mpmath.mpf(1), mpmath.mpf(1), mpmath.mpf(1)), 0, 0, ())
    with pytest.raises(DegenerateMeasure):
        szego_sequence(bogus, 2)


def test_opuc_csv():
    _, _, _, xs = numeric_chain(1, ("3",), 40)
    lines = opuc_csv(xs).splitlines()
    assert lines[0] == "n,x_n,kappa_n_sq,one_minus_x_n_sq"
    assert len(lines) == 42


@settings(max_examples=15)
@given(st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=8),
                min_size=1, max_size=3))
def test_random_parameters_consistent(thetas):
    params = SymbolParams(len(thetas), tuple(str(t) for t in thetas), 128)
    table = fourier_table(params, 12)
    seq = determinant_sequence(table, 12)
    xs = szego_sequence(table, 12)
    assert all(abs(xn) < 1 for xn in xs.x[1:])
    assert max(abs(r) for r in recursion_residual(seq, xs)) < mpmath.mpf("1e-25")
    for n in range(1, 13):
        assert abs(xs.kappa_sq[n] * xs.norms[n] - 1) < mpmath.mpf("1e-25")


def test_results_independent_of_ambient_precision():
    params = SymbolParams(2, ("3", "1.2"))
    with mpmath.workprec(53):
        table = fourier_table(params, 20)
        xs = szego_sequence(table, 20)
    _, _, _, ref = numeric_chain(2, ("3", "1.2"), 42)
    assert max(abs(a - b) for a, b in zip(xs.x, ref.x)) < mpmath.mpf("1e-70")
