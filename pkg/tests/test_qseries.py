import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import central_elements
from verlinde_lab import qseries
from verlinde_lab.endalg import ZElement, center_dim, phi_irr
from verlinde_lab.exterior import ExtElement
from verlinde_lab.scalars import ONE
from verlinde_lab.qseries import (
    ImTooSmall,
    Insertion,
    InvalidInsertion,
    PseudoTraceExpr,
    PuiseuxSeries,
    character_series,
    check_character_s,
    check_modular_covariance,
    evaluate,
    pseudo_trace_eval,
    pseudo_trace_expr,
    separation_rank,
    valid_insertions,
)

TERMS = 60


# -- independent oracles: pentagonal numbers and the triple product -----------


def _mul(a, b):
    out = [0] * TERMS
    for i, x in enumerate(a):
        if x:
            for j in range(TERMS - i):
                out[i + j] += x * b[j]
    return out


def _inverse(a):
    # power-series inverse of a with a[0] = 1
    out = [0] * TERMS
    out[0] = 1
    for k in range(1, TERMS):
        out[k] = -sum(a[i] * out[k - i] for i in range(1, k + 1))
    return out


def _euler(step=1):
    """prod_{n>=1} (1 - x^(step n)) via the pentagonal number theorem."""
    out = [0] * TERMS
    for k in range(-TERMS, TERMS):
        e = step * k * (3 * k - 1) // 2
        if 0 <= e < TERMS:
            out[e] += -1 if k % 2 else 1
    return out


def _theta(sign):
    """sum_k sign^k x^(k^2)."""
    out = [0] * TERMS
    for k in range(-TERMS, TERMS):
        if k * k < TERMS:
            out[k * k] += sign ** abs(k)
    return out


def _coeffs(series, lead, spacing, count):
    return [round(series.coefficient(Fraction(lead + spacing * k, 48)).real) for k in range(count)]


def test_ns_minus_is_square_of_pentagonal_series():
    e = _euler()
    expected = _mul(e, e)
    assert _coeffs(character_series("ns-"), 4, 48, TERMS) == expected
    assert expected[:5] == [1, -2, -1, 2, 1]


def test_ns_plus_from_euler_quotient():
    # prod (1 + q^n) = prod (1 - q^{2n}) / prod (1 - q^n)
    half = _mul(_euler(2), _inverse(_euler()))
    assert _coeffs(character_series("ns+"), 4, 48, TERMS) == _mul(half, half)


@pytest.mark.parametrize("kind,sign", [("r+", 1), ("r-", -1)])
def test_ramond_from_triple_product(kind, sign):
    # in x = q^(1/2): prod (1 -+ x^(2n-1))^2 = theta(x) / prod (1 - x^(2n))
    expected = _mul(_theta(sign), _inverse(_euler(2)))
    assert _coeffs(character_series(kind), -2, 24, TERMS) == expected
    if kind == "r+":
        assert expected[:3] == [1, 2, 1]


def test_leading_exponents():
    assert character_series("ns+").leading_exponent() == Fraction(1, 12)
    assert character_series("r-").leading_exponent() == Fraction(-1, 24)


def test_ns_product_exponents_are_integer_plus_one_sixth():
    prod = character_series("ns+", 40) * character_series("ns-", 40)
    assert all(Fraction(k, 48) - Fraction(1, 6) == int(Fraction(k, 48) - Fraction(1, 6)) for k in prod.coeffs)


def test_truncated_product():
    a = PuiseuxSeries({0: 1, 48: 1}, 5)
    b = PuiseuxSeries({0: 1, 48: -1}, 5)
    c = a * b
    assert c.coeffs == {0: 1, 96: -1}
    assert c.truncation_order == 5


def test_constant_series_and_guard():
    one = PuiseuxSeries.constant()
    assert evaluate(one, 0.2 + 1j) == 1
    with pytest.raises(ImTooSmall):
        evaluate(one, 0.1j)


def test_r_plus_fixed_point():
    s = character_series("r+")
    assert evaluate(s, 1j) == pytest.approx(evaluate(s, -1 / 1j), rel=1e-14)


def test_ns_minus_at_2i():
    q = math.exp(-4 * math.pi)
    v = evaluate(character_series("ns-"), 2j)
    assert abs(v.imag) < 1e-15
    assert v.real > 0
    assert v.real == pytest.approx(q ** (1 / 12) * (1 - 2 * q - q * q), rel=1e-14)


def test_tail_estimate_is_tiny_at_the_guard():
    assert character_series("ns+").tail_estimate(0.3j) < 1e-10


@settings(max_examples=30, deadline=None)
@given(
    st.dictionaries(st.integers(-4, 400), st.integers(-5, 5), min_size=1, max_size=8),
    st.floats(-0.5, 0.5),
    st.floats(0.4, 1.5),
)
def test_derivative_matches_finite_differences(coeffs, x, y):
    s = PuiseuxSeries(coeffs, 100)
    tau = complex(x, y)
    h = 1e-5
    numeric = (evaluate(s, tau + h) - evaluate(s, tau - h)) / (2 * h)
    exact = evaluate(s.derivative(), tau)
    assert abs(numeric - exact) <= 1e-6 * max(1.0, abs(exact))


# -- insertions -------------------------------------------------------------


def test_insertion_validation():
    assert Insertion((1,), ()).validate(1).weight == 2
    assert Insertion((), (1, 3)).validate(2).weight == 2
    for bad in (Insertion((), (1, 2)), Insertion((), (1,)), Insertion((1,), (1, 3)), Insertion((3,), ()), Insertion((), (1, 1))):
        with pytest.raises(InvalidInsertion):
            bad.validate(2)


def test_valid_insertion_count():
    # N=2, r+s<=2: empty, l in {1},{2},{1,2}, and four j pairs
    ws = valid_insertions(2, 2)
    assert len(ws) == 8
    assert len(valid_insertions(1, 2)) == 2


# -- pseudo-trace data ------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2])
def test_twisted_vacuum_is_ramond_average(n):
    e = pseudo_trace_expr(phi_irr(n)["T"], Insertion(), n)
    half = (ONE * Fraction(1, 2),)
    assert e.data() == {("r+", (0,) * n): half, ("r-", (0,) * n): half}
    tau = 2j
    direct = 0.5 * (evaluate(character_series("r+"), tau) ** n + evaluate(character_series("r-"), tau) ** n)
    assert pseudo_trace_eval(e, tau) == pytest.approx(direct, rel=1e-14)


def test_z1_only_sees_ns_plus():
    n = 2
    z1 = ZElement.from_p(n, 1, 0, 0)
    assert pseudo_trace_expr(z1, Insertion((), (1, 3)), n).is_zero()
    assert pseudo_trace_expr(z1, Insertion(), n).families() == {"ns+"}


def test_vacuum_n1():
    e = pseudo_trace_expr(phi_irr(1)["1"], Insertion(), 1)
    half = (ONE * Fraction(1, 2),)
    assert e.data() == {("ns+", (0,)): half, ("ns-", (0,)): half}


def test_zero_expression():
    assert pseudo_trace_eval(PseudoTraceExpr(1), 1j) == 0


@settings(max_examples=10, deadline=None)
@given(central_elements(2), central_elements(2))
def test_linearity_in_z(a, b):
    w = Insertion((1,), ())
    tau = 0.1 + 1.2j
    lhs = pseudo_trace_eval(pseudo_trace_expr(a + b, w), tau)
    rhs = pseudo_trace_eval(pseudo_trace_expr(a, w), tau) + pseudo_trace_eval(pseudo_trace_expr(b, w), tau)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


def test_repeated_l_uses_second_derivative():
    e = pseudo_trace_expr(ZElement(ExtElement.scalar(2)), Insertion((1, 1), ()), 2)
    assert any(2 in derivs for _, derivs in e.data())


# -- S-transformation ---------------------------------------------------------


def test_character_identities():
    rep = check_character_s(tol=1e-8)
    assert rep.passed, rep.render()
    assert len(rep.lines) == 12


def test_character_identity_off_defaults():
    rep = check_character_s(taus=[0.5 + 1j], tol=1e-8)
    assert rep.passed


def test_starved_truncation_fails_at_low_im():
    # a single q-power cannot capture the series near the guard
    rep = check_character_s(taus=[0.3 + 1.1j], truncation=1, tol=1e-8)
    assert not rep.passed
    with pytest.raises(qseries.ToleranceExceeded):
        rep.raise_on_failure()


def test_covariance_z1():
    n = 1
    z1 = ZElement.from_p(n, 1, 0, 0)
    assert check_modular_covariance(z1, Insertion(), n, tol=1e-8).passed


def test_covariance_unit_with_gamma_insertion():
    assert check_modular_covariance(ZElement(ExtElement.scalar(1)), Insertion((1,), ()), 1, tol=1e-8).passed


def test_covariance_vacuum():
    for n in (1, 2):
        assert check_modular_covariance(phi_irr(n)["1"], Insertion(), n, tol=1e-8).passed


def test_covariance_detects_a_wrong_partner():
    # pairing zeta^{z} with a different element must fail
    n = 1
    left = pseudo_trace_expr(ZElement.from_p(n, 0, 1, 0), Insertion(), n)
    right = pseudo_trace_expr(ZElement.from_p(n, 0, 0, 1), Insertion(), n)
    tau = 1j
    assert abs(pseudo_trace_eval(left, -1 / tau) - pseudo_trace_eval(right, tau)) > 1e-3


@pytest.mark.parametrize("n", [1, 2])
def test_separation_rank(n):
    assert separation_rank(n) == center_dim(n)


def test_separation_needs_insertions():
    # the vacuum insertion alone cannot tell all of Z_Lambda apart when N = 2
    assert separation_rank(2, max_rs=0) < center_dim(2)
