import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from digictl.errors import Degenerate, DomainMismatch, PoleHit
from digictl.polytf import Domain, Polynomial, TransferFunction, dc_gain, evaluate, roots, series, unity_feedback

Z = Domain.z(0.1)

coeff = st.floats(min_value=-10, max_value=10, allow_nan=False).filter(lambda c: abs(c) > 1e-3)
poly = st.lists(coeff, min_size=2, max_size=5).map(Polynomial)
point = st.complex_numbers(min_magnitude=0.1, max_magnitude=3, allow_nan=False, allow_infinity=False)


def test_normalization_strips_tiny_leading_terms():
    p = Polynomial([1.0, 2.0, 1e-17])
    assert p.coeffs == (1.0, 2.0)
    assert p.degree() == 1
    assert Polynomial([0.0, 0.0]).coeffs == (0.0,)
    assert Polynomial([]).is_zero()


def test_horner_matches_numpy():
    p = Polynomial([0.3, -1.2, 0.7, 2.0])
    x = 0.4 - 1.3j
    assert p(x) == pytest.approx(np.polynomial.polynomial.polyval(x, p.coeffs))


def test_evaluate_plant_at_origin(printed_plant):
    assert evaluate(printed_plant, 0) == pytest.approx(0.0007279 / 0.9249, rel=1e-12)
    assert abs(evaluate(printed_plant, 0)) == pytest.approx(7.870e-4, rel=1e-3)


def test_evaluate_identity():
    tf = TransferFunction(Polynomial([1.0, 2.0, 3.0]), Polynomial([1.0, 2.0, 3.0]), Z)
    assert evaluate(tf, 0.3 + 0.2j) == pytest.approx(1.0)


def test_evaluate_continuous_plant_magnitude(plant_s):
    w = 3.29
    expected = 0.1533 / (w * math.sqrt(w**2 + 0.7809**2))
    assert abs(evaluate(plant_s, 1j * w)) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(0.01378, rel=1e-3)


def test_evaluate_pole_hit():
    tf = TransferFunction(Polynomial([1.0]), Polynomial([-1.0, 1.0]), Z)
    with pytest.raises(PoleHit):
        evaluate(tf, 1.0)


def test_zero_denominator_rejected():
    with pytest.raises(ValueError):
        TransferFunction(Polynomial([1.0]), Polynomial([0.0]), Z)


def test_series_identity_and_no_cancellation():
    g = TransferFunction(Polynomial([0.5, 1.0]), Polynomial([0.2, -1.0, 1.0]), Z)
    one = TransferFunction.gain(1.0, Z)
    assert series(g, one) == g
    a = TransferFunction(Polynomial([1.0]), Polynomial([-1.0, 1.0]), Z)
    b = TransferFunction(Polynomial([-1.0, 1.0]), Polynomial([1.0]), Z)
    ab = series(a, b)
    assert ab.num.coeffs == (-1.0, 1.0)
    assert ab.den.coeffs == (-1.0, 1.0)


def test_series_lag_with_plant_degrees(printed_plant):
    lag = TransferFunction.from_descending([66.15, -64.01], [1.0, -0.7859], Z)
    loop = series(lag, printed_plant)
    assert loop.num.degree() == 2
    assert loop.den.degree() == 3


def test_series_domain_mismatch():
    with pytest.raises(DomainMismatch):
        series(TransferFunction.gain(1.0, Z), TransferFunction.gain(1.0, Domain.z(0.2)))
    with pytest.raises(DomainMismatch):
        series(TransferFunction.gain(1.0, Z), TransferFunction.gain(1.0, Domain.w(0.1)))


def test_unity_feedback_trivial():
    zero = unity_feedback(TransferFunction.gain(0.0, Z))
    assert zero.num.is_zero()
    half = unity_feedback(TransferFunction.gain(1.0, Z))
    assert evaluate(half, 0.7) == pytest.approx(0.5)


def test_unity_feedback_requires_discrete():
    with pytest.raises(DomainMismatch):
        unity_feedback(TransferFunction.gain(1.0, Domain.s()))


def test_unity_feedback_pi_loop_dc(plant_z):
    pi = TransferFunction.from_descending([5.839, -5.823], [1.0, -1.0], plant_z.domain)
    closed = unity_feedback(series(pi, plant_z))
    assert dc_gain(closed) == pytest.approx(1.0, abs=1e-9)


def test_roots_examples():
    assert sorted(r.real for r in roots(Polynomial([0.0, -1.0, 1.0]))) == pytest.approx([0.0, 1.0], abs=1e-14)
    assert roots(Polynomial([-0.7859, 1.0]))[0] == pytest.approx(0.7859)
    e = math.exp(-0.7809 * 0.1)
    r = sorted(x.real for x in roots(Polynomial([e, -(1 + e), 1.0])))
    assert r == pytest.approx([e, 1.0], abs=1e-12)
    assert e == pytest.approx(0.92488, rel=1e-5)


def test_roots_of_constant():
    with pytest.raises(Degenerate):
        roots(Polynomial([3.0]))


@settings(max_examples=60, deadline=None)
@given(poly)
def test_roots_residual_contract(p):
    tol = 1e-10 * p.max_abs_coeff()
    rts = roots(p)
    assert len(rts) == p.degree()
    for r in rts:
        # large roots: double rounding of r alone exceeds the absolute bound,
        # so scale by the size of the terms being summed
        scale = sum(abs(c) * abs(r) ** i for i, c in enumerate(p.coeffs))
        assert abs(p(r)) < tol or abs(r) > 1 and abs(p(r)) < 1e-10 * scale


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=1, max_size=3), st.lists(st.floats(-2, 2), min_size=1, max_size=3))
def test_roots_of_product_are_union(ra, rb):
    # well-separated real roots keep the multiset comparison unambiguous
    allr = sorted(ra + rb)
    if any(b - a < 0.05 for a, b in zip(allr, allr[1:])):
        return
    p, q = Polynomial.from_roots(ra), Polynomial.from_roots(rb)
    got = sorted(r.real for r in roots(p * q))
    assert got == pytest.approx(allr, abs=1e-8)


@settings(max_examples=60, deadline=None)
@given(poly, poly, poly, poly, point)
def test_series_evaluates_to_product(n1, d1, n2, d2, x):
    a, b = TransferFunction(n1, d1, Z), TransferFunction(n2, d2, Z)
    if min(abs(d1(x)), abs(d2(x))) < 1e-3:
        return
    assert evaluate(series(a, b), x) == pytest.approx(evaluate(a, x) * evaluate(b, x), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(poly, poly, point)
def test_unity_feedback_matches_formula(n, d, x):
    ol = TransferFunction(n, d, Z)
    cl = unity_feedback(ol)
    if abs(d(x)) < 1e-3 or abs(cl.den(x)) < 1e-3:
        return
    L = evaluate(ol, x)
    assert evaluate(cl, x) == pytest.approx(L / (1 + L), rel=1e-12)


def test_dc_gain_examples():
    lag = TransferFunction.from_descending([66.15, -64.01], [1.0, -0.7859], Z)
    assert dc_gain(lag) == pytest.approx((66.15 - 64.01) / (1 - 0.7859))
    assert dc_gain(lag) == pytest.approx(10.0, abs=0.01)
    pi = TransferFunction.from_descending([5.839, -5.823], [1.0, -1.0], Z)
    assert dc_gain(pi) == math.inf
    assert dc_gain(TransferFunction.gain(1.0, Z)) == 1.0


def test_dc_gain_divides_common_dc_factor():
    tf = TransferFunction(Polynomial([-1.0, 1.0]), Polynomial([-1.0, 1.0]), Z)
    assert dc_gain(tf) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(poly, poly)
def test_dc_gain_matches_evaluate(n, d):
    for dom in (Z, Domain.s(), Domain.w(0.1)):
        tf = TransferFunction(n, d, dom)
        x0 = dom.dc_point
        if abs(d(x0)) < 1e-6:
            continue
        assert dc_gain(tf) == pytest.approx(evaluate(tf, x0).real, rel=1e-12)


def test_domain_equality():
    assert Domain.z(0.1) == Domain.z(0.1)
    assert Domain.z(0.1) != Domain.w(0.1)
    with pytest.raises(ValueError):
        Domain.z(0)
