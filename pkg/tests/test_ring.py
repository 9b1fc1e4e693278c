from fractions import Fraction

import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from bochnervop.errors import InvalidQError, MissingParameterError, SpecError, UndeclaredParameterError
from bochnervop.ring import (
    ONE,
    ZERO,
    NPoly,
    QPoly,
    Scalar,
    XPoly,
    eval_params,
    rat,
    rat_str,
    scalar_arith,
)

from conftest import beta, n, npoly_to_sympy, scalar_to_sympy, scalars, small_rats, x, xpoly_to_sympy, xpolys


@pytest.mark.parametrize(
    "value, expected",
    [(3, mpq(3)), ("-7/21", mpq(-1, 3)), (Fraction(2, 4), mpq(1, 2)), (" 5 ", mpq(5)), (mpq(2, 3), mpq(2, 3))],
)
def test_rat_parsing(value, expected):
    assert rat(value) == expected


@pytest.mark.parametrize("bad", ["1.5", "1/0", "x", ""])
def test_rat_rejects_garbage(bad):
    with pytest.raises(SpecError):
        rat(bad)


def test_rat_rejects_bool_and_float():
    with pytest.raises(TypeError):
        rat(True)
    with pytest.raises(TypeError):
        rat(0.5)


def test_rat_str():
    assert rat_str(mpq(6, 4)) == "3/2"
    assert rat_str(mpq(-4, 2)) == "-2"


def test_unknown_parameter_rejected():
    with pytest.raises(UndeclaredParameterError):
        Scalar.var("gamma")


def test_missing_parameter_names_it():
    s = Scalar.var("alpha") * Scalar.var("beta")
    with pytest.raises(MissingParameterError) as info:
        eval_params(s, {"alpha": 1})
    assert info.value.name == "beta"
    assert "beta" in str(info.value)


def test_scalar_printing_and_json():
    b = Scalar.var("beta")
    s = (b + 1) * (b + 2) * 3
    assert str(s) == "3*beta^2 + 9*beta + 6"
    assert Scalar.from_json(s.to_json()) == s
    assert str(ZERO) == "0"
    assert s.degree() == 2
    assert s.variables() == {"beta"}


def test_scalar_arith_dispatch():
    a, b = Scalar.var("alpha"), Scalar.const(2)
    assert scalar_arith(a, b, "add") == a + 2
    assert scalar_arith(a, b, "mul") == a.scale(2)
    assert scalar_arith(a, b, "neg") == -a
    with pytest.raises(ValueError):
        scalar_arith(a, b, "pow")


@settings(max_examples=60, deadline=None)
@given(scalars(), scalars(), scalars())
def test_scalar_ring_against_sympy(a, b, c):
    A, B, C = map(scalar_to_sympy, (a, b, c))
    assert scalar_to_sympy(a + b * c) == sp.expand(A + B * C)
    assert scalar_to_sympy((a - c) * (b + c)) == sp.expand((A - C) * (B + C))
    assert scalar_to_sympy(a**3) == sp.expand(A**3)


@settings(max_examples=60, deadline=None)
@given(scalars(), scalars(), small_rats, small_rats)
def test_evaluation_is_a_ring_map(a, b, va, vb):
    env = {"alpha": va, "beta": vb}
    assert eval_params(a * b, env) == eval_params(a, env) * eval_params(b, env)
    assert eval_params(a + b, env) == eval_params(a, env) + eval_params(b, env)


@settings(max_examples=40, deadline=None)
@given(scalars(), small_rats)
def test_partial_substitution(a, vb):
    part = a.substitute({"beta": vb})
    assert "beta" not in part.variables()
    expected = scalar_to_sympy(a).subs(beta, sp.Rational(vb.numerator, vb.denominator))
    assert scalar_to_sympy(part) == sp.expand(expected)


@settings(max_examples=50, deadline=None)
@given(xpolys(), xpolys())
def test_xpoly_product_against_sympy(p, r):
    assert xpoly_to_sympy(p * r) == sp.expand(xpoly_to_sympy(p) * xpoly_to_sympy(r))
    assert xpoly_to_sympy(p.derivative()) == sp.diff(xpoly_to_sympy(p), x)
    assert XPoly.from_json(p.to_json()) == p


@settings(max_examples=40, deadline=None)
@given(xpolys(max_degree=5), st.integers(-4, 4))
def test_npoly_shift_against_sympy(p, k):
    q = NPoly(p.coeffs)
    expected = sp.expand(npoly_to_sympy(q).subs(n, n + k))
    assert npoly_to_sympy(q.shift(k)) == expected


def test_npoly_at_int():
    q = NPoly.var() * (NPoly.var() - 1 + Scalar.var("beta"))
    assert q.at_int(3) == (Scalar.var("beta") + 2) * 3
    assert q.at_int(0) == ZERO


def test_xpoly_printing():
    b = Scalar.var("beta")
    p = XPoly.monomial(3) + XPoly.monomial(1, (b + 1) * 3)
    assert str(p) == "x^3 + (3*beta + 3)*x"
    assert str(XPoly.monomial(2) - XPoly.const(1)) == "x^2 - 1"
    assert p.degree == 3 and p.is_monic()
    assert XPoly().degree == -1


def test_xpoly_and_npoly_do_not_mix():
    with pytest.raises(TypeError):
        XPoly.var() + NPoly.var()


def test_qpoly_constant_term_rejected():
    with pytest.raises(InvalidQError):
        QPoly([1, 1])
    assert QPoly([1, 1], allow_constant=True).degree == 1


@pytest.mark.parametrize(
    "coeffs, label",
    [
        ([0, 1], "X"),
        ([0, 0, mpq(1, 2)], "X^2/2"),
        ([0, 0, 0, mpq(-1, 3)], "-X^3/3"),
        ([0, 0, 2], "2*X^2"),
        ([0, 1, 0, mpq(1, 3)], "X^3/3+X"),
    ],
)
def test_qpoly_labels(coeffs, label):
    assert QPoly(coeffs).label() == label


def test_qpoly_from_terms_and_derivative():
    q = QPoly.from_terms([["1/3", 3], [-1, 1]])
    assert q == QPoly([0, -1, 0, mpq(1, 3)])
    assert q.derivative() == QPoly([-1, 0, 1], allow_constant=True)
    assert QPoly.from_terms(q.to_json()) == q


def test_constants():
    assert ONE * ONE == ONE
    assert not ZERO
    assert Scalar.const(0) == ZERO
