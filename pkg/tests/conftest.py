"""Shared helpers: sympy converters (the independent oracle) and strategies."""

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import strategies as st

from bochnervop.diffop import DiffOp
from bochnervop.ring import NPoly, Scalar, XPoly

x, n = sp.symbols("x n")
alpha, beta = sp.symbols("alpha beta")
SYMS = {"alpha": alpha, "beta": beta}


def scalar_to_sympy(s: Scalar):
    total = sp.Integer(0)
    for (a, b), c in s.terms.items():
        total += sp.Rational(int(c.numerator), int(c.denominator)) * alpha**a * beta**b
    return sp.expand(total)


def upoly_to_sympy(p, var):
    return sp.expand(sum((scalar_to_sympy(c) * var**k for k, c in enumerate(p.coeffs)), sp.Integer(0)))


def xpoly_to_sympy(p: XPoly):
    return upoly_to_sympy(p, x)


def npoly_to_sympy(p: NPoly):
    return upoly_to_sympy(p, n)


def sympy_to_xpoly(expr) -> XPoly:
    poly = sp.Poly(sp.expand(expr), x)
    out = XPoly()
    for (k,), c in poly.terms():
        out = out + XPoly.monomial(k, sympy_to_scalar(c))
    return out


def sympy_to_scalar(expr) -> Scalar:
    expr = sp.expand(expr)
    if expr == 0:
        return Scalar()
    poly = sp.Poly(expr, alpha, beta)
    terms = {}
    for (a, b), c in poly.terms():
        c = sp.Rational(c)
        terms[(a, b)] = Fraction(int(c.p), int(c.q))
    return Scalar(terms)


def apply_sympy(op: DiffOp, expr):
    """Apply a DiffOp to a sympy expression with sympy differentiation."""
    total = sp.Integer(0)
    for i, coeff in enumerate(op.coeffs):
        total += xpoly_to_sympy(coeff) * sp.diff(expr, x, i)
    return sp.expand(total)


small_rats = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def scalars(draw, max_terms=3, max_deg=2):
    k = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(k):
        a = draw(st.integers(0, max_deg))
        b = draw(st.integers(0, max_deg))
        terms[(a, b)] = draw(small_rats)
    return Scalar(terms)


@st.composite
def xpolys(draw, max_degree=4, symbolic=True):
    deg = draw(st.integers(-1, max_degree))
    coeffs = []
    for _ in range(deg + 1):
        coeffs.append(draw(scalars(max_terms=2, max_deg=1)) if symbolic else Scalar.const(draw(small_rats)))
    return XPoly(coeffs)


@st.composite
def diffops(draw, max_order=3, max_degree=3, symbolic=True):
    order = draw(st.integers(-1, max_order))
    return DiffOp([draw(xpolys(max_degree, symbolic)) for _ in range(order + 1)])


# acceptance summary -----------------------------------------------------------

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def acceptance():
    """Record ``(criterion, title, passed, detail)`` for the terminal summary."""

    def record(number: int, title: str, passed: bool, detail: str = ""):
        ACCEPTANCE[number] = (title, passed, detail)
        line = f"acceptance criterion {number} ({title}): {'PASS' if passed else 'FAIL'}"
        print(line + (f" -- {detail}" if detail else ""))

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        line = f"criterion {number} ({title}): {'PASS' if passed else 'FAIL'}"
        terminalreporter.write_line(line + (f" -- {detail}" if detail else ""))
