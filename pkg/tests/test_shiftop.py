import json
from itertools import product

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from bochnervop.diffop import DiffOp, apply, compose
from bochnervop.errors import SpecError, TableOutOfRange
from bochnervop.ring import NPoly, QPoly, Scalar, XPoly
from bochnervop.shiftop import (
    PolyTable,
    ShiftOp,
    apply_to_sequence,
    apply_to_table,
    b_word,
    bispectral_b,
    qpoly_at_shiftop,
    shift_compose,
    stable_hash,
)

from conftest import small_rats

T = ShiftOp.T
nn = NPoly.var()


def test_shift_past_n():
    assert T(1) * ShiftOp.n() == ShiftOp.mult(nn + 1) * T(1)
    assert T(-2) * ShiftOp.n() == ShiftOp.mult(nn - 2) * T(-2)


def test_lowering_square():
    G = ShiftOp.mult(nn) * T(-1)
    assert G * G == ShiftOp.mult(nn * nn - nn) * T(-2)
    assert str(G * G) == "(n^2 - n)*T^(-2)"


@st.composite
def shiftops(draw):
    terms = {}
    for k in draw(st.lists(st.integers(-2, 2), max_size=3, unique=True)):
        coeffs = draw(st.lists(small_rats, min_size=1, max_size=3))
        terms[k] = NPoly(coeffs)
    return ShiftOp(terms)


def _seq(m):
    # an arbitrary test sequence
    return Scalar.const(mpq(m**3 - 2 * m + 5, m + 1))


def _apply(S, f, n):
    out = apply_to_sequence(S, f, n)
    return Scalar() if out is None else out


@settings(max_examples=40, deadline=None)
@given(shiftops(), shiftops())
def test_composition_acts_as_composite(S1, S2):
    for n in range(3, 9):
        inner = lambda m: _apply(S2, _seq, m)
        # keep clear of the m < 0 cutoff so both sides see the same data
        assert _apply(shift_compose(S1, S2), _seq, n) == _apply(S1, inner, n)


@settings(max_examples=25, deadline=None)
@given(shiftops(), shiftops(), shiftops())
def test_associative(A, B, C):
    assert (A * B) * C == A * (B * C)


def test_qpoly_at_shiftop():
    G = ShiftOp.mult(nn) * T(-1)
    q = QPoly([1, 0, mpq(1, 2)], allow_constant=True)
    assert qpoly_at_shiftop(q, G) == ShiftOp.identity() + (G * G).scale(mpq(1, 2))


def test_coefficients_at_drops_zeros():
    S = ShiftOp.mult(nn) * T(-1) + T(1)
    assert S.coefficients_at(0) == {1: Scalar.const(1)}
    assert S.coefficients_at(4) == {1: Scalar.const(1), -1: Scalar.const(4)}


def test_json_roundtrip_and_printing():
    b = Scalar.var("beta")
    S = T(1) - ShiftOp.mult(nn.scale(2) + b) + ShiftOp.mult(nn * (nn - 1 + b)) * T(-1)
    assert ShiftOp.from_json(json.loads(json.dumps(S.to_json()))) == S
    assert str(S).startswith("T + ")


def test_poly_table_validation():
    with pytest.raises(SpecError):
        PolyTable([XPoly.const(1), XPoly.monomial(1, 2)])
    with pytest.raises(SpecError):
        PolyTable([XPoly.const(1), XPoly.monomial(2)])


def test_poly_table_json():
    t = PolyTable([XPoly.const(1), XPoly.var(), XPoly.monomial(2) - 1], spec_hash="abc")
    back = PolyTable.from_json(json.loads(json.dumps(t.to_json())))
    assert back == t and back.spec_hash == "abc" and back.N == 2
    with pytest.raises(SpecError):
        PolyTable.from_json({"N": 2})


def test_apply_to_table_bounds():
    seed = PolyTable.seed(3)
    assert apply_to_table(T(1), seed, 2) == XPoly.monomial(3)
    assert apply_to_table(T(-1), seed, 0) == XPoly()
    with pytest.raises(TableOutOfRange):
        apply_to_table(T(1), seed, 3)


@pytest.mark.parametrize("kind", ["weyl", "sl2"])
def test_b_reverses_products_on_seed(kind):
    b = Scalar.var("beta")
    x, H = DiffOp.x(), DiffOp.monomial(1, 1)
    if kind == "weyl":
        B, mu = DiffOp.d(), nn
    else:
        B, mu = DiffOp.monomial(1, 2) + DiffOp.d().scale(b), nn * (nn - 1 + b)
    images = bispectral_b(mu)
    gens = {"x": x, "H": H, "B": B}
    seed = PolyTable.seed(10)
    for word in product("xHB", repeat=2):
        op = compose(gens[word[0]], gens[word[1]])
        image = b_word(images, word)
        for n in range(8):
            assert apply(op, seed[n]) == apply_to_table(image, seed, n)


def test_stable_hash_is_order_independent():
    assert stable_hash({"a": 1, "b": [1, 2]}) == stable_hash({"b": [1, 2], "a": 1})
    assert len(stable_hash({})) == 16
