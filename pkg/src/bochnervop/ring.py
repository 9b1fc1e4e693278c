"""Exact coefficient rings.

* ``Rat`` -- arbitrary precision rationals (``gmpy2.mpq``; always reduced).
* ``Scalar`` -- sparse polynomials over ``Rat`` in the family parameters
  ``alpha`` and ``beta``.
* ``XPoly`` / ``NPoly`` -- dense univariate polynomials over ``Scalar`` in the
  continuous variable x and the discrete variable n.
* ``QPoly`` -- univariate polynomials over ``Rat`` in a formal indeterminate X;
  the datum q of an automorphism exp(ad q(B)).

All values are immutable.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping

from gmpy2 import mpq

from .errors import InvalidQError, MissingParameterError, SpecError, UndeclaredParameterError

Rat = type(mpq(0))

PARAMS = ("alpha", "beta")
_ZERO_EXP = (0, 0)
_RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def rat(value) -> Rat:
    """Coerce an int, ``Fraction``, ``mpq`` or ``"p/q"`` string to ``Rat``."""
    if isinstance(value, Rat):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        m = _RAT_RE.match(value)
        if not m:
            raise SpecError(f"not a rational literal: {value!r}")
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise SpecError(f"zero denominator in {value!r}")
        return mpq(int(m.group(1)), den)
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


def rat_str(r: Rat) -> str:
    r = rat(r)
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


def _mono_str(exp) -> str:
    parts = []
    for name, e in zip(PARAMS, exp):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _grlex_key(exp):
    return (sum(exp), exp)


class Scalar:
    """Element of Q[alpha, beta] stored as ``{exponent pair: Rat}``.

    No zero coefficient is ever stored, so structural equality of the term
    dictionaries is equality in the ring.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | None = None):
        clean = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(exp)
                if len(exp) != len(PARAMS) or any(e < 0 for e in exp):
                    raise ValueError(f"bad exponent vector {exp!r}")
                c = rat(c)
                if c:
                    clean[exp] = clean.get(exp, 0) + c
            clean = {k: v for k, v in clean.items() if v}
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> Scalar:
        # caller guarantees canonical content
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c) -> Scalar:
        c = rat(c)
        return cls._raw({_ZERO_EXP: c} if c else {})

    @classmethod
    def var(cls, name: str) -> Scalar:
        if name not in PARAMS:
            raise UndeclaredParameterError(f"unknown parameter {name!r}; known: {', '.join(PARAMS)}")
        exp = tuple(1 if p == name else 0 for p in PARAMS)
        return cls._raw({exp: mpq(1)})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and _ZERO_EXP in self._terms)

    def constant_value(self) -> Rat:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._terms.get(_ZERO_EXP, mpq(0))

    def variables(self) -> set[str]:
        used = set()
        for exp in self._terms:
            used.update(name for name, e in zip(PARAMS, exp) if e)
        return used

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    # arithmetic ------------------------------------------------------------

    def __add__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return other
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for k, v in other._terms.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                del out[k]
        return Scalar._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> Scalar:
        c = rat(c)
        if not c:
            return ZERO
        if c == 1:
            return self
        return Scalar._raw({k: v * c for k, v in self._terms.items()})

    def __mul__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return other
        a, b = self._terms, other._terms
        if not a or not b:
            return ZERO
        if len(a) > len(b):
            a, b = b, a
        if len(a) == 1 and _ZERO_EXP in a:
            return Scalar._raw({k: v * a[_ZERO_EXP] for k, v in b.items()})
        out = {}
        _addmul(out, a, b)
        return Scalar._raw({k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, c):
        c = rat(c)
        if not c:
            raise ZeroDivisionError("scalar division by zero")
        return self.scale(1 / c)

    # comparison -------------------------------------------------------------

    def __eq__(self, other):
        other = _as_scalar(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # evaluation -------------------------------------------------------------

    def evaluate(self, assignment: Mapping) -> Rat:
        return eval_params(self, assignment)

    def substitute(self, assignment: Mapping) -> Scalar:
        """Partial evaluation: replace the assigned parameters by rationals."""
        vals = [None if p not in assignment else rat(assignment[p]) for p in PARAMS]
        out = {}
        for exp, c in self._terms.items():
            new = list(exp)
            for i, v in enumerate(vals):
                if v is not None and exp[i]:
                    c = c * v ** exp[i]
                    new[i] = 0
            key = tuple(new)
            out[key] = out.get(key, 0) + c
        return Scalar._raw({k: v for k, v in out.items() if v})

    # presentation -----------------------------------------------------------

    def sorted_terms(self):
        """Terms in descending graded-lex order."""
        return sorted(self._terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def __str__(self):
        if not self._terms:
            return "0"
        chunks = []
        for exp, c in self.sorted_terms():
            mono = _mono_str(exp)
            sign = "-" if c < 0 else "+"
            a = -c if c < 0 else c
            if not mono:
                body = rat_str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{rat_str(a)}*{mono}"
            chunks.append((sign, body))
        text = ("-" if chunks[0][0] == "-" else "") + chunks[0][1]
        for sign, body in chunks[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"Scalar({self})"

    def needs_parens(self) -> bool:
        return len(self._terms) > 1

    def to_json(self):
        return [
            {"coeff": rat_str(c), "monomial": {n: e for n, e in zip(PARAMS, exp) if e}}
            for exp, c in self.sorted_terms()
        ]

    @classmethod
    def from_json(cls, data) -> Scalar:
        terms = {}
        for item in data:
            mono = item.get("monomial", {})
            for name in mono:
                if name not in PARAMS:
                    raise UndeclaredParameterError(f"unknown parameter {name!r}")
            exp = tuple(int(mono.get(p, 0)) for p in PARAMS)
            terms[exp] = terms.get(exp, 0) + rat(item["coeff"])
        return cls(terms)


def _addmul(out: dict, a: dict, b: dict) -> None:
    get = out.get
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            k = (i1 + i2, j1 + j2)
            out[k] = get(k, 0) + c1 * c2


def _as_scalar(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Rat, Fraction)) and not isinstance(x, bool):
        return Scalar.const(x)
    return NotImplemented


def to_scalar(x) -> Scalar:
    s = _as_scalar(x)
    if s is NotImplemented:
        raise TypeError(f"cannot interpret {type(x).__name__} as a Scalar")
    return s


class ScalarAccumulator:
    """Mutable sum of products; avoids building intermediate ``Scalar`` objects."""

    __slots__ = ("_acc",)

    def __init__(self):
        self._acc = {}

    def add(self, s: Scalar) -> None:
        acc = self._acc
        for k, v in s._terms.items():
            acc[k] = acc.get(k, 0) + v

    def addmul(self, a: Scalar, b: Scalar) -> None:
        ta, tb = a._terms, b._terms
        if not ta or not tb:
            return
        if len(ta) > len(tb):
            ta, tb = tb, ta
        if len(ta) == 1 and _ZERO_EXP in ta:
            c = ta[_ZERO_EXP]
            acc = self._acc
            for k, v in tb.items():
                acc[k] = acc.get(k, 0) + v * c
        else:
            _addmul(self._acc, ta, tb)

    def value(self) -> Scalar:
        return Scalar._raw({k: v for k, v in self._acc.items() if v})


def eval_params(s: Scalar, assignment: Mapping) -> Rat:
    """Evaluate ``s`` exactly at rational parameter values."""
    total = mpq(0)
    for exp, c in s._terms.items():
        term = c
        for name, e in zip(PARAMS, exp):
            if e:
                if name not in assignment:
                    raise MissingParameterError(name)
                term = term * rat(assignment[name]) ** e
        total += term
    return total


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    raise ValueError(f"unknown scalar op {op!r}")


ZERO = Scalar._raw({})
ONE = Scalar._raw({_ZERO_EXP: mpq(1)})


# ---------------------------------------------------------------------------
# univariate polynomials over Scalar


class UPoly:
    """Dense univariate polynomial with ``Scalar`` coefficients (low degree first)."""

    VAR = "t"
    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Iterable = ()):
        c = [to_scalar(a) for a in coeffs]
        while c and not c[-1]:
            c.pop()
        self._c = tuple(c)
        self._hash = None

    @classmethod
    def _raw(cls, coeffs):
        c = list(coeffs)
        while c and not c[-1]:
            c.pop()
        obj = cls.__new__(cls)
        obj._c = tuple(c)
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, k: int, c=1):
        return cls._raw([ZERO] * k + [to_scalar(c)])

    @classmethod
    def var(cls):
        return cls.monomial(1)

    @classmethod
    def const(cls, c):
        return cls._raw([to_scalar(c)])

    @property
    def coeffs(self) -> tuple:
        return self._c

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial has degree -1."""
        return len(self._c) - 1

    def coeff(self, k: int) -> Scalar:
        return self._c[k] if 0 <= k < len(self._c) else ZERO

    def leading(self) -> Scalar:
        return self._c[-1] if self._c else ZERO

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    def is_monic(self) -> bool:
        return bool(self._c) and self._c[-1] == ONE

    def _check(self, other):
        if isinstance(other, UPoly):
            if type(other) is not type(self):
                raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
            return other
        s = _as_scalar(other)
        if s is NotImplemented:
            return s
        return type(self)._raw([s])

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        a, b = self._c, other._c
        if len(a) < len(b):
            a, b = b, a
        return type(self)._raw([x + y for x, y in zip(a, b)] + list(a[len(b):]))

    __radd__ = __add__

    def __neg__(self):
        return type(self)._raw([-a for a in self._c])

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> UPoly:
        s = to_scalar(s)
        if not s:
            return type(self)._raw([])
        return type(self)._raw([a * s for a in self._c])

    def __mul__(self, other):
        if not isinstance(other, UPoly):
            s = _as_scalar(other)
            if s is NotImplemented:
                return s
            return self.scale(s)
        other = self._check(other)
        if not self._c or not other._c:
            return type(self)._raw([])
        accs = [ScalarAccumulator() for _ in range(len(self._c) + len(other._c) - 1)]
        for i, a in enumerate(self._c):
            if a:
                for j, b in enumerate(other._c):
                    accs[i + j].addmul(a, b)
        return type(self)._raw([acc.value() for acc in accs])

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, k: int):
        result = type(self).const(1)
        for _ in range(k):
            result = result * self
        return result

    def mul_var(self, k: int = 1):
        """Multiply by the variable to the k-th power."""
        if not self._c:
            return self
        return type(self)._raw([ZERO] * k + list(self._c))

    def derivative(self, times: int = 1):
        c = list(self._c)
        for _ in range(times):
            c = [a.scale(i) for i, a in enumerate(c)][1:]
        return type(self)._raw(c)

    def __call__(self, value):
        """Horner evaluation at a Scalar / rational value."""
        v = to_scalar(value)
        result = ZERO
        for a in reversed(self._c):
            result = result * v + a
        return result

    def at_int(self, n: int) -> Scalar:
        acc = ScalarAccumulator()
        p = mpq(1)
        for a in self._c:
            if a:
                acc.add(a.scale(p))
            p *= n
        return acc.value()

    def substitute_params(self, assignment: Mapping):
        return type(self)._raw([a.substitute(assignment) for a in self._c])

    def evaluate_params(self, assignment: Mapping) -> list:
        return [eval_params(a, assignment) for a in self._c]

    def variables(self) -> set[str]:
        out = set()
        for a in self._c:
            out |= a.variables()
        return out

    def __eq__(self, other):
        if isinstance(other, UPoly):
            return type(other) is type(self) and self._c == other._c
        s = _as_scalar(other)
        if s is NotImplemented:
            return s
        return self._c == ((s,) if s else ())

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self._c))
        return self._hash

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for k in range(len(self._c) - 1, -1, -1):
            a = self._c[k]
            if not a:
                continue
            if k == 0:
                parts.append(str(a))
                continue
            mono = self.VAR if k == 1 else f"{self.VAR}^{k}"
            if a == ONE:
                parts.append(mono)
            elif a == -ONE:
                parts.append(f"-{mono}")
            elif a.needs_parens():
                parts.append(f"({a})*{mono}")
            else:
                parts.append(f"{a}*{mono}")
        text = parts[0]
        for p in parts[1:]:
            text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return text

    def __repr__(self):
        return f"{type(self).__name__}({self})"

    def to_json(self):
        return [
            {"power": k, "coefficient": a.to_json()}
            for k, a in sorted(enumerate(self._c), reverse=True)
            if a
        ]

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, list):
            raise SpecError(f"{cls.__name__} JSON must be a list of terms")
        top = max((int(t["power"]) for t in data), default=-1)
        c = [ZERO] * (top + 1)
        for t in data:
            k = int(t["power"])
            c[k] = c[k] + Scalar.from_json(t["coefficient"])
        return cls._raw(c)


class XPoly(UPoly):
    VAR = "x"
    __slots__ = ()


class NPoly(UPoly):
    VAR = "n"
    __slots__ = ()

    def shift(self, k: int) -> NPoly:
        """The polynomial n -> c(n + k)."""
        if k == 0 or len(self._c) <= 1:
            return self
        lin = NPoly._raw([Scalar.const(k), ONE])
        result = NPoly._raw([])
        for a in reversed(self._c):
            result = result * lin + a
        return result


# ---------------------------------------------------------------------------
# automorphism datum


class QPoly:
    """Polynomial over Q in a formal indeterminate X.

    ``QPoly(coeffs)`` insists on a zero constant term, which is what makes
    exp(q(B)) act on polynomials by a finite sum.  Derivatives and other
    derived quantities (q', q'', q'^2, ...) are built with
    ``allow_constant=True``.
    """

    __slots__ = ("_c", "allow_constant")

    def __init__(self, coeffs: Iterable = (), allow_constant: bool = False):
        c = [rat(a) for a in coeffs]
        while c and not c[-1]:
            c.pop()
        if c and c[0] and not allow_constant:
            raise InvalidQError(f"q must have zero constant term, got {rat_str(c[0])}")
        self._c = tuple(c)
        self.allow_constant = allow_constant

    @classmethod
    def from_terms(cls, terms, allow_constant: bool = False) -> QPoly:
        """From ``[[coeff, power], ...]`` pairs."""
        top = -1
        items = []
        for pair in terms:
            if len(pair) != 2:
                raise SpecError(f"q term must be [coeff, power], got {pair!r}")
            c, k = rat(pair[0]), int(pair[1])
            if k < 0:
                raise SpecError(f"negative power in q: {k}")
            items.append((c, k))
            top = max(top, k)
        c = [mpq(0)] * (top + 1)
        for a, k in items:
            c[k] += a
        return cls(c, allow_constant=allow_constant)

    @classmethod
    def monomial(cls, k: int, c=1) -> QPoly:
        return cls([0] * k + [c], allow_constant=(k == 0))

    @property
    def coeffs(self) -> tuple:
        return self._c

    @property
    def degree(self) -> int:
        return len(self._c) - 1

    def is_zero(self) -> bool:
        return not self._c

    def derivative(self) -> QPoly:
        return QPoly([i * a for i, a in enumerate(self._c)][1:], allow_constant=True)

    def __add__(self, other: QPoly) -> QPoly:
        a, b = self._c, other._c
        if len(a) < len(b):
            a, b = b, a
        return QPoly([x + y for x, y in zip(a, b)] + list(a[len(b):]), allow_constant=True)

    def __neg__(self):
        return QPoly([-a for a in self._c], allow_constant=self.allow_constant)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, QPoly):
            if not self._c or not other._c:
                return QPoly([], allow_constant=True)
            out = [mpq(0)] * (len(self._c) + len(other._c) - 1)
            for i, a in enumerate(self._c):
                for j, b in enumerate(other._c):
                    out[i + j] += a * b
            return QPoly(out, allow_constant=True)
        c = rat(other)
        return QPoly([a * c for a in self._c], allow_constant=True)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> QPoly:
        result = QPoly([1], allow_constant=True)
        for _ in range(k):
            result = result * self
        return result

    def mul_x(self, k: int = 1) -> QPoly:
        return QPoly([0] * k + list(self._c), allow_constant=True)

    def __call__(self, value):
        result = mpq(0)
        for a in reversed(self._c):
            result = result * value + a
        return result

    def __eq__(self, other):
        if not isinstance(other, QPoly):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(("QPoly", self._c))

    def to_json(self):
        return [[rat_str(a), k] for k, a in enumerate(self._c) if a]

    def label(self) -> str:
        """Compact label such as ``X^2/2`` or ``-X^3/3``."""
        if not self._c:
            return "0"
        parts = []
        for k in range(len(self._c) - 1, -1, -1):
            a = self._c[k]
            if not a:
                continue
            mono = "1" if k == 0 else ("X" if k == 1 else f"X^{k}")
            sign = "-" if a < 0 else "+"
            a = abs(a)
            body = mono
            if a.numerator != 1 or k == 0:
                body = f"{a.numerator}*{mono}" if k else str(a.numerator)
            if a.denominator != 1:
                body += f"/{a.denominator}"
            parts.append((sign, body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f"{sign}{body}"
        return text

    def __str__(self):
        return self.label()

    def __repr__(self):
        return f"QPoly({self.label()})"


def qpoly_derivative(q: QPoly) -> QPoly:
    return q.derivative()
