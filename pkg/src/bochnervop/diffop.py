"""Differential operators with polynomial coefficients.

A ``DiffOp`` is stored in normal form ``sum_i p_i(x) d^i`` with every
coefficient to the left of the derivative powers.  Products are normalised
with the Leibniz rule ``d^i r = sum_l C(i, l) r^(l) d^(i-l)``.
"""

from __future__ import annotations

from math import comb
from typing import Callable, Mapping

from gmpy2 import mpq

from .errors import Cancelled, DegreeNotLowered, GuardExceeded
from .ring import ONE, ZERO, QPoly, ScalarAccumulator, XPoly, to_scalar


class DiffOp:
    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs=()):
        """``coeffs[i]`` is the coefficient of d^i (an ``XPoly`` or scalar)."""
        c = [p if isinstance(p, XPoly) else XPoly.const(p) for p in coeffs]
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
    def from_terms(cls, terms: Mapping[int, XPoly]) -> DiffOp:
        top = max(terms, default=-1)
        c = [XPoly()] * (top + 1)
        for i, p in terms.items():
            c[i] = c[i] + (p if isinstance(p, XPoly) else XPoly.const(p))
        return cls._raw(c)

    @classmethod
    def identity(cls) -> DiffOp:
        return cls._raw([XPoly.const(1)])

    @classmethod
    def zero(cls) -> DiffOp:
        return cls._raw([])

    @classmethod
    def const(cls, s) -> DiffOp:
        return cls._raw([XPoly.const(s)])

    @classmethod
    def x(cls) -> DiffOp:
        return cls._raw([XPoly.var()])

    @classmethod
    def d(cls, k: int = 1) -> DiffOp:
        return cls._raw([XPoly()] * k + [XPoly.const(1)])

    @classmethod
    def monomial(cls, xpow: int, dpow: int, c=1) -> DiffOp:
        """``c * x^xpow * d^dpow``."""
        return cls._raw([XPoly()] * dpow + [XPoly.monomial(xpow, c)])

    @property
    def coeffs(self) -> tuple:
        return self._c

    @property
    def order(self) -> int:
        """Highest derivative order; -1 for the zero operator."""
        return len(self._c) - 1

    def coeff(self, i: int) -> XPoly:
        return self._c[i] if 0 <= i < len(self._c) else XPoly()

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    def terms(self):
        """Yield ``(x_power, d_order, Scalar)`` for every nonzero monomial."""
        for i, p in enumerate(self._c):
            for j, a in enumerate(p.coeffs):
                if a:
                    yield j, i, a

    def is_homogeneous(self):
        """Return the common weight (x-power minus d-order) if there is one."""
        weights = {j - i for j, i, _ in self.terms()}
        return weights.pop() if len(weights) == 1 else None

    # ring structure ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, DiffOp):
            return other
        if isinstance(other, XPoly):
            return DiffOp._raw([other])
        try:
            return DiffOp.const(to_scalar(other))
        except TypeError:
            return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._c, other._c
        if len(a) < len(b):
            a, b = b, a
        return DiffOp._raw([p + r for p, r in zip(a, b)] + list(a[len(b):]))

    __radd__ = __add__

    def __neg__(self):
        return DiffOp._raw([-p for p in self._c])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> DiffOp:
        s = to_scalar(s)
        return DiffOp._raw([p.scale(s) for p in self._c])

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            return compose(self, other)
        if isinstance(other, XPoly):
            return compose(self, DiffOp._raw([other]))
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, XPoly):
            return compose(DiffOp._raw([other]), self)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __pow__(self, k: int) -> DiffOp:
        result = DiffOp.identity()
        for _ in range(k):
            result = compose(result, self)
        return result

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            other = self._coerce(other)
            if other is NotImplemented:
                return other
        return self._c == other._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("DiffOp", self._c))
        return self._hash

    def __call__(self, p: XPoly) -> XPoly:
        return apply(self, p)

    def substitute_params(self, assignment) -> DiffOp:
        return DiffOp._raw([p.substitute_params(assignment) for p in self._c])

    def variables(self) -> set[str]:
        out = set()
        for p in self._c:
            out |= p.variables()
        return out

    # presentation -----------------------------------------------------------

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for i in range(len(self._c) - 1, -1, -1):
            for j in range(self._c[i].degree, -1, -1):
                a = self._c[i].coeff(j)
                if not a:
                    continue
                mono = []
                if j:
                    mono.append("x" if j == 1 else f"x^{j}")
                if i:
                    mono.append("d" if i == 1 else f"d^{i}")
                mono = "*".join(mono)
                if not mono:
                    parts.append(str(a))
                elif a == ONE:
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
        return f"DiffOp({self})"

    def to_json(self):
        return [{"order": i, "coefficient": p.to_json()} for i, p in enumerate(self._c) if p]

    @classmethod
    def from_json(cls, data) -> DiffOp:
        return cls.from_terms({int(t["order"]): XPoly.from_json(t["coefficient"]) for t in data})


def compose(A: DiffOp, B: DiffOp) -> DiffOp:
    """Normal form of the product A B."""
    if not A._c or not B._c:
        return DiffOp.zero()
    order = A.order + B.order
    accs = {}
    # derivatives r_j^(l) are reused across every p_i with i >= l
    derivs = [[r] for r in B._c]
    for i, p in enumerate(A._c):
        if not p:
            continue
        for j, r in enumerate(B._c):
            if not r:
                continue
            ders = derivs[j]
            for l in range(min(i, r.degree) + 1):
                while len(ders) <= l:
                    ders.append(ders[-1].derivative())
                rl = ders[l]
                if not rl:
                    break
                k = i - l + j
                term = (p * rl).scale(comb(i, l)) if l else p * rl
                accs[k] = accs[k] + term if k in accs else term
    return DiffOp._raw([accs.get(k, XPoly()) for k in range(order + 1)])


def commutator(A: DiffOp, B: DiffOp) -> DiffOp:
    return compose(A, B) - compose(B, A)


def _falling(k: int, i: int) -> int:
    out = 1
    for t in range(i):
        out *= k - t
    return out


def apply(A: DiffOp, p: XPoly) -> XPoly:
    """Action of A on the polynomial p."""
    if not A._c or not p:
        return XPoly()
    terms = list(A.terms())
    out = {}
    for k, c in enumerate(p.coeffs):
        if not c:
            continue
        # collect small multipliers per output power before touching the big coefficient c
        mult = {}
        for j, i, a in terms:
            if i > k:
                continue
            f = _falling(k, i)
            t = k - i + j
            m = a.scale(f)
            mult[t] = mult[t] + m if t in mult else m
        for t, m in mult.items():
            if m:
                out.setdefault(t, ScalarAccumulator()).addmul(m, c)
    if not out:
        return XPoly()
    top = max(out)
    return XPoly._raw([out[t].value() if t in out else ZERO for t in range(top + 1)])


def _check_cancel(should_stop):
    if should_stop is not None and should_stop():
        raise Cancelled("operation cancelled by caller")


def exp_apply(
    Q: DiffOp,
    p: XPoly,
    guard: int | None = None,
    should_stop: Callable[[], bool] | None = None,
) -> XPoly:
    """``sum_m Q^m p / m!`` for an operator Q that strictly lowers degree.

    Raises ``DegreeNotLowered`` as soon as an iterate fails to drop in degree,
    and ``GuardExceeded`` if more than ``guard`` applications are needed
    (default ``deg p + 1``).
    """
    if guard is None:
        guard = max(p.degree, 0) + 1
    total, term, m = p, p, 0
    while term:
        m += 1
        if m > guard:
            raise GuardExceeded(f"exp series did not terminate within {guard} applications")
        _check_cancel(should_stop)
        nxt = apply(Q, term).scale(mpq(1, m))
        if nxt and nxt.degree >= term.degree:
            raise DegreeNotLowered(
                f"application {m} mapped degree {term.degree} to degree {nxt.degree}"
            )
        term = nxt
        total = total + term
    return total


def default_ad_guard(A: DiffOp, Q: DiffOp, q_degree: int = 1) -> int:
    return (max(A.order, 0) + max(Q.order, 1) * q_degree) * (q_degree + 2)


def ad_series(
    Q: DiffOp,
    A: DiffOp,
    guard: int | None = None,
    should_stop: Callable[[], bool] | None = None,
) -> list[DiffOp]:
    """Nonzero iterated commutators ``[ad_Q^0 A, ad_Q^1 A, ...]`` (no factorials)."""
    if guard is None:
        guard = default_ad_guard(A, Q)
    out = []
    term, k = A, 0
    while term:
        out.append(term)
        k += 1
        if k > guard:
            raise GuardExceeded(f"ad-series did not vanish within {guard} commutators")
        _check_cancel(should_stop)
        term = commutator(Q, term)
    return out


def ad_exp(
    Q: DiffOp,
    A: DiffOp,
    guard: int | None = None,
    should_stop: Callable[[], bool] | None = None,
) -> DiffOp:
    """The automorphism ``exp(ad_Q)`` applied to A, summed to termination.

    The inverse automorphism is ``ad_exp(-Q, A)``.
    """
    total = DiffOp.zero()
    fact = 1
    for k, term in enumerate(ad_series(Q, A, guard, should_stop)):
        if k:
            fact *= k
        total = total + term.scale(mpq(1, fact))
    return total


def poly_of_op(q: QPoly, B: DiffOp) -> DiffOp:
    """Horner evaluation q(B) in the operator algebra.

    q may carry a constant term (needed for q'(B), q''(B), ...).
    """
    result = DiffOp.zero()
    for a in reversed(q.coeffs):
        result = compose(result, B) + DiffOp.const(a)
    return result

