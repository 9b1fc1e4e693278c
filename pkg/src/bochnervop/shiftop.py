"""Difference operators in the discrete variable n.

A ``ShiftOp`` is ``sum_k c_k(n) T^k`` with ``T f(n) = f(n + 1)``, stored with
all n-dependence to the left of the shifts.  The defining relation is
``T^k c(n) = c(n + k) T^k``.  Operators act on sequences; ``(S1 S2) f`` means
``S1 (S2 f)``.
"""

from __future__ import annotations

import hashlib
import json
from typing import Callable, Mapping, Sequence

from .errors import SpecError, TableOutOfRange
from .ring import NPoly, QPoly, Scalar, XPoly, to_scalar


class ShiftOp:
    __slots__ = ("_t", "_hash")

    def __init__(self, terms: Mapping[int, NPoly] | None = None):
        t = {}
        for k, c in (terms or {}).items():
            c = c if isinstance(c, NPoly) else NPoly.const(c)
            if c:
                t[int(k)] = t[int(k)] + c if int(k) in t else c
        self._t = {k: c for k, c in t.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, terms):
        obj = cls.__new__(cls)
        obj._t = {k: c for k, c in terms.items() if c}
        obj._hash = None
        return obj

    @classmethod
    def T(cls, k: int = 1) -> ShiftOp:
        return cls._raw({k: NPoly.const(1)})

    @classmethod
    def n(cls) -> ShiftOp:
        return cls._raw({0: NPoly.var()})

    @classmethod
    def const(cls, s) -> ShiftOp:
        return cls._raw({0: NPoly.const(s)})

    @classmethod
    def identity(cls) -> ShiftOp:
        return cls.const(1)

    @classmethod
    def zero(cls) -> ShiftOp:
        return cls._raw({})

    @classmethod
    def mult(cls, c: NPoly) -> ShiftOp:
        """Multiplication by c(n)."""
        return cls._raw({0: c})

    @property
    def terms(self) -> dict:
        return dict(self._t)

    def coeff(self, k: int) -> NPoly:
        return self._t.get(k, NPoly())

    def offsets(self) -> list[int]:
        return sorted(self._t, reverse=True)

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def _coerce(self, other):
        if isinstance(other, ShiftOp):
            return other
        if isinstance(other, NPoly):
            return ShiftOp.mult(other)
        try:
            return ShiftOp.const(to_scalar(other))
        except TypeError:
            return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._t)
        for k, c in other._t.items():
            out[k] = out[k] + c if k in out else c
        return ShiftOp._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return ShiftOp._raw({k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> ShiftOp:
        s = to_scalar(s)
        return ShiftOp._raw({k: c.scale(s) for k, c in self._t.items()})

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return shift_compose(self, other)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return shift_compose(other, self)

    def __pow__(self, k: int) -> ShiftOp:
        result = ShiftOp.identity()
        for _ in range(k):
            result = shift_compose(result, self)
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("ShiftOp", frozenset(self._t.items())))
        return self._hash

    def coefficients_at(self, n: int) -> dict[int, Scalar]:
        """``{k: c_k(n)}`` at an integer n, zero entries dropped."""
        out = {}
        for k, c in self._t.items():
            v = c.at_int(n)
            if v:
                out[k] = v
        return out

    def substitute_params(self, assignment) -> ShiftOp:
        return ShiftOp._raw({k: c.substitute_params(assignment) for k, c in self._t.items()})

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for k in self.offsets():
            c = self._t[k]
            shift = "" if k == 0 else ("T" if k == 1 else f"T^{k}" if k > 0 else f"T^({k})")
            cs = str(c)
            if not shift:
                parts.append(cs)
            elif c == NPoly.const(1):
                parts.append(shift)
            elif len([a for a in c.coeffs if a]) == 1 and not cs.startswith("-"):
                parts.append(f"{cs}*{shift}")
            else:
                parts.append(f"({cs})*{shift}")
        return " + ".join(parts)

    def __repr__(self):
        return f"ShiftOp({self})"

    def to_json(self):
        return [{"offset": k, "coefficient": self._t[k].to_json()} for k in self.offsets()]

    @classmethod
    def from_json(cls, data) -> ShiftOp:
        return cls({int(t["offset"]): NPoly.from_json(t["coefficient"]) for t in data})


def shift_compose(S1: ShiftOp, S2: ShiftOp) -> ShiftOp:
    """Normal form of S1 S2 via ``T^a d(n) = d(n + a) T^a``."""
    out = {}
    for a, c in S1._t.items():
        for b, d in S2._t.items():
            term = c * d.shift(a)
            k = a + b
            out[k] = out[k] + term if k in out else term
    return ShiftOp._raw(out)


def qpoly_at_shiftop(q: QPoly, G: ShiftOp) -> ShiftOp:
    """Horner evaluation q(G) in the shift algebra; q may have a constant term."""
    result = ShiftOp.zero()
    for a in reversed(q.coeffs):
        result = shift_compose(result, G) + ShiftOp.const(a)
    return result


def apply_to_sequence(S: ShiftOp, f: Callable[[int], object], n: int, upper: int | None = None):
    """``sum_k c_k(n) f(n + k)`` with ``f(m) = 0`` for ``m < 0``.

    ``f`` returns ring elements supporting ``scale``/``*`` by ``Scalar``.  If
    ``upper`` is given, a reference to an index above it with a nonzero
    coefficient raises ``TableOutOfRange``.
    """
    total = None
    for k, c in sorted(S.coefficients_at(n).items()):
        m = n + k
        if m < 0:
            continue
        if upper is not None and m > upper:
            raise TableOutOfRange(f"index {m} referenced at n={n}, table stops at {upper}")
        term = f(m) * c
        total = term if total is None else total + term
    return total


class PolyTable:
    """Monic polynomials ``P_0 .. P_N`` with ``deg P_n = n``."""

    __slots__ = ("polys", "spec_hash", "meta")

    def __init__(self, polys: Sequence[XPoly], spec_hash: str = "", meta: Mapping | None = None):
        polys = tuple(polys)
        for n, p in enumerate(polys):
            if p.degree != n or not p.is_monic():
                raise SpecError(f"table entry {n} is not monic of degree {n}: {p}")
        self.polys = polys
        self.spec_hash = spec_hash
        self.meta = dict(meta or {})

    @property
    def N(self) -> int:
        return len(self.polys) - 1

    def __len__(self):
        return len(self.polys)

    def __getitem__(self, n):
        return self.polys[n]

    def __iter__(self):
        return iter(self.polys)

    def __eq__(self, other):
        return isinstance(other, PolyTable) and self.polys == other.polys

    def __hash__(self):
        return hash(self.polys)

    def entry(self, m: int) -> XPoly:
        return self.polys[m] if m >= 0 else XPoly()

    def to_json(self):
        return {
            "spec_hash": self.spec_hash,
            "N": self.N,
            "polynomials": [{"n": n, "poly": p.to_json()} for n, p in enumerate(self.polys)],
        }

    @classmethod
    def from_json(cls, data) -> PolyTable:
        try:
            items = sorted(data["polynomials"], key=lambda t: int(t["n"]))
            polys = [XPoly.from_json(t["poly"]) for t in items]
        except (KeyError, TypeError) as exc:
            raise SpecError(f"malformed table document: {exc}") from exc
        return cls(polys, spec_hash=data.get("spec_hash", ""))

    @classmethod
    def seed(cls, N: int) -> PolyTable:
        """The monomial table ``S_n = x^n``."""
        return cls([XPoly.monomial(n) for n in range(N + 1)], spec_hash="seed")


def apply_to_table(S: ShiftOp, P: PolyTable, n: int) -> XPoly:
    out = apply_to_sequence(S, P.entry, n, upper=P.N)
    return XPoly() if out is None else out


def bispectral_b(mu: NPoly) -> dict[str, ShiftOp]:
    """Generator images of the anti-isomorphism for ``psi(x, n) = x^n``."""
    return {
        "x": ShiftOp.T(1),
        "H": ShiftOp.n(),
        "B": shift_compose(ShiftOp.mult(mu), ShiftOp.T(-1)),
    }


def b_word(images: Mapping[str, ShiftOp], word: Sequence[str]) -> ShiftOp:
    """Image of the product ``word[0] word[1] ...``; b reverses products."""
    result = ShiftOp.identity()
    for g in word:
        result = shift_compose(images[g], result)
    return result


def stable_hash(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]

