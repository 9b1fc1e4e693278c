"""The three polynomial families obtained from exp(ad q(B)).

Each family is fixed by an algebra of differential operators generated by
``x``, ``H = x d`` and a lowering operator ``B``:

========  ==============================  ===============================
kind      B                               mu(n), with B x^n = mu(n) x^(n-1)
========  ==============================  ===============================
weyl      d                               n
sl2       x d^2 + beta d                  n (n - 1 + beta)
cubic     x^2 d^3 + alpha x d^2 + beta d  n [(n-1)(n-2) + alpha (n-1) + beta]
========  ==============================  ===============================

and a polynomial q without constant term.  The polynomials are
``P_n = exp(q(B)) x^n``, the eigen-operator is ``L1 = H + q'(B) B``.

Besides the constructive objects, this module assembles claimed closed forms
for ``b'(x)``, the recurrence and ``sigma(x)``.  They are kept as given,
inconsistencies included; the ``verify`` module decides which of them hold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .diffop import DiffOp, ad_exp, apply, commutator, compose, default_ad_guard, exp_apply, poly_of_op
from .errors import RelationViolation, SigmaMismatch, SpecError, UndeclaredParameterError
from .ring import NPoly, QPoly, Scalar, XPoly, rat, rat_str
from .shiftop import PolyTable, ShiftOp, bispectral_b, qpoly_at_shiftop, shift_compose, stable_hash

KINDS = ("weyl", "sl2", "cubic")
KIND_PARAMS = {"weyl": (), "sl2": ("beta",), "cubic": ("alpha", "beta")}
ORDERINGS = ("as-written", "reversed")
DEFAULT_N = 30


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    q: QPoly
    params: tuple = ()  # ((name, Rat or None), ...); None means symbolic
    N: int = DEFAULT_N

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"kind must be one of {', '.join(KINDS)}, got {self.kind!r}")
        if not isinstance(self.q, QPoly):
            raise SpecError("q must be a QPoly")
        if self.q.is_zero():
            raise SpecError("q must be a nonzero polynomial")
        if self.q.coeffs[0]:
            raise SpecError("q must have zero constant term")
        if not isinstance(self.N, int) or self.N < 0:
            raise SpecError(f"N must be a nonnegative integer, got {self.N!r}")
        allowed = KIND_PARAMS[self.kind]
        given = dict(self.params)
        for name in given:
            if name not in allowed:
                raise UndeclaredParameterError(
                    f"parameter {name!r} is not used by the {self.kind} family"
                    + (f" (allowed: {', '.join(allowed)})" if allowed else "")
                )
        normalized = tuple(
            (name, None if given.get(name) is None else rat(given[name])) for name in allowed
        )
        object.__setattr__(self, "params", normalized)

    @classmethod
    def make(cls, kind: str, q, N: int = DEFAULT_N, **params) -> FamilySpec:
        """Convenience constructor; ``q`` may be a QPoly or a coefficient list."""
        if not isinstance(q, QPoly):
            q = QPoly(q)
        return cls(kind, q, tuple(params.items()), N)

    def param(self, name: str) -> Scalar:
        for p, v in self.params:
            if p == name:
                return Scalar.var(name) if v is None else Scalar.const(v)
        raise UndeclaredParameterError(f"the {self.kind} family has no parameter {name!r}")

    @property
    def symbolic(self) -> tuple[str, ...]:
        return tuple(p for p, v in self.params if v is None)

    def assignment(self) -> dict:
        return {p: v for p, v in self.params if v is not None}

    def with_N(self, N: int) -> FamilySpec:
        return FamilySpec(self.kind, self.q, self.params, N)

    def label(self) -> str:
        extra = "".join(f";{p}={rat_str(v)}" for p, v in self.params if v is not None)
        return f"{self.kind}[q={self.q.label()}{extra}]"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "q": self.q.to_json(),
            "params": {p: ("symbolic" if v is None else rat_str(v)) for p, v in self.params},
            "N": self.N,
        }

    @classmethod
    def from_json(cls, data) -> FamilySpec:
        if not isinstance(data, dict):
            raise SpecError("family spec must be a JSON object")
        unknown = set(data) - {"kind", "q", "params", "N"}
        if unknown:
            raise SpecError(f"unknown spec field(s): {', '.join(sorted(unknown))}")
        if "kind" not in data or "q" not in data:
            raise SpecError("family spec needs 'kind' and 'q'")
        try:
            q = QPoly.from_terms(data["q"])
        except SpecError:
            raise
        except (TypeError, ValueError) as exc:
            raise SpecError(f"bad q: {exc}") from exc
        params = {}
        for name, value in (data.get("params") or {}).items():
            params[name] = None if value in (None, "symbolic") else rat(str(value))
        N = data.get("N", DEFAULT_N)
        if isinstance(N, bool) or not isinstance(N, int):
            raise SpecError(f"N must be an integer, got {N!r}")
        return cls(data["kind"], q, tuple(params.items()), N)

    def hash(self) -> str:
        return stable_hash(self.to_json())


@dataclass(frozen=True)
class Family:
    spec: FamilySpec
    x_op: DiffOp
    H: DiffOp
    B: DiffOp
    mu: NPoly
    q_op: DiffOp
    L1: DiffOp
    b_map: dict
    claimed_bprime_x: ShiftOp
    claimed_theorem_recurrence: ShiftOp
    extras: dict = field(default_factory=dict)

    def ad_guard(self, A: DiffOp) -> int:
        return default_ad_guard(A, self.q_op, self.spec.q.degree)

    def sigma(self, A: DiffOp) -> DiffOp:
        return ad_exp(self.q_op, A, self.ad_guard(A))

    def sigma_inv(self, A: DiffOp) -> DiffOp:
        return ad_exp(-self.q_op, A, self.ad_guard(A))

    def q_at(self, q: QPoly) -> DiffOp:
        """Any polynomial in B (constant term allowed)."""
        return poly_of_op(q, self.B)


def generators(spec: FamilySpec) -> tuple[DiffOp, DiffOp, DiffOp]:
    x = DiffOp.x()
    d = DiffOp.d()
    H = DiffOp.monomial(1, 1)
    if spec.kind == "weyl":
        B = d
    elif spec.kind == "sl2":
        B = DiffOp.monomial(1, 2) + d.scale(spec.param("beta"))
    else:
        B = (
            DiffOp.monomial(2, 3)
            + DiffOp.monomial(1, 2).scale(spec.param("alpha"))
            + d.scale(spec.param("beta"))
        )
    return x, H, B


def bx_commutator(spec: FamilySpec, H: DiffOp) -> DiffOp:
    """The true value of [B, x] for the family."""
    if spec.kind == "weyl":
        return DiffOp.identity()
    if spec.kind == "sl2":
        return H.scale(2) + DiffOp.const(spec.param("beta"))
    alpha, beta = spec.param("alpha"), spec.param("beta")
    return compose(H, H).scale(3) + H.scale(alpha.scale(2) - 3) + DiffOp.const(beta)


def lowering_mu(spec: FamilySpec, n: int | None = None):
    """Closed form of mu(n); an ``NPoly`` for symbolic n, else a ``Scalar``."""
    nn = NPoly.var()
    if spec.kind == "weyl":
        mu = nn
    elif spec.kind == "sl2":
        mu = nn * (nn - 1 + spec.param("beta"))
    else:
        alpha, beta = spec.param("alpha"), spec.param("beta")
        mu = nn * ((nn - 1) * (nn - 2) + (nn - 1).scale(alpha) + beta)
    return mu if n is None else mu.at_int(n)


def interpolate_npoly(values, start: int = 0) -> NPoly:
    """Newton forward-difference interpolation through ``(start + i, values[i])``."""
    diffs = []
    row = list(values)
    while row:
        diffs.append(row[0])
        row = [b - a for a, b in zip(row, row[1:])]
    nn = NPoly.var() - start
    result = NPoly()
    basis = NPoly.const(1)
    for k, dk in enumerate(diffs):
        if dk:
            result = result + basis.scale(dk)
        basis = basis * (nn - k).scale(mpq(1, k + 1))
    return result


def _mu_from_action(B: DiffOp, N: int) -> NPoly:
    values = []
    for n in range(max(N, 6) + 1):
        img = apply(B, XPoly.monomial(n))
        c = img.coeff(n - 1) if n else img.coeff(0)
        if img != (XPoly.monomial(n - 1, c) if n else XPoly()):
            raise RelationViolation(f"B x^{n} = {img} is not a multiple of x^{n - 1}")
        values.append(c)
    mu = interpolate_npoly(values)
    if mu.degree > B.order:
        raise RelationViolation(f"mu(n) interpolates to degree {mu.degree} > order of B")
    return mu


def build_family(spec: FamilySpec) -> Family:
    """Construct a family and verify its defining relations by composition."""
    x, H, B = generators(spec)

    checks = [
        ("[H, x] = x", commutator(H, x), x),
        ("[H, B] = -B", commutator(H, B), -B),
        ("[B, x]", commutator(B, x), bx_commutator(spec, H)),
    ]
    for name, got, want in checks:
        if got != want:
            raise RelationViolation(f"{name}: got {got}, expected {want}")

    mu = _mu_from_action(B, spec.N)
    if mu != lowering_mu(spec):
        raise RelationViolation(f"interpolated mu(n) = {mu} differs from {lowering_mu(spec)}")

    q = spec.q
    q_op = poly_of_op(q, B)
    L1 = H + compose(poly_of_op(q.derivative(), B), B)
    L1_series = ad_exp(q_op, H, default_ad_guard(H, q_op, q.degree))
    if L1 != L1_series:
        raise SigmaMismatch(f"L1 by composition {L1} != L1 by ad-series {L1_series}")

    extras = {}
    if spec.kind == "cubic":
        extras["W"] = claimed_W(spec, H)
        extras["R"] = claimed_R(spec, H)

    return Family(
        spec=spec,
        x_op=x,
        H=H,
        B=B,
        mu=mu,
        q_op=q_op,
        L1=L1,
        b_map=bispectral_b(mu),
        claimed_bprime_x=claimed_bprime_x(spec),
        claimed_theorem_recurrence=claimed_theorem_recurrence(spec),
        extras=extras,
    )


def generate_table(spec: FamilySpec, family: Family | None = None) -> PolyTable:
    """``P_n = exp(q(B)) x^n`` for n = 0..N."""
    if family is None:
        _, _, B = generators(spec)
        Q = poly_of_op(spec.q, B)
    else:
        Q = family.q_op
    polys = [exp_apply(Q, XPoly.monomial(n)) for n in range(spec.N + 1)]
    stray = polys[-1].variables() - set(spec.symbolic)
    if stray:
        raise UndeclaredParameterError(f"table mentions undeclared parameters {sorted(stray)}")
    return PolyTable(polys, spec_hash=spec.hash(), meta={"family": spec.label()})


# ---------------------------------------------------------------------------
# claimed closed forms


def _prod(ordering: str, *factors: ShiftOp) -> ShiftOp:
    if ordering not in ORDERINGS:
        raise ValueError(f"ordering must be one of {ORDERINGS}")
    seq = factors if ordering == "as-written" else tuple(reversed(factors))
    out = ShiftOp.identity()
    for f in seq:
        out = shift_compose(out, f)
    return out


def _bB(spec: FamilySpec) -> ShiftOp:
    return shift_compose(ShiftOp.mult(lowering_mu(spec)), ShiftOp.T(-1))


def _derivs(q: QPoly, k: int) -> list[QPoly]:
    out = [q]
    for _ in range(k):
        out.append(out[-1].derivative())
    return out


def _X() -> QPoly:
    return QPoly([0, 1])


def Q0_poly(q: QPoly) -> QPoly:
    """``-q''' X^2 + (2 q'' X + 3 q' - q'^2 X) X q'`` as a polynomial in X."""
    _, q1, q2, q3 = _derivs(q, 3)
    X = _X()
    brace = q2 * X * 2 + q1 * 3 - q1 * q1 * X
    return -(q3 * X * X) + brace * X * q1


def Q1_poly(q: QPoly) -> QPoly:
    """``(q'^2 - q'') X / 2``."""
    _, q1, q2 = _derivs(q, 2)
    return (q1 * q1 - q2) * _X() * mpq(1, 2)


def _npoly(*coeffs) -> NPoly:
    return NPoly(coeffs)


def claimed_bprime_x(spec: FamilySpec, ordering: str = "as-written") -> ShiftOp:
    """Claimed closed form of b'(x), products composed per ``ordering``."""
    q = spec.q
    _, q1, q2 = _derivs(q, 2)
    G = _bB(spec)
    T = ShiftOp.T(1)
    if spec.kind == "weyl":
        return T - qpoly_at_shiftop(q1, G)
    if spec.kind == "sl2":
        beta = spec.param("beta")
        lin = ShiftOp.mult(_npoly(beta, 2))
        return (
            T
            - _prod(ordering, qpoly_at_shiftop(q1, G), lin)
            - _prod(ordering, qpoly_at_shiftop(q2, G), G)
            + _prod(ordering, qpoly_at_shiftop(q1 * q1, G), G)
        )
    alpha, beta = spec.param("alpha"), spec.param("beta")
    quad = ShiftOp.mult(_npoly(beta, alpha.scale(2), 3))
    lin = ShiftOp.mult(_npoly(alpha + 3, 6))
    return (
        T
        - _prod(ordering, qpoly_at_shiftop(q1, G), quad)
        + _prod(ordering, qpoly_at_shiftop(Q1_poly(q), G), lin)
        + qpoly_at_shiftop(Q0_poly(q), G)
    )


def claimed_theorem_recurrence(spec: FamilySpec, ordering: str = "as-written") -> ShiftOp:
    """Claimed recurrence operator in its second variant (differs from ``claimed_bprime_x``)."""
    q = spec.q
    _, q1, q2 = _derivs(q, 2)
    G = _bB(spec)
    T = ShiftOp.T(1)
    if spec.kind == "weyl":
        return T - qpoly_at_shiftop(q1, G)
    if spec.kind == "sl2":
        beta = spec.param("beta")
        lin = ShiftOp.mult(_npoly(beta, 2))
        brace = qpoly_at_shiftop(q2 * -2 + q1 * q1, G)
        return T - _prod(ordering, qpoly_at_shiftop(q1, G), lin) + _prod(ordering, brace, G)
    alpha, beta = spec.param("alpha"), spec.param("beta")
    quad = ShiftOp.mult(_npoly(beta, alpha.scale(2), 3))
    lin = ShiftOp.mult(_npoly(alpha + 3, 6))
    return (
        T
        - _prod(ordering, qpoly_at_shiftop(q1, G), quad).scale(3)
        + _prod(ordering, qpoly_at_shiftop(Q1_poly(q), G), lin)
        + qpoly_at_shiftop(Q0_poly(q), G)
    )


def claimed_W(spec: FamilySpec, H: DiffOp) -> DiffOp:
    """``3 H^2 + 2 alpha H + beta`` as claimed for the cubic family."""
    alpha, beta = spec.param("alpha"), spec.param("beta")
    return compose(H, H).scale(3) + H.scale(alpha.scale(2)) + DiffOp.const(beta)


def claimed_R(spec: FamilySpec, H: DiffOp) -> DiffOp:
    """``3 (2H + 1) + 2 alpha``."""
    return H.scale(6) + DiffOp.const(spec.param("alpha").scale(2) + 3)


def claimed_bx(spec: FamilySpec, H: DiffOp) -> DiffOp:
    """The claimed value of [B, x]."""
    if spec.kind == "cubic":
        return claimed_W(spec, H)
    return bx_commutator(spec, H)


def claimed_sigma(fam: Family) -> dict[str, DiffOp]:
    """Claimed closed forms of sigma on generators and of the ad-iterates of x.

    Keys: ``sigma-x``, ``sigma-H``, ``sigma-B``, ``ad<k>-x`` (the k-th
    commutator ad_q(B)^k (x), without the 1/k! factor) and, for the cubic
    family, ``ad1-W`` (the claimed [q(B), W]).
    """
    spec = fam.spec
    q = spec.q
    _, q1, q2, q3 = _derivs(q, 3)
    B, H, x = fam.B, fam.H, fam.x_op
    P = fam.q_at
    out = {"sigma-H": H + compose(P(q1), B), "sigma-B": B}
    if spec.kind == "weyl":
        out["sigma-x"] = x + P(q1)
        out["ad1-x"] = P(q1)
        out["ad2-x"] = DiffOp.zero()
        return out
    if spec.kind == "sl2":
        beta = spec.param("beta")
        two_h = H.scale(2) + DiffOp.const(beta)
        out["sigma-x"] = (
            x + compose(two_h, P(q1)) + compose(P(q2), B) + compose(P(q1 * q1), B)
        )
        out["ad1-x"] = compose(two_h, P(q1)) + compose(P(q2), B)
        out["ad2-x"] = compose(P(q1 * q1), B).scale(2)
        out["ad3-x"] = DiffOp.zero()
        return out
    W, R = fam.extras["W"], fam.extras["R"]
    half = mpq(1, 2)
    B2 = compose(B, B)
    brace = (
        compose(P(q2), B).scale(3)
        + compose(R + DiffOp.const(6), P(q1)).scale(half)
        + compose(P(q1 * q1), B)
    )
    out["sigma-x"] = (
        x
        + compose(W, P(q1))
        + compose(compose(R, P(q2)), B).scale(half)
        + compose(P(q3), B2)
        + compose(compose(brace, B), P(q1))
    )
    out["ad1-x"] = (
        compose(W, P(q1)) + compose(compose(R, P(q2)), B).scale(half) + compose(P(q3), B2)
    )
    brace2 = compose(P(q2), B).scale(6) + compose(R + DiffOp.const(6), P(q1))
    out["ad2-x"] = compose(compose(brace2, B), P(q1))
    out["ad3-x"] = compose(P(q1 * q1 * q1), B2).scale(6)
    out["ad4-x"] = DiffOp.zero()
    out["ad1-W"] = compose(P(q2), B2).scale(mpq(3, 2)) + compose(compose(R, P(q1)), B)
    return out


def seed_lowering_claimed(spec: FamilySpec) -> NPoly | None:
    """The binomial form ``C(n,3) + alpha C(n,2) + beta n`` claimed for cubic B on x^n."""
    if spec.kind != "cubic":
        return None
    nn = NPoly.var()
    c3 = (nn * (nn - 1) * (nn - 2)).scale(mpq(1, 6))
    c2 = (nn * (nn - 1)).scale(mpq(1, 2))
    return c3 + c2.scale(spec.param("alpha")) + nn.scale(spec.param("beta"))

