"""Exact (p,q)-forms on a chart of C^n with polynomial coefficients.

A :class:`PolyForm` is scalar valued, tangent valued (values in T^{1,0}, the
value index ``t`` meaning d/dz^t) or valued in a rank-r module with a
holomorphic frame e_1..e_r.  Operators on these forms live here as plain
functions; :mod:`hodgelab.calculus.operators` composes them into words.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Dict, Optional, Tuple

from .. import _exterior as ext
from .._rational import Q
from .poly import Poly

Key = Tuple[Tuple[int, ...], Tuple[int, ...], Optional[int]]

KINDS = ("scalar", "tangent", "module")


class ContractViolation(ValueError):
    """Operands of incompatible bidegree or value kind."""


@dataclass(frozen=True)
class PolyForm:
    n: int
    p: int
    q: int
    kind: str = "scalar"
    rank: int = 1
    terms: Dict[Key, Poly] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractViolation(f"unknown value kind {self.kind!r}")
        if self.kind == "tangent" and self.rank != self.n:
            object.__setattr__(self, "rank", self.n)
        if self.kind == "scalar" and self.rank != 1:
            object.__setattr__(self, "rank", 1)
        for (I, J, v) in self.terms:
            if len(I) != self.p or len(J) != self.q:
                raise ContractViolation("term does not match the bidegree")
            if (v is None) != (self.kind == "scalar"):
                raise ContractViolation("value index does not match the value kind")

    # -- basic algebra ----------------------------------------------------
    @property
    def bidegree(self) -> Tuple[int, int]:
        return self.p, self.q

    def like(self, terms=None, p=None, q=None) -> "PolyForm":
        return PolyForm(
            self.n,
            self.p if p is None else p,
            self.q if q is None else q,
            self.kind,
            self.rank,
            {} if terms is None else terms,
        )

    def is_zero(self) -> bool:
        return not self.terms

    def _compatible(self, other: "PolyForm") -> None:
        if (self.n, self.p, self.q, self.kind, self.rank) != (
            other.n, other.p, other.q, other.kind, other.rank
        ):
            raise ContractViolation(
                f"cannot add {self.kind} ({self.p},{self.q}) and {other.kind} ({other.p},{other.q})"
            )

    def __add__(self, other: "PolyForm") -> "PolyForm":
        # a zero form is an identity for addition whatever its bidegree
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        self._compatible(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _acc(out, k, c)
        return self.like(out)

    def __neg__(self) -> "PolyForm":
        return self.like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + (-other)

    def scale(self, value) -> "PolyForm":
        out = {}
        for k, c in self.terms.items():
            s = c.scale(value)
            if s:
                out[k] = s
        return self.like(out)

    def __mul__(self, value) -> "PolyForm":
        return self.scale(value)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyForm):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return (self.n, self.p, self.q, self.kind) == (other.n, other.p, other.q, other.kind) and (
            self.terms == other.terms
        )

    def monomial_count(self) -> int:
        return sum(len(c) for c in self.terms.values())

    def max_degree(self) -> int:
        return max((c.degree() for c in self.terms.values()), default=-1)

    def __repr__(self) -> str:
        if not self.terms:
            return f"PolyForm(0; {self.kind} ({self.p},{self.q}))"
        body = []
        for (I, J, v), c in sorted(self.terms.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2] or 0)):
            basis = "^".join([f"dz{i + 1}" for i in I] + [f"dzb{j + 1}" for j in J]) or "1"
            val = "" if v is None else (f"(x)d{v + 1}" if self.kind == "tangent" else f"(x)e{v + 1}")
            body.append(f"({c}) {basis}{val}")
        return " + ".join(body)


def _acc(out: dict, key, poly: Poly, sign: int = 1) -> None:
    if not poly:
        return
    if sign < 0:
        poly = -poly
    cur = out.get(key)
    if cur is None:
        out[key] = poly
    else:
        s = cur + poly
        if s:
            out[key] = s
        else:
            del out[key]


def zero(n: int, p: int, q: int, kind: str = "scalar", rank: int = 1) -> PolyForm:
    return PolyForm(n, p, q, kind, rank, {})


def from_components(n: int, p: int, q: int, comps: dict, kind: str = "scalar", rank: int = 1) -> PolyForm:
    """Build a form from ``{(I, J[, v]): Poly}`` with 0-based sorted index tuples."""
    terms = {}
    for key, c in comps.items():
        if len(key) == 2:
            key = (tuple(key[0]), tuple(key[1]), None)
        else:
            key = (tuple(key[0]), tuple(key[1]), key[2])
        if not isinstance(c, Poly):
            c = Poly.const(n, c)
        _acc(terms, key, c)
    return PolyForm(n, p, q, kind, rank, terms)


# -- exterior operations ----------------------------------------------------


def wedge(a: PolyForm, b: PolyForm) -> PolyForm:
    if a.n != b.n:
        raise ContractViolation("forms over different dimensions")
    if a.kind != "scalar" and b.kind != "scalar":
        raise ContractViolation("wedge of two vector-valued forms")
    kind, rank = (b.kind, b.rank) if a.kind == "scalar" else (a.kind, a.rank)
    out = {}
    for (I1, J1, v1), c1 in a.terms.items():
        for (I2, J2, v2), c2 in b.terms.items():
            s = ext.wedge(I1, J1, I2, J2)
            if s is None:
                continue
            _acc(out, (s[1], s[2], v1 if v1 is not None else v2), c1 * c2, s[0])
    return PolyForm(a.n, a.p + b.p, a.q + b.q, kind, rank, out)


def contract(phi: PolyForm, alpha: PolyForm) -> PolyForm:
    """i_phi alpha for a tangent-valued (0,s) form phi."""
    if phi.kind != "tangent" or phi.p != 0:
        raise ContractViolation("contraction needs a tangent-valued (0,s) form")
    if phi.n != alpha.n:
        raise ContractViolation("forms over different dimensions")
    if alpha.p == 0:
        return PolyForm(alpha.n, 0, alpha.q + phi.q, alpha.kind, alpha.rank, {})
    out = {}
    for (_, S, t), c1 in phi.terms.items():
        for (I, J, v), c2 in alpha.terms.items():
            s = ext.contract(t, S, I, J)
            if s is None:
                continue
            _acc(out, (s[1], s[2], v), c1 * c2, s[0])
    return PolyForm(alpha.n, alpha.p - 1, alpha.q + phi.q, alpha.kind, alpha.rank, out)


def dbar(alpha: PolyForm) -> PolyForm:
    out = {}
    for (I, J, v), c in alpha.terms.items():
        for j in range(alpha.n):
            s = ext.dbar_basis(j, I, J)
            if s is None:
                continue
            _acc(out, (s[1], s[2], v), c.dbar(j), s[0])
    return PolyForm(alpha.n, alpha.p, alpha.q + 1, alpha.kind, alpha.rank, out)


def del_(alpha: PolyForm) -> PolyForm:
    out = {}
    for (I, J, v), c in alpha.terms.items():
        for j in range(alpha.n):
            s = ext.del_basis(j, I, J)
            if s is None:
                continue
            _acc(out, (s[1], s[2], v), c.d(j), s[0])
    return PolyForm(alpha.n, alpha.p + 1, alpha.q, alpha.kind, alpha.rank, out)


@dataclass(frozen=True)
class Connection:
    """nabla = d + A on a trivialised rank-r bundle, A an r x r matrix of (1,0)-forms.

    ``A[(a, b)]`` is the scalar (1,0)-form A_{ab}; missing entries are zero.
    The (0,1) part of nabla is plain dbar, the shape of a Chern connection in a
    holomorphic frame.
    """

    n: int
    rank: int
    A: Dict[Tuple[int, int], PolyForm] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for (a, b), form in self.A.items():
            if not (0 <= a < self.rank and 0 <= b < self.rank):
                raise ContractViolation("connection index out of range")
            if form.kind != "scalar" or form.bidegree != (1, 0):
                raise ContractViolation("connection entries must be scalar (1,0)-forms")

    @classmethod
    def trivial(cls, n: int, rank: int) -> "Connection":
        return cls(n, rank, {})

    def apply_matrix(self, alpha: PolyForm) -> PolyForm:
        """(A ^ s)_a = sum_b A_ab ^ s_b."""
        out = {}
        for (a, b), Aab in self.A.items():
            for (I, J, v), c in alpha.terms.items():
                if v != b:
                    continue
                for (I1, J1, _), c1 in Aab.terms.items():
                    s = ext.wedge(I1, J1, I, J)
                    if s is None:
                        continue
                    _acc(out, (s[1], s[2], a), c1 * c, s[0])
        return PolyForm(alpha.n, alpha.p + 1, alpha.q, alpha.kind, alpha.rank, out)


def nabla_prime(alpha: PolyForm, conn: Optional[Connection] = None) -> PolyForm:
    """(1,0) part of the connection; plain del for scalar and tangent forms."""
    out = del_(alpha)
    if alpha.kind == "module" and conn is not None and conn.A:
        if conn.rank != alpha.rank:
            raise ContractViolation("connection rank does not match the bundle")
        out = out + conn.apply_matrix(alpha)
    return out


def nabla(alpha: PolyForm, conn: Optional[Connection] = None) -> PolyForm:
    """Full connection, returned as the graded sum of its (p+1,q) and (p,q+1) pieces."""
    return GradedForm.of(nabla_prime(alpha, conn), dbar(alpha))


def bracket(phi: PolyForm, psi: PolyForm) -> PolyForm:
    """[phi, psi] = sum_ij (phi^i ^ d_i psi^j - (-1)^{pq} psi^i ^ d_i phi^j) (x) d/dz^j."""
    for x in (phi, psi):
        if x.kind != "tangent" or x.p != 0:
            raise ContractViolation("bracket needs tangent-valued (0,*) forms")
    p, q, n = phi.q, psi.q, phi.n
    sign = -1 if (p * q) % 2 == 0 else 1
    out = {}
    for first, second, s0 in ((phi, psi, 1), (psi, phi, sign)):
        for (_, S1, i), c1 in first.terms.items():
            for (_, S2, j), c2 in second.terms.items():
                dc = c2.d(i)
                if not dc:
                    continue
                m = ext.merge(S1, S2)
                if m is None:
                    continue
                _acc(out, ((), m[1], j), c1 * dc, s0 * m[0])
    return PolyForm(n, 0, p + q, "tangent", n, out)


def i_power(phi: PolyForm, alpha: PolyForm, k: int) -> PolyForm:
    out = alpha
    for _ in range(k):
        out = contract(phi, out)
    return out


# -- graded sums --------------------------------------------------------------


@dataclass(frozen=True)
class GradedForm:
    """A finite sum of forms of different bidegrees with a common value kind."""

    pieces: Dict[Tuple[int, int], PolyForm] = field(default_factory=dict)

    @classmethod
    def of(cls, *forms: PolyForm) -> "GradedForm":
        out: Dict[Tuple[int, int], PolyForm] = {}
        for f in forms:
            if f.p < 0 or f.q < 0 or f.p > f.n or f.q > f.n:
                continue
            if f.bidegree in out:
                out[f.bidegree] = out[f.bidegree] + f
            else:
                out[f.bidegree] = f
        return cls({k: v for k, v in out.items() if not v.is_zero()})

    @classmethod
    def lift(cls, x) -> "GradedForm":
        return x if isinstance(x, GradedForm) else cls.of(x)

    def forms(self):
        return [self.pieces[k] for k in sorted(self.pieces)]

    def __add__(self, other) -> "GradedForm":
        other = GradedForm.lift(other)
        return GradedForm.of(*self.forms(), *other.forms())

    def __neg__(self) -> "GradedForm":
        return GradedForm({k: -v for k, v in self.pieces.items()})

    def __sub__(self, other) -> "GradedForm":
        return self + (-GradedForm.lift(other))

    def scale(self, value) -> "GradedForm":
        return GradedForm.of(*(f.scale(value) for f in self.forms()))

    def map(self, fn) -> "GradedForm":
        out = []
        for f in self.forms():
            r = fn(f)
            out.extend(GradedForm.lift(r).forms())
        return GradedForm.of(*out)

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.pieces.values())

    def monomial_count(self) -> int:
        return sum(f.monomial_count() for f in self.pieces.values())

    def __repr__(self) -> str:
        return " + ".join(repr(f) for f in self.forms()) or "0"


def graded_contract(phi: PolyForm, x) -> GradedForm:
    return GradedForm.lift(x).map(lambda f: contract(phi, f) if f.p > 0 else zero(f.n, 0, f.q + phi.q, f.kind, f.rank))


def exp_contract(phi: PolyForm, alpha, sign: int = 1) -> GradedForm:
    """e^{+- i_phi} alpha = sum_k (+-1)^k / k! i_phi^k alpha (a finite sum)."""
    if phi.q != 1:
        raise ContractViolation("the exponential is defined for (0,1) Beltrami forms")
    total = GradedForm.lift(alpha)
    term = GradedForm.lift(alpha)
    k = 0
    while True:
        k += 1
        term = graded_contract(phi, term)
        if term.is_zero():
            break
        total = total + term.scale(Q(sign**k, factorial(k)))
    return total
