"""Polynomials in z_1..z_n, zbar_1..zbar_n with Gaussian-rational coefficients.

Monomials are packed into one integer, 8 bits per variable (holomorphic
variables first), so multiplying monomials is integer addition and the
canonical monomial order is the order of the packed keys.
"""

from __future__ import annotations

from typing import Dict, Iterable, Tuple

from .._rational import Q, q_str, to_q

SHIFT = 8
MASK = (1 << SHIFT) - 1
ZERO = Q(0)
ONE = Q(1)

Gauss = Tuple["Q", "Q"]


def gauss(value) -> Gauss:
    """Coerce ints, rationals, complex numbers or (re, im) pairs to a Gaussian rational."""
    if isinstance(value, tuple):
        return to_q(value[0]), to_q(value[1])
    if isinstance(value, complex):
        return to_q(value.real), to_q(value.imag)
    return to_q(value), ZERO


def gmul(a: Gauss, b: Gauss) -> Gauss:
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


def gconj(a: Gauss) -> Gauss:
    return a[0], -a[1]


def ginv(a: Gauss) -> Gauss:
    d = a[0] * a[0] + a[1] * a[1]
    if d == 0:
        raise ZeroDivisionError("inverse of zero")
    return a[0] / d, -a[1] / d


class Poly:
    """Sparse exact polynomial; immutable by convention."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Dict[int, Gauss] | None = None):
        self.n = n
        self.terms = {} if terms is None else terms

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "Poly":
        return cls(n)

    @classmethod
    def const(cls, n: int, value) -> "Poly":
        g = gauss(value)
        return cls(n, {0: g} if g != (ZERO, ZERO) else {})

    @classmethod
    def var(cls, n: int, i: int, bar: bool = False) -> "Poly":
        v = i + (n if bar else 0)
        return cls(n, {1 << (SHIFT * v): (ONE, ZERO)})

    @classmethod
    def monomial(cls, n: int, z_exp: Iterable[int], zbar_exp: Iterable[int], coeff=1) -> "Poly":
        exps = list(z_exp) + list(zbar_exp)
        if len(exps) != 2 * n:
            raise ValueError("exponent vector has wrong length")
        key = 0
        for v, e in enumerate(exps):
            if e < 0 or e > MASK:
                raise ValueError("exponent out of range")
            key |= e << (SHIFT * v)
        g = gauss(coeff)
        return cls(n, {key: g} if g != (ZERO, ZERO) else {})

    # inspection ---------------------------------------------------------
    def exponents(self, key: int) -> Tuple[int, ...]:
        return tuple((key >> (SHIFT * v)) & MASK for v in range(2 * self.n))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def degree(self) -> int:
        return max((sum(self.exponents(k)) for k in self.terms), default=-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.terms.items()))))

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "Poly") -> None:
        if other.n != self.n:
            raise ValueError("polynomials over different dimensions")

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(self.n, other)
        self._check(other)
        out = dict(self.terms)
        for k, (br, bi) in other.terms.items():
            if k in out:
                ar, ai = out[k]
                r, i = ar + br, ai + bi
                if r == 0 and i == 0:
                    del out[k]
                else:
                    out[k] = (r, i)
            else:
                out[k] = (br, bi)
        return Poly(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.n, {k: (-r, -i) for k, (r, i) in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(self.n, other)
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def scale(self, value) -> "Poly":
        g = gauss(value)
        if g == (ZERO, ZERO):
            return Poly(self.n)
        if g == (ONE, ZERO):
            return self
        gr, gi = g
        return Poly(self.n, {k: (r * gr - i * gi, r * gi + i * gr) for k, (r, i) in self.terms.items()})

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        self._check(other)
        out: Dict[int, list] = {}
        for ka, (ar, ai) in self.terms.items():
            for kb, (br, bi) in other.terms.items():
                k = ka + kb
                if ai == 0 and bi == 0:
                    cr, ci = ar * br, ZERO
                else:
                    cr, ci = ar * br - ai * bi, ar * bi + ai * br
                acc = out.get(k)
                if acc is None:
                    out[k] = [cr, ci]
                else:
                    acc[0] += cr
                    acc[1] += ci
        return Poly(self.n, {k: (v[0], v[1]) for k, v in out.items() if v[0] != 0 or v[1] != 0})

    __rmul__ = __mul__

    # calculus -----------------------------------------------------------
    def _deriv(self, v: int) -> "Poly":
        shift = SHIFT * v
        unit = 1 << shift
        out = {}
        for k, (r, i) in self.terms.items():
            e = (k >> shift) & MASK
            if e:
                out[k - unit] = (r * e, i * e)
        return Poly(self.n, out)

    def d(self, i: int) -> "Poly":
        """Derivative in the holomorphic variable z_i."""
        return self._deriv(i)

    def dbar(self, i: int) -> "Poly":
        """Derivative in the antiholomorphic variable zbar_i."""
        return self._deriv(self.n + i)

    def conj(self) -> "Poly":
        """Complex conjugate polynomial (swap z and zbar exponents, conjugate coefficients)."""
        out = {}
        n = self.n
        for k, (r, i) in self.terms.items():
            e = self.exponents(k)
            swapped = e[n:] + e[:n]
            key = 0
            for v, x in enumerate(swapped):
                key |= x << (SHIFT * v)
            out[key] = (r, -i)
        return Poly(n, out)

    def evaluate(self, point) -> Gauss:
        """Exact value at a point of C^n given as Gaussian rationals (zbar = conjugate)."""
        pts = [gauss(z) for z in point]
        if len(pts) != self.n:
            raise ValueError("point has wrong dimension")
        vals = pts + [gconj(z) for z in pts]
        total = (ZERO, ZERO)
        for k, c in self.terms.items():
            term = c
            for v, e in enumerate(self.exponents(k)):
                for _ in range(e):
                    term = gmul(term, vals[v])
            total = (total[0] + term[0], total[1] + term[1])
        return total

    def evaluate_complex(self, zs) -> complex:
        total = 0j
        n = self.n
        vals = list(zs) + [complex(z).conjugate() for z in zs]
        for k, (r, i) in self.terms.items():
            term = complex(float(r), float(i))
            for v, e in enumerate(self.exponents(k)):
                if e:
                    term *= vals[v] ** e
            total += term
        return total

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        names = [f"z{j + 1}" for j in range(self.n)] + [f"zb{j + 1}" for j in range(self.n)]
        for k in sorted(self.terms):
            r, i = self.terms[k]
            coeff = q_str(r) if i == 0 else f"({q_str(r)}{'+' if i >= 0 else '-'}{q_str(abs(i))}i)"
            mono = "*".join(
                names[v] + (f"^{e}" if e > 1 else "") for v, e in enumerate(self.exponents(k)) if e
            )
            parts.append(coeff if not mono else f"{coeff}*{mono}")
        return " + ".join(parts)
