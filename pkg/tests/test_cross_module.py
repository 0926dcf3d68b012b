"""The exact polynomial calculus and the Fourier torus agree pointwise.

A torus form is translated into its Wirtinger-Taylor polynomial at a point
x0 (in the shifted variable w = z - z0) to the order the operator word
differentiates.  Both modules apply the same word; the value of the
polynomial result at w = 0 must equal the torus result evaluated at x0.
"""

from fractions import Fraction
from itertools import product
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodgelab.calculus import Poly, PolyForm, apply_operator
from hodgelab.torus import TorusGeometry, bracket, contract, differential, random_form, wedge
from hodgelab.torus.operators import evaluate

G = TorusGeometry(n=2, K=4, oversample=2)


def _to_poly(n, coefficients):
    out = Poly.zero(n)
    for (alpha, beta), value in coefficients.items():
        c = (Fraction(float(value.real)), Fraction(float(value.imag)))
        out = out + Poly.monomial(n, alpha, beta, c)
    return out


def taylor(f, x0, degree):
    """PolyForm whose coefficients are the degree-``degree`` Taylor polynomials of ``f`` at x0."""
    g = f.geometry
    n, b = g.n, f.band
    freqs = np.stack(np.meshgrid(*([np.arange(-b, b + 1)] * g.axes), indexing="ij"), axis=-1).reshape(-1, g.axes)
    a, bb = freqs[:, :n], freqs[:, n:]
    hol = np.pi * 1j * (a - 1j * bb)
    anti = np.pi * 1j * (a + 1j * bb)
    phase = np.exp(2j * np.pi * freqs @ np.asarray(x0))
    coeffs = f.band_view().reshape(f.coeffs.shape[0], -1) * phase
    exps = [e for e in product(range(degree + 1), repeat=2 * n) if sum(e) <= degree]
    terms = {}
    for c, key in enumerate(f.keys):
        poly_coeffs = {}
        for e in exps:
            al, be = e[:n], e[n:]
            weight = np.prod(hol ** np.array(al), axis=1) * np.prod(anti ** np.array(be), axis=1)
            denom = np.prod([factorial(k) for k in e])
            poly_coeffs[(al, be)] = complex(coeffs[c] @ weight) / denom
        terms[key] = _to_poly(n, poly_coeffs)
    terms = {k: v for k, v in terms.items() if not v.is_zero()}
    return PolyForm(n, f.p, f.q, f.kind, n if f.kind == "tangent" else 1, terms)


def poly_value_at_origin(form, key):
    pieces = form.forms() if hasattr(form, "forms") else [form]
    total = 0j
    for piece in pieces:
        if key in piece.terms:
            total += piece.terms[key].evaluate_complex([0] * piece.n)
    return total


def compare(torus_result, poly_result, x0):
    vals = evaluate(torus_result, np.asarray([x0]))[:, 0]
    scale = max(1.0, np.abs(vals).max())
    for c, key in enumerate(torus_result.keys):
        got = poly_value_at_origin(poly_result, key)
        assert abs(got - vals[c]) <= 1e-10 * scale, (key, got, vals[c])


def draw(seed, p, q, kind="scalar", band=1):
    rng = np.random.Generator(np.random.PCG64(seed))
    return random_form(G, p, q, kind, rng, band=band)


points = st.lists(st.floats(0, 1, allow_nan=False), min_size=4, max_size=4)
seeds = st.integers(0, 2**31)


class TestTranslation:
    def test_value_matches(self):
        f = draw(1, 1, 1)
        x0 = [0.1, 0.7, 0.3, 0.25]
        compare(f, taylor(f, x0, 0), x0)


class TestCrossModule:
    @settings(max_examples=10, deadline=None)
    @given(seed=seeds, x0=points)
    def test_first_order_differentials(self, seed, x0):
        f = draw(seed, 1, 0)
        P = taylor(f, x0, 1)
        compare(differential(f, "dbar"), apply_operator(["dbar"], P), x0)
        compare(differential(f, "del"), apply_operator(["del"], P), x0)

    @settings(max_examples=10, deadline=None)
    @given(seed=seeds, x0=points)
    def test_second_order_word(self, seed, x0):
        f = draw(seed, 0, 1)
        P = taylor(f, x0, 2)
        compare(differential(differential(f, "dbar"), "del"), apply_operator(["del", "dbar"], P), x0)

    @settings(max_examples=10, deadline=None)
    @given(seed=seeds, x0=points)
    def test_contraction_then_del(self, seed, x0):
        phi = draw(seed, 0, 1, "tangent")
        alpha = draw(seed + 1, 2, 0)
        t_phi, t_alpha = taylor(phi, x0, 1), taylor(alpha, x0, 1)
        inner, _ = contract(phi, alpha)
        compare(differential(inner, "del"), apply_operator(["del", "i:phi"], t_alpha, {"phi": t_phi}), x0)

    @settings(max_examples=10, deadline=None)
    @given(seed=seeds, x0=points)
    def test_wedge(self, seed, x0):
        a, b = draw(seed, 1, 0), draw(seed + 1, 0, 1)
        out, _ = wedge(a, b)
        compare(out, apply_operator(["wedge:a"], taylor(b, x0, 0), {"a": taylor(a, x0, 0)}), x0)

    @settings(max_examples=10, deadline=None)
    @given(seed=seeds, x0=points)
    def test_bracket(self, seed, x0):
        phi, psi = draw(seed, 0, 1, "tangent"), draw(seed + 1, 0, 1, "tangent")
        out, _ = bracket(phi, psi)
        poly = apply_operator(["bracket:phi"], taylor(psi, x0, 1), {"phi": taylor(phi, x0, 1)})
        compare(out, poly, x0)

    @pytest.mark.parametrize("part,which", [("L10", "del"), ("L01", "dbar")])
    def test_lie_derivative_parts(self, part, which):
        from hodgelab.torus import lie_derivative

        x0 = [0.2, 0.9, 0.4, 0.6]
        phi, alpha = draw(3, 0, 1, "tangent"), draw(4, 1, 0)
        torus_part = lie_derivative(phi, alpha, "holo" if which == "del" else "antiholo")
        poly = apply_operator([f"{part}:phi"], taylor(alpha, x0, 1), {"phi": taylor(phi, x0, 1)})
        compare(torus_part, poly, x0)
