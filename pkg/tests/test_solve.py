import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodgelab.torus import (
    TorusGeometry,
    adjoint_differential,
    dbar_inverse,
    differential,
    harmonic_projection,
    isometric_input,
    l2_norm,
    project_kernel,
    quasi_isometry_report,
    random_form,
)
from hodgelab.torus.solve import symbol_matrix

G = TorusGeometry(n=2, K=5, oversample=2)
seeds = st.integers(0, 2**31)


def draw(seed, p, q, band=None):
    rng = np.random.Generator(np.random.PCG64(seed))
    return random_form(G, p, q, "scalar", rng, band=band)


class TestProjection:
    @settings(max_examples=15, deadline=None)
    @given(seed=seeds, q=st.integers(0, 1))
    def test_projection_lands_in_kernel(self, seed, q):
        g = project_kernel(draw(seed, 1, q), ["dbar", "del"])
        out = differential(differential(g, "del"), "dbar")
        assert l2_norm(out) <= 1e-10 * max(1.0, l2_norm(g))

    @settings(max_examples=10, deadline=None)
    @given(seed=seeds)
    def test_projection_idempotent(self, seed):
        g = project_kernel(draw(seed, 1, 1), ["dbar", "del"])
        again = project_kernel(g, ["dbar", "del"])
        assert l2_norm(again - g) <= 1e-12 * l2_norm(g)

    def test_symbol_matrix_shape_and_zero_mode(self):
        M = symbol_matrix(G, ["dbar"], 1, 0, "scalar", 2)
        assert M.shape == (5,) * 4 + (4, 2)
        assert np.abs(M[2, 2, 2, 2]).max() == 0
        assert np.abs(M[3, 2, 2, 2]).max() > 0

    def test_composition_is_matrix_product(self):
        a = symbol_matrix(G, ["dbar"], 2, 0, "scalar", 1)
        b = symbol_matrix(G, ["del"], 1, 0, "scalar", 1)
        ab = symbol_matrix(G, ["dbar", "del"], 1, 0, "scalar", 1)
        np.testing.assert_allclose(ab, a @ b)


class TestDbarInverse:
    @settings(max_examples=15, deadline=None)
    @given(seed=seeds, q=st.integers(0, 1))
    def test_solves_and_is_minimal(self, seed, q):
        g = project_kernel(draw(seed, 1, q), ["dbar", "del"])
        s, residual, diag = dbar_inverse(g)
        assert residual <= 1e-10 * max(1.0, diag.del_norm)
        assert diag.bound_holds
        assert diag.harmonic_norm <= 1e-12 and diag.codifferential_norm <= 1e-10 * max(1.0, l2_norm(s))

    def test_constant_input_gives_zero(self):
        from hodgelab.torus import constant

        g = constant(G, 1, 1, "scalar", {((0,), (1,), None): 1.0})
        s, residual, _ = dbar_inverse(g)
        assert s.max_abs() == 0 and residual == 0

    def test_degree_zero_input(self):
        g = draw(4, 1, 0)
        s, residual, diag = dbar_inverse(g)
        assert s.max_abs() == 0
        assert residual == pytest.approx(diag.del_norm)

    def test_unprojected_input_leaves_residual(self):
        g = draw(3, 1, 1)
        _, residual, diag = dbar_inverse(g)
        assert residual > 1e-6 * diag.del_norm


class TestQuasiIsometry:
    @settings(max_examples=15, deadline=None)
    @given(seed=seeds, q=st.integers(1, 2))
    def test_estimate_on_top_degree(self, seed, q):
        rep = quasi_isometry_report(draw(seed, 2, q))
        assert rep["estimate"]["slack"] >= -1e-10 * max(1.0, rep["estimate"]["rhs"])

    @settings(max_examples=15, deadline=None)
    @given(seed=seeds, p=st.integers(0, 2), q=st.integers(0, 2))
    def test_four_term_identity(self, seed, p, q):
        rep = quasi_isometry_report(draw(seed, p, q))
        assert rep["identity"]["residual"] <= 1e-8

    @settings(max_examples=10, deadline=None)
    @given(seed=seeds)
    def test_isometry_case(self, seed):
        g = isometric_input(draw(seed, 2, 1))
        rep = quasi_isometry_report(g)
        assert rep["isometry_case"]
        assert rep["ratio"] == pytest.approx(1.0, abs=1e-8)

    def test_isometric_input_hypotheses(self):
        g = isometric_input(draw(11, 2, 1))
        assert l2_norm(harmonic_projection(g)) == 0
        dd = differential(differential(g, "del"), "dbar")
        assert l2_norm(dd) <= 1e-10 * l2_norm(g) * G.K**2
        assert l2_norm(adjoint_differential(g, "del_star")) <= 1e-10 * l2_norm(g) * G.K
