import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodgelab.torus import (
    ContractViolation,
    FourierForm,
    TorusGeometry,
    adjoint_differential,
    bracket,
    c0_norm,
    c1_norm,
    character,
    constant,
    contract,
    differential,
    exp_contract,
    from_top,
    green,
    harmonic_projection,
    inner,
    l2_norm,
    laplacian,
    lie_derivative,
    omega_zero,
    random_form,
    to_top,
    wedge,
)
from hodgelab.torus.forms import component_keys
from hodgelab.torus.operators import relative_residual
from hodgelab.torus.products import fft_workers

G2 = TorusGeometry(n=2, K=6, oversample=2)
G3 = TorusGeometry(n=3, K=2, oversample=2)
KINDS = ("scalar", "tangent", "dual-tangent")


def draw(geometry, seed, p, q, kind="scalar", band=None, harmonic=True):
    rng = np.random.Generator(np.random.PCG64(seed))
    return random_form(geometry, p, q, kind, rng, band=band, harmonic=harmonic)


degrees = st.tuples(st.integers(0, 2), st.integers(0, 2))
seeds = st.integers(0, 2**31)


class TestGeometry:
    @pytest.mark.parametrize("bad", [{"n": 0, "K": 2}, {"n": 2, "K": 0}, {"n": 2, "K": 2, "oversample": 1},
                                     {"n": 2, "K": True}])
    def test_invalid(self, bad):
        with pytest.raises(ValueError):
            TorusGeometry(**bad)

    def test_eigenvalue_of_character(self):
        f = character(G2, (1, 2), (0, -1))
        lap = laplacian(f)
        assert np.isclose(inner(f, lap).real / l2_norm(f) ** 2, 2 * np.pi**2 * 6)

    def test_component_counts(self):
        assert len(component_keys(2, 1, 1, "scalar")) == 4
        assert len(component_keys(2, 0, 1, "tangent")) == 4
        assert len(component_keys(3, 3, 0, "scalar")) == 1


class TestForms:
    def test_mismatched_shapes_rejected(self):
        with pytest.raises(ContractViolation):
            FourierForm(G2, 1, 0, "scalar", np.zeros((1,) + G2.mode_shape, complex), 0)

    def test_add_requires_same_bidegree(self):
        with pytest.raises(ContractViolation):
            draw(G2, 0, 1, 0) + draw(G2, 0, 0, 1)

    def test_mode_outside_band(self):
        with pytest.raises(ContractViolation):
            FourierForm.from_entries(G2, 0, 0, "scalar", {((), (), None, (7, 0), (0, 0)): 1.0})

    def test_json_roundtrip(self):
        f = draw(G2, 1, 1, 1, band=2)
        back = FourierForm.from_json(f.to_json())
        assert l2_norm(back - f) == 0

    def test_coefficients_are_read_only(self):
        f = draw(G2, 1, 0, 0)
        with pytest.raises(ValueError):
            f.coeffs[0, 0, 0, 0, 0] = 1


class TestOperatorAxioms:
    @settings(max_examples=25, deadline=None)
    @given(seed=seeds, deg=degrees, kind=st.sampled_from(KINDS))
    def test_differentials_square_to_zero(self, seed, deg, kind):
        f = draw(G2, seed, *deg, kind=kind)
        for which in ("dbar", "del"):
            dd = differential(differential(f, which), which)
            assert l2_norm(dd) <= 1e-10 * max(1.0, l2_norm(f))

    @settings(max_examples=25, deadline=None)
    @given(seed=seeds, deg=degrees, kind=st.sampled_from(KINDS))
    def test_anticommutation(self, seed, deg, kind):
        f = draw(G2, seed, *deg, kind=kind)
        s = differential(differential(f, "del"), "dbar") + differential(differential(f, "dbar"), "del")
        assert l2_norm(s) <= 1e-10 * max(1.0, l2_norm(f))

    @settings(max_examples=25, deadline=None)
    @given(seed=seeds, deg=st.tuples(st.integers(0, 1), st.integers(0, 1)), kind=st.sampled_from(KINDS))
    def test_adjointness(self, seed, deg, kind):
        p, q = deg
        f = draw(G2, seed, p, q, kind=kind)
        g = draw(G2, seed + 1, p, q + 1, kind=kind)
        h = draw(G2, seed + 2, p + 1, q, kind=kind)
        lhs = inner(differential(f, "dbar"), g)
        rhs = inner(f, adjoint_differential(g, "dbar_star"))
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))
        lhs = inner(differential(f, "del"), h)
        rhs = inner(f, adjoint_differential(h, "del_star"))
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))

    @settings(max_examples=25, deadline=None)
    @given(seed=seeds, deg=degrees, kind=st.sampled_from(KINDS))
    def test_hodge_decomposition(self, seed, deg, kind):
        f = draw(G2, seed, *deg, kind=kind)
        rebuilt = harmonic_projection(f) + laplacian(green(f))
        assert relative_residual(rebuilt, f) <= 1e-12

    @settings(max_examples=15, deadline=None)
    @given(seed=seeds, deg=degrees)
    def test_laplacian_matches_box(self, seed, deg):
        f = draw(G2, seed, *deg)
        terms = []
        if f.q > 0:
            terms.append(differential(adjoint_differential(f, "dbar_star"), "dbar"))
        if f.q < f.n:
            terms.append(adjoint_differential(differential(f, "dbar"), "dbar_star"))
        box = terms[0] if len(terms) == 1 else terms[0] + terms[1]
        assert relative_residual(box, laplacian(f)) <= 1e-12

    def test_green_kills_constants(self):
        c = constant(G2, 1, 1, "scalar", {((0,), (1,), None): 2.0})
        assert l2_norm(green(c)) == 0
        assert l2_norm(harmonic_projection(c) - c) == 0

    def test_overflow_is_zero_with_warning(self):
        top = omega_zero(G2)
        out = differential(top, "del")
        assert out.max_abs() == 0 and out.receipt.warnings


class TestNorms:
    def test_character_c1_norm_frozen(self):
        # 1 + 2 pi + 2 pi from the sympy oracle
        f = character(G2, (1, 0), (0, 1), ((), (0,), 0), 0, 1, "tangent")
        assert c1_norm(f) == pytest.approx(13.566370614359172, rel=1e-12)

    def test_frame_weight_in_sup(self):
        # one dz^1 component has pointwise norm sqrt(2)
        f = constant(G2, 1, 0, "scalar", {((0,), (), None): 1.0})
        assert c0_norm(f) == pytest.approx(np.sqrt(2))

    @settings(max_examples=10, deadline=None)
    @given(seed=seeds)
    def test_c0_bounds_l2(self, seed):
        f = draw(G2, seed, 0, 1, "tangent", band=2)
        assert l2_norm(f) <= c0_norm(f) * (1 + 1e-12)


class TestProducts:
    @settings(max_examples=15, deadline=None)
    @given(seed=seeds)
    def test_wedge_graded_commutative(self, seed):
        a = draw(G2, seed, 1, 0, band=2)
        b = draw(G2, seed + 1, 0, 1, band=2)
        ab, _ = wedge(a, b)
        ba, _ = wedge(b, a)
        assert relative_residual(ab, ba.scale(-1)) <= 1e-12

    @settings(max_examples=15, deadline=None)
    @given(seed=seeds)
    def test_leibniz(self, seed):
        a = draw(G2, seed, 1, 0, band=2)
        b = draw(G2, seed + 1, 0, 1, band=2)
        ab, rec = wedge(a, b)
        assert rec.discarded_mass == 0
        lhs = differential(ab, "dbar")
        t1, _ = wedge(differential(a, "dbar"), b)
        t2, _ = wedge(a, differential(b, "dbar"))
        assert relative_residual(lhs, t1 - t2) <= 1e-11

    def test_truncation_is_recorded(self):
        a = draw(G2, 3, 0, 0, band=6)
        b = draw(G2, 4, 0, 0, band=6)
        prod, rec = wedge(a, b)
        assert rec.discarded_mass > 0
        assert prod.band == G2.K

    @settings(max_examples=15, deadline=None)
    @given(seed=seeds)
    def test_beltrami_contractions_commute(self, seed):
        phi = draw(G2, seed, 0, 1, "tangent", band=1)
        psi = draw(G2, seed + 1, 0, 1, "tangent", band=1)
        om = omega_zero(G2)
        a, _ = contract(phi, contract(psi, om)[0])
        b, _ = contract(psi, contract(phi, om)[0])
        assert relative_residual(a, b) <= 1e-12

    @settings(max_examples=15, deadline=None)
    @given(seed=seeds)
    def test_bracket_symmetric_for_beltrami(self, seed):
        phi = draw(G2, seed, 0, 1, "tangent", band=2)
        psi = draw(G2, seed + 1, 0, 1, "tangent", band=2)
        a, _ = bracket(phi, psi)
        b, _ = bracket(psi, phi)
        assert relative_residual(a, b) <= 1e-12

    @settings(max_examples=10, deadline=None)
    @given(seed=seeds)
    def test_jacobi_for_odd_field(self, seed):
        phi = draw(G2, seed, 0, 1, "tangent", band=1)
        inner_b, _ = bracket(phi, phi)
        outer, _ = bracket(phi, inner_b)
        assert l2_norm(outer) <= 1e-10 * max(1.0, l2_norm(inner_b) * l2_norm(phi))

    def test_constant_fields_commute(self):
        phi = constant(G2, 0, 1, "tangent", {((), (0,), 1): 1.0, ((), (1,), 0): 2.0})
        b, _ = bracket(phi, phi)
        assert b.max_abs() == 0

    @settings(max_examples=10, deadline=None)
    @given(seed=seeds)
    def test_top_duality_roundtrip(self, seed):
        phi = draw(G3, seed, 0, 1, "tangent")
        assert relative_residual(from_top(to_top(phi)), phi) <= 1e-13

    def test_from_top_rejects_wrong_degree(self):
        with pytest.raises(ContractViolation):
            from_top(draw(G2, 0, 2, 0))

    def test_exp_contract_scaling(self):
        phi = draw(G2, 5, 0, 1, "tangent", band=1)
        pieces, _ = exp_contract(phi, omega_zero(G2))
        twice, _ = contract(phi, contract(phi, omega_zero(G2))[0])
        assert set(pieces) == {(2, 0), (1, 1), (0, 2)}
        assert relative_residual(pieces[(0, 2)], twice.scale(0.5)) <= 1e-13

    def test_lie_parts(self):
        phi = draw(G2, 6, 0, 1, "tangent", band=1)
        alpha = draw(G2, 7, 1, 0, band=1)
        holo, anti = lie_derivative(phi, alpha, "full")
        assert holo.bidegree == (1, 1) and anti.bidegree == (0, 2)
        assert relative_residual(lie_derivative(phi, alpha, "holo"), holo) == 0
        with pytest.raises(ValueError):
            lie_derivative(phi, alpha, "sideways")

    def test_contraction_commutator_on_torus(self):
        """The holomorphic part of -i_phi L_psi + L_psi i_phi equals i_[phi,psi]; the rest vanishes."""
        phi = draw(G2, 8, 0, 1, "tangent", band=1)
        psi = draw(G2, 9, 0, 1, "tangent", band=1)
        alpha = draw(G2, 10, 2, 0, band=1)
        i_phi = lambda x: contract(phi, x)[0]  # noqa: E731
        lhs = lie_derivative(psi, i_phi(alpha), "holo") - i_phi(lie_derivative(psi, alpha, "holo"))
        br, _ = bracket(phi, psi)
        rhs, _ = contract(br, alpha)
        assert relative_residual(lhs, rhs) <= 1e-12

    def test_divergence_free_bracket_stays_divergence_free(self):
        from hodgelab.kuranishi import make_seed

        seed = make_seed("divergence-free-synthetic", G2, rng_seed=3, m=2, band=1)
        br, _ = bracket(*seed.fields)
        top = to_top(br)
        assert l2_norm(differential(top, "del")) <= 1e-10 * l2_norm(top)

    def test_fft_workers_from_env(self, monkeypatch):
        monkeypatch.setenv("HODGELAB_THREADS", "3")
        assert fft_workers() == 3
        monkeypatch.setenv("HODGELAB_THREADS", "nonsense")
        assert fft_workers() >= 1
