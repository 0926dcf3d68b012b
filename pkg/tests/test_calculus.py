from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodgelab._rational import to_fraction
from hodgelab.calculus import (
    TAGS,
    ContractViolation,
    DomainError,
    GradedForm,
    Poly,
    apply_operator,
    curvature_nakano,
    curvature_tensor,
    verify_identity,
)
from hodgelab.calculus import forms as F
from hodgelab.calculus.identities import InstanceRng, integrable_beltrami, is_integrable


def g2f(value):
    return to_fraction(value[0]), to_fraction(value[1])


class TestPoly:
    def test_wirtinger_derivatives(self):
        z = Poly.var(1, 0)
        zb = Poly.var(1, 0, bar=True)
        p = z * z * zb
        assert p.d(0) == (z * zb).scale(2)
        assert p.dbar(0) == z * z
        assert zb.d(0).is_zero()

    def test_conjugation(self):
        p = Poly.monomial(2, (1, 0), (0, 2), (1, 2))
        c = p.conj()
        assert c == Poly.monomial(2, (0, 2), (1, 0), (1, -2))

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_product_rule(self, seed):
        rng = InstanceRng(seed)
        a, b = rng.poly(2), rng.poly(2)
        assert (a * b).d(1) == a.d(1) * b + a * b.d(1)
        assert (a * b).dbar(0) == a.dbar(0) * b + a * b.dbar(0)

    def test_exact_evaluation(self):
        p = Poly.monomial(1, (1,), (1,), 1) + Poly.const(1, 1)
        assert g2f(p.evaluate([(Fraction(1, 2), Fraction(1, 3))])) == (Fraction(49, 36), 0)


class TestIdentities:
    @pytest.mark.parametrize("tag", TAGS)
    @pytest.mark.parametrize("n", [2, 3])
    def test_each_tag_exact(self, tag, n):
        for seed in range(5):
            verdict = verify_identity(tag, seed, n=n)
            assert verdict.passed, verdict.as_record()
            assert verdict.differing_monomials == 0

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_power_commutators_every_k(self, k):
        for seed in range(5):
            assert verify_identity("power-commutator", seed, n=3, k=k).passed
            assert verify_identity("power-commutator-bracket", seed, n=3, k=k).passed

    def test_unknown_tag(self):
        with pytest.raises(KeyError):
            verify_identity("no-such-identity", 0)

    def test_deterministic(self):
        a = verify_identity("tian-todorov", 17).as_record()
        b = verify_identity("tian-todorov", 17).as_record()
        assert a == b

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 10_000), n=st.integers(2, 3))
    def test_integrable_draws_are_integrable(self, seed, n):
        assert is_integrable(integrable_beltrami(InstanceRng(seed), n))


class TestApplyOperator:
    def setup_method(self):
        rng = InstanceRng(5)
        self.phi = rng.beltrami(2)
        self.alpha = rng.form(2, 1, 0)
        self.ops = {"phi": self.phi}

    def test_word_concatenation_is_composition(self):
        w1, w2 = ["dbar"], ["i:phi", "del"]
        whole = apply_operator(w1 + w2, self.alpha, self.ops)
        staged = apply_operator(w1, apply_operator(w2, self.alpha, self.ops), self.ops)
        assert (whole - staged).is_zero()

    def test_dbar_squared_vanishes(self):
        assert apply_operator(["dbar", "dbar"], self.alpha).is_zero()

    def test_missing_operand_reports_position(self):
        with pytest.raises(ContractViolation, match="word position 1"):
            apply_operator(["dbar", "i:psi"], self.alpha, self.ops)

    def test_unknown_token(self):
        with pytest.raises(ContractViolation, match="word position 0"):
            apply_operator(["sharp"], self.alpha)

    def test_full_lie_derivative_splits(self):
        full = apply_operator(["L:phi"], self.alpha, self.ops)
        parts = apply_operator(["L10:phi"], self.alpha, self.ops) + apply_operator(["L01:phi"], self.alpha, self.ops)
        assert (full - parts).is_zero()

    def test_graded_lift(self):
        g = GradedForm.lift(self.alpha)
        assert g.monomial_count() == self.alpha.monomial_count()


class TestForms:
    def test_bidegree_checked(self):
        with pytest.raises(ContractViolation):
            F.from_components(2, 1, 0, {((0, 1), ()): 1})

    def test_contraction_needs_tangent_values(self):
        a = F.from_components(2, 1, 0, {((0,), ()): 1})
        with pytest.raises(ContractViolation):
            F.contract(a, a)


class TestCurvature:
    def test_flat_metric(self):
        one, zero = Poly.const(2, 1), Poly.zero(2)
        R = curvature_tensor([[one, zero], [zero, one]], [0, 0])
        assert all(x == (0, 0) for a in R for b in a for c in b for x in c)

    def test_frozen_rank_one_values(self):
        # -1/(1 + |z|^2) from the sympy oracle
        h = [[Poly.const(1, 1) + Poly.monomial(1, (1,), (1,), 1)]]
        assert g2f(curvature_tensor(h, [1])[0][0][0][0]) == (Fraction(-1, 2), 0)
        pt = [(Fraction(1, 2), Fraction(1, 3))]
        assert g2f(curvature_tensor(h, pt)[0][0][0][0]) == (Fraction(-36, 49), 0)

    def test_frozen_diagonal_rank_two(self):
        n = 2
        h11 = Poly.const(n, 1) + Poly.monomial(n, (1, 0), (1, 0), 1)
        h22 = Poly.const(n, 1) + Poly.monomial(n, (0, 1), (0, 1), 2)
        h = [[h11, Poly.zero(n)], [Poly.zero(n), h22]]
        R = curvature_tensor(h, [1, Fraction(1, 2)])
        assert g2f(R[0][0][0][0]) == (Fraction(-1, 2), 0)
        assert g2f(R[1][1][1][1]) == (Fraction(-4, 3), 0)
        assert g2f(R[0][1][0][1]) == (0, 0)

    def test_nakano_sign(self):
        h = [[Poly.const(1, 1) - Poly.monomial(1, (1,), (1,), 1)]]
        res = curvature_nakano(h, [0], [[[1]]])
        assert res.nakano_positive and res.semi_nakano_positive
        h = [[Poly.const(1, 1) + Poly.monomial(1, (1,), (1,), 1)]]
        res = curvature_nakano(h, [0], [[[1]]])
        assert not res.semi_nakano_positive

    def test_indefinite_metric_rejected(self):
        with pytest.raises(DomainError):
            curvature_tensor([[Poly.const(1, -1)]], [0])
