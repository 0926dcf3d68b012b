from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodgelab._rational import to_fraction, to_q
from hodgelab.majorant import (
    boundary_decay,
    catalan,
    closed_form_coefficient,
    convergence_radius,
    formal_square_residual,
    generating_function,
    majorant_coefficients,
    majorant_radius_eval,
    recursion_coefficients,
)

# sympy series expansion of (1 - sqrt(1 - 4 c x1 tau)) / (2c), tests/oracles/derive.py
ORACLE_C, ORACLE_X1 = Fraction(3, 7), Fraction(-2, 5)
ORACLE_COEFFS = [
    Fraction(-2, 5), Fraction(12, 175), Fraction(-144, 6125), Fraction(432, 42875),
    Fraction(-5184, 1071875), Fraction(93312, 37515625), Fraction(-12317184, 9191328125),
    Fraction(240185088, 321696484375),
]

rationals = st.fractions(min_value=Fraction(-5), max_value=Fraction(5), max_denominator=50)
positive = st.fractions(min_value=Fraction(1, 50), max_value=Fraction(5), max_denominator=50)


def frac(x):
    return to_fraction(x)


class TestCoefficients:
    def test_catalan_numbers(self):
        series = majorant_coefficients(1, 1, 12)
        assert [frac(series[k]) for k in range(1, 13)] == [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786]

    def test_catalan_helper_matches_recursion_to_fifty(self):
        series = majorant_coefficients(1, 1, 50)
        assert all(frac(series[k]) == catalan(k - 1) for k in range(1, 51))

    def test_frozen_oracle_values(self):
        series = majorant_coefficients(to_q(ORACLE_C), to_q(ORACLE_X1), 8)
        assert [frac(series[k]) for k in range(1, 9)] == ORACLE_COEFFS

    def test_index_out_of_range(self):
        series = majorant_coefficients(1, 1, 3)
        with pytest.raises(IndexError):
            series[4]
        with pytest.raises(IndexError):
            series[0]

    @settings(max_examples=40, deadline=None)
    @given(c=positive, x1=rationals, N=st.integers(1, 25))
    def test_recursion_equals_closed_form(self, c, x1, N):
        rec = recursion_coefficients(to_q(c), to_q(x1), N)
        assert all(rec[k - 1] == closed_form_coefficient(to_q(c), to_q(x1), k) for k in range(1, N + 1))

    @settings(max_examples=30, deadline=None)
    @given(c=positive, x1=rationals)
    def test_formal_square_identity(self, c, x1):
        series = majorant_coefficients(to_q(c), to_q(x1), 20)
        assert all(v == 0 for v in formal_square_residual(series))


class TestRadius:
    def test_unit_parameters(self):
        assert frac(convergence_radius(1, 1)) == Fraction(1, 4)

    @settings(max_examples=30, deadline=None)
    @given(c=positive)
    def test_calibrated_scaling_gives_unit_radius(self, c):
        assert frac(convergence_radius(to_q(c), 1 / (4 * to_q(c)))) == 1

    def test_zero_initial_value_has_infinite_radius(self):
        assert convergence_radius(1, 0) is None
        assert majorant_coefficients(1, 0, 5).radius is None

    def test_negative_initial_value_uses_absolute_product(self):
        assert frac(convergence_radius(2, Fraction(-1, 3))) == Fraction(3, 8)

    def test_generating_function_at_zero(self):
        assert generating_function(1, 1, 0.0) == 0.0

    def test_inside_disc_converges(self):
        ev = majorant_radius_eval(1, 1, Fraction(1, 8), N=200)
        assert ev.converged and ev.difference <= 1e-8

    def test_on_boundary_monotone_and_bounded(self):
        ev = majorant_radius_eval(1, 1, Fraction(1, 4), N=200)
        assert ev.converged
        assert all(b >= a for a, b in zip(ev.partial_sums, ev.partial_sums[1:]))
        assert ev.partial_sums[-1] <= 0.5

    def test_outside_disc_flagged(self):
        assert majorant_radius_eval(1, 1, Fraction(1, 2), N=50).converged is False

    def test_nonpositive_c_rejected(self):
        with pytest.raises(ValueError):
            majorant_radius_eval(0, 1, 0)

    def test_boundary_decay_to_ten_thousand(self):
        out = boundary_decay(1, 1, N=10_000)
        assert out["decreasing"] and out["bounded"]
        assert out["partial_sum"] <= out["bound"]


class TestCsv:
    def test_rows_and_header(self):
        text = majorant_coefficients(1, 1, 4).to_csv(Fraction(1, 4))
        lines = text.strip().splitlines()
        assert lines[0] == "n,x_n,x_n_tau_n,partial_sum"
        assert lines[1].startswith("1,1,1/4,")
        assert len(lines) == 5
