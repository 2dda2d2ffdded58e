import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from landau_response.errors import InvalidParameterError, QuadratureError
from landau_response.quadrature import (GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, QuadratureSpec,
                                        gauss_kronrod, gauss_legendre_panels)


def test_rule_weights_sum_to_interval_length():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert np.all(np.diff(NODES) > 0)


def test_kronrod_exact_for_degree_31_polynomial():
    # 21-point Kronrod rule integrates polynomials up to degree 31 exactly
    val = np.sum(KRONROD_WEIGHTS * NODES ** 30)
    assert val == pytest.approx(2.0 / 31.0, rel=1e-13)


def test_gaussian_integral():
    val, err = gauss_kronrod(lambda x: np.exp(-x * x), -10, 10)
    assert val == pytest.approx(math.sqrt(math.pi), abs=1e-13)
    assert err <= 1e-11 * math.sqrt(math.pi)


def test_vector_valued_integrand():
    a = np.array([0.5, 1.0, 3.0])
    val, _ = gauss_kronrod(lambda x: np.exp(-a[None, :] * x[:, None] ** 2), -12, 12)
    np.testing.assert_allclose(val, np.sqrt(np.pi / a), rtol=1e-12)


def test_reversed_limits_and_empty_interval():
    val, _ = gauss_kronrod(np.cos, 1.0, 0.0)
    assert val == pytest.approx(-math.sin(1.0), abs=1e-14)
    val, err = gauss_kronrod(np.cos, 2.0, 2.0)
    assert val == 0 and err == 0


def test_breakpoints_resolve_narrow_peak():
    w = 1e-6
    val, _ = gauss_kronrod(lambda x: w / (x * x + w * w), -1, 1, breakpoints=[0.0],
                           rel_tol=1e-12)
    assert val == pytest.approx(2 * math.atan(1 / w), rel=1e-10)


def test_budget_exhaustion_raises_with_estimate():
    with pytest.raises(QuadratureError) as exc:
        gauss_kronrod(lambda x: np.sign(np.sin(50 * x)), 0, 10, abs_tol=1e-15, rel_tol=1e-15,
                      max_subdivisions=20)
    assert exc.value.estimate > 0
    assert exc.value.value is not None


def test_spec_validation():
    QuadratureSpec()
    with pytest.raises(InvalidParameterError):
        QuadratureSpec(abs_tol=1e-13, tail_cut=1e-12)
    with pytest.raises(InvalidParameterError):
        QuadratureSpec(rel_tol=0)
    with pytest.raises(InvalidParameterError):
        QuadratureSpec(max_subdivisions=0)


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(0.1, 4))
def test_legendre_panels_match_closed_form(a, length):
    b = a + length
    x, w = gauss_legendre_panels(np.linspace(a, b, 5), 8)
    assert np.sum(w * np.sin(x)) == pytest.approx(math.cos(a) - math.cos(b), abs=1e-13)
