import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from interplab.banach import (Couple, cap2_norm, conjugate_exponent, custom_space, dual_norm_ascent,
                              dual_norm_eval, lp_space, norm_eval, phase, sum2_norm)

from conftest import cvec

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
vec3 = st.tuples(arrays(float, 3, elements=finite), arrays(float, 3, elements=finite)).map(
    lambda t: t[0] + 1j * t[1])
exponents = st.sampled_from([1.0, 1.5, 2.0, 3.0, 4.0, np.inf])


def test_lp_norm_matches_numpy(rng):
    w = np.array([1.0, 2.0, 0.5])
    x = cvec(rng, 3)
    for p in (1.0, 1.5, 2.0, 4.0, np.inf):
        assert norm_eval(lp_space(3, p, w), x) == pytest.approx(np.linalg.norm(w * x, p), rel=1e-13)


def test_conjugate_exponent():
    assert conjugate_exponent(2) == 2
    assert conjugate_exponent(1) == np.inf
    assert conjugate_exponent(np.inf) == 1
    assert conjugate_exponent(4) == pytest.approx(4 / 3)


def test_phase_of_zero_is_zero():
    assert np.array_equal(phase(np.array([0, 2j, -3])), np.array([0, 1j, -1]))


@settings(max_examples=60, deadline=None)
@given(vec3, vec3, exponents)
def test_holder(x, f, p):
    sp = lp_space(3, p, [1.0, 3.0, 0.5])
    assert abs(np.dot(f, x)) <= sp.norm(x) * sp.dual().norm(f) * (1 + 1e-12) + 1e-12


@settings(max_examples=60, deadline=None)
@given(vec3, vec3, exponents, st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_norm_axioms(x, y, p, c):
    sp = lp_space(3, p)
    assert sp.norm(x + y) <= sp.norm(x) + sp.norm(y) + 1e-9
    assert sp.norm(c * x) == pytest.approx(abs(c) * sp.norm(x), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
def test_gradient_matches_finite_differences(rng, p):
    sp = lp_space(4, p, [1, 2, 0.5, 1.5])
    x, h = cvec(rng, 4), cvec(rng, 4)
    eps = 1e-6
    fd = (sp.norm(x + eps * h) - sp.norm(x - eps * h)) / (2 * eps)
    # real-gradient convention: d/dt ||x + t h|| = Re <conj(grad), h>
    assert fd == pytest.approx(np.real(np.vdot(sp.grad(x), h)), rel=1e-7)


@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_dual_closed_form_agrees_with_ascent(rng, p):
    sp = lp_space(3, p, [1.0, 2.0, 0.5])
    f = cvec(rng, 3)
    closed = dual_norm_eval(sp, f, "closed")
    ascent, rep = dual_norm_ascent(sp, f)
    assert ascent == pytest.approx(closed, rel=1e-8)
    assert ascent <= closed * (1 + 1e-12)


def test_custom_space_dual_by_ascent(rng):
    A = np.array([[2.0, 0.3], [0.1, 1.0]])
    sp = custom_space(2, lambda x: np.linalg.norm(np.asarray(x) @ A.T, axis=-1))
    f = cvec(rng, 2)
    # dual of ||A x||_2 is ||A^{-T} f||_2
    assert dual_norm_eval(sp, f) == pytest.approx(np.linalg.norm(np.linalg.solve(A.T, f)), rel=1e-6)


def test_couple_dimension_mismatch():
    with pytest.raises(ValueError):
        Couple(lp_space(2), lp_space(3))


def test_sum2_scalar_closed_form():
    # inf_u |u|^2 + |x - u|^2 = |x|^2 / 2
    c = Couple(lp_space(1), lp_space(1))
    val, u, rep = sum2_norm(c, np.array([3 + 4j]))
    assert val == pytest.approx(5 / np.sqrt(2), rel=1e-8)
    assert cap2_norm(c, [3 + 4j]) == pytest.approx(5 * np.sqrt(2))


@settings(max_examples=25, deadline=None)
@given(vec3)
def test_sum2_below_cap2(x):
    c = Couple(lp_space(3, 2.0, [1, 2, 3]), lp_space(3, 4.0))
    assert sum2_norm(c, x)[0] <= cap2_norm(c, x) * (1 + 1e-9) + 1e-12
