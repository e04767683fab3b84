import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from interplab.banach import cap2_norm, lp_space
from interplab.optim import SolverOptions
from interplab.sequences import TruncSeq, structured_couple
from interplab.solver import (check_strip, dual_certificate, endpoint_operator_norm, interp_norm,
                              interp_norm_grid, objective, operator_interp_ratio,
                              scalar_quadratic_decomposition, scalar_quadratic_norm, shift_constant)

from conftest import cvec


def _scalar(K, kind="lp"):
    return structured_couple(lp_space(1), lp_space(1), kind, K=K)


def test_strip_check():
    assert check_strip(0.5 + 2j) == 0.5 + 2j
    for bad in (0.0, 1.0, -0.2, 1.5j):
        with pytest.raises(ValueError):
            check_strip(bad)


def test_scalar_closed_form_by_lagrange():
    # independent oracle: minimize sum_k a_k |t_k|^2 subject to sum t_k = 1
    theta, K = 0.3, 5
    k = np.arange(-K, K + 1)
    a = np.exp(-2 * k * theta) + np.exp(2 * k * (1 - theta))
    A = np.zeros((2 * K + 2, 2 * K + 2))
    A[:-1, :-1] = 2 * np.diag(a)
    A[:-1, -1] = A[-1, :-1] = 1
    rhs = np.zeros(2 * K + 2)
    rhs[-1] = 1
    t = np.linalg.solve(A, rhs)[:-1]
    assert scalar_quadratic_norm(theta, K) == pytest.approx(np.sqrt(t @ (a * t)), rel=1e-13)
    assert np.allclose(scalar_quadratic_decomposition(theta, K), t)


@pytest.mark.parametrize("theta", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("K", [10, 20, 40])
@pytest.mark.parametrize("kind", ["lp", "fourier"])
def test_scalar_quadratic_oracle(theta, K, kind):
    val, dec, rep = interp_norm(_scalar(K, kind), [1.0], theta)
    assert rep.converged
    assert val == pytest.approx(scalar_quadratic_norm(theta, K), rel=1e-6)
    assert np.allclose(dec.seq.data[:, 0].real, scalar_quadratic_decomposition(theta, K), atol=1e-6)


def test_value_equals_objective_at_decomposition(c2_lp, rng):
    x = cvec(rng, 2)
    val, dec, _ = interp_norm(c2_lp, x, 0.4)
    assert objective(c2_lp, dec.seq, 0.4) == pytest.approx(val, rel=1e-12)
    assert np.allclose(dec.seq.sum(), x, atol=1e-10)


def test_bounded_by_intersection_norm(c2_lp, rng):
    # the single-index decomposition v_0 = x is feasible
    x = cvec(rng, 2)
    for z in (0.2, 0.5, 0.8):
        val = interp_norm(c2_lp, x, z)[0]
        assert 0 < val <= cap2_norm(c2_lp.couple, x) * (1 + 1e-10)


def test_monotone_in_K(c4_fourier, rng):
    x = cvec(rng, 4)
    vals = [interp_norm(c4_fourier.with_K(K), x, 0.3)[0] for K in (2, 4, 8, 12)]
    assert all(b <= a + 1e-10 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("kind", ["lp", "fourier"])
def test_vertical_invariance(kind, rng):
    sc = structured_couple(lp_space(3, 2.0, [1, 2, 0.5]), lp_space(3, 4.0), kind, K=10)
    x = cvec(rng, 3)
    a = interp_norm(sc, x, 0.35)[0]
    b = interp_norm(sc, x, 0.35 + 0.3j)[0]
    assert b == pytest.approx(a, rel=1e-6)


@settings(max_examples=15, deadline=None)
@given(st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False, allow_infinity=False),
       st.integers(0, 10_000))
def test_homogeneity(c, seed):
    sc = structured_couple(lp_space(2, 2.0, [1, 2]), lp_space(2, 3.0), "lp", K=8)
    x = cvec(np.random.default_rng(seed), 2)
    assert interp_norm(sc, c * x, 0.4)[0] == pytest.approx(abs(c) * interp_norm(sc, x, 0.4)[0], rel=1e-7)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_triangle_inequality(seed):
    sc = structured_couple(lp_space(2, 2.0, [1, 2]), lp_space(2, 3.0), "lp", K=8)
    r = np.random.default_rng(seed)
    x, y = cvec(r, 2), cvec(r, 2)
    n = lambda v: interp_norm(sc, v, 0.6)[0]
    assert n(x + y) <= n(x) + n(y) + 1e-8


def test_dual_certificate_norms_x(c2_lp, rng):
    x = cvec(rng, 2)
    val, dec, _ = interp_norm(c2_lp, x, 0.4)
    phi = dual_certificate(c2_lp, dec, 0.4)
    assert np.real(np.dot(phi, x)) == pytest.approx(val, rel=1e-7)
    for _ in range(5):
        y = cvec(rng, 2)
        assert abs(np.dot(phi, y)) <= interp_norm(c2_lp, y, 0.4)[0] * (1 + 1e-6)


def test_warm_started_grid_matches_cold(c2_lp, rng):
    x = cvec(rng, 2)
    rows = interp_norm_grid(c2_lp, x, [0.2, 0.4, 0.6 + 0.5j])
    for r in rows:
        cold = interp_norm(c2_lp, x, complex(r["re_z"], r["im_z"]))[0]
        assert r["value"] == pytest.approx(cold, rel=1e-7)


def test_nonsmooth_endpoint_converges():
    sc = structured_couple(lp_space(2, 1.0), lp_space(2, np.inf), "lp", K=6)
    val, dec, rep = interp_norm(sc, np.array([1.0, 0.5j]), 0.5, SolverOptions(max_iter=20000))
    assert np.isfinite(val) and val <= cap2_norm(sc.couple, [1.0, 0.5j]) * (1 + 1e-9)


def test_operator_constants():
    assert shift_constant(0.5) == pytest.approx(np.exp(0.25))
    assert shift_constant(0.1) == shift_constant(0.9) <= np.e
    sp = lp_space(2, 2.0, [1, 3])
    T = np.array([[0, 1], [1, 0]], dtype=complex)
    # ||W T W^{-1}||_2 with W = diag(1, 3)
    assert endpoint_operator_norm(sp, T) == pytest.approx(3.0)
    assert endpoint_operator_norm(lp_space(2, 4.0), np.diag([2, -3j])) == pytest.approx(3.0)


def test_operator_interpolation_bound(c4_fourier, rng):
    for _ in range(3):
        d = cvec(rng, 4) * np.exp(rng.uniform(-1, 1, 4))
        assert operator_interp_ratio(c4_fourier, np.diag(d), cvec(rng, 4), 0.4) <= np.e


def test_zero_vector():
    val, dec, rep = interp_norm(_scalar(4), [0.0], 0.5)
    assert val == 0.0 and rep.converged
