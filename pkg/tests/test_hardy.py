import warnings

import numpy as np
import pytest

from interplab.hardy import (PeriodicFunction, boundary_values, fourier_extract, pf_eval, pf_h2_norm,
                             rebase)
from interplab.sequences import TruncSeq, random_seq
from interplab.solver import interp_norm


@pytest.fixture
def f(rng, c2_lp):
    return PeriodicFunction(0.4 + 0.2j, random_seq(rng, 3, 2), c2_lp)


def test_eval_is_exponential_sum(f):
    z = 0.7 - 1.1j
    k = np.arange(-3, 4)
    direct = (np.exp(k * (z - f.z0))[:, None] * f.coeffs.data).sum(axis=0)
    assert np.allclose(pf_eval(f, z), direct, rtol=1e-13)
    assert np.allclose(f(f.z0), f.coeffs.sum())


def test_periodic_in_imaginary_direction(f):
    assert np.allclose(f(0.3 + 0.5j), f(0.3 + 0.5j + 2j * np.pi), rtol=1e-12)


def test_rebase_preserves_values(f):
    g = rebase(f, 0.8 - 0.4j)
    for z in (0.1, 0.5 + 1j, 0.9 - 2j):
        assert np.allclose(g(z), f(z), rtol=1e-12)


def test_arithmetic(f, rng):
    g = PeriodicFunction(0.6, random_seq(rng, 3, 2), f.sc)
    z = 0.2 + 0.3j
    assert np.allclose((f + g)(z), f(z) + g(z))
    assert np.allclose((f - g)(z), f(z) - g(z))
    assert np.allclose((2j * f)(z), 2j * f(z))
    assert np.allclose((f / 4)(z), f(z) / 4)


def test_fourier_extract_recovers_coefficients(f):
    # f(z + it) has Fourier coefficient e^{k(z - z0)} x_k at frequency k
    z = 0.55
    for k in (-3, 0, 2):
        got = fourier_extract(f, z, k)
        assert np.allclose(got, np.exp(k * (z - f.z0)) * f.coeffs[k], atol=1e-12)


def test_fourier_extract_warns_on_aliasing(f):
    with pytest.warns(UserWarning):
        fourier_extract(f, 0.5, 0, M=8)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fourier_extract(f, 0.5, 0)


def test_boundary_values_shape(f):
    assert boundary_values(f, 0.5, 16).shape == (16, 2)


def test_h2_norm_of_optimal_function(c2_lp, rng):
    x = rng.standard_normal(2) + 0j
    val, dec, _ = interp_norm(c2_lp, x, 0.3)
    g = PeriodicFunction(0.3, dec.seq, c2_lp)
    assert pf_h2_norm(g) == pytest.approx(val, rel=1e-12)
    assert np.allclose(g(0.3), x, atol=1e-10)


def test_h2_norm_rebase_invariant(f):
    assert pf_h2_norm(rebase(f, 0.7)) == pytest.approx(pf_h2_norm(f), rel=1e-12)


def test_h2_norm_requires_couple():
    with pytest.raises(ValueError):
        pf_h2_norm(PeriodicFunction(0.5, TruncSeq.delta(1, 0, [1.0])))


def test_far_evaluation_does_not_overflow():
    f = PeriodicFunction(0.01, TruncSeq.delta(400, 400, [1e-300]))
    assert np.isfinite(f(0.99)).all()
