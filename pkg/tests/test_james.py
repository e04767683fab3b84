import numpy as np
import pytest

from interplab.banach import lp_space
from interplab.james import (build_james_vectors, dp_vs_enumeration, geometric_mean_bound,
                             james_flat_space, james_norm_checks, lower_bound, measure_c_method,
                             modulation_blowup, pairing, s_grid_near_pi, upper_bound)
from interplab.sequences import james_batch


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_norm_facts(n):
    jv = build_james_vectors(n, [1.0, 0.0], [1.0, 0.0], 0.0)
    out = james_norm_checks(jv, samples=200, seed=n)
    assert out["james_norm_ok"] and out["l2_ok"] and out["dual_violations"] == 0
    assert out["dual_max"] <= out["dual_bound"]


def test_pairing_of_alternating_functional():
    jv = build_james_vectors(3, [1.0], [1.0], np.pi)
    # (-1)^j e^{i j pi} = 1 for every j
    assert pairing(jv.zn, jv.xn_s) == pytest.approx(6.0)
    assert pairing(jv.zn, jv.xn) == pytest.approx(0.0)


def test_build_validates_normalization():
    with pytest.raises(ValueError):
        build_james_vectors(2, [2.0], [0.5])
    with pytest.raises(ValueError):
        build_james_vectors(0, [1.0], [1.0])


def test_lower_bound_closed_form():
    n = 4
    for s in (0.3, 1.7, 3.0):
        q = -np.exp(1j * s)
        closed = abs(q * (1 - q ** (2 * n)) / (1 - q)) / np.sqrt(2 * n)
        assert lower_bound(n, s) == pytest.approx(closed, rel=1e-12)
    assert lower_bound(n, np.pi) == pytest.approx(np.sqrt(2 * n))


def test_bounds_and_grid():
    assert upper_bound(16) == pytest.approx(2 * np.sqrt(2))
    assert upper_bound(8, literal=True) == pytest.approx(2.0)
    g = s_grid_near_pi(3, 5)
    assert np.all(np.diff(g) > 0) and g[-1] < np.pi


def test_blowup_monotone_toward_pi():
    rows = modulation_blowup([1, 3, 6])
    for n in (1, 3, 6):
        L = [r["L"] for r in rows if r["n"] == n]
        assert np.all(np.diff(L) > 0)


def test_dp_equals_enumeration_support_ten(rng):
    base = lp_space(2)
    arr = rng.standard_normal((10, 2)) + 1j * rng.standard_normal((10, 2))
    dp, en = dp_vs_enumeration(base, arr)
    assert dp == en


def test_james_gradient_matches_finite_differences(rng):
    sp = james_flat_space(4)
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    h = rng.standard_normal(4) + 0j
    eps = 1e-7
    fd = (sp.norm(v + eps * h) - sp.norm(v - eps * h)) / (2 * eps)
    assert fd == pytest.approx(np.real(np.vdot(sp.grad(v), h)), rel=1e-5)


def test_geometric_mean_of_constant_block():
    v = np.ones(4)
    jn = float(james_batch(lp_space(1), v[:, None][None], with_grad=False)[0][0])
    assert geometric_mean_bound(v) == pytest.approx(np.sqrt(jn * 2.0))


@pytest.mark.slow
def test_second_level_within_method_constant():
    blocks = [np.exp(1j * np.pi * np.arange(1, 3)), np.ones(4)]
    out = measure_c_method(blocks, K=4)
    assert 1 <= out["c_method"] < 2
