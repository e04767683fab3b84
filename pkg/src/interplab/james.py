"""James-space experiment: the vectors ``x^n``, ``x^n_s``, ``z^n``, the
modulation blow-up and a second-level evaluation of ``[J, l2]_{1/2}``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .banach import NormedSpace, custom_space, lp_space
from .optim import SolverOptions
from .sequences import (JamesStructure, TruncSeq, james_batch, james_chain_enumeration, seq_norm,
                        structured_couple)
from .solver import interp_norm


@dataclass
class JamesVectors:
    n: int
    x: np.ndarray
    xstar: np.ndarray
    s: float
    xn: TruncSeq
    xn_s: TruncSeq
    zn: TruncSeq
    base: NormedSpace = field(repr=False)


def build_james_vectors(n: int, x, xstar, s: float = 0.0, base: NormedSpace | None = None,
                        K: int | None = None, tol: float = 1e-12) -> JamesVectors:
    """``x^n = sum_{j=1}^{2n} e_j x``, ``x^n_s = sum e^{ijs} e_j x``, ``z^n = sum (-1)^j e_j x*``."""
    if n < 1:
        raise ValueError("n must be positive")
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    xstar = np.atleast_1d(np.asarray(xstar, dtype=complex))
    base = base or lp_space(x.size, 2.0)
    nx = float(base.norm(x))
    nxs = float(base.dual().norm(xstar))
    pairing = complex(np.dot(xstar, x))
    if abs(nx - 1) > tol or abs(nxs - 1) > tol or abs(pairing - 1) > tol:
        raise ValueError(f"need ||x|| = ||x*|| = <x*, x> = 1, got {nx}, {nxs}, {pairing}")
    K = 2 * n if K is None else K
    if K < 2 * n:
        raise ValueError("the window must contain positions 1..2n")
    xn, xn_s, zn = (TruncSeq.zeros(K, x.size) for _ in range(3))
    for j in range(1, 2 * n + 1):
        xn[j] = x
        xn_s[j] = np.exp(1j * j * s) * x
        zn[j] = (-1) ** j * xstar
    return JamesVectors(n, x, xstar, s, xn, xn_s, zn, base)


def pairing(f: TruncSeq, v: TruncSeq) -> complex:
    """``sum_k <f_k, v_k>`` (bilinear)."""
    K = max(f.K, v.K)
    return complex(np.sum(f.pad(K).data * v.pad(K).data))


def _sample_unit_james(base, K, n, m, rng, samples):
    """Random sequences on positions ``1..m``, scaled to James norm 1.

    Half are Gaussian, half alternate in sign along a common direction (the
    near-extremal pattern for the alternating functional).
    """
    d = base.dim
    out = np.zeros((samples, 2 * K + 1, d), dtype=complex)
    g = rng.standard_normal((samples, m, d)) + 1j * rng.standard_normal((samples, m, d))
    alt = (-1.0) ** np.arange(1, m + 1)
    half = samples // 2
    u = rng.standard_normal((half, 1, d)) + 1j * rng.standard_normal((half, 1, d))
    g[:half] = alt[None, :, None] * u + 0.3 * g[:half]
    out[:, K + 1:K + 1 + m] = g
    val, _ = james_batch(base, out, with_grad=False)
    return out / val[:, None, None]


def james_norm_checks(jv: JamesVectors, samples: int = 500, seed: int = 0) -> dict:
    """Reproduce the three facts about ``x^n`` and ``z^n``.

    (a) ``||x^n||_J = 1``; (b) ``|<z^n, y>| <= sqrt(2n)`` for James-unit ``y``;
    (c) ``||x^n||_{l2} = sqrt(2n)``.
    """
    base = jv.base
    js = JamesStructure(base)
    n, K = jv.n, jv.xn.K
    jn = seq_norm(js, jv.xn)
    l2 = float(np.sqrt(np.sum(np.asarray(base.norm(jv.xn.data)) ** 2)))
    rng = np.random.default_rng(seed)
    ys = _sample_unit_james(base, K, n, 2 * n, rng, samples)
    vals = np.abs(np.einsum("kd,bkd->b", jv.zn.data, ys))
    bound = np.sqrt(2.0) * np.sqrt(n)
    return {
        "n": n,
        "james_norm": jn,
        "james_norm_ok": bool(abs(jn - 1.0) <= 1e-12),
        "dual_max": float(vals.max()),
        "dual_bound": float(bound),
        "dual_violations": int(np.sum(vals > bound * (1 + 1e-12))),
        "l2_norm": l2,
        "l2_ok": bool(abs(l2 - np.sqrt(2 * n)) <= 1e-12),
    }


def dp_vs_enumeration(base: NormedSpace, arr) -> tuple[float, float]:
    """James norm of a short sequence by dynamic programming and by enumeration."""
    arr = np.asarray(arr, dtype=complex)
    dp = float(james_batch(base, arr[None], with_grad=False)[0][0])
    return dp, james_chain_enumeration(base, arr)


def lower_bound(n: int, s: float) -> float:
    """``|<z^n, x^n_s>| / (sqrt 2 sqrt n)`` as a direct sum (no 0/0 at ``s = pi``)."""
    j = np.arange(1, 2 * n + 1)
    return float(abs(np.sum((-np.exp(1j * s)) ** j)) / (np.sqrt(2.0) * np.sqrt(n)))


def upper_bound(n: int, literal: bool = False) -> float:
    """``sqrt(2) n^{1/4}``, or ``(2n)^{1/4}`` with ``literal=True``."""
    return float((2.0 * n) ** 0.25 if literal else np.sqrt(2.0) * n ** 0.25)


def s_grid_near_pi(n: int, points: int = 8) -> np.ndarray:
    """``pi - eps`` with ``eps`` halving from ``pi/n``; ``L(n, .)`` increases along it."""
    eps = (np.pi / n) * 0.5 ** np.arange(points)
    return np.pi - eps


def modulation_blowup(n_list, s_list=None, j2: bool = False, opts=None) -> list[dict]:
    """Rows ``(n, s, L, upper, upper_literal, ratio, ratio_literal[, j2_value])``.

    ``s_list`` defaults to ``s_grid_near_pi(n)`` for each ``n``.
    """
    rows = []
    for n in n_list:
        grid = s_grid_near_pi(n) if s_list is None else s_list
        up, upl = upper_bound(n), upper_bound(n, literal=True)
        for s in grid:
            L = lower_bound(n, s)
            row = {"n": int(n), "s": float(s), "L": L, "upper": up, "upper_literal": upl,
                   "ratio": L / up, "ratio_literal": L / upl}
            if j2:
                jv = build_james_vectors(n, [1.0], [1.0], s)
                row["j2_value"] = j2_norm_dogfood(jv.xn_s.data[jv.xn_s.K + 1:jv.xn_s.K + 1 + 2 * n],
                                                  opts=opts)[0]
            rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# second-level J_2


def james_flat_space(m: int, base: NormedSpace | None = None) -> NormedSpace:
    """James norm of ``m`` consecutive entries of ``base``, as a norm on ``C^{m d}``."""
    base = base or lp_space(1, 2.0)
    d = base.dim

    def func(v):
        v = np.asarray(v, dtype=complex)
        lead = v.shape[:-1]
        arr = v.reshape(-1, m, d)
        val, _ = james_batch(base, arr, with_grad=False)
        return val.reshape(lead) if lead else float(val[0])

    def grad(v):
        v = np.asarray(v, dtype=complex)
        arr = v.reshape(-1, m, d)
        _, g = james_batch(base, arr)
        return g.reshape(v.shape)

    return custom_space(m * d, func, grad, name="james")


def j2_norm_dogfood(v, base: NormedSpace | None = None, K: int = 4, opts=None,
                    max_dim: int = 64):
    """``[J, l2]_{1/2}`` norm of a short sequence via the framework itself.

    The James and l2 norms of the flattened block form a couple on
    ``C^{m d}``; both get fourier(2) structures and the interpolation norm
    is evaluated at ``theta = 1/2``. Returns ``(value, SolveReport)``.
    """
    v = np.asarray(v, dtype=complex)
    if v.ndim == 1:
        v = v[:, None]
    m, d = v.shape
    base = base or lp_space(d, 2.0)
    if m * d > max_dim:
        raise ValueError(f"flattened dimension {m * d} exceeds {max_dim}")
    space0 = james_flat_space(m, base)
    if base.kind == "lp" and base.p == 2 and np.all(base.weights == 1):
        space1 = lp_space(m * d, 2.0)
    else:
        raise NotImplementedError("the l2 side needs a Euclidean base")
    sc = structured_couple(space0, space1, "fourier", K=K, params0={"p": 2.0}, params1={"p": 2.0})
    o = SolverOptions.from_dict(opts) if opts is not None else SolverOptions(max_iter=3000, step_rule="diminishing",
                                                                               step_scale=0.5)
    val, _, rep = interp_norm(sc, v.ravel(), 0.5, o)
    return val, rep


def geometric_mean_bound(v, base: NormedSpace | None = None) -> float:
    """``||v||_J^{1/2} ||v||_{l2}^{1/2}`` for a short block ``v``."""
    v = np.asarray(v, dtype=complex)
    if v.ndim == 1:
        v = v[:, None]
    base = base or lp_space(v.shape[1], 2.0)
    jn = float(james_batch(base, v[None], with_grad=False)[0][0])
    l2 = float(np.sqrt(np.sum(np.asarray(base.norm(v)) ** 2)))
    return float(np.sqrt(jn * l2))


def measure_c_method(vectors, base: NormedSpace | None = None, K: int = 4, opts=None) -> dict:
    """Ratios ``value / (||v||_J^{1/2} ||v||_2^{1/2})`` over test blocks.

    ``C_method`` is reported as ``max(max ratio, 1 / min ratio)``, the
    two-sided equivalence constant seen on the samples.
    """
    ratios = []
    for v in vectors:
        val, _ = j2_norm_dogfood(v, base, K, opts)
        ratios.append(val / geometric_mean_bound(v, base))
    ratios = np.asarray(ratios)
    return {"ratios": ratios.tolist(), "c_method": float(max(ratios.max(), 1.0 / ratios.min()))}
