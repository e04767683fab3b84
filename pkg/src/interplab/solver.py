"""Interpolation norms ``||x||_{z,2}`` and their optimal decompositions.

For ``z`` in the strip ``0 < Re z < 1`` the norm is the minimum of

    Phi(v) = ||(e^{-kz} v_k)||_{S0}^2 + ||(e^{k(1-z)} v_k)||_{S1}^2

over sequences ``v`` on ``[-K, K]`` with ``sum_k v_k = x``. The minimizer
runs L-BFGS directions in the metric ``D_{k,i} = |e^{-kz}|^2 |e_i|_0^2 +
|e^{k(1-z)}|^2 |e_i|_1^2`` (the exact Hessian scale for quadratic
structures) and projects onto the constraint in that metric, which keeps
the problem well conditioned even though the weights span ``e^{+-K}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .banach import cap2_norm
from .optim import SolveReport, SolverOptions, minimize
from .sequences import StructuredCouple, TruncSeq, flat_exponent


def check_strip(z) -> complex:
    z = complex(z)
    if not 0 < z.real < 1:
        raise ValueError(f"strip point needs 0 < Re z < 1, got {z}")
    return z


@dataclass
class Decomposition:
    """A feasible sequence with ``sum_k seq_k`` close to ``target``."""

    seq: TruncSeq
    target: np.ndarray
    residual: float
    value: float


def sigma(v: TruncSeq) -> np.ndarray:
    """Coordinate-wise sum of all entries."""
    return v.sum()


class _Problem:
    """Objective, gradient, metric and projection for one ``(sc, x, z)``."""

    def __init__(self, sc: StructuredCouple, x: np.ndarray, z: complex):
        self.sc = sc
        self.x = x
        self.z = z
        K = sc.K
        k = np.arange(-K, K + 1)
        self.w0 = np.exp(-k * z)
        self.w1 = np.exp(k * (1 - z))
        u0 = sc.couple.space0.unit_norms()
        u1 = sc.couple.space1.unit_norms()
        self.c0 = np.abs(self.w0)[:, None] * u0
        self.c1 = np.abs(self.w1)[:, None] * u1
        self.D = self.c0 ** 2 + self.c1 ** 2
        self.Dinv = 1.0 / self.D
        self.Dinv_sum = self.Dinv.sum(axis=0)
        self.p0 = flat_exponent(sc.struct0)
        self.p1 = flat_exponent(sc.struct1)

    def parts(self, v):
        n0, g0 = self.sc.struct0.norm_grad(self.w0[:, None] * v)
        n1, g1 = self.sc.struct1.norm_grad(self.w1[:, None] * v)
        return n0, g0, n1, g1

    def fun_grad(self, v):
        n0, g0, n1, g1 = self.parts(v)
        f = n0 * n0 + n1 * n1
        g = 2 * n0 * np.conj(self.w0)[:, None] * g0 + 2 * n1 * np.conj(self.w1)[:, None] * g1
        return f, g

    def precond(self, g):
        h = self.Dinv * g
        return h - self.Dinv * (h.sum(axis=0) / self.Dinv_sum)

    def adaptive(self) -> bool:
        return any(p is not None and p != 2 for p in (self.p0, self.p1))

    def precond_at(self, v):
        """Metric projection with the diagonal curvature of flat lp norms at ``v``."""
        curv = self.D.copy()
        for p, c in ((self.p0, self.c0), (self.p1, self.c1)):
            if p is not None and p != 2:
                curv += lp_curvature(p, c, v)
        dinv = 1.0 / curv
        dsum = dinv.sum(axis=0)

        def apply(g):
            h = dinv * g
            return h - dinv * (h.sum(axis=0) / dsum)
        return apply

    def retract(self, v):
        r = v.sum(axis=0) - self.x
        return v - self.Dinv * (r / self.Dinv_sum)

    def feasibility(self, v):
        return float(np.linalg.norm(v.sum(axis=0) - self.x)) / (1.0 + float(np.linalg.norm(self.x)))

    def start(self):
        v = np.zeros((2 * self.sc.K + 1, self.x.size), dtype=complex)
        v[self.sc.K] = self.x
        return v


def lp_curvature(p: float, c: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Correction to the Euclidean curvature ``c^2`` of a squared flat lp norm.

    The diagonal Hessian of ``||c v||_p^2`` scales like ``(p - 1) c^2
    (|c v| / ||c v||_p)^{p - 2}``: stiff near vanishing entries when ``p < 2``
    and flat when ``p > 2``. Clipping keeps the metric well conditioned.
    """
    a = c * np.abs(v)
    nrm = float(np.sum(a ** p)) ** (1.0 / p)
    if nrm == 0:
        return np.zeros_like(c)
    r = (a / nrm) ** (p - 2.0) if p > 2 else np.maximum(a / nrm, 1e-12) ** (p - 2.0)
    if p < 2:
        return (p - 1.0) * c ** 2 * r
    return c ** 2 * ((p - 1.0) * np.maximum(r, 1e-6) - 1.0)


def interp_norm(sc: StructuredCouple, x, z, opts: SolverOptions | dict | None = None,
                v0: TruncSeq | np.ndarray | None = None):
    """Return ``(value, Decomposition, SolveReport)`` for ``||x||_{z,2}`` at radius ``sc.K``."""
    opts = SolverOptions.from_dict(opts)
    z = check_strip(z)
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    if x.shape != (sc.dim,):
        raise ValueError(f"dimension mismatch: expected {sc.dim}, got {x.shape}")
    K = sc.K
    if not np.any(x):
        dec = Decomposition(TruncSeq.zeros(K, sc.dim), x, 0.0, 0.0)
        return 0.0, dec, SolveReport(0.0, 0, 0.0, 0.0, True, 0.0)
    prob = _Problem(sc, x, z)
    if v0 is None:
        start = prob.start()
    else:
        start = v0.pad(K).data.copy() if isinstance(v0, TruncSeq) else np.array(v0, dtype=complex)
        start = prob.retract(start)
        # never start worse than the single-term decomposition
        if prob.fun_grad(start)[0] > prob.fun_grad(prob.start())[0]:
            start = prob.start()
    v, f, rep = minimize(prob.fun_grad, start, prob.precond, opts, smooth=sc.smooth,
                         retract=prob.retract, feasibility=prob.feasibility,
                         precond_update=prob.precond_at if prob.adaptive() else None)
    v = prob.retract(v)
    value = float(np.sqrt(max(f, 0.0)))
    resid = cap2_norm(sc.couple, v.sum(axis=0) - x)
    seq = TruncSeq(v)
    rep.value = value
    return value, Decomposition(seq, x, resid, value), rep


def objective(sc: StructuredCouple, v: TruncSeq, z) -> float:
    """``Phi(v)^(1/2)``: the combined weighted norm of a decomposition at ``z``."""
    z = check_strip(z)
    sc = sc.with_K(v.K) if v.K != sc.K else sc
    prob = _Problem(sc, np.zeros(sc.dim, dtype=complex), z)
    return float(np.sqrt(prob.fun_grad(v.data)[0]))


def dual_certificate(sc: StructuredCouple, dec: Decomposition, z) -> np.ndarray:
    """Norming functional of ``dec.target`` read off the optimality conditions.

    At the optimum the gradient of ``Phi`` is constant in ``k`` (the
    Lagrange multiplier of ``sum v = x``); dividing by ``2 ||x||`` gives the
    derivative of the norm, a functional ``phi`` with ``phi(x) = ||x||`` and
    dual norm 1.
    """
    z = check_strip(z)
    sc = sc.with_K(dec.seq.K)
    prob = _Problem(sc, dec.target, z)
    _, g = prob.fun_grad(dec.seq.data)
    gbar = (prob.Dinv * g).sum(axis=0) / prob.Dinv_sum
    return np.conj(gbar) / (2.0 * dec.value)


def interp_norm_grid(sc: StructuredCouple, x, zs, opts=None) -> list[dict]:
    """One ``interp_norm`` row per strip point, warm-started along the list."""
    zs = list(zs)
    if not zs:
        raise ValueError("need at least one strip point")
    rows = []
    prev_seq, prev_z = None, None
    for z in zs:
        z = check_strip(z)
        v0 = None
        if prev_seq is not None:
            k = prev_seq.indices
            v0 = TruncSeq(np.exp(k * (prev_z - z))[:, None] * prev_seq.data)
        val, dec, rep = interp_norm(sc, x, z, opts, v0=v0)
        rows.append({"re_z": z.real, "im_z": z.imag, "K": sc.K, "value": val,
                     "iterations": rep.iterations, "converged": rep.converged,
                     "decomposition": dec, "report": rep})
        prev_seq, prev_z = dec.seq, z
    return rows


def scalar_quadratic_norm(theta: float, K: int) -> float:
    """Closed form of ``||1||_{theta,2}`` for the scalar l2/l2 couple."""
    k = np.arange(-K, K + 1)
    w = np.exp(-2 * k * theta) + np.exp(2 * k * (1 - theta))
    return float(np.sum(1.0 / w) ** -0.5)


def scalar_quadratic_decomposition(theta: float, K: int) -> np.ndarray:
    """Optimal coefficients ``t_k`` (summing to 1) for the scalar l2/l2 couple."""
    k = np.arange(-K, K + 1)
    t = 1.0 / (np.exp(-2 * k * theta) + np.exp(2 * k * (1 - theta)))
    return t / t.sum()


def endpoint_operator_norm(space, T) -> float:
    """Operator norm of the matrix ``T`` on one lp space.

    Exact for diagonal ``T`` (any exponent) and for weighted l2.
    """
    T = np.asarray(T, dtype=complex)
    if space.kind != "lp":
        raise NotImplementedError("operator norms need an lp space")
    if np.count_nonzero(T - np.diag(np.diag(T))) == 0:
        return float(np.abs(np.diag(T)).max())
    if space.p == 2:
        w = space.weights
        return float(np.linalg.norm((w[:, None] * T) / w[None, :], 2))
    raise NotImplementedError("non-diagonal operators only on weighted l2")


def shift_constant(theta: float) -> float:
    """``e^{max(theta, 1 - theta)/2}``, the cost of rounding the balancing shift."""
    return float(np.exp(max(theta, 1.0 - theta) / 2.0))


def operator_interp_ratio(sc: StructuredCouple, T, x, z, opts=None, pad: int | None = None):
    """``||Tx||_{z,2} / (M0^{1-theta} M1^theta ||x||_{z,2})``.

    ``Tx`` is measured at radius ``K + pad`` so that the balancing shift by
    ``round(log(M1/M0))`` fits inside the window; ``pad`` defaults to that
    shift.
    """
    z = check_strip(z)
    T = np.asarray(T, dtype=complex)
    m0 = endpoint_operator_norm(sc.couple.space0, T)
    m1 = endpoint_operator_norm(sc.couple.space1, T)
    if pad is None:
        pad = abs(int(round(np.log(m1 / m0))))
    nx = interp_norm(sc, x, z, opts)[0]
    ntx = interp_norm(sc.with_K(sc.K + pad), T @ np.asarray(x, dtype=complex), z, opts)[0]
    return float(ntx / (m0 ** (1 - z.real) * m1 ** z.real * nx))
