"""Dual-side constructions: the minus-method norm, the difference operator
``A``, the dual function ``g`` and the maximum-modulus pairing ``F``.

The minus norm of a functional ``x*`` at ``z`` is

    inf (||(e^{-kz} xs_k)||^2_{S0*} + ||(e^{k(1-z)} (x* - xs_k))||^2_{S1*})^(1/2)

over splits ``xs``. Outside the window the split is frozen at ``xs = 0``
(``k < -K``) and ``xs = x*`` (``k > K``), the only choice with finite
weighted tails for these weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize as sp_minimize

from .daher import gamma
from .hardy import PeriodicFunction, pf_eval
from .optim import SolveReport, SolverOptions, minimize
from .sequences import (FourierStructure, LpStructure, SequenceStructure, StructuredCouple,
                        TruncSeq, flat_exponent)
from .solver import check_strip, dual_certificate, interp_norm, lp_curvature


@dataclass
class DualPair:
    """Split ``x* = xs_k + ys_k`` for every ``k``; ``ys`` is derived."""

    xs: TruncSeq
    functional: np.ndarray

    @property
    def ys(self) -> TruncSeq:
        return TruncSeq(self.functional[None, :] - self.xs.data)

    @property
    def K(self) -> int:
        return self.xs.K


def dual_couple(sc: StructuredCouple) -> StructuredCouple:
    """Dual norms with dual structures (lp and fourier kinds only)."""
    for s in (sc.struct0, sc.struct1):
        if not isinstance(s, (LpStructure, FourierStructure)):
            raise NotImplementedError(f"no closed-form dual for the {s.kind} structure")
    return sc.dual()


def _tail_power(q: float, rate: float, K: int) -> float:
    """``sum_{m > K} e^{-q m rate}`` (for ``q = inf``, the largest term)."""
    if np.isinf(q):
        return float(np.exp(-(K + 1) * rate))
    return float(np.exp(-q * (K + 1) * rate) / -np.expm1(-q * rate))


class _TailedNorm:
    """Structure norm of a window plus a frozen constant tail on one side.

    ``side`` is ``+1`` if the tail sits at ``k > K`` and ``-1`` for ``k < -K``;
    the weight at index ``k`` is ``e^{k log_weight}`` and ``rate`` is the decay
    of its modulus away from the window.
    """

    def __init__(self, s: SequenceStructure, K: int, log_weight: complex, tail: np.ndarray,
                 side: int, rate: float, extra: int | None = None):
        self.s = s
        self.K = K
        self.tail = tail
        self.side = side
        self.rate = rate
        if isinstance(s, LpStructure):
            self.mode = "lp"
            tn = float(s.base.norm(tail))
            self.q = s.p
            self.tail_pow = tn ** self.q * _tail_power(self.q, rate, K) if not np.isinf(self.q) \
                else tn * _tail_power(self.q, rate, K)
        else:
            # frozen extension long enough that the neglected mass is below rounding
            self.mode = "window"
            self.extra = extra or int(np.ceil(40.0 / rate))
            m = np.arange(K + 1, K + 1 + self.extra)
            self.ext = np.exp(side * m * log_weight)[:, None] * tail[None, :]

    def norm_grad(self, u: np.ndarray):
        """``u`` is the weighted window; returns the tailed norm and its gradient in ``u``."""
        if self.mode == "lp":
            nw, g = self.s.norm_grad(u)
            q = self.q
            if np.isinf(q):
                t = self.tail_pow
                return (nw, g) if nw >= t else (t, np.zeros_like(g))
            if q == 1:
                return nw + self.tail_pow, g
            total = (nw ** q + self.tail_pow) ** (1.0 / q)
            if total == 0:
                return 0.0, g
            return total, (nw / total) ** (q - 1) * g
        ext = self.ext[::-1] if self.side < 0 else self.ext
        if self.side > 0:
            full = np.concatenate([u, ext])
            val, g = self.s.norm_grad(full)
            return val, g[: u.shape[0]]
        full = np.concatenate([ext, u])
        val, g = self.s.norm_grad(full)
        return val, g[ext.shape[0]:]


class _MinusProblem:
    def __init__(self, dsc: StructuredCouple, xstar: np.ndarray, z: complex, reflected: bool):
        K = dsc.K
        k = np.arange(-K, K + 1)
        theta = z.real
        sgn = -1 if reflected else 1
        self.a0 = np.exp(sgn * k * z)
        self.a1 = np.exp(sgn * k * (z - 1))
        self.xstar = xstar
        # side on which xs is frozen at x* (ys = 0) and vice versa
        xs_side = 1 if reflected else -1
        self.n0 = _TailedNorm(dsc.struct0, K, sgn * z, xstar, xs_side, theta)
        self.n1 = _TailedNorm(dsc.struct1, K, sgn * (z - 1), xstar, -xs_side, 1.0 - theta)
        u0 = dsc.couple.space0.unit_norms()
        u1 = dsc.couple.space1.unit_norms()
        self.c0 = np.abs(self.a0)[:, None] * u0
        self.c1 = np.abs(self.a1)[:, None] * u1
        self.A0 = self.c0 ** 2
        self.A1 = self.c1 ** 2
        self.Dinv = 1.0 / (self.A0 + self.A1)
        self.p0 = flat_exponent(dsc.struct0)
        self.p1 = flat_exponent(dsc.struct1)

    def fun_grad(self, xs):
        n0, g0 = self.n0.norm_grad(self.a0[:, None] * xs)
        n1, g1 = self.n1.norm_grad(self.a1[:, None] * (self.xstar[None, :] - xs))
        f = n0 * n0 + n1 * n1
        g = 2 * n0 * np.conj(self.a0)[:, None] * g0 - 2 * n1 * np.conj(self.a1)[:, None] * g1
        return f, g

    def precond(self, g):
        return self.Dinv * g

    def adaptive(self) -> bool:
        return any(p is not None and p != 2 for p in (self.p0, self.p1))

    def precond_at(self, xs):
        """Diagonal inverse Hessian at ``xs``, with the flat lp curvature of each side."""
        curv = self.A0 + self.A1
        for p, c, y in ((self.p0, self.c0, xs), (self.p1, self.c1, self.xstar[None, :] - xs)):
            if p is not None and p != 2:
                curv = curv + lp_curvature(p, c, y)
        dinv = 1.0 / curv
        return lambda g: dinv * g

    def start(self):
        # per-index optimal split for the quadratic model
        return (self.A1 * self.Dinv) * self.xstar[None, :]


def minus_norm(dsc: StructuredCouple, xstar, z, opts=None, *, reflected: bool = True):
    """Return ``(value, DualPair, SolveReport)`` for the minus norm of ``xstar``.

    ``dsc`` is a couple of dual norms with their structures (see
    ``dual_couple``). With ``reflected=False`` the weights ``(e^{kz},
    e^{k(z-1)})`` are used with the mirrored boundary split; for
    reflection-invariant structures both give the same value.
    """
    opts = SolverOptions.from_dict(opts)
    z = check_strip(z)
    xstar = np.atleast_1d(np.asarray(xstar, dtype=complex))
    if xstar.shape != (dsc.dim,):
        raise ValueError(f"dimension mismatch: expected {dsc.dim}, got {xstar.shape}")
    K = dsc.K
    if not np.any(xstar):
        return 0.0, DualPair(TruncSeq.zeros(K, dsc.dim), xstar), SolveReport(0.0, 0, 0.0, 0.0, True, 0.0)
    prob = _MinusProblem(dsc, xstar, z, reflected)
    xs, f, rep = minimize(prob.fun_grad, prob.start(), prob.precond, opts, smooth=dsc.smooth,
                          precond_update=prob.precond_at if prob.adaptive() else None)
    value = float(np.sqrt(max(f, 0.0)))
    rep.value = value
    return value, DualPair(TruncSeq(xs), xstar), rep


def scalar_minus_norm(theta: float, K: int) -> float:
    """Minus norm of ``1`` for the scalar l2/l2 couple at radius ``K``, tails included."""
    k = np.arange(-K, K + 1)
    core = np.sum(1.0 / (np.exp(2 * k * theta) + np.exp(-2 * k * (1 - theta))))
    tails = _tail_power(2.0, theta, K) + _tail_power(2.0, 1.0 - theta, K)
    return float(np.sqrt(core + tails))


def scalar_sums(theta: float, K: int) -> tuple[float, float]:
    """``(Sigma_1, Sigma_2)``: the primal and dual harmonic sums of the scalar model."""
    k = np.arange(-K, K + 1)
    s1 = np.sum(1.0 / (np.exp(-2 * k * theta) + np.exp(2 * k * (1 - theta))))
    s2 = np.sum(1.0 / (np.exp(2 * k * theta) + np.exp(-2 * k * (1 - theta))))
    return float(s1), float(s2)


# ---------------------------------------------------------------------------
# primal dual norm by ascent


def primal_dual_norm(sc: StructuredCouple, xstar, z, opts=None, starts: int = 8, seed: int = 0):
    """``sup {Re <x*, x> : ||x||_{z,2} <= 1}`` by multi-start quasi-Newton ascent.

    Returns ``(value, best_x, converged)``; the value is a certified lower
    bound (it is attained at ``best_x``).
    """
    z = check_strip(z)
    xstar = np.atleast_1d(np.asarray(xstar, dtype=complex))
    n = xstar.size
    rng = np.random.default_rng(seed)
    cache: dict = {"seq": None}

    def neg_ratio(r):
        x = r[:n] + 1j * r[n:]
        val, dec, _ = interp_norm(sc, x, z, opts, v0=cache["seq"])
        cache["seq"] = dec.seq
        if val == 0:
            return 0.0, np.zeros(2 * n)
        h = float(np.real(np.dot(xstar, x))) / val
        phi = dual_certificate(sc, dec, z)
        g = (np.conj(xstar) - h * np.conj(phi)) / val
        # h is scale invariant; the penalty pins the Euclidean radius
        r2 = float(np.dot(r, r))
        return -h + 0.25 * (r2 - 1.0) ** 2, -np.concatenate([g.real, g.imag]) + (r2 - 1.0) * r

    inits = [np.conj(xstar)] + [rng.standard_normal(n) + 1j * rng.standard_normal(n)
                                for _ in range(starts - 1)]
    best, best_x, conv = -np.inf, None, False
    for x0 in inits:
        x0 = x0 / np.linalg.norm(x0)
        cache["seq"] = None
        res = sp_minimize(neg_ratio, np.concatenate([x0.real, x0.imag]), jac=True, method="BFGS",
                          options={"gtol": 1e-9, "maxiter": 200})
        x = res.x[:n] + 1j * res.x[n:]
        h = float(np.real(np.dot(xstar, x))) / interp_norm(sc, x, z, opts)[0]
        if h > best:
            best = h
            best_x = x
            conv = bool(res.success) or np.linalg.norm(res.jac) < 1e-6
    best_x = best_x / interp_norm(sc, best_x, z, opts)[0]
    return float(best), best_x, conv


def duality_gap(sc: StructuredCouple, xstar, z, opts=None, starts: int = 8, seed: int = 0):
    """``(lhs, rhs, gap)``: primal dual norm, minus norm, and ``|lhs - rhs| / rhs``."""
    lhs, _, _ = primal_dual_norm(sc, xstar, z, opts, starts, seed)
    rhs = minus_norm(dual_couple(sc), xstar, z, opts)[0]
    return lhs, rhs, abs(lhs - rhs) / rhs


# ---------------------------------------------------------------------------
# A, g and F


def a_operator(dp: DualPair) -> TruncSeq:
    """Differences ``xs_k - xs_{k-1}`` on ``-K..K+1`` (window ``K+1``).

    ``xs_{-K-1}`` is taken as 0 and the entry at ``K+1`` closes the
    telescoping sum with ``x* - xs_K``, so the entries sum to ``x*``.
    """
    K = dp.K
    xs = dp.xs.data
    out = np.zeros((2 * K + 3, xs.shape[1]), dtype=complex)
    out[1] = xs[0]
    out[2:-1] = xs[1:] - xs[:-1]
    out[-1] = dp.functional - xs[-1]
    return TruncSeq(out)


def g_function(dp: DualPair, z0, dsc: StructuredCouple | None = None) -> PeriodicFunction:
    """``g(z) = sum_k e^{k(z - z0)} (A x*)_k`` on the dual side."""
    return PeriodicFunction(check_strip(z0), a_operator(dp), dsc)


@dataclass
class MaxModulusResult:
    rows: list[dict]
    certificate: np.ndarray
    certificate_quality: float
    minus_value: float

    @property
    def f_at_base(self) -> complex:
        return self.rows[0]["F"]

    @property
    def max_abs(self) -> float:
        return max(abs(r["F"]) for r in self.rows)

    @property
    def defect(self) -> float:
        return max(abs(r["F"] - 1.0) for r in self.rows)


def max_modulus_pairing(sc: StructuredCouple, x, z0, zs, opts=None) -> MaxModulusResult:
    """``F(z) = <g(z), Gamma_{z0}(x)(z)>`` on ``[z0] + zs``.

    ``x`` is scaled onto the unit sphere at ``z0``. The norming functional is
    the optimality certificate of ``x``, divided by its minus norm so that the
    dual function has norm 1 at ``z0``.
    """
    z0 = check_strip(z0)
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    val, dec, _ = interp_norm(sc, x, z0, opts)
    x = x / val
    opt = gamma(sc, x, z0, opts)
    phi = dual_certificate(sc, dec, z0)
    dsc = dual_couple(sc)
    mval, dp, _ = minus_norm(dsc, phi, z0, opts)
    quality = float(np.real(np.dot(phi, x))) / mval
    if abs(quality - 1.0) > 1e-3:
        raise RuntimeError(f"norming functional off by {abs(quality - 1.0):.3e} "
                           f"(<x*, x> = {np.real(np.dot(phi, x)):.6f}, minus norm {mval:.6f})")
    dp = DualPair(dp.xs / mval, phi / mval)
    g = g_function(dp, z0, dsc)
    rows = []
    for z in [z0] + [check_strip(w) for w in zs]:
        F = complex(np.dot(pf_eval(g, z), pf_eval(opt.f, z)))
        rows.append({"re_z": z.real, "im_z": z.imag, "F": F, "abs_F": abs(F)})
    return MaxModulusResult(rows, phi, quality, mval)


def strip_grid(re_values, im_values) -> list[complex]:
    return [complex(a, b) for a in re_values for b in im_values]
