"""Preconditioned L-BFGS / subgradient minimizer over complex arrays.

Variables are complex numpy arrays treated as real vector spaces with the
inner product ``Re <u, v>``. Gradients follow the same convention: for a
real function ``f`` of a complex array ``v`` the gradient is
``df/dRe(v) + 1j * df/dIm(v)``.

Feasible sets are affine; ``precond`` must map a gradient to a direction
inside the linear part of the feasible set, so every iterate stays feasible
once the starting point is.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

FunGrad = Callable[[np.ndarray], "tuple[float, np.ndarray]"]
Linear = Callable[[np.ndarray], np.ndarray]

# relative objective change that double precision can still resolve
PRECISION_FLOOR = 1e3 * np.finfo(float).eps
STALL_WINDOW = 20


@dataclass
class SolveReport:
    """Outcome of a variational computation."""

    value: float
    iterations: int
    grad_norm: float
    feasibility: float
    converged: bool
    wall_time: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SolverOptions:
    max_iter: int = 100_000
    tol_grad: float = 1e-8
    tol_feas: float = 1e-8
    step_rule: str = "auto"  # auto | armijo | diminishing
    memory: int = 10
    armijo: float = 1e-4
    step_scale: float = 1.0  # c in c/sqrt(t) for the diminishing rule

    @classmethod
    def from_dict(cls, d: dict | None) -> "SolverOptions":
        if d is None:
            return cls()
        if isinstance(d, cls):
            return d
        return cls(**{k: v for k, v in d.items() if v is not None})


def _dot(u: np.ndarray, v: np.ndarray) -> float:
    return float(np.real(np.vdot(u, v)))


def minimize(
    fun_grad: FunGrad,
    v0: np.ndarray,
    precond: Linear,
    opts: SolverOptions,
    *,
    smooth: bool = True,
    retract: Linear | None = None,
    feasibility: Callable[[np.ndarray], float] | None = None,
    precond_update: Callable[[np.ndarray], Linear] | None = None,
) -> tuple[np.ndarray, float, SolveReport]:
    """Minimize a convex function from a feasible start.

    ``precond`` is the initial inverse Hessian (restricted to feasible
    directions). ``retract`` optionally re-projects an iterate onto the
    feasible set to stop rounding drift. ``precond_update(v)``, if given,
    returns a fresh initial inverse Hessian at each accepted iterate.
    """
    rule = opts.step_rule
    if rule == "auto":
        rule = "armijo" if smooth else "diminishing"
    t0 = time.perf_counter()
    stalled = False
    if rule == "armijo":
        if precond_update is not None:
            precond = precond_update(v0)
        v, f, it, gn, stalled = _lbfgs(fun_grad, v0, precond, opts, retract, precond_update)
    elif rule == "diminishing":
        v, f, it, gn = _subgradient(fun_grad, v0, precond, opts, retract)
    else:
        raise ValueError(f"unknown step rule {opts.step_rule!r}")
    feas = feasibility(v) if feasibility is not None else 0.0
    stationary = gn <= opts.tol_grad * (1.0 + abs(f))
    if stalled:
        # no measurable decrease left: accept if the predicted decrease
        # gn^2 / 2 is below the rounding level of f
        stationary = stationary or gn * gn <= PRECISION_FLOOR * (1.0 + abs(f))
    converged = stationary and feas <= opts.tol_feas
    report = SolveReport(
        value=float(f),
        iterations=it,
        grad_norm=float(gn),
        feasibility=float(feas),
        converged=bool(converged),
        wall_time=time.perf_counter() - t0,
    )
    return v, f, report


def _lbfgs(fun_grad, v, precond, opts, retract, precond_update=None):
    f, g = fun_grad(v)
    S: list[np.ndarray] = []
    Y: list[np.ndarray] = []
    rho: list[float] = []
    hg = precond(g)
    gn = np.sqrt(max(_dot(g, hg), 0.0))
    it = 0
    fresh = True
    stalled = False
    flat = 0  # consecutive steps with a decrease below rounding
    while it < opts.max_iter:
        if gn <= opts.tol_grad * (1.0 + abs(f)):
            break
        # two-loop recursion
        q = g.copy()
        alphas = []
        for s, y, r in zip(reversed(S), reversed(Y), reversed(rho)):
            a = r * _dot(s, q)
            alphas.append(a)
            q = q - a * y
        d = precond(q)
        if S:
            d = d * (_dot(S[-1], Y[-1]) / max(_dot(Y[-1], precond(Y[-1])), 1e-300))
        for (s, y, r), a in zip(zip(S, Y, rho), reversed(alphas)):
            b = r * _dot(y, d)
            d = d + (a - b) * s
        d = -d
        slope = _dot(g, d)
        if not slope < 0:
            S.clear(), Y.clear(), rho.clear()
            d = -hg
            slope = -gn * gn
        step = 1.0
        if fresh and not S:
            # first step: keep the trial move comparable to the iterate
            dn = np.sqrt(max(_dot(d, d), 1e-300))
            step = min(1.0, max(np.sqrt(_dot(v, v)), 1e-12) / dn)
        accepted = False
        while step > 1e-12:
            vn = v + step * d
            if retract is not None:
                vn = retract(vn)
            fn, gnew = fun_grad(vn)
            if fn <= f + opts.armijo * step * slope:
                accepted = True
                break
            step *= 0.5
        it += 1
        if not accepted:
            if gn * gn <= PRECISION_FLOOR * (1.0 + abs(f)):
                stalled = True
                break
            if S:
                S.clear(), Y.clear(), rho.clear()
                continue
            stalled = True
            break
        fresh = False
        flat = flat + 1 if f - fn <= PRECISION_FLOOR * (1.0 + abs(f)) else 0
        if flat >= STALL_WINDOW:
            v, f, g = vn, fn, gnew
            hg = precond(g)
            gn = np.sqrt(max(_dot(g, hg), 0.0))
            stalled = True
            break
        s = vn - v
        y = gnew - g
        sy = _dot(s, y)
        if sy > 1e-16 * np.sqrt(_dot(s, s) * _dot(y, y)) and sy > 0:
            S.append(s)
            Y.append(y)
            rho.append(1.0 / sy)
            if len(S) > opts.memory:
                S.pop(0), Y.pop(0), rho.pop(0)
        v, f, g = vn, fn, gnew
        if precond_update is not None:
            precond = precond_update(v)
        hg = precond(g)
        gn = np.sqrt(max(_dot(g, hg), 0.0))
    return v, f, it, gn, stalled


def _subgradient(fun_grad, v, precond, opts, retract):
    f, g = fun_grad(v)
    best_v, best_f = v, f
    hg = precond(g)
    gn = np.sqrt(max(_dot(g, hg), 0.0))
    scale = opts.step_scale * max(np.sqrt(_dot(v, v)), 1e-12)
    it = 0
    while it < opts.max_iter:
        if gn <= opts.tol_grad * (1.0 + abs(f)) or gn == 0.0:
            break
        d = -hg / np.sqrt(max(_dot(hg, hg), 1e-300))
        v = v + (scale / np.sqrt(it + 1.0)) * d
        if retract is not None:
            v = retract(v)
        f, g = fun_grad(v)
        hg = precond(g)
        gn = np.sqrt(max(_dot(g, hg), 0.0))
        it += 1
        if f < best_f:
            best_v, best_f = v, f
    best_g = fun_grad(best_v)[1]
    gn = np.sqrt(max(_dot(best_g, precond(best_g)), 0.0))
    return best_v, best_f, it, gn
