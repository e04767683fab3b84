"""Finite-dimensional Banach spaces on C^n and the two-norm combinations.

Functionals act on vectors through the bilinear pairing
``<f, x> = sum_i f_i x_i``, so the dual of a weighted lp norm is the
weighted lq norm with inverse weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .optim import SolveReport, SolverOptions, minimize


def phase(x: np.ndarray) -> np.ndarray:
    """``x / |x|`` with ``phase(0) = 0``."""
    x = np.asarray(x, dtype=complex)
    a = np.abs(x)
    out = np.zeros_like(x)
    nz = a > 0
    out[nz] = x[nz] / a[nz]
    return out


def conjugate_exponent(p: float) -> float:
    if p == 1:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1.0)


class NormedSpace:
    """A norm on C^n.

    ``kind`` is ``"lp"`` (weighted lp, ``||x|| = ||(w_i x_i)||_p``) or
    ``"custom"`` (user callback). All evaluation methods accept batches of
    shape ``(..., n)``.
    """

    def __init__(
        self,
        dim: int,
        kind: str = "lp",
        p: float = 2.0,
        weights=None,
        func: Callable[[np.ndarray], np.ndarray] | None = None,
        grad: Callable[[np.ndarray], np.ndarray] | None = None,
        name: str | None = None,
    ):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = int(dim)
        self.kind = kind
        self.name = name
        if kind == "lp":
            p = float(p)
            if not p >= 1:
                raise ValueError(f"lp exponent must lie in [1, inf], got {p}")
            self.p = p
            w = np.ones(dim) if weights is None else np.asarray(weights, dtype=float)
            if w.shape != (dim,) or np.any(~(w > 0)) or not np.all(np.isfinite(w)):
                raise ValueError("weights must be n finite positive reals")
            self.weights = w
            self._func = None
            self._grad = None
        elif kind == "custom":
            if func is None:
                raise ValueError("custom norms need an evaluation callback")
            self.p = np.nan
            self.weights = None
            self._func = func
            self._grad = grad
        else:
            raise ValueError(f"unknown norm kind {kind!r}")

    # -- descriptors -------------------------------------------------------

    @property
    def smooth(self) -> bool:
        return self.kind == "lp" and 1 < self.p < np.inf

    @property
    def dual_closed_form(self) -> bool:
        return self.kind == "lp"

    def __repr__(self) -> str:
        if self.kind == "lp":
            return f"NormedSpace(lp, p={self.p:g}, dim={self.dim})"
        return f"NormedSpace(custom {self.name or ''}, dim={self.dim})"

    def to_dict(self) -> dict:
        if self.kind != "lp":
            raise ValueError("custom norms are not serializable")
        return {"kind": "lp", "p": self.p, "weights": self.weights.tolist()}

    # -- evaluation --------------------------------------------------------

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.shape[-1:] != (self.dim,):
            raise ValueError(f"dimension mismatch: expected trailing size {self.dim}, got {x.shape}")
        return x

    def norm(self, x) -> np.ndarray | float:
        x = self._check(x)
        if self.kind == "custom":
            return self._func(x)
        a = np.abs(x) * self.weights
        p = self.p
        if np.isinf(p):
            out = a.max(axis=-1)
        elif p == 1:
            out = a.sum(axis=-1)
        elif p == 2:
            out = np.sqrt((a * a).sum(axis=-1))
        else:
            m = a.max(axis=-1, keepdims=True)
            safe = np.where(m > 0, m, 1.0)
            out = safe[..., 0] * ((a / safe) ** p).sum(axis=-1) ** (1.0 / p)
            out = np.where(m[..., 0] > 0, out, 0.0)
        return out if out.ndim else float(out)

    def grad(self, x) -> np.ndarray:
        """A (sub)gradient of the norm, real-gradient convention.

        At non-smooth points the element selected by the convention
        ``phase(0) = 0`` is returned.
        """
        x = self._check(x)
        if self.kind == "custom":
            if self._grad is not None:
                return self._grad(x)
            return self._fd_grad(x)
        w = self.weights
        a = np.abs(x) * w
        ph = phase(x)
        p = self.p
        if p == 1:
            return w * ph
        if np.isinf(p):
            m = a.max(axis=-1, keepdims=True)
            hit = (a == m) & (m > 0)
            first = np.cumsum(hit, axis=-1) == 1
            return np.where(hit & first, w * ph, 0.0)
        nrm = np.asarray(self.norm(x))[..., None]
        safe = np.where(nrm > 0, nrm, 1.0)
        g = w * (a / safe) ** (p - 1) * ph
        return np.where(nrm > 0, g, 0.0)

    def norm_grad(self, x):
        return self.norm(x), self.grad(x)

    def _fd_grad(self, x: np.ndarray) -> np.ndarray:
        flat = x.reshape(-1, self.dim)
        out = np.zeros_like(flat)
        for r, row in enumerate(flat):
            h = 1e-6 * (1.0 + float(np.asarray(self._func(row))))
            for i in range(self.dim):
                for unit in (1.0, 1j):
                    e = np.zeros(self.dim, dtype=complex)
                    e[i] = unit * h
                    d = (float(self._func(row + e)) - float(self._func(row - e))) / (2 * h)
                    out[r, i] += unit * d
        return out.reshape(x.shape)

    # -- duality -----------------------------------------------------------

    def dual(self) -> "NormedSpace":
        if self.kind != "lp":
            raise NotImplementedError("closed-form dual only for lp norms")
        return NormedSpace(self.dim, "lp", conjugate_exponent(self.p), 1.0 / self.weights)

    def unit_norms(self) -> np.ndarray:
        """Norms of the coordinate vectors e_1, ..., e_n."""
        if self.kind == "lp":
            return self.weights.copy()
        return np.asarray(self.norm(np.eye(self.dim, dtype=complex)), dtype=float)


def lp_space(dim: int, p: float = 2.0, weights=None) -> NormedSpace:
    return NormedSpace(dim, "lp", p, weights)


def custom_space(dim: int, func, grad=None, name: str | None = None) -> NormedSpace:
    return NormedSpace(dim, "custom", func=func, grad=grad, name=name)


@dataclass
class Couple:
    """Two norms on a common C^n."""

    space0: NormedSpace
    space1: NormedSpace

    def __post_init__(self):
        if self.space0.dim != self.space1.dim:
            raise ValueError("couple spaces must share a dimension")

    @property
    def dim(self) -> int:
        return self.space0.dim

    def dual(self) -> "Couple":
        return Couple(self.space0.dual(), self.space1.dual())


def norm_eval(space: NormedSpace, x) -> float:
    return float(space.norm(np.asarray(x, dtype=complex)))


def dual_norm_eval(space: NormedSpace, f, method: str = "auto") -> float:
    """``sup {Re <f, x> : ||x|| <= 1}``.

    ``method`` is ``"closed"`` (lp only), ``"ascent"`` or ``"auto"``.
    """
    f = space._check(f)
    if method == "auto":
        method = "closed" if space.dual_closed_form else "ascent"
    if method == "closed":
        return float(space.dual().norm(f))
    if method == "ascent":
        return dual_norm_ascent(space, f)[0]
    raise ValueError(f"unknown method {method!r}")


def dual_norm_ascent(space: NormedSpace, f, starts: int = 4, seed: int = 0,
                     max_iter: int = 2000, tol: float = 1e-12) -> tuple[float, SolveReport]:
    """Maximize ``Re <f, x> / ||x||`` by gradient ascent with Armijo backtracking."""
    import time

    f = space._check(f).astype(complex)
    t0 = time.perf_counter()
    if not np.any(f):
        return 0.0, SolveReport(0.0, 0, 0.0, 0.0, True, 0.0)
    rng = np.random.default_rng(seed)

    def ratio(x):
        n = float(space.norm(x))
        return float(np.real(np.dot(f, x))) / n, n

    best, best_it, best_gn, all_conv = -np.inf, 0, np.inf, True
    inits = [np.conj(f)] + [rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)
                            for _ in range(starts - 1)]
    for x in inits:
        x = x / float(space.norm(x))
        h, n = ratio(x)
        step, it, gn = 1.0, 0, np.inf
        while it < max_iter:
            # x stays on the unit sphere, so the gradient of h simplifies
            gx = np.conj(f) - h * space.grad(x)
            gn = float(np.linalg.norm(gx))
            if gn <= tol * (1 + abs(h)):
                break
            while step > 1e-18:
                xn = x + step * gx
                xn = xn / float(space.norm(xn))
                hn, _ = ratio(xn)
                if hn >= h + 1e-4 * step * gn * gn:
                    break
                step *= 0.5
            else:
                break
            x, h = xn, hn
            step = min(step * 2.0, 1e6)
            it += 1
        all_conv = all_conv and gn <= 1e-6 * (1 + abs(h))
        if h > best:
            best, best_it, best_gn = h, it, gn
    rep = SolveReport(best, best_it, best_gn, 0.0, all_conv, time.perf_counter() - t0)
    return float(best), rep


def cap2_norm(couple: Couple, x) -> float:
    x = np.asarray(x, dtype=complex)
    a = norm_eval(couple.space0, x)
    b = norm_eval(couple.space1, x)
    return float(np.hypot(a, b))


def sum2_norm(couple: Couple, x, opts: SolverOptions | dict | None = None):
    """``inf_u (||u||_0^2 + ||x - u||_1^2)^(1/2)`` with the minimizing ``u``."""
    opts = SolverOptions.from_dict(opts)
    x = couple.space0._check(x).astype(complex)
    couple.space1._check(x)
    if not np.any(x):
        return 0.0, np.zeros_like(x), SolveReport(0.0, 0, 0.0, 0.0, True, 0.0)
    s0, s1 = couple.space0, couple.space1

    def fg(u):
        n0, g0 = s0.norm_grad(u)
        n1, g1 = s1.norm_grad(x - u)
        return n0 * n0 + n1 * n1, 2 * n0 * g0 - 2 * n1 * g1

    d = s0.unit_norms() ** 2 + s1.unit_norms() ** 2
    smooth = s0.smooth and s1.smooth
    # start from the better endpoint split
    u0 = x.copy() if norm_eval(s0, x) <= norm_eval(s1, x) else np.zeros_like(x)
    if s0.kind == "lp" and s1.kind == "lp" and s0.p == 2 and s1.p == 2:
        w0, w1 = s0.weights ** 2, s1.weights ** 2
        u0 = x * w1 / (w0 + w1)
    u, val, rep = minimize(fg, u0, lambda g: g / d, opts, smooth=smooth)
    value = float(np.sqrt(max(val, 0.0)))
    rep.value = value
    return value, u, rep
