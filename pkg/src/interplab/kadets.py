"""Division by ``e^z - e^s``, the constants ``C_s`` and the Kadets-distance bound."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hardy import PeriodicFunction, pf_eval, pf_h2_norm
from .sequences import TruncSeq
from .solver import check_strip

GRID_RE = (0.1, 0.3, 0.5, 0.7, 0.9)
GRID_IM = (0.0, 0.7, 1.4, 2.1, 2.8)


@dataclass
class DivisionResult:
    g: PeriodicFunction
    cs_bound: float
    reconstruction_defect: float


def _size(f: PeriodicFunction) -> float:
    """``pf_h2_norm`` when a couple is attached, else the l2 size of the coefficients."""
    if f.sc is not None:
        return pf_h2_norm(f)
    return float(np.linalg.norm(f.coeffs.data))


def multiply(f: PeriodicFunction, s) -> PeriodicFunction:
    """``(e^z - e^s) f(z)``; the window grows by one index."""
    s = complex(s)
    K = f.K + 1
    h = f.coeffs.pad(K).data
    shifted = np.zeros_like(h)
    shifted[1:] = h[:-1]
    y = np.exp(f.z0) * shifted - np.exp(s) * h
    return PeriodicFunction(f.z0, TruncSeq(y), f.sc)


def divide_vanishing(f: PeriodicFunction, s, *, subtract: bool = False,
                     tol: float = 1e-8) -> DivisionResult:
    """``g = f / (e^z - e^s)`` for ``f`` vanishing at ``s``.

    With base point ``t`` the coefficients satisfy ``y_k = e^t c_{k-1} - e^s
    c_k``. A finitely supported ``f`` with ``f(s) = 0`` is an exact multiple,
    so the quotient is found by running this recurrence in whichever
    direction damps rounding errors (downward when ``Re s < Re t``).
    """
    s = check_strip(s)
    size = _size(f)
    fs = pf_eval(f, s)
    resid = float(np.linalg.norm(fs))
    if resid > tol * max(size, np.finfo(float).tiny):
        if not subtract:
            raise ValueError(f"f does not vanish at s: |f(s)| = {resid:.3e}, ||f|| = {size:.3e}")
        c = f.coeffs.copy()
        c[0] = c[0] - fs
        f = PeriodicFunction(f.z0, c, f.sc)
        size = _size(f)
    y = f.coeffs.data
    K = f.K
    et, es = np.exp(f.z0), np.exp(s)
    c = np.zeros_like(y)
    if s.real < f.z0.real:
        # c_{k-1} = e^{-t} (y_k + e^s c_k), from c_K = 0
        nxt = np.zeros(y.shape[1], dtype=complex)
        for r in range(2 * K, 0, -1):
            nxt = (y[r] + es * nxt) / et
            c[r - 1] = nxt
    else:
        # c_k = e^{-s} (e^t c_{k-1} - y_k), from c_{-K-1} = 0
        prev = np.zeros(y.shape[1], dtype=complex)
        for r in range(2 * K + 1):
            prev = (et * prev - y[r]) / es
            c[r] = prev
        c[-1] = 0.0  # the top coefficient is zero for an exact multiple
    g = PeriodicFunction(f.z0, TruncSeq(c), f.sc)
    return DivisionResult(g, cs_constant(s), reconstruction_defect(f, g, s))


def reconstruction_defect(f: PeriodicFunction, g: PeriodicFunction, s) -> float:
    """Max of ``||(e^z - e^s) g(z) - f(z)||`` over a 5x5 strip grid."""
    es = np.exp(complex(s))
    worst = 0.0
    for a in GRID_RE:
        for b in GRID_IM:
            z = complex(a, b)
            d = (np.exp(z) - es) * pf_eval(g, z) - pf_eval(f, z)
            worst = max(worst, float(np.linalg.norm(d)))
    return worst


def cs_constant(s) -> float:
    """``max{1/(e^sigma - 1), 1/(e - e^sigma)}`` with ``sigma = Re s``."""
    sigma = complex(s).real
    if not 0 < sigma < 1:
        raise ValueError("need 0 < Re s < 1")
    return float(max(1.0 / np.expm1(sigma), 1.0 / (np.e - np.exp(sigma))))


def cs_sup(a: float, b: float) -> float:
    """``sup_{a <= Re s <= b} C_s``; each branch is monotone, so the endpoints suffice."""
    return max(cs_constant(a), cs_constant(b))


def perturb_kernel(f: PeriodicFunction, s, t, tol: float = 1e-6):
    """Move a unit-norm ``f`` with ``f(s) = 0`` to a unit-norm ``h`` with ``h(t) = 0``.

    Returns ``(h, ||f - h||)``; raises if the distance exceeds
    ``2 |e^t - e^s| C_s + tol``.
    """
    s, t = check_strip(s), check_strip(t)
    if f.sc is None:
        raise ValueError("perturb_kernel needs a couple to measure norms")
    nf = pf_h2_norm(f)
    if abs(nf - 1.0) > tol:
        raise ValueError(f"f must have norm 1, got {nf:.8f}")
    if t == s:
        return f, 0.0
    g = divide_vanishing(f, s).g
    h = multiply(g, t)
    h = h / pf_h2_norm(h)
    defect = pf_h2_norm(f - h)
    bound = 2.0 * abs(np.exp(t) - np.exp(s)) * cs_constant(s)
    if defect > bound + tol:
        raise AssertionError(f"perturbation {defect:.6e} exceeds the bound {bound:.6e}")
    return h, float(defect)


def kadets_bound(s, t) -> float:
    """``4 |e^t - e^s| max{C_s, C_t}``."""
    s, t = complex(s), complex(t)
    return float(4.0 * abs(np.exp(t) - np.exp(s)) * max(cs_constant(s), cs_constant(t)))


def random_kernel_function(sc, s, z0, rng: np.random.Generator, K: int | None = None,
                           normalize: bool = True) -> tuple[PeriodicFunction, PeriodicFunction]:
    """``((e^z - e^s) h, h)`` for a random ``h`` with decaying coefficients."""
    K = sc.K if K is None else K
    n = sc.dim
    k = np.arange(-(K - 1), K)
    amp = np.exp(-0.5 * np.abs(k))[:, None] * np.exp(k * (complex(z0).real - 0.5))[:, None]
    data = np.zeros((2 * K - 1, n), dtype=complex)
    data[:] = amp * (rng.standard_normal((2 * K - 1, n)) + 1j * rng.standard_normal((2 * K - 1, n)))
    h = PeriodicFunction(z0, TruncSeq(data), sc)
    f = multiply(h, s)
    if normalize:
        c = pf_h2_norm(f)
        f, h = f / c, h / c
    return f, h
