"""2*pi*i-periodic analytic functions in coefficient form.

A ``PeriodicFunction`` with base point ``z0`` and coefficients ``x_k``
represents ``f(z) = sum_k e^{k(z - z0)} x_k``. The coefficient sequence is
the canonical data; boundary values are derived.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .sequences import StructuredCouple, TruncSeq
from .solver import check_strip, objective


@dataclass(frozen=True)
class PeriodicFunction:
    z0: complex
    coeffs: TruncSeq
    sc: StructuredCouple | None = None

    def __post_init__(self):
        object.__setattr__(self, "z0", check_strip(self.z0))

    @property
    def K(self) -> int:
        return self.coeffs.K

    def __call__(self, z) -> np.ndarray:
        return pf_eval(self, z)

    def __add__(self, other: "PeriodicFunction") -> "PeriodicFunction":
        other = rebase(other, self.z0)
        return PeriodicFunction(self.z0, self.coeffs + other.coeffs, self.sc)

    def __sub__(self, other: "PeriodicFunction") -> "PeriodicFunction":
        other = rebase(other, self.z0)
        return PeriodicFunction(self.z0, self.coeffs - other.coeffs, self.sc)

    def __mul__(self, c) -> "PeriodicFunction":
        return PeriodicFunction(self.z0, self.coeffs * c, self.sc)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "PeriodicFunction":
        return PeriodicFunction(self.z0, self.coeffs / c, self.sc)


def _scaled_terms(coeffs: TruncSeq, shift: complex) -> tuple[np.ndarray, float]:
    """Terms ``e^{k shift} x_k`` divided by ``e^m``, with the common log-scale ``m``."""
    k = coeffs.indices.astype(float)
    data = coeffs.data
    nz = np.any(data != 0, axis=1)
    if not np.any(nz):
        return np.zeros_like(data), 0.0
    expo = k * shift.real
    m = float(expo[nz].max())
    factor = np.exp(expo - m) * np.exp(1j * k * shift.imag)
    return factor[:, None] * data, m


def pf_eval(f: PeriodicFunction, z) -> np.ndarray:
    """``sum_k e^{k(z - z0)} x_k`` with the largest exponent factored out."""
    terms, m = _scaled_terms(f.coeffs, complex(z) - f.z0)
    return terms.sum(axis=0) * np.exp(m)


def pf_h2_norm(f: PeriodicFunction, sc: StructuredCouple | None = None) -> float:
    """``(||x||^2_{S0(e^{-z0})} + ||x||^2_{S1(e^{1-z0})})^(1/2)``."""
    sc = sc or f.sc
    if sc is None:
        raise ValueError("need a structured couple to measure the function")
    if not np.any(f.coeffs.data):
        return 0.0
    return objective(sc, f.coeffs, f.z0)


def rebase(f: PeriodicFunction, z1) -> PeriodicFunction:
    """The same function with coefficients relative to base point ``z1``."""
    z1 = check_strip(z1)
    if z1 == f.z0:
        return f
    k = f.coeffs.indices
    # coefficients' magnitudes stay representable for |Re(z1 - z0)| < 1 and
    # the radii used here; the log-scale guard lives in pf_eval
    w = np.exp(k * (z1 - f.z0))
    return PeriodicFunction(z1, TruncSeq(w[:, None] * f.coeffs.data), f.sc)


def fourier_extract(f: PeriodicFunction, z, k: int, M: int | None = None) -> np.ndarray:
    """Trapezoid estimate of ``(1/2pi) int_0^{2pi} f(z + it) e^{-ikt} dt``."""
    K = f.K
    if M is None:
        M = 4 * K + 4
    if M < 4 * K + 4:
        warnings.warn(f"M={M} < 4K+4 may alias the coefficient of index {k}", stacklevel=2)
    t = 2 * np.pi * np.arange(M) / M
    vals = np.array([pf_eval(f, complex(z) + 1j * tj) for tj in t])
    return (np.exp(-1j * k * t)[:, None] * vals).mean(axis=0)


def boundary_values(f: PeriodicFunction, re: float, M: int) -> np.ndarray:
    """Samples ``f(re + i t_j)`` at ``t_j = 2 pi j / M``."""
    t = 2 * np.pi * np.arange(M) / M
    return np.array([pf_eval(f, re + 1j * tj) for tj in t])
