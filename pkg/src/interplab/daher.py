"""Optimal functions, the sphere maps ``U_{z,w}`` and continuity experiments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .banach import cap2_norm, lp_space, phase
from .hardy import PeriodicFunction, pf_eval, pf_h2_norm
from .optim import SolveReport, SolverOptions
from .sequences import StructuredCouple, structured_couple
from .solver import check_strip, interp_norm


@dataclass
class OptimalFunction:
    x: np.ndarray
    z0: complex
    f: PeriodicFunction
    report: SolveReport

    @property
    def norm(self) -> float:
        return self.report.value


def gamma(sc: StructuredCouple, x, z0, opts=None) -> OptimalFunction:
    """The norm-attaining function with ``f(z0) = x``."""
    z0 = check_strip(z0)
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    if not np.any(x):
        raise ValueError("the optimal function is defined for nonzero x")
    _, dec, rep = interp_norm(sc, x, z0, opts)
    return OptimalFunction(x, z0, PeriodicFunction(z0, dec.seq, sc), rep)


def daher_map(sc: StructuredCouple, x, z, w, opts=None, *, return_report: bool = False):
    """``U_{z,w}(x) = Gamma_z(x)(w)``, extended to all of C^n by homogeneity.

    The input is scaled onto the unit sphere at ``z``, mapped, and the output
    rescaled by the input norm.
    """
    z, w = check_strip(z), check_strip(w)
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    if not np.any(x):
        out = np.zeros_like(x)
        return (out, SolveReport(0.0, 0, 0.0, 0.0, True, 0.0)) if return_report else out
    val, dec, rep = interp_norm(sc, x, z, opts)
    if w == z:
        out = x.copy()
    else:
        # the optimal decomposition of x/val is dec/val, so homogeneity is exact
        out = pf_eval(PeriodicFunction(z, dec.seq, sc), w)
    return (out, rep) if return_report else out


def sphere_defect(sc: StructuredCouple, x, z, w, opts=None) -> float:
    """``| ||U_{z,w}(x)||_{w,2} - 1 |`` for ``x`` scaled onto the sphere at ``z``."""
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    nx = interp_norm(sc, x, z, opts)[0]
    u = daher_map(sc, x / nx, z, w, opts)
    return abs(interp_norm(sc, u, w, opts)[0] - 1.0)


def round_trip_error(sc: StructuredCouple, x, z, w, opts=None) -> float:
    """``|| U_{w,z}(U_{z,w}(x) / ||U_{z,w}(x)||_{w,2}) - x ||`` in the intersection norm.

    ``x`` is first scaled onto the unit sphere at ``z``.
    """
    z, w = check_strip(z), check_strip(w)
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    if w == z:
        return 0.0
    x = x / interp_norm(sc, x, z, opts)[0]
    u = daher_map(sc, x, z, w, opts)
    u = u / interp_norm(sc, u, w, opts)[0]
    back = daher_map(sc, u, w, z, opts)
    return cap2_norm(sc.couple, back - x)


def random_sphere_point(sc: StructuredCouple, z, rng: np.random.Generator, opts=None) -> np.ndarray:
    x = rng.standard_normal(sc.dim) + 1j * rng.standard_normal(sc.dim)
    return x / interp_norm(sc, x, z, opts)[0]


def modulus_experiment(sc: StructuredCouple, z, w, pairs: int, seed: int = 0, opts=None,
                       scales=(1e-3, 1.0)) -> list[dict]:
    """Distances for random pairs on the unit sphere at ``z``.

    Each row has ``dist_in = ||x - y||_{z,2}``, ``dist_h2 = ||f_x - f_y||``,
    ``dist_out = ||U x - U y||_{w,2}`` and ``midpoint_gap``, the amount by which
    ``pf_h2_norm((f_x + f_y)/2)`` exceeds ``||(x + y)/2||_{z,2}`` (nonnegative
    up to solver tolerance). Perturbation sizes are log-uniform in ``scales``.
    """
    if pairs < 1:
        raise ValueError("need at least one pair")
    z, w = check_strip(z), check_strip(w)
    rng = np.random.default_rng(seed)
    lo, hi = np.log(scales[0]), np.log(scales[1])
    rows = []
    for _ in range(pairs):
        x = random_sphere_point(sc, z, rng, opts)
        r = np.exp(rng.uniform(lo, hi))
        e = rng.standard_normal(sc.dim) + 1j * rng.standard_normal(sc.dim)
        y = x + r * e / np.linalg.norm(e)
        y = y / interp_norm(sc, y, z, opts)[0]
        rows.append(_pair_row(sc, x, y, z, w, opts))
    return rows


def _pair_row(sc, x, y, z, w, opts) -> dict:
    gx, gy = gamma(sc, x, z, opts), gamma(sc, y, z, opts)
    fx, fy = gx.f, gy.f
    ux, uy = pf_eval(fx, w), pf_eval(fy, w)
    mid = (fx + fy) / 2.0
    mid_norm = interp_norm(sc, (x + y) / 2.0, z, opts)[0]
    return {
        "re_z": z.real, "im_z": z.imag, "re_w": w.real, "im_w": w.imag, "K": sc.K,
        "dist_in": interp_norm(sc, x - y, z, opts)[0],
        "dist_h2": pf_h2_norm(fx - fy, sc),
        "dist_out": interp_norm(sc, ux - uy, w, opts)[0],
        "midpoint_gap": pf_h2_norm(mid, sc) - mid_norm,
        "converged": gx.report.converged and gy.report.converged,
    }


def modulus_envelope(rows: list[dict], bins) -> np.ndarray:
    """Upper envelope of ``dist_out`` over ``dist_in`` bins (``nan`` for empty bins)."""
    bins = np.asarray(bins, dtype=float)
    d_in = np.array([r["dist_in"] for r in rows])
    d_out = np.array([r["dist_out"] for r in rows])
    env = np.full(len(bins) - 1, np.nan)
    idx = np.digitize(d_in, bins) - 1
    for b in range(len(env)):
        sel = idx == b
        if np.any(sel):
            env[b] = d_out[sel].max()
    return env


def mazur_map(p: float, q: float, x) -> np.ndarray:
    """Coordinatewise ``phase(x_i) |x_i|^{p/q}``, normalized in lp(q)."""
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    if not np.any(x):
        raise ValueError("the Mazur map is defined for nonzero x")
    x = x / lp_space(x.size, p).norm(x)
    y = phase(x) * np.abs(x) ** (p / q)
    return y / lp_space(x.size, q).norm(y)


def interpolated_exponent(p0: float, p1: float, t: float) -> float:
    """``p`` with ``1/p = (1 - t)/p0 + t/p1``."""
    return 1.0 / ((1.0 - t) / p0 + t / p1)


def mazur_couple(n: int, p0: float, p1: float, K: int = 16, M: int | None = None) -> StructuredCouple:
    """``(l^n_{p0}, l^n_{p1})`` with fourier structures of matching exponents."""
    return structured_couple(lp_space(n, p0), lp_space(n, p1), "fourier", K=K,
                             params0={"M": M}, params1={"M": M})


def vector_angle(a, b) -> float:
    """Angle in ``[0, pi]`` between two vectors of C^n viewed as R^{2n}."""
    c = np.real(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def mazur_compare(sc: StructuredCouple, x, theta: float, eta: float, opts=None) -> tuple[float, float]:
    """Angle between ``U_{theta,eta}(x)`` and the Mazur map, and their norm ratio.

    Both maps are fed the same direction; the ratio compares
    ``||U(x)||_{p(eta)} / ||x||_{p(theta)}`` for ``x`` on the unit sphere at
    ``theta`` with the exact 1 of the Mazur map.
    """
    s0, s1 = sc.couple.space0, sc.couple.space1
    if s0.kind != "lp" or s1.kind != "lp":
        raise ValueError("the Mazur comparison needs an lp couple")
    p_t = interpolated_exponent(s0.p, s1.p, theta)
    p_e = interpolated_exponent(s0.p, s1.p, eta)
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    xs = x / interp_norm(sc, x, theta, opts)[0]
    u = daher_map(sc, xs, theta, eta, opts)
    m = mazur_map(p_t, p_e, x)
    ratio = lp_space(x.size, p_e).norm(u) / lp_space(x.size, p_t).norm(xs)
    return vector_angle(u, m), float(ratio)


def transfer_errors(sc: StructuredCouple, x, z, w, opts=None) -> dict:
    """Sphere defect and round-trip error of one point, sharing the solves.

    ``x`` is scaled onto the unit sphere at ``z``; the round trip returns
    through the normalized image.
    """
    z, w = check_strip(z), check_strip(w)
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    x = x / interp_norm(sc, x, z, opts)[0]
    u, rep = daher_map(sc, x, z, w, opts, return_report=True)
    nu, _, rep_u = interp_norm(sc, u, w, opts)
    back = daher_map(sc, u / nu, w, z, opts)
    return {"sphere_defect": abs(nu - 1.0), "image_norm": nu,
            "round_trip": cap2_norm(sc.couple, back - x),
            "converged": rep.converged and rep_u.converged}
