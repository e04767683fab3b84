"""Sequence structures on a Banach space and finitely supported sequences.

A ``TruncSeq`` stores the entries ``x_{-K}, ..., x_K`` of a Z-indexed
sequence of vectors in a ``(2K+1, n)`` complex array. Structure norms are
translation invariant, so the ``norm`` methods take raw row-ordered arrays;
only weighted norms need absolute indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gamma as _gamma

import numpy as np

from .banach import Couple, NormedSpace, conjugate_exponent, phase

EXACT_RADEMACHER_MAX = 20


class TruncSeq:
    """Finitely supported Z-indexed sequence of vectors in C^n."""

    __slots__ = ("data",)

    def __init__(self, data):
        data = np.array(data, dtype=complex)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2 or data.shape[0] % 2 != 1:
            raise ValueError("TruncSeq data must have shape (2K+1, n)")
        self.data = data

    @classmethod
    def zeros(cls, K: int, n: int) -> "TruncSeq":
        return cls(np.zeros((2 * K + 1, n), dtype=complex))

    @classmethod
    def delta(cls, K: int, k: int, x) -> "TruncSeq":
        x = np.atleast_1d(np.asarray(x, dtype=complex))
        out = cls.zeros(K, x.size)
        out[k] = x
        return out

    @classmethod
    def from_dict(cls, K: int, entries: dict, n: int) -> "TruncSeq":
        out = cls.zeros(K, n)
        for k, x in entries.items():
            out[k] = x
        return out

    @property
    def K(self) -> int:
        return (self.data.shape[0] - 1) // 2

    @property
    def n(self) -> int:
        return self.data.shape[1]

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    def _row(self, k: int) -> int:
        if abs(k) > self.K:
            raise IndexError(f"index {k} outside [-{self.K}, {self.K}]")
        return k + self.K

    def __getitem__(self, k: int) -> np.ndarray:
        if abs(k) > self.K:
            return np.zeros(self.n, dtype=complex)
        return self.data[k + self.K]

    def __setitem__(self, k: int, x) -> None:
        self.data[self._row(k)] = x

    def copy(self) -> "TruncSeq":
        return TruncSeq(self.data.copy())

    def __repr__(self) -> str:
        return f"TruncSeq(K={self.K}, n={self.n})"

    def __add__(self, other: "TruncSeq") -> "TruncSeq":
        a, b = _align(self, other)
        return TruncSeq(a.data + b.data)

    def __sub__(self, other: "TruncSeq") -> "TruncSeq":
        a, b = _align(self, other)
        return TruncSeq(a.data - b.data)

    def __mul__(self, c) -> "TruncSeq":
        return TruncSeq(self.data * c)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "TruncSeq":
        return TruncSeq(self.data / c)

    def __neg__(self) -> "TruncSeq":
        return TruncSeq(-self.data)

    def pad(self, K: int) -> "TruncSeq":
        """Same sequence on a window of radius ``K`` (clipping if smaller)."""
        out = TruncSeq.zeros(K, self.n)
        m = min(K, self.K)
        out.data[K - m:K + m + 1] = self.data[self.K - m:self.K + m + 1]
        return out

    def shift(self, j: int) -> "TruncSeq":
        """``(x_{k+j})_k`` on the same window; mass moved outside is clipped."""
        out = TruncSeq.zeros(self.K, self.n)
        src = self.indices + j
        ok = np.abs(src) <= self.K
        out.data[ok] = self.data[src[ok] + self.K]
        return out

    def reflect(self) -> "TruncSeq":
        return TruncSeq(self.data[::-1].copy())

    def sum(self) -> np.ndarray:
        return self.data.sum(axis=0)

    def sup_norm(self, base: NormedSpace) -> float:
        return float(np.max(base.norm(self.data)))

    def l1_norm(self, base: NormedSpace) -> float:
        return float(np.sum(base.norm(self.data)))

    def allclose(self, other: "TruncSeq", atol: float = 1e-12) -> bool:
        a, b = _align(self, other)
        return bool(np.allclose(a.data, b.data, atol=atol, rtol=0))

    def weighted(self, a: complex) -> "TruncSeq":
        return TruncSeq(power_weights(a, self.K)[:, None] * self.data)


def _align(a: TruncSeq, b: TruncSeq) -> tuple[TruncSeq, TruncSeq]:
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    K = max(a.K, b.K)
    return (a if a.K == K else a.pad(K)), (b if b.K == K else b.pad(K))


def power_weights(a: complex, K: int) -> np.ndarray:
    """``a^k`` for ``k = -K..K``."""
    if a == 0:
        raise ValueError("weight base must be nonzero")
    k = np.arange(-K, K + 1)
    return np.exp(k * np.log(complex(a)))


def exp_weights(c: complex, K: int) -> np.ndarray:
    """``e^{k c}`` for ``k = -K..K``."""
    k = np.arange(-K, K + 1)
    return np.exp(k * complex(c))


# ---------------------------------------------------------------------------
# structures


class SequenceStructure:
    """Norm on finitely supported C^n-valued sequences over a base space."""

    kind = "abstract"
    sampled = False

    def __init__(self, base: NormedSpace, p: float = 2.0):
        self.base = base
        self.p = float(p)

    @property
    def smooth(self) -> bool:
        return self.base.smooth and 1 < self.p < np.inf

    def _check(self, arr) -> np.ndarray:
        arr = np.asarray(arr.data if isinstance(arr, TruncSeq) else arr, dtype=complex)
        if arr.ndim != 2 or arr.shape[1] != self.base.dim:
            raise ValueError(f"dimension mismatch: sequence entries must lie in C^{self.base.dim}")
        return arr

    def norm(self, arr) -> float:
        return self.norm_grad(arr)[0]

    def norm_grad(self, arr) -> tuple[float, np.ndarray]:
        raise NotImplementedError

    def stderr(self, arr) -> float:
        return 0.0

    def dual(self) -> "SequenceStructure":
        raise NotImplementedError(f"no closed-form dual for {self.kind} structures")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "p": self.p}

    def __repr__(self) -> str:
        return f"{type(self).__name__}(p={self.p:g}, base={self.base!r})"


class LpStructure(SequenceStructure):
    """``(sum_k ||x_k||^p)^(1/p)``."""

    kind = "lp"

    def norm(self, arr) -> float:
        a = np.asarray(self.base.norm(self._check(arr)), dtype=float)
        return float(_pnorm(a, self.p))

    def norm_grad(self, arr):
        arr = self._check(arr)
        a = np.asarray(self.base.norm(arr), dtype=float)
        nrm = float(_pnorm(a, self.p))
        gb = self.base.grad(arr)
        if nrm == 0:
            return 0.0, np.zeros_like(arr)
        p = self.p
        if p == 1:
            c = np.ones_like(a)
        elif np.isinf(p):
            c = (a == a.max()).astype(float)
            c = c * (np.cumsum(c) == 1)
        else:
            c = (a / nrm) ** (p - 1)
        return nrm, c[:, None] * gb

    def dual(self):
        return LpStructure(self.base.dual(), conjugate_exponent(self.p))


def _pnorm(a: np.ndarray, p: float) -> float:
    if a.size == 0:
        return 0.0
    if np.isinf(p):
        return float(a.max())
    m = float(a.max())
    if m == 0:
        return 0.0
    return m * float(np.sum((a / m) ** p)) ** (1.0 / p)


class FourierStructure(SequenceStructure):
    """L^p norm (normalized Haar measure) of ``t -> sum_k x_k e^{ikt}``.

    Evaluated with the M-point trapezoid rule; ``M=None`` picks
    ``max(16, 8 * len)`` for a sequence of ``len`` rows.
    """

    kind = "fourier"

    def __init__(self, base: NormedSpace, p: float = 2.0, M: int | None = None):
        super().__init__(base, p)
        self.M = None if M is None else int(M)

    def quad_points(self, length: int) -> int:
        M = self.M if self.M is not None else max(16, 8 * length)
        if M < length:
            raise ValueError(f"M={M} aliases a sequence with {length} entries")
        return M

    def samples(self, arr: np.ndarray) -> np.ndarray:
        """Boundary values f(t_j), t_j = 2 pi j / M, rows indexed from -L."""
        m = arr.shape[0]
        L = (m - 1) // 2
        M = self.quad_points(m)
        buf = np.zeros((M, arr.shape[1]), dtype=complex)
        idx = np.arange(-L, m - L) % M
        np.add.at(buf, idx, arr)
        return np.fft.ifft(buf, axis=0) * M

    def norm_grad(self, arr):
        arr = self._check(arr)
        m = arr.shape[0]
        L = (m - 1) // 2
        vals = self.samples(arr)
        M = vals.shape[0]
        a = np.asarray(self.base.norm(vals), dtype=float)
        p = self.p
        if np.isinf(p):
            nrm = float(a.max())
        else:
            nrm = _pnorm(a, p) * M ** (-1.0 / p)
        if nrm == 0:
            return 0.0, np.zeros_like(arr)
        gb = self.base.grad(vals)
        if np.isinf(p):
            c = (a == a.max()).astype(float)
            c = c * (np.cumsum(c) == 1)
        else:
            c = (a / nrm) ** (p - 1) / M
        G = c[:, None] * gb
        # adjoint of the synthesis map: sum_j e^{-ik t_j} G_j
        Gh = np.fft.fft(G, axis=0)
        idx = np.arange(-L, m - L) % M
        return nrm, Gh[idx]

    def dual(self):
        return FourierStructure(self.base.dual(), conjugate_exponent(self.p), self.M)

    def to_dict(self):
        return {"kind": self.kind, "p": self.p, "M": self.M}


@lru_cache(maxsize=32)
def _all_signs(m: int) -> np.ndarray:
    # first sign fixed to +1: a global sign flip leaves the norm unchanged
    if m == 0:
        return np.ones((1, 0))
    codes = np.arange(2 ** (m - 1))[:, None]
    bits = (codes >> np.arange(m - 1)) & 1
    return np.hstack([np.ones((codes.shape[0], 1)), 1.0 - 2.0 * bits])


class _AveragedStructure(SequenceStructure):
    """``(E ||sum_k g_k x_k||^p)^(1/p)`` for a family of random coefficients."""

    scale = 1.0

    def coefficients(self, m: int) -> tuple[np.ndarray, bool]:
        raise NotImplementedError

    def _moments(self, arr):
        G, exact = self.coefficients(arr.shape[0])
        vals = G @ arr
        a = np.asarray(self.base.norm(vals), dtype=float)
        return G, vals, a, exact

    def norm_grad(self, arr):
        arr = self._check(arr)
        G, vals, a, _ = self._moments(arr)
        S = G.shape[0]
        p = self.p
        nrm = _pnorm(a, p) * S ** (-1.0 / p) / self.scale
        if nrm == 0:
            return 0.0, np.zeros_like(arr)
        gb = self.base.grad(vals)
        c = (a / (nrm * self.scale)) ** (p - 1) / (S * self.scale)
        grad = np.conj(G).T @ (c[:, None] * gb)
        return nrm, grad

    def stderr(self, arr) -> float:
        arr = self._check(arr)
        G, vals, a, exact = self._moments(arr)
        if exact:
            return 0.0
        p = self.p
        y = a ** p
        m = y.mean()
        if m == 0:
            return 0.0
        se_mean = y.std(ddof=1) / np.sqrt(y.size)
        return float((1.0 / p) * m ** (1.0 / p - 1.0) * se_mean / self.scale)


class RademacherStructure(_AveragedStructure):
    """Rademacher averages; exact enumeration up to 20 indices, else Monte Carlo."""

    kind = "rademacher"
    sampled = True

    def __init__(self, base, p=2.0, mode: str = "auto", samples: int = 4096, seed: int | None = None):
        super().__init__(base, p)
        if mode not in ("auto", "exact", "monte_carlo"):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.samples = int(samples)
        self.seed = seed

    def coefficients(self, m):
        exact = self.mode == "exact" or (self.mode == "auto" and m <= EXACT_RADEMACHER_MAX)
        if exact:
            return _all_signs(m), True
        if self.seed is None:
            raise ValueError("Monte Carlo Rademacher norms need a seed")
        return _mc_signs(m, self.samples, self.seed), False

    def to_dict(self):
        return {"kind": self.kind, "p": self.p, "mode": self.mode,
                "samples": self.samples, "seed": self.seed}


@lru_cache(maxsize=32)
def _mc_signs(m: int, samples: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed))
    return 1.0 - 2.0 * rng.integers(0, 2, size=(samples, m)).astype(float)


@lru_cache(maxsize=32)
def _mc_gauss(m: int, samples: int, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed))
    return (rng.standard_normal((samples, m)) + 1j * rng.standard_normal((samples, m))) / np.sqrt(2)


class GaussianStructure(_AveragedStructure):
    """Standard complex Gaussian averages (Monte Carlo only).

    Divided by ``(E|g|^p)^(1/p) = Gamma(1 + p/2)^(1/p)`` so that a single
    entry has norm exactly ``||x||``.
    """

    kind = "gaussian"
    sampled = True

    def __init__(self, base, p=2.0, samples: int = 4096, seed: int | None = None):
        super().__init__(base, p)
        self.samples = int(samples)
        self.seed = seed
        self.scale = _gamma(1.0 + self.p / 2.0) ** (1.0 / self.p)

    def coefficients(self, m):
        if self.seed is None:
            raise ValueError("Gaussian norms need a seed")
        return _mc_gauss(m, self.samples, self.seed), False

    def to_dict(self):
        return {"kind": self.kind, "p": self.p, "samples": self.samples, "seed": self.seed}


class JamesStructure(SequenceStructure):
    """``(1/sqrt 2) sup_chains (sum ||x_{p_i} - x_{p_{i+1}}||^2)^(1/2)``.

    Chains may pass through the zero entries outside the window; one zero
    row on each side represents them.
    """

    kind = "james"

    def __init__(self, base: NormedSpace):
        super().__init__(base, 2.0)

    @property
    def smooth(self) -> bool:
        return False

    def norm_grad(self, arr):
        arr = self._check(arr)
        val, grad = james_batch(self.base, arr[None])
        return float(val[0]), grad[0]

    def to_dict(self):
        return {"kind": self.kind}


def james_batch(base: NormedSpace, arr: np.ndarray, with_grad: bool = True):
    """James norm (and a subgradient) for a batch ``(B, m, n)``.

    Dynamic program over the index DAG: ``best[j]`` is the largest sum of
    squared increments over chains ending at ``j``.
    """
    B, m, n = arr.shape
    z = np.zeros((B, 1, n), dtype=complex)
    x = np.concatenate([z, arr, z], axis=1)
    L = m + 2
    diff = x[:, :, None, :] - x[:, None, :, :]  # (B, i, j, n) = x_i - x_j
    dn = np.asarray(base.norm(diff), dtype=float).reshape(B, L, L)
    D = dn * dn
    best = np.zeros((B, L))
    pred = np.full((B, L), -1, dtype=int)
    for j in range(1, L):
        cand = best[:, :j] + D[:, :j, j]
        i = np.argmax(cand, axis=1)
        v = cand[np.arange(B), i]
        take = v > 0
        best[:, j] = np.where(take, v, 0.0)
        pred[:, j] = np.where(take, i, -1)
    end = np.argmax(best, axis=1)
    q = best[np.arange(B), end]
    val = np.sqrt(q / 2.0)
    if not with_grad:
        return val, None
    grad = np.zeros((B, L, n), dtype=complex)
    rows = np.arange(B)
    j = end.copy()
    active = pred[rows, j] >= 0
    while np.any(active):
        i = np.where(active, pred[rows, j], 0)
        d = x[rows, i] - x[rows, j]
        gd = base.grad(d) * (dn[rows, i, j] * active)[:, None]
        # d/dx of ||x_i - x_j||^2 = 2 ||.|| grad
        grad[rows, i] += 2 * gd
        grad[rows, j] -= 2 * gd
        j = np.where(active, i, j)
        active = active & (pred[rows, j] >= 0)
    safe = np.where(val > 0, val, 1.0)
    # d sqrt(q/2) = dq / (4 sqrt(q/2))
    grad = grad / (4.0 * safe)[:, None, None]
    grad[val == 0] = 0
    return val, grad[:, 1:-1]


def james_chain_enumeration(base: NormedSpace, arr: np.ndarray) -> float:
    """Brute-force James norm over every chain of length >= 2 (oracle)."""
    from itertools import combinations

    arr = np.asarray(arr, dtype=complex)
    z = np.zeros((1, arr.shape[1]), dtype=complex)
    x = np.concatenate([z, arr, z])
    L = x.shape[0]
    best = 0.0
    for r in range(2, L + 1):
        for chain in combinations(range(L), r):
            s = sum(float(base.norm(x[a] - x[b])) ** 2 for a, b in zip(chain, chain[1:]))
            best = max(best, s)
    return float(np.sqrt(best / 2.0))


def flat_exponent(s: SequenceStructure) -> float | None:
    """``p`` when the structure norm is one weighted lp norm over all entries."""
    if isinstance(s, LpStructure) and s.base.kind == "lp" and s.base.p == s.p and 1 < s.p < np.inf:
        return s.p
    return None


def make_structure(kind: str, base: NormedSpace, **params) -> SequenceStructure:
    kind = kind.lower()
    if kind == "lp":
        return LpStructure(base, params.get("p", 2.0))
    if kind == "fourier":
        return FourierStructure(base, params.get("p", 2.0), params.get("M"))
    if kind == "rademacher":
        return RademacherStructure(base, params.get("p", 2.0), params.get("mode") or "auto",
                                   params.get("samples") or 4096, params.get("seed"))
    if kind == "gaussian":
        return GaussianStructure(base, params.get("p", 2.0), params.get("samples") or 4096,
                                 params.get("seed"))
    if kind == "james":
        return JamesStructure(base)
    raise ValueError(f"unknown sequence structure {kind!r}")


@dataclass
class StructuredCouple:
    """A couple of norms, each with a sequence structure, and a truncation radius."""

    couple: Couple
    struct0: SequenceStructure
    struct1: SequenceStructure
    K: int

    def __post_init__(self):
        if self.struct0.base.dim != self.couple.dim or self.struct1.base.dim != self.couple.dim:
            raise ValueError("structure bases must match the couple")
        if self.K < 0:
            raise ValueError("K must be nonnegative")

    @property
    def dim(self) -> int:
        return self.couple.dim

    @property
    def smooth(self) -> bool:
        return self.struct0.smooth and self.struct1.smooth

    def with_K(self, K: int) -> "StructuredCouple":
        return StructuredCouple(self.couple, self.struct0, self.struct1, K)

    def dual(self) -> "StructuredCouple":
        d0, d1 = self.struct0.dual(), self.struct1.dual()
        return StructuredCouple(Couple(d0.base, d1.base), d0, d1, self.K)


def structured_couple(space0: NormedSpace, space1: NormedSpace, kind0: str = "lp",
                      kind1: str | None = None, K: int = 16, params0: dict | None = None,
                      params1: dict | None = None) -> StructuredCouple:
    """Convenience constructor; structure exponents default to the base exponents."""
    kind1 = kind0 if kind1 is None else kind1
    p0 = dict(params0 or {})
    p1 = dict(params1 or {})
    if space0.kind == "lp":
        p0.setdefault("p", space0.p)
    if space1.kind == "lp":
        p1.setdefault("p", space1.p)
    return StructuredCouple(Couple(space0, space1), make_structure(kind0, space0, **p0),
                            make_structure(kind1, space1, **p1), K)


# ---------------------------------------------------------------------------
# operations


def seq_norm(s: SequenceStructure, v: TruncSeq) -> float:
    return float(s.norm(v.data if isinstance(v, TruncSeq) else v))


def weighted_seq_norm(s: SequenceStructure, a: complex, v: TruncSeq) -> float:
    """``||(a^k x_k)||`` in ``s``."""
    if a == 0:
        raise ValueError("weight a must be nonzero")
    return float(s.norm(power_weights(a, v.K)[:, None] * v.data))


def random_seq(rng: np.random.Generator, K: int, n: int, support: int | None = None,
               real: bool = False) -> TruncSeq:
    data = rng.standard_normal((2 * K + 1, n))
    if not real:
        data = data + 1j * rng.standard_normal((2 * K + 1, n))
    if support is not None:
        mask = np.zeros(2 * K + 1, dtype=bool)
        mask[K - support:K + support + 1] = True
        data[~mask] = 0
    return TruncSeq(data)


@dataclass
class CheckReport:
    passed: bool
    worst: float
    trials: int
    detail: str = ""


def reflection_check(s: SequenceStructure, trials: int = 20, seed: int = 0, K: int = 4) -> CheckReport:
    """Compare ``||(x_k)||`` and ``||(x_{-k})||`` on random sequences."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    worst, ok = 0.0, True
    for _ in range(trials):
        v = random_seq(rng, K, s.base.dim)
        a, b = seq_norm(s, v), seq_norm(s, v.reflect())
        dev = abs(a - b)
        if s.sampled and (s.stderr(v.data) > 0):
            tol = 3.0 * float(np.hypot(s.stderr(v.data), s.stderr(v.reflect().data)))
        else:
            tol = 1e-10 * max(1.0, a)
        ok = ok and dev <= tol
        worst = max(worst, dev)
    return CheckReport(ok, worst, trials)


def cesaro(v: TruncSeq, n: int) -> TruncSeq:
    """``C_n v = (1/(n+1)) sum_{m=0}^n (..., 0, x_{-m}, ..., x_m, 0, ...)``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    k = np.abs(v.indices)
    mult = np.clip(n - k + 1, 0, None) / (n + 1.0)
    return TruncSeq(mult[:, None] * v.data)


def cesaro_check(s: SequenceStructure, v: TruncSeq, n: int) -> tuple[float, bool, float]:
    """Return ``(||C_n v||, contraction holds, ||C_n v - v||)``."""
    c = cesaro(v, n)
    val = seq_norm(s, c)
    ref = seq_norm(s, v)
    tol = 1e-12 * max(1.0, ref)
    if s.sampled:
        tol += 3.0 * s.stderr(v.data)
    return val, bool(val <= ref + tol), seq_norm(s, c - v)


__all__ = [
    "TruncSeq", "SequenceStructure", "LpStructure", "FourierStructure", "RademacherStructure",
    "GaussianStructure", "JamesStructure", "StructuredCouple", "structured_couple", "make_structure",
    "seq_norm", "weighted_seq_norm", "reflection_check", "cesaro", "cesaro_check", "james_batch",
    "james_chain_enumeration", "power_weights", "exp_weights", "random_seq", "phase",
]
