"""Deterministic periodic signals under the chain-of-offsets model (COOM).

x_n(t) = c_n phi(t - alpha_n), with phi(t) = sum_k phihat_k exp(2 pi i k t / P)
real, so phihat_{-k} = conj(phihat_k). Only k >= 0 is stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import InvalidInputError
from .spectral import (
    cyclic_match,
    eigenvalue_ratio,
    phase_order,
    skew_eigendecomposition,
)

__all__ = [
    "PeriodicCOOM",
    "SampledSignal",
    "sinusoid_network",
    "cross_correlation",
    "oriented_area",
    "coom_lead_matrix",
    "one_harmonic_vectors",
    "offset_cyclic_order",
    "RecoveryReport",
    "phase_order_recovery",
]


@dataclass(frozen=True)
class PeriodicCOOM:
    period: float
    fourier: Mapping[int, complex]
    scales: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        if not self.period > 0:
            raise InvalidInputError(f"period must be positive, got {self.period}")
        four = {int(k): complex(v) for k, v in dict(self.fourier).items() if v != 0}
        if any(k < 0 for k in four):
            raise InvalidInputError("store Fourier coefficients for k >= 0 only")
        if not four:
            raise InvalidInputError("at least one Fourier coefficient must be nonzero")
        if 0 in four and four[0].imag != 0:
            raise InvalidInputError("phihat_0 must be real for a real signal")
        c = np.asarray(self.scales, dtype=float).ravel()
        a = np.asarray(self.offsets, dtype=float).ravel()
        if c.shape != a.shape or c.size == 0:
            raise InvalidInputError("scales and offsets must be non-empty and of equal length")
        if np.any(c <= 0):
            raise InvalidInputError("scales must be positive")
        object.__setattr__(self, "fourier", four)
        object.__setattr__(self, "scales", c)
        object.__setattr__(self, "offsets", np.mod(a, self.period))

    @property
    def N(self) -> int:
        return self.scales.size

    def phi(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for k, c in self.fourier.items():
            term = c * np.exp(2j * np.pi * k * t / self.period)
            out += term.real if k == 0 else 2 * term.real
        return out

    def evaluate(self, t) -> np.ndarray:
        """len(t) x N array of x_n(t)."""
        t = np.asarray(t, dtype=float).ravel()
        return self.scales * self.phi(t[:, None] - self.offsets[None, :])

    def sample(self, K: int) -> "SampledSignal":
        """K + 1 samples over one period, endpoint included (closed path)."""
        t = np.linspace(0.0, self.period, K + 1)
        return SampledSignal(self.evaluate(t), t)


@dataclass(frozen=True)
class SampledSignal:
    values: np.ndarray
    times: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        t = np.asarray(self.times, dtype=float).ravel()
        if v.ndim != 2 or v.shape[0] != t.size or t.size < 2:
            raise InvalidInputError("values must be K x N with K = len(times) >= 2")
        if np.any(np.diff(t) <= 0):
            raise InvalidInputError("times must be strictly increasing")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "times", t)


def sinusoid_network(N: int) -> PeriodicCOOM:
    """x_n(t) = sin(2 pi (t - (n-1)/N)), period 1."""
    return PeriodicCOOM(1.0, {1: -0.5j}, np.ones(N), np.arange(N) / N)


def cross_correlation(f: Callable, g: Callable, taus, period: float = 1.0,
                      points: int = 2048, tol: float = 1e-8, max_points: int = 2**22) -> np.ndarray:
    """(f * g)(tau) = int_0^P f(t - tau) g(t) dt for P-periodic f, g.

    Uses the periodic trapezoid rule, doubling the grid until successive
    estimates differ by less than tol (relative to max(1, |value|)).
    """
    if not period > 0:
        raise InvalidInputError(f"period must be positive, got {period}")
    taus = np.atleast_1d(np.asarray(taus, dtype=float))

    def rule(n):
        t = np.arange(n) * (period / n)
        return np.array([np.sum(f(t - tau) * g(t)) for tau in taus]) * (period / n)

    n = max(2048, int(points))
    prev = rule(n)
    while n < max_points:
        n *= 2
        cur = rule(n)
        if np.max(np.abs(cur - prev) / np.maximum(1.0, np.abs(cur))) < tol:
            return cur
        prev = cur
    return prev


def oriented_area(x, y, closed: bool = True) -> float:
    """Signed area swept by the planar curve (x_k, y_k); positive counterclockwise.

    With ``closed`` the segment from the last point back to the first is included.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise InvalidInputError("x and y must have the same length")
    if x.size < 2:
        return 0.0
    if closed:
        x1, y1 = np.roll(x, -1), np.roll(y, -1)
        return 0.5 * float(np.sum(x * y1 - x1 * y))
    return 0.5 * float(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))


def coom_lead_matrix(model: PeriodicCOOM) -> np.ndarray:
    """Lead matrix over one period:
    A_mn = 4 pi c_m c_n sum_{k>=1} k |phihat_k|^2 sin(2 pi k (alpha_n - alpha_m) / P)."""
    c, a, P = model.scales, model.offsets, model.period
    diff = a[None, :] - a[:, None]
    A = np.zeros((model.N, model.N))
    for k, coef in model.fourier.items():
        if k == 0:
            continue
        A += k * abs(coef) ** 2 * np.sin(2 * np.pi * k * diff / P)
    A *= 4 * np.pi * np.outer(c, c)
    return (A - A.T) / 2


def one_harmonic_vectors(model: PeriodicCOOM) -> tuple[np.ndarray, np.ndarray]:
    """(a, b) with a b^T - b a^T equal to the lead matrix of a single-harmonic model."""
    ks = [k for k in model.fourier if k != 0]
    if len(ks) != 1:
        raise InvalidInputError(f"need exactly one harmonic k >= 1, got {sorted(ks)}")
    k = ks[0]
    amp = np.sqrt(4 * np.pi * k) * abs(model.fourier[k]) * model.scales
    ang = 2 * np.pi * k * model.offsets / model.period
    return amp * np.cos(ang), amp * np.sin(ang)


def offset_cyclic_order(offsets, period: float = 1.0) -> np.ndarray:
    """Greedy cyclic order of offsets (1-based); starts at the smallest offset.

    Each step takes the unused index with the smallest forward gap
    (alpha_m - alpha_prev) mod P, ties going to the lower index.
    """
    a = np.mod(np.asarray(offsets, dtype=float).ravel(), period)
    N = a.size
    if N == 0:
        return np.array([], dtype=int)
    order = [int(np.argmin(a))]
    used = np.zeros(N, dtype=bool)
    used[order[0]] = True
    for _ in range(N - 1):
        gap = np.mod(a - a[order[-1]], period)
        gap[used] = np.inf
        m = int(np.argmin(gap))
        order.append(m)
        used[m] = True
    return np.array(order) + 1


@dataclass(frozen=True)
class RecoveryReport:
    order: np.ndarray  # 1-based indices by ascending phase in [0, 2 pi)
    ratio: float  # |lambda_1 / lambda_3|, inf for rank two
    orientation: str | None  # vs reference order: 'forward', 'reversed' or None
    leading_eigenvector: np.ndarray


def phase_order_recovery(A, reference=None) -> RecoveryReport:
    """Cyclic order of the leading-eigenvector phases with a dominance diagnostic."""
    A = np.asarray(A, dtype=float)
    if not np.any(A):
        raise InvalidInputError("cyclic order is undefined for the zero matrix")
    spec = skew_eigendecomposition(A)
    order = phase_order(spec.leading_eigenvector)
    ratio = eigenvalue_ratio(A) if A.shape[0] >= 3 else float("inf")
    orient = cyclic_match(order, reference) if reference is not None else None
    return RecoveryReport(order, ratio, orient, spec.leading_eigenvector)
