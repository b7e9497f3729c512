"""Euler-Maruyama realizations of the OU process and empirical lead matrices.

x_{k+1} = x_k - Delta B x_k + Sigma xi_k,  xi_k ~ N(0, Delta I_M).

Randomness comes from numpy's PCG64 bit generator seeded through
SeedSequence(seed); Gaussian draws use numpy's ziggurat sampler. Noise is
drawn in fixed-size chunks so results are bitwise reproducible for a seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, StepSizeError
from .ou import OUParams, require_stable, stationary_covariance

__all__ = [
    "RNG_ID",
    "GAUSSIAN_METHOD",
    "SimConfig",
    "TimeSeries",
    "make_rng",
    "sample_stationary_initial",
    "euler_maruyama",
    "simulate_lead",
    "empirical_lead_matrix",
    "time_averaged_lead",
    "slln_experiment",
    "reference_lead",
    "step_norm",
]

RNG_ID = "numpy.random.PCG64/SeedSequence"
GAUSSIAN_METHOD = "numpy ziggurat (Generator.standard_normal)"
CHUNK = 65536


@dataclass(frozen=True)
class SimConfig:
    iterations: int
    step: float
    seed: int = 0
    initial: object = "stationary"  # "stationary", "zero" or a vector

    def __post_init__(self):
        if int(self.iterations) != self.iterations or self.iterations < 2:
            raise InvalidInputError(f"iterations must be an integer >= 2, got {self.iterations}")
        if not (self.step > 0 and np.isfinite(self.step)):
            raise InvalidInputError(f"step must be positive, got {self.step}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidInputError("seed must be an unsigned 64-bit integer")
        if isinstance(self.initial, str) and self.initial not in ("stationary", "zero"):
            raise InvalidInputError(f"unknown initial condition {self.initial!r}")


@dataclass(frozen=True)
class TimeSeries:
    samples: np.ndarray  # K x N
    step: float

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float)
        if x.ndim != 2 or x.shape[0] < 1:
            raise InvalidInputError("samples must be a K x N array")
        object.__setattr__(self, "samples", x)

    @property
    def K(self) -> int:
        return self.samples.shape[0]


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def sample_stationary_initial(S, rng: np.random.Generator) -> np.ndarray:
    """x = S^(1/2) z with the symmetric PSD square root (negative eigenvalues clipped)."""
    S = np.asarray(S, dtype=float)
    scale = max(1.0, np.abs(S).max(initial=0.0))
    if np.abs(S - S.T).max(initial=0.0) > 1e-10 * scale:
        raise InvalidInputError("covariance must be symmetric")
    lam, V = np.linalg.eigh((S + S.T) / 2)
    if lam[0] < -1e-10 * scale:
        raise InvalidInputError("covariance is not positive semidefinite")
    root = (V * np.sqrt(np.clip(lam, 0, None))) @ V.T
    return root @ rng.standard_normal(S.shape[0])


def step_norm(params: OUParams, step: float) -> float:
    """Delta times the spectral radius of B (forward Euler needs this < 2)."""
    return float(step * np.max(np.abs(np.linalg.eigvals(params.friction))))


def _initial_state(params: OUParams, cfg: SimConfig, rng) -> np.ndarray:
    if isinstance(cfg.initial, str):
        if cfg.initial == "zero":
            return np.zeros(params.N)
        return sample_stationary_initial(stationary_covariance(params.friction, params.diffusion), rng)
    x0 = np.asarray(cfg.initial, dtype=float).ravel()
    if x0.shape != (params.N,):
        raise InvalidInputError(f"initial vector must have length {params.N}")
    return x0


def _run(params: OUParams, cfg: SimConfig, on_chunk):
    """Drive the recursion, handing each chunk of consecutive samples to on_chunk.

    Chunks overlap by one sample so pairwise sums see every consecutive pair.
    """
    require_stable(params.friction)
    if step_norm(params, cfg.step) >= 2:
        raise StepSizeError(f"step * max|eig(B)| = {step_norm(params, cfg.step):.3g} >= 2")
    rng = make_rng(cfg.seed)
    x = _initial_state(params, cfg, rng)
    Mt = (np.eye(params.N) - cfg.step * params.friction).T
    St = params.volatility.T * np.sqrt(cfg.step)
    M = params.volatility.shape[1]
    K = int(cfg.iterations)
    done = 1
    buf = np.empty((CHUNK + 1, params.N))
    buf[0] = x
    while done < K:
        n = min(CHUNK, K - done)
        noise = rng.standard_normal((n, M)) @ St
        for i in range(n):
            x = x @ Mt + noise[i]
            buf[i + 1] = x
        on_chunk(buf[: n + 1], done - 1)
        buf[0] = x
        done += n


def euler_maruyama(params: OUParams, cfg: SimConfig) -> TimeSeries:
    out = np.empty((int(cfg.iterations), params.N))

    def store(chunk, start):
        out[start: start + chunk.shape[0]] = chunk

    _run(params, cfg, store)
    return TimeSeries(out, cfg.step)


def _shoelace(chunk: np.ndarray) -> np.ndarray:
    P = chunk[:-1].T @ chunk[1:]
    return 0.5 * (P - P.T)


def simulate_lead(params: OUParams, cfg: SimConfig, checkpoints: Sequence[int] | None = None) -> dict:
    """Streaming shoelace accumulation; returns {K: time-averaged lead matrix}.

    The matrix for K uses samples x_0 .. x_{K-1}. No series is stored.
    """
    K_total = int(cfg.iterations)
    cps = sorted(set(int(k) for k in (checkpoints or [K_total])))
    if cps[0] < 2 or cps[-1] > K_total:
        raise InvalidInputError("checkpoints must lie in 2..iterations")
    acc = np.zeros((params.N, params.N))
    result = {}
    pending = list(cps)

    def consume(chunk, start):
        nonlocal acc
        # chunk holds samples start .. start+len-1
        end = start + chunk.shape[0]
        lo = 0
        while pending and pending[0] <= end:
            k = pending.pop(0)
            stop = k - start
            acc += _shoelace(chunk[lo:stop])
            lo = stop - 1
            result[k] = acc / ((k - 1) * cfg.step)
        acc += _shoelace(chunk[lo:])

    _run(params, cfg, consume)
    return result


def empirical_lead_matrix(samples) -> np.ndarray:
    """Shoelace lead matrix (1/2) sum_k (x_k x_{k+1}^T - x_{k+1} x_k^T)."""
    x = samples.samples if isinstance(samples, TimeSeries) else np.asarray(samples, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise InvalidInputError("need a K x N series with K >= 2")
    return _shoelace(x)


def time_averaged_lead(ts: TimeSeries) -> np.ndarray:
    return empirical_lead_matrix(ts) / ((ts.K - 1) * ts.step)


def reference_lead(params: OUParams) -> tuple[np.ndarray, float]:
    """Theoretical Q and its Frobenius norm, with roundoff-level Q snapped to 0."""
    S = stationary_covariance(params.friction, params.diffusion)
    M = params.friction @ S
    Q = (M - M.T) / 2
    qn = float(np.linalg.norm(Q))
    if qn <= 1e-12 * np.linalg.norm(params.friction) * np.linalg.norm(S):
        return np.zeros_like(Q), 0.0
    return Q, qn


def slln_experiment(params: OUParams, K_values: Sequence[int], step: float, seeds: Sequence[int]) -> list[dict]:
    """Relative Frobenius error of A(K)/((K-1) Delta) against Q, per seed and K.

    When Q = 0 (to roundoff) the absolute error is reported instead.
    """
    Q, qn = reference_lead(params)
    rows = []
    for seed in seeds:
        cfg = SimConfig(max(K_values), step, seed)
        leads = simulate_lead(params, cfg, K_values)
        for K in sorted(leads):
            err = np.linalg.norm(leads[K] - Q)
            rows.append({"seed": int(seed), "K": int(K), "step": step,
                         "error": float(err / qn if qn > 0 else err), "relative": bool(qn > 0)})
    return rows
