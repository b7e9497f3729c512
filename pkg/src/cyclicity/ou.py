"""Ornstein-Uhlenbeck model: dx = -B x dt + Sigma dW.

Stability, stationary covariance, Green's function, lead matrices and the
probability-flux coefficient. Matrices are plain ``numpy`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .circulant import CirculantSpec, circulant_eigenvalues, fourier_basis, is_circulant, real_part
from .errors import InvalidInputError, SingularCovarianceError, StabilityError

__all__ = [
    "OUParams",
    "StabilityReport",
    "NEAR_INSTABILITY",
    "PSD_TOL",
    "diffusion_matrix",
    "check_stability",
    "require_stable",
    "stationary_covariance",
    "lyapunov_residual",
    "green_function",
    "theoretical_lead_matrix",
    "cyclic_lead_matrix",
    "autocovariance",
    "flux_coefficient",
    "check_skew",
]

NEAR_INSTABILITY = 1e-10
PSD_TOL = -1e-12
# largest N for which the Kronecker (vectorized) Lyapunov solve is used
KRON_MAX_N = 40


def _square(A, name: str) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"{name} must be a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return A


def _check_diffusion(D, N: int) -> np.ndarray:
    D = _square(D, "D")
    if D.shape[0] != N:
        raise InvalidInputError(f"D has size {D.shape[0]}, expected {N}")
    scale = max(1.0, float(np.abs(D).max(initial=0.0)))
    if np.abs(D - D.T).max(initial=0.0) > 1e-12 * scale:
        raise InvalidInputError("D must be symmetric")
    if N and np.linalg.eigvalsh(D)[0] < PSD_TOL * scale:
        raise InvalidInputError("D must be positive semidefinite")
    return (D + D.T) / 2


def check_skew(Q, tol: float = 1e-10) -> np.ndarray:
    """Verify ||Q + Q^T||_F <= tol * max(1, ||Q||_F) and return Q."""
    Q = np.asarray(Q, dtype=float)
    if np.linalg.norm(Q + Q.T) > tol * max(1.0, np.linalg.norm(Q)):
        raise InvalidInputError("matrix is not skew-symmetric")
    return Q


@dataclass(frozen=True)
class OUParams:
    """Friction B (N x N) and volatility Sigma (N x M)."""

    friction: np.ndarray
    volatility: np.ndarray

    def __post_init__(self):
        B = _square(self.friction, "friction")
        S = np.asarray(self.volatility, dtype=float)
        if S.ndim == 0:
            S = S.reshape(1, 1)
        if S.ndim == 1:
            S = S.reshape(-1, 1)
        if S.ndim != 2 or S.shape[0] != B.shape[0]:
            raise InvalidInputError(f"volatility must have {B.shape[0]} rows, got shape {S.shape}")
        object.__setattr__(self, "friction", B)
        object.__setattr__(self, "volatility", S)

    @property
    def N(self) -> int:
        return self.friction.shape[0]

    @property
    def diffusion(self) -> np.ndarray:
        return diffusion_matrix(self.volatility)


def diffusion_matrix(volatility) -> np.ndarray:
    """D = Sigma Sigma^T / 2."""
    S = np.atleast_2d(np.asarray(volatility, dtype=float))
    return S @ S.T / 2


class StabilityReport(NamedTuple):
    stable: bool
    margin: float  # min real part of the spectrum of B


def check_stability(B) -> StabilityReport:
    """-B is Hurwitz iff every eigenvalue of B has positive real part.

    Circulant input uses the exact Fourier eigenvalues, so the margin of a
    circulant with non-positive off-diagonal coefficients is its row sum.
    """
    B = _square(B, "B")
    if is_circulant(B, atol=0.0):
        eig = circulant_eigenvalues(CirculantSpec(B[0]))
    else:
        eig = np.linalg.eigvals(B)
    margin = float(np.min(eig.real))
    return StabilityReport(margin > 0, margin)


def require_stable(B) -> float:
    """Raise StabilityError unless B is stable with margin >= NEAR_INSTABILITY."""
    stable, margin = check_stability(B)
    if not stable:
        raise StabilityError(f"friction matrix is unstable (min real eigenvalue {margin:.3e})")
    if margin < NEAR_INSTABILITY:
        raise StabilityError(f"friction matrix is too close to instability (margin {margin:.3e} < {NEAR_INSTABILITY:g})")
    return margin


def lyapunov_residual(B, S, D) -> float:
    return float(np.linalg.norm(B @ S + S @ B.T - 2 * D))


def stationary_covariance(B, D, method: str = "auto") -> np.ndarray:
    """Solve B S + S B^T = 2 D for the stationary covariance S.

    ``method`` is "kron" (dense vectorized solve), "schur" (Bartels-Stewart)
    or "auto", which picks "kron" for N <= 40.
    """
    B = _square(B, "B")
    N = B.shape[0]
    D = _check_diffusion(D, N)
    require_stable(B)
    if method == "auto":
        method = "kron" if N <= KRON_MAX_N else "schur"
    if method == "kron":
        I = np.eye(N)
        # row-major vec: vec(BS) = (B kron I) vec(S), vec(SB^T) = (I kron B) vec(S)
        K = np.kron(B, I) + np.kron(I, B)
        S = np.linalg.solve(K, 2 * D.ravel()).reshape(N, N)
    elif method == "schur":
        S = scipy.linalg.solve_continuous_lyapunov(B, 2 * D)
    else:
        raise InvalidInputError(f"unknown method {method!r}")
    S = (S + S.T) / 2
    scale = max(1.0, np.linalg.norm(D))
    if lyapunov_residual(B, S, D) > 1e-8 * scale * max(1.0, np.linalg.norm(S)):
        raise StabilityError("Lyapunov solve is ill-conditioned")
    return S


def green_function(B, t: float) -> np.ndarray:
    """G(t) = exp(-t B) for t >= 0."""
    B = _square(B, "B")
    if t < 0:
        raise InvalidInputError("t must be nonnegative")
    return scipy.linalg.expm(-float(t) * B)


def theoretical_lead_matrix(B, D) -> np.ndarray:
    """Q = (B S - S B^T) / 2 with S the stationary covariance."""
    B = _square(B, "B")
    S = stationary_covariance(B, D)
    M = B @ S
    return (M - M.T) / 2


def cyclic_lead_matrix(spec: CirculantSpec, D) -> np.ndarray:
    """Lead matrix of the OU process with circulant friction, via the Fourier double sum.

    Q = sum_{m,n} (mu_m - mu_n)/(mu_m + mu_n) w_m w_{N-m}^T D w_{N-n} w_n^T.
    """
    N = spec.N
    D = _check_diffusion(D, N)
    require_stable(spec.dense())
    mu = circulant_eigenvalues(spec)
    W = fourier_basis(N)
    R = (mu[:, None] - mu[None, :]) / (mu[:, None] + mu[None, :])
    inner = W.conj().T @ D @ W.conj()
    Q = real_part(W @ (R * inner) @ W.T)
    return (Q - Q.T) / 2


def autocovariance(params: OUParams, s: float, t: float, initial_covariance=None) -> np.ndarray:
    """Gamma(s, t) = Cov(x(s), x(t)) for x(0) ~ N(0, S0), S0 defaulting to S.

    Gamma(s,t) = G(s) S0 G(t)^T + 2 int_0^r G(s-u) D G(t-u)^T du with r = min(s,t);
    the integral equals G(s-r) (S - G(r) S G(r)^T) G(t-r)^T.
    """
    if s < 0 or t < 0:
        raise InvalidInputError("times must be nonnegative")
    B = params.friction
    S = stationary_covariance(B, params.diffusion)
    S0 = S if initial_covariance is None else _check_diffusion(initial_covariance, params.N)
    r = min(s, t)
    Gs, Gt, Gr = green_function(B, s), green_function(B, t), green_function(B, r)
    Gsr, Gtr = green_function(B, s - r), green_function(B, t - r)
    return Gs @ S0 @ Gt.T + Gsr @ (S - Gr @ S @ Gr.T) @ Gtr.T


def flux_coefficient(B, D, cond_max: float = 1e12) -> np.ndarray:
    """Matrix J with stationary probability flux J x P(x): J = -Q S^{-1}."""
    B = _square(B, "B")
    S = stationary_covariance(B, D)
    if np.linalg.cond(S) > cond_max:
        raise SingularCovarianceError("stationary covariance is singular")
    M = B @ S
    Q = (M - M.T) / 2
    return -np.linalg.solve(S.T, Q.T).T
