"""Circulant matrices and their discrete Fourier eigenbasis.

All user-facing indices are 1-based. ``wrap`` is the single place where an
index "taken mod N" is reduced into the representative range 1..N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericalError

__all__ = [
    "wrap",
    "CirculantSpec",
    "FourierMode",
    "roots_of_unity",
    "fourier_vector",
    "fourier_basis",
    "circulant_eigenvalues",
    "circulant_eigensystem",
    "spectral_sum",
    "circulant_exp",
    "real_part",
    "is_circulant",
]

# imaginary residue tolerated when a complex assembly is known to be real
IMAG_TOL = 1e-10


def wrap(index, N: int):
    """Reduce an integer (or integer array) mod N into 1..N (never 0)."""
    if N < 1:
        raise InvalidInputError(f"N must be >= 1, got {N}")
    return (np.asarray(index) - 1) % N + 1 if np.ndim(index) else (int(index) - 1) % N + 1


def real_part(M: np.ndarray, tol: float = IMAG_TOL) -> np.ndarray:
    """Return the real part of ``M`` after checking the imaginary part is negligible.

    The check is relative to ``max(1, max|M|)`` so large well-conditioned
    assemblies are not rejected for roundoff alone.
    """
    M = np.asarray(M)
    if not np.iscomplexobj(M):
        return M.astype(float, copy=False)
    scale = max(1.0, float(np.max(np.abs(M), initial=0.0)))
    resid = float(np.max(np.abs(M.imag), initial=0.0))
    if resid > tol * scale:
        raise NumericalError(f"imaginary residue {resid:.3e} exceeds {tol:g} (scale {scale:.3e})")
    return np.ascontiguousarray(M.real)


@dataclass(frozen=True)
class CirculantSpec:
    """Circulant matrix described by its first row (c_1, ..., c_N)."""

    first_row: np.ndarray

    def __post_init__(self):
        row = np.asarray(self.first_row, dtype=float).ravel()
        if row.size == 0:
            raise InvalidInputError("first_row must be non-empty")
        if not np.all(np.isfinite(row)):
            raise InvalidInputError("first_row must be finite")
        object.__setattr__(self, "first_row", row)

    @property
    def N(self) -> int:
        return self.first_row.size

    def dense(self) -> np.ndarray:
        """Materialize the matrix: entry (m, n) is c_{n-m+1}, index taken mod N."""
        N = self.N
        k = np.arange(N)
        return self.first_row[(k[None, :] - k[:, None]) % N]

    @classmethod
    def from_matrix(cls, A, atol: float = 1e-12) -> "CirculantSpec":
        A = np.asarray(A, dtype=float)
        if not is_circulant(A, atol=atol):
            raise InvalidInputError("matrix is not circulant")
        return cls(A[0].copy())


@dataclass(frozen=True)
class FourierMode:
    index: int
    root: complex
    eigenvector: np.ndarray
    eigenvalue: complex


def is_circulant(A, atol: float = 1e-12) -> bool:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        return False
    return bool(np.allclose(A, CirculantSpec(A[0].real).dense(), rtol=0, atol=atol))


def roots_of_unity(N: int) -> np.ndarray:
    """omega_n = exp(2 pi i n / N) for n = 1..N (so the last entry is 1)."""
    n = np.arange(1, N + 1)
    return np.exp(2j * np.pi * n / N)


def fourier_vector(n: int, N: int) -> np.ndarray:
    """w_n with component k equal to omega_n^(k-1) / sqrt(N)."""
    if N < 1:
        raise InvalidInputError(f"N must be >= 1, got {N}")
    k = np.arange(N)
    return np.exp(2j * np.pi * wrap(n, N) * k / N) / np.sqrt(N)


def fourier_basis(N: int) -> np.ndarray:
    """Matrix whose column n-1 is w_n, n = 1..N."""
    if N < 1:
        raise InvalidInputError(f"N must be >= 1, got {N}")
    k = np.arange(N)
    n = np.arange(1, N + 1)
    # reduce the exponent before scaling to keep the phases exact for large N
    return np.exp(2j * np.pi * (np.outer(k, n) % N) / N) / np.sqrt(N)


def circulant_eigenvalues(spec: CirculantSpec) -> np.ndarray:
    """mu_n = sum_p c_p omega_n^(p-1) for n = 1..N."""
    N = spec.N
    n = np.arange(1, N + 1)
    p = np.arange(N)
    phase = np.exp(2j * np.pi * (np.outer(n, p) % N) / N)
    return phase @ spec.first_row


def circulant_eigensystem(spec: CirculantSpec) -> list[FourierMode]:
    W = fourier_basis(spec.N)
    mu = circulant_eigenvalues(spec)
    roots = roots_of_unity(spec.N)
    return [FourierMode(n + 1, complex(roots[n]), W[:, n], complex(mu[n])) for n in range(spec.N)]


def spectral_sum(coeffs: np.ndarray) -> np.ndarray:
    """Assemble sum_n coeffs[n-1] * w_n w_{N-n}^T (complex result).

    Since w_{N-n}^T is the conjugate transpose of w_n this is W diag(coeffs) W^*.
    """
    coeffs = np.asarray(coeffs)
    W = fourier_basis(coeffs.size)
    return (W * coeffs) @ W.conj().T


def circulant_exp(spec: CirculantSpec, t: float) -> np.ndarray:
    """exp(t C) through the Fourier eigenbasis; returns a real circulant matrix."""
    t = float(t)
    if not np.isfinite(t):
        raise InvalidInputError("t must be finite")
    mu = circulant_eigenvalues(spec)
    return real_part(spectral_sum(np.exp(mu * t)))
