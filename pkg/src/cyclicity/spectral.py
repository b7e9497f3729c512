"""Eigen-analysis of real skew-symmetric (lead) matrices.

Convention: the spectrum is computed from the Hermitian matrix iA. The leading
eigenvector v1 is the eigenvector of iA for its largest eigenvalue mu_1 >= 0,
so A v1 = lambda_1 v1 with lambda_1 = -i mu_1. The eigenvalue list is sorted by
modulus with each conjugate pair ordered (-i mu, +i mu). A vector's global
phase is fixed by making its largest-modulus component real positive (ties go
to the lowest index).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, InvalidInputError, NumericalError

__all__ = [
    "SkewSpectrum",
    "normalize_phase",
    "skew_eigendecomposition",
    "eigenvalue_ratio",
    "gershgorin_radii",
    "principal_minor",
    "interlacing_violation",
    "eigen_eigvec_identity_check",
    "rank2_eigensystem",
    "phase_order",
    "cyclic_match",
    "RATIO_RANK2_TOL",
]

RATIO_RANK2_TOL = 1e-14
# moduli within this relative distance of the maximum count as tied
_TIE_RTOL = 1e-9


def normalize_phase(v) -> np.ndarray:
    """Rotate v so its largest-modulus component is real positive."""
    v = np.asarray(v, dtype=complex).copy()
    mod = np.abs(v)
    top = mod.max(initial=0.0)
    if top == 0.0:
        return v
    j = int(np.argmax(mod >= top * (1 - _TIE_RTOL)))
    v *= np.conj(v[j]) / mod[j]
    v[j] = mod[j]
    return v


@dataclass(frozen=True)
class SkewSpectrum:
    eigenvalues: np.ndarray  # complex, modulus descending
    eigenvectors: np.ndarray  # columns match eigenvalues
    leading_eigenvector: np.ndarray

    @property
    def phases(self) -> np.ndarray:
        """Principal arguments of v1 in (-pi, pi]."""
        ph = np.angle(self.leading_eigenvector)
        return np.where(ph <= -np.pi, ph + 2 * np.pi, ph)

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.leading_eigenvector)

    @property
    def leading_eigenvalue(self) -> complex:
        return complex(self.eigenvalues[0])


def _as_skew(A, tol: float = 1e-8) -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {A.shape}")
    if np.iscomplexobj(A):
        if np.abs(A.imag).max(initial=0.0) > tol * max(1.0, np.abs(A).max(initial=0.0)):
            raise InvalidInputError("lead matrix must be real")
        A = A.real
    A = A.astype(float)
    if np.linalg.norm(A + A.T) > tol * max(1.0, np.linalg.norm(A)):
        raise InvalidInputError("matrix is not skew-symmetric")
    return (A - A.T) / 2


def skew_eigendecomposition(A) -> SkewSpectrum:
    A = _as_skew(A)
    N = A.shape[0]
    if N == 0:
        raise InvalidInputError("empty matrix")
    if not np.any(A):
        vecs = np.eye(N, dtype=complex)
        return SkewSpectrum(np.zeros(N, complex), vecs, vecs[:, 0].copy())
    mu, V = np.linalg.eigh(1j * A)
    # mu ascending and symmetric about 0: pair mu[N-1-k] with mu[k]
    order = []
    for k in range(N // 2):
        order += [N - 1 - k, k]
    if N % 2:
        order.append(N // 2)
    order = np.array(order)
    lam = -1j * mu[order]
    V = V[:, order]
    V[:, 0] = normalize_phase(V[:, 0])
    recon = (V * lam) @ V.conj().T
    if np.linalg.norm(A - recon) > 1e-9 * max(1.0, np.linalg.norm(A)):
        raise NumericalError("eigendecomposition failed to reconstruct the matrix")
    return SkewSpectrum(lam, V, V[:, 0].copy())


def eigenvalue_ratio(A) -> float:
    """|lambda_1 / lambda_3|, +inf when |lambda_3| < 1e-14 |lambda_1| (rank two)."""
    A = _as_skew(A)
    if A.shape[0] < 3:
        raise InvalidInputError("eigenvalue ratio needs N >= 3")
    mod = np.sort(np.abs(np.linalg.eigvalsh(1j * A)))[::-1]
    l1, l3 = mod[0], mod[2]
    if l1 == 0.0:
        return float("nan")
    if l3 < RATIO_RANK2_TOL * l1:
        return float("inf")
    return float(l1 / l3)


def gershgorin_radii(A) -> np.ndarray:
    """R_j = sum_k |A_jk|."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError("expected a square matrix")
    return np.abs(A).sum(axis=1)


def principal_minor(A, j: int) -> np.ndarray:
    """Delete row j and column j (1-based)."""
    A = np.asarray(A)
    N = A.shape[0]
    if not 1 <= j <= N:
        raise InvalidInputError(f"minor index {j} outside 1..{N}")
    keep = np.arange(N) != j - 1
    return A[np.ix_(keep, keep)]


def _hermitian_eigvals(H) -> np.ndarray:
    H = np.asarray(H)
    if np.abs(H - H.conj().T).max(initial=0.0) > 1e-10 * max(1.0, np.abs(H).max(initial=0.0)):
        raise InvalidInputError("matrix is not Hermitian")
    return np.linalg.eigvalsh(H)[::-1]


def interlacing_violation(H, j: int) -> float:
    """Largest violation of lambda_k(H) >= lambda_k(M) >= lambda_{k+1}(H), M the j-th minor.

    Eigenvalues are taken in descending order; a return value <= 0 means the
    Cauchy interlacing inequalities hold.
    """
    lam = _hermitian_eigvals(H)
    nu = _hermitian_eigvals(principal_minor(H, j))
    return float(max(np.max(nu - lam[:-1]), np.max(lam[1:] - nu)))


def eigen_eigvec_identity_check(H, gap_tol: float = 1e-12) -> float:
    """Max over j of | |v_{1,j}|^2 - prod(lambda_1 - minor eigs) / prod_{n>=2}(lambda_1 - lambda_n) |."""
    H = np.asarray(H)
    lam, V = np.linalg.eigh(H)
    _hermitian_eigvals(H)
    N = H.shape[0]
    if N < 2:
        raise InvalidInputError("need N >= 2")
    lam, V = lam[::-1], V[:, ::-1]
    l1 = lam[0]
    gaps = l1 - lam[1:]
    if gaps[0] < gap_tol * max(1.0, abs(l1)):
        raise DegeneracyError("largest eigenvalue is not simple")
    denom = np.prod(gaps)
    dev = 0.0
    for j in range(1, N + 1):
        nu = np.linalg.eigvalsh(principal_minor(H, j))
        rhs = np.prod(l1 - nu) / denom
        dev = max(dev, abs(abs(V[j - 1, 0]) ** 2 - rhs))
    return float(dev)


def rank2_eigensystem(a, b) -> tuple[complex, np.ndarray]:
    """Leading eigenpair of a b^T - b a^T.

    With theta the angle between a and b, lambda_1 = -i sin(theta) |a| |b| and
    v1 is proportional to -exp(-i theta) a/|a| + b/|b|.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise InvalidInputError("a and b must have equal length")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise DegeneracyError("zero vector")
    ah, bh = a / na, b / nb
    cos = float(np.clip(ah @ bh, -1.0, 1.0))
    sin = float(np.linalg.norm(ah - cos * bh))  # stable near 0 and pi
    if sin < 1e-12:
        raise DegeneracyError("a and b are collinear")
    theta = np.arctan2(sin, cos)
    lam = -1j * sin * na * nb
    v = -np.exp(-1j * theta) * ah + bh
    v = normalize_phase(v / np.linalg.norm(v))
    M = np.outer(a, b) - np.outer(b, a)
    if np.linalg.norm(M @ v - lam * v) > 1e-10 * max(1.0, na * nb):
        raise NumericalError("rank-two eigenpair failed verification")
    return complex(lam), v


def phase_order(v) -> np.ndarray:
    """1-based indices sorted by principal argument mapped into [0, 2 pi)."""
    ph = np.mod(np.angle(np.asarray(v)), 2 * np.pi)
    ph = np.where(ph >= 2 * np.pi, 0.0, ph)
    return np.argsort(ph, kind="stable") + 1


def cyclic_match(order, reference) -> str | None:
    """'forward' if order is a cyclic shift of reference, 'reversed' if it is a
    cyclic shift of the reversed reference, else None."""
    order = list(np.asarray(order).ravel())
    ref = list(np.asarray(reference).ravel())
    if sorted(order) != sorted(ref):
        return None
    n = len(ref)
    for name, r in (("forward", ref), ("reversed", ref[::-1])):
        for d in range(n):
            if order == r[d:] + r[:d]:
                return name
    return None
