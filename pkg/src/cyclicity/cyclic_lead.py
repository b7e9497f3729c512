"""Lead matrices of the cyclic signal-propagation network.

The network has N sensors and a single nonzero propagation coefficient
b_p <= 0 at position p of the circulant friction matrix

    B(eps) = Circ(eps - b_p, 0, ..., b_p, ..., 0),

whose stability margin is eps. Noise of variance d enters one sensor, a
trailing block of L sensors, or all sensors. Closed forms are assembled as
W C W^T, with W the Fourier basis, which is the double sum
sum_{m,n} C[m,n] w_m w_n^T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circulant import CirculantSpec, fourier_basis, real_part, wrap
from .errors import InvalidInputError
from .spectral import (
    gershgorin_radii,
    interlacing_violation,
    normalize_phase,
    principal_minor,
)

__all__ = [
    "PropagationNetwork",
    "q_one_sensor",
    "q_first_regime_one_sensor",
    "v1_first_regime_limit",
    "q_second_regime_one_sensor",
    "binomial_coefficient",
    "binomial_entries",
    "binomial_matrix",
    "binomial_series",
    "q_multi_sensor",
    "q_multi_first_regime",
    "q_multi_second_regime",
    "v1_multi_first_regime",
    "q_all_sensors",
    "leading_mode_all_sensors",
    "cyclic_order_permutation",
    "ConjectureRecord",
    "ConjectureReport",
    "numeric_conjecture_checks",
    "first_regime_vectors",
]


@dataclass(frozen=True)
class PropagationNetwork:
    N: int
    p: int
    b_p: float
    epsilon: float

    def __post_init__(self):
        N, p = int(self.N), int(self.p)
        if N < 2:
            raise InvalidInputError(f"N must be >= 2, got {N}")
        if not 1 < p <= N:
            raise InvalidInputError(f"p must satisfy 1 < p <= N, got p={p}, N={N}")
        if math.gcd(p - 1, N) != 1:
            raise InvalidInputError(f"gcd(p-1, N) must be 1, got gcd({p - 1}, {N}) = {math.gcd(p - 1, N)}")
        if not self.b_p <= 0:
            raise InvalidInputError(f"b_p must be <= 0, got {self.b_p}")
        if not self.epsilon > 0:
            raise InvalidInputError(f"epsilon must be > 0, got {self.epsilon}")
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "b_p", float(self.b_p))
        object.__setattr__(self, "epsilon", float(self.epsilon))

    def friction(self) -> CirculantSpec:
        row = np.zeros(self.N)
        row[0] = self.epsilon - self.b_p
        row[self.p - 1] += self.b_p
        return CirculantSpec(row)

    def diffusion(self, sensors, d: float = 1.0) -> np.ndarray:
        """Diagonal D with d on the listed (1-based) sensors."""
        D = np.zeros((self.N, self.N))
        for s in sensors:
            self._check_sensor(s)
            D[s - 1, s - 1] = d
        return D

    def _check_sensor(self, s: int):
        if not 1 <= s <= self.N:
            raise InvalidInputError(f"sensor index {s} outside 1..{self.N}")


def _omega_pow(idx, power, N):
    """omega_idx^power with the exponent reduced mod N before exponentiating."""
    return np.exp(2j * np.pi * (np.asarray(idx) * power % N) / N)


def _kernel(net: PropagationNetwork, eps: float, phase_factor: np.ndarray) -> np.ndarray:
    """C[m,n] = (a_m - a_n) F[m,n] / (2 eps + b_p (a_m + a_n - 2)), a_m = omega_m^(p-1)."""
    N = net.N
    m = np.arange(1, N + 1)
    a = _omega_pow(m, net.p - 1, N)
    den = 2 * eps + net.b_p * (a[:, None] + a[None, :] - 2)
    num = (a[:, None] - a[None, :]) * phase_factor
    C = np.zeros((N, N), dtype=complex)
    np.divide(num, den, out=C, where=den != 0)
    return C


def _sensor_phase(N: int, s: int) -> np.ndarray:
    m = np.arange(1, N + 1)
    return _omega_pow(np.add.outer(m, m), 1 - s, N)


def _assemble(C: np.ndarray, scale: float) -> np.ndarray:
    W = fourier_basis(C.shape[0])
    Q = real_part(scale * (W @ C @ W.T))
    return (Q - Q.T) / 2


def q_one_sensor(net: PropagationNetwork, s: int, d: float = 1.0) -> np.ndarray:
    """Exact lead matrix Q(eps) for noise of variance d in sensor s."""
    net._check_sensor(s)
    if net.b_p == 0 or d == 0:
        return np.zeros((net.N, net.N))
    C = _kernel(net, net.epsilon, _sensor_phase(net.N, s))
    return _assemble(C, d * net.b_p / net.N)


def q_first_regime_one_sensor(net: PropagationNetwork, s: int, d: float = 1.0) -> np.ndarray:
    """Large-eps approximation: entries +-d b_p / (2 eps) at (s+1-p, s) and (s, s+1-p)."""
    net._check_sensor(s)
    A = np.zeros((net.N, net.N))
    j = wrap(s + 1 - net.p, net.N)
    c = d * net.b_p / (2 * net.epsilon)
    A[j - 1, s - 1] += c
    A[s - 1, j - 1] -= c
    return A


def v1_first_regime_limit(s: int, p: int, N: int) -> np.ndarray:
    """(i e_s + e_{s+1-p}) / sqrt(2)."""
    if not (1 <= s <= N and 1 < p <= N):
        raise InvalidInputError(f"need 1 <= s <= N and 1 < p <= N, got s={s}, p={p}, N={N}")
    v = np.zeros(N, dtype=complex)
    v[s - 1] = 1j / np.sqrt(2)
    v[wrap(s + 1 - p, N) - 1] = 1 / np.sqrt(2)
    return v


def q_second_regime_one_sensor(net: PropagationNetwork, s: int, d: float = 1.0) -> np.ndarray:
    """Small-eps limit of Q(eps) for b_p < 0; the (N, N) summand is 0. Independent of eps and b_p."""
    net._check_sensor(s)
    if d == 0:
        return np.zeros((net.N, net.N))
    unit = PropagationNetwork(net.N, net.p, -1.0, 1.0)
    C = _kernel(unit, 0.0, _sensor_phase(net.N, s))
    C[-1, -1] = 0.0
    return _assemble(-C, d / net.N)


# --- binomial matrix -------------------------------------------------------

_EXACT_BINOM_MAX = 60


def binomial_coefficient(n: int, k: int) -> float:
    """C(n, k) as a float; exact for n <= 60, log-gamma beyond."""
    if k < 0 or k > n:
        return 0.0
    if n <= _EXACT_BINOM_MAX:
        return float(math.comb(n, k))
    return math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1))


def _half_pow_binom(M: int, k: int) -> float:
    """(1/2)^M C(M, k) without overflow."""
    if k < 0 or k > M:
        return 0.0
    if M <= _EXACT_BINOM_MAX:
        return math.comb(M, k) / 2.0**M
    return math.exp(math.lgamma(M + 1) - math.lgamma(k + 1) - math.lgamma(M - k + 1) - M * math.log(2))


def binomial_entries(N: int) -> np.ndarray:
    """Real skew matrix A with A_jk = (1/2)^(2N-j-k) (k-j)/(2N-j-k) C(2N-j-k, N-k).

    The formula applies to every (j, k) except j = k = N, where the entry is 0.
    """
    if N < 2:
        raise InvalidInputError(f"N must be >= 2, got {N}")
    A = np.zeros((N, N))
    for j in range(1, N + 1):
        for k in range(j + 1, N + 1):
            M = 2 * N - j - k
            A[j - 1, k - 1] = (k - j) / M * _half_pow_binom(M, N - k)
    # fill the lower triangle by antisymmetry so i A is exactly Hermitian
    return A - A.T


def binomial_matrix(N: int) -> np.ndarray:
    """Hermitian matrix A_N = i A with A from ``binomial_entries``."""
    return 1j * binomial_entries(N)


def _scaled_int(x: int, shift: int) -> float:
    """x * 2^-shift as a float for arbitrarily large integers."""
    if x == 0:
        return 0.0
    extra = max(0, abs(x).bit_length() - 62)
    return math.ldexp(float(x >> extra if x > 0 else -((-x) >> extra)), extra - shift)


def binomial_series(N: int, terms: int = 60) -> np.ndarray:
    """Partial sum (u < terms) of the binomial double-series expansion

        A_jk = -sum_{u>=2} sum_{v=1..u} (1/2)^(uN-j-k) [C(uN-j-k-1, vN-k-1) - C(uN-j-k-1, vN-k)].

    The u = 2 term is ``binomial_entries``; the full series is the negated
    second-regime lead matrix for p = 2, s = N, d = 1.
    """
    if N < 2:
        raise InvalidInputError(f"N must be >= 2, got {N}")
    A = np.zeros((N, N))
    for j in range(1, N + 1):
        for k in range(1, N + 1):
            total = 0.0
            for u in range(2, terms):
                r = u * N - j - k - 1
                if r < 0:
                    continue
                acc = 0
                for v in range(1, u + 1):
                    lo, hi = v * N - k - 1, v * N - k
                    c1 = math.comb(r, lo) if 0 <= lo <= r else 0
                    c2 = math.comb(r, hi) if 0 <= hi <= r else 0
                    acc += c1 - c2
                total += _scaled_int(acc, r + 1)
            A[j - 1, k - 1] = -total
    return A


# --- several sensors --------------------------------------------------------


def _check_block(net: PropagationNetwork, L: int):
    if not 1 <= L <= net.N:
        raise InvalidInputError(f"L must satisfy 1 <= L <= N, got L={L}, N={net.N}")


def _block_phase(N: int, L: int) -> np.ndarray:
    m = np.arange(1, N + 1)
    idx = np.add.outer(m, m)
    return sum(_omega_pow(idx, ell, N) for ell in range(1, L + 1))


def q_multi_sensor(net: PropagationNetwork, L: int, d: float = 1.0) -> np.ndarray:
    """Exact Q(eps) with noise of variance d in the last L sensors."""
    _check_block(net, L)
    if net.b_p == 0 or d == 0:
        return np.zeros((net.N, net.N))
    C = _kernel(net, net.epsilon, _block_phase(net.N, L))
    return _assemble(C, d * net.b_p / net.N)


def q_multi_first_regime(net: PropagationNetwork, L: int, d: float = 1.0) -> np.ndarray:
    _check_block(net, L)
    return sum(q_first_regime_one_sensor(net, net.N - ell + 1, d) for ell in range(1, L + 1))


def q_multi_second_regime(net: PropagationNetwork, L: int, d: float = 1.0) -> np.ndarray:
    _check_block(net, L)
    return sum(q_second_regime_one_sensor(net, net.N - ell + 1, d) for ell in range(1, L + 1))


def v1_multi_first_regime(L: int, N: int) -> np.ndarray:
    """Large-eps leading eigenvector for p = 2 with noise in the last L sensors.

    N-L-1 zeros followed by i^l sin(l pi / (L+2)), l = 1..L+1, normalized.
    """
    if not 1 <= L < N:
        raise InvalidInputError(f"need 1 <= L < N, got L={L}, N={N}")
    ell = np.arange(1, L + 2)
    v = np.zeros(N, dtype=complex)
    v[N - L - 1:] = (1j) ** ell * np.sin(ell * np.pi / (L + 2))
    return v / np.linalg.norm(v)


# --- all sensors ------------------------------------------------------------


def q_all_sensors(net: PropagationNetwork, d: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Exact Q(eps) for D = d I, and its eigenvalues; entry q-1 belongs to w_q.

    Q = -i d sum_n c_n w_{N-n} w_n^T with
    c_n = b_p sin(2 pi n (p-1)/N) / (eps - 2 b_p sin^2(pi n (p-1)/N)),
    and Q w_q = i d c_q w_q.
    """
    N = net.N
    n = np.arange(1, N + 1)
    k = n * (net.p - 1) % N
    c = net.b_p * np.sin(2 * np.pi * k / N) / (net.epsilon - 2 * net.b_p * np.sin(np.pi * k / N) ** 2)
    W = fourier_basis(N)
    Q = real_part(-1j * d * (W.conj() * c) @ W.T)
    return (Q - Q.T) / 2, 1j * d * c


def leading_mode_all_sensors(N: int, p: int) -> int:
    """The q in 1..N with q (p-1) = 1 mod N."""
    if math.gcd(p - 1, N) != 1:
        raise InvalidInputError(f"p-1 = {p - 1} has no inverse mod {N}")
    return wrap(pow(p - 1, -1, N), N)


def cyclic_order_permutation(N: int, p: int, construction: str = "formula") -> np.ndarray:
    """Cyclic order of the phases of the leading all-sensor mode.

    "formula": sigma(n) = N - (n-1)(p-1) mod N.
    "inverse": sigma solves q (sigma(n) - 1) = n - 1 mod N with q (p-1) = 1, i.e.
    sigma(n) = 1 + (n-1)(p-1) mod N; this one sorts the phases of w_q into
    ascending order on [0, 2 pi). The two are reversals of each other up to a
    cyclic shift.
    """
    if math.gcd(p - 1, N) != 1:
        raise InvalidInputError(f"p-1 = {p - 1} has no inverse mod {N}")
    n = np.arange(1, N + 1)
    if construction == "formula":
        return wrap(N - (n - 1) * (p - 1), N)
    if construction == "inverse":
        return wrap(1 + (n - 1) * (p - 1), N)
    raise InvalidInputError(f"unknown construction {construction!r}")


# --- numerical conjecture report -------------------------------------------


@dataclass
class ConjectureRecord:
    N: int
    check: str
    measured: float
    conjectured: float
    passed: bool
    detail: str = ""


@dataclass
class ConjectureReport:
    records: list = field(default_factory=list)

    def add(self, *args, **kwargs):
        self.records.append(ConjectureRecord(*args, **kwargs))

    def violations(self, checks=None) -> list:
        return [r for r in self.records if not r.passed and (checks is None or r.check in checks)]

    def by_check(self, check: str) -> list:
        return [r for r in self.records if r.check == check]


def _top_eig(H):
    lam, V = np.linalg.eigh(H)
    return lam[::-1], normalize_phase(V[:, -1])


def _phase_run(v: np.ndarray) -> int:
    """Length K' of the run 0 = Arg(v_N) < Arg(v_{N-1}) < ... < pi, counted from the end."""
    ph = np.angle(v)
    run = 1
    for n in range(len(v) - 2, -1, -1):
        if ph[n] > ph[n + 1] and ph[n] < np.pi:
            run += 1
        else:
            break
    return run


def numeric_conjecture_checks(N_values, tol: float = 1e-10, multi_N=None) -> ConjectureReport:
    """Measure the binomial-matrix conjectures for each N (N <= 64).

    Check names: "lambda1_bounded", "lambda1_nondecreasing", "lambda1_limit",
    "lambda3_limit", "moduli_increasing", "interlacing", "minor_ordering",
    "gershgorin_limit", "phase_run", "multi_phase", "multi_moduli".
    Conjectured limits are reported alongside measurements; nothing is asserted.
    """
    report = ConjectureReport()
    prev = None
    for N in sorted(N_values):
        if N > 64:
            raise InvalidInputError("conjecture checks are limited to N <= 64")
        H = binomial_matrix(N)
        lam, v = _top_eig(H)
        l1 = float(lam[0])
        report.add(N, "lambda1_bounded", l1, 1.0, l1 <= 1 + tol)
        if prev is not None and prev[0] == N - 1:
            report.add(N, "lambda1_nondecreasing", l1 - prev[1], 0.0, l1 >= prev[1] - tol)
        prev = (N, l1)
        report.add(N, "lambda1_limit", abs(l1 - 2 / np.pi), 0.0, True, "distance to 2/pi")
        if N >= 3:
            report.add(N, "lambda3_limit", abs(float(lam[2]) - 2 / (3 * np.pi)), 0.0, True, "distance to 2/(3 pi)")
        mod = np.abs(v)
        inc = np.diff(mod[: N - 1]) if N > 2 else np.array([1.0])
        report.add(N, "moduli_increasing", float(inc.min()), 0.0, bool(np.all(inc > 1e-12)),
                   "min successive modulus increase over 1..N-1")
        worst = max(interlacing_violation(H, j) for j in range(1, N + 1))
        report.add(N, "interlacing", worst, 0.0, worst <= tol)
        minors = [float(np.linalg.eigvalsh(principal_minor(H, j))[-1]) for j in range(1, N + 1)]
        ordered = all(minors[j + 1] < minors[j] for j in range(N - 1)) and minors[0] < l1
        report.add(N, "minor_ordering", float(minors[0]), l1, ordered, "largest minor eigenvalue vs lambda1")
        R = gershgorin_radii(H)
        for j in range(0, min(N, 4)):
            limit = 1.0 if j == 0 else math.comb(2 * j, j) / 2 ** (2 * j - 1)
            r = float(R[N - j - 1])
            report.add(N, "gershgorin_limit", r, limit, r <= limit + tol, f"R_(N,N-{j})")
        report.add(N, "phase_run", _phase_run(v), N, True, "trailing increasing-phase run length")
    for N in (multi_N if multi_N is not None else []):
        for L in range(1, N - 1):
            net = PropagationNetwork(N, 2, -1.0, 1.0)
            # orientation of the binomial matrix: the negated second-regime matrix
            A = -q_multi_second_regime(net, L)
            _, w = _top_eig(1j * A)
            ph, mod = np.angle(w), np.abs(w)
            tail = ph[N - L:]
            ok_ph = abs(ph[N - L]) < 1e-9 and bool(np.all(np.diff(tail) < 0))
            report.add(N, "multi_phase", float(L), 0.0, ok_ph, f"L={L}")
            peak = N - L  # 0-based index of sensor N-L+1
            ok_mod = bool(np.all(np.diff(mod[: peak + 1]) > 0) and np.all(np.diff(mod[peak:]) < 0))
            report.add(N, "multi_moduli", float(np.argmax(mod) + 1), float(peak + 1), ok_mod, f"L={L}")
    return report


def first_regime_vectors(net: PropagationNetwork, s: int, d: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """(a, b) with a b^T - b a^T = first-regime lead matrix (b_p < 0)."""
    c = np.sqrt(-d * net.b_p / (2 * net.epsilon))
    a = c * np.eye(net.N)[s - 1]
    b = c * np.eye(net.N)[wrap(s + 1 - net.p, net.N) - 1]
    return a, b

