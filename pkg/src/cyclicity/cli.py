"""Command-line experiments.

    cyclicity <experiment> --config <path> [--out <path>] [--seed <u64>]

Configs are JSON objects. Output is CSV preceded by one '#'-prefixed JSON
metadata line. Exit codes: 0 success, 2 invalid configuration, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import platform
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy

from . import __version__
from .circulant import CirculantSpec
from .coom import PeriodicCOOM, coom_lead_matrix, offset_cyclic_order, phase_order_recovery, sinusoid_network
from .cyclic_lead import (
    PropagationNetwork,
    binomial_matrix,
    numeric_conjecture_checks,
    q_all_sensors,
    q_multi_sensor,
    q_one_sensor,
)
from .errors import CyclicityError, InvalidInputError, NumericalError
from .ou import OUParams, check_skew
from .simulate import GAUSSIAN_METHOD, RNG_ID, SimConfig, reference_lead, simulate_lead, step_norm
from .spectral import (
    eigenvalue_ratio,
    gershgorin_radii,
    interlacing_violation,
    principal_minor,
    skew_eigendecomposition,
)

EXPERIMENTS = (
    "lambda-limit",
    "minors",
    "gershgorin",
    "slln-scatter",
    "regime-sweep",
    "coom-demo",
    "conjecture-report",
)

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


class ConfigError(InvalidInputError):
    pass


class Result:
    def __init__(self, columns, rows, **meta):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        for r in self.rows:
            if len(r) != len(self.columns):
                raise NumericalError("result table is not rectangular")
        self.meta = meta


# --- config helpers ---------------------------------------------------------


def _take(cfg: dict, allowed: dict) -> dict:
    unknown = set(cfg) - set(allowed) - {"seed"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return {k: cfg.get(k, v) for k, v in allowed.items()}


def _int(value, name, lo=None, hi=None) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if lo is not None and value < lo or hi is not None and value > hi:
        raise ConfigError(f"{name} must lie in [{lo}, {hi}], got {value}")
    return value


def _float(value, name) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{name} must be a finite number, got {value!r}")
    return float(value)


def _int_range(cfg, lo_default, hi_default, lo_min, hi_max):
    if cfg.get("N") is not None:
        Ns = cfg["N"] if isinstance(cfg["N"], list) else [cfg["N"]]
        return [_int(n, "N", lo_min, hi_max) for n in Ns]
    lo = _int(cfg.get("N_min", lo_default), "N_min", lo_min, hi_max)
    hi = _int(cfg.get("N_max", hi_default), "N_max", lo, hi_max)
    return list(range(lo, hi + 1))


def _threads() -> int:
    raw = os.environ.get("CYCLICITY_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"CYCLICITY_THREADS must be an integer, got {raw!r}")
    return max(1, n)


def _spectrum_rows(v) -> list:
    ph = np.angle(v)
    return [[float(z.real), float(z.imag), float(a), float(m)] for z, a, m in zip(v, ph, np.abs(v))]


# --- experiments ------------------------------------------------------------


def run_lambda_limit(cfg, seed):
    c = _take(cfg, {"N": None, "N_min": 20, "N_max": 24})
    rows = []
    for N in _int_range(c, 20, 24, 2, 400):
        l1 = float(np.linalg.eigvalsh(binomial_matrix(N))[-1])
        rows.append([N, l1, abs(l1 - 2 / math.pi)])
    return Result(["N", "lambda1", "distance_to_2_over_pi"], rows)


def run_minors(cfg, seed):
    c = _take(cfg, {"N": 10})
    N = _int(c["N"], "N", 2, 400)
    H = binomial_matrix(N)
    l1 = float(np.linalg.eigvalsh(H)[-1])
    rows = []
    for j in range(1, N + 1):
        lm = float(np.linalg.eigvalsh(principal_minor(H, j))[-1])
        rows.append([j, lm, interlacing_violation(H, j)])
    return Result(["j", "lambda1_minor", "interlacing_violation"], rows, summary={"lambda1": l1})


def run_gershgorin(cfg, seed):
    c = _take(cfg, {"N": None, "N_min": 4, "N_max": 64})
    rows = []
    for N in _int_range(c, 4, 64, 2, 400):
        H = binomial_matrix(N)
        R = gershgorin_radii(H)
        exact = 1 - N / 2.0**N
        l1 = float(np.linalg.eigvalsh(H)[-1])
        if l1 > R.max() + 1e-12:
            raise NumericalError(f"Gershgorin containment violated at N={N}")
        rows.append([N, float(R[N - 2]), exact, abs(float(R[N - 2]) - exact), float(R.max()), l1])
    return Result(["N", "R_N_Nm1", "one_minus_N_over_2N", "abs_diff", "max_radius", "lambda1"], rows)


def _volatility(spec, N):
    if spec == "identity":
        return np.eye(N)
    V = np.asarray(spec, dtype=float)
    if V.ndim != 2 or V.shape[0] != N:
        raise ConfigError(f"volatility must be 'identity' or an N x M matrix with N={N}")
    return V


def run_slln_scatter(cfg, seed):
    c = _take(cfg, {"first_row": [2.1, -0.2, -0.4, -0.6, -0.8], "volatility": "identity",
                    "K": [101, 10001, 1000001], "step": 0.01, "seeds": 1})
    row = [_float(x, "first_row") for x in c["first_row"]]
    B = CirculantSpec(row).dense()
    params = OUParams(B, _volatility(c["volatility"], len(row)))
    Ks = sorted(_int(k, "K", 2) for k in c["K"])
    step = _float(c["step"], "step")
    n_seeds = _int(c["seeds"], "seeds", 1, 1000)
    seeds = [seed + i for i in range(n_seeds)]
    Q, qn = reference_lead(params)
    N = params.N
    rows = []
    for s in seeds:
        leads = simulate_lead(params, SimConfig(Ks[-1], step, s), Ks)
        for K in Ks:
            A = check_skew(leads[K])
            err = float(np.linalg.norm(A - Q) / qn) if qn > 0 else float(np.linalg.norm(A - Q))
            for m in range(N):
                for n in range(m + 1, N):
                    rows.append([s, K, m + 1, n + 1, float(A[m, n]), float(Q[m, n]), err])
    return Result(["seed", "K", "m", "n", "empirical", "theoretical", "frobenius_error"], rows,
                  step_norm=step_norm(params, step))


def _noise(net, noise, d):
    kind = noise.get("kind")
    if kind == "one":
        s = _int(noise.get("s", net.N), "noise.s", 1, net.N)
        return [s], (lambda nt: q_one_sensor(nt, s, d))
    if kind == "last":
        L = _int(noise.get("L"), "noise.L", 1, net.N)
        return list(range(net.N - L + 1, net.N + 1)), (lambda nt: q_multi_sensor(nt, L, d))
    if kind == "all":
        return list(range(1, net.N + 1)), (lambda nt: q_all_sensors(nt, d)[0])
    raise ConfigError(f"noise.kind must be 'one', 'last' or 'all', got {kind!r}")


def run_regime_sweep(cfg, seed):
    c = _take(cfg, {"N": 100, "p": 2, "b_p": -1.0,
                    "epsilons": [1e-11, 1e-10, 1e-1, 1.0, 1e3, 1e4],
                    "noise": {"kind": "one"}, "d": 1.0, "mode": "theoretical",
                    "K": 1000001, "step": 0.01})
    N, p = _int(c["N"], "N", 3, 500), _int(c["p"], "p", 2)
    b_p, d = _float(c["b_p"], "b_p"), _float(c["d"], "d")
    eps = [_float(e, "epsilons") for e in c["epsilons"]]
    if not eps or any(e <= 0 for e in eps):
        raise ConfigError("epsilons must be a non-empty list of positive numbers")
    if not isinstance(c["noise"], dict):
        raise ConfigError("noise must be an object")
    mode = c["mode"]
    if mode not in ("theoretical", "empirical"):
        raise ConfigError(f"mode must be 'theoretical' or 'empirical', got {mode!r}")
    nets = [PropagationNetwork(N, p, b_p, e) for e in eps]
    sensors, closed_form = _noise(nets[0], c["noise"], d)
    K, step = _int(c["K"], "K", 2), _float(c["step"], "step")
    norms = []

    def one(net):
        if mode == "theoretical":
            return closed_form(net)
        Sig = np.zeros((N, N))
        for s in sensors:
            Sig[s - 1, s - 1] = math.sqrt(2 * d)
        params = OUParams(net.friction().dense(), Sig)
        norms.append(step_norm(params, step))
        return simulate_lead(params, SimConfig(K, step, seed))[K]

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        mats = list(pool.map(one, nets))
    rows = []
    for e, Q in zip(eps, mats):
        check_skew(Q)
        spec = skew_eigendecomposition(Q)
        ratio = eigenvalue_ratio(Q)
        for n, vals in enumerate(_spectrum_rows(spec.leading_eigenvector), start=1):
            rows.append([e, n] + vals + [ratio])
    return Result(["epsilon", "n", "re_v1", "im_v1", "phase", "modulus", "ratio_l1_l3"], rows,
                  step_norm=max(norms) if norms else None)


def run_coom_demo(cfg, seed):
    c = _take(cfg, {"N": 10, "period": None, "fourier": None, "scales": None, "offsets": None})
    N = _int(c["N"], "N", 2, 10000)
    if c["fourier"] is None:
        model = sinusoid_network(N)
    else:
        four = {int(k): complex(*v) for k, v in c["fourier"].items()}
        model = PeriodicCOOM(_float(c["period"] or 1.0, "period"), four,
                             c["scales"] or np.ones(N), c["offsets"] or np.arange(N) / N)
    A = check_skew(coom_lead_matrix(model))
    ref = offset_cyclic_order(model.offsets, model.period)
    rep = phase_order_recovery(A, ref)
    position = np.empty(model.N, dtype=int)
    position[rep.order - 1] = np.arange(1, model.N + 1)
    rows = [[n + 1, float(model.offsets[n])] + vals + [int(position[n])]
            for n, vals in enumerate(_spectrum_rows(rep.leading_eigenvector))]
    return Result(["n", "offset", "re_v1", "im_v1", "phase", "modulus", "phase_rank"], rows,
                  summary={"ratio_l1_l3": rep.ratio, "orientation": rep.orientation})


def run_conjecture_report(cfg, seed):
    c = _take(cfg, {"N": None, "N_min": 3, "N_max": 64, "multi_N": [10]})
    Ns = _int_range(c, 3, 64, 2, 64)
    multi = [_int(n, "multi_N", 3, 64) for n in c["multi_N"]]
    rep = numeric_conjecture_checks(Ns, multi_N=multi)
    rows = [[r.N, r.check, r.measured, r.conjectured, int(r.passed), r.detail] for r in rep.records]
    return Result(["N", "check", "measured", "conjectured", "passed", "detail"], rows,
                  summary={"observed_violations": len(rep.violations())})


RUNNERS = {
    "lambda-limit": run_lambda_limit,
    "minors": run_minors,
    "gershgorin": run_gershgorin,
    "slln-scatter": run_slln_scatter,
    "regime-sweep": run_regime_sweep,
    "coom-demo": run_coom_demo,
    "conjecture-report": run_conjecture_report,
}


# --- output -----------------------------------------------------------------


def _cell(x):
    if isinstance(x, (bool, np.bool_)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


def render(result: Result, meta: dict) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=True, default=str) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(result.columns)
    for r in result.rows:
        w.writerow([_cell(x) for x in r])
    return buf.getvalue()


def write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cyclicity-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(experiment: str, config: dict, seed: int) -> tuple[Result, dict]:
    if experiment not in RUNNERS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    t0 = time.perf_counter()
    result = RUNNERS[experiment](config, seed)
    meta = {
        "experiment": experiment,
        "config": config,
        "seed": seed,
        "rng": RNG_ID,
        "gaussian": GAUSSIAN_METHOD,
        "versions": {"cyclicity": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "threads": _threads(),
        "wall_time_s": round(time.perf_counter() - t0, 6),
        "step_norm": result.meta.get("step_norm"),
    }
    if "summary" in result.meta:
        meta["summary"] = result.meta["summary"]
    return result, meta


def _parse_seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def main(argv=None) -> int:
    parser = _Parser(prog="cyclicity", description="Cyclicity analysis experiments.")
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--out", help="output CSV path (default: stdout)")
    parser.add_argument("--seed", type=_parse_seed, help="unsigned 64-bit seed (overrides config)")
    args = parser.parse_args(argv)
    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cyclicity: error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        seed = args.seed if args.seed is not None else _parse_seed(str(config.get("seed", 0)))
    except (argparse.ArgumentTypeError, AttributeError) as exc:
        print(f"cyclicity: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        result, meta = run(args.experiment, config, seed)
        text = render(result, meta)
    except NumericalError as exc:
        print(f"cyclicity: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (CyclicityError, ValueError, TypeError, KeyError) as exc:
        print(f"cyclicity: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        print(f"cyclicity: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
