"""Derivative-free search for large ``||f(A)|| / max_{W(A)} |f|``.

The objective has eigenvalue and singular-value kinks, so it is maximized with
Nelder-Mead from several restarts.  Each restart is deterministic in its own
sub-seed; restart 0 starts next to the 2x2 nilpotent extremal (ratio 2).
"""
from __future__ import annotations

import csv
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from .cauchy import adaptive_fun_calculus, spectral_norm
from .holofun import PoleError, RationalFun, check_poles
from .numrange import as_matrix, enclosing_domain, matrix_to_json, numrange_polyline_sup
from .verify import CROUZEIX_PALENCIA

log = logging.getLogger(__name__)

GUARD = CROUZEIX_PALENCIA + 1e-6


@dataclass(frozen=True)
class SearchConfig:
    dim: int = 2
    degree: int = 1
    restarts: int = 8
    iterations: int = 200
    delta: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.dim <= 8:
            raise ValueError("dim must lie in 1..8")
        if not 1 <= self.degree <= 12:
            raise ValueError("degree must lie in 1..12")
        if self.restarts < 1 or self.iterations < 1:
            raise ValueError("restarts and iterations must be positive")
        if not 1e-4 <= self.delta <= 1e-1:
            raise ValueError("delta must lie in [1e-4, 1e-1]")


@dataclass
class SearchResult:
    best_ratio: float
    best_A: np.ndarray
    best_f: RationalFun
    history: list = field(default_factory=list)
    config: SearchConfig | None = None
    evaluations: int = 0
    failures: int = 0
    guard_violations: int = 0

    def to_json(self) -> dict:
        return {
            "best_ratio": self.best_ratio,
            "best_A": matrix_to_json(self.best_A),
            "best_f": self.best_f.to_json(),
            "config": asdict(self.config) if self.config else None,
            "evaluations": self.evaluations,
            "failures": self.failures,
            "guard_violations": self.guard_violations,
            "bound": CROUZEIX_PALENCIA,
        }

    def write_json(self, path=None) -> None:
        text = json.dumps(self.to_json(), indent=2, sort_keys=True)
        if path is None:
            sys.stdout.write(text + "\n")
        else:
            with open(path, "w") as fh:
                fh.write(text + "\n")

    def write_history_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["evaluation", "best_ratio"])
            for i, r in self.history:
                w.writerow([i, repr(float(r))])


def ratio(f: RationalFun, A, delta: float = 0.05) -> float:
    """``||f(A)||`` (contour calculus on the delta-enlarged domain) over ``max |f|`` on dW(A)."""
    A = as_matrix(A)
    domain = enclosing_domain(A, delta)
    check_poles(f, domain)
    fA, _ = adaptive_fun_calculus(f, A, domain)
    sup = numrange_polyline_sup(f, A)
    if sup <= 0:
        raise ValueError("f vanishes on the numerical range")
    return spectral_norm(fA) / sup


def _unpack(x, dim, degree):
    m = dim * dim
    A = (x[:m] + 1j * x[m:2 * m]).reshape(dim, dim)
    c = x[2 * m:2 * m + degree + 1] + 1j * x[2 * m + degree + 1:]
    return A, RationalFun.polynomial(c)


def _pack(A, coeffs):
    A = np.asarray(A, complex).ravel()
    c = np.asarray(coeffs, complex)
    return np.concatenate([A.real, A.imag, c.real, c.imag])


def _start_point(rng, cfg: SearchConfig, restart: int) -> np.ndarray:
    coeffs = np.zeros(cfg.degree + 1, complex)
    if restart == 0 and cfg.dim >= 2:
        A = np.zeros((cfg.dim, cfg.dim), complex)
        A[0, 1] = 2.0
        coeffs[1] = 1.0
    else:
        A = (rng.standard_normal((cfg.dim, cfg.dim))
             + 1j * rng.standard_normal((cfg.dim, cfg.dim))) / math.sqrt(2)
        coeffs = rng.standard_normal(cfg.degree + 1) + 1j * rng.standard_normal(cfg.degree + 1)
    return _pack(A, coeffs)


def _run_restart(cfg: SearchConfig, restart: int):
    rng = np.random.default_rng([cfg.seed, restart])
    x0 = _start_point(rng, cfg, restart)
    simplex = x0 + np.vstack([np.zeros(len(x0)), 0.1 * rng.standard_normal((len(x0), len(x0)))])
    trace = []
    state = {"best": -np.inf, "x": x0, "fail": 0, "guard": 0}

    def objective(x):
        A, f = _unpack(x, cfg.dim, cfg.degree)
        try:
            r = ratio(f, A, cfg.delta)
        except (ValueError, RuntimeError, np.linalg.LinAlgError):
            state["fail"] += 1
            trace.append(np.nan)
            return 0.0
        if not np.isfinite(r):
            state["fail"] += 1
            trace.append(np.nan)
            return 0.0
        if r > GUARD:
            state["guard"] += 1
            log.warning("ratio %.12g exceeds 1+sqrt(2) at restart %d", r, restart)
        trace.append(r)
        if r > state["best"]:
            state["best"], state["x"] = r, x.copy()
        return -r

    minimize(objective, x0, method="Nelder-Mead",
             options={"maxfev": cfg.iterations, "initial_simplex": simplex,
                      "xatol": 1e-10, "fatol": 1e-12})
    return state, trace


def optimize(config: SearchConfig, threads: int = 1) -> SearchResult:
    cfg = config
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            runs = list(pool.map(lambda r: _run_restart(cfg, r), range(cfg.restarts)))
    else:
        runs = [_run_restart(cfg, r) for r in range(cfg.restarts)]
    if all(s["best"] == -np.inf for s, _ in runs):
        raise RuntimeError("every evaluation failed its preconditions")
    # strict > keeps the lowest restart index on ties
    best_state = runs[0][0]
    for s, _ in runs[1:]:
        if s["best"] > best_state["best"]:
            best_state = s
    history, best, k = [], -np.inf, 0
    for _, trace in runs:
        for r in trace:
            k += 1
            if np.isfinite(r) and r > best:
                best = r
                history.append((k, float(best)))
    A, f = _unpack(best_state["x"], cfg.dim, cfg.degree)
    return SearchResult(
        best_ratio=float(best_state["best"]), best_A=A, best_f=f, history=history, config=cfg,
        evaluations=k, failures=sum(s["fail"] for s, _ in runs),
        guard_violations=sum(s["guard"] for s, _ in runs))
