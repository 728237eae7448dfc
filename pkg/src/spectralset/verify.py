"""Randomized property campaigns for the spectral-set inequalities.

Each campaign draws independent trials from per-trial generators seeded by
``(seed, trial)`` so any recorded worst case can be replayed exactly.  A
campaign can only falsify a bound or lower-bound a constant; it never proves
anything.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
import shapely

from .cauchy import (OperatorKernelCache, balance_operator, balance_operator_kernel,
                     cauchy_matrix, conjugate_transform_boundary, spectral_norm)
from .geometry import SupportDomain, boundary_nodes, make_disk, make_ellipse
from .holofun import BoundarySamples, RationalFun, boundary_trace, in_sector, sup_norm
from .numrange import (contains_numrange, enclosing_domain, matrix_to_json,
                       numerical_radius, numrange_boundary)

SQRT2 = math.sqrt(2.0)
CROUZEIX_PALENCIA = 1.0 + SQRT2

DEFAULT_TOLERANCES = {
    "lemma1_norm": 1e-7,
    "lemma1_hull": 1e-6,
    "lemma2": 1e-7,
    "lemma2_formulas": 1e-9,
    "theorem_bound": 1e-6,
    "theorem_factorization": 1e-7,
    "theorem_singular": 1e-6,
    "radius": 1e-6,
    "sector": 1e-6,
    "bs_bound": 1e-6,
    "bs_representation": 1e-9,
}

CHECK_NAMES = ("lemma1", "lemma2", "theorem", "radius", "sector", "bs")


@dataclass(frozen=True)
class Ensemble:
    """Random-instance ensemble shared by all campaigns."""

    dims: tuple[int, int] = (2, 6)
    max_degree: int = 8
    # enclosing margin as a fraction of diam W(A)
    delta: tuple[float, float] = (0.02, 0.1)
    nodes: int = 1024


@dataclass
class CheckReport:
    check_name: str
    trials: int
    violations: int
    worst_margin: float
    worst_case: dict
    sub_margins: dict = field(default_factory=dict)
    excluded: int = 0
    extras: dict = field(default_factory=dict)
    seed: int = 0
    ensemble: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


@dataclass
class _Trial:
    margin: float
    subs: dict
    violated: bool
    case: dict
    excluded: bool = False
    extras: dict = field(default_factory=dict)


# random instances ---------------------------------------------------------

def random_matrix(rng, n: int) -> np.ndarray:
    """Complex Ginibre matrix normalized to numerical radius 1."""
    A = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / SQRT2
    return A / numerical_radius(A)


def random_disc_coeffs(rng, k: int) -> np.ndarray:
    """``k`` complex numbers uniform in the closed unit disk."""
    return np.sqrt(rng.uniform(size=k)) * np.exp(2j * np.pi * rng.uniform(size=k))


def random_polynomial(rng, degree: int, constant_term: bool = True) -> RationalFun:
    c = random_disc_coeffs(rng, degree + 1)
    if not constant_term:
        c[0] = 0.0
    c[-1] = c[-1] if abs(c[-1]) > 1e-3 else 1e-3
    return RationalFun.polynomial(c)


def random_domain(rng) -> SupportDomain:
    """Random ellipse or random smooth convex support function."""
    center = complex(*rng.uniform(-1, 1, 2))
    if rng.uniform() < 0.5:
        a, b = rng.uniform(0.5, 2.0, 2)
        return make_ellipse(center, a, b, rng.uniform(0, np.pi))
    r0 = rng.uniform(0.5, 2.0)
    K = int(rng.integers(2, 7))
    k = np.arange(2, K + 1)
    raw = rng.standard_normal((2, len(k))) / k**3
    # keep sum (k^2 - 1) |c_k| below 0.7 r0 so h + h'' >= 0.3 r0
    budget = 0.7 * r0 / np.sum((k**2 - 1) * np.hypot(raw[0], raw[1]))
    raw *= min(1.0, budget)
    cos = np.concatenate([[r0, 0.0], raw[0]])
    sin = np.concatenate([[0.0, 0.0], raw[1]])
    dom = SupportDomain(center, cos, sin)
    dom.check_convex()
    return dom


def _matrix_setup(rng, ens: Ensemble):
    n = int(rng.integers(ens.dims[0], ens.dims[1] + 1))
    A = random_matrix(rng, n)
    pts = numrange_boundary(A, 256).points
    diam = float(np.max(np.abs(pts[:, None] - pts[None, :])))
    delta = rng.uniform(*ens.delta) * max(diam, 1e-3)
    domain = enclosing_domain(A, delta)
    return A, domain, delta


def _normalized(f: RationalFun, domain: SupportDomain) -> RationalFun:
    return f * (1.0 / sup_norm(f, domain, 1024))


def _case(A=None, f=None, domain=None, **kw) -> dict:
    out = dict(kw)
    if A is not None:
        out["A"] = matrix_to_json(A)
    if f is not None:
        out["f"] = f.to_json()
    if domain is not None:
        out["domain"] = domain.to_json()
    return out


# trials -------------------------------------------------------------------

def _trial_lemma1(rng, ens, tol):
    domain = random_domain(rng)
    f = _normalized(random_polynomial(rng, int(rng.integers(0, ens.max_degree + 1))), domain)
    fsup = sup_norm(f, domain)
    g = conjugate_transform_boundary(f, domain, ens.nodes)
    fbar = np.conj(f(g.nodes.sigma))
    hull = shapely.MultiPoint(np.column_stack([fbar.real, fbar.imag])).convex_hull
    dist = shapely.distance(hull, shapely.points(np.column_stack([g.values.real, g.values.imag])))
    norm_slack = fsup - g.max_abs()
    hull_slack = -float(np.max(dist))
    violated = norm_slack < -tol["lemma1_norm"] or -hull_slack > tol["lemma1_hull"]
    return _Trial(norm_slack, {"norm": norm_slack, "hull": hull_slack}, violated,
                  _case(f=f, domain=domain))


def random_trig_samples(rng, nodes, max_freq: int = 8) -> BoundarySamples:
    k = np.arange(-max_freq, max_freq + 1)
    c = random_disc_coeffs(rng, len(k)) / np.maximum(1, np.abs(k))
    return BoundarySamples(nodes, np.exp(1j * np.multiply.outer(nodes.theta, k)) @ c)


def _trial_lemma2(rng, ens, tol):
    A, domain, delta = _matrix_setup(rng, ens)
    cache = OperatorKernelCache.build(A, domain, ens.nodes)
    phi = random_trig_samples(rng, cache.nodes)
    S = balance_operator(phi, cache=cache)
    S_kernel = balance_operator_kernel(phi, cache=cache)
    slack = 2 * phi.max_abs() - spectral_norm(S)
    agree = spectral_norm(S - S_kernel)
    violated = slack < -tol["lemma2"] or agree > tol["lemma2_formulas"]
    return _Trial(slack, {"bound": slack, "formulas": -agree}, violated,
                  _case(A, None, domain, delta=delta, margin=cache.margin))


def theorem_quantities(f: RationalFun, cache: OperatorKernelCache, domain: SupportDomain,
                       n: int) -> dict:
    """Operator pieces of the factorization ``lambda^2 - f(A)^* f(A) = (I - S^* h(A))(lambda^2 + fg(A))``.

    When ``||f(A)|| <= 1`` an artificial ``lambda = 1.5`` is used for the
    (purely algebraic) factorization check.
    """
    nodes = cache.nodes
    fvals = f(nodes.sigma)
    fA = cache.contour_sum(fvals)
    lam_true = spectral_norm(fA)
    lam = lam_true if lam_true > 1 else 1.5
    g = conjugate_transform_boundary(f, domain, n)
    gA = cauchy_matrix(g, cache=cache)
    S = fA + gA.conj().T
    eye = np.eye(fA.shape[0])
    fgA = gA @ fA
    hvals = fvals / (lam**2 + fvals * g.values)
    hA = cache.contour_sum(hvals)
    lhs = lam**2 * eye - fA.conj().T @ fA
    rhs = (eye - S.conj().T @ hA) @ (lam**2 * eye + fgA)
    defect = lam_true**2 * eye - fA.conj().T @ fA
    return {
        "fA": fA,
        "lambda": lam_true,
        "lambda_used": lam,
        "residual": spectral_norm(lhs - rhs),
        "h_sup": float(np.max(np.abs(hvals))),
        "h_bound": 1.0 / (lam**2 - 1.0),
        "sigma_min": float(np.linalg.eigvalsh((defect + defect.conj().T) / 2)[0]),
        "S_norm": spectral_norm(S),
    }


def _trial_theorem(rng, ens, tol):
    A, domain, delta = _matrix_setup(rng, ens)
    f = _normalized(random_polynomial(rng, int(rng.integers(1, ens.max_degree + 1))), domain)
    cache = OperatorKernelCache.build(A, domain, ens.nodes)
    q = theorem_quantities(f, cache, domain, ens.nodes)
    bound = CROUZEIX_PALENCIA - q["lambda"]
    fact = tol["theorem_factorization"] * q["lambda_used"] ** 2 - q["residual"]
    sing = tol["theorem_singular"] - abs(q["sigma_min"])
    violated = bound < -tol["theorem_bound"] or fact < 0 or sing < 0
    return _Trial(bound, {"bound": bound, "factorization": fact, "singular": sing,
                          "h_norm": q["h_bound"] - q["h_sup"]}, violated,
                  _case(A, f, domain, delta=delta, margin=cache.margin),
                  extras={"ratio": q["lambda"]})


def _trial_radius(rng, ens, tol):
    A, domain, delta = _matrix_setup(rng, ens)
    f = _normalized(random_polynomial(rng, int(rng.integers(1, ens.max_degree + 1))), domain)
    cache = OperatorKernelCache.build(A, domain, ens.nodes)
    fA = cache.contour_sum(f(cache.nodes.sigma))
    w = numerical_radius(fA)
    slack = SQRT2 - w
    return _Trial(slack, {"bound": slack}, slack < -tol["radius"],
                  _case(A, f, domain, delta=delta), extras={"ratio": w})


def _trial_sector(rng, ens, tol):
    A, domain, delta = _matrix_setup(rng, ens)
    p = _normalized(random_polynomial(rng, int(rng.integers(1, max(1, ens.max_degree // 2) + 1))),
                    domain)
    # |arg(c + p)| <= asin(1/c) <= pi/8 so the square lies in |arg| <= pi/4
    c = rng.uniform(1.0, 3.0) / math.sin(math.pi / 8)
    f = (p + c) * (p + c)
    case = _case(A, f, domain, delta=delta)
    if not in_sector(f, domain, math.pi / 4):
        return _Trial(np.inf, {}, False, case, excluded=True)
    f = _normalized(f, domain)
    cache = OperatorKernelCache.build(A, domain, ens.nodes)
    lam = spectral_norm(cache.contour_sum(f(cache.nodes.sigma)))
    slack = 2.0 - lam
    return _Trial(slack, {"bound": slack}, slack < -tol["sector"], _case(A, f, domain, delta=delta),
                  extras={"ratio": lam})


def _trial_bs(rng, ens, tol):
    n = int(rng.integers(ens.dims[0], ens.dims[1] + 1))
    A = random_matrix(rng, n) * rng.uniform(0.3, 0.95)
    disk = make_disk(0.0, 1.0)
    f = _normalized(random_polynomial(rng, int(rng.integers(1, ens.max_degree + 1)),
                                      constant_term=False), disk)
    cache = OperatorKernelCache.build(A, disk, ens.nodes)
    fA = cache.contour_sum(f(cache.nodes.sigma))
    S = balance_operator(boundary_trace(f, cache.nodes), cache=cache)
    slack = 2.0 - spectral_norm(fA)
    rep = spectral_norm(S - fA)
    violated = slack < -tol["bs_bound"] or rep > tol["bs_representation"]
    return _Trial(slack, {"bound": slack, "representation": -rep}, violated,
                  _case(A, f, disk, margin=cache.margin), extras={"ratio": spectral_norm(fA)})


TRIALS: dict[str, Callable] = {
    "lemma1": _trial_lemma1,
    "lemma2": _trial_lemma2,
    "theorem": _trial_theorem,
    "radius": _trial_radius,
    "sector": _trial_sector,
    "bs": _trial_bs,
}


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(trial)])


def _run_one(name, seed, i, ens, tol) -> _Trial:
    return TRIALS[name](trial_rng(seed, i), ens, tol)


def run_check(name: str, ensemble: Ensemble | None = None, trials: int = 100, seed: int = 0,
              tolerances: dict | None = None, threads: int = 1) -> CheckReport:
    if name not in TRIALS:
        raise KeyError(f"unknown check {name!r}; valid: {', '.join(CHECK_NAMES)}")
    if trials < 1:
        raise ValueError("a campaign needs at least one trial")
    ens = ensemble or Ensemble()
    tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
    run = lambda i: _run_one(name, seed, i, ens, tol)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(run, range(trials)))
    else:
        results = [run(i) for i in range(trials)]

    kept = [(i, r) for i, r in enumerate(results) if not r.excluded]
    violations = sum(r.violated for _, r in kept)
    subs: dict = {}
    for _, r in kept:
        for k, v in r.subs.items():
            subs[k] = min(subs.get(k, np.inf), float(v))
    worst_case, worst = {}, np.inf
    if kept:
        # first index wins ties so the report is independent of scheduling
        i, r = min(kept, key=lambda ir: (ir[1].margin, ir[0]))
        worst = float(r.margin)
        worst_case = {"seed": seed, "trial": i, **r.case}
    extras = {}
    ratios = [r.extras["ratio"] for _, r in kept if "ratio" in r.extras]
    if ratios:
        cmax = float(max(ratios))
        extras["max_ratio"] = cmax
        if name == "theorem":
            # the quadratic inequality concerns the supremum only
            extras["quadratic_holds"] = bool(cmax**2 <= 2 * cmax + 1 + 1e-12)
    return CheckReport(name, trials, int(violations), worst, worst_case, subs,
                       excluded=len(results) - len(kept), extras=extras, seed=seed,
                       ensemble=asdict(ens))


def reevaluate(report: CheckReport, tolerances: dict | None = None) -> float:
    """Replay the recorded worst case and return its margin."""
    ens = Ensemble(**{k: tuple(v) if isinstance(v, list) else v
                      for k, v in report.ensemble.items()}) if report.ensemble else Ensemble()
    tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
    wc = report.worst_case
    return float(_run_one(report.check_name, wc["seed"], wc["trial"], ens, tol).margin)


def check_lemma1(ensemble=None, trials=200, seed=0, **kw) -> CheckReport:
    return run_check("lemma1", ensemble, trials, seed, **kw)


def check_lemma2(ensemble=None, trials=200, seed=0, **kw) -> CheckReport:
    return run_check("lemma2", ensemble, trials, seed, **kw)


def check_theorem(ensemble=None, trials=100, seed=0, **kw) -> CheckReport:
    return run_check("theorem", ensemble, trials, seed, **kw)


def check_radius(ensemble=None, trials=100, seed=0, **kw) -> CheckReport:
    return run_check("radius", ensemble, trials, seed, **kw)


def check_sector(ensemble=None, trials=100, seed=0, **kw) -> CheckReport:
    return run_check("sector", ensemble, trials, seed, **kw)


def check_berger_stampfli(ensemble=None, trials=100, seed=0, **kw) -> CheckReport:
    return run_check("bs", ensemble, trials, seed, **kw)
