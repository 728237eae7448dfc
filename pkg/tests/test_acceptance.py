"""Acceptance criteria, one test each.

Every test prints a single ``[ACCEPT n] PASS|FAIL ...`` line (visible even
without ``-s``) and then asserts, so the pytest result and the printed line
always agree.
"""
import time

import numpy as np
import pytest

from spectralset.cauchy import (OperatorKernelCache, balance_operator, cauchy_scalar, fun_calculus,
                                spectral_norm)
from spectralset.geometry import boundary_nodes, double_layer_matrix, make_disk, mu_kernel
from spectralset.holofun import BoundarySamples, RationalFun, conj_trace
from spectralset.search import SearchConfig, optimize, ratio
from spectralset.verify import (CROUZEIX_PALENCIA, Ensemble, _matrix_setup, random_domain,
                                random_polynomial, run_check, trial_rng)

SEED = 20240611


@pytest.fixture
def report(capsys):
    def emit(n, title, ok, elapsed, budget, detail):
        ok = bool(ok) and elapsed < budget
        line = (f"[ACCEPT {n:2d}] {'PASS' if ok else 'FAIL'}  {title}: {detail}  "
                f"({elapsed:.1f}s / {budget:.0f}s)")
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return emit


def test_01_kernel_normalization(report):
    t0 = time.perf_counter()
    worst_in, worst_bd = 0.0, 0.0
    for i in range(20):
        rng = trial_rng(SEED, i)
        dom = random_domain(rng)
        nodes = boundary_nodes(dom, 512)
        ang, t = rng.uniform(0, 2 * np.pi), rng.uniform(0, 0.8)
        z = dom.center + t * (dom.point(ang) - dom.center)
        worst_in = max(worst_in, abs(np.sum(mu_kernel(nodes.sigma, nodes.nu, z) * nodes.weight) - 2))
        j = int(rng.integers(len(nodes)))
        row = double_layer_matrix(nodes)[j]
        worst_bd = max(worst_bd, abs(row @ nodes.weight - 1))
    el = time.perf_counter() - t0
    report(1, "kernel normalization", worst_in <= 1e-8 and worst_bd <= 1e-6, el, 5,
           f"interior err {worst_in:.2e} (<=1e-8), boundary err {worst_bd:.2e} (<=1e-6)")


def test_02_disk_conjugate_transform(report):
    t0 = time.perf_counter()
    nodes = boundary_nodes(make_disk(0, 1), 1024)
    rng = trial_rng(SEED, 2)
    worst = 0.0
    for _ in range(10):
        f = random_polynomial(rng, int(rng.integers(1, 9)))
        phi = conj_trace(f, nodes)
        r = 0.95 * np.sqrt(rng.uniform(size=100))
        zs = r * np.exp(2j * np.pi * rng.uniform(size=100))
        target = np.conj(f(0.0))
        worst = max(worst, max(abs(cauchy_scalar(phi, z) - target) for z in zs))
    el = time.perf_counter() - t0
    report(2, "disk remark C(conj f, z) = conj f(0)", worst <= 1e-9, el, 2,
           f"max err {worst:.2e} (<=1e-9)")


def test_03_functional_calculus_exactness(report):
    t0 = time.perf_counter()
    ens = Ensemble()
    worst = 0.0
    for i in range(25):
        rng = trial_rng(SEED + 3, i)
        A, dom, _ = _matrix_setup(rng, ens)
        f = random_polynomial(rng, int(rng.integers(1, ens.max_degree + 1)))
        exact = f.at_matrix(A)
        err = spectral_norm(fun_calculus(f, A, dom, 1024) - exact) / spectral_norm(exact)
        worst = max(worst, err)
    el = time.perf_counter() - t0
    report(3, "functional calculus vs Horner", worst <= 1e-8, el, 10,
           f"max rel err {worst:.2e} (<=1e-8)")


def test_04_lemma1_suite(report):
    t0 = time.perf_counter()
    r = run_check("lemma1", trials=200, seed=SEED)
    el = time.perf_counter() - t0
    ok = r.violations == 0 and r.sub_margins["hull"] >= -1e-6 and r.sub_margins["norm"] >= -1e-7
    report(4, "Lemma 1 suite", ok, el, 60,
           f"{r.violations} violations / {r.trials}, norm slack {r.sub_margins['norm']:.3e}, "
           f"hull slack {r.sub_margins['hull']:.2e}")


def test_05_lemma2_suite(report):
    t0 = time.perf_counter()
    r = run_check("lemma2", trials=200, seed=SEED)
    # phi = 1 gives S = 2I, the equality case
    rng = trial_rng(SEED + 5, 0)
    A, dom, _ = _matrix_setup(rng, Ensemble())
    cache = OperatorKernelCache.build(A, dom, 1024)
    S = balance_operator(BoundarySamples(cache.nodes, np.ones(len(cache.nodes))), cache=cache)
    eq = abs(spectral_norm(S) - 2.0)
    el = time.perf_counter() - t0
    ok = r.violations == 0 and r.sub_margins["bound"] >= -1e-7 and eq <= 1e-10
    report(5, "Lemma 2 suite", ok, el, 60,
           f"{r.violations} violations / {r.trials}, worst slack {r.worst_margin:.3e}, "
           f"|‖S(1,A)‖-2| = {eq:.1e} (<=1e-10)")


def test_06_theorem_suite(report):
    t0 = time.perf_counter()
    r = run_check("theorem", trials=100, seed=SEED)
    el = time.perf_counter() - t0
    s = r.sub_margins
    ok = (r.violations == 0 and s["bound"] >= -1e-6 and s["factorization"] >= 0
          and s["singular"] >= 0 and r.extras["max_ratio"] <= CROUZEIX_PALENCIA + 1e-6)
    report(6, "Theorem suite", ok, el, 120,
           f"{r.violations} violations / {r.trials}, max ratio {r.extras['max_ratio']:.4f}, "
           f"factorization slack {s['factorization']:.2e}, sigma_min slack {s['singular']:.2e}")


def test_07_lower_bound(report):
    t0 = time.perf_counter()
    r_exact = ratio(RationalFun.polynomial([0, 1]), np.array([[0, 2], [0, 0]]))
    res = optimize(SearchConfig(dim=2, degree=1))
    el = time.perf_counter() - t0
    ok = abs(r_exact - 2) <= 1e-6 and res.best_ratio >= 2 - 1e-3
    report(7, "lower bound 2 <= Q", ok, el, 60,
           f"ratio(z, 2N) = {r_exact:.12f}, optimize best {res.best_ratio:.6f} (>=1.999)")


def test_08_radius_suite(report):
    t0 = time.perf_counter()
    r = run_check("radius", trials=100, seed=SEED)
    el = time.perf_counter() - t0
    report(8, "numerical radius corollary", r.violations == 0 and r.worst_margin >= -1e-6, el, 90,
           f"{r.violations} violations / {r.trials}, max w(f(A)) {r.extras['max_ratio']:.4f}")


def test_09_sector_suite(report):
    t0 = time.perf_counter()
    r = run_check("sector", trials=100, seed=SEED)
    el = time.perf_counter() - t0
    used = r.trials - r.excluded
    ok = r.violations == 0 and used >= 100 and r.worst_margin >= -1e-6
    report(9, "sector suite", ok, el, 90,
           f"{r.violations} violations / {used} sector-valued, max ratio {r.extras['max_ratio']:.4f}")


def test_10_berger_stampfli_suite(report):
    t0 = time.perf_counter()
    r = run_check("bs", trials=100, seed=SEED)
    el = time.perf_counter() - t0
    s = r.sub_margins
    ok = r.violations == 0 and s["bound"] >= -1e-6 and s["representation"] >= -1e-9
    report(10, "Berger-Stampfli suite", ok, el, 60,
           f"{r.violations} violations / {r.trials}, max ratio {r.extras['max_ratio']:.4f}, "
           f"‖S-f(A)‖ <= {-s['representation']:.1e} (<=1e-9)")
