"""Numerical range, numerical radius and enclosing smooth domains.

The numerical range is traced with the usual Hermitian-part sweep: for each
direction ``theta`` the largest eigenvalue of
``H(theta) = (exp(-i theta) A + exp(i theta) A^*) / 2`` is the support
function of W(A) and its eigenvector gives the touching boundary point.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .geometry import SupportDomain, boundary_nodes, make_disk

ENCLOSE_SAMPLES = 4096
ENCLOSE_DEGREE = 64


class EnclosureError(RuntimeError):
    """Smoothing of the numerical range failed to keep the requested margin."""


def as_matrix(A) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def matrix_to_json(A) -> dict:
    A = as_matrix(A)
    return {"dim": A.shape[0], "re": A.real.tolist(), "im": A.imag.tolist()}


def matrix_from_json(obj: dict) -> np.ndarray:
    A = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj.get("im", 0.0), dtype=float)
    A = as_matrix(A)
    if "dim" in obj and obj["dim"] != A.shape[0]:
        raise ValueError(f"dim {obj['dim']} does not match matrix shape {A.shape}")
    return A


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_json(json.load(fh))


def hermitian_part(A, theta) -> np.ndarray:
    """``(e^{-i theta} A + e^{i theta} A^*) / 2``; batched over an array of angles."""
    A = as_matrix(A)
    e = np.exp(-1j * np.asarray(theta, dtype=float))[..., None, None]
    return (e * A + np.conj(e) * A.conj().T) / 2


def _sweep(A, theta):
    lam, vec = np.linalg.eigh(hermitian_part(A, theta))
    v = vec[..., :, -1]
    points = np.einsum("...i,ij,...j->...", v.conj(), A, v)
    return lam[..., -1], points


def numrange_support(A, theta: float) -> tuple[float, complex]:
    s, p = _sweep(A, float(theta))
    return float(s), complex(p)


@dataclass(frozen=True)
class NumrangeBoundary:
    angles: np.ndarray
    support_values: np.ndarray
    points: np.ndarray

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theta", "support", "pt_re", "pt_im"])
            for t, s, p in zip(self.angles, self.support_values, self.points):
                w.writerow([repr(float(t)), repr(float(s)), repr(float(p.real)), repr(float(p.imag))])


def numrange_boundary(A, M: int = 512) -> NumrangeBoundary:
    if M < 8:
        raise ValueError("need at least 8 angles")
    theta = 2 * np.pi * np.arange(M) / M
    s, p = _sweep(A, theta)
    return NumrangeBoundary(theta, s, p)


def _refine_max(func, theta, values, arcs: int = 3, xatol: float = 1e-12):
    """Refine the maximum of a periodic sampled function on its best arcs."""
    dt = theta[1] - theta[0]
    best = float(np.max(values))
    for k in np.argsort(values)[::-1][:arcs]:
        res = minimize_scalar(lambda t: -func(t), bounds=(theta[k] - dt, theta[k] + dt),
                              method="bounded", options={"xatol": xatol})
        best = max(best, -float(res.fun))
    return best


def numerical_radius(A, M: int = 512) -> float:
    """``max_theta lambda_max(H(theta))``, which equals ``max |z|`` over W(A)."""
    A = as_matrix(A)
    b = numrange_boundary(A, M)
    return _refine_max(lambda t: numrange_support(A, t)[0], b.angles, b.support_values)


def contains_numrange(domain: SupportDomain, A, margin: float = 0.0, n: int = 1024) -> bool:
    """True iff ``nu (conj(sigma) - A^*) + conj(nu) (sigma - A)`` exceeds ``margin`` at all nodes."""
    return bool(numrange_gap(domain, A, n) > margin)


def numrange_gap(domain: SupportDomain, A, n: int = 1024) -> float:
    """Smallest eigenvalue of the boundary positivity matrices over ``n`` nodes."""
    A = as_matrix(A)
    nodes = boundary_nodes(domain, n)
    eye = np.eye(A.shape[0])
    nu = nodes.nu[:, None, None]
    sig = nodes.sigma[:, None, None]
    M = nu * (np.conj(sig) * eye - A.conj().T) + np.conj(nu) * (sig * eye - A)
    M = (M + M.conj().transpose(0, 2, 1)) / 2
    return float(np.min(np.linalg.eigvalsh(M)[:, 0]))


def jackson_factors(degree: int) -> np.ndarray:
    """Fourier damping factors of the nonnegative Jackson kernel of given degree."""
    m = degree // 2 + 1
    L = 8 * (degree + 2)
    t = 2 * np.pi * np.arange(L) / L
    with np.errstate(invalid="ignore", divide="ignore"):
        k = (np.sin(m * t / 2) / np.sin(t / 2)) ** 4
    k[0] = float(m) ** 4
    c = np.fft.rfft(k).real
    return c[: degree + 1] / c[0]


def enclosing_domain(A, delta: float, degree: int = ENCLOSE_DEGREE,
                     samples: int = ENCLOSE_SAMPLES) -> SupportDomain:
    """Smooth convex domain containing ``W(A) + delta * disk``.

    The sampled support function of W(A) about its centroid is convolved with
    the Jackson kernel; since the kernel is nonnegative the radius of curvature
    ``h + h''`` stays nonnegative, and a constant lift restores
    ``h_domain >= h_W + delta`` everywhere.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    A = as_matrix(A)
    centroid = complex(np.mean(numrange_boundary(A, 512).points))
    theta = 2 * np.pi * np.arange(samples) / samples
    lam, pts = _sweep(A, theta)
    s = lam - (np.exp(-1j * theta) * centroid).real
    R = float(np.max(np.abs(pts - centroid)))
    width = float(np.min(s[: samples // 2] + s[samples // 2:]))
    if width <= 1e-10 * max(R, 1.0):
        return make_disk(centroid, R + delta)

    c = np.fft.rfft(s) / samples
    cos, sin = 2 * c.real[: degree + 1], -2 * c.imag[: degree + 1]
    cos[0] /= 2
    sin[0] = 0.0
    damp = jackson_factors(degree)
    smooth = SupportDomain(centroid, cos * damp, sin * damp)
    hs = smooth.grid_support(samples)
    # s'' >= -s >= -R and |hs''| bound interpolation error between samples
    dt = 2 * np.pi / samples
    slack = (R + float(np.max(np.abs(smooth.grid_support(samples, 2))))) * dt**2 / 8
    lift = delta + max(0.0, float(np.max(s - hs))) + slack
    cos = smooth.cos.copy()
    cos[0] += lift
    dom = SupportDomain(centroid, cos, smooth.sin)
    dom.check_convex()
    if not contains_numrange(dom, A, 0.0):
        raise EnclosureError("smoothed domain does not enclose W(A); raise degree")
    return dom


def numrange_polyline_sup(func, A, M: int = 512, refine: int = 3) -> float:
    """``max |func|`` over the boundary of W(A).

    Combines refinement along the eigenvector parametrization (curved parts)
    with refinement along the chords between consecutive support points (flat
    edges).  Every candidate lies in W(A), so the estimate never overshoots.
    """
    A = as_matrix(A)
    b = numrange_boundary(A, M)
    pts = b.points
    vals = np.abs(func(pts))
    best = _refine_max(lambda t: abs(func(numrange_support(A, t)[1])), b.angles, vals, refine)
    nxt = np.roll(pts, -1)
    edge_len = np.abs(nxt - pts)
    scale = max(float(np.max(np.abs(pts - pts.mean()))), 1e-300)
    # midpoint screening only on genuinely separated neighbours
    cand = np.flatnonzero(edge_len > 1e-3 * scale)
    if len(cand):
        t = np.linspace(0, 1, 17)
        seg = pts[cand, None] + t * (nxt - pts)[cand, None]
        segmax = np.max(np.abs(func(seg)), axis=1)
        best = max(best, float(np.max(segmax)))
        for j in cand[np.argsort(segmax)[::-1][:refine]]:
            a, d = pts[j], nxt[j] - pts[j]
            res = minimize_scalar(lambda u: -abs(func(a + u * d)), bounds=(0.0, 1.0),
                                  method="bounded", options={"xatol": 1e-12})
            best = max(best, -float(res.fun))
    return best
