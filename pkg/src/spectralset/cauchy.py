"""Scalar and operator Cauchy transforms on a smooth convex contour.

Every contour integral is the periodic trapezoid rule on the nodes returned
by :func:`geometry.boundary_nodes` with ``d sigma = i nu ds``.
"""
from __future__ import annotations

import warnings

import numpy as np

from .geometry import (BoundaryNode, BoundaryNodes, SupportDomain, boundary_nodes,
                       contains, double_layer_matrix, support_distance)
from .holofun import BoundarySamples, RationalFun, check_poles, conj_trace
from .numrange import as_matrix

RESOLVENT_TOL = 1e-10


class ResolventError(RuntimeError):
    pass


class NotEnclosedError(ValueError):
    """The numerical range is not strictly inside the contour."""


class NearBoundaryWarning(UserWarning):
    pass


def spectral_norm(M) -> float:
    return float(np.linalg.norm(M, 2))


class OperatorKernelCache:
    """Resolvents ``(sigma_k I - A)^{-1}`` at all nodes, built once and shared.

    ``margin`` is the smallest eigenvalue of
    ``nu (conj(sigma) - A^*) + conj(nu) (sigma - A)`` over the nodes; it must be
    positive for the contour to enclose W(A).
    """

    def __init__(self, A, nodes: BoundaryNodes, require_enclosed: bool = True):
        A = as_matrix(A)
        self.A = A
        self.nodes = nodes
        n = A.shape[0]
        eye = np.eye(n)
        sig = nodes.sigma[:, None, None]
        nu = nodes.nu[:, None, None]
        pos = nu * (np.conj(sig) * eye - A.conj().T) + np.conj(nu) * (sig * eye - A)
        pos = (pos + pos.conj().transpose(0, 2, 1)) / 2
        self.margin = float(np.min(np.linalg.eigvalsh(pos)[:, 0]))
        if require_enclosed and not self.margin > 0:
            raise NotEnclosedError(f"W(A) not enclosed by the contour (margin {self.margin:.3e})")
        shifted = sig * eye - A
        self.resolvents = np.linalg.inv(shifted)
        resid = np.max(np.linalg.norm(shifted @ self.resolvents - eye, 2, axis=(1, 2)))
        if resid > RESOLVENT_TOL:
            raise ResolventError(f"resolvent residual {resid:.2e} exceeds {RESOLVENT_TOL}")
        self.residual = float(resid)

    @classmethod
    def build(cls, A, domain: SupportDomain, n: int = 1024) -> "OperatorKernelCache":
        return cls(A, boundary_nodes(domain, n))

    def contour_sum(self, values) -> np.ndarray:
        """``(1/2 pi i) sum_k values_k R_k dsigma_k``."""
        w = np.asarray(values, dtype=complex) * self.nodes.nu * self.nodes.weight / (2 * np.pi)
        return np.tensordot(w, self.resolvents, axes=1)

    def mu_matrices(self) -> np.ndarray:
        nu = self.nodes.nu[:, None, None]
        R = self.resolvents
        return (nu * R + np.conj(nu) * R.conj().transpose(0, 2, 1)) / (2 * np.pi)


def _cache(A, domain, n, cache) -> OperatorKernelCache:
    if cache is not None:
        return cache
    if domain is None:
        raise ValueError("need a domain or a prebuilt cache")
    return OperatorKernelCache.build(A, domain, n)


def cauchy_scalar(phi: BoundarySamples, z) -> complex:
    """Trapezoid approximation of ``(1/2 pi i) int phi(sigma) d sigma / (sigma - z)``."""
    nodes = phi.nodes
    z = complex(z)
    if not contains(nodes.domain, z):
        raise ValueError(f"{z} is not inside the domain")
    h = float(np.max(nodes.weight))
    if support_distance(nodes.domain, z) < 5 * h:
        warnings.warn("point within 5 mesh widths of the boundary; accuracy degraded",
                      NearBoundaryWarning, stacklevel=2)
    return complex(np.sum(phi.values * nodes.nu * nodes.weight / (nodes.sigma - z)) / (2 * np.pi))


def conjugate_transform_boundary(f: RationalFun, domain: SupportDomain,
                                 n: int = 1024) -> BoundarySamples:
    """Boundary values of ``g = C(conj f, .)`` from the double-layer jump formula.

    ``g(sigma_0) = int conj(f(sigma)) mu(sigma, sigma_0) ds`` with the
    curvature limit on the diagonal.
    """
    check_poles(f, domain)
    nodes = boundary_nodes(domain, n)
    fbar = conj_trace(f, nodes).values
    K = double_layer_matrix(nodes)
    return BoundarySamples(nodes, K @ (fbar * nodes.weight))


def cauchy_matrix(phi: BoundarySamples, A=None, cache: OperatorKernelCache | None = None) -> np.ndarray:
    """``C(phi, A)`` for arbitrary continuous boundary samples."""
    if cache is None:
        cache = OperatorKernelCache(A, phi.nodes)
    elif cache.nodes is not phi.nodes and not np.array_equal(cache.nodes.sigma, phi.nodes.sigma):
        raise ValueError("samples and cache use different nodes")
    return cache.contour_sum(phi.values)


def fun_calculus(f: RationalFun, A, domain: SupportDomain | None = None, n: int = 1024,
                 cache: OperatorKernelCache | None = None) -> np.ndarray:
    """``f(A)`` through the Cauchy integral over the domain boundary."""
    cache = _cache(A, domain, n, cache)
    check_poles(f, cache.nodes.domain)
    return cache.contour_sum(f(cache.nodes.sigma))


def mu_matrix(node: BoundaryNode, A) -> np.ndarray:
    """Hermitian ``(1/2 pi)(nu (sigma - A)^{-1} + conj(nu) (conj(sigma) - A^*)^{-1})``."""
    A = as_matrix(A)
    n = A.shape[0]
    R = np.linalg.inv(node.sigma * np.eye(n) - A)
    return (node.nu * R + np.conj(node.nu) * R.conj().T) / (2 * np.pi)


def balance_operator(phi: BoundarySamples, A=None,
                     cache: OperatorKernelCache | None = None) -> np.ndarray:
    """``S(phi, A) = C(phi, A) + C(conj phi, A)^*``."""
    if cache is None:
        cache = OperatorKernelCache(A, phi.nodes)
    return cauchy_matrix(phi, cache=cache) + cauchy_matrix(phi.conj(), cache=cache).conj().T


def balance_operator_kernel(phi: BoundarySamples, A=None,
                            cache: OperatorKernelCache | None = None) -> np.ndarray:
    """``S(phi, A)`` as the weighted sum of the positive kernels ``mu(sigma_k, A)``."""
    if cache is None:
        cache = OperatorKernelCache(A, phi.nodes)
    w = phi.values * cache.nodes.weight
    return np.tensordot(w, cache.mu_matrices(), axes=1)


def adaptive_fun_calculus(f: RationalFun, A, domain: SupportDomain, n0: int = 512,
                          n_max: int = 16384, rtol: float = 1e-11):
    """Contour calculus with node doubling until two successive results agree.

    Returns ``(f(A), n_used)``.
    """
    prev = fun_calculus(f, A, domain, n0)
    n = n0
    while n < n_max:
        n *= 2
        cur = fun_calculus(f, A, domain, n)
        scale = max(spectral_norm(cur), 1e-300)
        if spectral_norm(cur - prev) <= rtol * scale:
            return cur, n
        prev = cur
    raise ResolventError(f"contour quadrature did not converge by {n_max} nodes")
