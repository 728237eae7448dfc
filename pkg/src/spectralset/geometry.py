"""Smooth convex domains encoded by trigonometric support functions.

A domain is stored as its center ``c`` and the Fourier coefficients of the
support function ``h(theta)`` measured from ``c``.  The boundary point with
outward normal ``exp(i theta)`` is

    sigma(theta) = c + (h + i h') exp(i theta)

and the arclength element is ``ds = (h + h'') dtheta``, so equispaced angles
give an exact change of variables from arclength to angle.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

CONVEXITY_GRID = 4096
CONTAINS_GRID = 1024
DEFAULT_NODES = 1024
FOURIER_TOL = 1e-10
MAX_DEGREE = 2048


class GeometryError(ValueError):
    """Invalid or non-convex domain description."""


class SingularKernelError(ValueError):
    """Double-layer kernel evaluated at its own source point."""


@dataclass(frozen=True)
class SupportDomain:
    center: complex
    cos: np.ndarray
    sin: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.cos, dtype=float)).copy()
        s = np.atleast_1d(np.asarray(self.sin, dtype=float)).copy()
        n = max(len(c), len(s))
        c = np.pad(c, (0, n - len(c)))
        s = np.pad(s, (0, n - len(s)))
        s[0] = 0.0
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(s))):
            raise GeometryError("support coefficients must be finite")
        c.flags.writeable = False
        s.flags.writeable = False
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "cos", c)
        object.__setattr__(self, "sin", s)

    @property
    def degree(self) -> int:
        return len(self.cos) - 1

    def support(self, theta, deriv: int = 0) -> np.ndarray:
        """Support function (or its ``deriv``-th derivative) about the center."""
        theta = np.asarray(theta, dtype=float)
        k = np.arange(self.degree + 1)
        kt = np.multiply.outer(theta, k)
        ck, sk = np.cos(kt), np.sin(kt)
        if deriv == 0:
            return ck @ self.cos + sk @ self.sin
        if deriv == 1:
            return (-sk * k) @ self.cos + (ck * k) @ self.sin
        if deriv == 2:
            return -(ck * k**2) @ self.cos - (sk * k**2) @ self.sin
        raise ValueError("deriv must be 0, 1 or 2")

    def grid_support(self, n: int, deriv: int = 0) -> np.ndarray:
        """Support function derivative at ``theta_k = 2 pi k / n`` via inverse FFT."""
        if n <= 2 * self.degree:
            return self.support(2 * np.pi * np.arange(n) / n, deriv)
        k = np.arange(self.degree + 1)
        spec = np.zeros(n // 2 + 1, complex)
        spec[: self.degree + 1] = (self.cos - 1j * self.sin) * (1j * k) ** deriv * (n / 2)
        spec[0] = self.cos[0] * n if deriv == 0 else 0.0
        return np.fft.irfft(spec, n)

    def radius_of_curvature(self, theta) -> np.ndarray:
        return self.support(theta) + self.support(theta, 2)

    def point(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        e = np.exp(1j * theta)
        return self.center + (self.support(theta) + 1j * self.support(theta, 1)) * e

    def check_convex(self, grid: int = CONVEXITY_GRID) -> None:
        h = self.grid_support(grid)
        if np.min(h) <= 0:
            raise GeometryError("support function must be positive about the center")
        if np.min(h + self.grid_support(grid, 2)) <= 0:
            raise GeometryError("domain is not strictly convex (h + h'' <= 0)")

    def width(self, grid: int = 512) -> float:
        """Diameter of the domain (max width over directions)."""
        theta = np.pi * np.arange(grid) / grid
        return float(np.max(self.support(theta) + self.support(theta + np.pi)))

    def to_json(self) -> dict:
        return {
            "center": [self.center.real, self.center.imag],
            "cos": self.cos.tolist(),
            "sin": self.sin.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SupportDomain":
        re, im = obj["center"]
        dom = cls(complex(re, im), obj["cos"], obj["sin"])
        dom.check_convex()
        return dom


@dataclass(frozen=True)
class BoundaryNode:
    theta: float
    sigma: complex
    nu: complex
    weight: float
    curvature: float


@dataclass(frozen=True)
class BoundaryNodes:
    """Equispaced-angle quadrature nodes on the boundary, stored column-wise."""

    domain: SupportDomain
    theta: np.ndarray
    sigma: np.ndarray
    nu: np.ndarray
    weight: np.ndarray
    curvature: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.theta)

    def __getitem__(self, k: int) -> BoundaryNode:
        return BoundaryNode(
            float(self.theta[k]),
            complex(self.sigma[k]),
            complex(self.nu[k]),
            float(self.weight[k]),
            float(self.curvature[k]),
        )

    def __iter__(self) -> Iterator[BoundaryNode]:
        return (self[k] for k in range(len(self)))

    @property
    def perimeter(self) -> float:
        return float(np.sum(self.weight))

    @property
    def dsigma(self) -> np.ndarray:
        """Complex line element ``d sigma = i nu ds`` at each node."""
        return 1j * self.nu * self.weight

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theta", "sig_re", "sig_im", "nu_re", "nu_im", "weight", "curvature"])
            for k in range(len(self)):
                s, n = self.sigma[k], self.nu[k]
                w.writerow([repr(float(v)) for v in
                            (self.theta[k], s.real, s.imag, n.real, n.imag,
                             self.weight[k], self.curvature[k])])


def make_disk(center: complex, radius: float) -> SupportDomain:
    if not radius > 0:
        raise GeometryError(f"radius must be positive, got {radius}")
    return SupportDomain(center, [float(radius)], [0.0])


def fourier_project(func, degree: int, samples: int | None = None):
    """Real Fourier coefficients (cos, sin) of a periodic function up to ``degree``."""
    samples = samples or max(4 * degree + 4, 64)
    theta = 2 * np.pi * np.arange(samples) / samples
    c = np.fft.rfft(func(theta)) / samples
    c = c[: degree + 1]
    cos = 2 * c.real
    sin = -2 * c.imag
    cos[0] /= 2
    sin[0] = 0.0
    return cos, sin


def make_ellipse(center: complex, semi_a: float, semi_b: float, rotation: float = 0.0,
                 tol: float = FOURIER_TOL) -> SupportDomain:
    if not (semi_a > 0 and semi_b > 0):
        raise GeometryError("ellipse semi-axes must be positive")

    def h(theta):
        t = theta - rotation
        return np.sqrt((semi_a * np.cos(t)) ** 2 + (semi_b * np.sin(t)) ** 2)

    test = 2 * np.pi * (np.arange(CONVEXITY_GRID) + 0.5) / CONVEXITY_GRID
    degree = 16
    while degree <= MAX_DEGREE:
        cos, sin = fourier_project(h, degree)
        dom = SupportDomain(center, cos, sin)
        if np.max(np.abs(dom.support(test) - h(test))) <= tol:
            return dom
        degree *= 2
    raise GeometryError(
        f"ellipse support function not resolved to {tol} at degree {MAX_DEGREE}")


def boundary_nodes(domain: SupportDomain, n: int = DEFAULT_NODES) -> BoundaryNodes:
    if n < 4 or n % 2:
        raise ValueError(f"node count must be even and >= 4, got {n}")
    theta = 2 * np.pi * np.arange(n) / n
    h = domain.grid_support(n)
    rho = h + domain.grid_support(n, 2)
    if np.min(rho) <= 0:
        raise GeometryError("convexity violated at a boundary node")
    nu = np.exp(1j * theta)
    return BoundaryNodes(
        domain=domain,
        theta=theta,
        sigma=domain.center + (h + 1j * domain.grid_support(n, 1)) * nu,
        nu=nu,
        weight=rho * (2 * np.pi / n),
        curvature=1.0 / rho,
    )


def mu_kernel(sigma, nu, z):
    """Double-layer kernel ``(1/pi) Re(nu / (sigma - z))``; broadcasts."""
    sigma, nu, z = np.asarray(sigma), np.asarray(nu), np.asarray(z)
    d = sigma - z
    scale = np.maximum(1.0, np.abs(sigma))
    if np.any(np.abs(d) < 1e-14 * scale):
        raise SingularKernelError("mu_kernel evaluated at its source point")
    out = (nu / d).real / np.pi
    return float(out) if out.ndim == 0 else out


def mu_diagonal(node: BoundaryNode) -> float:
    """Coincidence limit of the kernel along the boundary: curvature / 2 pi."""
    return node.curvature / (2 * np.pi)


def double_layer_matrix(nodes: BoundaryNodes) -> np.ndarray:
    """``K[j, k] = mu(sigma_k, sigma_j)`` with the curvature limit on the diagonal."""
    d = nodes.sigma[None, :] - nodes.sigma[:, None]
    np.fill_diagonal(d, 1.0)
    K = (nodes.nu[None, :] / d).real / np.pi
    np.fill_diagonal(K, nodes.curvature / (2 * np.pi))
    return K


def support_distance(domain: SupportDomain, z, grid: int = CONTAINS_GRID) -> np.ndarray:
    """Signed gap ``min_theta [h(theta) - Re(exp(-i theta)(z - c))]``.

    Positive inside, and for points outside its negative is the Euclidean
    distance to the domain (up to the angular grid resolution).
    """
    theta = 2 * np.pi * np.arange(grid) / grid
    h = domain.grid_support(grid)
    z = np.asarray(z, dtype=complex)
    proj = np.multiply.outer(z - domain.center, np.exp(-1j * theta)).real
    return np.min(h - proj, axis=-1)


def contains(domain: SupportDomain, z, grid: int = CONTAINS_GRID):
    """Strict membership via the tangent half-planes at ``grid`` normals.

    Points within ``1e-12 * diam`` of the boundary count as outside.
    """
    tol = 1e-12 * domain.width()
    out = support_distance(domain, z, grid) > tol
    return bool(out) if np.ndim(out) == 0 else out


def interior_samples(domain: SupportDomain, radial: int = 20, angular: int = 50) -> np.ndarray:
    """Deterministic interior points ``c + t (sigma(theta) - c)`` with ``t < 1``."""
    t = (np.arange(radial) + 0.5) / radial
    theta = 2 * np.pi * (np.arange(angular) + 0.25) / angular
    rim = domain.point(theta) - domain.center
    return (domain.center + np.multiply.outer(t, rim)).ravel()


def save_domain(domain: SupportDomain, path) -> None:
    with open(path, "w") as fh:
        json.dump(domain.to_json(), fh, indent=2)


def load_domain(path) -> SupportDomain:
    with open(path) as fh:
        return SupportDomain.from_json(json.load(fh))
