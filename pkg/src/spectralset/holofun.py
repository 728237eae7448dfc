"""Rational test functions, boundary traces and sup-norms.

Coefficients are stored in ascending powers: ``numer[k]`` multiplies ``z**k``.
The denominator is monic (highest coefficient 1); ``denom == [1]`` is a
polynomial.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import minimize_scalar

from .geometry import (BoundaryNodes, SupportDomain, boundary_nodes, interior_samples,
                       support_distance)

POLE_CLEARANCE = 1e-9


class PoleError(ValueError):
    """A pole of the function lies on or inside the domain of interest."""


def _coeffs(c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    nz = np.flatnonzero(c)
    return c[: nz[-1] + 1].copy() if len(nz) else np.zeros(1, complex)


@dataclass(frozen=True)
class RationalFun:
    numer: np.ndarray
    denom: np.ndarray = None

    def __post_init__(self):
        num = _coeffs(self.numer)
        den = _coeffs([1.0] if self.denom is None else self.denom)
        if den[-1] == 0:
            raise ValueError("denominator must be nonzero")
        lead = den[-1]
        object.__setattr__(self, "numer", num / lead)
        object.__setattr__(self, "denom", den / lead)

    @classmethod
    def polynomial(cls, coeffs) -> "RationalFun":
        return cls(coeffs, [1.0])

    @classmethod
    def constant(cls, c: complex) -> "RationalFun":
        return cls([c], [1.0])

    @classmethod
    def with_poles(cls, numer, poles) -> "RationalFun":
        return cls(numer, P.polyfromroots(poles) if len(poles) else [1.0])

    @property
    def is_polynomial(self) -> bool:
        return len(self.denom) == 1

    def poles(self) -> np.ndarray:
        return P.polyroots(self.denom) if len(self.denom) > 1 else np.zeros(0, complex)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        d = P.polyval(z, self.denom)
        if np.any(np.abs(d) < 1e-300):
            raise PoleError("evaluation at a pole")
        out = P.polyval(z, self.numer) / d
        return complex(out) if out.ndim == 0 else out

    def __mul__(self, other):
        if isinstance(other, RationalFun):
            return RationalFun(P.polymul(self.numer, other.numer),
                               P.polymul(self.denom, other.denom))
        return RationalFun(self.numer * complex(other), self.denom)

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, RationalFun):
            other = RationalFun.constant(other)
        if np.array_equal(self.denom, other.denom):
            return RationalFun(P.polyadd(self.numer, other.numer), self.denom)
        num = P.polyadd(P.polymul(self.numer, other.denom), P.polymul(other.numer, self.denom))
        return RationalFun(num, P.polymul(self.denom, other.denom))

    __radd__ = __add__

    def shifted(self, c: complex) -> "RationalFun":
        """The function ``z -> self(z - c)``."""
        lin = np.array([-c, 1.0], dtype=complex)

        def compose(coeffs):
            out = np.zeros(1, complex)
            for a in coeffs[::-1]:
                out = P.polyadd(P.polymul(out, lin), [a])
            return out

        return RationalFun(compose(self.numer), compose(self.denom))

    def at_matrix(self, A) -> np.ndarray:
        """Exact rational calculus ``numer(A) denom(A)^{-1}`` via Horner."""
        A = np.asarray(A, dtype=complex)
        num = horner_matrix(self.numer, A)
        if self.is_polynomial:
            return num / self.denom[0]
        return np.linalg.solve(horner_matrix(self.denom, A).T, num.T).T

    def to_json(self) -> dict:
        return {"numer": [[c.real, c.imag] for c in self.numer],
                "denom": [[c.real, c.imag] for c in self.denom]}

    @classmethod
    def from_json(cls, obj: dict) -> "RationalFun":
        pair = lambda v: complex(*v) if isinstance(v, (list, tuple)) else complex(v)
        return cls([pair(v) for v in obj["numer"]],
                   [pair(v) for v in obj.get("denom", [[1.0, 0.0]])])


def horner_matrix(coeffs, A) -> np.ndarray:
    n = A.shape[0]
    out = np.zeros((n, n), complex)
    for a in np.asarray(coeffs)[::-1]:
        out = out @ A
        out[np.diag_indices(n)] += a
    return out


def pole_distance(f: RationalFun, domain: SupportDomain) -> float:
    """Distance from the nearest pole to the closed domain (inf for polynomials)."""
    poles = f.poles()
    if len(poles) == 0:
        return np.inf
    return float(np.min(-support_distance(domain, poles)))


def check_poles(f: RationalFun, domain: SupportDomain, clearance: float = POLE_CLEARANCE):
    if pole_distance(f, domain) <= clearance:
        raise PoleError("pole within clearance of the closed domain")


@dataclass(frozen=True)
class BoundarySamples:
    nodes: BoundaryNodes
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (len(self.nodes),):
            raise ValueError("sample count does not match node count")
        object.__setattr__(self, "values", values)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def conj(self) -> "BoundarySamples":
        return BoundarySamples(self.nodes, np.conj(self.values))


def boundary_trace(f: RationalFun, nodes: BoundaryNodes) -> BoundarySamples:
    return BoundarySamples(nodes, f(nodes.sigma))


def conj_trace(f: RationalFun, nodes: BoundaryNodes) -> BoundarySamples:
    return BoundarySamples(nodes, np.conj(f(nodes.sigma)))


def sup_norm(f: RationalFun, domain: SupportDomain, n: int = 1024) -> float:
    """``max |f|`` over the closed domain, attained on the boundary."""
    check_poles(f, domain)
    nodes = boundary_nodes(domain, n)
    vals = np.abs(f(nodes.sigma))
    dt = 2 * np.pi / n
    best = float(np.max(vals))
    for k in np.argsort(vals)[::-1][:3]:
        t = nodes.theta[k]
        res = minimize_scalar(lambda s: -abs(f(domain.point(s))), bounds=(t - dt, t + dt),
                              method="bounded", options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    return best


def in_sector(f: RationalFun, domain: SupportDomain, half_angle: float, n: int = 1024) -> bool:
    """Whether ``|arg f| <= half_angle`` on the boundary nodes and 10^3 interior points."""
    if not 0 < half_angle <= np.pi / 2:
        raise ValueError("half_angle must lie in (0, pi/2]")
    z = np.concatenate([boundary_nodes(domain, n).sigma, interior_samples(domain)])
    w = f(z)
    ok = (np.abs(np.angle(w)) <= half_angle + 1e-12) | (w == 0)
    return bool(np.all(ok))
