"""Numerical machinery around the numerical range as a (1 + sqrt 2)-spectral set."""

__version__ = "0.1.0"

from .geometry import (BoundaryNode, BoundaryNodes, SupportDomain, boundary_nodes, contains,
                       make_disk, make_ellipse, mu_diagonal, mu_kernel)
from .holofun import BoundarySamples, RationalFun, boundary_trace, conj_trace, in_sector, sup_norm
from .numrange import (NumrangeBoundary, contains_numrange, enclosing_domain, numerical_radius,
                       numrange_boundary, numrange_support)
from .cauchy import (OperatorKernelCache, balance_operator, cauchy_matrix, cauchy_scalar,
                     conjugate_transform_boundary, fun_calculus, mu_matrix)

__all__ = [
    "BoundaryNode", "BoundaryNodes", "BoundarySamples", "NumrangeBoundary",
    "OperatorKernelCache", "RationalFun", "SupportDomain", "balance_operator",
    "boundary_nodes", "boundary_trace", "cauchy_matrix", "cauchy_scalar", "conj_trace",
    "conjugate_transform_boundary", "contains", "contains_numrange", "enclosing_domain",
    "fun_calculus", "in_sector", "make_disk", "make_ellipse", "mu_diagonal", "mu_kernel",
    "mu_matrix", "numerical_radius", "numrange_boundary", "numrange_support", "sup_norm",
]
