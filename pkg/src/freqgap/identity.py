"""Integration by parts on the half-sphere, checked on catalog solutions.

For a lam-homogeneous solution ``u`` and the profile ``p`` of the same
frequency,

    -p'(pi/2) * int_E u  ==  p(pi/2) * int_E u_n

where ``E`` is the equator ``S ∩ {x_n = 0}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import QuadratureFailure
from .profile import ProfileQuery, endpoint_values
from .solutions import eval_u, eval_un

__all__ = [
    "EquatorIntegrals", "IdentityReport", "equator_integrals",
    "verify_identity", "sphere_area", "IDENTITY_TOL",
]

IDENTITY_TOL = 1e-8
QUAD_NODES = 48
QUAD_TOL = 1e-9


@dataclass(frozen=True)
class EquatorIntegrals:
    int_u: float
    int_un: float
    quad_err: float


@dataclass(frozen=True)
class IdentityReport:
    lhs: float
    rhs: float
    residual_abs: float
    residual_rel: float
    passed: bool


def sphere_area(m):
    """Surface measure of the unit sphere S^m in R^(m+1)."""
    return 2 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2)


@lru_cache(maxsize=64)
def _legendre_rule(count):
    """Gauss-Legendre nodes/weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(count)
    return (1 + x) / 2, w / 2


def _equator_points(dim, s):
    """Points on the equator with first coordinate ``s``."""
    pts = np.zeros((len(s), dim))
    pts[:, 0] = s
    pts[:, 1] = np.sqrt(np.clip(1 - s * s, 0.0, None))
    return pts


def _weighted_integral(f, dim, count):
    """int_{-1}^{1} f(s) (1 - s^2)^((dim-4)/2) ds for dim >= 3.

    The halves are folded onto [0, 1] and mapped by s = t**2, t = 1 - v**2.
    The first substitution turns the |s|**lam and |s|**(lam - 1) kinks of
    the catalog at s = 0 into polynomials; the second turns the end factor
    (1 - s)**g into v**(dim - 4). What is left is smooth in v, so plain
    Gauss-Legendre converges spectrally.
    """
    g = (dim - 4) / 2
    v, w = _legendre_rule(count)
    t = 1 - v * v
    s = t * t
    jac = 4 * t * v ** (dim - 3) * ((1 + t) * (1 + t * t)) ** g
    return float(np.sum(w * jac * (f(s) + f(-s))))


def equator_integrals(sol, nodes=QUAD_NODES):
    """Integrals of ``u`` and ``u_n`` over the equator of the unit sphere."""
    dim = sol.dim
    if dim == 2:
        pts = np.array([[1.0, 0.0], [-1.0, 0.0]])
        return EquatorIntegrals(float(np.sum(eval_u(sol, pts))),
                                float(np.sum(eval_un(sol, pts))), 0.0)

    factor = sphere_area(dim - 3)

    def integrate(fn, count):
        return factor * _weighted_integral(
            lambda s: fn(sol, _equator_points(dim, s)), dim, count)

    int_u = integrate(eval_u, nodes)
    int_un = integrate(eval_un, nodes)
    err = max(abs(int_u - integrate(eval_u, 2 * nodes)),
              abs(int_un - integrate(eval_un, 2 * nodes)))
    if err > QUAD_TOL * (1 + abs(int_u) + abs(int_un)):
        raise QuadratureFailure(f"{sol}: quadrature error estimate {err:.3g}")
    return EquatorIntegrals(int_u, int_un, err)


def verify_identity(sol):
    """Both sides of the identity with absolute and relative residuals."""
    ev = endpoint_values(ProfileQuery(sol.lam, sol.dim))
    ints = equator_integrals(sol)
    lhs = -ev.dp_half * ints.int_u
    rhs = ev.p_half * ints.int_un
    res = abs(lhs - rhs)
    scale = ((1 + abs(ev.p_half) + abs(ev.dp_half))
             * (1 + abs(ints.int_u) + abs(ints.int_un)))
    rel = res / max(abs(lhs), abs(rhs), 1e-12 * scale)
    return IdentityReport(lhs, rhs, res, rel, rel <= IDENTITY_TOL)
