"""Explicit homogeneous solutions of the thin obstacle problem.

All known examples come from the plane. With ``w = x_1 + i |x_n|`` and
``theta = arg w`` in ``[0, pi]`` the three families are

* ``EVEN_POLY``      ``Re w**(2k)``,               frequency ``2k`` (k >= 1)
* ``ODD_REFLECTED``  ``-Im w**(2k+1)``,            frequency ``2k+1``
* ``THREE_HALVES``   ``|w|**lam cos(lam theta)``,  frequency ``2k+3/2``

extended to R^n by ignoring ``x_2, ..., x_{n-1}``. Using ``|x_n|`` makes
every member even in ``x_n`` by construction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import CheckFailed, InvalidDimension

__all__ = [
    "Family", "ExplicitSolution", "SolutionCheck", "catalog", "eval_u",
    "eval_un", "check_solution",
]

THIN_SLACK = 1e-13
HOMOGENEITY_TOL = 1e-10
LAPLACE_STEP = 1e-3
LAPLACE_TOL = 1e-4


class Family(enum.Enum):
    EVEN_POLY = "even-poly"
    ODD_REFLECTED = "odd-reflected"
    THREE_HALVES = "three-halves"


@dataclass(frozen=True)
class ExplicitSolution:
    family: Family
    k: int
    dim: int
    # positive multiple of the normalized solution
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.dim < 2:
            raise InvalidDimension(f"dimension must be >= 2, got {self.dim}")
        if self.k < (1 if self.family is Family.EVEN_POLY else 0):
            raise ValueError(f"k={self.k} is out of range for {self.family.value}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @property
    def lam(self):
        if self.family is Family.EVEN_POLY:
            return float(2 * self.k)
        if self.family is Family.ODD_REFLECTED:
            return float(2 * self.k + 1)
        return 2 * self.k + 1.5

    def scaled(self, c):
        return ExplicitSolution(self.family, self.k, self.dim, self.scale * c)

    def __str__(self):
        return f"{self.family.value}(k={self.k}, lam={self.lam:g}, n={self.dim})"


def catalog(lambda_max, dim):
    """All family members with frequency <= ``lambda_max``, sorted by frequency."""
    if isinstance(dim, bool) or int(dim) != dim or dim < 2:
        raise InvalidDimension(f"dimension must be >= 2, got {dim}")
    dim = int(dim)
    out = []
    for m in range(1, math.floor(lambda_max) + 1):
        if m % 2:
            out.append(ExplicitSolution(Family.ODD_REFLECTED, (m - 1) // 2, dim))
        else:
            out.append(ExplicitSolution(Family.EVEN_POLY, m // 2, dim))
    k = 0
    while 2 * k + 1.5 <= lambda_max:
        out.append(ExplicitSolution(Family.THREE_HALVES, k, dim))
        k += 1
    return sorted(out, key=lambda s: s.lam)


def _points(sol, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != sol.dim:
        raise ValueError(f"expected points of dimension {sol.dim}, got {x.shape[-1]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("points must be finite")
    return x


def eval_u(sol, x):
    """Evaluate the solution at points ``x`` (last axis = coordinates)."""
    x = _points(sol, x)
    a = x[..., 0]
    b = np.abs(x[..., -1])
    if sol.family is Family.THREE_HALVES:
        lam = sol.lam
        r = np.hypot(a, b)
        u = r ** lam * np.cos(lam * np.arctan2(b, a))
    else:
        # integer powers by repeated multiplication keep Im exact on b == 0
        w = (a + 1j * b) ** int(sol.lam)
        u = w.real if sol.family is Family.EVEN_POLY else -w.imag
    return sol.scale * u


def eval_un(sol, x):
    """One-sided derivative in +x_n at points of the thin space {x_n = 0}."""
    x = _points(sol, x)
    if np.any(x[..., -1] != 0.0):
        raise ValueError("u_n is only defined here on the thin space x_n = 0")
    a = x[..., 0]
    if sol.family is Family.EVEN_POLY:
        un = np.zeros_like(a)
    elif sol.family is Family.ODD_REFLECTED:
        un = -(2 * sol.k + 1) * a ** (2 * sol.k)
    else:
        lam = sol.lam
        un = np.where(a < 0, -lam * np.abs(a) ** (lam - 1), 0.0)
    return sol.scale * un


@dataclass(frozen=True)
class SolutionCheck:
    solution: ExplicitSolution
    samples: int
    min_thin_u: float
    max_thin_un: float
    max_homogeneity: float
    max_laplacian: float     # residual / (lam (lam + n) |x|**(lam - 2))
    passed: bool = True


def _fail(what, sol, pts, bad):
    i = int(np.flatnonzero(bad)[0])
    raise CheckFailed(f"{sol}: {what} at x={pts[i].tolist()}", sample=pts[i])


def _laplacian(sol, x, h):
    u0 = eval_u(sol, x)
    acc = np.zeros_like(u0)
    for i in range(sol.dim):
        step = np.zeros(sol.dim)
        step[i] = h
        acc += eval_u(sol, x + step) + eval_u(sol, x - step) - 2 * u0
    return acc / h ** 2


def check_solution(sol, samples=10_000, seed=0):
    """Check sign conditions, homogeneity, harmonicity and evenness.

    Raises :class:`CheckFailed` with the first offending sample.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    n, lam = sol.dim, sol.lam

    thin = rng.uniform(-1.5, 1.5, size=(samples, n))
    thin[:, -1] = 0.0
    u = eval_u(sol, thin)
    un = eval_un(sol, thin)
    slack = THIN_SLACK * sol.scale * np.maximum(1.0, np.abs(thin[:, 0]) ** lam)
    if np.any(u < -slack):
        _fail("u < 0 on the thin space", sol, thin, u < -slack)
    if np.any(un > slack):
        _fail("u_n > 0 on the thin space", sol, thin, un > slack)

    pts = rng.uniform(-1.5, 1.5, size=(samples, n))
    u = eval_u(sol, pts)
    worst_h = 0.0
    for t in (0.5, 2.0):
        dev = np.abs(eval_u(sol, t * pts) - t ** lam * u)
        bound = HOMOGENEITY_TOL * (sol.scale + np.abs(u)) * t ** lam
        if np.any(dev > bound):
            _fail(f"homogeneity fails for t={t}", sol, pts, dev > bound)
        worst_h = max(worst_h, float(np.max(dev / bound)) * HOMOGENEITY_TOL)

    mirrored = pts.copy()
    mirrored[:, -1] *= -1
    odd = eval_u(sol, mirrored) != u
    if np.any(odd):
        _fail("u is not even in x_n", sol, pts, odd)

    # harmonic points: 0.5 <= |x| <= 1.5, |x_n| > 0.1
    harm = np.empty((0, n))
    while len(harm) < samples:
        d = rng.standard_normal((samples, n))
        d /= np.linalg.norm(d, axis=1)[:, None]
        cand = d * rng.uniform(0.5, 1.5, size=(samples, 1))
        harm = np.vstack([harm, cand[np.abs(cand[:, -1]) > 0.1]])
    harm = harm[:samples]
    r = np.linalg.norm(harm, axis=1)
    scale = sol.scale * lam * (lam + n) * r ** (lam - 2)
    ratio = np.abs(_laplacian(sol, harm, LAPLACE_STEP)) / scale
    if np.any(ratio > LAPLACE_TOL):
        _fail("finite-difference Laplacian too large", sol, harm, ratio > LAPLACE_TOL)

    return SolutionCheck(sol, samples, float(np.min(eval_u(sol, thin))),
                         float(np.max(eval_un(sol, thin))), worst_h,
                         float(np.max(ratio)))
