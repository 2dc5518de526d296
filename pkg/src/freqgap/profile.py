"""Axisymmetric profile p_lambda of a lambda-homogeneous harmonic function.

On the upper half-sphere the profile depends only on the polar angle ``phi``
measured from ``e_n`` and solves

    p'' + (n - 2) cot(phi) p' + mu p = 0,    p(0) = 1,  p'(0) = 0,

with ``mu = lam * (lam + n - 2)``. Two independent evaluators are provided:

* ``Method.SERIES`` sums the Gauss series 2F1(-lam, lam+n-2; (n-1)/2; z) in
  ``z = sin(phi/2)**2``, with a geometric tail bound plus a rounding bound.
* ``Method.ODE`` starts from an even Taylor expansion at the regular singular
  point ``phi = 0`` and integrates the ODE with an adaptive 8th order
  Runge-Kutta scheme.

The endpoint ``phi = pi/2`` also has a closed form in gamma functions
(:func:`endpoint_values`), used as the oracle for the endpoint signs.
"""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import solve_ivp
from scipy.special import digamma

from ._dd import dd_div_d, dd_horner, dd_mul, dd_mul_d, two_sum
from .errors import (IndeterminateSign, InvalidDimension, InvalidFrequency,
                     NonconvergentSeries)

__all__ = [
    "EPS", "MARGIN", "HALF_PI", "Method", "Sign", "SignPair", "ProfileQuery",
    "ProfilePoint", "EndpointValues", "mu", "eval_profile", "profile_on_grid",
    "series_profile", "series_values", "ode_profile", "endpoint_values",
    "endpoint_signs_predicted", "endpoint_signs", "certified_sign",
    "cross_validate",
]

EPS = sys.float_info.epsilon
HALF_PI = math.pi / 2
# A value only carries a sign if it exceeds its error bound by this factor.
MARGIN = 1000.0

SERIES_MAX_TERMS = 400
SERIES_REL_STOP = 1e-16
SERIES_QUIET_TERMS = 3

STARTUP_PHI = 0.1
STARTUP_TRUNCATION = 1e-16
ODE_RTOL = 1e-13
ODE_ATOL = 1e-15
ODE_RTOL_CHECK = 1e-11

# phi*cot(phi) = sum_m BERNOULLI_COT[m] * phi**(2m)
BERNOULLI_COT = (1.0, -1.0 / 3, -1.0 / 45, -2.0 / 945, -1.0 / 4725,
                 -2.0 / 93555)


class Method(enum.Enum):
    SERIES = "series"
    ODE = "ode"


class Sign(enum.IntEnum):
    NEG = -1
    ZERO = 0
    POS = 1

    @property
    def symbol(self):
        return {-1: "-", 0: "0", 1: "+"}[int(self)]


@dataclass(frozen=True)
class SignPair:
    sign_p: Sign
    sign_dp: Sign


def _check_lambda(lam):
    try:
        lam = float(lam)
    except (TypeError, ValueError):
        raise InvalidFrequency(f"frequency must be a real number, got {lam!r}") from None
    if not math.isfinite(lam) or lam <= 0:
        raise InvalidFrequency(f"frequency must be finite and > 0, got {lam!r}")
    return lam


def _check_dim(dim):
    if isinstance(dim, bool) or not isinstance(dim, (int, np.integer)):
        if isinstance(dim, float) and dim.is_integer():
            dim = int(dim)
        else:
            raise InvalidDimension(f"dimension must be an integer, got {dim!r}")
    if dim < 2:
        raise InvalidDimension(f"dimension must be >= 2, got {dim}")
    return int(dim)


def mu(lam, dim):
    """Eigenvalue ``lam * (lam + dim - 2)`` of the spherical Laplacian."""
    lam = _check_lambda(lam)
    dim = _check_dim(dim)
    return lam * (lam + dim - 2)


@dataclass(frozen=True)
class ProfileQuery:
    """A frequency ``lam`` in ambient dimension ``dim``."""

    lam: float
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "lam", _check_lambda(self.lam))
        object.__setattr__(self, "dim", _check_dim(self.dim))

    @property
    def mu(self):
        return self.lam * (self.lam + self.dim - 2)

    @property
    def is_integer(self):
        return self.lam.is_integer()


@dataclass(frozen=True)
class ProfilePoint:
    phi: float
    p: float
    dp: float
    err: float


@dataclass(frozen=True)
class EndpointValues:
    """p(pi/2) and p'(pi/2) with absolute error bounds."""

    p_half: float
    dp_half: float
    err_p: float
    err_dp: float

    @property
    def certifiable(self):
        return (_has_certain_sign(self.p_half, self.err_p)
                and _has_certain_sign(self.dp_half, self.err_dp))


def _has_certain_sign(value, err):
    return (value == 0.0 and err == 0.0) or abs(value) > MARGIN * err


# --------------------------------------------------------------------------
# series in z = sin(phi/2)**2

@dataclass(frozen=True)
class _Series:
    # coefficients c_k as double-double pairs hi + lo
    hi: np.ndarray
    lo: np.ndarray
    # sup_{j >= K} |c_{j+1} / c_j|; zero for a terminating (polynomial) series
    ratio_bound: float

    @property
    def last(self):
        return len(self.hi) - 1

    @property
    def deriv(self):
        """Double-double coefficients k * c_k of dP/dz (index shifted by one)."""
        k = np.arange(1, len(self.hi), dtype=float)
        return dd_mul_d(self.hi[1:], self.lo[1:], k)


@lru_cache(maxsize=8192)
def _series(lam, dim):
    a = (dim - 1) / 2
    extra = max(0.0, (dim - 5) / 2)
    hi, lo = [1.0], [0.0]
    ch, cl = 1.0, 0.0
    total = 1.0
    quiet = 0
    for k in range(SERIES_MAX_TERMS):
        # (k - lam) and (k + lam + dim - 2) exactly, as double-doubles
        f1 = two_sum(float(k), -lam)
        f2 = two_sum(lam, float(k + dim - 2))
        ch, cl = dd_mul(ch, cl, *f1)
        ch, cl = dd_mul(ch, cl, *f2)
        ch, cl = dd_div_d(ch, cl, (k + a) * (k + 1))
        if ch == 0.0:
            # integer lam: the series is a polynomial of degree lam
            return _Series(np.array(hi), np.array(lo), 0.0)
        hi.append(ch)
        lo.append(cl)
        term = ch * 0.5 ** (k + 1)
        total += term
        big_k = k + 1
        # the ratio bound is only valid once the index exceeds lam
        ratio = 1.0 + extra / big_k
        ok_tail = big_k > lam + 1 and 0.5 * ratio * (1 + 1 / big_k) < 0.9
        if abs(term) < SERIES_REL_STOP * (abs(total) + 1) and ok_tail:
            quiet += 1
            if quiet >= SERIES_QUIET_TERMS:
                return _Series(np.array(hi), np.array(lo), ratio)
        else:
            quiet = 0
    raise NonconvergentSeries(
        f"series for lam={lam}, dim={dim} did not converge in "
        f"{SERIES_MAX_TERMS} terms")


def _powers(z, count):
    """Matrix of z**k, k < count, one row per entry of the flattened z."""
    return np.power.outer(np.ravel(z), np.arange(count, dtype=float))


def series_values(q, phi):
    """``(p, dp)`` from the series in plain double precision.

    No error bound; meant for sign decisions well away from cancellation,
    such as bisection steps.
    """
    phi = np.asarray(phi, dtype=float)
    c = _series(q.lam, q.dim).hi
    z = np.sin(phi / 2) ** 2
    zk = _powers(z, len(c))
    p = zk @ c
    dpdz = zk[:, :-1] @ (np.arange(1, len(c)) * c[1:])
    return p.reshape(phi.shape), (np.sin(phi) / 2 * dpdz.reshape(phi.shape))


def series_profile(q, phi):
    """Series evaluation with error bounds.

    Coefficients and Horner's rule run in double-double arithmetic, so the
    heavy cancellation near ``z = 1/2`` at larger ``lam`` costs almost
    nothing. Returns ``(p, dp, err_p, err_dp)`` shaped like ``phi``.
    """
    phi = np.asarray(phi, dtype=float)
    shape = phi.shape
    s = _series(q.lam, q.dim)
    big_k = s.last
    abs_c = np.abs(s.hi)
    k = np.arange(len(abs_c), dtype=float)

    z = np.sin(phi / 2).ravel() ** 2
    ph, pl = dd_horner(s.hi, s.lo, z)
    p = ph + pl
    if big_k:
        dh, dl = s.deriv
        dh, dl = dd_horner(dh, dl, z)
        dpdz = dh + dl
    else:
        dpdz = np.zeros_like(z)

    zk = _powers(z, len(abs_c))
    absolute = zk @ abs_c
    absolute_dz = zk[:, :-1] @ (k * abs_c)[1:]
    absolute_d2z = zk[:, :-2] @ (k * (k - 1) * abs_c)[2:]
    d2pdz2 = np.abs(zk[:, :-2] @ (k * (k - 1) * s.hi)[2:])
    d2pdz2 += 2 * big_k * EPS * absolute_d2z

    # compensated Horner: final rounding plus a second-order term
    gamma = (8 * big_k + 8) * EPS
    round_p = EPS * np.abs(p) + gamma ** 2 * absolute
    round_dz = EPS * np.abs(dpdz) + gamma ** 2 * absolute_dz
    # z = sin(phi/2)**2 carries up to ~3 ulp of relative error
    round_p += 4 * EPS * z * (np.abs(dpdz) + gamma * absolute_dz)
    round_dz += 4 * EPS * z * d2pdz2

    if s.ratio_bound:
        rho = z * s.ratio_bound
        rho_d = rho * (1 + 1 / big_k)
        last = abs_c[-1]
        tail_p = last * z ** big_k * rho / (1 - rho)
        tail_dz = big_k * last * z ** (big_k - 1) * rho_d / (1 - rho_d)
    else:
        tail_p = tail_dz = 0.0

    half_sin = np.sin(phi).ravel() / 2
    # + 0.0 turns the -0.0 produced at phi = 0 into +0.0
    dp = half_sin * dpdz + 0.0
    err_p = round_p + tail_p
    err_dp = half_sin * (round_dz + tail_dz) + 3 * EPS * np.abs(dp)
    at_pole = z == 0.0
    err_p[at_pole] = 0.0
    err_dp[at_pole] = 0.0
    return (p.reshape(shape), dp.reshape(shape), err_p.reshape(shape),
            err_dp.reshape(shape))


# --------------------------------------------------------------------------
# ODE route

def _startup_coefficients(mu_, dim, count=7):
    """Taylor coefficients a_j of p(phi) = sum a_j phi**(2j) at phi = 0."""
    a = [1.0]
    for j in range(1, count):
        acc = mu_ * a[j - 1]
        for m in range(1, j):
            acc += (dim - 2) * BERNOULLI_COT[m] * 2 * (j - m) * a[j - m]
        a.append(-acc / (2 * j * (2 * j + dim - 3)))
    return a


def _startup_eval(a, phi):
    w = phi * phi
    p = npoly.polyval(w, a[:-1])
    j = np.arange(1, len(a) - 1)
    # d/dphi sum a_j phi^{2j} = sum 2j a_j phi^{2j-1}
    dp = phi * npoly.polyval(w, 2 * j * np.array(a[1:-1]))
    return p, dp


def _startup_radius(a):
    """Largest phi <= 0.1 where the omitted phi**12 term is negligible."""
    nxt = abs(a[-1])
    if nxt == 0.0:
        return STARTUP_PHI
    return min(STARTUP_PHI, (STARTUP_TRUNCATION / nxt) ** (1 / 12))


def _integrate(q, phi0, y0, t_eval, rtol, atol):
    dim2 = q.dim - 2
    mu_ = q.mu

    def rhs(t, y):
        return (y[1], -dim2 * math.cos(t) / math.sin(t) * y[1] - mu_ * y[0])

    sol = solve_ivp(rhs, (phi0, t_eval[-1]), y0, method="DOP853",
                    t_eval=t_eval, rtol=rtol, atol=atol)
    if not sol.success:
        raise ArithmeticError(f"ODE integration failed: {sol.message}")
    return sol.y[0], sol.y[1]


def ode_profile(q, phi):
    """Vectorized ODE evaluation, same return convention as ``series_profile``.

    The error bound is estimated from a second, looser integration; it is a
    heuristic, not a certificate.
    """
    phi = np.asarray(phi, dtype=float)
    flat = phi.ravel()
    p = np.empty_like(flat)
    dp = np.empty_like(flat)
    err_p = np.empty_like(flat)
    err_dp = np.empty_like(flat)

    a = _startup_coefficients(q.mu, q.dim)
    phi0 = _startup_radius(a)
    start_err = abs(a[-1]) * phi0 ** 12

    inner = flat <= phi0
    if inner.any():
        pi_, dpi = _startup_eval(a, flat[inner])
        p[inner] = pi_
        dp[inner] = dpi
        x = flat[inner]
        err_p[inner] = abs(a[-1]) * x ** 12 + 4 * EPS * np.abs(pi_)
        err_dp[inner] = 12 * abs(a[-1]) * x ** 11 + 4 * EPS * np.abs(dpi)

    outer = ~inner
    if outer.any():
        order = np.argsort(flat[outer], kind="stable")
        t_eval = flat[outer][order]
        p0, dp0 = _startup_eval(a, np.array([phi0]))
        y0 = [p0[0], dp0[0]]
        fine = _integrate(q, phi0, y0, t_eval, ODE_RTOL, ODE_ATOL)
        coarse = _integrate(q, phi0, y0, t_eval, ODE_RTOL_CHECK, ODE_ATOL * 100)
        idx = np.flatnonzero(outer)[order]
        p[idx] = fine[0]
        dp[idx] = fine[1]
        # the startup error propagates with O(1) amplification on [0, pi/2]
        err_p[idx] = np.abs(fine[0] - coarse[0]) + 10 * start_err + 8 * EPS
        err_dp[idx] = np.abs(fine[1] - coarse[1]) + 10 * (1 + q.mu) * start_err + 8 * EPS

    zero = flat == 0.0
    p[zero], dp[zero], err_p[zero], err_dp[zero] = 1.0, 0.0, 0.0, 0.0
    shape = phi.shape
    return p.reshape(shape), dp.reshape(shape), err_p.reshape(shape), err_dp.reshape(shape)


def _check_phi(phi):
    phi = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(phi)) or np.any(phi < 0) or np.any(phi > HALF_PI):
        raise ValueError("phi must lie in [0, pi/2]")
    return phi


def profile_on_grid(q, phi, method=Method.SERIES):
    """Evaluate ``p`` and ``p'`` on an array of angles with either method."""
    phi = _check_phi(phi)
    method = Method(method)
    if method is Method.SERIES:
        return series_profile(q, phi)
    return ode_profile(q, phi)


def eval_profile(q, phi, method=Method.SERIES):
    """Evaluate the profile at a single angle.

    The returned ``err`` is the larger of the two error bounds (value and
    derivative).
    """
    p, dp, ep, edp = profile_on_grid(q, np.array([float(phi)]), method)
    return ProfilePoint(float(phi), float(p[0]), float(dp[0]),
                        float(max(ep[0], edp[0])))


# --------------------------------------------------------------------------
# closed-form endpoint values

def _is_pole(x):
    return x <= 0 and float(x).is_integer()


def _gamma_sign(x):
    if x > 0:
        return 1
    return -1 if math.ceil(-x) % 2 else 1


def _gamma_ratio(prefactor, num, den, arg_scale):
    """prefactor * prod Gamma(num) / prod Gamma(den), with an error bound.

    A pole in the denominator gives an exact zero with zero error.
    """
    if any(_is_pole(x) for x in den):
        return 0.0, 0.0
    sign = 1 if prefactor > 0 else -1
    logs = [math.log(abs(prefactor))]
    for x in num:
        sign *= _gamma_sign(x)
        logs.append(math.lgamma(x))
    for x in den:
        sign *= _gamma_sign(x)
        logs.append(-math.lgamma(x))
    total = math.fsum(logs)
    value = sign * math.exp(total)
    # lgamma rounding, exp amplification, argument rounding near poles
    rel = 4 * EPS * (1 + sum(abs(t) for t in logs) + abs(total))
    rel += EPS * arg_scale * sum(abs(float(digamma(x))) for x in (*num, *den))
    return value, abs(value) * rel


def endpoint_values(q):
    """Closed-form p(pi/2) and p'(pi/2).

    Both come from Gauss's summation of 2F1 at z = 1/2 (a + b + 1 = 2c):

        p(pi/2)  = sqrt(pi) G((n-1)/2) / (G((1-lam)/2) G((n-1+lam)/2))
        p'(pi/2) = -mu/(n-1) sqrt(pi) G((n+1)/2) / (G(1-lam/2) G((n+lam)/2))

    where ``1/G`` vanishes at the non-positive integers.
    """
    lam, n = q.lam, q.dim
    sqrt_pi = math.sqrt(math.pi)
    scale = lam + n
    p_half, err_p = _gamma_ratio(
        sqrt_pi, [(n - 1) / 2], [(1 - lam) / 2, (n - 1 + lam) / 2], scale)
    dp_half, err_dp = _gamma_ratio(
        -q.mu / (n - 1) * sqrt_pi, [(n + 1) / 2], [1 - lam / 2, (n + lam) / 2],
        scale)
    if dp_half:
        err_dp += 3 * EPS * abs(dp_half)
    return EndpointValues(p_half, dp_half, err_p, err_dp)


def endpoint_signs_predicted(lam):
    """Signs of cos(lam*pi/2) and -sin(lam*pi/2) from lam mod 4.

    Works on the residue directly so that integer ``lam`` gives exact zeros.
    """
    lam = _check_lambda(lam)
    r = math.fmod(lam, 4.0)
    if r == 1.0 or r == 3.0:
        sp = Sign.ZERO
    elif r < 1.0 or r > 3.0:
        sp = Sign.POS
    else:
        sp = Sign.NEG
    if r == 0.0 or r == 2.0:
        sdp = Sign.ZERO
    elif r < 2.0:
        sdp = Sign.NEG
    else:
        sdp = Sign.POS
    return SignPair(sp, sdp)


def certified_sign(value, err):
    """Sign of ``value`` if it clears the margin rule, else IndeterminateSign.

    An exact zero with zero error (analytic pole convention) maps to ZERO.
    """
    if value == 0.0 and err == 0.0:
        return Sign.ZERO
    if abs(value) > MARGIN * err:
        return Sign.POS if value > 0 else Sign.NEG
    raise IndeterminateSign(f"|{value!r}| does not exceed {MARGIN:g} x {err!r}")


def endpoint_signs(ev):
    """Certified signs of computed endpoint values."""
    return SignPair(certified_sign(ev.p_half, ev.err_p),
                    certified_sign(ev.dp_half, ev.err_dp))


def cross_validate(q, grid_size=101):
    """Largest disagreement between the two evaluators on a uniform grid.

    Also folds in the gap between the series at pi/2 and the gamma formula.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    phi = np.linspace(0.0, HALF_PI, int(grid_size))
    ps, dps, _, _ = series_profile(q, phi)
    po, dpo, _, _ = ode_profile(q, phi)
    ev = endpoint_values(q)
    return float(max(np.max(np.abs(ps - po)), np.max(np.abs(dps - dpo)),
                     abs(ps[-1] - ev.p_half), abs(dps[-1] - ev.dp_half)))
