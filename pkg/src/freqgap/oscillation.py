"""Zero structure of the profile, cap eigenvalues and the gap verdict."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (BranchNotFound, IndeterminateSign, InternalInconsistency,
                     InvalidDimension)
from .profile import (HALF_PI, MARGIN, ProfileQuery, endpoint_signs,
                      endpoint_signs_predicted, endpoint_values, series_profile,
                      series_values)

__all__ = [
    "OscillationReport", "VerdictStatus", "GapVerdict", "CapKind", "CapQuery",
    "find_special_points", "interlacing_check", "cap_frequency",
    "gap_verdict", "NEAR_INTEGER",
]

BISECT_WIDTH = 1e-12
GRID_RETRIES = 4
NEAR_INTEGER = 1e-8

CAP_STEP = 0.25
CAP_LAMBDA_MAX = 50.0
CAP_TOL = 1e-10
# beyond this the series at the cap angle has lost too many digits
CAP_MAX_ERR = 1e-3


@dataclass(frozen=True)
class OscillationReport:
    """Zeros of p and of p' inside the open interval (0, pi/2)."""

    zeros: tuple
    crits: tuple

    @property
    def total(self):
        return len(self.zeros) + len(self.crits)

    def merged(self):
        """Special points in order, tagged ``"p"`` (zero) or ``"dp"`` (critical)."""
        tagged = [(x, "p") for x in self.zeros] + [(x, "dp") for x in self.crits]
        return sorted(tagged)


def _alternates(report):
    tags = [t for _, t in report.merged()]
    return all(t == ("p" if i % 2 == 0 else "dp") for i, t in enumerate(tags))


def _bisect(q, lo, hi, which):
    """Vectorized bisection; ``which[i]`` is 0 for a zero of p, 1 for p'."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    if lo.size == 0:
        return lo
    rows = np.arange(lo.size)

    def signs(x):
        return np.sign(np.stack(series_values(q, x))[which, rows])

    s_lo = signs(lo)
    while np.max(hi - lo) > BISECT_WIDTH:
        mid = 0.5 * (lo + hi)
        s_mid = signs(mid)
        same = s_mid == s_lo
        # an exact zero at mid collapses the bracket onto it
        exact = s_mid == 0
        lo = np.where(same | exact, mid, lo)
        hi = np.where(same & ~exact, hi, mid)
    return 0.5 * (lo + hi)


def _scan(q, count):
    grid = np.linspace(0.0, HALF_PI, count + 1)[1:]
    p, dp, ep, edp = series_profile(q, grid)
    inner_ok = (np.abs(p[:-1]) > MARGIN * ep[:-1]) & (np.abs(dp[:-1]) > MARGIN * edp[:-1])
    if not inner_ok.all():
        return None
    # pi/2 is a genuine zero of p or p' at integer lam; leave it out then
    keep_p = abs(p[-1]) > MARGIN * ep[-1]
    keep_dp = abs(dp[-1]) > MARGIN * edp[-1]
    if not q.is_integer and not (keep_p and keep_dp):
        raise IndeterminateSign(
            f"endpoint value at pi/2 fails the margin rule for lam={q.lam}")

    def brackets(values, keep):
        v = values if keep else values[:-1]
        g = grid if keep else grid[:-1]
        s = np.sign(v)
        idx = np.flatnonzero(s[:-1] != s[1:])
        return g[idx], g[idx + 1]

    lo_p, hi_p = brackets(p, keep_p)
    lo_d, hi_d = brackets(dp, keep_dp)
    which = np.r_[np.zeros(lo_p.size, int), np.ones(lo_d.size, int)]
    roots = _bisect(q, np.r_[lo_p, lo_d], np.r_[hi_p, hi_d], which)
    zeros, crits = roots[:lo_p.size], roots[lo_p.size:]
    return OscillationReport(tuple(float(x) for x in zeros),
                             tuple(float(x) for x in crits))


def find_special_points(q):
    """Locate zeros of p and p' in (0, pi/2) by scanning plus bisection.

    The grid starts at ``max(64, 16 * ceil(lam))`` points and is refined if
    a grid value is too close to zero to trust or if the zeros do not
    alternate.
    """
    count = max(64, 16 * math.ceil(q.lam))
    for _ in range(GRID_RETRIES):
        report = _scan(q, count)
        if report is not None and _alternates(report):
            return report
        # odd refinement moves every interior node
        count = 2 * count + 1
    if report is None:
        raise IndeterminateSign(
            f"grid values kept failing the margin rule for lam={q.lam}, dim={q.dim}")
    raise InternalInconsistency(
        f"zeros of p and p' do not alternate for lam={q.lam}, dim={q.dim}: "
        f"{report.merged()}")


def interlacing_check(q_low, q_high):
    """Sturm comparison between two frequencies in the same dimension.

    True iff the higher profile vanishes before the first zero of the lower
    one and between every pair of consecutive lower zeros.
    """
    if q_low.dim != q_high.dim:
        raise InvalidDimension("interlacing needs a common dimension")
    if not q_low.lam < q_high.lam:
        raise ValueError("q_low.lam must be smaller than q_high.lam")
    low = find_special_points(q_low).zeros
    high = np.array(find_special_points(q_high).zeros)
    edges = (0.0, *low)
    for a, b in zip(edges[:-1], edges[1:]):
        if not np.any((high > a) & (high < b)):
            return False
    return True


class CapKind(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class CapQuery:
    theta: float
    dim: int
    kind: CapKind = CapKind.DIRICHLET
    branch: int = 1

    def __post_init__(self):
        if not 0 < self.theta <= HALF_PI:
            raise ValueError(f"cap aperture must lie in (0, pi/2], got {self.theta}")
        if self.dim < 2:
            raise InvalidDimension(f"dimension must be >= 2, got {self.dim}")
        if self.branch < 1:
            raise ValueError("branch must be >= 1")
        object.__setattr__(self, "kind", CapKind(self.kind))


def _cap_value(c, lam):
    which = 0 if c.kind is CapKind.DIRICHLET else 1
    out = series_profile(ProfileQuery(lam, c.dim), np.array([c.theta]))
    return float(out[which][0]), float(out[which + 2][0])


def _cap_sign(c, lam):
    value, err = _cap_value(c, lam)
    if err > CAP_MAX_ERR:
        raise BranchNotFound(
            f"series lost precision at lam={lam:g} before branch {c.branch} was found")
    return 0 if abs(value) <= err else (1 if value > 0 else -1)


def cap_frequency(c, lam_max=CAP_LAMBDA_MAX):
    """The ``c.branch``-th frequency whose profile has a zero (Dirichlet) or
    critical point (Neumann) at the cap boundary ``phi = c.theta``.

    The corresponding cap eigenvalue is ``lam * (lam + dim - 2)``.
    """
    steps = int(round(lam_max / CAP_STEP))
    found = 0
    prev_lam, prev_sign = None, 0
    for i in range(1, steps + 1):
        lam = i * CAP_STEP
        s = _cap_sign(c, lam)
        if s == 0:
            continue
        if prev_sign and s != prev_sign:
            found += 1
            if found == c.branch:
                return _refine(c, prev_lam, lam, prev_sign)
        prev_lam, prev_sign = lam, s
    raise BranchNotFound(
        f"branch {c.branch} not found for lam <= {lam_max:g} "
        f"(theta={c.theta}, dim={c.dim}, {c.kind.value})")


def _refine(c, lo, hi, s_lo):
    while hi - lo > CAP_TOL:
        mid = 0.5 * (lo + hi)
        value, err = _cap_value(c, mid)
        if value == 0.0 or abs(value) <= err:
            return mid
        if (value > 0) == (s_lo > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class VerdictStatus(enum.Enum):
    EXCLUDED = "excluded"
    NOT_EXCLUDED = "not-excluded"
    INTEGER_BOUNDARY = "integer"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class GapVerdict:
    status: VerdictStatus
    sign_product: float
    margin_ok: bool
    # index of the excluded interval (2k, 2k+1); None unless EXCLUDED
    k: int | None = None

    @property
    def label(self):
        if self.status is VerdictStatus.EXCLUDED:
            return f"excluded:{self.k}"
        return self.status.value


def gap_verdict(q):
    """Decide whether ``q.lam`` is excluded as a frequency.

    The sign of p(pi/2) * p'(pi/2), computed from the gamma closed forms, is
    compared against the arithmetic test "floor(lam) even and lam not an
    integer". Any disagreement raises :class:`InternalInconsistency`.
    """
    lam = q.lam
    ev = endpoint_values(q)
    product = ev.p_half * ev.dp_half
    if q.is_integer:
        return GapVerdict(VerdictStatus.INTEGER_BOUNDARY, product, True)
    if abs(lam - round(lam)) < NEAR_INTEGER or not ev.certifiable:
        return GapVerdict(VerdictStatus.INDETERMINATE, product, ev.certifiable)

    computed = endpoint_signs(ev)
    predicted = endpoint_signs_predicted(lam)
    if computed != predicted:
        raise InternalInconsistency(
            f"endpoint signs {computed} disagree with the predicted signs {predicted} "
            f"at lam={lam}, dim={q.dim}")

    floor = math.floor(lam)
    arithmetic = floor % 2 == 0
    numeric = product < 0
    if arithmetic != numeric:
        raise InternalInconsistency(
            f"sign product {product!r} disagrees with the interval test at lam={lam}")
    if numeric:
        return GapVerdict(VerdictStatus.EXCLUDED, product, True, floor // 2)
    return GapVerdict(VerdictStatus.NOT_EXCLUDED, product, True)
