"""Double-double helpers (error-free transforms on plain floats).

Every function works elementwise on Python floats and on numpy arrays alike.
A double-double number is an unevaluated sum ``hi + lo`` with
``|lo| <= ulp(hi) / 2``.
"""

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def fast_two_sum(a, b):
    # requires |a| >= |b| (or a == 0)
    s = a + b
    return s, b - (s - a)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def dd_add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    return fast_two_sum(s, e + (al + bl))


def dd_mul(ah, al, bh, bl):
    p, e = two_prod(ah, bh)
    return fast_two_sum(p, e + (ah * bl + al * bh))


def dd_mul_d(ah, al, b):
    p, e = two_prod(ah, b)
    return fast_two_sum(p, e + al * b)


def dd_div_d(ah, al, d):
    q = ah / d
    p, e = two_prod(q, d)
    return fast_two_sum(q, ((ah - p) - e + al) / d)


def dd_horner(hi, lo, x):
    """Evaluate sum_k (hi[k] + lo[k]) * x**k; returns ``(value_hi, value_lo)``."""
    sh, sl = hi[-1], lo[-1]
    sh = sh + 0.0 * x
    sl = sl + 0.0 * x
    for k in range(len(hi) - 2, -1, -1):
        sh, sl = dd_mul_d(sh, sl, x)
        sh, sl = dd_add(sh, sl, hi[k], lo[k])
    return sh, sl
