"""Acceptance suite: one pass/fail line per criterion (see the summary section)."""

import functools
import math
import random
import time

import numpy as np

from grids import DIMS, LAMBDA_200, NONINTEGER_GRID
from freqgap import InternalInconsistency
from freqgap.profile import (HALF_PI, MARGIN, Method, ProfileQuery,
                             certified_sign, endpoint_values, profile_on_grid,
                             series_profile)
from freqgap.cli import main
from freqgap.identity import verify_identity
from freqgap.oscillation import (CapKind, CapQuery, VerdictStatus,
                                 cap_frequency, find_special_points,
                                 gap_verdict, interlacing_check)
from freqgap.solutions import ExplicitSolution, Family, catalog, check_solution


def test_c01_closed_form_n2(record):
    start = time.perf_counter()
    phi = np.linspace(0.0, HALF_PI, 101)
    worst = 0.0
    for lam in LAMBDA_200:
        p, _, err, _ = profile_on_grid(ProfileQuery(lam, 2), phi, Method.SERIES)
        worst = max(worst, float(np.max(np.abs(p - np.cos(lam * phi)) - err)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 5.0
    assert record(1, "closed form n=2", ok,
                  f"max |p - cos| - err = {worst:.2e}, {elapsed:.2f} s")


def test_c02_endpoint_n3(record):
    worst = 0.0
    for lam in LAMBDA_200:
        q = ProfileQuery(lam, 3)
        p, _, _, _ = series_profile(q, np.array([HALF_PI]))
        worst = max(worst, abs(endpoint_values(q).p_half - float(p[0])))
    assert record(2, "n=3 endpoint, gamma vs series", worst <= 1e-11,
                  f"max gap {worst:.2e} over {len(LAMBDA_200)} lambda")


@functools.lru_cache(maxsize=None)
def _special_points(lam, dim):
    # shared by criteria 5 and 9 so the sweep runs once
    return find_special_points(ProfileQuery(lam, dim))


def _predicted(lam):
    return (int(np.sign(math.cos(lam * HALF_PI))), int(np.sign(-math.sin(lam * HALF_PI))))


def test_c03_sign_law(record):
    violations = 0
    for dim in DIMS:
        for lam in NONINTEGER_GRID:
            ev = endpoint_values(ProfileQuery(lam, dim))
            margin = (abs(ev.p_half) > MARGIN * ev.err_p
                      and abs(ev.dp_half) > MARGIN * ev.err_dp)
            signs = (int(certified_sign(ev.p_half, ev.err_p)),
                     int(certified_sign(ev.dp_half, ev.err_dp)))
            violations += not margin or signs != _predicted(lam)
    cases = len(NONINTEGER_GRID) * len(DIMS)
    assert record(3, "sign law at pi/2", violations == 0,
                  f"{violations} violations in {cases} cases")


def test_c04_verdict_law(record):
    wrong = inconsistent = 0
    for dim in DIMS:
        for lam in NONINTEGER_GRID:
            try:
                v = gap_verdict(ProfileQuery(lam, dim))
            except InternalInconsistency:
                inconsistent += 1
                continue
            floor = math.floor(lam)
            if floor % 2 == 0:
                wrong += not (v.status is VerdictStatus.EXCLUDED and v.k == floor // 2)
            else:
                wrong += v.status is not VerdictStatus.NOT_EXCLUDED
    ok = wrong == 0 and inconsistent == 0
    assert record(4, "gap verdict law", ok,
                  f"{wrong} wrong verdicts, {inconsistent} inconsistencies")


def _alternates(rep):
    tags = [t for _, t in rep.merged()]
    return tags == ["p" if i % 2 == 0 else "dp" for i in range(len(tags))]


def test_c05_oscillation_laws(record):
    count_bad = alt_bad = inc_bad = 0
    for dim in DIMS:
        for lam in NONINTEGER_GRID:
            rep = _special_points(lam, dim)
            count_bad += rep.total != math.floor(lam)
            alt_bad += not _alternates(rep)
        for m in range(1, 10):
            below = find_special_points(ProfileQuery(m - 0.01, dim))
            above = find_special_points(ProfileQuery(m + 0.01, dim))
            inc_bad += above.total != below.total + 1
            alt_bad += not (_alternates(below) and _alternates(above))
    ok = count_bad == inc_bad == alt_bad == 0
    assert record(5, "count, increment and alternation laws", ok,
                  f"count {count_bad}, increment {inc_bad}, alternation {alt_bad} failures")


def test_c06_interlacing(record):
    rng = random.Random(20240601)
    failed = []
    for _ in range(100):
        a, b = sorted(rng.uniform(0.0, 10.0) for _ in range(2))
        a = max(a, 1e-3)
        dim = rng.randint(2, 7)
        if not interlacing_check(ProfileQuery(a, dim), ProfileQuery(b, dim)):
            failed.append((a, b, dim))
    assert record(6, "interlacing of zeros", not failed,
                  f"{len(failed)} of 100 random pairs failed")


def test_c07_identity(record):
    worst, cases, ok = 0.0, 0, True
    for dim in (2, 3, 4, 5):
        for sol in catalog(7.5, dim):
            rep = verify_identity(sol)
            cases += 1
            worst = max(worst, rep.residual_rel)
            ok &= rep.passed
    exact = []
    for k, value in ((0, 3 * math.sqrt(2) / 4), (1, -7 * math.sqrt(2) / 4)):
        rep = verify_identity(ExplicitSolution(Family.THREE_HALVES, k, 2))
        exact.append(max(abs(rep.lhs - value), abs(rep.rhs - value)))
    ok = ok and worst <= 1e-8 and cases >= 30 and max(exact) <= 1e-10
    assert record(7, "spherical integration-by-parts identity", ok,
                  f"{cases} cases, max rel residual {worst:.1e}, "
                  f"exact-case error {max(exact):.1e}")


def test_c08_solution_conditions(record):
    worst, cases = 0.0, 0
    for dim in (2, 3, 4, 5):
        for sol in catalog(7.5, dim):
            # raises CheckFailed on the first violation
            chk = check_solution(sol, samples=10_000)
            worst = max(worst, chk.max_laplacian)
            cases += 1
    assert record(8, "sign, homogeneity, evenness, harmonicity", worst <= 1e-4,
                  f"{cases} members, max Laplacian ratio {worst:.1e}")


def test_c09_cap_round_trip(record):
    worst = 0.0
    for dim in DIMS:
        d = cap_frequency(CapQuery(HALF_PI, dim, CapKind.DIRICHLET, 1))
        n = cap_frequency(CapQuery(HALF_PI, dim, CapKind.NEUMANN, 1))
        worst = max(worst, abs(d - 1), abs(n - 2))
    monotone = True
    for dim in DIMS:
        lams = [lam for lam in NONINTEGER_GRID if lam > 1]
        first = [_special_points(lam, dim).zeros[0] for lam in lams]
        monotone &= all(a > b for a, b in zip(first, first[1:]))
    ok = worst <= 1e-10 and monotone
    assert record(9, "cap frequencies at pi/2 and first-zero monotonicity", ok,
                  f"max error {worst:.1e}, monotone={monotone}")


def test_c10_end_to_end(record, capsys):
    start = time.perf_counter()
    code = main(["verify", "7.5", "--dims", "2,3,4,5"])
    elapsed = time.perf_counter() - start
    tail = capsys.readouterr().out.strip().splitlines()[-1]
    assert record(10, "verify 7.5 --dims 2,3,4,5", code == 0,
                  f"exit {code} in {elapsed:.1f} s; {tail}")
