import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grids import DIMS, NONINTEGER_GRID
from freqgap import (BranchNotFound, IndeterminateSign, InvalidDimension,
                     ProfileQuery)
from freqgap.oscillation import (CapKind, CapQuery, GapVerdict, VerdictStatus,
                                 cap_frequency, find_special_points,
                                 gap_verdict, interlacing_check)

PI = math.pi


# ------------------------------------------------------------ special points

@pytest.mark.parametrize("lam, zeros, crits", [
    (2.5, [PI / 5], [2 * PI / 5]),
    (0.5, [], []),
    (4.5, [PI / 9, PI / 3], [2 * PI / 9, 4 * PI / 9]),
    (1.5, [PI / 3], []),
])
def test_special_points_closed_form(lam, zeros, crits):
    rep = find_special_points(ProfileQuery(lam, 2))
    assert len(rep.zeros) == len(zeros) and len(rep.crits) == len(crits)
    assert np.allclose(rep.zeros, zeros, atol=1e-10, rtol=0)
    assert np.allclose(rep.crits, crits, atol=1e-10, rtol=0)
    assert rep.total == math.floor(lam)


@settings(max_examples=40, deadline=None)
@given(lam=st.floats(0.05, 10.0).filter(lambda x: abs(x - round(x)) > 1e-3))
def test_n2_zeros_match_cosine(lam):
    rep = find_special_points(ProfileQuery(lam, 2))
    j = np.arange(len(rep.zeros))
    assert np.allclose(rep.zeros, (j + 0.5) * PI / lam, atol=1e-9, rtol=0)
    j = np.arange(1, len(rep.crits) + 1)
    assert np.allclose(rep.crits, j * PI / lam, atol=1e-9, rtol=0)


def test_n3_zeros_are_legendre_roots():
    # P_5(cos phi): the roots of the degree-5 Legendre polynomial with t > 0
    rep = find_special_points(ProfileQuery(5.0, 3))
    roots = np.polynomial.legendre.Legendre.basis(5).roots()
    expected = np.sort(np.arccos(roots[roots > 1e-12]))
    assert np.allclose(rep.zeros, expected, atol=1e-10)


def test_count_law_subsample():
    # the full 400 x 6 sweep lives in the acceptance suite
    for dim in DIMS:
        for lam in NONINTEGER_GRID[::23]:
            rep = find_special_points(ProfileQuery(lam, dim))
            assert rep.total == math.floor(lam), (lam, dim)


@pytest.mark.parametrize("dim", [2, 4, 7])
def test_increment_law(dim):
    for m in range(1, 10):
        below = find_special_points(ProfileQuery(m - 0.01, dim)).total
        above = find_special_points(ProfileQuery(m + 0.01, dim)).total
        assert above == below + 1, m


@pytest.mark.parametrize("lam", [3.0, 4.0, 7.0])
def test_integer_lambda_total(lam):
    rep = find_special_points(ProfileQuery(lam, 3))
    assert rep.total in (lam - 1, lam)


@settings(max_examples=30, deadline=None)
@given(lam=st.floats(0.05, 10.0), dim=st.integers(2, 7))
def test_alternation_and_ordering(lam, dim):
    rep = find_special_points(ProfileQuery(lam, dim))
    merged = rep.merged()
    locs = [x for x, _ in merged]
    assert all(0 < x < PI / 2 for x in locs)
    assert all(a < b for a, b in zip(locs, locs[1:]))
    assert [t for _, t in merged] == ["p" if i % 2 == 0 else "dp" for i in range(len(merged))]


@pytest.mark.parametrize("dim", [2, 3, 5, 7])
def test_first_zero_decreases(dim):
    lams = [lam for lam in NONINTEGER_GRID if lam > 1][::5]
    first = [find_special_points(ProfileQuery(lam, dim)).zeros[0] for lam in lams]
    assert all(a > b for a, b in zip(first, first[1:]))


# --------------------------------------------------------------- interlacing

@pytest.mark.parametrize("low, high, dim", [(1.5, 2.5, 2), (2.5, 4.5, 2), (3.2, 3.9, 5)])
def test_interlacing_examples(low, high, dim):
    assert interlacing_check(ProfileQuery(low, dim), ProfileQuery(high, dim))


def test_interlacing_reports_missing_zero(monkeypatch):
    import freqgap.oscillation as osc
    from freqgap.oscillation import OscillationReport
    fake = {1.5: OscillationReport((0.5, 1.0), (0.7,)),
            2.5: OscillationReport((0.3, 0.4), (0.35,))}
    monkeypatch.setattr(osc, "find_special_points", lambda q: fake[q.lam])
    # no zero of the higher profile in (0.5, 1.0)
    assert not osc.interlacing_check(ProfileQuery(1.5, 2), ProfileQuery(2.5, 2))


def test_interlacing_validation():
    with pytest.raises(InvalidDimension):
        interlacing_check(ProfileQuery(1.5, 2), ProfileQuery(2.5, 3))
    with pytest.raises(ValueError):
        interlacing_check(ProfileQuery(2.5, 2), ProfileQuery(1.5, 2))


# ----------------------------------------------------------------------- cap

@pytest.mark.parametrize("theta, dim, kind, expected", [
    (PI / 2, 3, CapKind.DIRICHLET, 1.0),
    (PI / 2, 4, CapKind.NEUMANN, 2.0),
    (PI / 3, 2, CapKind.DIRICHLET, 1.5),
    (PI / 4, 2, CapKind.NEUMANN, 4.0),
])
def test_cap_examples(theta, dim, kind, expected):
    assert cap_frequency(CapQuery(theta, dim, kind)) == pytest.approx(expected, abs=1e-10)


def test_cap_higher_branches_n2():
    # Dirichlet at pi/2 in the plane: cos(lam pi/2) = 0 at odd lam
    for branch, lam in enumerate([1.0, 3.0, 5.0], start=1):
        c = CapQuery(PI / 2, 2, CapKind.DIRICHLET, branch)
        assert cap_frequency(c) == pytest.approx(lam, abs=1e-10)


def test_cap_n3_matches_legendre():
    # first Dirichlet frequency of the cap of aperture pi/4 in R^3: P_lam(cos(pi/4)) = 0
    lam = cap_frequency(CapQuery(PI / 4, 3))
    from scipy.special import lpmv
    assert abs(lpmv(0, lam, math.cos(PI / 4))) < 1e-9
    assert 2 < lam < 3


@settings(max_examples=10, deadline=None)
@given(lam=st.floats(1.05, 9.9).filter(lambda x: abs(x - round(x)) > 1e-3),
       dim=st.integers(2, 7))
def test_cap_round_trip(lam, dim):
    first = find_special_points(ProfileQuery(lam, dim)).zeros[0]
    assert cap_frequency(CapQuery(first, dim)) == pytest.approx(lam, abs=1e-8)


def test_cap_branch_not_found():
    with pytest.raises(BranchNotFound):
        cap_frequency(CapQuery(PI / 2, 3, CapKind.DIRICHLET, 3), lam_max=4.0)


@pytest.mark.parametrize("kwargs", [
    dict(theta=0.0, dim=3), dict(theta=2.0, dim=3),
    dict(theta=1.0, dim=1), dict(theta=1.0, dim=3, branch=0),
])
def test_cap_query_validation(kwargs):
    with pytest.raises(ValueError):
        CapQuery(**kwargs)


# ------------------------------------------------------------------- verdict

@pytest.mark.parametrize("lam, dim, label", [
    (2.5, 4, "excluded:1"),
    (3.5, 3, "not-excluded"),
    (4, 2, "integer"),
    (0.3, 6, "excluded:0"),
    (1.5, 2, "not-excluded"),
    (8.75, 7, "excluded:4"),
])
def test_verdict_examples(lam, dim, label):
    assert gap_verdict(ProfileQuery(lam, dim)).label == label


def test_excluded_verdict_invariants():
    v = gap_verdict(ProfileQuery(2.5, 4))
    assert v.status is VerdictStatus.EXCLUDED and v.k == 1
    assert v.sign_product < 0 and v.margin_ok


@pytest.mark.parametrize("lam", [2.0000000001, 5 - 3e-9])
def test_verdict_near_integer_is_indeterminate(lam):
    v = gap_verdict(ProfileQuery(lam, 5))
    assert v.status is VerdictStatus.INDETERMINATE
    assert v.label == "indeterminate"


def test_verdict_law_subsample():
    for dim in DIMS:
        for lam in NONINTEGER_GRID[::7]:
            v = gap_verdict(ProfileQuery(lam, dim))
            floor = math.floor(lam)
            if floor % 2 == 0:
                assert v == GapVerdict(VerdictStatus.EXCLUDED, v.sign_product, True, floor // 2)
            else:
                assert v.status is VerdictStatus.NOT_EXCLUDED


def test_near_integer_scan_is_indeterminate():
    # p(pi/2) is ~1e-10 here: the endpoint cannot be classified
    with pytest.raises(IndeterminateSign):
        find_special_points(ProfileQuery(3 + 1e-12, 4))
