import math
from fractions import Fraction

import pytest

from rowpade import (
    ComponentAnalysis,
    EmptyCompactError,
    Exact,
    InsufficientData,
    Polynomial,
    UsageError,
    assign_k,
    catalog,
    circle_compact,
    coeff_norm_diff,
    consecutive_differences,
    delta_j_indicators,
    estimate_rstar,
    fit_rate,
    indicator_report,
    mu_indicator,
    rational_series,
    scalar_row,
    sup_error,
    system_row,
    telescope,
)
from rowpade.rows import CompactSet, denominator_rate, fit_rate_parity_aware, surviving_points


def P(*coeffs):
    return Polynomial.from_exact(coeffs)


@pytest.fixture(scope="module")
def fw_row(exact_ctx):
    return system_row(catalog("5.1-fw", {"p": "2"}), (1, 1), 1, (6, 32), exact_ctx)


@pytest.fixture(scope="module")
def fg_row(exact_ctx):
    return system_row(catalog("5.1-fg"), (1, 1), 1, (4, 24), exact_ctx)


# ---------------------------------------------------------------------------
# rows and telescoping
# ---------------------------------------------------------------------------

def test_row_members_present(fg_row):
    assert fg_row.orders() == list(range(4, 25))
    for n in fg_row.orders():
        assert fg_row.members[n].n == n
        assert fg_row.zero_sets[n].total_multiplicity == 2


def test_row_rejects_low_start(exact_ctx):
    f = rational_series(P(1), P(1, -1))
    with pytest.raises(UsageError):
        scalar_row(f, 2, 1, (1, 8), exact_ctx)


def test_telescope_vanishes_for_reproduced_rational(exact_ctx):
    f = rational_series(P(1), P(1, -1))
    row = scalar_row(f, 1, 1, (1, 10), exact_ctx)
    for n in range(1, 10):
        term = telescope(row, n)
        assert term.a == 0 or term.a == Exact(0)
        assert float(term.a_abs) == 0.0
        assert term.q == Polynomial.one()


def test_telescope_magnitudes_match_closed_form(fw_row):
    # derived two-pole decay: |a_n| * (2^(n+1) - 1) / 6 tends to 1
    for n in range(8, 30, 2):
        t = telescope(fw_row, n)
        ratio = float(t.a_abs) * (2 ** (n + 1) - 1) / 6
        assert abs(ratio - 1) < 0.05, (n, ratio)


def test_telescope_degree_bound(fw_row, fg_row):
    for row in (fw_row, fg_row):
        bound = row.denominator_bound - row.mstar
        for n in row.orders()[:-1]:
            assert telescope(row, n).deg_q <= bound


def test_telescope_identity_exact(fw_row):
    n = 11
    term = telescope(fw_row, n)
    a1, a2 = fw_row.members[n], fw_row.members[n + 1]
    diff = (a1.q * a2.p - a2.q * a1.p).shift_up(a1.lam + a2.lam)
    rebuilt = term.q.scale(term.a).shift_up(n + 1)
    assert diff == rebuilt


def test_telescope_needs_consecutive_members(fw_row):
    with pytest.raises(UsageError):
        telescope(fw_row, 32)


# ---------------------------------------------------------------------------
# radius estimation
# ---------------------------------------------------------------------------

def test_radius_two_pole(fw_row):
    est = estimate_rstar(fw_row)
    assert est.rstar == pytest.approx(2.0, abs=0.1)


def test_radius_boundary_pair(fg_row):
    est = estimate_rstar(fg_row)
    assert est.rstar == pytest.approx(1.0, abs=0.05)


def test_radius_infinite_for_reproduced_rational(exact_ctx):
    f = rational_series(P(1), P(1, -1))
    row = scalar_row(f, 1, 1, (1, 12), exact_ctx)
    est = estimate_rstar(row)
    assert est.rstar == math.inf


def test_radius_needs_enough_terms(exact_ctx):
    f = rational_series(P(1), P(1, -1))
    row = scalar_row(f, 1, 1, (1, 6), exact_ctx)
    with pytest.raises(InsufficientData):
        estimate_rstar(row)


def test_radius_monotonicity_chain(exact_ctx):
    # estimated radius sits between the smaller and larger reference radii
    row = system_row(catalog("5.2-g"), (1, 1), 2, (10, 36), exact_ctx)
    est = estimate_rstar(row)
    r_low = float(catalog("5.2-g")[1].metadata.radius(1))
    r_high = float(catalog("5.2-g")[1].metadata.radius(2))
    assert r_low * 0.95 <= est.rstar <= r_high * 1.05


def test_radius_strictness_witness(exact_ctx):
    # one component can converge far beyond the joint meromorphy radius
    row = system_row(catalog("5.2-f1f2"), (1, 1), 2, (6, 20), exact_ctx)
    est = estimate_rstar(row)
    assert est.rstar > 20 or est.rstar == math.inf


def test_radius_polewise_independent_matches_reference(exact_ctx):
    # both components of the two-pole pair estimate radius 2 = the joint one
    for comp in (1, 2):
        row = system_row(catalog("5.1-fw", {"p": "2"}), (1, 1), comp, (6, 32), exact_ctx)
        est = estimate_rstar(row)
        assert est.rstar == pytest.approx(2.0, rel=0.05)


# ---------------------------------------------------------------------------
# rate fitting
# ---------------------------------------------------------------------------

def test_fit_rate_exact_geometric():
    values = {n: 3.0 * 0.25 ** n for n in range(8, 30)}
    fit = fit_rate(values)
    assert fit.regression_rate == pytest.approx(0.25, rel=1e-12)


def test_fit_rate_polynomial_factor_suppressed():
    values = {n: n * n * 0.5 ** n for n in range(10, 261)}
    near = fit_rate(values, (10, 40)).regression_rate
    far = fit_rate(values, (200, 260)).regression_rate
    assert abs(far - 0.5) < abs(near - 0.5)
    assert far == pytest.approx(0.5, abs=0.01)


def test_fit_rate_all_zeros_flagged():
    fit = fit_rate({n: 0.0 for n in range(5, 15)})
    assert fit.regression_rate == 0.0
    assert fit.flag == "all-zero"


def test_fit_rate_insufficient():
    with pytest.raises(InsufficientData):
        fit_rate({1: 1.0, 2: 0.5, 3: 0.0, 4: 0.0})


def test_parity_aware_fit_picks_dominant():
    values = {}
    for n in range(10, 40):
        values[n] = 0.5 ** n if n % 2 == 0 else 0.1 ** n
    fit = fit_rate_parity_aware(values)
    assert fit.flag == "regression:even"
    assert fit.regression_rate == pytest.approx(0.5, rel=1e-6)


# ---------------------------------------------------------------------------
# indicators
# ---------------------------------------------------------------------------

def test_indicators_attracting_pole(fw_row):
    rep = indicator_report(fw_row, 1)
    assert rep.delta_big == pytest.approx(0.5, abs=0.05)
    assert rep.delta_j[0] == pytest.approx(0.5, abs=0.05)
    assert rep.delta_j[1] == pytest.approx(1.0, abs=0.01)
    assert rep.mu == 1
    assert mu_indicator(rep, 0.05) == 1


def test_indicators_boundary_pole(fg_row):
    rep = indicator_report(fg_row, 1)
    assert rep.delta_big == pytest.approx(1.0, abs=0.01)
    assert rep.mu == 0


def test_indicator_far_point_clamps(fg_row, exact_ctx):
    rep = indicator_report(fg_row, 100)
    assert rep.delta_big <= 1.0
    assert rep.delta_big == pytest.approx(1.0, abs=1e-3)
    assert all(d == 1.0 for d in rep.delta_j)
    # an exactly constant |Q_n(a)| sequence pins the estimate at 1
    f = rational_series(P(1), P(1, -1))
    row = scalar_row(f, 1, 1, (1, 12), exact_ctx)
    far = indicator_report(row, 100)
    assert far.delta_big == 1.0


def test_delta_j_exact_pole(exact_ctx):
    # the reproduced rational puts a zero exactly on the pole for every n
    f = rational_series(P(1), P(1, -1))
    row = scalar_row(f, 1, 1, (1, 12), exact_ctx)
    deltas = delta_j_indicators(row, 1)
    assert deltas[0] == 0.0
    rep = indicator_report(row, 1)
    assert rep.mu == 1


def test_deltas_nondecreasing(fw_row):
    rep = indicator_report(fw_row, 1)
    assert list(rep.delta_j) == sorted(rep.delta_j)


# ---------------------------------------------------------------------------
# compacts and errors
# ---------------------------------------------------------------------------

def test_sup_error_zero_for_reproduced_rational(exact_ctx):
    f = rational_series(P(1), P(1, 0, -1))
    row = scalar_row(f, 2, 2, (2, 12), exact_ctx)
    K = circle_compact(Fraction(1, 2), exact_ctx, 64, epsilon=1e-2)
    err = sup_error(row, 6, K)
    assert float(err) < 1e-70


def test_exclusion_removes_no_distant_points(fw_row, exact_ctx):
    K = circle_compact(Fraction(1, 4), exact_ctx, 128, epsilon=1e-2)
    survivors = surviving_points(K, fw_row)
    assert len(survivors) == 128


def test_exclusion_correctness(fw_row, exact_ctx):
    K = circle_compact(1, exact_ctx, 256, epsilon=1e-1)
    survivors = surviving_points(K, fw_row, reference_poles=(Exact(-1), Exact(2)))
    eps = exact_ctx.mp.mpf(1e-1)
    m = fw_row.denominator_bound
    for z in survivors:
        for n, zs in fw_row.zero_sets.items():
            for root in zs.roots:
                assert abs(z - root.value) > eps / (6 * m * n * n)


def test_fully_excluded_compact(exact_ctx):
    f = rational_series(P(1), P(1, -1))
    row = scalar_row(f, 1, 1, (1, 10), exact_ctx)
    # every member keeps its zero at 1; a tiny ring around it dies entirely
    mp = exact_ctx.mp
    pts = tuple(1 + mp.mpf(1e-9) * mp.exp(mp.mpc(0, 2) * mp.pi * k / 8) for k in range(8))
    K = CompactSet(pts, "ring around the pole", 1e-2)
    with pytest.raises(EmptyCompactError):
        surviving_points(K, row)


# ---------------------------------------------------------------------------
# denominator coefficient distance
# ---------------------------------------------------------------------------

def test_coeff_norm_diff_identical(exact_ctx):
    p = P(-1, 0, 1)
    assert float(coeff_norm_diff(p, p, exact_ctx)) == 0.0


def test_coeff_norm_diff_sign_flip(exact_ctx):
    assert float(coeff_norm_diff(P(-1, 0, 1), P(1, 0, 1), exact_ctx)) == 2.0


def test_denominator_rate_two_pole_pair(exact_ctx):
    row = system_row(catalog("5.2-g"), (1, 1), 1, (12, 40), exact_ctx)
    target = P(-1, Exact(Fraction(3, 2)), Exact(Fraction(-1, 2)))
    fit = denominator_rate(row, target)
    assert fit.regression_rate <= 1 / 3 + 0.05


# ---------------------------------------------------------------------------
# divergence probe and component assignment
# ---------------------------------------------------------------------------

def test_consecutive_differences_grow_outside(fw_row):
    values = consecutive_differences(fw_row, 3)
    fit = fit_rate(values, (10, 30))
    assert fit.regression_rate > 1.2


def test_assign_k_unique_pole(exact_ctx):
    comps = [
        ComponentAnalysis(2.0, ((Exact(1), 1), (Exact(2), 1))),
        ComponentAnalysis(math.inf, ((Exact(3), 1),)),
    ]
    assert assign_k(comps, 3, exact_ctx) == 2
    assert assign_k(comps, 1, exact_ctx) == 1


def test_assign_k_tie_breaks_by_radius(exact_ctx):
    comps = [
        ComponentAnalysis(3.0, ((Exact(1), 1),)),
        ComponentAnalysis(5.0, ((Exact(1), 1),)),
    ]
    assert assign_k(comps, 1, exact_ctx) == 2
    comps_equal = [
        ComponentAnalysis(4.0, ((Exact(1), 1),)),
        ComponentAnalysis(4.0, ((Exact(1), 1),)),
    ]
    assert assign_k(comps_equal, 1, exact_ctx) == 1


def test_assign_k_requires_a_pole(exact_ctx):
    comps = [ComponentAnalysis(2.0, ((Exact(1), 1),))]
    with pytest.raises(UsageError):
        assign_k(comps, 7, exact_ctx)
