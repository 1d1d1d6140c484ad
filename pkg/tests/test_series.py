import math
from fractions import Fraction

import pytest

from rowpade import (
    Exact,
    MixedModeError,
    Polynomial,
    UsageError,
    catalog,
    log_shift_series,
    parse_series_spec,
    rational_series,
)
from rowpade.series import PowerSeries, poly_times_series


def P(*coeffs):
    return Polynomial.from_exact(coeffs)


def test_geometric_coefficients():
    f = rational_series(P(1), P(1, -1))
    assert f.coeff(7) == Exact(1)
    assert all(f.coeff(k) == Exact(1) for k in range(12))


def test_even_only_expansion():
    f = rational_series(P(1), P(1, 0, -1))  # 1/(1-z^2)
    assert f.coeff(5) == Exact(0)
    assert f.coeff(6) == Exact(1)


def test_alternating_odd_pattern():
    g = rational_series(P(0, 1), P(1, 0, 1))  # z/(1+z^2)
    expected = [0, 1, 0, -1, 0, 1, 0, -1]
    assert [g.coeff(k) for k in range(8)] == [Exact(v) for v in expected]


def _long_division(num, den, upto):
    """Oracle: schoolbook long division of power series with rational terms."""
    coeffs = []
    rem = list(num) + [Fraction(0)] * (upto + 1 - len(num))
    for k in range(upto + 1):
        c = rem[k] / den[0]
        coeffs.append(c)
        for i, d in enumerate(den):
            if k + i <= upto:
                rem[k + i] -= c * d
    return coeffs


def test_rational_series_against_long_division():
    num = [Fraction(1)]
    den = [Fraction(2), Fraction(-3), Fraction(1)]  # (1-z)(2-z)
    oracle = _long_division(num, den, 6)
    f = rational_series(P(1), P(2, -3, 1))
    assert oracle[0] == Fraction(1, 2) and oracle[1] == Fraction(3, 4)
    for k in range(7):
        assert f.coeff(k) == Exact(oracle[k])


def test_rational_series_needs_nonzero_origin():
    with pytest.raises(UsageError):
        rational_series(P(1), P(0, 1))


def test_rational_series_metadata_autofill(exact_ctx):
    f = rational_series(P(1), P(2, -3, 1))
    poles = sorted(float(abs(exact_ctx.to_mpc(loc))) for loc, _ in f.metadata.known_poles)
    assert poles == pytest.approx([1.0, 2.0], abs=1e-30)
    assert float(f.metadata.radius(0)) == pytest.approx(1.0)
    assert float(f.metadata.radius(1)) == pytest.approx(2.0)
    assert f.metadata.radius(2) == math.inf
    mp = exact_ctx.mp
    value = f.metadata.evaluator(exact_ctx, mp.mpc(0.25))
    expected = 1 / ((1 - mp.mpf(1) / 4) * (2 - mp.mpf(1) / 4))
    assert abs(value - expected) < 1e-60


def test_log_shift_coefficients_match_derivative_oracle():
    # d/dz log(a-z) = -1/(a-z), so k * phi_k equals coefficient k-1 of -1/(a-z)
    for a in (Fraction(3), Fraction(10)):
        f = log_shift_series(a)
        deriv = rational_series(P(-1), P(Exact(a), -1))
        for k in range(1, 9):
            assert f.coeff(k) * Exact(k) == deriv.coeff(k - 1)
    assert log_shift_series(3).coeff(1) == Exact(Fraction(-1, 3))
    assert log_shift_series(10).coeff(3) == Exact(Fraction(-1, 3000))


def test_log_shift_at_one_has_zero_constant():
    assert log_shift_series(1).coeff(0) == Exact(0)


def test_log_shift_constant_is_tagged():
    phi0 = log_shift_series(3).coeff(0)
    assert phi0.sym and str(phi0.sym[0][0]) == "log(3)"


def test_combine_add_zero():
    f = rational_series(P(1), P(1, -1))
    zero = PowerSeries(lambda k: Exact(0), "0")
    g = f + zero
    assert [g.coeff(k) for k in range(6)] == [f.coeff(k) for k in range(6)]


def test_combine_scale_doubles():
    f = rational_series(P(1), P(1, -1))
    g = 2 * f
    assert all(g.coeff(k) == Exact(2) for k in range(6))


def test_combine_linearity():
    f = rational_series(P(1), P(1, -1))
    g = rational_series(P(0, 1), P(1, 0, 1))
    a, b = Exact(Fraction(2, 3)), Exact(Fraction(-5, 7))
    combined = (a * f) + (b * g)
    for k in range(10):
        assert combined.coeff(k) == a * f.coeff(k) + b * g.coeff(k)


def test_combine_mixed_modes_rejected():
    f = rational_series(P(1), P(1, -1))
    g = PowerSeries(lambda k: 0.0, "float-native", mode="float")
    with pytest.raises(MixedModeError):
        f + g


def test_combine_drops_colliding_pole():
    h1 = catalog("5.3-h")[0]
    h2 = catalog("5.3-h")[1]
    diff = h1 - h2
    # the shared pole at 1 may cancel, so the merged metadata drops it
    locs = [loc for loc, _ in diff.metadata.known_poles]
    assert all(loc != Exact(1) for loc in locs)
    assert any(loc == Exact(2) for loc in locs)


def test_poly_times_series():
    f = rational_series(P(1), P(1, -1))
    t = P(1, 1)
    g = poly_times_series(t, f)
    assert g.coeff(0) == Exact(1)
    assert all(g.coeff(k) == Exact(2) for k in range(1, 6))


# ---------------------------------------------------------------------------
# catalog reference data
# ---------------------------------------------------------------------------

RADII = {
    ("5.1-fg", 0): {0: 1, 1: 1, 2: math.inf},
    ("5.1-fg", 1): {0: 1, 1: 1, 2: math.inf},
    ("5.1-fh", 1): {0: 1, 1: math.inf},
    ("5.2-f1f2", 0): {0: 1, 1: 2, 2: math.inf},
    ("5.2-f1f2", 1): {0: 3, 1: math.inf},
    ("5.2-g", 0): {0: 1, 1: 3, 2: 3},
    ("5.2-g", 1): {0: 2, 1: 10, 2: 10},
    ("5.3-h", 0): {0: 1, 1: 2, 2: 3},
    ("5.3-h", 1): {0: 1, 1: 3, 2: 3},
    ("5.3-hhat", 0): {0: 2, 1: 4, 2: 4},
    ("5.3-hhat", 1): {0: 1, 1: 3, 2: 3},
}


@pytest.mark.parametrize("name,component", sorted(RADII))
def test_catalog_radii_table(name, component):
    system = catalog(name, {"p": "2"} if name == "5.1-fw" else None)
    meta = system[component].metadata
    for m, want in RADII[(name, component)].items():
        assert float(meta.radius(m)) == pytest.approx(float(want))


def test_catalog_radii_nondecreasing():
    for name in ("5.1-fg", "5.2-f1f2", "5.2-g", "5.3-h", "5.3-hhat"):
        system = catalog(name)
        for comp in system.components:
            radii = [float(comp.metadata.radius(m)) for m in range(3)
                     if comp.metadata.radius(m) is not None]
            assert radii == sorted(radii)


def test_catalog_two_pole_companion_poles():
    system = catalog("5.1-fw", {"p": "2"})
    poles = {(str(loc.re), order) for loc, order in system[1].metadata.known_poles}
    assert poles == {("-1", 1), ("2", 1)}


def test_catalog_param_validation():
    with pytest.raises(UsageError):
        catalog("5.1-fw")
    with pytest.raises(UsageError):
        catalog("5.1-fw", {"p": "1/2"})
    with pytest.raises(UsageError):
        catalog("no-such-entry")


def test_catalog_difference_system_coefficients():
    # component 1 of the difference system: the 1/(1-z) parts cancel
    hhat = catalog("5.3-hhat")
    h = catalog("5.3-h")
    for k in range(8):
        assert hhat[0].coeff(k) == h[0].coeff(k) - h[1].coeff(k)


# ---------------------------------------------------------------------------
# series-spec documents
# ---------------------------------------------------------------------------

def test_parse_rational_spec():
    f = parse_series_spec({"kind": "rational", "num": ["1"], "den": ["1", "-1"]})
    assert f.coeff(5) == Exact(1)


def test_parse_logshift_spec():
    f = parse_series_spec({"kind": "logshift", "a": "3"})
    assert f.coeff(1) == Exact(Fraction(-1, 3))


def test_parse_sum_spec():
    doc = {"kind": "sum", "terms": [
        {"kind": "rational", "num": ["1"], "den": ["1", "-1"]},
        {"kind": "logshift", "a": "3"},
    ]}
    f = parse_series_spec(doc)
    assert f.coeff(1) == Exact(1) + Exact(Fraction(-1, 3))


def test_parse_coeffs_spec():
    f = parse_series_spec({"kind": "coeffs", "values": ["1", "0", "1/2"]})
    assert f.coeff(2) == Exact(Fraction(1, 2))
    assert f.coeff(9) == Exact(0)


def test_parse_catalog_spec():
    system = parse_series_spec({"kind": "catalog", "name": "5.1-fw", "params": {"p": "2"}})
    assert system.d == 2


@pytest.mark.parametrize("doc", [
    {"kind": "mystery"},
    {"num": ["1"]},
    {"kind": "rational", "num": "1", "den": ["1"]},
    {"kind": "sum", "terms": []},
    {"kind": "logshift"},
])
def test_parse_rejects_bad_specs(doc):
    with pytest.raises(UsageError):
        parse_series_spec(doc)
