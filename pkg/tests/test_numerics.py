from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rowpade import Exact, Polynomial, UsageError, canonicalize, gcd_reduce, nullspace_vector, roots
from rowpade.numerics import gcd_exact


def P(*coeffs):
    return Polynomial.from_exact(coeffs)


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)
exacts = st.builds(Exact, rationals, rationals)


# ---------------------------------------------------------------------------
# nullspace
# ---------------------------------------------------------------------------

def test_nullspace_single_equation(exact_ctx):
    v, residual = nullspace_vector([[Exact(1), Exact(-1)]], exact_ctx)
    assert residual is None
    assert v[0] * Exact(1) + v[1] * Exact(-1) == Exact(0)
    assert not (v[0].is_zero and v[1].is_zero)


def test_nullspace_zero_matrix_picks_highest_free_column(exact_ctx):
    rows = [[Exact(0)] * 3 for _ in range(2)]
    v, _ = nullspace_vector(rows, exact_ctx)
    assert v == [Exact(0), Exact(0), Exact(1)]


def test_nullspace_chain_system(exact_ctx):
    # verified by direct substitution: (1, -1, 1) solves both equations
    rows = [[Exact(1), Exact(1), Exact(0)], [Exact(0), Exact(1), Exact(1)]]
    v, _ = nullspace_vector(rows, exact_ctx)
    for row in rows:
        acc = Exact(0)
        for c, x in zip(row, v):
            acc = acc + c * x
        assert acc.is_zero
    assert v[0] * Exact(-1) == v[1] and v[1] * Exact(-1) == v[2]


def test_nullspace_shape_validation(exact_ctx):
    with pytest.raises(UsageError):
        nullspace_vector([[Exact(1), Exact(2)], [Exact(0), Exact(1)]], exact_ctx)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(
    lambda r: st.lists(st.lists(exacts, min_size=r + 1, max_size=r + 1),
                       min_size=r, max_size=r)))
def test_nullspace_exact_solution_property(rows):
    ctx = __import__("rowpade").Context("exact", 256)
    v, _ = nullspace_vector(rows, ctx)
    assert any(not x.is_zero for x in v)
    for row in rows:
        acc = Exact(0)
        for c, x in zip(row, v):
            acc = acc + c * x
        assert acc.is_zero


def test_nullspace_float_minimal_residual(float_ctx):
    rows = [[1, 1, 0], [0, 1, 1]]
    v, residual = nullspace_vector(rows, float_ctx)
    assert residual < float_ctx.root_tol
    mp = float_ctx.mp
    norm = sum(abs(x) ** 2 for x in v)
    assert abs(norm - 1) < mp.mpf(2) ** -200


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------

def test_roots_of_quadratic(exact_ctx):
    rs = roots(P(-1, 0, 1), exact_ctx)
    values = sorted(rs.expand(), key=lambda z: z.real)
    assert abs(values[0] + 1) < 1e-60 and abs(values[1] - 1) < 1e-60
    assert all(r.multiplicity == 1 for r in rs)


def test_roots_match_direct_square_root(exact_ctx):
    # oracle: the roots of z^2 - 28/31 are +/- sqrt(28/31)
    mp = exact_ctx.mp
    expected = mp.sqrt(mp.mpf(28) / 31)
    rs = roots(P(Exact(Fraction(-28, 31)), 0, 1), exact_ctx)
    values = sorted(rs.expand(), key=lambda z: z.real)
    assert abs(values[1] - expected) < mp.mpf(2) ** -180
    assert abs(values[0] + expected) < mp.mpf(2) ** -180
    assert abs(float(expected) - 0.95038) < 1e-4


def test_double_root_clusters(exact_ctx):
    rs = roots(P(1, -2, 1), exact_ctx)  # (z-1)^2
    assert len(rs) == 1
    root = rs.roots[0]
    assert root.multiplicity == 2
    # a double root is located to about the square root of the residual floor
    assert abs(root.value - 1) < 1e-28


def test_origin_roots_counted(exact_ctx):
    rs = roots(P(0, 0, 0, 1), exact_ctx)  # z^3
    assert rs.total_multiplicity == 3
    assert rs.roots[0].multiplicity == 3
    assert rs.roots[0].value == 0


def test_degree_zero_rejected(exact_ctx):
    with pytest.raises(UsageError):
        roots(P(3), exact_ctx)


def test_roots_rebuild_round_trip(float_ctx):
    mp = float_ctx.mp
    poly = P(Exact(Fraction(3, 7)), Exact(2), Exact(Fraction(-5, 3)), Exact(1)).to_float(float_ctx)
    rs = roots(poly, float_ctx)
    rebuilt = Polynomial((mp.mpc(1),))
    for z in rs.expand():
        rebuilt = rebuilt * Polynomial((-z, mp.mpc(1)))
    monic = poly.monic()
    for a, b in zip(rebuilt.coeffs, monic.coeffs):
        assert abs(a - b) <= 10 * float_ctx.root_tol * 10


def test_residuals_below_tolerance(exact_ctx):
    rs = roots(P(Exact(Fraction(-28, 31)), 0, 1), exact_ctx)
    assert all(r.residual <= exact_ctx.root_tol for r in rs)


# ---------------------------------------------------------------------------
# gcd
# ---------------------------------------------------------------------------

def test_gcd_reduce_shared_linear_factor(exact_ctx):
    g, qa, qb = gcd_reduce(P(-1, 0, 1), P(-1, 1), exact_ctx)
    assert g == P(-1, 1)
    assert qa == P(1, 1)
    assert qb == P(1)


def test_gcd_reduce_coprime(exact_ctx):
    g, qa, qb = gcd_reduce(P(1, 0, 1), P(-1, 0, 1), exact_ctx)
    assert g.degree == 0
    assert qa == P(1, 0, 1)
    assert qb == P(-1, 0, 1)


def test_gcd_reduce_multiply_back(exact_ctx):
    # (z-1)(z-1/2) and (z-1/2)(z+3); verified by multiplying back exactly
    a = P(Exact(Fraction(1, 2)), Exact(Fraction(-3, 2)), 1)
    b = P(Exact(Fraction(-3, 2)), Exact(Fraction(5, 2)), 1)
    g, qa, qb = gcd_reduce(a, b, exact_ctx)
    assert g == P(Exact(Fraction(-1, 2)), 1)
    assert g * qa == a
    assert g * qb == b


def test_gcd_reduce_float_mode(float_ctx):
    a = P(-1, 0, 1).to_float(float_ctx)
    b = P(-1, 1).to_float(float_ctx)
    g, qa, qb = gcd_reduce(a, b, float_ctx)
    assert g.degree == 1
    assert abs(qa.coeffs[0] - 1) < 1e-60 and abs(qa.coeffs[1] - 1) < 1e-60


@settings(max_examples=40, deadline=None)
@given(st.lists(rationals, min_size=1, max_size=3),
       st.lists(rationals, min_size=1, max_size=3),
       st.lists(rationals, min_size=1, max_size=2))
def test_gcd_exactness_property(ra, rb, rc):
    ctx = __import__("rowpade").Context("exact", 256)
    build = lambda rs: _product([P(Exact(-r), 1) for r in rs])
    a = build(ra) * build(rc)
    b = build(rb) * build(rc)
    g, qa, qb = gcd_reduce(a, b, ctx)
    assert g * qa == a
    assert g * qb == b
    # the shared factor divides the gcd exactly
    common = build(rc)
    _, rem = g.divmod_by(gcd_exact(g, common))
    assert rem.is_zero


def _product(polys):
    acc = Polynomial.one()
    for p in polys:
        acc = acc * p
    return acc


# ---------------------------------------------------------------------------
# normalized form
# ---------------------------------------------------------------------------

def test_canonicalize_mixed_rational_roots(exact_ctx):
    # roots 1/2 (inside) and 3 (outside): (z - 1/2)(1 - z/3)
    p = P(Exact(Fraction(3, 2)), Exact(Fraction(-7, 2)), 1).scale(Exact(Fraction(7, 5)))
    form = canonicalize(p, exact_ctx)
    expected = P(Exact(Fraction(-1, 2)), 1) * P(1, Exact(Fraction(-1, 3)))
    assert form.exact
    assert form.stored == expected


def test_canonicalize_all_inside_is_monic(exact_ctx):
    p = P(-1, 0, 1).scale(Exact(Fraction(-9, 4)))
    form = canonicalize(p, exact_ctx)
    assert form.exact
    assert form.stored == P(-1, 0, 1)


def test_canonicalize_all_outside_fixes_constant_term(exact_ctx):
    p = P(1, Exact(Fraction(-1, 2))).scale(Exact(3))  # root 2 outside
    form = canonicalize(p, exact_ctx)
    assert form.exact
    assert form.stored == P(1, Exact(Fraction(-1, 2)))


def test_canonicalize_irrational_split_falls_back_monic(exact_ctx):
    # roots of z^2 - 3z + 1 straddle the unit circle and are conjugate surds
    p = P(1, -3, 1)
    form = canonicalize(p, exact_ctx)
    assert not form.exact
    assert form.stored == P(1, -3, 1)
    assert form.float_adjust is not None
    # the float view has the outside root in 1 - z/root form: value 1 at 0
    coeffs = form.canonical_float_coeffs(exact_ctx)
    inside = min(form.root_set.expand(), key=lambda z: abs(z))
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * inside + c
    assert abs(acc) < 1e-60
