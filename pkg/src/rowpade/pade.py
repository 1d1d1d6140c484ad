"""Scalar and incomplete rational approximants of a power series.

An approximant of type (n, m, m*) matches the series through the first
n - m* + 1 coefficients and additionally forces the next m* convolution
coefficients of Q*f to vanish, with deg Q <= m and deg P <= n - m*.  The
complete case m* = m is the classical one.  Raw solution pairs carry a
possible common zero of order lambda at the origin, removed together with
all common factors before the denominator is rescaled to the normalized
product form.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exceptions import UsageError
from .numerics import (
    CanonicalForm,
    Polynomial,
    RootSet,
    canonicalize,
    gcd_exact_many,
    gcd_reduce,
    nullspace_vector,
)
from .scalars import EX_ZERO, Context, Exact
from .series import PowerSeries, poly_times_series


@dataclass(frozen=True)
class ReducedPair:
    q: Polynomial
    p: Polynomial
    lam: int
    zero_set: RootSet
    canonical_exact: bool
    canonical_adjust: object = None


@dataclass(frozen=True)
class PadeApproximant:
    """One (n, m, m*) approximant with raw and reduced/normalized data."""

    n: int
    m: int
    mstar: int
    q_raw: Polynomial
    p_raw: Polynomial
    q: Polynomial
    p: Polynomial
    lam: int
    zero_set: RootSet
    canonical_exact: bool
    canonical_adjust: object = None
    solve_residual: object = None

    def q_canonical_coeffs(self, ctx: Context) -> list:
        """Float coefficients of the denominator in normalized form."""
        out = [ctx.to_mpc(c) for c in self.q.coeffs]
        if self.canonical_adjust is not None:
            out = [c / self.canonical_adjust for c in out]
        return out

    def canonical_scale_correction(self, ctx: Context):
        """Divisor taking the stored denominator scale to the normalized one."""
        return ctx.mp.mpc(1) if self.canonical_adjust is None else self.canonical_adjust

    def evaluate(self, ctx: Context, z):
        """Value of P/Q at a float point (scale-independent)."""
        qf = self.q.to_float(ctx) if self.q._exact_domain() else self.q
        pf = self.p.to_float(ctx) if self.p._exact_domain() else self.p
        return pf(z) / qf(z)


def _mode_zero(ctx: Context):
    return EX_ZERO if ctx.is_exact else ctx.mp.mpc(0)


def _check_series_mode(f: PowerSeries, ctx: Context):
    if ctx.is_exact and f.mode != "exact":
        raise UsageError("exact-mode computation requires an exact-mode series")


def _series_value(f: PowerSeries, k: int, ctx: Context):
    if k < 0:
        return _mode_zero(ctx)
    value = f.coeff(k)
    return value if ctx.is_exact else ctx.to_mpc(value)


def product_coeffs(q: Polynomial, f: PowerSeries, deg: int, ctx: Context) -> Polynomial:
    """Truncation of Q(z)*f(z) to the given degree."""
    if q.is_zero or deg < 0:
        return Polynomial()
    out = []
    for t in range(deg + 1):
        acc = _mode_zero(ctx)
        for i in range(0, min(t, q.degree) + 1):
            qi = q.coeffs[i]
            acc = acc + qi * _series_value(f, t - i, ctx)
        out.append(acc)
    return Polynomial(out)


def _denominator_system(conditions, ncols: int, n: int, ctx: Context):
    """Rows of the homogeneous system on the denominator coefficients.

    ``conditions`` lists (series, m_j) pairs; each contributes the m_j
    constraints that the coefficients of z^(n-m_j+1) .. z^n in Q*f_j vanish.
    """
    rows = []
    for f, mj in conditions:
        for k in range(1, mj + 1):
            t = n - mj + k
            rows.append([_series_value(f, t - i, ctx) for i in range(ncols)])
    return rows


def reduce_and_normalize(q_raw: Polynomial, p_raw: Polynomial, ctx: Context) -> ReducedPair:
    """Strip the common origin zero, cancel common factors, normalize.

    Returns the reduced pair, the removed origin-zero order lambda, and the
    zero set of the normalized denominator.  The same rescaling constant is
    applied to both polynomials, so the rational function is unchanged.
    """
    if q_raw.is_zero:
        raise UsageError("denominator of a raw pair must be nonzero")

    if ctx.is_exact:
        ord_q = q_raw.order_at_zero()
        ord_p = p_raw.order_at_zero()
    else:
        def negligible(poly):
            if poly.is_zero:
                return None
            scale = max(abs(c) for c in poly.coeffs)
            return lambda c: abs(c) <= ctx.zero_tol * scale

        ord_q = q_raw.order_at_zero(negligible(q_raw))
        ord_p = p_raw.order_at_zero(negligible(p_raw)) if not p_raw.is_zero else -1

    lam = ord_q if p_raw.is_zero else min(ord_q, ord_p)
    q1 = q_raw.shift_down(lam)
    p1 = p_raw.shift_down(lam) if not p_raw.is_zero else p_raw

    if p1.is_zero:
        # everything cancels: the function is identically zero
        q2 = Polynomial.one() if ctx.is_exact else Polynomial((ctx.mp.mpc(1),))
        p2 = p1
    elif ctx.is_exact:
        components = list(q1.exact_components().values())
        components.extend(p1.exact_components().values())
        g = gcd_exact_many(components)
        if g.degree > 0:
            q2, rq = q1.divmod_by(g)
            p2, rp = p1.divmod_by(g)
            assert rq.is_zero and rp.is_zero
        else:
            q2, p2 = q1, p1
    else:
        _, q2, p2 = gcd_reduce(q1, p1, ctx)

    form = canonicalize(q2, ctx)
    p3 = p1 if p1.is_zero else p2.divide_scalar(form.scale)
    return ReducedPair(form.stored, p3, lam, form.root_set,
                       form.exact, form.float_adjust)


def compute_incomplete(f: PowerSeries, n: int, m: int, mstar: int, ctx: Context,
                       selector: str = "canonical",
                       factor: Polynomial | None = None) -> PadeApproximant:
    """Incomplete approximant of type (n, m, m*).

    The ``canonical`` selector applies the deterministic nullspace rule to
    the m* x (m+1) homogeneous system.  The ``padetype`` selector fixes the
    m - m* prescribed denominator zeros given by ``factor`` and solves for
    the free part of degree <= m*.
    """
    if not (n >= m >= mstar >= 0):
        raise UsageError("need n >= m >= m* >= 0")
    _check_series_mode(f, ctx)

    if selector == "canonical":
        if mstar == 0:
            v = [_mode_zero(ctx)] * m + [Exact(1) if ctx.is_exact else ctx.mp.mpc(1)]
            residual = None
        else:
            rows = _denominator_system([(f, mstar)], m + 1, n, ctx)
            v, residual = nullspace_vector(rows, ctx)
        q_raw = Polynomial(v)
    elif selector == "padetype":
        if factor is None or factor.degree != m - mstar:
            raise UsageError("padetype selector requires a factor of degree m - m*")
        if not factor._exact_domain():
            raise UsageError("padetype factor must have exact coefficients")
        shifted = poly_times_series(factor, f)
        if mstar == 0:
            v = [Exact(1) if ctx.is_exact else ctx.mp.mpc(1)]
            residual = None
        else:
            rows = _denominator_system([(shifted, mstar)], mstar + 1, n, ctx)
            v, residual = nullspace_vector(rows, ctx)
        tilde = Polynomial(v)
        fact = factor if ctx.is_exact else factor.to_float(ctx)
        q_raw = fact * tilde
    else:
        raise UsageError(f"unknown incomplete selector {selector!r}")

    if not ctx.is_exact:
        q_raw = q_raw.chop(ctx)
    if q_raw.is_zero:
        raise UsageError("homogeneous solve returned the zero polynomial")
    p_raw = product_coeffs(q_raw, f, n - mstar, ctx)
    reduced = reduce_and_normalize(q_raw, p_raw, ctx)
    return PadeApproximant(n, m, mstar, q_raw, p_raw,
                           reduced.q, reduced.p, reduced.lam, reduced.zero_set,
                           reduced.canonical_exact, reduced.canonical_adjust,
                           residual)


def compute_pade(f: PowerSeries, n: int, m: int, ctx: Context) -> PadeApproximant:
    """Classical approximant of type (n, m): all m conditions bind."""
    if n < m:
        raise UsageError("need n >= m")
    return compute_incomplete(f, n, m, m, ctx)


def linearization_order(q: Polynomial, p: Polynomial, f: PowerSeries,
                        up_to: int, ctx: Context):
    """Index of the first nonvanishing coefficient of Q*f - P.

    Returns None when every coefficient through ``up_to`` vanishes (exactly
    in exact mode, below tolerance in float mode).
    """
    if up_to < 0:
        raise UsageError("up_to must be nonnegative")
    if ctx.is_exact:
        scale = None
    else:
        mags = [abs(c) for c in q.coeffs] + [1]
        pm = [abs(c) for c in p.coeffs] + [1]
        phi = [abs(_series_value(f, t, ctx)) for t in range(up_to + 1)] + [1]
        scale = max(mags) * max(max(phi), max(pm))
    for t in range(up_to + 1):
        acc = _mode_zero(ctx)
        for i in range(0, min(t, q.degree) + 1):
            acc = acc + q.coeffs[i] * _series_value(f, t - i, ctx)
        acc = acc - (p.coeffs[t] if t <= p.degree else _mode_zero(ctx))
        if ctx.is_exact:
            if not acc.is_zero:
                return t
        elif abs(acc) > ctx.zero_tol * scale:
            return t
    return None
