"""Simultaneous rational approximation with one common denominator.

Given a system (f_1, ..., f_d) and a multi-index (m_1, ..., m_d), the
approximant of order n stacks, for each component, the m_j conditions that
the coefficients of z^(n-m_j+1) .. z^n in Q*f_j vanish, with deg Q bounded
by the multi-index total.  Each component, viewed on its own, is an
incomplete approximant of type (n, |m|, m_k).
"""

from __future__ import annotations

from dataclasses import dataclass

from .exceptions import UsageError
from .numerics import Polynomial, RootSet, canonicalize, gcd_exact_many, nullspace_vector, roots
from .pade import (
    PadeApproximant,
    _check_series_mode,
    _denominator_system,
    product_coeffs,
    reduce_and_normalize,
)
from .scalars import Context
from .series import SystemOfSeries


@dataclass(frozen=True)
class MultiIndex:
    parts: tuple

    def __post_init__(self):
        if not self.parts:
            raise UsageError("multi-index must be nonempty")
        if any((not isinstance(p, int)) or p < 0 for p in self.parts):
            raise UsageError("multi-index parts must be nonnegative integers")
        if not any(self.parts):
            raise UsageError("multi-index must not be all zero")

    @classmethod
    def of(cls, *parts) -> "MultiIndex":
        if len(parts) == 1 and isinstance(parts[0], (tuple, list)):
            parts = tuple(parts[0])
        return cls(tuple(int(p) for p in parts))

    @property
    def total(self) -> int:
        return sum(self.parts)

    @property
    def d(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __str__(self):
        return "(" + ",".join(str(p) for p in self.parts) + ")"


@dataclass(frozen=True)
class HermitePadeApproximant:
    """One (n, m-multi-index) vector approximant with common denominator."""

    n: int
    mindex: MultiIndex
    q_raw: Polynomial
    p_raw: tuple
    q: Polynomial
    p: tuple
    lam: int
    zero_set: RootSet
    canonical_exact: bool
    canonical_adjust: object = None
    solve_residual: object = None

    @property
    def d(self) -> int:
        return self.mindex.d

    def q_canonical_coeffs(self, ctx: Context) -> list:
        out = [ctx.to_mpc(c) for c in self.q.coeffs]
        if self.canonical_adjust is not None:
            out = [c / self.canonical_adjust for c in out]
        return out


def compute_hermite(system: SystemOfSeries, n: int, mindex, ctx: Context) -> HermitePadeApproximant:
    """Common-denominator approximant of the system at order n."""
    mindex = mindex if isinstance(mindex, MultiIndex) else MultiIndex.of(mindex)
    if mindex.d != system.d:
        raise UsageError(
            f"multi-index length {mindex.d} does not match system size {system.d}")
    if n < max(mindex.parts):
        raise UsageError("need n >= max(m_1, ..., m_d)")
    for f in system.components:
        _check_series_mode(f, ctx)

    mtot = mindex.total
    conditions = [(system[j], mj) for j, mj in enumerate(mindex.parts)]
    rows = _denominator_system(conditions, mtot + 1, n, ctx)
    v, residual = nullspace_vector(rows, ctx)
    q_raw = Polynomial(v)
    if not ctx.is_exact:
        q_raw = q_raw.chop(ctx)
    if q_raw.is_zero:
        raise UsageError("homogeneous solve returned the zero polynomial")
    p_raw = tuple(product_coeffs(q_raw, system[j], n - mj, ctx)
                  for j, mj in enumerate(mindex.parts))

    q, p, lam = _simultaneous_reduction(q_raw, p_raw, ctx)
    form = canonicalize(q, ctx)
    p_final = tuple(pj if pj.is_zero else pj.divide_scalar(form.scale) for pj in p)
    return HermitePadeApproximant(n, mindex, q_raw, p_raw,
                                  form.stored, p_final, lam, form.root_set,
                                  form.exact, form.float_adjust, residual)


def _simultaneous_reduction(q_raw: Polynomial, p_raw: tuple, ctx: Context):
    """Remove the common origin zero and every factor shared by Q and all P_j."""
    if ctx.is_exact:
        ord_q = q_raw.order_at_zero()
        orders = [pj.order_at_zero() for pj in p_raw if not pj.is_zero]
    else:
        def poly_order(poly):
            scale = max(abs(c) for c in poly.coeffs)
            return poly.order_at_zero(lambda c: abs(c) <= ctx.zero_tol * scale)

        ord_q = poly_order(q_raw)
        orders = [poly_order(pj) for pj in p_raw if not pj.is_zero]
    lam = min([ord_q] + orders) if orders else ord_q

    q = q_raw.shift_down(lam)
    p = tuple(pj.shift_down(lam) if not pj.is_zero else pj for pj in p_raw)

    if all(pj.is_zero for pj in p):
        one = Polynomial.one() if ctx.is_exact else Polynomial((ctx.mp.mpc(1),))
        return one, p, lam

    if ctx.is_exact:
        components = list(q.exact_components().values())
        for pj in p:
            if not pj.is_zero:
                components.extend(pj.exact_components().values())
        g = gcd_exact_many(components)
        if g.degree > 0:
            q, rq = q.divmod_by(g)
            assert rq.is_zero
            new_p = []
            for pj in p:
                if pj.is_zero:
                    new_p.append(pj)
                else:
                    quot, rem = pj.divmod_by(g)
                    assert rem.is_zero
                    new_p.append(quot)
            p = tuple(new_p)
        return q, p, lam

    # float mode: a denominator zero cancels only if every numerator
    # vanishes there within tolerance
    changed = True
    while changed and q.degree >= 1:
        changed = False
        for root in roots(q, ctx).roots:
            if _all_vanish(p, root.value, ctx):
                q = _peel(q, root.value, ctx)
                p = tuple(pj if pj.is_zero else _peel(pj, root.value, ctx) for pj in p)
                changed = True
                break
    return q, p, lam


def _all_vanish(polys, point, ctx: Context) -> bool:
    for pj in polys:
        if pj.is_zero:
            continue
        scale = max(abs(c) for c in pj.coeffs)
        if abs(pj(point)) > ctx.cancel_tol * scale:
            return False
    return True


def _peel(poly: Polynomial, root, ctx: Context) -> Polynomial:
    linear = Polynomial((-root, ctx.mp.mpc(1)))
    quot, rem = poly.divmod_by(linear)
    return quot


def component_view(h: HermitePadeApproximant, k: int, ctx: Context) -> PadeApproximant:
    """The k-th component as an incomplete approximant (1-based index).

    The view is rebuilt from the raw pair so that any cancellation specific
    to this component (beyond the factors shared by the whole vector) is
    applied, and it records its own origin-zero order.
    """
    if not (1 <= k <= h.d):
        raise UsageError(f"component index {k} out of range 1..{h.d}")
    reduced = reduce_and_normalize(h.q_raw, h.p_raw[k - 1], ctx)
    return PadeApproximant(h.n, h.mindex.total, h.mindex.parts[k - 1],
                           h.q_raw, h.p_raw[k - 1],
                           reduced.q, reduced.p, reduced.lam, reduced.zero_set,
                           reduced.canonical_exact, reduced.canonical_adjust,
                           h.solve_residual)
