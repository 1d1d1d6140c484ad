"""Row-sequence analytics.

A row fixes the denominator budget and sweeps the matching order n.  From
the family of approximants this module derives the telescoping terms of
consecutive differences, the radius of the largest disk where the row can
converge (from the decay of the telescoping constants), pole-location
indicators built from denominator zeros, sup-norm errors on pole-excluded
compacts, and coefficient-norm denominator convergence, each summarized by
a fitted geometric rate.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .exceptions import (
    EmptyCompactError,
    EvaluationDomainError,
    InsufficientData,
    TelescopingError,
    UsageError,
)
from .hermite import HermitePadeApproximant, MultiIndex, component_view, compute_hermite
from .numerics import Polynomial, canonicalize
from .pade import PadeApproximant, compute_incomplete
from .scalars import Context
from .series import PowerSeries, SystemOfSeries

_PARITY_SPLIT_THRESHOLD = 0.2  # |difference of fitted log-rates| that flags parity structure


@dataclass(frozen=True)
class ScalarRowSpec:
    series: PowerSeries
    m: int
    mstar: int
    selector: str = "canonical"
    factor: Optional[Polynomial] = None

    @property
    def denominator_bound(self) -> int:
        return self.m


@dataclass(frozen=True)
class SystemRowSpec:
    system: SystemOfSeries
    mindex: MultiIndex
    component: int  # 1-based

    @property
    def denominator_bound(self) -> int:
        return self.mindex.total


class RowSequence:
    """Approximants of one row over an inclusive range of orders."""

    def __init__(self, source, n_min: int, n_max: int, ctx: Context,
                 members: dict, hermite_members: dict | None, zero_sets: dict):
        self.source = source
        self.n_min = n_min
        self.n_max = n_max
        self.ctx = ctx
        self.members = members
        self.hermite_members = hermite_members
        self.zero_sets = zero_sets
        self._telescopes: dict[int, TelescopeTerm] = {}

    @property
    def denominator_bound(self) -> int:
        return self.source.denominator_bound

    @property
    def mstar(self) -> int:
        if isinstance(self.source, ScalarRowSpec):
            return self.source.mstar
        return self.source.mindex.parts[self.source.component - 1]

    @property
    def target_series(self) -> PowerSeries:
        if isinstance(self.source, ScalarRowSpec):
            return self.source.series
        return self.source.system[self.source.component - 1]

    def orders(self) -> list:
        return sorted(self.members)

    def common_denominator(self, n: int):
        """The member whose zeros define the row's pole data."""
        if self.hermite_members is not None:
            return self.hermite_members[n]
        return self.members[n]


def build_row(source, n_range, ctx: Context, jobs: int = 1) -> RowSequence:
    """Compute every member of a row; per-n computations are independent."""
    n_min, n_max = int(n_range[0]), int(n_range[1])
    if n_min > n_max:
        raise UsageError("empty order range")

    if isinstance(source, ScalarRowSpec):
        if n_min < source.m:
            raise UsageError("order range must start at m or later")

        def member(n):
            app = compute_incomplete(source.series, n, source.m, source.mstar, ctx,
                                     source.selector, source.factor)
            return n, app, None
    elif isinstance(source, SystemRowSpec):
        if not (1 <= source.component <= source.system.d):
            raise UsageError("component index out of range")
        if n_min < max(source.mindex.parts):
            raise UsageError("order range must start at max(m_j) or later")

        def member(n):
            h = compute_hermite(source.system, n, source.mindex, ctx)
            return n, component_view(h, source.component, ctx), h
    else:
        raise UsageError("unknown row source")

    ns = list(range(n_min, n_max + 1))
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            computed = list(pool.map(member, ns))
    else:
        computed = [member(n) for n in ns]

    members, hermites, zero_sets = {}, {}, {}
    for n, app, h in computed:
        members[n] = app
        if h is not None:
            hermites[n] = h
        zero_sets[n] = h.zero_set if h is not None else app.zero_set
    return RowSequence(source, n_min, n_max, ctx,
                       members, hermites or None, zero_sets)


def scalar_row(series: PowerSeries, m: int, mstar: int, n_range, ctx: Context,
               selector: str = "canonical", factor: Polynomial | None = None,
               jobs: int = 1) -> RowSequence:
    return build_row(ScalarRowSpec(series, m, mstar, selector, factor), n_range, ctx, jobs)


def system_row(system: SystemOfSeries, mindex, component: int, n_range, ctx: Context,
               jobs: int = 1) -> RowSequence:
    mindex = mindex if isinstance(mindex, MultiIndex) else MultiIndex.of(mindex)
    return build_row(SystemRowSpec(system, mindex, component), n_range, ctx, jobs)


# ---------------------------------------------------------------------------
# telescoping terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TelescopeTerm:
    """Constant and polynomial of one consecutive difference.

    The stored identity is z^(lam_n + lam_{n+1}) (Q_n P_{n+1} - Q_{n+1} P_n)
    = a * z^(n+1) * q, exact in exact mode.  ``a_abs`` carries |a| after
    rescaling every factor to the normalized representative, which is the
    magnitude the radius estimate feeds on.
    """

    n: int
    a: object
    q: Polynomial
    a_abs: object

    @property
    def deg_q(self) -> int:
        return self.q.degree


def telescope(row: RowSequence, n: int) -> TelescopeTerm:
    if n not in row.members or (n + 1) not in row.members:
        raise UsageError(f"orders {n} and {n + 1} must both be in the row")
    cached = row._telescopes.get(n)
    if cached is not None:
        return cached
    ctx = row.ctx
    mp = ctx.mp
    a1 = row.members[n]
    a2 = row.members[n + 1]
    diff = (a1.q * a2.p - a2.q * a1.p).shift_up(a1.lam + a2.lam)

    if diff.is_zero:
        one = Polynomial.one() if ctx.is_exact else Polynomial((mp.mpc(1),))
        term = TelescopeTerm(n, 0, one, mp.mpf(0))
        row._telescopes[n] = term
        return term

    if ctx.is_exact:
        for t in range(min(n + 1, diff.degree + 1)):
            if not diff.coeffs[t].is_zero:
                raise TelescopingError(
                    f"telescoping identity violated at order {n}: "
                    f"coefficient {t} does not vanish")
    else:
        scale = max(abs(c) for c in diff.coeffs)
        for t in range(min(n + 1, diff.degree + 1)):
            if abs(diff.coeffs[t]) > ctx.zero_tol * scale:
                raise TelescopingError(
                    f"telescoping identity violated at order {n} "
                    "(precision exhausted)")

    q_tilde = diff.shift_down(n + 1)
    if not ctx.is_exact:
        q_tilde = q_tilde.chop(ctx)
    bound = row.denominator_bound - row.mstar
    if q_tilde.degree > bound:
        raise TelescopingError(
            f"telescoping polynomial degree {q_tilde.degree} exceeds bound {bound}")

    if q_tilde.is_zero:
        one = Polynomial.one() if ctx.is_exact else Polynomial((mp.mpc(1),))
        term = TelescopeTerm(n, 0, one, mp.mpf(0))
        row._telescopes[n] = term
        return term

    form = canonicalize(q_tilde, ctx)
    a_stored = form.scale
    corr = a1.canonical_scale_correction(ctx) * a2.canonical_scale_correction(ctx)
    q_corr = mp.mpc(1) if form.float_adjust is None else form.float_adjust
    a_abs = abs(ctx.to_mpc(a_stored) * q_corr / corr)
    term = TelescopeTerm(n, a_stored, form.stored, a_abs)
    row._telescopes[n] = term
    return term


# ---------------------------------------------------------------------------
# geometric-rate fitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RateFit:
    """Least-squares geometric rate of a nonnegative sequence.

    ``regression_rate`` is exp(slope) of log value against n over the
    window; ``tail_max_rate`` is max value^(1/n) there.  ``flag`` marks
    degenerate inputs ("all-zero") or the parity subsequence used.
    """

    values: Mapping[int, float]
    regression_rate: float
    tail_max_rate: float
    window: tuple
    residual: float
    points_used: int
    flag: str = ""


def fit_rate(values: Mapping[int, object], window=None, min_points: int = 4) -> RateFit:
    items = _window_items(values, window)
    if not items:
        raise InsufficientData("no values inside the window")
    positives = [(n, float(v)) for n, v in items if float(v) > 0]
    window = (items[0][0], items[-1][0])
    if not positives:
        return RateFit(dict(items), 0.0, 0.0, window, 0.0, 0, "all-zero")
    if len(positives) < min_points:
        raise InsufficientData(
            f"insufficient data: {len(positives)} positive values in window")
    xs = [n for n, _ in positives]
    ys = [math.log(v) for _, v in positives]
    xbar = sum(xs) / len(xs)
    ybar = sum(ys) / len(ys)
    sxx = sum((x - xbar) ** 2 for x in xs)
    sxy = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    slope = sxy / sxx if sxx else 0.0
    resid = math.sqrt(sum((y - (ybar + slope * (x - xbar))) ** 2
                          for x, y in zip(xs, ys)) / len(xs))
    tail_max = max(v ** (1.0 / n) for n, v in positives if n > 0)
    return RateFit({n: float(v) for n, v in items}, math.exp(slope), tail_max,
                   window, resid, len(positives))


def _window_items(values, window):
    if window is None:
        keys = sorted(values)
    else:
        lo, hi = window
        keys = sorted(k for k in values if lo <= k <= hi)
    return [(k, values[k]) for k in keys]


def fit_rate_parity_aware(values: Mapping[int, object], window=None) -> RateFit:
    """Rate fit that detects alternating (parity-structured) sequences.

    When even-order and odd-order subsequences fit to materially different
    rates, the larger one carries the limit-superior flavor of the
    estimate, so that subsequence's regression is returned.
    """
    full = None
    full_error = None
    try:
        full = fit_rate(values, window)
    except InsufficientData as e:
        full_error = e
    if full is not None and full.flag == "all-zero":
        return full

    def parity_fit(parity):
        sub = {n: v for n, v in values.items() if n % 2 == parity}
        try:
            fit = fit_rate(sub, window)
        except InsufficientData:
            return None
        if fit.flag == "all-zero":
            return None
        return fit

    even = parity_fit(0)
    odd = parity_fit(1)
    if even is not None and odd is not None:
        gap = abs(math.log(even.regression_rate) - math.log(odd.regression_rate)) \
            if even.regression_rate > 0 and odd.regression_rate > 0 else 0.0
        if gap > _PARITY_SPLIT_THRESHOLD:
            dominant, name = ((even, "even") if even.regression_rate >= odd.regression_rate
                              else (odd, "odd"))
            return RateFit(dominant.values, dominant.regression_rate,
                           dominant.tail_max_rate, dominant.window,
                           dominant.residual, dominant.points_used,
                           f"regression:{name}")
    if full is None:
        chosen = even or odd
        if chosen is None:
            raise full_error
        return chosen
    return full


# ---------------------------------------------------------------------------
# radius of the convergence disk
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadiusEstimate:
    """Estimated reciprocal of limsup |a_n|^(1/n) over the row."""

    per_n: Mapping[int, float]
    tail_max_rate: float
    regression_rate: float
    rstar: float
    estimator_used: str
    window: tuple
    residual: float


def estimate_rstar(row: RowSequence, window_fraction: float = 2.0 / 3.0) -> RadiusEstimate:
    ns = row.orders()
    if len(ns) < 9:
        raise InsufficientData("need at least 8 telescope terms")
    per_n = {}
    for n in ns[:-1]:
        per_n[n] = float(telescope(row, n).a_abs)
    keys = sorted(per_n)
    start = keys[max(0, int(len(keys) * (1 - window_fraction)))]
    window = (start, keys[-1])
    tail = [per_n[k] for k in keys if window[0] <= k <= window[1]]
    if all(v == 0 for v in tail):
        return RadiusEstimate(per_n, 0.0, 0.0, math.inf, "all-zero", window, 0.0)
    if sum(1 for v in tail if v > 0) < 4:
        raise InsufficientData("insufficient data: fewer than 4 nonzero tail terms")
    fit = fit_rate_parity_aware(per_n, window)
    rate = fit.regression_rate
    rstar = math.inf if rate <= 0 else 1.0 / rate
    return RadiusEstimate(per_n, fit.tail_max_rate, rate, rstar,
                          fit.flag or "regression:all", fit.window, fit.residual)


# ---------------------------------------------------------------------------
# pole indicators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndicatorReport:
    """Geometric indicators of zero accumulation at one point."""

    point: object
    delta_big: float
    delta_raw: float
    delta_j: tuple
    mu: int
    decision_tol: float
    diagnostics: dict = field(default_factory=dict)


def _chop_tiny(value: float, ctx: Context) -> float:
    # numerical fuzz at the root-finding scale counts as an exact zero
    return value if value > float(ctx.zero_tol) else 0.0


def denominator_values(row: RowSequence, a, window=None) -> dict:
    """|Q_n(a)| per order, in the normalized denominator scale."""
    ctx = row.ctx
    za = ctx.to_mpc(a)
    out = {}
    for n in row.orders():
        den = row.common_denominator(n)
        coeffs = den.q_canonical_coeffs(ctx)
        acc = ctx.mp.mpc(0)
        for c in reversed(coeffs):
            acc = acc * za + c
        out[n] = _chop_tiny(float(abs(acc)), ctx)
    return out


def delta_indicator(row: RowSequence, a, window_fraction: float = 2.0 / 3.0) -> float:
    """Estimate of limsup |Q_n(a)|^(1/n), clamped to [0, 1]."""
    report = indicator_report(row, a, window_fraction=window_fraction)
    return report.delta_big


def delta_j_indicators(row: RowSequence, a, window_fraction: float = 2.0 / 3.0) -> list:
    report = indicator_report(row, a, window_fraction=window_fraction)
    return list(report.delta_j)


def mu_indicator(report: IndicatorReport, decision_tol: float = 0.05) -> int:
    """Number of denominator zeros converging geometrically to the point."""
    if report.delta_big >= 1 - decision_tol:
        return 0
    return sum(1 for d in report.delta_j if d < 1 - decision_tol)


def indicator_report(row: RowSequence, a, decision_tol: float = 0.05,
                     window_fraction: float = 2.0 / 3.0) -> IndicatorReport:
    ctx = row.ctx
    za = ctx.to_mpc(a)
    ns = row.orders()
    start = ns[max(0, int(len(ns) * (1 - window_fraction)))]
    window = (start, ns[-1])

    qvals = denominator_values(row, a)
    try:
        qfit = fit_rate_parity_aware(qvals, window)
        delta_raw = qfit.regression_rate
        qdiag = qfit
    except InsufficientData:
        delta_raw = 0.0
        qdiag = None
    delta = min(max(delta_raw, 0.0), 1.0)

    m_total = row.denominator_bound
    distances = {}
    nu = {}
    for n in ns:
        zs = row.zero_sets[n].expand()
        ds = sorted(_chop_tiny(float(abs(z - za)), ctx) for z in zs)
        distances[n] = ds
        nu[n] = len(ds)
    m_prime = min((nu[n] for n in ns if window[0] <= n <= window[1]), default=0)

    deltas = []
    fits = []
    for j in range(m_total):
        if j >= m_prime:
            deltas.append(1.0)
            fits.append(None)
            continue
        seq = {n: min(1.0, distances[n][j]) for n in ns}
        try:
            fit = fit_rate_parity_aware(seq, window)
            deltas.append(min(max(fit.regression_rate, 0.0), 1.0))
            fits.append(fit)
        except InsufficientData:
            deltas.append(1.0)
            fits.append(None)
    for j in range(1, len(deltas)):
        deltas[j] = max(deltas[j], deltas[j - 1])

    report = IndicatorReport(a, delta, delta_raw, tuple(deltas), 0, decision_tol,
                             {"q_fit": qdiag, "zero_fits": fits, "window": window,
                              "m_prime": m_prime})
    mu = mu_indicator(report, decision_tol)
    return IndicatorReport(a, delta, delta_raw, tuple(deltas), mu, decision_tol,
                           report.diagnostics)


# ---------------------------------------------------------------------------
# compacts and sup-norm errors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompactSet:
    """Finite sample of a compact, with optional exclusion radius."""

    points: tuple
    label: str
    epsilon: Optional[float] = None


def circle_compact(radius, ctx: Context, num_points: int = 512, center=0,
                   epsilon: Optional[float] = 1e-2, label: str | None = None) -> CompactSet:
    mp = ctx.mp
    r = ctx.to_mpc(radius).real
    c = ctx.to_mpc(center)
    pts = tuple(c + r * mp.exp(mp.mpc(0, 2) * mp.pi * k / num_points)
                for k in range(num_points))
    return CompactSet(pts, label or f"circle r={radius}, {num_points} points", epsilon)


def surviving_points(K: CompactSet, row: RowSequence, reference_poles=()) -> list:
    """Sample points outside every exclusion disk of the row's zero sets.

    Disk radii shrink like eps/(6 m n^2) around computed zeros and stay at
    eps/(6 m) around reference poles.
    """
    if K.epsilon is None:
        return list(K.points)
    ctx = row.ctx
    eps = ctx.mp.mpf(K.epsilon)
    m = max(row.denominator_bound, 1)
    disks = []
    for n, zs in row.zero_sets.items():
        rad = eps / (6 * m * n * n)
        for root in zs.roots:
            disks.append((root.value, rad))
    pole_rad = eps / (6 * m)
    for pole in reference_poles:
        disks.append((ctx.to_mpc(pole), pole_rad))
    out = [z for z in K.points
           if all(abs(z - c) > rad for c, rad in disks)]
    if not out:
        raise EmptyCompactError(f"compact fully excluded: {K.label}")
    return out


def evaluate_series(f: PowerSeries, z, ctx: Context):
    """Value of the series at a float point.

    Uses the reference evaluator when available; otherwise sums the
    expansion, which requires the point to sit well inside the known disk
    of convergence.
    """
    meta = f.metadata
    if meta is not None and meta.evaluator is not None:
        return meta.evaluator(ctx, z)
    r0 = meta.radius(0) if meta is not None else None
    if r0 is None:
        raise EvaluationDomainError(
            "series has no evaluator and no known convergence radius")
    r0 = float(r0)
    az = float(abs(z))
    if not az:
        return ctx.to_mpc(f.coeff(0))
    if az > 0.75 * r0:
        raise EvaluationDomainError(
            f"point with |z|={az:.3g} is outside the safe truncation radius "
            f"{0.75 * r0:.3g}")
    terms = int(ctx.precision_bits * math.log(2) / math.log(0.75 * r0 / az)) + 16
    terms = min(terms, 4 * ctx.precision_bits)
    acc = ctx.mp.mpc(0)
    zp = ctx.mp.mpc(1)
    for k in range(terms + 1):
        acc += ctx.to_mpc(f.coeff(k)) * zp
        zp *= z
    return acc


def sup_error(row: RowSequence, n: int, K: CompactSet, survivors=None):
    """Max |f - P_n/Q_n| over the surviving sample points."""
    ctx = row.ctx
    if survivors is None:
        poles = row.target_series.metadata.known_poles if row.target_series.metadata else ()
        survivors = surviving_points(K, row, tuple(loc for loc, _ in poles))
    member = row.members[n]
    f = row.target_series
    best = ctx.mp.mpf(0)
    for z in survivors:
        err = abs(evaluate_series(f, z, ctx) - member.evaluate(ctx, z))
        if err > best:
            best = err
    return best


def sup_error_values(row: RowSequence, K: CompactSet) -> dict:
    poles = row.target_series.metadata.known_poles if row.target_series.metadata else ()
    survivors = surviving_points(K, row, tuple(loc for loc, _ in poles))
    return {n: float(sup_error(row, n, K, survivors)) for n in row.orders()}


def sup_error_rate(row: RowSequence, K: CompactSet,
                   window_fraction: float = 2.0 / 3.0) -> RateFit:
    values = sup_error_values(row, K)
    ns = sorted(values)
    start = ns[max(0, int(len(ns) * (1 - window_fraction)))]
    return fit_rate_parity_aware(values, (start, ns[-1]))


# ---------------------------------------------------------------------------
# denominator coefficient convergence
# ---------------------------------------------------------------------------

def coeff_norm_diff(target: Polynomial, qn: Polynomial, ctx: Context):
    """Max modulus of coefficient differences (both in normalized form)."""
    tf = target.to_float(ctx) if target._exact_domain() else target
    qf = qn.to_float(ctx) if qn._exact_domain() else qn
    length = max(len(tf.coeffs), len(qf.coeffs))
    best = ctx.mp.mpf(0)
    for i in range(length):
        ti = tf.coeffs[i] if i < len(tf.coeffs) else ctx.mp.mpc(0)
        qi = qf.coeffs[i] if i < len(qf.coeffs) else ctx.mp.mpc(0)
        diff = abs(ti - qi)
        if diff > best:
            best = diff
    return best


def denominator_diff_values(row: RowSequence, target: Polynomial) -> dict:
    """coeff_norm_diff(target, Q_n) per order, on the common denominator."""
    ctx = row.ctx
    tf = target.to_float(ctx) if target._exact_domain() else target
    out = {}
    for n in row.orders():
        den = row.common_denominator(n)
        qn = Polynomial(tuple(den.q_canonical_coeffs(ctx)))
        out[n] = float(coeff_norm_diff(tf, qn, ctx))
    return out


def denominator_rate(row: RowSequence, target: Polynomial,
                     window_fraction: float = 2.0 / 3.0) -> RateFit:
    values = denominator_diff_values(row, target)
    ns = sorted(values)
    start = ns[max(0, int(len(ns) * (1 - window_fraction)))]
    return fit_rate_parity_aware(values, (start, ns[-1]))


# ---------------------------------------------------------------------------
# divergence probe and component assignment
# ---------------------------------------------------------------------------

def consecutive_differences(row: RowSequence, z) -> dict:
    """|R_{n+1}(z) - R_n(z)| per order; grows geometrically outside the disk."""
    ctx = row.ctx
    zf = ctx.to_mpc(z)
    out = {}
    ns = row.orders()
    for n in ns[:-1]:
        v1 = row.members[n].evaluate(ctx, zf)
        v2 = row.members[n + 1].evaluate(ctx, zf)
        out[n] = float(abs(v2 - v1))
    return out


@dataclass(frozen=True)
class ComponentAnalysis:
    """Per-component data feeding the index assignment at a pole."""

    rstar: float
    poles: tuple  # (location, order)


def assign_k(components, a, ctx: Context, match_tol: float = 1e-9) -> int:
    """Component index charged with the pole at ``a`` (1-based).

    The point must be a pole of maximal order of some component whose
    estimated disk contains it; ties go to the greatest estimated radius,
    then the lowest index.
    """
    za = ctx.to_mpc(a)
    orders = []
    for comp in components:
        order = 0
        if abs(za) < comp.rstar:
            for loc, pole_order in comp.poles:
                if abs(ctx.to_mpc(loc) - za) < match_tol:
                    order = max(order, pole_order)
        orders.append(order)
    tau = max(orders, default=0)
    if tau == 0:
        raise UsageError(
            "point is not a pole of any component inside its estimated disk")
    best = None
    for idx, (order, comp) in enumerate(zip(orders, components)):
        if order != tau:
            continue
        if best is None or comp.rstar > components[best].rstar:
            best = idx
    return best + 1
