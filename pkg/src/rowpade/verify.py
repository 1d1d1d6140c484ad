"""Built-in verification suites.

Each criterion pins one measurable claim about the library on the example
catalog: exact denominator fixtures, radius and indicator estimates inside
stated brackets, uniform and coefficient-norm rates under stated bounds,
and the exact algebraic contracts on randomized rational systems.  The
same criteria back the acceptance test module and the ``verify`` CLI
subcommand.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction

from .hermite import MultiIndex, compute_hermite
from .numerics import Polynomial, gcd_exact_many
from .pade import linearization_order, reduce_and_normalize
from .rows import (
    circle_compact,
    consecutive_differences,
    denominator_rate,
    estimate_rstar,
    fit_rate,
    indicator_report,
    scalar_row,
    sup_error_rate,
    system_row,
    telescope,
)
from .scalars import Context, Exact
from .series import catalog

EXACT = Context("exact", 256)
FLOAT = Context("float", 256)


@dataclass(frozen=True)
class CriterionResult:
    key: str
    suite: str
    passed: bool
    detail: str
    elapsed: float
    data: dict


def _result(key, suite, started, passed, detail, **data):
    return CriterionResult(key, suite, bool(passed), detail,
                           time.time() - started, data)


def _exactly_proportional(p: Polynomial, q: Polynomial) -> bool:
    if p.degree != q.degree:
        return False
    n = len(p.coeffs)
    for i in range(n):
        for j in range(i + 1, n):
            if p.coeffs[i] * q.coeffs[j] != p.coeffs[j] * q.coeffs[i]:
                return False
    return True


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def check_alternating_denominators() -> CriterionResult:
    """Exact alternating denominators z^2 -/+ 1 on the boundary-pole pair."""
    started = time.time()
    system = catalog("5.1-fg")
    even = Polynomial.from_exact([-1, 0, 1])
    odd = Polynomial.from_exact([1, 0, 1])
    bad = []
    for n in range(3, 21):
        h = compute_hermite(system, n, (1, 1), EXACT)
        want = even if n % 2 == 0 else odd
        if h.q != want or not h.canonical_exact:
            bad.append(n)
    return _result("exact-denominators-alternating", "exact-denominators", started,
                   not bad,
                   "Q equals z^2-1 (even n) / z^2+1 (odd n) exactly for n in [3,20]"
                   if not bad else f"mismatch at n={bad}",
                   failures=bad)


def check_two_pole_denominators() -> CriterionResult:
    """Exact odd-n denominators and even-n proportionality for p = 2."""
    started = time.time()
    system = catalog("5.1-fw", {"p": "2"})
    bad = []
    for n in range(5, 26):
        h = compute_hermite(system, n, (1, 1), EXACT)
        if n % 2 == 1:
            want = Polynomial.from_exact(
                [Exact(-Fraction(2 ** n - 4, 2 ** n - 1)), 0, 1])
            if h.q != want or not h.canonical_exact:
                bad.append(n)
        else:
            want = Polynomial.from_exact(
                [-1, Exact(Fraction(3, 2 ** n - 2)), 1])
            if not _exactly_proportional(h.q, want):
                bad.append(n)
    return _result("exact-denominators-two-pole", "exact-denominators", started,
                   not bad,
                   "odd-n Q exact, even-n Q exactly proportional to the closed form, n in [5,25]"
                   if not bad else f"mismatch at n={bad}",
                   failures=bad)


def check_radius_two_pole() -> CriterionResult:
    """Radius estimate near 2 for the two-pole companion system (p = 2)."""
    started = time.time()
    row = system_row(catalog("5.1-fw", {"p": "2"}), (1, 1), 1, (10, 41), EXACT)
    est = estimate_rstar(row)
    ok = 1.85 <= est.rstar <= 2.15
    return _result("radius-two-pole", "radius", started, ok,
                   f"rstar = {est.rstar:.4f} in [1.85, 2.15] ({est.estimator_used})",
                   rstar=est.rstar, estimator=est.estimator_used)


def check_radius_boundary() -> CriterionResult:
    """Radius estimates near 1 for both boundary-pole components."""
    started = time.time()
    values = {}
    ok = True
    for comp in (1, 2):
        row = system_row(catalog("5.1-fg"), (1, 1), comp, (4, 28), EXACT)
        est = estimate_rstar(row)
        values[comp] = est.rstar
        ok = ok and 0.9 <= est.rstar <= 1.1
    return _result("radius-boundary", "radius", started, ok,
                   f"rstar comp1 = {values[1]:.4f}, comp2 = {values[2]:.4f}, both in [0.9, 1.1]",
                   rstar=values)


def check_scalar_uniform_rate() -> CriterionResult:
    """Sup-norm error rate of the one-pole scalar row on the r=1/2 circle."""
    started = time.time()
    g1 = catalog("5.2-g")[0]
    row = scalar_row(g1, 1, 1, (12, 40), FLOAT)
    K = circle_compact(Fraction(1, 2), FLOAT, 512, epsilon=1e-2)
    fit = sup_error_rate(row, K)
    lo, hi = 1 / 6 - 0.03, 1 / 6 + 0.03
    ok = lo <= fit.regression_rate <= hi
    return _result("scalar-uniform-rate", "rates", started, ok,
                   f"fitted rate = {fit.regression_rate:.4f} in [{lo:.4f}, {hi:.4f}]",
                   rate=fit.regression_rate, window=fit.window)


def check_component_uniform_rate() -> CriterionResult:
    """Component error rate ~ 1/10 on the unit circle (log-pair system)."""
    started = time.time()
    row = system_row(catalog("5.2-g"), (1, 1), 2, (10, 36), EXACT)
    K = circle_compact(1, EXACT, 512, epsilon=1e-2)
    fit = sup_error_rate(row, K)
    ok = 0.07 <= fit.regression_rate <= 0.13
    return _result("component-uniform-rate", "rates", started, ok,
                   f"fitted rate = {fit.regression_rate:.4f} in [0.07, 0.13]",
                   rate=fit.regression_rate)


def check_denominator_norm_rates() -> CriterionResult:
    """Coefficient-norm convergence rates and shared denominators."""
    started = time.time()
    target = Polynomial.from_exact([-1, Exact(Fraction(3, 2)), Exact(Fraction(-1, 2))])

    rowg = system_row(catalog("5.2-g"), (1, 1), 1, (12, 45), EXACT)
    fit_g = denominator_rate(rowg, target)
    ok_g = fit_g.regression_rate <= 1 / 3 + 0.05

    rowh = system_row(catalog("5.3-h"), (1, 1), 1, (20, 56), EXACT)
    fit_h = denominator_rate(rowh, target)
    ok_h = fit_h.regression_rate <= 1 / 2 + 0.05

    rowhh = system_row(catalog("5.3-hhat"), (1, 1), 1, (20, 56), EXACT)
    identical = all(rowh.hermite_members[n].q == rowhh.hermite_members[n].q
                    for n in rowh.orders())

    ok = ok_g and ok_h and identical
    return _result("denominator-norm-rates", "rates", started, ok,
                   f"rates {fit_g.regression_rate:.4f} <= {1/3 + 0.05:.4f} and "
                   f"{fit_h.regression_rate:.4f} <= {1/2 + 0.05:.4f}; "
                   f"shared denominators identical: {identical}",
                   rate_g=fit_g.regression_rate, rate_h=fit_h.regression_rate,
                   identical=identical)


def check_pole_indicators() -> CriterionResult:
    """Indicator values at z = 1 for the attracting and boundary systems."""
    started = time.time()
    roww = system_row(catalog("5.1-fw", {"p": "2"}), (1, 1), 1, (6, 40), EXACT)
    rep_w = indicator_report(roww, 1)
    ok_w = (rep_w.delta_big <= 0.55
            and 0.45 <= rep_w.delta_j[0] <= 0.55
            and rep_w.mu == 1)

    rowg = system_row(catalog("5.1-fg"), (1, 1), 1, (4, 30), EXACT)
    rep_g = indicator_report(rowg, 1)
    ok_g = rep_g.delta_big >= 0.9 and rep_g.mu == 0

    ok = ok_w and ok_g
    return _result("pole-indicators", "indicators", started, ok,
                   f"attracting: delta={rep_w.delta_big:.3f}, delta_1={rep_w.delta_j[0]:.3f}, "
                   f"mu={rep_w.mu}; boundary: delta={rep_g.delta_big:.3f}, mu={rep_g.mu}",
                   attracting={"delta": rep_w.delta_big, "delta_j": list(rep_w.delta_j),
                               "mu": rep_w.mu},
                   boundary={"delta": rep_g.delta_big, "mu": rep_g.mu})


def _random_rational_system(rng: random.Random):
    """A small random system of partial-fraction sums with integer poles."""
    from .series import rational_series, SystemOfSeries

    d = rng.randint(1, 3)
    components = []
    for _ in range(d):
        terms = rng.randint(1, 2)
        poles = rng.sample([-4, -3, -2, -1, 1, 2, 3, 4], terms)
        num = Polynomial.from_exact([0])
        den = Polynomial.from_exact([1])
        for a in poles:
            den = den * Polynomial.from_exact([a, -1])  # (a - z)
        for a in poles:
            c = rng.randint(1, 3)
            other = Polynomial.from_exact([1])
            for b in poles:
                if b != a:
                    other = other * Polynomial.from_exact([b, -1])
            num = num + other.scale(Exact(c))
        components.append(rational_series(num, den, "random"))
    while True:
        parts = [rng.randint(0, 2) for _ in range(d)]
        total = sum(parts)
        if 0 < total <= 4:
            break
    n = rng.randint(max(max(parts), 1, total), 15)
    return SystemOfSeries(tuple(components), "random"), MultiIndex.of(parts), n


def check_algebraic_properties(count: int = 50, seed: int = 20240601) -> CriterionResult:
    """Exact contracts on randomized rational systems.

    Matching conditions hold exactly per component, a rescaled raw solution
    reduces to the identical normalized pair, consecutive differences
    factor exactly with the degree bound, and normalization is idempotent.
    """
    started = time.time()
    rng = random.Random(seed)
    failures = []
    for trial in range(count):
        system, mindex, n = _random_rational_system(rng)
        h = compute_hermite(system, n, mindex, EXACT)

        if h.q.degree > mindex.total - h.lam:
            failures.append((trial, "denominator degree bound"))
            continue
        order_ok = True
        for j in range(mindex.d):
            if h.p[j].degree > n - mindex.parts[j] - h.lam:
                order_ok = False
            upto = n - h.lam
            if linearization_order(h.q, h.p[j], system[j], upto, EXACT) is not None:
                order_ok = False
        if not order_ok:
            failures.append((trial, "matching conditions"))
            continue

        comps = list(h.q.exact_components().values())
        for pj in h.p:
            if not pj.is_zero:
                comps.extend(pj.exact_components().values())
        if gcd_exact_many(comps).degree != 0:
            failures.append((trial, "common factor survived reduction"))
            continue

        # uniqueness under rescaling of the raw solution
        c = Exact(Fraction(rng.randint(1, 5), rng.randint(1, 5)),
                  Fraction(rng.randint(0, 3), 7))
        k = rng.randrange(mindex.d)
        scaled = reduce_and_normalize(h.q_raw.scale(c), h.p_raw[k].scale(c), EXACT)
        base = reduce_and_normalize(h.q_raw, h.p_raw[k], EXACT)
        if scaled.q != base.q or scaled.p != base.p or scaled.lam != base.lam:
            failures.append((trial, "rescaled solution reduced differently"))
            continue

        # idempotence of reduce-and-normalize on the reduced pair
        again = reduce_and_normalize(base.q, base.p, EXACT)
        if again.q != base.q or again.p != base.p or again.lam != 0:
            failures.append((trial, "normalization not idempotent"))
            continue

        # telescoping identity on one component
        comp = rng.randrange(mindex.d) + 1
        row = system_row(system, mindex, comp, (n, n + 1), EXACT)
        term = telescope(row, n)
        if term.deg_q > mindex.total - mindex.parts[comp - 1]:
            failures.append((trial, "telescope degree bound"))
            continue
        a1, a2 = row.members[n], row.members[n + 1]
        diff = (a1.q * a2.p - a2.q * a1.p).shift_up(a1.lam + a2.lam)
        rebuilt = (term.q.scale(term.a) if term.a != 0 else Polynomial()).shift_up(n + 1)
        if diff != rebuilt:
            failures.append((trial, "telescope identity"))
    return _result("algebraic-properties", "properties", started, not failures,
                   f"{count} random rational systems satisfied the exact contracts"
                   if not failures else f"failures: {failures[:5]}",
                   failures=failures)


def check_divergence_outside_disk() -> CriterionResult:
    """Consecutive differences grow geometrically beyond the estimated disk."""
    started = time.time()
    row = system_row(catalog("5.1-fw", {"p": "2"}), (1, 1), 1, (10, 31), EXACT)
    values = consecutive_differences(row, 3)
    fit = fit_rate(values, (10, 30))
    ok = fit.regression_rate > 1.0
    return _result("divergence-outside-disk", "properties", started, ok,
                   f"difference growth rate = {fit.regression_rate:.4f} > 1 at z=3",
                   rate=fit.regression_rate)


CRITERIA = (
    check_alternating_denominators,
    check_two_pole_denominators,
    check_radius_two_pole,
    check_radius_boundary,
    check_scalar_uniform_rate,
    check_component_uniform_rate,
    check_denominator_norm_rates,
    check_pole_indicators,
    check_algebraic_properties,
    check_divergence_outside_disk,
)

SUITES = ("exact-denominators", "radius", "indicators", "rates", "properties", "all")


_SUITE_OF = {
    check_alternating_denominators: "exact-denominators",
    check_two_pole_denominators: "exact-denominators",
    check_radius_two_pole: "radius",
    check_radius_boundary: "radius",
    check_scalar_uniform_rate: "rates",
    check_component_uniform_rate: "rates",
    check_denominator_norm_rates: "rates",
    check_pole_indicators: "indicators",
    check_algebraic_properties: "properties",
    check_divergence_outside_disk: "properties",
}


def run_suite(name: str) -> list:
    """Run one named suite (or "all"); returns the criterion results."""
    from .exceptions import UsageError

    if name not in SUITES:
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return [fn() for fn in CRITERIA
            if name == "all" or _SUITE_OF[fn] == name]
