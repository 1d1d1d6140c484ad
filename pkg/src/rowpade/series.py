"""Formal power series, builders, and the built-in example catalog.

A :class:`PowerSeries` wraps a total, deterministic coefficient supplier.
Coefficients are computed lazily and memoized, because row sweeps re-read
the low-order ones thousands of times.  Builders cover rational functions
(via the division recurrence), shifted logarithms, and linear combinations;
the catalog ships classic rational/logarithmic test systems with their
reference poles and radii filled in.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional

from .exceptions import MixedModeError, UsageError
from .numerics import Polynomial, roots
from .scalars import EX_ZERO, Context, Exact, LogConstant, parse_exact

_METADATA_CTX = Context("exact", 256)


@dataclass(frozen=True)
class ReferenceAnalytics:
    """Ground-truth analytic facts attached to a series, when known.

    ``known_poles`` holds (location, order) pairs; ``known_radii`` maps a
    pole budget m to the radius of the largest centered disk on which the
    function is meromorphic with at most m poles (math.inf allowed).  The
    evaluator, when present, computes the function value at a float point.
    """

    known_poles: tuple = ()
    known_radii: Mapping[int, object] = field(default_factory=dict)
    evaluator: Optional[Callable] = None

    def radius(self, m: int):
        return self.known_radii.get(m)

    def poles_within(self, radius) -> list:
        out = []
        for loc, order in self.known_poles:
            mag = abs(_METADATA_CTX.to_mpc(loc))
            if mag < radius:
                out.append((loc, order))
        return out


class PowerSeries:
    """A formal Taylor expansion given by a coefficient supplier."""

    def __init__(self, fn, description: str = "", metadata: ReferenceAnalytics | None = None,
                 mode: str = "exact"):
        self._fn = fn
        self.description = description
        self.metadata = metadata
        self.mode = mode
        self._cache: dict[int, object] = {}
        self._lock = threading.RLock()

    def coeff(self, k: int):
        if k < 0:
            raise UsageError("series coefficients are indexed from 0")
        with self._lock:
            value = self._cache.get(k)
            if value is None:
                value = self._fn(k)
                self._cache[k] = value
            return value

    def coeffs(self, upto: int) -> list:
        return [self.coeff(k) for k in range(upto + 1)]

    def replace_metadata(self, metadata: ReferenceAnalytics) -> "PowerSeries":
        clone = PowerSeries(self._fn, self.description, metadata, self.mode)
        clone._cache = self._cache
        clone._lock = self._lock
        return clone

    # -- linear combinations -------------------------------------------------
    def _check_mode(self, other: "PowerSeries"):
        if self.mode != other.mode:
            raise MixedModeError(
                f"cannot combine series in {self.mode!r} and {other.mode!r} modes")

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        if not isinstance(other, PowerSeries):
            return NotImplemented
        self._check_mode(other)
        meta = _merged_metadata(self.metadata, other.metadata, 1)
        return PowerSeries(lambda k: self.coeff(k) + other.coeff(k),
                           f"({self.description}) + ({other.description})",
                           meta, self.mode)

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        if not isinstance(other, PowerSeries):
            return NotImplemented
        self._check_mode(other)
        meta = _merged_metadata(self.metadata, other.metadata, -1)
        return PowerSeries(lambda k: self.coeff(k) - other.coeff(k),
                           f"({self.description}) - ({other.description})",
                           meta, self.mode)

    def __rmul__(self, c) -> "PowerSeries":
        c = c if isinstance(c, Exact) else Exact(Fraction(c))
        if c.is_zero:
            return PowerSeries(lambda k: EX_ZERO, "0", ReferenceAnalytics(), self.mode)
        meta = None
        if self.metadata is not None:
            ev = self.metadata.evaluator
            meta = ReferenceAnalytics(
                self.metadata.known_poles,
                dict(self.metadata.known_radii),
                (lambda ctx, z, _ev=ev, _c=c: ctx.to_mpc(_c) * _ev(ctx, z)) if ev else None)
        return PowerSeries(lambda k: c * self.coeff(k),
                           f"{c}*({self.description})", meta, self.mode)

    def __repr__(self):
        return f"PowerSeries({self.description!r})"


def _same_location(a, b) -> bool:
    if isinstance(a, Exact) and isinstance(b, Exact):
        return a == b
    va = _METADATA_CTX.to_mpc(a)
    vb = _METADATA_CTX.to_mpc(b)
    return abs(va - vb) < 1e-9


def _merged_metadata(ma, mb, sign):
    """Conservative metadata for a sum/difference.

    Poles present in exactly one operand survive; colliding locations may
    cancel, so they are dropped, as are the radii.  Evaluators combine
    exactly.
    """
    if ma is None or mb is None:
        return None
    poles = []
    for loc, order in ma.known_poles:
        if not any(_same_location(loc, l2) for l2, _ in mb.known_poles):
            poles.append((loc, order))
    for loc, order in mb.known_poles:
        if not any(_same_location(loc, l2) for l2, _ in ma.known_poles):
            poles.append((loc, order))
    ev = None
    if ma.evaluator is not None and mb.evaluator is not None:
        ea, eb = ma.evaluator, mb.evaluator
        if sign > 0:
            ev = lambda ctx, z: ea(ctx, z) + eb(ctx, z)
        else:
            ev = lambda ctx, z: ea(ctx, z) - eb(ctx, z)
    return ReferenceAnalytics(tuple(poles), {}, ev)


@dataclass(frozen=True)
class SystemOfSeries:
    """An ordered tuple of power series approximated simultaneously."""

    components: tuple
    name: str = ""

    def __post_init__(self):
        if len(self.components) < 1:
            raise UsageError("a system needs at least one component")
        modes = {s.mode for s in self.components}
        if len(modes) != 1:
            raise MixedModeError("system components must share one arithmetic mode")

    @property
    def d(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> PowerSeries:
        return self.components[i]

    def __len__(self) -> int:
        return len(self.components)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def rational_series(num: Polynomial, den: Polynomial,
                    description: str = "", metadata: ReferenceAnalytics | None = None,
                    auto_metadata: bool = True) -> PowerSeries:
    """Expansion of num/den about the origin via the division recurrence."""
    if den.is_zero or den.coeff_at(0).is_zero:
        raise UsageError("series not defined at origin: denominator vanishes at 0")
    q0 = den.coeff_at(0)
    dd = den.degree
    out = PowerSeries(None, description or "rational", None)

    def fn(k: int):
        acc = num.coeff_at(k)
        if not isinstance(acc, Exact):
            acc = Exact(acc)
        for i in range(1, min(k, dd) + 1):
            acc = acc - den.coeff_at(i) * out.coeff(k - i)
        return acc / q0

    out._fn = fn
    if metadata is None and auto_metadata:
        metadata = _rational_metadata(num, den)
    out.metadata = metadata
    return out


def _rational_metadata(num: Polynomial, den: Polynomial) -> ReferenceAnalytics:
    def evaluator(ctx, z, _cache={}):
        key = ctx.precision_bits
        pair = _cache.get(key)
        if pair is None:
            pair = (num.to_float(ctx), den.to_float(ctx))
            _cache[key] = pair
        nf, df = pair
        return nf(z) / df(z)

    poles = ()
    radii: dict[int, object] = {}
    if den.degree >= 1:
        rs = roots(den, _METADATA_CTX)
        poles = tuple((r.value, r.multiplicity) for r in rs.roots)
        mags = sorted(float(abs(r.value)) for r in rs.roots for _ in range(r.multiplicity))
        for m in range(len(mags) + 3):
            radii[m] = mags[m] if m < len(mags) else math.inf
    else:
        for m in range(4):
            radii[m] = math.inf
    return ReferenceAnalytics(poles, radii, evaluator)


def log_shift_series(a) -> PowerSeries:
    """Series of log(a - z): constant log a, then -1/(k a^k) for k >= 1.

    In exact mode the constant term is a tagged symbolic value (exactly 0
    when a = 1); every higher coefficient is rational.
    """
    a = a.re if isinstance(a, Exact) else Fraction(a)
    if a == 0:
        raise UsageError("log shift requires a nonzero shift")
    if a == 1:
        phi0 = EX_ZERO
    else:
        phi0 = Exact(0, 0, ((LogConstant(a), Fraction(1), Fraction(0)),))

    def fn(k: int):
        if k == 0:
            return phi0
        return Exact(Fraction(-1, k) / a ** k)

    mag = abs(a)
    meta = ReferenceAnalytics(
        (), {m: float(mag) for m in range(4)},
        lambda ctx, z: ctx.mp.log(ctx.to_mpc(a) - z))
    return PowerSeries(fn, f"log({a}-z)", meta)


def poly_times_series(t: Polynomial, f: PowerSeries) -> PowerSeries:
    """The series t(z)*f(z) for an exact polynomial t."""
    def fn(k: int):
        acc = EX_ZERO
        for i in range(0, min(k, t.degree) + 1):
            c = t.coeff_at(i)
            if not c.is_zero:
                acc = acc + c * f.coeff(k - i)
        return acc

    return PowerSeries(fn, f"({t!r})*({f.description})", None, f.mode)


def geometric_series() -> PowerSeries:
    return rational_series(Polynomial.from_exact([1]), Polynomial.from_exact([1, -1]),
                           "1/(1-z)")


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def _rat(num, den, description, poles, radii) -> PowerSeries:
    numP = Polynomial.from_exact(num)
    denP = Polynomial.from_exact(den)
    base = rational_series(numP, denP, description, auto_metadata=True)
    meta = ReferenceAnalytics(poles, radii, base.metadata.evaluator)
    return base.replace_metadata(meta)


INF = math.inf


def _cat_51_f() -> PowerSeries:
    return _rat([1], [1, 0, -1], "1/(1-z^2)",
                ((Exact(1), 1), (Exact(-1), 1)), {0: 1, 1: 1, 2: INF})


def _cat_51_g() -> PowerSeries:
    return _rat([0, 1], [1, 0, 1], "z/(1+z^2)",
                ((Exact(0, 1), 1), (Exact(0, -1), 1)), {0: 1, 1: 1, 2: INF})


def _cat_51_h() -> PowerSeries:
    return _rat([1], [1, 1], "1/(1+z)",
                ((Exact(-1), 1),), {0: 1, 1: INF, 2: INF})


def _cat_51_w(p: Fraction) -> PowerSeries:
    # 1/(1+z) + 1/(1-z/p) over the common denominator
    den = Polynomial.from_exact([1, 1]) * Polynomial.from_exact([1, Exact(Fraction(-1) / p)])
    num = Polynomial.from_exact([2, Exact(1 - Fraction(1) / p)])
    return _rat(num.coeffs, den.coeffs, f"1/(1+z) + 1/(1-z/{p})",
                ((Exact(-1), 1), (Exact(p), 1)), {0: 1, 1: float(p), 2: INF})


def _cat_52_f1() -> PowerSeries:
    return _rat([3, -2], [2, -3, 1], "1/(1-z) + 1/(2-z)",
                ((Exact(1), 1), (Exact(2), 1)), {0: 1, 1: 2, 2: INF})


def _cat_52_f2() -> PowerSeries:
    return _rat([1], [3, -1], "1/(3-z)",
                ((Exact(3), 1),), {0: 3, 1: INF, 2: INF})


def _cat_52_g1() -> PowerSeries:
    s = _rat([1], [1, -1], "1/(1-z)", ((Exact(1), 1),), {0: 1, 1: INF}) + log_shift_series(3)
    meta = ReferenceAnalytics(((Exact(1), 1),), {0: 1, 1: 3, 2: 3}, s.metadata.evaluator)
    return s.replace_metadata(meta)


def _cat_52_g2() -> PowerSeries:
    s = _rat([1], [2, -1], "1/(2-z)", ((Exact(2), 1),), {0: 2, 1: INF}) + log_shift_series(10)
    meta = ReferenceAnalytics(((Exact(2), 1),), {0: 2, 1: 10, 2: 10}, s.metadata.evaluator)
    return s.replace_metadata(meta)


def _cat_53_h1() -> PowerSeries:
    s = _cat_52_f1() + log_shift_series(3)
    meta = ReferenceAnalytics(((Exact(1), 1), (Exact(2), 1)), {0: 1, 1: 2, 2: 3},
                              s.metadata.evaluator)
    return s.replace_metadata(meta)


def _cat_53_h2() -> PowerSeries:
    s = (_rat([1], [1, -1], "1/(1-z)", ((Exact(1), 1),), {0: 1, 1: INF})
         + log_shift_series(3) + log_shift_series(4))
    meta = ReferenceAnalytics(((Exact(1), 1),), {0: 1, 1: 3, 2: 3}, s.metadata.evaluator)
    return s.replace_metadata(meta)


def _cat_53_hhat1() -> PowerSeries:
    s = _cat_53_h1() - _cat_53_h2()
    meta = ReferenceAnalytics(((Exact(2), 1),), {0: 2, 1: 4, 2: 4}, s.metadata.evaluator)
    return s.replace_metadata(meta)


_CATALOG = {
    "5.1-fg": ("pair of two-pole rationals with boundary poles",
               lambda params: (_cat_51_f(), _cat_51_g())),
    "5.1-fh": ("two-pole rational with a one-pole companion",
               lambda params: (_cat_51_f(), _cat_51_h())),
    "5.1-fw": ("two-pole rational with a companion holding poles at -1 and p (param p > 1)",
               lambda params: (_cat_51_f(), _cat_51_w(_require_p(params)))),
    "5.2-f1f2": ("poles at 1, 2 paired with a single pole at 3",
                 lambda params: (_cat_52_f1(), _cat_52_f2())),
    "5.2-g": ("pole + log branch pairs: (1, log 3) and (2, log 10)",
              lambda params: (_cat_52_g1(), _cat_52_g2())),
    "5.3-h": ("two log-bearing components sharing the pole at 1",
              lambda params: (_cat_53_h1(), _cat_53_h2())),
    "5.3-hhat": ("difference system: the shared pole at 1 cancels in component 1",
                 lambda params: (_cat_53_hhat1(), _cat_53_h2())),
}


def _require_p(params) -> Fraction:
    if not params or "p" not in params:
        raise UsageError("catalog entry requires parameter p")
    p = parse_exact(params["p"])
    if p.im or p.sym:
        raise UsageError("parameter p must be rational")
    if p.re <= 1:
        raise UsageError("parameter p must exceed 1")
    return p.re


def catalog(name: str, params: Mapping | None = None) -> SystemOfSeries:
    """Return a named example system with reference analytics attached."""
    entry = _CATALOG.get(name)
    if entry is None:
        known = ", ".join(sorted(_CATALOG))
        raise UsageError(f"unknown catalog entry {name!r} (known: {known})")
    _, build = entry
    return SystemOfSeries(tuple(build(params or {})), name)


def list_catalog() -> list:
    return [(name, desc) for name, (desc, _) in sorted(_CATALOG.items())]


# ---------------------------------------------------------------------------
# series-spec documents
# ---------------------------------------------------------------------------

def parse_series_spec(obj):
    """Parse a series-spec JSON object into a series or a system.

    Kinds: rational, logshift, sum, coeffs, catalog.  Rational literals are
    "p/q" strings; complex literals are {"re": ..., "im": ...} objects.
    """
    if not isinstance(obj, dict) or "kind" not in obj:
        raise UsageError("series spec must be an object with a 'kind' field")
    kind = obj["kind"]
    if kind == "rational":
        num = _parse_poly(obj.get("num"), "num")
        den = _parse_poly(obj.get("den"), "den")
        return rational_series(num, den, "rational spec")
    if kind == "logshift":
        if "a" not in obj:
            raise UsageError("logshift spec requires field 'a'")
        a = parse_exact(obj["a"])
        if a.im or a.sym:
            raise UsageError("logshift parameter must be rational")
        return log_shift_series(a.re)
    if kind == "sum":
        terms = obj.get("terms")
        if not isinstance(terms, list) or not terms:
            raise UsageError("sum spec requires a nonempty 'terms' list")
        parsed = []
        for t in terms:
            s = parse_series_spec(t)
            if isinstance(s, SystemOfSeries):
                raise UsageError("sum terms must be single series, not systems")
            parsed.append(s)
        acc = parsed[0]
        for s in parsed[1:]:
            acc = acc + s
        return acc
    if kind == "coeffs":
        values = obj.get("values")
        if not isinstance(values, list):
            raise UsageError("coeffs spec requires a 'values' list")
        parsed_values = [parse_exact(v) for v in values]

        def fn(k: int):
            return parsed_values[k] if k < len(parsed_values) else EX_ZERO

        return PowerSeries(fn, "coefficient list", ReferenceAnalytics())
    if kind == "catalog":
        return catalog(obj.get("name", ""), obj.get("params"))
    raise UsageError(f"unknown series kind {kind!r}")


def _parse_poly(values, what: str) -> Polynomial:
    if not isinstance(values, list):
        raise UsageError(f"field {what!r} must be a coefficient list")
    return Polynomial(tuple(parse_exact(v) for v in values))
