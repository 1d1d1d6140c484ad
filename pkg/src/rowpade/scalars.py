"""Arithmetic contexts and scalar values.

Two modes are supported throughout the library.  Exact mode works over
complex numbers with unbounded rational real/imaginary parts; float mode
works with mpmath complex numbers at a configurable precision.  Every
computation receives a :class:`Context` naming the mode and precision, and
float results always carry the precision they were produced at.

Exact scalars may additionally hold a rational-linear combination of
*tagged constants* (the logarithms contributed by shifted-log series).
Addition, subtraction and scaling by rational values keep such
combinations exact; an operation that would need the transcendental value
itself (a product of two tagged values, or division by one) raises
:class:`~rowpade.exceptions.ExactValueNeeded`.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .exceptions import ExactValueNeeded, UsageError

_MP_CONTEXTS: dict[int, mpmath.ctx_mp.MPContext] = {}
_MP_LOCK = threading.Lock()


def mp_context(precision_bits: int) -> mpmath.ctx_mp.MPContext:
    """Return a shared mpmath context pinned at ``precision_bits``."""
    with _MP_LOCK:
        ctx = _MP_CONTEXTS.get(precision_bits)
        if ctx is None:
            ctx = mpmath.ctx_mp.MPContext()
            ctx.prec = precision_bits
            _MP_CONTEXTS[precision_bits] = ctx
        return ctx


def fraction_to_mpf(x: Fraction, mp):
    return mp.mpf(x.numerator) / x.denominator


@dataclass(frozen=True)
class LogConstant:
    """The constant log(a) for a nonzero rational a, kept symbolic."""

    a: Fraction

    def evaluate(self, mp):
        return mp.log(fraction_to_mpf(self.a, mp))

    def key(self) -> str:
        return f"log({self.a})"

    def __str__(self) -> str:
        return self.key()


class Exact:
    """Complex scalar with exact rational parts.

    ``sym`` is a sorted tuple of ``(tag, re, im)`` triples: the rational
    complex coefficients of tagged constants.  It is empty for plain
    complex-rational values, which is the common case.
    """

    __slots__ = ("re", "im", "sym")

    def __init__(self, re=0, im=0, sym=()):
        object.__setattr__(self, "re", re if isinstance(re, Fraction) else Fraction(re))
        object.__setattr__(self, "im", im if isinstance(im, Fraction) else Fraction(im))
        object.__setattr__(self, "sym", sym)

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("Exact values are immutable")

    # -- helpers -----------------------------------------------------------
    @staticmethod
    def _coerce(other):
        if isinstance(other, Exact):
            return other
        if isinstance(other, (int, Fraction)):
            return Exact(other)
        return None

    @property
    def is_rational(self) -> bool:
        return not self.sym

    @property
    def is_zero(self) -> bool:
        return not self.re and not self.im and not self.sym

    @property
    def is_one(self) -> bool:
        return self.re == 1 and not self.im and not self.sym

    @staticmethod
    def _merge_sym(a, b, sign=1):
        if not a and not b:
            return ()
        acc = {tag: (re, im) for tag, re, im in a}
        for tag, re, im in b:
            cre, cim = acc.get(tag, (Fraction(0), Fraction(0)))
            acc[tag] = (cre + sign * re, cim + sign * im)
        out = tuple(
            (tag, re, im)
            for tag, (re, im) in sorted(acc.items(), key=lambda kv: kv[0].key())
            if re or im
        )
        return out

    # -- ring operations ---------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Exact(self.re + other.re, self.im + other.im,
                     self._merge_sym(self.sym, other.sym))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Exact(self.re - other.re, self.im - other.im,
                     self._merge_sym(self.sym, other.sym, -1))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return Exact(-self.re, -self.im,
                     tuple((t, -re, -im) for t, re, im in self.sym))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.sym and other.sym:
            raise ExactValueNeeded(
                "product of two tagged-constant values is not exactly representable")
        re = self.re * other.re - self.im * other.im
        im = self.re * other.im + self.im * other.re
        if self.sym:
            sym = tuple(
                (t, sre * other.re - sim * other.im, sre * other.im + sim * other.re)
                for t, sre, sim in self.sym)
            sym = tuple(e for e in sym if e[1] or e[2])
        elif other.sym:
            sym = tuple(
                (t, sre * self.re - sim * self.im, sre * self.im + sim * self.re)
                for t, sre, sim in other.sym)
            sym = tuple(e for e in sym if e[1] or e[2])
        else:
            sym = ()
        return Exact(re, im, sym)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.sym:
            raise ExactValueNeeded(
                "division by a tagged-constant value is not exactly representable")
        norm = other.re * other.re + other.im * other.im
        if not norm:
            raise ZeroDivisionError("division by exact zero")
        inv = Exact(other.re / norm, -other.im / norm)
        return self * inv

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return (self.re == other.re and self.im == other.im
                and self.sym == other.sym)

    def __hash__(self):
        return hash((self.re, self.im, self.sym))

    def conjugate(self):
        return Exact(self.re, -self.im,
                     tuple((t, re, -im) for t, re, im in self.sym))

    # -- conversion and display -------------------------------------------
    def to_mpc(self, mp):
        value = mp.mpc(fraction_to_mpf(self.re, mp), fraction_to_mpf(self.im, mp))
        for tag, re, im in self.sym:
            value += mp.mpc(fraction_to_mpf(re, mp), fraction_to_mpf(im, mp)) * tag.evaluate(mp)
        return value

    def __repr__(self):
        return f"Exact({self})"

    def __str__(self):
        parts = []
        if self.re or (not self.im and not self.sym):
            parts.append(str(self.re))
        if self.im:
            parts.append(f"{self.im}i" if not parts else f"+ {self.im}i")
        for tag, re, im in self.sym:
            coeff = str(Exact(re, im))
            parts.append(f"({coeff})*{tag}" if parts else f"({coeff})*{tag}")
        return " ".join(parts) if parts else "0"


EX_ZERO = Exact(0)
EX_ONE = Exact(1)


def exact(re=0, im=0) -> Exact:
    return Exact(Fraction(re), Fraction(im))


def parse_exact(obj) -> Exact:
    """Parse a scalar literal: int, float, "p/q" string, or {"re","im"}."""
    if isinstance(obj, Exact):
        return obj
    if isinstance(obj, bool):
        raise UsageError(f"not a scalar literal: {obj!r}")
    if isinstance(obj, int):
        return Exact(obj)
    if isinstance(obj, float):
        return Exact(Fraction(obj))
    if isinstance(obj, Fraction):
        return Exact(obj)
    if isinstance(obj, str):
        try:
            return Exact(Fraction(obj.strip()))
        except (ValueError, ZeroDivisionError) as e:
            raise UsageError(f"bad rational literal {obj!r}") from e
    if isinstance(obj, dict):
        unknown = set(obj) - {"re", "im"}
        if unknown:
            raise UsageError(f"unknown keys in complex literal: {sorted(unknown)}")
        re = parse_exact(obj.get("re", 0))
        im = parse_exact(obj.get("im", 0))
        if re.im or im.im or re.sym or im.sym:
            raise UsageError("complex literal parts must be rational")
        return Exact(re.re, im.re)
    raise UsageError(f"not a scalar literal: {obj!r}")


def format_exact(value: Exact):
    """Serialize an exact scalar: "p/q" when real, {"re","im"} otherwise."""
    if value.sym:
        return {"re": str(value.re), "im": str(value.im),
                "tags": {t.key(): str(Exact(re, im)) for t, re, im in value.sym}}
    if not value.im:
        return str(value.re)
    return {"re": str(value.re), "im": str(value.im)}


@dataclass(frozen=True)
class Context:
    """Arithmetic mode plus the tolerances derived from the precision.

    The cluster radius separates genuine multiple roots from near-multiple
    ones; it defaults to 1e-8 at 256 bits and tightens with precision.
    """

    mode: str = "exact"
    precision_bits: int = 256

    ROOT_SWEEP_CAP = 200

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise UsageError(f"unknown arithmetic mode {self.mode!r}")
        if self.precision_bits < 64:
            raise UsageError("precision must be at least 64 bits")

    @property
    def is_exact(self) -> bool:
        return self.mode == "exact"

    @property
    def mp(self):
        return mp_context(self.precision_bits)

    @property
    def cluster_radius(self):
        return self.mp.mpf(10) ** -(self.precision_bits // 32)

    @property
    def root_tol(self):
        return self.mp.mpf(2) ** -((3 * self.precision_bits) // 4)

    @property
    def zero_tol(self):
        # float-mode threshold below which a computed coefficient is
        # treated as an exact zero (relative to the value scale)
        return self.mp.mpf(2) ** -(self.precision_bits // 2)

    @property
    def cancel_tol(self):
        return self.mp.mpf(2) ** (16 - self.precision_bits // 2)

    def to_mpc(self, value):
        mp = self.mp
        if isinstance(value, Exact):
            return value.to_mpc(mp)
        if isinstance(value, Fraction):
            return mp.mpc(fraction_to_mpf(value, mp))
        return mp.mpc(value)

    def scalar(self, value) -> object:
        """Adapt an exact input value to this context's scalar domain."""
        if self.is_exact:
            if isinstance(value, Exact):
                return value
            if isinstance(value, (int, Fraction)):
                return Exact(value)
            raise UsageError(f"value {value!r} has no exact representation")
        return self.to_mpc(value)

    def is_negligible(self, x, scale=1) -> bool:
        """Mode-aware zero test for a scalar against a magnitude scale."""
        if isinstance(x, Exact):
            return x.is_zero
        return abs(x) <= self.zero_tol * scale

    def nstr(self, x, extra_digits=3) -> str:
        digits = max(int(self.precision_bits * 0.30103) + extra_digits, 17)
        return self.mp.nstr(x, digits)


EXACT_CTX = Context("exact", 256)
FLOAT_CTX = Context("float", 256)
