"""Field-generic polynomial and linear-algebra kernel.

Dense polynomials over either scalar domain (exact complex-rational values,
or mpmath complex values at context precision), simultaneous-iteration root
finding, exact and clustered gcd, homogeneous nullspace extraction, and the
canonical rescaling that puts a denominator into the library-wide
normalized product form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exceptions import (
    InsufficientData,
    RootFindingError,
    UncertainCancellation,
    UsageError,
)
from .scalars import EX_ONE, EX_ZERO, Context, Exact


def _is_zero_coeff(c) -> bool:
    if isinstance(c, Exact):
        return c.is_zero
    return c == 0


class Polynomial:
    """Dense univariate polynomial, coefficients in ascending degree.

    Trailing coefficients that are exactly zero are stripped on
    construction; the zero polynomial stores no coefficients and reports
    degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        coeffs = list(coeffs)
        while coeffs and _is_zero_coeff(coeffs[-1]):
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls((EX_ONE,))

    @classmethod
    def from_exact(cls, values):
        return cls(tuple(v if isinstance(v, Exact) else Exact(Fraction(v)) for v in values))

    @classmethod
    def monomial(cls, k: int, coeff=EX_ONE):
        return cls((EX_ZERO,) * k + (coeff,))

    # -- structure ----------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff_at(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return EX_ZERO if self._exact_domain() else 0

    def _exact_domain(self) -> bool:
        return not self.coeffs or isinstance(self.coeffs[0], Exact)

    def leading(self):
        if self.is_zero:
            raise UsageError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def order_at_zero(self, negligible=None) -> int:
        """Order of the zero at the origin; the zero polynomial returns -1."""
        if self.is_zero:
            return -1
        test = negligible or _is_zero_coeff
        k = 0
        while k < len(self.coeffs) and test(self.coeffs[k]):
            k += 1
        return k

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a, b = self.coeffs, other.coeffs
        out = []
        for i in range(n):
            if i < len(a) and i < len(b):
                out.append(a[i] + b[i])
            elif i < len(a):
                out.append(a[i])
            else:
                out.append(b[i])
        return Polynomial(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Polynomial(tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        if self.is_zero or other.is_zero:
            return Polynomial()
        a, b = self.coeffs, other.coeffs
        out = [None] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            for j, cb in enumerate(b):
                term = ca * cb
                out[i + j] = term if out[i + j] is None else out[i + j] + term
        return Polynomial(out)

    def scale(self, c):
        return Polynomial(tuple(x * c for x in self.coeffs))

    def divide_scalar(self, c):
        return Polynomial(tuple(x / c for x in self.coeffs))

    def shift_up(self, k: int):
        if self.is_zero or k == 0:
            return self
        pad = (EX_ZERO,) * k if self._exact_domain() else (0,) * k
        return Polynomial(pad + self.coeffs)

    def shift_down(self, k: int):
        return Polynomial(self.coeffs[k:])

    def truncate(self, deg: int):
        if deg < 0:
            return Polynomial()
        return Polynomial(self.coeffs[: deg + 1])

    def derivative(self):
        return Polynomial(tuple(c * i for i, c in enumerate(self.coeffs) if i))

    def __call__(self, z):
        if self.is_zero:
            return z * 0
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * z + c
        return acc

    def divmod_by(self, other):
        """Long division; the divisor's leading coefficient must be invertible."""
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        if self.degree < other.degree:
            return Polynomial(), self
        rem = list(self.coeffs)
        lead = other.leading()
        dd = other.degree
        qlen = len(rem) - dd
        quot = [None] * qlen
        for k in range(qlen - 1, -1, -1):
            c = rem[k + dd] / lead
            quot[k] = c
            if not _is_zero_coeff(c):
                for i, oc in enumerate(other.coeffs):
                    rem[k + i] = rem[k + i] - c * oc
        return Polynomial(quot), Polynomial(rem[:dd])

    def monic(self):
        if self.is_zero:
            return self
        return self.divide_scalar(self.leading())

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r})"

    # -- domain handling ------------------------------------------------------
    def to_float(self, ctx: Context):
        return Polynomial(tuple(ctx.to_mpc(c) for c in self.coeffs))

    def chop(self, ctx: Context):
        """Zero out float coefficients that are negligible at the value scale."""
        if self.is_zero or self._exact_domain():
            return self
        scale = max(abs(c) for c in self.coeffs)
        if scale == 0:
            return Polynomial()
        zero = self.coeffs[0] * 0
        return Polynomial(tuple(zero if abs(c) <= ctx.zero_tol * scale else c
                                for c in self.coeffs))

    def is_rational(self) -> bool:
        return all(isinstance(c, Exact) and c.is_rational for c in self.coeffs)

    def exact_components(self):
        """Split a symbolic exact polynomial into rational component polynomials.

        Returns a dict mapping None to the plain rational part and each tag
        to its rational coefficient polynomial.
        """
        tags = []
        for c in self.coeffs:
            if not isinstance(c, Exact):
                raise UsageError("exact_components requires exact coefficients")
            for tag, _, _ in c.sym:
                if tag not in tags:
                    tags.append(tag)
        comps = {None: [Exact(c.re, c.im) for c in self.coeffs]}
        for tag in tags:
            vals = []
            for c in self.coeffs:
                coeff = EX_ZERO
                for t, re, im in c.sym:
                    if t == tag:
                        coeff = Exact(re, im)
                vals.append(coeff)
            comps[tag] = vals
        return {tag: Polynomial(vals) for tag, vals in comps.items()}


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Root:
    value: object           # mpc
    multiplicity: int
    residual: object        # mpf |p(value)|


@dataclass(frozen=True)
class RootSet:
    roots: tuple[Root, ...]

    @property
    def total_multiplicity(self) -> int:
        return sum(r.multiplicity for r in self.roots)

    def expand(self):
        out = []
        for r in self.roots:
            out.extend([r.value] * r.multiplicity)
        return out

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)


def roots(p: Polynomial, ctx: Context, tol=None) -> RootSet:
    """All complex roots of ``p`` with multiplicity, refined by Aberth sweeps.

    Exact coefficients are converted to floats at context precision first.
    Root pairs closer than the context cluster radius are merged into one
    cluster with combined multiplicity.
    """
    if p.is_zero or p.degree < 1:
        raise UsageError("no roots: polynomial must have degree at least 1")
    mp = ctx.mp
    if tol is None:
        tol = ctx.root_tol

    if p._exact_domain():
        lam = p.order_at_zero()
        deflated = p.shift_down(lam).to_float(ctx)
    else:
        scale0 = max(abs(c) for c in p.coeffs)
        lam = p.order_at_zero(lambda c: abs(c) <= ctx.zero_tol * scale0)
        deflated = p.shift_down(lam)

    pf = p.to_float(ctx) if p._exact_domain() else p
    scale = max(abs(c) for c in pf.coeffs)
    found = []

    d = deflated.degree
    if d >= 1:
        monic = deflated.monic()
        found = _aberth(monic, ctx, tol, mp)

    clusters = _cluster_points(found, ctx.cluster_radius, mp)
    out = []
    if lam > 0:
        out.append(Root(mp.mpc(0), lam, mp.mpf(0)))
    deg = pf.degree
    for center, count in clusters:
        # backward-error residual: |p| relative to the evaluation scale
        level = scale * max(mp.mpf(1), abs(center)) ** deg
        out.append(Root(center, count, abs(pf(center)) / level))
    out.sort(key=lambda r: (r.value.real, r.value.imag))
    rs = RootSet(tuple(out))
    assert rs.total_multiplicity == p.degree
    return rs


def _aberth(monic: Polynomial, ctx: Context, tol, mp):
    """Ehrlich-Aberth simultaneous refinement on a monic float polynomial.

    A point counts as converged when its residual drops below the
    backward-error floor tol * scale * max(1, |z|)^degree, which is the
    level that evaluation noise permits away from the unit disk.
    """
    d = monic.degree
    if d == 1:
        return [-monic.coeffs[0]]
    deriv = monic.derivative()
    scale = max(mp.mpf(1), max(abs(c) for c in monic.coeffs))
    radius = 1 + max(abs(c) for c in monic.coeffs[:-1])
    z = [radius * mp.exp(mp.mpc(0, 2) * mp.pi * (j + mp.mpf(1) / 4) / d)
         for j in range(d)]
    tiny = mp.mpf(2) ** (-8 * ctx.precision_bits)
    stall = mp.mpf(2) ** (8 - ctx.precision_bits)

    def floor_at(point):
        return tol * scale * max(mp.mpf(1), abs(point)) ** d

    for _ in range(ctx.ROOT_SWEEP_CAP):
        converged = True
        moved = mp.mpf(0)
        for i in range(d):
            pz = monic(z[i])
            if abs(pz) <= floor_at(z[i]):
                continue
            converged = False
            dz = deriv(z[i])
            if dz == 0:
                z[i] = z[i] + mp.mpf(1) / 64
                continue
            newton = pz / dz
            s = mp.mpc(0)
            for j in range(d):
                if j == i:
                    continue
                diff = z[i] - z[j]
                if diff == 0:
                    diff = mp.mpc(tiny, tiny)
                s += 1 / diff
            denom = 1 - newton * s
            step = newton if denom == 0 else newton / denom
            z[i] = z[i] - step
            moved = max(moved, abs(step) / (1 + abs(z[i])))
        if converged or moved <= stall:
            if not converged and any(abs(monic(v)) > floor_at(v) for v in z):
                raise RootFindingError(
                    "root refinement stalled above tolerance",
                    iterates=z, residuals=[abs(monic(v)) for v in z])
            break
    else:
        residuals = [abs(monic(v)) for v in z]
        if any(r > floor_at(v) for r, v in zip(residuals, z)):
            raise RootFindingError(
                "root refinement did not converge within the sweep cap",
                iterates=z, residuals=residuals)
    return z


def _cluster_points(points, radius, mp):
    """Group points whose pairwise distance is below ``radius``.

    Returns a list of (center, count) sorted by center.
    """
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(points[i] - points[j]) < radius:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(points[i])
    out = []
    for members in groups.values():
        center = sum(members, mp.mpc(0)) / len(members)
        out.append((center, len(members)))
    out.sort(key=lambda t: (t[0].real, t[0].imag))
    return out


# ---------------------------------------------------------------------------
# gcd
# ---------------------------------------------------------------------------

def gcd_exact(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd over the rational field by the Euclidean remainder sequence."""
    if a.is_zero and b.is_zero:
        raise UsageError("gcd of two zero polynomials")
    while not b.is_zero:
        _, r = a.divmod_by(b)
        a, b = b, r
    return a.monic()


def gcd_exact_many(polys) -> Polynomial:
    g = None
    for p in polys:
        if p.is_zero:
            continue
        g = p if g is None else gcd_exact(g, p)
        if g.degree == 0:
            return Polynomial.one()
    if g is None:
        raise UsageError("gcd of all-zero inputs")
    return g.monic()


def gcd_reduce(a: Polynomial, b: Polynomial, ctx: Context):
    """Greatest common divisor and the cofactors ``(g, a/g, b/g)``.

    Exact mode runs the Euclidean algorithm with exact quotients.  Float
    mode pairs roots of the two polynomials closer than the cluster radius,
    rebuilds the common factor from pair midpoints, and verifies both
    synthetic divisions against the cancellation tolerance.
    """
    if a.is_zero and b.is_zero:
        raise UsageError("gcd of two zero polynomials")
    if ctx.is_exact:
        if a.is_zero or b.is_zero:
            nz = b if a.is_zero else a
            g = nz.monic()
            qa, ra = a.divmod_by(g)
            qb, rb = b.divmod_by(g)
            return g, qa, qb
        g = gcd_exact(a, b)
        qa, ra = a.divmod_by(g)
        qb, rb = b.divmod_by(g)
        assert ra.is_zero and rb.is_zero
        return g, qa, qb

    mp = ctx.mp
    if a.is_zero or b.is_zero or a.degree == 0 or b.degree == 0:
        one = Polynomial((mp.mpc(1),))
        return one, a, b
    # root-find only the lower-degree input; a shared zero must make the
    # other polynomial vanish there too, verified before each peel
    small = a if a.degree <= b.degree else b
    gray = mp.mpf(2) ** -(ctx.precision_bits // 4)

    def classify(poly, point):
        scale = max(abs(c) for c in poly.coeffs)
        level = scale * max(mp.mpf(1), abs(point)) ** poly.degree
        v = abs(poly(point)) / level
        if v <= ctx.cancel_tol:
            return "zero"
        return "uncertain" if v <= gray else "nonzero"

    qa, qb = a, b
    g = Polynomial((mp.mpc(1),))
    for root in roots(small, ctx).roots:
        for _ in range(root.multiplicity):
            if qa.degree < 1 or qb.degree < 1:
                break
            ca, cb = classify(qa, root.value), classify(qb, root.value)
            if "uncertain" in (ca, cb):
                raise UncertainCancellation(
                    "uncertain cancellation: residual in the gray zone; "
                    "retry at higher precision")
            if ca != "zero" or cb != "zero":
                break
            linear = Polynomial((-root.value, mp.mpc(1)))
            qa, _ = qa.divmod_by(linear)
            qb, _ = qb.divmod_by(linear)
            g = g * linear
    return g, qa, qb


def _checked_division(p: Polynomial, g: Polynomial, ctx: Context, what: str) -> Polynomial:
    q, r = p.divmod_by(g)
    scale = max(abs(c) for c in p.coeffs)
    if not r.is_zero and max(abs(c) for c in r.coeffs) > ctx.cancel_tol * scale:
        raise UncertainCancellation(
            f"uncertain cancellation while dividing the {what}; "
            "retry at higher precision")
    return q


# ---------------------------------------------------------------------------
# nullspace
# ---------------------------------------------------------------------------

def nullspace_vector(matrix, ctx: Context):
    """Nonzero solution of the homogeneous system ``M v = 0``.

    ``matrix`` has r rows and at least r+1 columns (the canonical case has
    exactly one extra column).  Exact mode reduces to echelon form and
    applies the deterministic free-variable rule: the highest-index free
    column gets value 1, every other free column 0.  Float mode returns a
    minimal-residual unit vector from a full orthogonal factorization of
    the conjugated row space.  Returns ``(v, residual)``; the residual is
    None in exact mode, where the solution is exact by construction.
    """
    nrows = len(matrix)
    if nrows == 0:
        raise UsageError("empty system")
    ncols = len(matrix[0])
    if any(len(row) != ncols for row in matrix):
        raise UsageError("ragged matrix")
    if ncols < nrows + 1:
        raise UsageError("system needs at least one more column than rows")
    if ctx.is_exact:
        return _nullspace_exact([list(row) for row in matrix], ncols), None
    return _nullspace_float(matrix, nrows, ncols, ctx)


def _nullspace_exact(rows, ncols):
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(rows)):
            if not rows[i][c].is_zero:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, len(rows)):
            if rows[i][c].is_zero:
                continue
            factor = rows[i][c] / piv
            for j in range(c, ncols):
                rows[i][j] = rows[i][j] - factor * rows[r][j]
        pivots.append(c)
        r += 1
    free_cols = [c for c in range(ncols) if c not in pivots]
    target = free_cols[-1]
    v = [EX_ZERO] * ncols
    v[target] = EX_ONE
    for k in range(len(pivots) - 1, -1, -1):
        c = pivots[k]
        acc = EX_ZERO
        row = rows[k]
        for j in range(c + 1, ncols):
            if not v[j].is_zero and not row[j].is_zero:
                acc = acc + row[j] * v[j]
        v[c] = -acc / row[c]
    return v


def _nullspace_float(matrix, nrows, ncols, ctx: Context):
    mp = ctx.mp
    A = mp.matrix(nrows, ncols)
    for i in range(nrows):
        for j in range(ncols):
            A[i, j] = ctx.to_mpc(matrix[i][j])
    Q, _ = mp.qr(A.H, mode="full")
    v = [Q[i, ncols - 1] for i in range(ncols)]
    # deterministic phase: the largest entry becomes real positive
    imax = 0
    for i in range(1, ncols):
        if abs(v[i]) > abs(v[imax]):
            imax = i
    pivot = v[imax]
    if pivot != 0:
        phase = pivot / abs(pivot)
        v = [x / phase for x in v]
    residual = mp.mpf(0)
    for i in range(nrows):
        residual = max(residual, abs(sum(A[i, j] * v[j] for j in range(ncols))))
    return v, residual


# ---------------------------------------------------------------------------
# canonical normalized form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalForm:
    """Result of rescaling a polynomial into the normalized product form.

    ``stored = input / scale``.  When ``exact`` is False (exact mode only)
    the stored polynomial is monic and ``float_adjust`` is the extra float
    divisor taking it to the normalized form: canonical = stored / float_adjust.
    """

    stored: Polynomial
    scale: object
    root_set: RootSet
    exact: bool
    float_adjust: object = None

    def canonical_float_coeffs(self, ctx: Context):
        adj = self.float_adjust
        out = [ctx.to_mpc(c) for c in self.stored.coeffs]
        if adj is not None:
            out = [c / adj for c in out]
        return out


def canonicalize(p: Polynomial, ctx: Context) -> CanonicalForm:
    """Rescale ``p`` so each root contributes ``(z - r)`` if ``|r| <= 1``
    and ``(1 - z/r)`` otherwise.

    Boundary roots within the cluster radius of the unit circle count as
    inside.  In exact mode the rescaling stays exact whenever the required
    constant is itself complex-rational (all roots inside, all outside, or
    the inside factor reconstructible over the rationals); otherwise the
    stored polynomial is monic and the remaining float adjustment is
    recorded.
    """
    if p.is_zero:
        raise UsageError("cannot normalize the zero polynomial")
    mp = ctx.mp
    if p.degree == 0:
        one = Polynomial.one() if ctx.is_exact else Polynomial((mp.mpc(1),))
        return CanonicalForm(one, p.coeffs[0], RootSet(()), True)

    rs = roots(p, ctx)
    boundary = 1 + ctx.cluster_radius
    inside = [r for r in rs.roots if abs(r.value) <= boundary]
    outside = [r for r in rs.roots if abs(r.value) > boundary]

    if not ctx.is_exact:
        scale = p.leading()
        for r in outside:
            scale = scale * (-r.value) ** r.multiplicity
        return CanonicalForm(p.divide_scalar(scale), scale, rs, True)

    if not outside:
        scale = p.leading()
        return CanonicalForm(p.divide_scalar(scale), scale, rs, True)
    if not inside:
        scale = p(EX_ZERO)
        return CanonicalForm(p.divide_scalar(scale), scale, rs, True)

    split = _try_exact_inside_factor(p, inside, mp)
    if split is not None:
        q_out = split
        scale = q_out(EX_ZERO)
        return CanonicalForm(p.divide_scalar(scale), scale, rs, True)

    # mixed roots without a rational split: store monic, record the float
    # adjustment to the normalized representative
    scale = p.leading()
    adjust = mp.mpc(1)
    for r in outside:
        adjust = adjust * (-r.value) ** r.multiplicity
    return CanonicalForm(p.divide_scalar(scale), scale, rs, False, adjust)


def _try_exact_inside_factor(p: Polynomial, inside, mp):
    """Reconstruct the inside-root factor exactly, returning the cofactor.

    Float roots are rationalized and verified by exact division; any
    failure returns None.
    """
    factor = Polynomial.one()
    for r in inside:
        re = _rationalize_mpf(r.value.real, mp)
        im = _rationalize_mpf(r.value.imag, mp)
        if re is None or im is None:
            return None
        cand = Exact(re, im)
        linear = Polynomial((-cand, EX_ONE))
        for _ in range(r.multiplicity):
            factor = factor * linear
    quotient, remainder = p.divmod_by(factor)
    if not remainder.is_zero:
        return None
    return quotient


def _rationalize_mpf(x, mp, max_den=10 ** 18):
    sign, man, exp, _ = x._mpf_
    if man == 0:
        return Fraction(0)
    value = Fraction(man if not sign else -man)
    if exp >= 0:
        value *= Fraction(2) ** exp
    else:
        value /= Fraction(2) ** (-exp)
    cand = value.limit_denominator(max_den)
    err = abs(cand - value)
    if err > Fraction(1, 10 ** 12):
        return None
    return cand
