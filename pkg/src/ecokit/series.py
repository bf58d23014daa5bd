"""Truncated power series over exact rationals, and polynomials in u on top.

Everything here is exact: coefficients are `fractions.Fraction`, truncation
orders are tracked explicitly, and no floating point is ever involved.  A
`TruncSeries` of order N carries coefficients of z^0 .. z^(N-1) and makes no
claim beyond that, so binary operations return the shortest order that is
actually justified by the inputs (division additionally loses the valuation
of the divisor).

`UPoly` is a polynomial in a second variable u whose coefficients are
truncated series in z.  It is what kernel-method computations work with:
Newton iteration finds the power-series root of the unit branch, and Hensel
lifting splits off the monic small factor carrying all branches finite at
z = 0.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from .qpoly import QPoly


class SeriesError(ValueError):
    """Domain failure in series arithmetic (valuation, square root, lifting)."""


def _frac_list(values):
    return [Fraction(v) for v in values]


class TruncSeries:
    """Power series known modulo z^order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(_frac_list(coeffs))
        if not self.coeffs:
            raise SeriesError("series needs order at least 1")

    @property
    def order(self):
        return len(self.coeffs)

    @classmethod
    def zero(cls, order):
        return cls([0] * order)

    @classmethod
    def one(cls, order):
        return cls([1] + [0] * (order - 1))

    @classmethod
    def from_poly(cls, coeffs, order):
        """Series of a polynomial: exact zeros pad up to the requested order."""
        coeffs = _frac_list(coeffs)
        if len(coeffs) > order:
            raise SeriesError("polynomial degree exceeds requested order")
        return cls(coeffs + [Fraction(0)] * (order - len(coeffs)))

    def truncate(self, order):
        if order > self.order:
            raise SeriesError("cannot extend a truncated series")
        return TruncSeries(self.coeffs[:order])

    def __getitem__(self, n):
        if not 0 <= n < self.order:
            raise IndexError(f"coefficient z^{n} beyond truncation order {self.order}")
        return self.coeffs[n]

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def agrees_with(self, other):
        """Equality on the common prefix of the two truncations."""
        n = min(self.order, other.order)
        return self.coeffs[:n] == other.coeffs[:n]

    def valuation(self):
        """Index of the first nonzero known coefficient, or None if all vanish."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return None

    def is_zero(self):
        return self.valuation() is None

    def __add__(self, other):
        n = min(self.order, other.order)
        return TruncSeries([self.coeffs[i] + other.coeffs[i] for i in range(n)])

    def __sub__(self, other):
        n = min(self.order, other.order)
        return TruncSeries([self.coeffs[i] - other.coeffs[i] for i in range(n)])

    def __neg__(self):
        return TruncSeries([-c for c in self.coeffs])

    def scale(self, c):
        c = Fraction(c)
        return TruncSeries([a * c for a in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        n = min(self.order, other.order)
        out = [Fraction(0)] * n
        for i in range(n):
            a = self.coeffs[i]
            if a:
                for j in range(n - i):
                    b = other.coeffs[j]
                    if b:
                        out[i + j] += a * b
        return TruncSeries(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division; requires valuation(self) >= valuation(other).

        The result order is min(order) - valuation(other): cancelling z^v
        genuinely costs v known coefficients on both sides.
        """
        v = other.valuation()
        if v is None:
            raise SeriesError("division by a series that vanishes to its full order")
        if v > 0:
            for i in range(min(v, self.order)):
                if self.coeffs[i]:
                    raise SeriesError(
                        f"division by higher valuation: z^{i} present, divisor starts at z^{v}"
                    )
        n = min(self.order, other.order) - v
        if n <= 0:
            raise SeriesError("no coefficients survive the valuation shift")
        a = self.coeffs[v : v + n]
        b = other.coeffs[v : v + n]
        inv0 = 1 / b[0]
        out = []
        for i in range(n):
            acc = a[i] if i < len(a) else Fraction(0)
            for j in range(1, i + 1):
                if b[j]:
                    acc -= b[j] * out[i - j]
            out.append(acc * inv0)
        return TruncSeries(out)

    def inverse(self):
        return TruncSeries.one(self.order) / self

    def shift(self, j):
        """Multiply by z^j (j >= 0 prepends exact zeros, order grows with it)."""
        if j < 0:
            raise SeriesError("use division for negative shifts")
        return TruncSeries((Fraction(0),) * j + self.coeffs)

    def sqrt(self):
        """Square root on the branch with positive constant term."""
        c0 = self.coeffs[0]
        if c0 <= 0:
            raise SeriesError("square root needs a positive constant term")
        p, q = c0.numerator, c0.denominator
        rp, rq = isqrt(p), isqrt(q)
        if rp * rp != p or rq * rq != q:
            raise SeriesError(f"constant term {c0} is not the square of a rational")
        s0 = Fraction(rp, rq)
        out = [s0]
        inv = 1 / (2 * s0)
        for n in range(1, self.order):
            acc = self.coeffs[n]
            for i in range(1, n):
                acc -= out[i] * out[n - i]
            out.append(acc * inv)
        return TruncSeries(out)

    def eval_poly(self):
        """The coefficients as a QPoly, valid when the tail truly vanishes."""
        return QPoly(self.coeffs)

    def as_ints(self):
        """Coefficient list as ints; fails loudly on a non-integer coefficient."""
        out = []
        for c in self.coeffs:
            if c.denominator != 1:
                raise SeriesError(f"non-integer coefficient {c}")
            out.append(c.numerator)
        return out

    def __repr__(self):
        shown = ", ".join(str(c) for c in self.coeffs[:8])
        tail = ", ..." if self.order > 8 else ""
        return f"TruncSeries([{shown}{tail}] mod z^{self.order})"


class LaurentU:
    """Finite Laurent polynomial in u with rational coefficients.

    Exponents may be negative; the kernel construction shifts everything by
    u^b before it ever leaves this type.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for e, c in terms.items():
                c = Fraction(c)
                if c:
                    self.terms[e] = self.terms.get(e, Fraction(0)) + c
            self.terms = {e: c for e, c in self.terms.items() if c}

    def add_term(self, exponent, coeff):
        out = dict(self.terms)
        c = out.get(exponent, Fraction(0)) + Fraction(coeff)
        if c:
            out[exponent] = c
        else:
            out.pop(exponent, None)
        return LaurentU(out)

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return LaurentU(out)

    def __sub__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) - c
        return LaurentU(out)

    def shift(self, j):
        """Multiply by u^j."""
        return LaurentU({e + j: c for e, c in self.terms.items()})

    def min_exponent(self):
        return min(self.terms) if self.terms else 0

    def to_qpoly(self):
        if self.terms and min(self.terms) < 0:
            raise SeriesError("Laurent part still present, shift before converting")
        deg = max(self.terms, default=0)
        coeffs = [Fraction(0)] * (deg + 1)
        for e, c in self.terms.items():
            coeffs[e] = c
        return QPoly(coeffs)


class UPoly:
    """Polynomial in u whose coefficients are truncated series in z."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        if not coeffs:
            raise SeriesError("UPoly needs at least one coefficient")
        order = min(c.order for c in coeffs)
        coeffs = [c.truncate(order) for c in coeffs]
        while len(coeffs) > 1 and coeffs[-1].is_zero():
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @classmethod
    def from_z_slices(cls, slices, order):
        """Build from z-power slices: slices[m] is the u-polynomial at z^m."""
        deg = max((s.degree for s in slices), default=0)
        cols = []
        for j in range(deg + 1):
            cols.append(TruncSeries([slices[m][j] if m < len(slices) else 0 for m in range(order)]))
        return cls(cols)

    @property
    def degree_u(self):
        return len(self.coeffs) - 1

    @property
    def order(self):
        return self.coeffs[0].order

    def truncate(self, order):
        return UPoly([c.truncate(order) for c in self.coeffs])

    def z_slice(self, m):
        """Coefficient of z^m, as a polynomial in u."""
        return QPoly([c[m] for c in self.coeffs])

    def eval_series(self, u):
        """Substitute a series for u (Horner)."""
        order = min(self.order, u.order)
        acc = TruncSeries.zero(order)
        for c in reversed(self.coeffs):
            acc = acc * u + c.truncate(order)
        return acc

    def eval_scalar(self, x):
        """Substitute a rational constant for u."""
        x = Fraction(x)
        acc = TruncSeries.zero(self.order)
        for c in reversed(self.coeffs):
            acc = acc.scale(x) + c
        return acc

    def derivative_u(self):
        if self.degree_u == 0:
            return UPoly([TruncSeries.zero(self.order)])
        return UPoly([c.scale(i) for i, c in enumerate(self.coeffs)][1:])

    def __mul__(self, other):
        order = min(self.order, other.order)
        out = [TruncSeries.zero(order) for _ in range(self.degree_u + other.degree_u + 1)]
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a.truncate(order) * b.truncate(order)
        return UPoly(out)

    def __sub__(self, other):
        order = min(self.order, other.order)
        n = max(self.degree_u, other.degree_u) + 1
        zero = TruncSeries.zero(order)
        out = []
        for i in range(n):
            a = self.coeffs[i].truncate(order) if i <= self.degree_u else zero
            b = other.coeffs[i].truncate(order) if i <= other.degree_u else zero
            out.append(a - b)
        return UPoly(out)

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def __repr__(self):
        return f"UPoly(degree_u={self.degree_u}, order={self.order})"


def newton_series_root(kernel: UPoly, seed, order) -> TruncSeries:
    """Power-series root u(z) of kernel(z, u) = 0 with u(0) = seed.

    The seed must be a simple root of kernel(0, u).  Precision doubles per
    Newton step and a final full substitution verifies the result.
    """
    seed = Fraction(seed)
    k0 = kernel.z_slice(0)
    if k0.eval(seed) != 0:
        raise SeriesError(f"seed {seed} is not a root of the kernel at z = 0")
    if k0.derivative().eval(seed) == 0:
        raise SeriesError(f"seed {seed} is a multiple root, Newton cannot start")
    deriv = kernel.derivative_u()
    u = TruncSeries([seed])
    while u.order < order:
        m = min(2 * u.order, order)
        cur = TruncSeries(u.coeffs + (Fraction(0),) * (m - u.order))
        ku = kernel.truncate(m).eval_series(cur)
        kpu = deriv.truncate(m).eval_series(cur)
        u = cur - ku / kpu
    residue = kernel.truncate(order).eval_series(u)
    if not residue.is_zero():
        raise SeriesError("Newton iteration failed to verify the root")
    return u


def hensel_small_factor(kernel: UPoly, b: int, order: int):
    """Split kernel = S * T mod z^order with S monic of degree b + 1.

    Requires kernel(0, u) = u^b (1 - u); then S(0, u) = u^b (u - 1) and
    T(0, u) = -1, which are coprime, so the factorization lifts order by
    order.  S carries exactly the b + 1 branches finite at z = 0.
    """
    k0 = kernel.z_slice(0)
    s0 = QPoly([0] * b + [-1, 1])  # u^b (u - 1)
    if k0 != -s0:
        raise SeriesError("kernel at z = 0 is not u^b (1 - u); lifting precondition fails")
    t0 = QPoly([-1])
    s_slices = [s0]
    t_slices = [t0]
    k_slices = [kernel.z_slice(m) for m in range(order)]
    for m in range(1, order):
        e = k_slices[m]
        for i in range(1, m):
            e = e - s_slices[i] * t_slices[m - i]
        quot, rem = divmod(e, s0)
        # S0 * T_m + T0 * S_m = E  with T0 = -1 gives S_m = -rem, T_m = quot.
        s_slices.append(-rem)
        t_slices.append(quot)
    small = UPoly.from_z_slices(s_slices, order)
    cofactor = UPoly.from_z_slices(t_slices, order)
    if not (kernel.truncate(order) - small * cofactor).is_zero():
        raise SeriesError("Hensel lift failed verification")
    return small, cofactor
