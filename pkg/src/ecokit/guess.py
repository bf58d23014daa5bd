"""Fit closed forms to integer sequences: rational functions and
polynomial equations P(z, F) = 0 satisfied by the generating function.

Candidates are solved for by exact linear algebra over the rationals on a
fitting window and then re-verified against every remaining term, so a
returned form is never a low-order coincidence with the data it was fitted
on.  Verification against finitely many terms is strong evidence, not a
proof; callers that need certainty must prove the form independently.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .qpoly import QPoly
from .ratfunc import RatFunc
from .series import TruncSeries


class GuessError(ValueError):
    """Raised when a fit is requested with too few terms."""


def _rref(rows):
    """Reduced row echelon form in place; returns pivot column list."""
    pivots = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = Fraction(1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def nullspace_basis(rows, ncols):
    """Basis of the kernel of the given row list (entries Fraction-like)."""
    if not rows:
        return [
            [Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)
        ]
    work = [[Fraction(x) for x in row] for row in rows]
    pivots = _rref(work)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for r, c in enumerate(pivots):
            vec[c] = -work[r][free]
        basis.append(vec)
    return basis


def _int_normalize(vec):
    """Scale a rational vector to coprime integers."""
    denom = lcm(*(f.denominator for f in vec)) if vec else 1
    ints = [int(f * denom) for f in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    return [v // g for v in ints] if g else ints


@dataclass(frozen=True)
class RationalGuess:
    """A fitted rational function plus how many held-out terms it matched."""

    func: RatFunc
    verified_terms: int

    @property
    def numerator(self):
        return self.func.num.coeffs

    @property
    def denominator(self):
        return self.func.den.coeffs

    def to_json_obj(self):
        return {
            "numerator": [str(c) for c in self.numerator],
            "denominator": [str(c) for c in self.denominator],
            "verified_terms": self.verified_terms,
        }


def guess_rational(terms, dmax=8, holdout=10):
    """Smallest rational function whose expansion matches every term.

    Degrees are swept in increasing numerator+denominator total, ties broken
    toward the smaller denominator degree; each candidate is fitted on a
    window of dp+dq+2 terms and must then reproduce all the others, of which
    at least `holdout` lie beyond any fitting window.  Returns None when
    nothing with degrees <= dmax survives.
    """
    terms = [Fraction(t) for t in terms]
    if len(terms) < 2 * dmax + holdout + 2:
        raise GuessError(
            f"need at least {2 * dmax + holdout + 2} terms "
            f"(dmax={dmax}, holdout={holdout}), got {len(terms)}"
        )
    for total in range(0, 2 * dmax + 1):
        for dq in range(0, min(total, dmax) + 1):
            dp = total - dq
            if dp > dmax:
                continue
            cand = _fit_rational(terms, dp, dq)
            if cand is not None:
                return RationalGuess(cand, len(terms) - (dp + dq + 2))
    return None


def _fit_rational(terms, dp, dq):
    # Kernel rows: sum_j q_j f_{i-j} = 0 for dp < i <= dp+dq+1.
    rows = []
    for i in range(dp + 1, dp + dq + 2):
        rows.append([terms[i - j] if i - j >= 0 else Fraction(0) for j in range(dq + 1)])
    for q in nullspace_basis(rows, dq + 1):
        if not q[0]:
            continue
        p = [
            sum(q[j] * terms[i - j] for j in range(min(i, dq) + 1))
            for i in range(dp + 1)
        ]
        cand = RatFunc(QPoly(p), QPoly(q))
        got = cand.expand(len(terms))
        if all(got[i] == terms[i] for i in range(len(terms))):
            return cand
    return None


@dataclass(frozen=True)
class AlgebraicRelation:
    """A polynomial identity sum_j C_j(z) * F(z)^j = 0 with integer C_j."""

    coeffs: tuple  # QPoly per power of F, index 0 = constant term

    @property
    def degree_f(self):
        return len(self.coeffs) - 1

    @property
    def degree_z(self):
        return max((c.degree for c in self.coeffs), default=-1)

    def grid(self):
        """Coefficient grid, one row of z-coefficients per power of F."""
        dz = self.degree_z
        return [
            [int(c[i]) for i in range(dz + 1)] for c in self.coeffs
        ]

    def residual(self, series: TruncSeries) -> TruncSeries:
        out = TruncSeries.zero(series.order)
        power = TruncSeries.one(series.order)
        for c in self.coeffs:
            out = out + power * TruncSeries.from_poly(c.coeffs[: series.order], series.order)
            power = power * series
        return out

    def holds_for(self, terms) -> bool:
        series = TruncSeries(tuple(Fraction(t) for t in terms))
        return self.residual(series).is_zero()

    def to_str(self, var="z", func="F"):
        parts = []
        for j, c in enumerate(self.coeffs):
            if c.degree < 0:
                continue
            poly = c.to_str(var)
            if j == 0:
                parts.append(f"({poly})" if c.degree > 0 else poly)
            else:
                fpow = func if j == 1 else f"{func}^{j}"
                if c.degree == 0 and c[0] == 1:
                    parts.append(fpow)
                elif c.degree == 0 and c[0] == -1:
                    parts.append(f"-{fpow}")
                elif c.degree == 0:
                    parts.append(f"{c[0]}*{fpow}")
                else:
                    parts.append(f"({poly})*{fpow}")
        return " + ".join(parts).replace("+ -", "- ") + " = 0"


@dataclass(frozen=True)
class AlgebraicGuess:
    relation: AlgebraicRelation
    verified_terms: int

    def to_json_obj(self):
        return {
            "grid": self.relation.grid(),
            "degree_z": self.relation.degree_z,
            "degree_f": self.relation.degree_f,
            "equation": self.relation.to_str(),
            "verified_terms": self.verified_terms,
        }


def guess_algebraic(terms, deg_z, deg_f, holdout=10):
    """Polynomial relation P(z, F) = 0 of bidegree <= (deg_z, deg_f).

    The kernel of the coefficient-extraction map is computed on all but the
    last `holdout` supplied terms, and a candidate is returned only when its
    residual also vanishes through the held-out ones.  The relation is
    integer, content-free, with positive leading coefficient in graded
    lexicographic order (F before z), and uses F with degree at least 1.
    """
    order = len(terms)
    if order < (deg_z + 1) * (deg_f + 1) + holdout:
        raise GuessError(
            f"need at least {(deg_z + 1) * (deg_f + 1) + holdout} terms "
            f"(bidegree ({deg_z},{deg_f}), holdout={holdout}), got {order}"
        )
    fit_order = order - holdout
    series = TruncSeries(tuple(Fraction(t) for t in terms))
    powers = [TruncSeries.one(order)]
    for _ in range(deg_f):
        powers.append(powers[-1] * series)
    cols = [(j, i) for j in range(deg_f + 1) for i in range(deg_z + 1)]
    rows = []
    for m in range(fit_order):
        row = []
        for j, i in cols:
            row.append(powers[j][m - i] if 0 <= m - i else Fraction(0))
        rows.append(row)
    for vec in nullspace_basis(rows, len(cols)):
        if not any(vec[idx] for idx, (j, _) in enumerate(cols) if j >= 1):
            continue
        ints = _int_normalize(vec)
        # Positive leading coefficient: graded lex with F > z.
        lead = max(
            (idx for idx in range(len(cols)) if ints[idx]),
            key=lambda idx: (cols[idx][1] + cols[idx][0], cols[idx][0]),
        )
        if ints[lead] < 0:
            ints = [-v for v in ints]
        coeffs = []
        for j in range(deg_f + 1):
            cs = [Fraction(ints[cols.index((j, i))]) for i in range(deg_z + 1)]
            coeffs.append(QPoly(cs))
        relation = AlgebraicRelation(coeffs=tuple(coeffs))
        if relation.holds_for(terms):
            return AlgebraicGuess(relation, holdout)
    return None


def minimal_algebraic(terms, max_total=8, holdout=10):
    """First relation found sweeping bidegrees by total, then by F-degree."""
    for total in range(1, 2 * max_total + 1):
        for df in range(1, min(total, max_total) + 1):
            dz = total - df
            if dz > max_total:
                continue
            if len(terms) < (dz + 1) * (df + 1) + holdout:
                continue
            rel = guess_algebraic(terms, dz, df, holdout)
            if rel is not None:
                return rel
    return None
