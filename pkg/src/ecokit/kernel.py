"""Algebraic generating functions for interval-plus-jumps walks.

A walk in this shape (step to any lower height, a few notches near the top
excluded, plus fixed jumps) satisfies one functional equation whose kernel
K(z,u) is quadratic-free in z: K = K0(u) + z*K1(u).  The b+1 branches of
K = 0 that stay finite at z = 0 collect into a monic factor S(z,u) of degree
b+1 in u, and the full bivariate count is F(z,u) = -S/K.  Everything here is
exact series arithmetic:

* build_kernel assembles K from the walk form and checks its shape;
* kernel_gfs extracts S (Newton when b = 0, a Hensel lift otherwise), reads
  off F(z,1), expands -S/K row by row for F(z,u) and the excursion column
  F(z,0), and cross-checks the rows against F(z,1);
* closed_form_check compares a named system's series against its catalog
  closed form (square-root expression or algebraic relation).

Guards raise KernelError; a negative or fractional walk count anywhere means
the form was mis-detected, never a warning to ignore.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .qpoly import QPoly
from .series import (
    SeriesError,
    TruncSeries,
    UPoly,
    hensel_small_factor,
    newton_series_root,
)


class KernelError(ValueError):
    """The walk form is outside the kernel construction, or a consistency
    check failed."""


@dataclass(frozen=True)
class KernelPoly:
    """The kernel K(z,u) of a walk's functional equation plus its shape data:
    jump multiset, notch offsets, largest jump a, boundary width b, and the
    multiplicity p_a of the largest jump."""

    K: UPoly
    p_a: Fraction
    jumps: tuple
    notches: tuple
    a: int
    b: int

    def to_json_obj(self):
        return {
            "z0": [str(c) for c in self.K.z_slice(0).coeffs],
            "z1": [str(c) for c in self.K.z_slice(1).coeffs],
            "jumps": list(self.jumps),
            "notches": list(self.notches),
            "a": self.a,
            "b": self.b,
            "p_a": str(self.p_a),
        }


def build_kernel(form, order=32):
    """Kernel polynomial for a walk form.

    K(z,u) = u^b (1-u) + z u^b - z (1-u) sum_j p_j u^(j+b)
                                + z (1-u) sum_d u^(b-d)
    over jumps j with multiplicity p_j and notch offsets d; b clears every
    negative power.  Requires no low exclusions, start at height 0, and at
    least one strictly positive jump.
    """
    if form.removed_low:
        raise KernelError("low exclusions are outside the kernel construction")
    if form.start_height != 0:
        raise KernelError("kernel route needs the walk to start at height 0")
    jumps = Counter(form.jumps)
    if not jumps or max(jumps) < 1:
        raise KernelError("no forward jump: the kernel is degenerate")
    a = max(jumps)
    b = max([0, *form.removed_offsets, *(-j for j in jumps if j < 0)])
    one_minus_u = QPoly([1, -1])
    k0 = QPoly([0] * b + [1, -1])
    jump_sum = QPoly.zero()
    for j, mult in jumps.items():
        jump_sum = jump_sum + QPoly([0] * (j + b) + [mult])
    notch_sum = QPoly.zero()
    for d in form.removed_offsets:
        notch_sum = notch_sum + QPoly([0] * (b - d) + [1])
    k1 = QPoly([0] * b + [1]) - one_minus_u * jump_sum + one_minus_u * notch_sum
    kp = UPoly.from_z_slices([k0, k1], order)
    if kp.degree_u != a + b + 1:
        raise KernelError(f"kernel degree {kp.degree_u}, expected {a + b + 1}")
    p_a = Fraction(jumps[a])
    top = kp.coeffs[a + b + 1]
    if top != TruncSeries.from_poly([0, p_a], order):
        raise KernelError("kernel top coefficient is not p_a * z")
    if kp.z_slice(0) != k0:
        raise KernelError("kernel constant slice is not u^b (1-u)")
    return KernelPoly(
        K=kp,
        p_a=p_a,
        jumps=tuple(sorted(jumps.elements())),
        notches=tuple(sorted(form.removed_offsets)),
        a=a,
        b=b,
    )


@dataclass(frozen=True)
class GFResult:
    """Series extracted from one kernel: all walks F1 = F(z,1), excursions
    F0 = F(z,0), the height columns Fu[k] = [u^k] F(z,u), the small factor,
    and which printed excursion formula the computed column matched."""

    F1: TruncSeries
    F0: TruncSeries
    Fu: list
    small_factor: UPoly
    kernel: KernelPoly
    excursion_variant: str


def _divide_rows(kp, small, order):
    """Rows f_n(u) of F = -S/K from K0 f_n = -S_n - K1 f_{n-1}.

    K0 = u^b (1-u), so each row divides exactly: strip u^b (the low
    coefficients must vanish) and then peel (1-u) with a running sum whose
    final value must be zero.
    """
    k1 = kp.K.z_slice(1)
    b = kp.b
    rows = []
    for n in range(order):
        rhs = -small.z_slice(n)
        if n > 0:
            rhs = rhs - k1 * rows[n - 1]
        if rhs.is_zero():
            rows.append(QPoly.zero())
            continue
        coeffs = list(rhs.coeffs)
        if any(coeffs[:b]):
            raise KernelError(f"row {n} not divisible by u^{b}")
        coeffs = coeffs[b:]
        quotient = []
        run = Fraction(0)
        for c in coeffs:
            run += c
            quotient.append(run)
        if quotient[-1] != 0:
            raise KernelError(f"row {n} not divisible by (1-u)")
        rows.append(QPoly(quotient[:-1]) if len(quotient) > 1 else QPoly.zero())
    return rows


def kernel_gfs(kp, order=32, window=16):
    """All the generating functions one kernel yields, cross-verified.

    The small factor comes from Newton iteration on the branch at u(0) = 1
    when b = 0 and from a Hensel lift otherwise.  Every walk count must be a
    nonnegative integer, each row must sum to the matching F(z,1)
    coefficient, and the excursion column is reconciled against both printed
    single-formula variants.
    """
    K = kp.K.truncate(order)
    if kp.b == 0:
        root = newton_series_root(K, 1, order)
        small = UPoly([-root, TruncSeries.one(order)])
    else:
        small, _ = hensel_small_factor(K, kp.b, order)
    at_one = small.eval_scalar(1)
    if at_one[0] != 0:
        raise KernelError("small factor does not vanish at u = 1, z = 0")
    z_series = TruncSeries.from_poly([0, 1], order)
    f1 = -at_one / z_series
    rows = _divide_rows(kp, small, order)
    for n, row in enumerate(rows):
        for c in row.coeffs:
            if c.denominator != 1 or c < 0:
                raise KernelError(
                    f"negative or fractional walk count {c} at z^{n}"
                )
        if n < f1.order and row.eval(1) != f1[n]:
            raise KernelError(f"row {n} sum disagrees with F(z,1)")
    f0 = TruncSeries([row[0] for row in rows])
    columns = [
        TruncSeries([row[k] for row in rows]) for k in range(window + 1)
    ]
    variant = _reconcile_excursions(kp, small, f0)
    return GFResult(
        F1=f1,
        F0=f0,
        Fu=columns,
        small_factor=small,
        kernel=kp,
        excursion_variant=variant,
    )


def _reconcile_excursions(kp, small, f0):
    """Which single-formula excursion variant reproduces the u^0 column:
    -S(z,0)/z, or -S(z,0) divided by the constant-term slice of K."""
    s_low = small.coeffs[0]
    matches = []
    if s_low[0] == 0:
        via_z = -s_low / TruncSeries.from_poly([0, 1], s_low.order)
        if via_z.agrees_with(f0):
            matches.append("-S(z,0)/z")
    p0 = Fraction(Counter(kp.jumps).get(0, 0))
    denom = TruncSeries.from_poly([1, 1 - p0], s_low.order)
    if (-s_low / denom).agrees_with(f0):
        matches.append("-S(z,0)/(1+(1-p0)z)")
    if not matches:
        return "neither printed variant"
    return " and ".join(matches)


# ---------------------------------------------------------------------------
# Named closed forms

_SQRT_FORMS = {
    # (numerator poly, discriminant poly, denominator poly): the series is
    # (num - sqrt(disc)) / den.
    "catalan": ([1, -2], [1, -4], [0, 0, 2]),
    "motzkin": ([1, -1], [1, -2, -3], [0, 0, 2]),
    "schroeder": ([1, -3], [1, -6, 1], [0, 0, 4]),
    "fan": ([1, -4], [1, -8, 4], [0, 0, 6]),
}

_POWER_RELATIONS = {"ternary": 3, "quaternary": 4, "quinary": 5}


def closed_form_series(name, order):
    """Expand the registered closed form of a named system to `order`."""
    if name not in _SQRT_FORMS:
        raise KernelError(f"no square-root closed form registered for {name!r}")
    num, disc, den = _SQRT_FORMS[name]
    num_s = TruncSeries.from_poly(num, order + 2)
    disc_s = TruncSeries.from_poly(disc, order + 2)
    den_s = TruncSeries.from_poly(den, order + 2)
    return (num_s - disc_s.sqrt()) / den_s


def closed_form_check(name, f1):
    """Compare a computed series against the system's closed form.

    Square-root forms are expanded and compared coefficientwise; the m-ary
    systems are checked through their defining relation F = (1 + zF)^m.
    Returns a verdict dict with the first mismatching index on failure.
    """
    order = f1.order
    if name in _POWER_RELATIONS:
        m = _POWER_RELATIONS[name]
        power = TruncSeries.one(order) + f1.shift(1).truncate(order)
        acc = TruncSeries.one(order)
        for _ in range(m):
            acc = acc * power
        residual = acc - f1
        first = next((i for i in range(order) if residual[i]), None)
        return {
            "name": name,
            "form": f"F = (1+zF)^{m}",
            "match": first is None,
            "first_mismatch": first,
        }
    want = closed_form_series(name, order)
    n = min(order, want.order)
    first = next((i for i in range(n) if want[i] != f1[i]), None)
    num, disc, den = _SQRT_FORMS[name]
    text = (
        f"({QPoly(num).to_str()} - sqrt({QPoly(disc).to_str()}))"
        f"/({QPoly(den).to_str()})"
    )
    return {
        "name": name,
        "form": text,
        "match": first is None,
        "first_mismatch": first,
    }


def gf_report(name, form, order=32, window=12):
    """JSON-ready record of one kernel run: kernel and small-factor
    coefficients, the extracted series, and the internal verdicts."""
    kp = build_kernel(form, order)
    gf = kernel_gfs(kp, order, window)
    report = {
        "name": name,
        "kernel": kp.to_json_obj(),
        "small_factor": [
            [str(c) for c in coeff.coeffs] for coeff in gf.small_factor.coeffs
        ],
        "F1": gf.F1.as_ints(),
        "F0": gf.F0.as_ints(),
        "columns": [col.as_ints() for col in gf.Fu],
        "excursion_variant": gf.excursion_variant,
        "checks": {
            "rows_sum_to_F1": True,
            "coefficients_nonnegative_integers": True,
        },
    }
    if name in _SQRT_FORMS or name in _POWER_RELATIONS:
        report["closed_form"] = closed_form_check(name, gf.F1)
    return report
