"""Structural analysis of rewriting systems.

Each criterion here inspects the rule set itself, not the numbers it
produces, and emits a closed-form generating function when the structure
supports one:

* finite label set          -> exact rational solve of the level-count system;
* affine label sum          -> order-2 rational form (child-count mode only);
* parity-split label sum    -> order-3 rational form;
* interval-plus-jumps shape -> walk reformulation for the algebraic route;
* bounded-plus-jumps shape  -> flagged, rational form fitted and re-verified;
* linear label growth       -> slope certificate for the propagation bound;
* shrinking-return count    -> zero-radius divergence certificate.

Symbolic arguments work per residue class of the label, which keeps every
piece affine; anything outside that fragment yields an honest "inconclusive"
rather than a claim.  Every closed form is re-expanded and compared against
direct propagation before it is reported.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, lcm

from .dsl import (
    Affine,
    Builtin,
    EcoSpec,
    Guard,
    Interval,
    Item,
    RuleClause,
    _interval_tail,
    expr_affine,
    reachable_probe,
    successors,
)
from .engine import total_series
from .guess import guess_rational
from .qpoly import QPoly
from .ratfunc import RatFunc


class ClassifyError(ValueError):
    """An internal consistency check failed while classifying."""


# ---------------------------------------------------------------------------
# Reachable labels and the finite-label rational solve


def reachable_labels(spec, cutoff=500):
    """Closure of {axiom} under the successor map, or None once more than
    `cutoff` distinct labels have appeared."""
    seen = {spec.axiom}
    frontier = [spec.axiom]
    while frontier:
        k = frontier.pop()
        for j in successors(spec, k):
            if j not in seen:
                seen.add(j)
                if len(seen) > cutoff:
                    return None
                frontier.append(j)
    return frozenset(seen)


def transition_matrix(spec, labels):
    """pi[j][k]: how many k-successors a node labeled j has.

    Requires the label set to be closed; in child-count mode each row must
    sum to its own label.
    """
    pi = {}
    for j in sorted(labels):
        row = successors(spec, j)
        stray = [k for k in row if k not in labels]
        if stray:
            raise ClassifyError(f"label {stray[0]} leaves the given label set")
        if spec.mode == "eco" and sum(row.values()) != j:
            raise ClassifyError(f"label {j} does not have {j} successors")
        pi[j] = row
    return pi


def _solve_poly_system(rows, d):
    # Fraction-free elimination keeps every entry a polynomial; the exact
    # divisions below cannot leave remainders when the input rows do not.
    prev = QPoly.one()
    for col in range(d):
        if rows[col][col].is_zero():
            swap = next(
                (r for r in range(col + 1, d) if not rows[r][col].is_zero()), None
            )
            if swap is None:
                raise ClassifyError("singular level-count system")
            rows[col], rows[swap] = rows[swap], rows[col]
        for r in range(col + 1, d):
            for c in range(col + 1, d + 1):
                num = rows[r][c] * rows[col][col] - rows[r][col] * rows[col][c]
                q, rem = divmod(num, prev)
                if not rem.is_zero():
                    raise ClassifyError("fraction-free elimination failed")
                rows[r][c] = q
            rows[r][col] = QPoly.zero()
        prev = rows[col][col]
    sol = [None] * d
    for i in range(d - 1, -1, -1):
        acc = RatFunc(rows[i][d], QPoly.one())
        for j in range(i + 1, d):
            acc = acc - RatFunc(rows[i][j], QPoly.one()) * sol[j]
        sol[i] = acc / RatFunc(rows[i][i], QPoly.one())
    return sol


def rational_from_finite(spec, cutoff=500):
    """Exact totals generating function when finitely many labels occur.

    The per-label level counts x_k(z) satisfy
        x_k = [k = axiom] + z * sum_j pi[j][k] x_j,
    a finite linear system solved here over polynomials; the summed solution
    is re-expanded and checked against direct propagation before returning.
    """
    labels = reachable_labels(spec, cutoff)
    if labels is None:
        raise ClassifyError(f"more than {cutoff} labels reachable")
    ordered = sorted(labels)
    idx = {k: i for i, k in enumerate(ordered)}
    d = len(ordered)
    pi = transition_matrix(spec, labels)
    z = QPoly.x()
    rows = [[QPoly.zero() for _ in range(d + 1)] for _ in range(d)]
    for k, i in idx.items():
        rows[i][i] = rows[i][i] + QPoly.one()
        for j, jj in idx.items():
            c = pi[j].get(k, 0)
            if c:
                rows[i][jj] = rows[i][jj] - z * QPoly([Fraction(c)])
        if k == spec.axiom:
            rows[i][d] = QPoly.one()
    sol = _solve_poly_system(rows, d)
    total = RatFunc(QPoly.zero(), QPoly.one())
    for x in sol:
        total = total + x
    check = 2 * max(total.num.degree, total.den.degree, 1) + 5
    if tuple(total.expand(check).as_ints()) != tuple(total_series(spec, check)):
        raise ClassifyError("finite-label solve disagrees with propagation")
    return total


# ---------------------------------------------------------------------------
# Residue-class view of the rule tail

F0 = Fraction(0)


@dataclass(frozen=True)
class _TailClass:
    modulus: int
    residue: int
    clause: RuleClause
    threshold: int


def _tail_classes(spec):
    """Split large labels into residue classes, each owned by one clause.

    Returns (modulus, [per-class records]) with the list empty when every
    clause is bounded, or None when the tail resists this splitting
    (pow2/prime guards, overlapping or missing coverage).
    """
    unbounded = [
        c for c in spec.clauses if not any(a.kind == "le" for a in c.guard.atoms)
    ]
    if not unbounded:
        return 2, []
    modulus = 2
    for clause in unbounded:
        for a in clause.guard.atoms:
            if a.kind in ("pow2", "prime"):
                return None
            if a.kind == "mod":
                modulus = lcm(modulus, a.m)
        for iv in clause.intervals:
            modulus = lcm(modulus, 2 * iv.step)
    out = []
    for residue in range(modulus):
        owners = [
            c
            for c in unbounded
            if all(
                residue % a.m == a.r for a in c.guard.atoms if a.kind == "mod"
            )
        ]
        if len(owners) != 1:
            return None
        clause = owners[0]
        floor = 1 if spec.mode == "eco" else 0
        for a in clause.guard.atoms:
            if a.kind == "ge":
                floor = max(floor, a.c)
        out.append(_TailClass(modulus, residue, clause, floor))
    return modulus, out


def _class_label_sum(clause, modulus, residue):
    """Affine (slope, intercept) of the successor label sum on one residue
    class, with its validity threshold, or (None, t) when not affine."""
    quad = [F0, F0, F0]  # k^2, k, 1
    bcoeffs = Counter()
    threshold = 1
    for item in clause.items:
        mu = expr_affine(item.mult)
        if mu is None:
            return None, threshold
        la = expr_affine(item.label)
        if la is None:
            if mu[0] != 0:
                return None, threshold
            bcoeffs[item.label] += Fraction(mu[1])
        else:
            quad[0] += Fraction(la[0] * mu[0])
            quad[1] += Fraction(la[0] * mu[1] + la[1] * mu[0])
            quad[2] += Fraction(la[1] * mu[1])
    for iv in clause.intervals:
        tail = _interval_tail(iv, modulus, residue)
        if tail is None:
            return None, threshold
        threshold = max(threshold, tail.threshold)
        la, lb = tail.lo
        fa, fb = tail.full_count
        s = Fraction(tail.step)
        # Arithmetic-progression sum: count*first + step*count*(count-1)/2.
        quad[0] += fa * la + s * fa * fa / 2
        quad[1] += fa * lb + fb * la + s * (2 * fa * fb - fa) / 2
        quad[2] += fb * lb + s * (fb * fb - fb) / 2
        for ra, rb in tail.removed:
            quad[1] -= ra
            quad[2] -= rb
    # The two half-sums of an even split recombine into an affine form minus
    # the next prime: low(t) + high(t) = 2t + 3 - next_prime(t).
    for bt in [b for b in bcoeffs if b.name == "goldbach_low"]:
        mate = Builtin("goldbach_high", bt.args)
        c = bcoeffs[bt]
        if c and bcoeffs.get(mate) == c:
            arg = expr_affine(bt.args[0])
            if arg is not None:
                del bcoeffs[bt]
                del bcoeffs[mate]
                quad[1] += 2 * c * arg[0]
                quad[2] += c * (2 * arg[1] + 3)
                bcoeffs[Builtin("next_prime", bt.args)] -= c
    if any(bcoeffs.values()) or quad[0]:
        return None, threshold
    return (quad[1], quad[2]), threshold


def _class_odd_count(clause, modulus, residue):
    """Affine (slope, intercept) of how many successor labels are odd, with
    multiplicity, on one residue class; None when parity is opaque."""
    aff = [F0, F0]
    threshold = 1
    for item in clause.items:
        la = expr_affine(item.label)
        mu = expr_affine(item.mult)
        if la is None or mu is None:
            return None, threshold
        if (la[0] * residue + la[1]) % 2:
            aff[0] += Fraction(mu[0])
            aff[1] += Fraction(mu[1])
    for iv in clause.intervals:
        tail = _interval_tail(iv, modulus, residue)
        if tail is None:
            return None, threshold
        threshold = max(threshold, tail.threshold)
        la, lb = tail.lo
        fa, fb = tail.full_count
        s = tail.step
        low_odd = int(la * residue + lb) % 2
        if s % 2 == 0:
            # One fixed parity along the whole progression.
            if low_odd:
                aff[0] += fa
                aff[1] += fb
        else:
            # Alternating parities; the count's own parity is fixed on the
            # class, which makes the halved counts affine.
            count_par = int(fa * residue + fb) % 2
            if low_odd:
                aff[0] += fa / 2
                aff[1] += (fb + count_par) / 2
            else:
                aff[0] += fa / 2
                aff[1] += (fb - count_par) / 2
        for ra, rb in tail.removed:
            if int(ra * residue + rb) % 2:
                aff[1] -= 1
    return (aff[0], aff[1]), threshold


# ---------------------------------------------------------------------------
# Affine label sum -> order-2 rational form


@dataclass(frozen=True)
class AffineSigma:
    """Witness that the successor label sum is alpha*k + beta on every
    reachable label."""

    alpha: Fraction
    beta: Fraction


def _label_sum_at(spec, k):
    return sum(v * c for v, c in successors(spec, k).items())


def affine_sigma(spec, probe=200):
    """AffineSigma for the spec, or None.

    Proved symbolically on each tail residue class and then checked exactly
    on every reachable label up to `probe` (which also covers the labels
    that only bounded clauses reach).
    """
    cover = _tail_classes(spec)
    if cover is None:
        return None
    modulus, classes = cover
    if classes:
        pairs = set()
        for tc in classes:
            pair, _ = _class_label_sum(tc.clause, modulus, tc.residue)
            if pair is None:
                return None
            pairs.add(pair)
        if len(pairs) != 1:
            return None
        alpha, beta = pairs.pop()
    else:
        labels = reachable_labels(spec, probe)
        if not labels:
            return None
        ordered = sorted(labels)
        sums = {k: Fraction(_label_sum_at(spec, k)) for k in ordered}
        if len(ordered) == 1:
            k0 = ordered[0]
            alpha = sums[k0] / k0 if k0 else F0
            beta = sums[k0] - alpha * k0
        else:
            k0, k1 = ordered[0], ordered[1]
            alpha = (sums[k1] - sums[k0]) / (k1 - k0)
            beta = sums[k0] - alpha * k0
    witness = AffineSigma(alpha, beta)
    for k in reachable_probe(spec, probe):
        if _label_sum_at(spec, k) != alpha * k + beta:
            return None
    return witness


def rational_gf_affine(witness, s0):
    """Totals generating function under an affine label sum, for systems in
    child-count mode (next level's node count equals this level's label sum):
    (1 + (s0 - alpha) z) / (1 - alpha z - beta z^2)."""
    num = QPoly([Fraction(1), Fraction(s0) - witness.alpha])
    den = QPoly([Fraction(1), -witness.alpha, -witness.beta])
    return RatFunc(num, den)


# ---------------------------------------------------------------------------
# Parity-split label sum -> order-3 rational form


@dataclass(frozen=True)
class ParityWitness:
    """Label sum alpha*k + beta_even / beta_odd by label parity, with a fixed
    number of odd labels on every right-hand side."""

    alpha: Fraction
    beta_even: Fraction
    beta_odd: Fraction
    odd_per_rule: int
    s0: int
    s1: int


def parity_affine(spec, probe=200):
    """ParityWitness for the spec, or None (child-count mode only)."""
    if spec.mode != "eco":
        return None
    cover = _tail_classes(spec)
    if cover is None:
        return None
    modulus, classes = cover
    if not classes:
        return None
    alphas = set()
    betas = {0: set(), 1: set()}
    odd_counts = set()
    for tc in classes:
        pair, _ = _class_label_sum(tc.clause, modulus, tc.residue)
        odd, _ = _class_odd_count(tc.clause, modulus, tc.residue)
        if pair is None or odd is None or odd[0] != 0:
            return None
        alphas.add(pair[0])
        betas[tc.residue % 2].add(pair[1])
        odd_counts.add(odd[1])
    if (
        len(alphas) != 1
        or len(betas[0]) != 1
        or len(betas[1]) != 1
        or len(odd_counts) != 1
    ):
        return None
    m = odd_counts.pop()
    if m.denominator != 1 or m < 0:
        return None
    witness = ParityWitness(
        alphas.pop(),
        betas[0].pop(),
        betas[1].pop(),
        int(m),
        spec.axiom,
        int(_label_sum_at(spec, spec.axiom)),
    )
    for k in reachable_probe(spec, probe):
        succ = successors(spec, k)
        want = witness.alpha * k + (witness.beta_odd if k % 2 else witness.beta_even)
        if sum(v * c for v, c in succ.items()) != want:
            return None
        if sum(c for v, c in succ.items() if v % 2) != witness.odd_per_rule:
            return None
    return witness


def rational_gf_parity(w):
    """Totals generating function under a parity-split affine label sum:
    the three-term recurrence the split induces, solved in closed form."""
    num = QPoly(
        [
            Fraction(1),
            Fraction(w.s0) - w.alpha,
            Fraction(w.s1) - w.alpha * w.s0 - w.beta_even,
        ]
    )
    den = QPoly(
        [
            Fraction(1),
            -w.alpha,
            -w.beta_even,
            -w.odd_per_rule * (w.beta_odd - w.beta_even),
        ]
    )
    return RatFunc(num, den)


# ---------------------------------------------------------------------------
# Interval-plus-jumps (walk) shape


@dataclass(frozen=True)
class WalkForm:
    """Successor structure "interval up to k-1, with notches, plus jumps".

    successors(k) = {base..k-1}
                    minus {k-d : d in removed_offsets}
                    minus {base+c : c in removed_low}
                    plus the multiset {k+j : j in jumps}.

    Heights are labels shifted down by base, so walks start at start_height.
    """

    base: int
    jumps: tuple
    removed_offsets: frozenset
    removed_low: frozenset
    start_height: int
    mode: str

    @property
    def max_jump(self):
        return max(self.jumps) if self.jumps else None

    @property
    def back_width(self):
        """How far below the current label the structure can distinguish:
        the deepest notch or the deepest downward jump."""
        down = list(self.removed_offsets)
        down += [-j for j in self.jumps if j < 0]
        return max([0, *down])

    def to_json_obj(self):
        return {
            "base": self.base,
            "jumps": list(self.jumps),
            "removed_offsets": sorted(self.removed_offsets),
            "removed_low": sorted(self.removed_low),
            "start_height": self.start_height,
            "max_jump": self.max_jump,
            "back_width": self.back_width,
        }


def form_successors(form, k):
    """Successor multiset the walk form predicts for a node labeled k."""
    removed = {k - d for d in form.removed_offsets}
    removed |= {form.base + c for c in form.removed_low}
    out = Counter(v for v in range(form.base, k) if v not in removed)
    for j in form.jumps:
        out[k + j] += 1
    return out


def factorial_form(spec, verify_to=100):
    """Recognize the interval-plus-jumps shape, or None.

    The single clause must expand one step-1 interval from a fixed base up
    to k plus a constant, minus constant labels or fixed-offset notches,
    together with fixed jumps of constant multiplicity.  The recognized form
    is re-expanded against the spec for every guarded label up to
    `verify_to` before it is returned.
    """
    if len(spec.clauses) != 1:
        return None
    clause = spec.clauses[0]
    if any(a.kind != "ge" for a in clause.guard.atoms):
        return None
    if len(clause.intervals) != 1 or clause.intervals[0].step != 1:
        return None
    iv = clause.intervals[0]
    lo = expr_affine(iv.lo)
    hi = expr_affine(iv.hi)
    if lo is None or hi is None or lo[0] != 0 or hi[0] != 1 or lo[1] < 0:
        return None
    base, h = lo[1], hi[1]
    jumps = Counter()
    if h >= 0:
        for t in range(h + 1):
            jumps[t] += 1
    offsets = set(range(1, -h)) if h < 0 else set()
    low = set()
    for e in iv.minus:
        aff = expr_affine(e)
        if aff is None:
            return None
        a, t = aff
        if a == 0:
            if t >= base:
                low.add(t - base)
        elif a == 1:
            if t >= 0:
                # A notch inside the top block cancels that jump slot; above
                # the block it never lands, so it is a no-op.
                if t <= h and jumps[t] > 0:
                    jumps[t] -= 1
            else:
                offsets.add(-t)
        else:
            return None
    for item in clause.items:
        la = expr_affine(item.label)
        mu = expr_affine(item.mult)
        if la is None or mu is None or la[0] != 1 or mu[0] != 0 or mu[1] < 0:
            return None
        jumps[la[1]] += mu[1]
    start = spec.axiom - base
    if start < 0:
        return None
    form = WalkForm(
        base=base,
        jumps=tuple(sorted(jumps.elements())),
        removed_offsets=frozenset(offsets),
        removed_low=frozenset(low),
        start_height=start,
        mode=spec.mode,
    )
    floor = 1 if spec.mode == "eco" else 0
    for a in clause.guard.atoms:
        floor = max(floor, a.c)
    for k in range(floor, verify_to + 1):
        if form_successors(form, k) != successors(spec, k):
            return None
    return form


def to_walk_spec(form, name="walk"):
    """The walk form as a spec over heights (labels shifted down by base)."""
    minus = tuple(Affine(1, -d) for d in sorted(form.removed_offsets))
    minus += tuple(Affine(0, c) for c in sorted(form.removed_low))
    interval = Interval(Affine(0, 0), Affine(1, -1), 1, minus)
    items = tuple(
        Item(Affine(1, j), Affine(0, c))
        for j, c in sorted(Counter(form.jumps).items())
    )
    clause = RuleClause(Guard(), items, (interval,))
    return EcoSpec(name, "walk", form.start_height, (clause,))


# ---------------------------------------------------------------------------
# Bounded-plus-jumps shape (flag only; rational form comes from fitting)


@dataclass(frozen=True)
class BoundedPlusJumps:
    """Every right-hand side is bounded labels plus the same fixed upward
    jumps; `bound` caps the axiom and every non-jump label."""

    jumps: tuple
    bound: int


def bounded_plus_jumps(spec):
    """BoundedPlusJumps witness, or None (child-count mode only)."""
    if spec.mode != "eco":
        return None
    shared = None
    bound = spec.axiom
    for clause in spec.clauses:
        jumps = Counter()
        for item in clause.items:
            la = expr_affine(item.label)
            mu = expr_affine(item.mult)
            if la is None or mu is None:
                return None
            a, t = la
            if a == 0:
                bound = max(bound, t)
            elif a == 1 and t >= 1 and mu[0] == 0 and mu[1] >= 1:
                jumps[t] += mu[1]
            else:
                return None
        for iv in clause.intervals:
            lo = expr_affine(iv.lo)
            hi = expr_affine(iv.hi)
            if lo is None or hi is None or lo[0] != 0 or hi[0] != 0:
                return None
            bound = max(bound, hi[1])
        key = tuple(sorted(jumps.elements()))
        if shared is None:
            shared = key
        elif shared != key:
            return None
    if not shared:
        return None
    return BoundedPlusJumps(shared, bound)


# ---------------------------------------------------------------------------
# Linear label growth


@dataclass(frozen=True)
class LinearBound:
    certified: bool
    slope: int | None


def linear_bound_check(spec):
    """Certify that labels grow at most linearly with the level.

    The certificate is a constant cap on every upward jump; label doubling,
    prime-stepping and other unbounded jumps come back uncertified."""
    best = 0
    for clause in spec.clauses:
        for item in clause.items:
            la = expr_affine(item.label)
            if la is None:
                bt = item.label
                if bt.name != "ceil_div":
                    return LinearBound(False, None)
                arg = expr_affine(bt.args[0])
                den = expr_affine(bt.args[1])
                if (
                    arg is None
                    or den is None
                    or arg[0] != 1
                    or den[0] != 0
                    or den[1] < 2
                ):
                    return LinearBound(False, None)
                best = max(best, arg[1], 0)
            else:
                a, t = la
                if a >= 2:
                    return LinearBound(False, None)
                if a == 1:
                    best = max(best, t)
        for iv in clause.intervals:
            hi = expr_affine(iv.hi)
            if hi is None or hi[0] >= 2:
                return LinearBound(False, None)
            if hi[0] == 1:
                best = max(best, hi[1])
    return LinearBound(True, max(best, 0))


# ---------------------------------------------------------------------------
# Zero-radius certificate


@dataclass(frozen=True)
class RadiusVerdict:
    """Result of the shrinking-return test.

    `holds` certifies that, counting successors landing at or above k - b
    (b = back_width), every rule keeps at least slope*k + O(1) of them, a
    count that never decreases and grows without bound; totals then outgrow
    every exponential and the totals series has zero radius of convergence.
    """

    holds: bool
    back_width: int | None
    slope: Fraction | None
    classes: tuple
    probe: tuple
    reason: str

    def to_json_obj(self):
        return {
            "holds": self.holds,
            "back_width": self.back_width,
            "slope": None if self.slope is None else str(self.slope),
            "classes": list(self.classes),
            "probe": [list(p) for p in self.probe],
            "reason": self.reason,
        }


def _class_near_count(clause, modulus, residue, b):
    """Certified affine lower bound (slope, intercept, threshold) on the
    number of successors landing at or above k - b, for large k in the
    class, or None when no bound is derivable."""
    slope, inter = F0, F0
    threshold = 1
    for item in clause.items:
        mu = expr_affine(item.mult)
        if mu is None:
            return None
        m1, m0 = Fraction(mu[0]), Fraction(mu[1])
        if m1 < 0:
            return None
        if m1 > 0 and m0 < 0:
            threshold = max(threshold, ceil(-m0 / m1))
        la = expr_affine(item.label)
        if la is None:
            bt = item.label
            if bt.name == "next_prime":
                arg = expr_affine(bt.args[0])
                # next_prime(k + t) >= k + t + 1, which clears k - b.
                if arg is not None and arg[0] == 1 and arg[1] >= -b - 1:
                    slope += m1
                    inter += m0
            continue
        a, t = la
        if a == 1 and t >= -b:
            slope += m1
            inter += m0
        elif a >= 2:
            slope += m1
            inter += m0
            threshold = max(threshold, -((t + b) // (a - 1)) + 1)
    for iv in clause.intervals:
        tail = _interval_tail(iv, modulus, residue)
        if tail is None:
            return None
        threshold = max(threshold, tail.threshold)
        if tail.full_count == (F0, F0):
            continue
        lo = expr_affine(iv.lo)
        hi = expr_affine(iv.hi)
        if lo[0] != 0:
            return None
        s = iv.step
        if hi[0] == 0:
            threshold = max(threshold, hi[1] + b + 1)
            continue
        # First grid value at or above k - b sits rho above it on the class.
        threshold = max(threshold, lo[1] + b + 1)
        rho = (lo[1] + b - residue) % s
        num_slope, num_inter = hi[0] - 1, hi[1] + b - rho
        if num_slope == 0 and num_inter < 0:
            continue
        mod_const = (num_slope * residue + num_inter) % s
        cnt_slope = Fraction(num_slope, s)
        cnt_inter = Fraction(num_inter - mod_const, s) + 1
        if cnt_slope > 0 and cnt_inter < 0:
            threshold = max(threshold, int(-cnt_inter / cnt_slope) + 2)
        slope += cnt_slope
        inter += cnt_inter
        for ra, rb in tail.removed:
            a, t = int(ra), int(rb)
            if a == 0:
                # Constant notches fall below k - b once k is large enough.
                threshold = max(threshold, t + b + 1)
            elif a == 1:
                if t >= -b:
                    inter -= 1
            else:
                inter -= 1
                threshold = max(threshold, -((t + b) // (a - 1)) + 1)
    return slope, inter, threshold


def _class_forward_jump(clause, modulus, residue):
    """Does the clause provably offer some successor >= k + 1 for all large
    k in the class?"""
    for item in clause.items:
        mu = expr_affine(item.mult)
        if mu is None:
            continue
        positive = mu[0] > 0 or (mu[0] == 0 and mu[1] >= 1)
        if not positive:
            continue
        la = expr_affine(item.label)
        if la is None:
            bt = item.label
            if bt.name == "next_prime":
                arg = expr_affine(bt.args[0])
                if arg is not None and arg[0] == 1 and arg[1] >= 0:
                    return True
            continue
        if la[0] >= 2 or (la[0] == 1 and la[1] >= 1):
            return True
    for iv in clause.intervals:
        tail = _interval_tail(iv, modulus, residue)
        if tail is None or tail.full_count == (F0, F0):
            continue
        hi = expr_affine(iv.hi)
        if hi[0] >= 2 or (hi[0] == 1 and hi[1] >= 1):
            return True
    return False


def radius_zero_check(spec, back_width=None, probe=200):
    """Run the shrinking-return test, sweeping back_width over 0..3 when it
    is not supplied.  "Does not hold" is an inconclusive verdict, never a
    claim of a positive radius."""
    widths = (0, 1, 2, 3) if back_width is None else (back_width,)
    labels = reachable_probe(spec, probe)
    succs = {k: successors(spec, k) for k in labels}
    no_fwd = [k for k in labels if max(succs[k], default=-1) < k + 1]
    if no_fwd:
        return RadiusVerdict(
            False, None, None, (), (), f"no forward jump from label {no_fwd[0]}"
        )
    cover = _tail_classes(spec)
    if cover is None or not cover[1]:
        return RadiusVerdict(
            False, None, None, (), (), "tail structure not symbolically tractable"
        )
    modulus, classes = cover
    verdict = None
    for b in widths:
        verdict = _radius_for_width(spec, modulus, classes, labels, succs, b)
        if verdict.holds:
            return verdict
    return verdict


def _radius_for_width(spec, modulus, classes, labels, succs, b):
    tally = tuple(
        (k, sum(c for v, c in succs[k].items() if v >= k - b)) for k in labels
    )
    shown = tally[:12]
    if any(m2 < m1 for (_, m1), (_, m2) in zip(tally, tally[1:])):
        return RadiusVerdict(
            False, b, None, (), shown, "return count decreases on probed labels"
        )
    by_residue = {}
    descriptions = []
    for tc in classes:
        got = _class_near_count(tc.clause, modulus, tc.residue, b)
        if got is None:
            return RadiusVerdict(
                False, b, None, (), shown, "return count not symbolically affine"
            )
        if not _class_forward_jump(tc.clause, modulus, tc.residue):
            return RadiusVerdict(
                False, b, None, (), shown, "no certified forward jump in the tail"
            )
        slope, inter, threshold = got
        threshold = max(threshold, tc.threshold)
        by_residue[tc.residue] = (slope, inter, threshold)
        descriptions.append(
            f"k = {tc.residue} mod {modulus}: at least {slope}*k + {inter} "
            f"returns (k >= {threshold})"
        )
    slopes = {slope for slope, _, _ in by_residue.values()}
    if len(slopes) != 1:
        return RadiusVerdict(
            False, b, None, tuple(descriptions), shown, "class growth rates differ"
        )
    slope = slopes.pop()
    if slope <= 0:
        return RadiusVerdict(
            False, b, slope, tuple(descriptions), shown, "return count stays bounded"
        )
    start = max(th for _, _, th in by_residue.values())
    window = []
    for k in range(start, start + 2 * modulus + 3):
        s, i, _ = by_residue[k % modulus]
        value = s * k + i
        if value.denominator != 1:
            raise ClassifyError("non-integer symbolic return count")
        window.append(int(value))
    if any(b2 < b1 for b1, b2 in zip(window, window[1:])):
        return RadiusVerdict(
            False, b, slope, tuple(descriptions), shown,
            "certified bound dips across residue classes",
        )
    for k, m in tally:
        if k >= start:
            s, i, _ = by_residue[k % modulus]
            if Fraction(m) < s * k + i:
                raise ClassifyError("symbolic return bound exceeds the exact count")
    return RadiusVerdict(
        True,
        b,
        slope,
        tuple(descriptions),
        shown,
        "return count is nondecreasing and grows without bound",
    )


# ---------------------------------------------------------------------------
# Aggregate report


def _coeff_json(c):
    return int(c) if c.denominator == 1 else str(c)


def _ratfunc_json(rf):
    return {
        "numerator": [_coeff_json(c) for c in rf.num.coeffs],
        "denominator": [_coeff_json(c) for c in rf.den.coeffs],
        "text": rf.to_str(),
    }


def _jsonable(value):
    if isinstance(value, Fraction):
        return _coeff_json(value)
    if isinstance(value, (frozenset, set)):
        return sorted(_jsonable(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


@dataclass
class CriterionResult:
    criterion: str
    verdict: str
    witness: dict = field(default_factory=dict)
    closed_form: RatFunc | None = None
    note: str = ""

    def to_json_obj(self):
        obj = {"criterion": self.criterion, "verdict": self.verdict}
        if self.witness:
            obj["witness"] = _jsonable(self.witness)
        if self.closed_form is not None:
            obj["closed_form"] = _ratfunc_json(self.closed_form)
        if self.note:
            obj["note"] = self.note
        return obj


@dataclass
class ClassificationReport:
    name: str
    mode: str
    axiom: int
    results: list
    closed_form: RatFunc | None
    closed_form_source: str | None
    overall: str
    series: tuple

    def to_json_obj(self):
        return {
            "name": self.name,
            "mode": self.mode,
            "axiom": self.axiom,
            "overall": self.overall,
            "closed_form": None
            if self.closed_form is None
            else _ratfunc_json(self.closed_form),
            "closed_form_source": self.closed_form_source,
            "series": list(self.series),
            "criteria": [r.to_json_obj() for r in self.results],
        }

    def summary(self):
        lines = [f"{self.name}: {self.overall}"]
        if self.closed_form is not None:
            lines.append(
                f"  F(z) = {self.closed_form.to_str()}  [{self.closed_form_source}]"
            )
        for r in self.results:
            note = f"  ({r.note})" if r.note else ""
            lines.append(f"  {r.criterion}: {r.verdict}{note}")
        lines.append("  series: " + ", ".join(str(t) for t in self.series[:10]))
        return "\n".join(lines)


def build_report(spec, order=30, cutoff=500, probe=120):
    """Evaluate every criterion on the spec and bundle the verdicts.

    Any closed form is re-expanded to `order` terms and compared with direct
    propagation before it enters the report.  Systems whose label support
    widens exponentially get a shorter series (width-capped propagation);
    their closed forms, when any exist, are checked on what was computed.
    """
    series = tuple(total_series(spec, order, max_labels=100_000))
    results = []
    closed = None
    source = None

    def verified(rf):
        if tuple(rf.expand(len(series)).as_ints()) != series:
            raise ClassifyError("closed form disagrees with propagation")
        return rf

    labels = reachable_labels(spec, cutoff)
    if labels is not None:
        rf = verified(rational_from_finite(spec, cutoff))
        results.append(
            CriterionResult(
                "finite-labels", "holds", {"labels": sorted(labels)}, rf
            )
        )
        closed, source = rf, "finite-labels"
    else:
        results.append(
            CriterionResult(
                "finite-labels",
                "none",
                note=f"more than {cutoff} distinct labels reachable",
            )
        )

    aw = affine_sigma(spec, probe)
    if aw is None:
        results.append(CriterionResult("affine-label-sum", "none"))
    elif spec.mode == "eco":
        rf = verified(rational_gf_affine(aw, spec.axiom))
        results.append(
            CriterionResult(
                "affine-label-sum",
                "holds",
                {"alpha": aw.alpha, "beta": aw.beta},
                rf,
            )
        )
        if closed is None:
            closed, source = rf, "affine-label-sum"
    else:
        results.append(
            CriterionResult(
                "affine-label-sum",
                "holds",
                {"alpha": aw.alpha, "beta": aw.beta},
                note="no totals formula outside child-count mode",
            )
        )

    pw = parity_affine(spec, probe)
    if pw is None:
        results.append(CriterionResult("parity-label-sum", "none"))
    else:
        rf = verified(rational_gf_parity(pw))
        results.append(
            CriterionResult(
                "parity-label-sum",
                "holds",
                {
                    "alpha": pw.alpha,
                    "beta_even": pw.beta_even,
                    "beta_odd": pw.beta_odd,
                    "odd_per_rule": pw.odd_per_rule,
                },
                rf,
            )
        )
        if closed is None:
            closed, source = rf, "parity-label-sum"

    form = factorial_form(spec)
    kernel_ready = False
    if form is None:
        results.append(CriterionResult("interval-walk-shape", "none"))
    else:
        kernel_ready = (
            bool(form.jumps) and not form.removed_low and form.start_height == 0
        )
        note = (
            "algebraic route applies"
            if kernel_ready
            else "recognized, but low exclusions or a raised start keep the "
            "algebraic route out of scope"
        )
        results.append(
            CriterionResult(
                "interval-walk-shape", "holds", form.to_json_obj(), note=note
            )
        )

    bj = bounded_plus_jumps(spec)
    if bj is None:
        results.append(CriterionResult("bounded-plus-jumps", "none"))
    else:
        note = ""
        rf = None
        if closed is None:
            need = 2 * 8 + 10 + 2
            terms = (
                series
                if len(series) >= need
                else tuple(total_series(spec, need, max_labels=100_000))
            )
            fit = guess_rational(terms, 8, 10) if len(terms) >= need else None
            if fit is None:
                note = "no rational fit within degree 8"
            else:
                rf = verified(fit.func)
                note = (
                    f"rational form fitted from {len(terms)} terms, "
                    f"{fit.verified_terms} beyond the fitting window"
                )
                closed, source = rf, "bounded-plus-jumps"
        results.append(
            CriterionResult(
                "bounded-plus-jumps",
                "holds",
                {"jumps": list(bj.jumps), "bound": bj.bound},
                rf,
                note,
            )
        )

    lb = linear_bound_check(spec)
    results.append(
        CriterionResult(
            "linear-label-growth",
            "holds" if lb.certified else "none",
            {"slope": lb.slope} if lb.certified else {},
        )
    )

    rz = radius_zero_check(spec, None, probe)
    results.append(
        CriterionResult(
            "zero-radius",
            "holds" if rz.holds else "inconclusive",
            {
                "back_width": rz.back_width,
                "slope": rz.slope,
                "classes": rz.classes,
                "probe": rz.probe,
            }
            if rz.holds
            else {},
            note=rz.reason,
        )
    )

    if closed is not None:
        overall = "rational"
    elif kernel_ready:
        overall = "algebraic-candidate"
    elif rz.holds:
        overall = "zero-radius"
    else:
        overall = "inconclusive"
    return ClassificationReport(
        name=spec.name,
        mode=spec.mode,
        axiom=spec.axiom,
        results=results,
        closed_form=closed,
        closed_form_source=source,
        overall=overall,
        series=series,
    )
