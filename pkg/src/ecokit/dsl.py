"""Succession-rule specifications: text format, AST, expansion, validation.

A spec names a rewriting system: an axiom label and guarded clauses that send
a node labeled k to a finite multiset of successor labels.  In eco mode a
node labeled k must produce exactly k successors with labels >= 1; walk mode
drops the arity law and allows label 0, which models paths on the half line.

The concrete syntax is line oriented:

    system catalan {
      mode eco;
      axiom 2;
      rule k >= 2: interval(2, k-1), (k) x 1, (k+1) x 1;
    }

Items are written ``(LABEL) x MULT``; interval items enumerate an arithmetic
progression of labels and support ``step`` and a ``minus { ... }`` exclusion
list.  Guards are conjunctions of ``k >= c``, ``k <= c``, ``k mod m == r``,
``pow2(k)``, ``prime(k)`` and their negations ``!pow2(k)``, ``!prime(k)``;
``always`` matches every label.  Label expressions are affine forms ``a*k+b``
or one call to a registered builtin (``ceil_div``, ``next_prime``,
``goldbach_low``, ``goldbach_high``, ``pow``).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm


class ParseError(ValueError):
    """Syntax error with source position."""

    def __init__(self, message, line, col):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class SpecError(ValueError):
    """Semantic error in a spec or during rule expansion."""


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Affine:
    """The label expression a*k + b."""

    a: int
    b: int


@dataclass(frozen=True)
class Builtin:
    name: str
    args: tuple


LabelExpr = Affine | Builtin

BUILTIN_ARITY = {
    "ceil_div": 2,
    "next_prime": 1,
    "goldbach_low": 1,
    "goldbach_high": 1,
    "pow": 2,
}


@dataclass(frozen=True)
class GuardAtom:
    kind: str  # ge | le | mod | pow2 | prime
    c: int = 0
    m: int = 0
    r: int = 0
    negated: bool = False

    def matches(self, k):
        if self.kind == "ge":
            return k >= self.c
        if self.kind == "le":
            return k <= self.c
        if self.kind == "mod":
            return k % self.m == self.r
        if self.kind == "pow2":
            return _is_pow2(k) != self.negated
        if self.kind == "prime":
            return is_prime(k) != self.negated
        raise SpecError(f"unknown guard atom {self.kind}")


@dataclass(frozen=True)
class Guard:
    """Conjunction of atoms; the empty conjunction is 'always'."""

    atoms: tuple = ()

    def matches(self, k):
        return all(a.matches(k) for a in self.atoms)


@dataclass(frozen=True)
class Item:
    label: LabelExpr
    mult: LabelExpr


@dataclass(frozen=True)
class Interval:
    lo: LabelExpr
    hi: LabelExpr
    step: int = 1
    minus: tuple = ()


@dataclass(frozen=True)
class RuleClause:
    guard: Guard
    items: tuple = ()
    intervals: tuple = ()


@dataclass(frozen=True)
class EcoSpec:
    name: str
    mode: str  # eco | walk
    axiom: int
    clauses: tuple = ()


# ---------------------------------------------------------------------------
# Number-theoretic builtins (exact, trial division at desk scale)


def _is_pow2(k):
    return k >= 1 and (k & (k - 1)) == 0


@lru_cache(maxsize=None)
def is_prime(n):
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@lru_cache(maxsize=None)
def next_prime(n):
    """Smallest prime strictly greater than n."""
    c = n + 1
    while not is_prime(c):
        c += 1
    return c


@lru_cache(maxsize=None)
def goldbach_pair(k):
    """Deterministic prime pair (q, r), q <= r, with q + r = 2k - next_prime(k) + 3.

    The target is even and at least 4 for k >= 2, and q is the smallest prime
    that works, so the choice is canonical.
    """
    m = 2 * k - next_prime(k) + 3
    if m < 4 or m % 2 != 0:
        raise SpecError(f"goldbach pair undefined for k = {k} (target {m})")
    q = 2
    while q <= m // 2:
        if is_prime(q) and is_prime(m - q):
            return q, m - q
        q = 3 if q == 2 else q + 2
    raise SpecError(f"no prime pair found for target {m} (k = {k})")


def eval_expr(e, k):
    """Evaluate a label expression at label k."""
    if isinstance(e, Affine):
        return e.a * k + e.b
    name, args = e.name, [eval_expr(a, k) for a in e.args]
    if name == "ceil_div":
        v, m = args
        if m <= 0:
            raise SpecError("ceil_div needs a positive modulus")
        return -(-v // m)
    if name == "next_prime":
        return next_prime(args[0])
    if name == "goldbach_low":
        return goldbach_pair(args[0])[0]
    if name == "goldbach_high":
        return goldbach_pair(args[0])[1]
    if name == "pow":
        base, exp = args
        if exp < 0 or exp > 10**6:
            raise SpecError(f"pow exponent {exp} out of range")
        return base**exp
    raise SpecError(f"unknown builtin {name}")


def expr_affine(e):
    """The (a, b) of an affine expression, or None for builtins."""
    if isinstance(e, Affine):
        return e.a, e.b
    return None


# ---------------------------------------------------------------------------
# Lexer / parser

_SYMBOLS = (">=", "<=", "==", "{", "}", "(", ")", ",", ":", ";", "*", "+", "-", "!")


def _tokenize(text):
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        two = text[i : i + 2]
        if two in _SYMBOLS:
            tokens.append((two, two, line, col))
            i += 2
            col += 2
            continue
        if ch in _SYMBOLS:
            tokens.append((ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(("eof", None, line, col))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message):
        kind, value, line, col = self.peek()
        raise ParseError(message, line, col)

    def expect(self, kind, value=None):
        tok = self.next()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            raise ParseError(f"expected {want!r}, found {tok[1]!r}", tok[2], tok[3])
        return tok

    def accept(self, kind, value=None):
        tok = self.peek()
        if tok[0] == kind and (value is None or tok[1] == value):
            self.pos += 1
            return True
        return False

    def parse_spec(self):
        self.expect("ident", "system")
        name = self.expect("ident")[1]
        self.expect("{")
        mode = None
        axiom = None
        clauses = []
        while not self.accept("}"):
            tok = self.peek()
            if tok[0] != "ident":
                self.fail("expected 'mode', 'axiom' or 'rule'")
            if tok[1] == "mode":
                self.next()
                mode_tok = self.expect("ident")
                if mode_tok[1] not in ("eco", "walk"):
                    raise ParseError("mode must be 'eco' or 'walk'", mode_tok[2], mode_tok[3])
                mode = mode_tok[1]
                self.expect(";")
            elif tok[1] == "axiom":
                self.next()
                axiom = self.parse_int()
                self.expect(";")
            elif tok[1] == "rule":
                self.next()
                clauses.append(self.parse_clause())
            else:
                raise ParseError(f"unexpected keyword {tok[1]!r}", tok[2], tok[3])
        self.expect("eof")
        if mode is None:
            raise ParseError("spec is missing a 'mode' statement", 1, 1)
        if axiom is None:
            raise ParseError("spec is missing an 'axiom' statement", 1, 1)
        if not clauses:
            raise ParseError("spec has no rule clauses", 1, 1)
        return EcoSpec(name=name, mode=mode, axiom=axiom, clauses=tuple(clauses))

    def parse_int(self):
        neg = self.accept("-")
        tok = self.expect("int")
        return -tok[1] if neg else tok[1]

    def parse_clause(self):
        guard = self.parse_guard()
        self.expect(":")
        items = []
        intervals = []
        while True:
            tok = self.peek()
            if tok[0] == "ident" and tok[1] == "interval":
                intervals.append(self.parse_interval())
            elif tok[0] == "(":
                items.append(self.parse_item())
            else:
                self.fail("expected an item '(label) x mult' or 'interval(...)'")
            if self.accept(";"):
                break
            self.expect(",")
        return RuleClause(guard=guard, items=tuple(items), intervals=tuple(intervals))

    def parse_guard(self):
        if self.peek()[:2] == ("ident", "always"):
            self.next()
            return Guard(())
        atoms = [self.parse_atom()]
        while self.accept("ident", "and"):
            atoms.append(self.parse_atom())
        return Guard(tuple(atoms))

    def parse_atom(self):
        negated = self.accept("!")
        tok = self.next()
        if tok[0] != "ident":
            raise ParseError("expected a guard atom", tok[2], tok[3])
        if tok[1] in ("pow2", "prime"):
            self.expect("(")
            self.expect("ident", "k")
            self.expect(")")
            return GuardAtom(kind=tok[1], negated=negated)
        if negated:
            raise ParseError("only pow2/prime atoms can be negated", tok[2], tok[3])
        if tok[1] != "k":
            raise ParseError(f"guard atom must test k, found {tok[1]!r}", tok[2], tok[3])
        op = self.next()
        if op[0] == ">=":
            return GuardAtom(kind="ge", c=self.parse_int())
        if op[0] == "<=":
            return GuardAtom(kind="le", c=self.parse_int())
        if op[0] == "ident" and op[1] == "mod":
            m = self.parse_int()
            self.expect("==")
            r = self.parse_int()
            if m <= 0 or not 0 <= r < m:
                raise ParseError("need modulus > 0 and 0 <= residue < modulus", op[2], op[3])
            return GuardAtom(kind="mod", m=m, r=r)
        raise ParseError("expected '>=', '<=' or 'mod'", op[2], op[3])

    def parse_item(self):
        self.expect("(")
        label = self.parse_expr()
        self.expect(")")
        self.expect("ident", "x")
        mult = self.parse_expr()
        return Item(label=label, mult=mult)

    def parse_interval(self):
        self.expect("ident", "interval")
        self.expect("(")
        lo = self.parse_expr()
        self.expect(",")
        hi = self.parse_expr()
        step = 1
        minus = []
        while self.accept(","):
            tok = self.expect("ident")
            if tok[1] == "step":
                step = self.parse_int()
                if step <= 0:
                    raise ParseError("step must be positive", tok[2], tok[3])
            elif tok[1] == "minus":
                self.expect("{")
                minus.append(self.parse_expr())
                while self.accept(","):
                    minus.append(self.parse_expr())
                self.expect("}")
            else:
                raise ParseError(f"expected 'step' or 'minus', found {tok[1]!r}", tok[2], tok[3])
        self.expect(")")
        return Interval(lo=lo, hi=hi, step=step, minus=tuple(minus))

    def parse_expr(self):
        # Affine combination of 'k' and integers, or a single builtin call.
        a, b = 0, 0
        builtin = None
        sign = 1
        first = True
        while True:
            if not first:
                if self.accept("+"):
                    sign = 1
                elif self.accept("-"):
                    sign = -1
                else:
                    break
            else:
                sign = -1 if self.accept("-") else 1
            term_a, term_b, term_builtin = self.parse_term()
            if term_builtin is not None:
                if not first or sign != 1:
                    self.fail("builtin calls cannot be combined arithmetically")
                builtin = term_builtin
            else:
                a += sign * term_a
                b += sign * term_b
            first = False
        if builtin is not None:
            if a or b:
                self.fail("builtin calls cannot be combined arithmetically")
            return builtin
        return Affine(a=a, b=b)

    def parse_term(self):
        tok = self.peek()
        if tok[0] == "int":
            self.next()
            coeff = tok[1]
            if self.accept("*"):
                var = self.expect("ident")
                if var[1] != "k":
                    raise ParseError("only k can be scaled", var[2], var[3])
                return coeff, 0, None
            return 0, coeff, None
        if tok[0] == "ident" and tok[1] == "k":
            self.next()
            return 1, 0, None
        if tok[0] == "ident" and tok[1] in BUILTIN_ARITY:
            return 0, 0, self.parse_builtin()
        self.fail("expected an integer, 'k' or a builtin call")

    def parse_builtin(self):
        tok = self.expect("ident")
        name = tok[1]
        self.expect("(")
        args = [self.parse_expr()]
        while self.accept(","):
            args.append(self.parse_expr())
        self.expect(")")
        if len(args) != BUILTIN_ARITY[name]:
            raise ParseError(
                f"{name} takes {BUILTIN_ARITY[name]} argument(s), got {len(args)}",
                tok[2],
                tok[3],
            )
        return Builtin(name=name, args=tuple(args))


def parse_spec(text) -> EcoSpec:
    """Parse the textual format into an EcoSpec."""
    return _Parser(text).parse_spec()


# ---------------------------------------------------------------------------
# Printer


def _expr_text(e):
    if isinstance(e, Builtin):
        return f"{e.name}({', '.join(_expr_text(a) for a in e.args)})"
    a, b = e.a, e.b
    if a == 0:
        return str(b)
    if a == 1:
        head = "k"
    elif a == -1:
        head = "-k"
    else:
        head = f"{a}*k"
    if b == 0:
        return head
    return f"{head}+{b}" if b > 0 else f"{head}-{-b}"


def _atom_text(atom):
    if atom.kind == "ge":
        return f"k >= {atom.c}"
    if atom.kind == "le":
        return f"k <= {atom.c}"
    if atom.kind == "mod":
        return f"k mod {atom.m} == {atom.r}"
    bang = "!" if atom.negated else ""
    return f"{bang}{atom.kind}(k)"


def spec_to_text(spec) -> str:
    """Render a spec in the canonical textual form (parse round-trips it)."""
    lines = [f"system {spec.name} {{", f"  mode {spec.mode};", f"  axiom {spec.axiom};"]
    for clause in spec.clauses:
        guard = " and ".join(_atom_text(a) for a in clause.guard.atoms) or "always"
        parts = []
        for iv in clause.intervals:
            inner = f"{_expr_text(iv.lo)}, {_expr_text(iv.hi)}"
            if iv.step != 1:
                inner += f", step {iv.step}"
            if iv.minus:
                inner += ", minus {" + ", ".join(_expr_text(e) for e in iv.minus) + "}"
            parts.append(f"interval({inner})")
        for item in clause.items:
            parts.append(f"({_expr_text(item.label)}) x {_expr_text(item.mult)}")
        lines.append(f"  rule {guard}: {', '.join(parts)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Canonical JSON


def _expr_json(e):
    if isinstance(e, Builtin):
        return {"builtin": e.name, "args": [_expr_json(a) for a in e.args]}
    if e.a == 0:
        return {"const": e.b}
    return {"affine": [e.a, e.b]}


def _expr_from_json(obj):
    if not isinstance(obj, dict):
        raise SpecError(f"bad expression node {obj!r}")
    if "const" in obj:
        return Affine(a=0, b=int(obj["const"]))
    if "affine" in obj:
        a, b = obj["affine"]
        return Affine(a=int(a), b=int(b))
    if "builtin" in obj:
        name = obj["builtin"]
        if name not in BUILTIN_ARITY:
            raise SpecError(f"unknown builtin {name!r}")
        args = tuple(_expr_from_json(a) for a in obj.get("args", ()))
        if len(args) != BUILTIN_ARITY[name]:
            raise SpecError(f"{name} takes {BUILTIN_ARITY[name]} argument(s)")
        return Builtin(name=name, args=args)
    raise SpecError(f"bad expression node {obj!r}")


def _atom_json(a):
    out = {"kind": a.kind}
    if a.kind in ("ge", "le"):
        out["c"] = a.c
    elif a.kind == "mod":
        out["m"] = a.m
        out["r"] = a.r
    else:
        out["negated"] = a.negated
    return out


def _atom_from_json(obj):
    kind = obj.get("kind")
    if kind in ("ge", "le"):
        return GuardAtom(kind=kind, c=int(obj["c"]))
    if kind == "mod":
        m, r = int(obj["m"]), int(obj["r"])
        if m <= 0 or not 0 <= r < m:
            raise SpecError("bad mod atom")
        return GuardAtom(kind="mod", m=m, r=r)
    if kind in ("pow2", "prime"):
        return GuardAtom(kind=kind, negated=bool(obj.get("negated", False)))
    raise SpecError(f"unknown guard atom kind {kind!r}")


def to_canonical_json(spec) -> str:
    """Byte-stable JSON mirror of a spec."""
    obj = {
        "schema": "ecospec/1",
        "name": spec.name,
        "mode": spec.mode,
        "axiom": spec.axiom,
        "clauses": [
            {
                "guard": [_atom_json(a) for a in clause.guard.atoms],
                "items": [
                    {"label": _expr_json(it.label), "mult": _expr_json(it.mult)}
                    for it in clause.items
                ],
                "intervals": [
                    {
                        "lo": _expr_json(iv.lo),
                        "hi": _expr_json(iv.hi),
                        "step": iv.step,
                        "minus": [_expr_json(e) for e in iv.minus],
                    }
                    for iv in clause.intervals
                ],
            }
            for clause in spec.clauses
        ],
    }
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def from_canonical_json(text) -> EcoSpec:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict) or obj.get("schema") != "ecospec/1":
        raise SpecError("missing or unsupported schema tag (want ecospec/1)")
    for key in ("name", "mode", "axiom", "clauses"):
        if key not in obj:
            raise SpecError(f"missing field {key!r}")
    if obj["mode"] not in ("eco", "walk"):
        raise SpecError(f"bad mode {obj['mode']!r}")
    clauses = []
    for c in obj["clauses"]:
        guard = Guard(tuple(_atom_from_json(a) for a in c.get("guard", ())))
        items = tuple(
            Item(label=_expr_from_json(i["label"]), mult=_expr_from_json(i["mult"]))
            for i in c.get("items", ())
        )
        intervals = []
        for iv in c.get("intervals", ()):
            step = int(iv.get("step", 1))
            if step <= 0:
                raise SpecError("interval step must be positive")
            intervals.append(
                Interval(
                    lo=_expr_from_json(iv["lo"]),
                    hi=_expr_from_json(iv["hi"]),
                    step=step,
                    minus=tuple(_expr_from_json(e) for e in iv.get("minus", ())),
                )
            )
        clauses.append(RuleClause(guard=guard, items=items, intervals=tuple(intervals)))
    return EcoSpec(
        name=str(obj["name"]), mode=obj["mode"], axiom=int(obj["axiom"]), clauses=tuple(clauses)
    )


# ---------------------------------------------------------------------------
# Expansion


def match_clause(spec, k):
    """The unique clause guarding k."""
    hits = [c for c in spec.clauses if c.guard.matches(k)]
    if not hits:
        raise SpecError(f"no clause matches label {k}")
    if len(hits) > 1:
        raise SpecError(f"guards overlap at label {k}")
    return hits[0]


def expand_clause(clause, k) -> Counter:
    out = Counter()
    for iv in clause.intervals:
        lo = eval_expr(iv.lo, k)
        hi = eval_expr(iv.hi, k)
        if lo <= hi:
            grid = set(range(lo, hi + 1, iv.step))
            for e in iv.minus:
                grid.discard(eval_expr(e, k))
            for label in grid:
                out[label] += 1
    for item in clause.items:
        mult = eval_expr(item.mult, k)
        if mult < 0:
            raise SpecError(f"multiplicity {mult} is negative at label {k}")
        if mult:
            out[eval_expr(item.label, k)] += mult
    return out


def successors(spec, k) -> Counter:
    """Successor label multiset of a node labeled k."""
    return expand_clause(match_clause(spec, k), k)


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Issue:
    kind: str
    message: str
    k: int | None = None


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    mode: str
    issues: tuple = ()
    clause_symbolic: tuple = ()
    domain_min: int | None = None
    probed_to: int = 0

    def summary(self):
        if self.ok:
            return f"valid ({self.mode} mode, probed to {self.probed_to})"
        lines = [f"invalid ({len(self.issues)} issue(s)):"]
        lines += [f"  [{i.kind}] {i.message}" for i in self.issues]
        return "\n".join(lines)


@dataclass(frozen=True)
class IntervalTail:
    """Tail behaviour of an interval on one residue class of k.

    For k in the class with k >= threshold the interval holds full_count(k)
    grid labels starting at lo(k) with the stored step, of which the affine
    forms in `removed` are excluded (each hitting the grid exactly once), so
    it contributes count(k) = full_count(k) - len(removed) labels.  All the
    affine forms are (slope, intercept) Fraction pairs.
    """

    count: tuple
    full_count: tuple
    lo: tuple
    step: int
    removed: tuple
    threshold: int


def _interval_tail(iv, modulus, residue):
    """IntervalTail of iv on the class k = residue mod modulus, or None
    when a bound or exclusion is not affine.  modulus must be a multiple
    of the step."""
    lo = expr_affine(iv.lo)
    hi = expr_affine(iv.hi)
    if lo is None or hi is None:
        return None
    if any(expr_affine(e) is None for e in iv.minus):
        return None
    la, lb = lo
    ha, hb = hi
    da, db = ha - la, hb - lb
    threshold = 1
    zero = (Fraction(0), Fraction(0))
    if da < 0:
        # Eventually empty.
        threshold = max(threshold, -(-(db + 1) // -da))
        return IntervalTail(zero, zero, (Fraction(la), Fraction(lb)), iv.step, (), threshold)
    if da == 0 and db < 0:
        return IntervalTail(zero, zero, (Fraction(la), Fraction(lb)), iv.step, (), threshold)
    if da > 0:
        # Not empty once da*k + db >= 0.
        threshold = max(threshold, -(db // da) if db < 0 else 1)
    rho = (da * residue + db) % iv.step
    full_a = Fraction(da, iv.step)
    full_b = Fraction(db - rho, iv.step) + 1
    # Exclusions that sit on the grid and in range for all large k in class.
    removed = []
    seen = set()
    for e in iv.minus:
        ea, eb = expr_affine(e)
        if (ea, eb) in seen:
            continue
        seen.add((ea, eb))
        on_grid = ((ea - la) * residue + (eb - lb)) % iv.step == 0
        if not on_grid:
            continue

        def eventually_le(xa, xb, ya, yb):
            # x(k) <= y(k) for all large k? (threshold updated via nonlocal)
            nonlocal threshold
            if xa < ya:
                diff_a, diff_b = ya - xa, yb - xb
                if diff_b < 0:
                    threshold = max(threshold, -(diff_b // diff_a) + 1)
                return True
            if xa == ya:
                return xb <= yb
            return False

        if eventually_le(la, lb, ea, eb) and eventually_le(ea, eb, ha, hb):
            removed.append((Fraction(ea), Fraction(eb)))
    # Collisions between distinct exclusion forms happen at single labels;
    # push the threshold past them.
    forms = [expr_affine(e) for e in iv.minus]
    for i in range(len(forms)):
        for j in range(i + 1, len(forms)):
            (xa, xb), (ya, yb) = forms[i], forms[j]
            if xa != ya:
                cross = Fraction(yb - xb, xa - ya)
                threshold = max(threshold, int(cross) + 2)
    count = (full_a, full_b - len(removed))
    return IntervalTail(
        count,
        (full_a, full_b),
        (Fraction(la), Fraction(lb)),
        iv.step,
        tuple(removed),
        threshold,
    )


def clause_count_tail(clause):
    """Symbolic successor count of a clause on each residue class.

    Returns a list of (modulus, residue, slope, intercept, threshold) entries
    or None when the clause is not tractable symbolically (builtin
    multiplicities, non-affine interval bounds, bounded guards are skipped).
    """
    if any(a.kind == "le" for a in clause.guard.atoms):
        return []
    modulus = 1
    for a in clause.guard.atoms:
        if a.kind == "mod":
            modulus = lcm(modulus, a.m)
    for iv in clause.intervals:
        modulus = lcm(modulus, iv.step)
    base_a, base_b = Fraction(0), Fraction(0)
    for item in clause.items:
        aff = expr_affine(item.mult)
        if aff is None:
            return None
        base_a += aff[0]
        base_b += aff[1]
    ge_floor = 1
    for a in clause.guard.atoms:
        if a.kind == "ge":
            ge_floor = max(ge_floor, a.c)
    out = []
    for residue in range(modulus):
        ok = True
        for a in clause.guard.atoms:
            if a.kind == "mod" and residue % a.m != a.r:
                ok = False
        if not ok:
            continue
        slope, intercept = base_a, base_b
        threshold = ge_floor
        for iv in clause.intervals:
            tail = _interval_tail(iv, modulus, residue)
            if tail is None:
                return None
            slope += tail.count[0]
            intercept += tail.count[1]
            threshold = max(threshold, tail.threshold)
        out.append((modulus, residue, slope, intercept, threshold))
    return out


def reachable_probe(spec, kprobe):
    """Labels reachable from the axiom, cut off above kprobe."""
    return _reachable_closure(spec, kprobe)[0]


def _reachable_closure(spec, kprobe):
    """(sorted reachable labels <= kprobe, whether that set is complete).

    Complete means the closure never produced a label beyond kprobe and
    every label expanded cleanly, so the returned set is the entire
    reachable label set of the system.
    """
    seen = set()
    complete = True
    frontier = [spec.axiom]
    while frontier:
        k = frontier.pop()
        if k in seen:
            continue
        if k > kprobe:
            complete = False
            continue
        seen.add(k)
        try:
            succ = successors(spec, k)
        except SpecError:
            complete = False
            continue
        frontier.extend(j for j in succ if j not in seen)
    return sorted(seen), complete


def validate_spec(spec, kprobe=200, cover_to=None) -> ValidationReport:
    """Check the structural laws: guard coverage, arity, label positivity.

    The arity law (eco mode: a node labeled k has exactly k successors) is
    checked symbolically per clause where the clause is affine, and by direct
    expansion on every reachable label up to kprobe.  A symbolic mismatch on
    an open-ended clause is only an error when labels beyond the probed set
    can actually occur: finite-label systems are routinely written with a
    catch-all tail clause that the tree never enters, and for those the
    exhaustive numeric sweep is authoritative.
    """
    issues = []
    cover_to = cover_to or kprobe
    if spec.mode not in ("eco", "walk"):
        issues.append(Issue("mode", f"unknown mode {spec.mode!r}"))
        return ValidationReport(ok=False, mode=spec.mode, issues=tuple(issues))
    label_floor = 1 if spec.mode == "eco" else 0
    if spec.axiom < label_floor:
        issues.append(Issue("axiom", f"axiom {spec.axiom} below {label_floor}"))

    # Guard coverage from the smallest guarded label on.
    domain_min = None
    for k in range(label_floor, cover_to + 1):
        hits = sum(1 for c in spec.clauses if c.guard.matches(k))
        if domain_min is None:
            if hits:
                domain_min = k
            continue
        if hits == 0:
            issues.append(Issue("guard-gap", f"no clause matches label {k}", k))
            break
        if hits > 1:
            issues.append(Issue("guard-overlap", f"{hits} clauses match label {k}", k))
            break
    if domain_min is None:
        issues.append(Issue("guard-gap", "no label is guarded at all"))
    elif spec.axiom < domain_min:
        issues.append(Issue("axiom", f"axiom {spec.axiom} has no matching clause"))

    reach, reach_complete = _reachable_closure(spec, kprobe)

    # Symbolic arity per clause (eco mode only).
    symbolic = []
    if spec.mode == "eco":
        for idx, clause in enumerate(spec.clauses):
            tails = clause_count_tail(clause)
            if tails is None:
                symbolic.append(f"clause {idx}: skipped (non-affine parts)")
                continue
            if not tails:
                symbolic.append(f"clause {idx}: bounded guard, numeric probes only")
                continue
            bad = [t for t in tails if (t[2], t[3]) != (1, 0)]
            if bad:
                m, r, a, b, _ = bad[0]
                if reach_complete:
                    # The whole reachable label set is in hand; the numeric
                    # sweep below decides, and the off-law guard region is
                    # provably never entered.
                    symbolic.append(
                        f"clause {idx}: count is {a}k+{b} on k = {r} mod {m}; "
                        "deferred to the exhaustive reachable sweep"
                    )
                    continue
                issues.append(
                    Issue(
                        "arity-symbolic",
                        f"clause {idx}: count is {a}k+{b} on k = {r} mod {m}, want k",
                    )
                )
                symbolic.append(f"clause {idx}: FAILED")
            else:
                thr = max(t[4] for t in tails)
                if thr > kprobe:
                    issues.append(
                        Issue(
                            "arity-symbolic",
                            f"clause {idx}: tail threshold {thr} beyond probe {kprobe}",
                        )
                    )
                symbolic.append(f"clause {idx}: count = k for k >= {thr}")
    else:
        symbolic.append("walk mode: arity law not applicable")

    # Numeric probes along reachable labels.
    for k in reach:
        try:
            succ = successors(spec, k)
        except SpecError as exc:
            issues.append(Issue("expansion", str(exc), k))
            continue
        if spec.mode == "eco" and sum(succ.values()) != k:
            issues.append(
                Issue("arity", f"label {k} produces {sum(succ.values())} successors, want {k}", k)
            )
        low = min(succ, default=label_floor)
        if low < label_floor:
            issues.append(Issue("label-range", f"label {k} produces label {low}", k))

    return ValidationReport(
        ok=not issues,
        mode=spec.mode,
        issues=tuple(issues),
        clause_symbolic=tuple(symbolic),
        domain_min=domain_min,
        probed_to=kprobe,
    )
