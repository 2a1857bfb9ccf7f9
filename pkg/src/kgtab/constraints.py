"""Branch constraints, their linear translation and an exact feasibility solver.

Every constraint the tableau produces compares two unit-coefficient atoms
``x`` or ``1 - x`` (or constants), so feasibility over [0,1] is a question
about orders: a system is satisfiable iff the graph of ``<=``/``<`` edges,
closed under the complement mirror ``a <= b  =>  1-b <= 1-a``, has no cycle
through a strict edge. Gap requirements on T-term pairs are disjunctions of
such edges and are decided by DPLL-style splitting.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from . import formula as F
from .kripke import ONE, ZERO, fmt

HALF = Fraction(1, 2)


class ResourceLimit(RuntimeError):
    pass


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class FreshVar:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class TTerm:
    world: str
    index: int
    instance: int
    bound: int  # 0 lower, 1 upper

    @property
    def partner(self):
        return TTerm(self.world, self.index, self.instance, 1 - self.bound)

    def __str__(self):
        inst = f"#{self.instance}" if self.instance else ""
        return f"t{self.bound}@{self.world}:{self.index}{inst}"


@dataclass(frozen=True)
class Const:
    value: Fraction

    def __str__(self):
        return fmt(self.value)


@dataclass(frozen=True)
class OneMinus:
    term: object

    def __str__(self):
        inner = str(self.term)
        return f"1 - {inner}"


@dataclass(frozen=True)
class RelVal:
    src: str
    sign: str  # "+" or "-"
    dst: str

    def __str__(self):
        return f"{self.src} R{self.sign} {self.dst}"


@dataclass(frozen=True)
class FVal:
    world: str
    index: int
    formula: F.Formula

    def __str__(self):
        return f"{self.world}:{self.index}:{F.to_text(self.formula)}"


C0, C1 = Const(ZERO), Const(ONE)


def one_minus(t):
    if isinstance(t, OneMinus):
        return t.term
    if isinstance(t, Const):
        return Const(ONE - t.value)
    return OneMinus(t)


FLIP = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "=": "="}
RELS = ("<", "<=", ">", ">=", "=")


@dataclass(frozen=True)
class Constraint:
    lhs: object
    rel: str
    rhs: object

    def __post_init__(self):
        if self.rel not in RELS:
            raise ValueError(f"bad relation {self.rel!r}")

    def __str__(self):
        return f"{self.lhs} {self.rel} {self.rhs}"


def holds(x, rel, y):
    if rel == "<":
        return x < y
    if rel == "<=":
        return x <= y
    if rel == ">":
        return x > y
    if rel == ">=":
        return x >= y
    return x == y


# ---------------------------------------------------------------- linear system

_CONST_VALUE = {
    (F.ONE, 1): ONE, (F.ONE, 2): ZERO, (F.ZERO, 1): ZERO, (F.ZERO, 2): ONE,
    (F.BOTH, 1): ONE, (F.BOTH, 2): ONE, (F.NEITHER, 1): ZERO, (F.NEITHER, 2): ZERO,
}


class Atom(NamedTuple):
    """``key`` or ``1 - key`` for a variable, or a constant when key is None."""

    key: object
    neg: bool
    const: Fraction | None

    def complement(self):
        if self.key is None:
            return Atom(None, False, ONE - self.const)
        return Atom(self.key, not self.neg, None)

    def value(self, values):
        if self.key is None:
            return self.const
        x = values[self.key]
        return ONE - x if self.neg else x


def atom_of(term):
    if isinstance(term, OneMinus):
        return atom_of(term.term).complement()
    if isinstance(term, Const):
        return Atom(None, False, term.value)
    if isinstance(term, FVal) and not term.formula.args and term.formula.op != F.VAR:
        return Atom(None, False, _CONST_VALUE[(term.formula.op, term.index)])
    if isinstance(term, (FVal, RelVal, FreshVar, TTerm)):
        return Atom(term, False, None)
    raise TypeError(f"not a structure: {term!r}")


def var_name(key):
    """Printable name of a system variable, in the x_{...} style."""
    if isinstance(key, FVal):
        return f"x[{key}]"
    if isinstance(key, RelVal):
        return f"x[{key.src}R{key.sign}{key.dst}]"
    return str(key)


@dataclass
class LinearSystem:
    variables: list = field(default_factory=list)
    rows: list = field(default_factory=list)          # (Atom, rel, Atom), rel in <, <=, =
    pairs: list = field(default_factory=list)         # (lower key, upper key)
    gap_groups: dict = field(default_factory=dict)    # (world, index) -> [keys]

    def explain(self):
        def show(a):
            if a.key is None:
                return fmt(a.const)
            name = var_name(a.key)
            return f"1 - {name}" if a.neg else name

        lines = [f"variables ({len(self.variables)}): "
                 + ", ".join(var_name(k) for k in self.variables)]
        lines += [f"  {show(a)} {rel} {show(b)}" for a, rel, b in self.rows]
        lines += [f"  pair {var_name(a)} < {var_name(b)}" for a, b in self.pairs]
        for (w, i), keys in sorted(self.gap_groups.items()):
            lines.append(f"  gap group ({w}, {i}): " + ", ".join(map(var_name, keys)))
        return "\n".join(lines)


def translate_branch(constraints):
    sys = LinearSystem()
    seen = {}

    def note(a):
        if a.key is not None and a.key not in seen:
            seen[a.key] = len(seen)
            sys.variables.append(a.key)
        return a

    tterms = {}
    for c in constraints:
        a, b = note(atom_of(c.lhs)), note(atom_of(c.rhs))
        rel = c.rel
        if rel in (">", ">="):
            a, b, rel = b, a, FLIP[rel]
        sys.rows.append((a, rel, b))
        for t in (c.lhs, c.rhs):
            while isinstance(t, OneMinus):
                t = t.term
            if isinstance(t, TTerm):
                tterms[(t.world, t.index, t.instance)] = t
    for (w, i, k), t in tterms.items():
        lo, hi = TTerm(w, i, k, 0), TTerm(w, i, k, 1)
        note(Atom(lo, False, None))
        note(Atom(hi, False, None))
        sys.pairs.append((lo, hi))
        group = sys.gap_groups.setdefault((w, i), [])
        group.extend((lo, hi))
    return sys


# ---------------------------------------------------------------- witness

@dataclass
class Witness:
    values: dict

    def __getitem__(self, term):
        a = term if isinstance(term, Atom) else atom_of(term)
        return a.value(self.values)

    def __str__(self):
        return ", ".join(f"{var_name(k)} = {fmt(v)}" for k, v in self.values.items())


def gap_violations(sys, values):
    out = []
    for lo, hi in sys.pairs:
        group = sys.gap_groups[(lo.world, lo.index)]
        a, b = values[lo], values[hi]
        for s in group:
            if s not in (lo, hi) and a < values[s] < b:
                out.append((lo, hi, s))
    return out


def check_witness(sys, values):
    if isinstance(values, Witness):
        values = values.values
    for k in sys.variables:
        if not ZERO <= values[k] <= ONE:
            return False
    for a, rel, b in sys.rows:
        if not holds(a.value(values), rel, b.value(values)):
            return False
    for lo, hi in sys.pairs:
        if not values[lo] < values[hi]:
            return False
    return not gap_violations(sys, values)


# ---------------------------------------------------------------- order graph

def _simplest(lo, lo_open, hi, hi_open, max_den=64):
    """A small-denominator rational in the interval with the given ends."""
    if lo == hi:
        return lo
    for q in range(1, max_den + 1):
        p = (lo.numerator * q) // lo.denominator
        for cand in (Fraction(p, q), Fraction(p + 1, q)):
            if (cand > lo or (cand == lo and not lo_open)) and \
                    (cand < hi or (cand == hi and not hi_open)):
                return cand
    return (lo + hi) / 2


class _Graph:
    def __init__(self, sys):
        self.keys = list(sys.variables)
        self.index = {k: i for i, k in enumerate(self.keys)}
        n = len(self.keys)
        consts = {ZERO, ONE}
        for a, _, b in sys.rows:
            for x in (a, b):
                if x.key is None:
                    consts.add(x.const)
                    consts.add(ONE - x.const)
        self.consts = sorted(consts)
        self.cindex = {c: 2 * n + j for j, c in enumerate(self.consts)}
        self.size = 2 * n + len(self.consts)
        self._comp = [u ^ 1 for u in range(2 * n)] + [self.cindex[ONE - c] for c in self.consts]
        self.adj = [[] for _ in range(self.size)]
        self.trail = []
        zero, one = self.cindex[ZERO], self.cindex[ONE]
        for i in range(n):
            self.add(2 * i, one, False)
            self.add(zero, 2 * i, False)
        for a, b in zip(self.consts, self.consts[1:]):
            self.add(self.cindex[a], self.cindex[b], True)
        for k, (a, rel, b) in enumerate(sys.rows):  # edges labelled by row
            u, v = self.node(a), self.node(b)
            self.add(u, v, rel == "<", k)
            if rel == "=":
                self.add(v, u, False, k)
        for lo, hi in sys.pairs:
            self.add(self.node_of(lo), self.node_of(hi), True)

    def node_of(self, key):
        return 2 * self.index[key]

    def node(self, atom):
        if atom.key is None:
            return self.cindex[atom.const]
        return 2 * self.index[atom.key] + (1 if atom.neg else 0)

    def comp(self, u):
        return self._comp[u]

    def const_of(self, u):
        j = u - 2 * len(self.keys)
        return self.consts[j] if j >= 0 else None

    def add(self, u, v, strict, label=-1):
        self.adj[u].append((v, strict, label))
        self.trail.append(u)
        cu, cv = self._comp[u], self._comp[v]
        if (cv, cu) != (u, v):
            self.adj[cv].append((cu, strict, label))
            self.trail.append(cv)

    def mark(self):
        return len(self.trail)

    def undo(self, mark):
        while len(self.trail) > mark:
            self.adj[self.trail.pop()].pop()

    def sccs(self):
        """Tarjan's algorithm (iterative); components come sinks first."""
        index = [-1] * self.size
        low = [0] * self.size
        on = [False] * self.size
        stack, comps = [], []
        comp_of = [-1] * self.size
        counter = 0
        for root in range(self.size):
            if index[root] != -1:
                continue
            work = [(root, 0)]
            index[root] = low[root] = counter
            counter += 1
            stack.append(root)
            on[root] = True
            while work:
                u, k = work[-1]
                edges = self.adj[u]
                if k < len(edges):
                    work[-1] = (u, k + 1)
                    v = edges[k][0]
                    if index[v] == -1:
                        index[v] = low[v] = counter
                        counter += 1
                        stack.append(v)
                        on[v] = True
                        work.append((v, 0))
                    elif on[v]:
                        low[u] = min(low[u], index[v])
                    continue
                work.pop()
                if work:
                    p = work[-1][0]
                    low[p] = min(low[p], low[u])
                if low[u] == index[u]:
                    comp = []
                    while True:
                        v = stack.pop()
                        on[v] = False
                        comp_of[v] = len(comps)
                        comp.append(v)
                        if v == u:
                            break
                    comps.append(comp)
        return comps, comp_of

    def feasible(self):
        return self.conflict() is None

    def conflict(self):
        """None if the order constraints are satisfiable, else the row labels
        of one cycle through a strict edge (an infeasible subsystem)."""
        comps, comp_of = self.sccs()
        for u in range(self.size):
            for v, strict, label in self.adj[u]:
                if strict and comp_of[u] == comp_of[v]:
                    return (self._cycle_labels(v, u, comp_of) | {label}) - {-1}
        return None

    def _cycle_labels(self, src, dst, comp_of):
        c = comp_of[src]
        parent = {src: None}
        todo = [src]
        while dst not in parent:
            x = todo.pop()
            for y, _, label in self.adj[x]:
                if y not in parent and comp_of[y] == c:
                    parent[y] = (x, label)
                    todo.append(y)
        out = set()
        while parent[dst] is not None:
            dst, label = parent[dst]
            out.add(label)
        return out

    def reach(self, src):
        """Nodes reachable from src, and those reachable through a strict edge."""
        seen = {(src, False)}
        todo = [(src, False)]
        while todo:
            u, s = todo.pop()
            for v, e, _ in self.adj[u]:
                st = (v, s or e)
                if st not in seen:
                    seen.add(st)
                    todo.append(st)
        any_ = {v for v, _ in seen}
        strict = {v for v, s in seen if s}
        return any_, strict

    def assign_scaled(self):
        """Integer numerators over a common denominator ``den`` for a
        complement-symmetric solution of all edges; needs feasible().

        Values are chosen sources first between the bound from already
        placed predecessors and the bound propagated from successors; the
        grid is fine enough that bisection never runs out of room.
        """
        comps, comp_of = self.sccs()
        den = math.lcm(*(c.denominator for c in self.consts)) << (len(comps) + 2)
        fixed = {}
        for ci, comp in enumerate(comps):
            for u in comp:
                c = self.const_of(u)
                if c is not None:
                    fixed[ci] = c.numerator * (den // c.denominator)
        out_edges = [[] for _ in comps]
        in_edges = [[] for _ in comps]
        for u in range(self.size):
            for v, s, _ in self.adj[u]:
                a, b = comp_of[u], comp_of[v]
                if a != b:
                    out_edges[a].append((b, s))
                    in_edges[b].append((a, s))
        # bounds as 2*value -/+ strict, so one integer comparison orders them
        hi = [0] * len(comps)
        for ci in range(len(comps)):  # sinks first
            best = 2 * den
            for d, s in out_edges[ci]:
                best = min(best, 2 * fixed[d] - s if d in fixed else hi[d] - s)
            hi[ci] = best
        val = [0] * len(comps)
        for ci in reversed(range(len(comps))):  # sources first
            if ci in fixed:
                val[ci] = fixed[ci]
                continue
            lo = 0
            for p, s in in_edges[ci]:
                lo = max(lo, 2 * val[p] + s)
            lo_v, lo_strict = lo // 2, lo % 2
            hi_v, hi_strict = (hi[ci] + 1) // 2, hi[ci] % 2
            if not lo_strict:
                val[ci] = lo_v
            elif hi_strict:
                val[ci] = (lo_v + hi_v) // 2
            else:
                val[ci] = (lo_v + hi_v + 1) // 2
        raw = [val[comp_of[u]] for u in range(self.size)]
        comp = self._comp
        return [raw[u] + den - raw[comp[u]] for u in range(self.size)], 2 * den

    def assign(self, relabel=True):
        """Exact Fractions for every node satisfying all edges; needs feasible()."""
        nums, den = self.assign_scaled()
        sym = [Fraction(x, den) for x in nums]
        return self._relabel(sym) if relabel else sym

    def _relabel(self, sym):
        anchors = set(self.consts) | {ZERO, HALF, ONE}
        values = sorted(set(sym) | {HALF})
        new = {}
        low = [v for v in values if v <= HALF]
        for k, v in enumerate(low):
            if v in anchors:
                new[v] = v
                continue
            prev = new[low[k - 1]]
            nxt = low[k + 1]
            new[v] = _simplest(prev, True, nxt, True)
        for v in values:
            if v > HALF:
                new[v] = v if v in anchors else ONE - new[ONE - v]
        return [new[x] for x in sym]


# ---------------------------------------------------------------- solving

@dataclass
class SolverConfig:
    max_splits: int = 20000


def _pair_conflicts(g, sys):
    """Pairs of T-pairs sharing a gap group.

    Every T-term belongs to a pair, so the gap condition for two pairs
    (a, b) and (c, d) of one group is exactly: b <= c, or d <= a, or the
    pairs coincide (a = c and b = d).
    """
    by_group = {}
    for lo, hi in sys.pairs:
        by_group.setdefault((lo.world, lo.index), []).append((g.node_of(lo), g.node_of(hi)))
    out = []
    for pairs in by_group.values():
        out.extend(itertools.combinations(pairs, 2))
    return out


class _Search:
    """Split only on pairs of T-pairs that the current candidate interleaves."""

    def __init__(self, g, conflicts, cfg):
        self.g = g
        self.conflicts = conflicts
        self.cfg = cfg
        self.splits = 0
        self.values = None
        self.core_rows = set()    # rows used by the refutation, if any
        self.core_pairs = set()   # T-pairs whose gap condition was split on

    def run(self):
        g = self.g
        rows = g.conflict()
        if rows is not None:
            self.core_rows |= rows
            return False
        vals, den = g.assign_scaled()
        bad = None
        for (a, b), (c, d) in self.conflicts:
            if vals[b] <= vals[c] or vals[d] <= vals[a] or \
                    (vals[a] == vals[c] and vals[b] == vals[d]):
                continue
            bad = (a, b, c, d)
            break
        if bad is None:
            self.values = [Fraction(x, den) for x in vals]
            return True
        self.splits += 1
        if self.splits > self.cfg.max_splits:
            raise ResourceLimit(f"more than {self.cfg.max_splits} gap case splits")
        a, b, c, d = bad
        self.core_pairs.update(((a, b), (c, d)))
        if vals[c] < vals[a]:
            a, b, c, d = c, d, a, b
        cases = (((b, c, False),),                  # first pair below the second
                 ((a, c, False), (c, a, False),     # identical pairs
                  (b, d, False), (d, b, False)),
                 ((d, a, False),))                  # second pair below the first
        for case in cases:
            mark = g.mark()
            for u, v, strict in case:
                g.add(u, v, strict)
            if self.run():
                return True
            g.undo(mark)
        return False


def _decide(sys, cfg):
    g = _Graph(sys)
    search = _Search(g, _pair_conflicts(g, sys), cfg or SolverConfig())
    return g, search.run() and search.values


def is_satisfiable(sys, cfg=None):
    return bool(_decide(sys, cfg)[1])


def unsat_core(sys, cfg=None):
    """None if satisfiable; else ``(rows, pairs)``: row indices and T-pairs
    whose constraints and gap conditions alone are already unsatisfiable."""
    g = _Graph(sys)
    search = _Search(g, _pair_conflicts(g, sys), cfg or SolverConfig())
    if search.run():
        return None
    pairs = {(g.keys[a // 2], g.keys[b // 2]) for a, b in search.core_pairs}
    return search.core_rows, pairs


def order_feasible(sys):
    """Necessary condition for satisfiability: the order constraints alone
    (without the gap condition) have a solution."""
    return _Graph(sys).feasible()


def order_conflict(sys):
    """Row indices of an order-infeasible subsystem, or None."""
    return _Graph(sys).conflict()


def solve(sys, cfg=None):
    """A gap-respecting Witness, or None when the system has no solution."""
    g, vals = _decide(sys, cfg)
    if not vals:
        return None
    vals = g._relabel(vals)
    values = {k: vals[g.node_of(k)] for k in g.keys}
    if not check_witness(sys, values):  # pragma: no cover - internal invariant
        raise AssertionError("solver produced an assignment that fails re-checking")
    return Witness(values)


def oracle_solve(sys, max_vars=6):
    """Exhaustive search on the grid k/(2(m+1)); independent of ``solve``."""
    keys = list(sys.variables)
    m = len(keys)
    if m > max_vars:
        raise ResourceLimit(f"{m} variables exceed the oracle bound {max_vars}")
    for a, _, b in sys.rows:
        for x in (a, b):
            if x.key is None and x.const not in (ZERO, HALF, ONE):
                raise ValueError("oracle grid only covers the constants 0, 1/2, 1")
    grid = [Fraction(k, 2 * (m + 1)) for k in range(2 * (m + 1) + 1)]
    pos = {k: i for i, k in enumerate(keys)}

    checks = [[] for _ in range(m + 1)]

    def last(*ks):
        return max((pos[k] for k in ks if k is not None), default=0)

    for a, rel, b in sys.rows:
        checks[last(a.key, b.key)].append(
            lambda v, a=a, rel=rel, b=b: holds(a.value(v), rel, b.value(v)))
    for lo, hi in sys.pairs:
        checks[last(lo, hi)].append(lambda v, lo=lo, hi=hi: v[lo] < v[hi])
        for s in sys.gap_groups[(lo.world, lo.index)]:
            if s not in (lo, hi):
                checks[last(lo, hi, s)].append(
                    lambda v, lo=lo, hi=hi, s=s: not v[lo] < v[s] < v[hi])

    if m == 0:
        return Witness({}) if all(c({}) for c in checks[0]) else None
    values = {}

    def go(i):
        if i == m:
            return True
        for x in grid:
            values[keys[i]] = x
            if all(c(values) for c in checks[i]) and go(i + 1):
                return True
        del values[keys[i]]
        return False

    if go(0):
        return Witness(dict(values))
    return None


# ---------------------------------------------------------------- text format

class ConstraintSyntaxError(ValueError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_term(text):
    text = text.strip()
    if text.startswith("1 - ") or text.startswith("1-"):
        return one_minus(parse_term(text.split("-", 1)[1]))
    if "@" in text and text[:2] in ("t0", "t1"):
        rest = text[3:]
        inst = 0
        if "#" in rest:
            rest, k = rest.split("#", 1)
            inst = int(k)
        world, index = rest.rsplit(":", 1)
        return TTerm(world, int(index), inst, int(text[1]))
    parts = text.split()
    if len(parts) == 3 and parts[1] in ("R+", "R-"):
        return RelVal(parts[0], parts[1][1], parts[2])
    if text.count(":") >= 2:
        world, index, body = text.split(":", 2)
        return FVal(world.strip(), int(index), F.parse(body))
    if text[:1].isdigit():
        q = Fraction(text.replace(" ", ""))
        if not ZERO <= q <= ONE:
            raise ValueError(f"constant {text} outside [0,1]")
        return Const(q)
    if F._VAR_RE.match(text):
        return FreshVar(text)
    raise ValueError(f"unrecognised term {text!r}")


def parse_constraints(text):
    out = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        idx = [i for i, t in enumerate(toks) if t in RELS]
        if len(idx) != 1:
            raise ConstraintSyntaxError(n, "expected exactly one of < <= > >= =")
        i = idx[0]
        try:
            lhs = parse_term(" ".join(toks[:i]))
            rhs = parse_term(" ".join(toks[i + 1:]))
        except (ValueError, ZeroDivisionError) as e:
            raise ConstraintSyntaxError(n, str(e)) from None
        out.append(Constraint(lhs, toks[i], rhs))
    return out


def grid_assignments(keys, den):
    """All assignments of ``keys`` to multiples of 1/den (for small brute force)."""
    grid = [Fraction(k, den) for k in range(den + 1)]
    for combo in itertools.product(grid, repeat=len(keys)):
        yield dict(zip(keys, combo))
