"""Constraint tableaux for KGINV, KGINV2 and KGBL with countermodel extraction.

A branch is a set of constraints between formula values ``w:i:phi``,
relation weights ``w R+ u``, fresh variables and T-terms.  A branch closes
when its linear system (with T-gap conditions) has no solution.

Modal rules come in two shapes, read off the F-model clauses:

* inf-type  value = max{x in T | x <= inf_u (wSu -> u:phi)}   (box, ibox, ...)
* sup-type  value = min{x in T | x >= sup_u min(wSu, u:phi)}  (dia, idia, ...)

Each connective/index pair is mapped to one shape plus a relation sign and
the T-set index the value is snapped into (see ``FAMILIES``).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import formula as F
from .constraints import (C0, C1, FLIP, Constraint, FreshVar, FVal, OneMinus, RelVal,
                          ResourceLimit, SolverConfig, TTerm, one_minus, order_conflict, unsat_core,
                          solve, translate_branch)
from .formula import Logic, desugar
from .kripke import ONE, ZERO, FModel, Model, eval_fmodel


class NotApplicable(ValueError):
    pass


class VerificationFailure(AssertionError):
    pass


GT = (">", ">=")
LT = ("<", "<=")


@dataclass(frozen=True)
class Family:
    name: str
    shape: str    # "inf" or "sup"
    sign: str     # relation used: "+" or "-"
    tset: int     # T-set the value is snapped into


FAMILIES = {
    # truth index 1
    (F.BOX, 1): Family("box", "inf", "+", 1),
    (F.IBOX, 1): Family("box", "inf", "+", 1),
    (F.BOX1, 1): Family("box", "inf", "+", 1),
    (F.DIA, 1): Family("dia", "sup", "+", 1),
    (F.IDIA, 1): Family("dia", "sup", "+", 1),
    (F.DIA1, 1): Family("dia", "sup", "+", 1),
    # index-2 modalities of KGINV2 (values are still truth degrees)
    (F.BOX2, 1): Family("rbox", "inf", "-", 2),
    (F.DIA2, 1): Family("rdia", "sup", "-", 2),
    # falsity support in KGBL, all over R-.  Every modal rule is generated
    # from (shape, sign, tset), so the falsity rules read off the clauses:
    # box2 is a sup over R- keyed to a box premise (its = rule too), and
    # idia2's = rule bounds the R- weight, not the R+ one.
    (F.BOX, 2): Family("box2", "sup", "-", 2),
    (F.DIA, 2): Family("dia2", "inf", "-", 2),
    (F.IBOX, 2): Family("ibox2", "inf", "-", 2),
    (F.IDIA, 2): Family("idia2", "sup", "-", 2),
}

NONBRANCHING = ("and_gt", "and2_lt", "iand2_gt", "imp2_gt", "neg", "conf", "inv", "split_eq")
BRANCHING = ("and_lt", "and2_gt", "iand2_lt", "imp_gt", "imp_lt", "iimp2_gt", "iimp2_lt",
             "imp2_ge", "imp2_lt")
MODAL_MODES = ("approx", "gt", "lt", "val")
PROP_RULES = NONBRANCHING + BRANCHING
MODAL_RULES = tuple(sorted({f"{fam.name}_{m}" for fam in FAMILIES.values()
                            for m in MODAL_MODES + ("eq",)}))
ALL_RULES = PROP_RULES + MODAL_RULES


def prop_rule(c):
    """Rule id for a propositional principal constraint, or None."""
    lhs = c.lhs
    if not isinstance(lhs, FVal):
        return None
    f, i = lhs.formula, lhs.index
    op = f.op
    if op in (F.NEG, F.CONF, F.INV):
        return op
    if not f.args or op in F.MODAL:
        return None
    if c.rel == "=":
        return "split_eq"
    up = c.rel in GT
    if op == F.AND:
        if i == 1:
            return "and_gt" if up else "and_lt"
        return "and2_gt" if up else "and2_lt"
    if op == F.IAND:
        if i == 1:
            return "and_gt" if up else "and_lt"
        return "iand2_gt" if up else "iand2_lt"
    if op == F.IMPL and i == 1:
        return "imp_gt" if up else "imp_lt"
    if op == F.IIMPL:
        if i == 1:
            return "imp_gt" if up else "imp_lt"
        return "iimp2_gt" if up else "iimp2_lt"
    if op == F.IMPL:
        if c.rel == ">":
            return "imp2_gt"
        return "imp2_ge" if c.rel == ">=" else "imp2_lt"
    return None


def family_of(c):
    lhs = c.lhs
    if isinstance(lhs, FVal) and lhs.formula.op in F.MODAL:
        return FAMILIES.get((lhs.formula.op, lhs.index))
    return None


@dataclass(frozen=True)
class RuleInstance:
    rule: str
    principal: Constraint
    partner: Constraint | None = None   # the >= half of an approx premise
    target: str | None = None           # successor world for =-rules

    def __str__(self):
        s = f"{self.rule}: {self.principal}"
        if self.partner is not None:
            s += f" & {self.partner}"
        if self.target is not None:
            s += f" @ {self.target}"
        return s


class Branch:
    """Constraint set plus bookkeeping; copied on every split."""

    __slots__ = ("constraints", "deps", "applied", "depth", "succ", "reldeps", "counters", "id")

    def __init__(self):
        self.constraints = []
        self.deps = {}        # constraint -> ids of the splits it depends on
        self.applied = set()
        self.depth = {}
        self.succ = {}
        self.reldeps = {}     # relational term -> deps of its first occurrence
        self.counters = {"world": 0, "var": 0, "pair": 0, "split": 0}
        self.id = 0

    def copy(self):
        b = Branch.__new__(Branch)
        b.constraints = list(self.constraints)
        b.deps = dict(self.deps)
        b.applied = set(self.applied)
        b.depth = dict(self.depth)
        b.succ = {k: list(v) for k, v in self.succ.items()}
        b.reldeps = dict(self.reldeps)
        b.counters = dict(self.counters)
        b.id = self.id
        return b

    @property
    def cset(self):
        return self.deps.keys()

    @property
    def worlds(self):
        return list(self.depth)

    def add(self, c, deps=frozenset()):
        if c in self.deps:
            return False
        self.deps[c] = deps
        self.constraints.append(c)
        for t in (c.lhs, c.rhs):
            while isinstance(t, OneMinus):
                t = t.term
            if isinstance(t, FVal):
                self.depth.setdefault(t.world, 0)
            elif isinstance(t, RelVal):
                self.depth.setdefault(t.src, 0)
                self.depth.setdefault(t.dst, self.depth[t.src] + 1)
                lst = self.succ.setdefault((t.src, t.sign), [])
                if t.dst not in lst:
                    lst.append(t.dst)
                    self.reldeps[t] = deps
        return True

    def fresh(self, kind):
        self.counters[kind] += 1
        return self.counters[kind]

    def max_depth(self):
        return max(self.depth.values(), default=0)

    def __str__(self):
        return "\n".join(map(str, self.constraints))


# ---------------------------------------------------------------- rule tables

def _approx_partner(b, c):
    """For ``F <= X`` return ``F >= X`` if present (and vice versa)."""
    if c.rel == "<=":
        other = Constraint(c.lhs, ">=", c.rhs)
    elif c.rel == ">=":
        other = Constraint(c.lhs, "<=", c.rhs)
    else:
        return None
    return other if other in b.cset else None


def applicable_rules(b, strategy="value"):
    """Unapplied rule instances in priority order.

    With ``strategy="value"`` every modal formula value is pinned once by
    the approximation rule taken with its own value as the bound, instead
    of firing a >/< rule per bound; the ``"bounds"`` strategy uses the
    >/</approx rules on each premise as written.
    """
    groups = ([], [], [], [])
    for c in b.constraints:
        rid = prop_rule(c)
        if rid is not None:
            inst = RuleInstance(rid, c)
            if inst not in b.applied:
                groups[0 if rid in NONBRANCHING else 1].append(inst)
            continue
        fam = family_of(c)
        if fam is None:
            continue
        if c.rel == "=":
            for u in b.succ.get((c.lhs.world, fam.sign), ()):
                inst = RuleInstance(f"{fam.name}_eq", c, target=u)
                if inst not in b.applied:
                    groups[3].append(inst)
            continue
        if strategy == "value":
            inst = RuleInstance(f"{fam.name}_val", Constraint(c.lhs, "=", c.lhs))
            if inst not in b.applied and inst not in groups[2]:
                groups[2].append(inst)
            continue
        partner = _approx_partner(b, c)
        if partner is not None:
            if c.rel == "<=":
                inst = RuleInstance(f"{fam.name}_approx", c, partner)
                if inst not in b.applied:
                    groups[2].append(inst)
            continue
        inst = RuleInstance(f"{fam.name}_{'gt' if c.rel in GT else 'lt'}", c)
        if inst not in b.applied:
            groups[2].append(inst)
    return [inst for g in groups for inst in g]


def _fval(w, i, f):
    return FVal(w, i, f)


def conclusions(b, inst):
    """Conclusion columns of ``inst`` on ``b``; draws fresh names from ``b``."""
    c = inst.principal
    rid = inst.rule
    if rid not in PROP_RULES:
        return _modal_conclusions(b, inst)
    lhs, rel, X = c.lhs, c.rel, c.rhs
    w, i, f = lhs.world, lhs.index, lhs.formula
    j = 3 - i
    a = f.args

    def fv(g, k=i, world=w):
        return _fval(world, k, g)

    def C(x, r, y):
        return Constraint(x, r, y)

    def fresh_var():
        return FreshVar(f"c{b.fresh('var')}")

    if rid == "neg":
        return [[C(fv(a[0], j), rel, X)]]
    if rid == "conf":
        return [[C(fv(a[0], j), FLIP[rel], one_minus(X))]]
    if rid == "inv":
        return [[C(fv(a[0]), FLIP[rel], one_minus(X))]]
    if rid == "split_eq":
        return [[C(lhs, "<=", X), C(lhs, ">=", X)]]
    if rid in ("and_gt", "and2_lt", "iand2_gt"):
        return [[C(fv(a[0]), rel, X), C(fv(a[1]), rel, X)]]
    if rid in ("and_lt", "and2_gt", "iand2_lt"):
        return [[C(fv(a[0]), rel, X)], [C(fv(a[1]), rel, X)]]
    phi, chi = fv(a[0]), fv(a[1])
    if rid in ("imp_gt", "iimp2_gt"):
        cv = fresh_var()
        # for iimp2 the right column keeps phi at index 2, like the premise
        return [[C(chi, rel, X)],
                [C(C1, rel, X), C(chi, "<=", cv), C(chi, ">=", cv), C(phi, "<=", cv)]]
    if rid in ("imp_lt", "iimp2_lt"):
        cv = fresh_var()
        return [[C(C1, rel, X)],
                [C(chi, rel, X), C(phi, "<=", cv), C(phi, ">=", cv), C(chi, "<", cv)]]
    if rid == "imp2_gt":
        cv = fresh_var()
        return [[C(chi, ">", X), C(phi, "<=", cv), C(phi, ">=", cv), C(chi, ">", cv)]]
    if rid == "imp2_ge":
        cv = fresh_var()
        return [[C(X, "<=", C0)],
                [C(chi, ">=", X), C(phi, "<=", cv), C(phi, ">=", cv), C(chi, ">", cv)]]
    if rid == "imp2_lt":
        cv = fresh_var()
        return [[C(chi, rel, X)],
                [C(C0, rel, X), C(phi, ">=", cv), C(chi, "<=", cv), C(chi, ">=", cv)]]
    raise NotApplicable(rid)


def _modal_conclusions(b, inst):
    c = inst.principal
    fam = family_of(c)
    lhs, rel, X = c.lhs, c.rel, c.rhs
    w, i = lhs.world, lhs.index
    (g,) = lhs.formula.args
    mode = inst.rule.rsplit("_", 1)[1]

    def C(x, r, y):
        return Constraint(x, r, y)

    if mode == "eq":
        u = inst.target
        su = RelVal(w, fam.sign, u)
        gu = _fval(u, i, g)
        if fam.shape == "inf":
            return [[C(gu, ">=", X)], [C(gu, "<", X), C(gu, ">=", su)]]
        return [[C(su, "<=", X)], [C(gu, "<=", X), C(su, ">", X)]]

    # a bare t(w) in a rule means the lower member t0 of the fresh pair
    k = b.fresh("pair")
    t0, t1 = TTerm(w, fam.tset, k, 0), TTerm(w, fam.tset, k, 1)
    v = f"w{b.fresh('world')}"
    b.depth[v] = b.depth.get(w, 0) + 1
    sv = RelVal(w, fam.sign, v)
    gv = _fval(v, i, g)
    if fam.shape == "inf":
        witness = [C(gv, "<", sv), C(gv, "<", t1)]
        if mode == "gt":
            return [[C(lhs, "=", C1), C(C1, rel, X)],
                    [C(lhs, "=", t0), C(t0, rel, X)] + witness]
        if mode == "lt":
            return [[C(C1, rel, X)], [C(t0, rel, X)] + witness]
        if mode == "val":
            return [[C(lhs, "=", C1)], [C(lhs, "=", t0)] + witness]
        return [[C(lhs, "=", C1), C(X, "=", C1)],
                [C(lhs, "=", t0), C(X, "=", t0)] + witness]
    witness = [C(sv, ">", t0), C(gv, ">", t0)]
    if mode == "gt":
        return [[C(C0, rel, X)], [C(t1, rel, X)] + witness]
    if mode == "lt":
        return [[C(lhs, "=", C0), C(C0, rel, X)],
                [C(lhs, "=", t1), C(t1, rel, X)] + witness]
    if mode == "val":
        return [[C(lhs, "=", C0)], [C(lhs, "=", t1)] + witness]
    return [[C(lhs, "=", C0), C(X, "=", C0)],
            [C(lhs, "=", t1), C(X, "=", t1)] + witness]


def premise_deps(b, inst):
    deps = b.deps[inst.principal] if inst.principal in b.deps else frozenset()
    if inst.partner is not None:
        deps |= b.deps[inst.partner]
    if inst.target is not None:
        fam = family_of(inst.principal)
        deps |= b.reldeps[RelVal(inst.principal.lhs.world, fam.sign, inst.target)]
    return deps


def apply_rule(b, inst):
    """Children of ``b`` under ``inst``; a branching application gets a fresh
    split id, recorded in the dependency sets of its conclusions."""
    if inst in b.applied:
        raise NotApplicable(str(inst))
    base = b.copy()
    deps = premise_deps(base, inst)
    cols = conclusions(base, inst)
    base.applied.add(inst)
    if len(cols) > 1:
        deps = deps | {base.fresh("split")}
    children = []
    for col in cols:
        ch = base.copy() if len(cols) > 1 else base
        for c in col:
            ch.add(c, deps)
        children.append(ch)
    return children


# ---------------------------------------------------------------- search

@dataclass
class SearchConfig:
    max_branches: int = 100_000
    root_le: bool = False          # root as ``phi <= c`` (non-strict) instead of ``<``
    strategy: str = "value"        # "value" or "bounds", see applicable_rules
    seed: int | None = None        # shuffle sibling order when set
    check_depth: bool = True
    keep_trace: bool = True
    # "order": prune with the order constraints only and run the full
    # gap-aware test on saturated branches; "full": full test every step;
    # "modal": full test after modal rules, which introduce T-pairs
    pruning: str = "modal"
    backjump: bool = True
    collect_open: int = 1          # keep searching until this many open leaves
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.strategy not in ("value", "bounds"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.pruning not in ("order", "full", "modal"):
            raise ValueError(f"unknown pruning mode {self.pruning!r}")


@dataclass
class CountermodelReport:
    model: FModel
    root: str
    achieved: object   # ValuePair


@dataclass
class ProofResult:
    closed: bool
    index: int                      # which tableau: 1 (truth) or 2 (falsity)
    expansions: int
    branches: int
    max_depth: int
    trace: list = field(default_factory=list)
    branch: Branch | None = None
    witness: object = None
    report: CountermodelReport | None = None
    open_leaves: list = field(default_factory=list)   # (branch, witness, report)

    @property
    def status(self):
        return "closed" if self.closed else "open"


ROOT = "w0"


def init_validity(f, logic, root_le=False):
    core = desugar(f, logic)
    roots = []
    b = Branch()
    b.add(Constraint(FVal(ROOT, 1, core), "<=" if root_le else "<", FreshVar("c")))
    b.add(Constraint(FreshVar("c"), "<", C1))
    roots.append(b)
    if logic is Logic.KGBL:
        b = Branch()
        b.add(Constraint(FVal(ROOT, 2, core), ">=" if root_le else ">", FreshVar("d")))
        b.add(Constraint(FreshVar("d"), ">", C0))
        roots.append(b)
    return roots


def _mentions(c, keys):
    for t in (c.lhs, c.rhs):
        while isinstance(t, OneMinus):
            t = t.term
        if t in keys:
            return True
    return False


def core_deps(b, rows, pairs=()):
    """Split ids behind an unsatisfiable core of ``b``'s system."""
    out = set()
    for k in rows:
        out |= b.deps[b.constraints[k]]
    terms = {t for pair in pairs for t in pair}
    if terms:
        for c in b.constraints:
            if _mentions(c, terms):
                out |= b.deps[c]
    return frozenset(out)


def branch_conflict(b, cfg, full=True):
    """None if ``b`` may be open, else the split ids its closure depends on."""
    sys = translate_branch(b.constraints)
    rows = order_conflict(sys)
    if rows is not None:
        return core_deps(b, rows)
    if full:
        core = unsat_core(sys, cfg.solver)
        if core is not None:
            return core_deps(b, *core)
    return None


def run_tableau(root, query, logic, index, cfg=None, bound=None):
    """Depth-first search of one tableau with conflict-directed backjumping.

    When a closed child does not depend on the split that produced it, the
    parent is closed too and the remaining siblings are skipped.
    """
    cfg = cfg or SearchConfig()
    rng = random.Random(cfg.seed) if cfg.seed is not None else None
    full = cfg.pruning == "full"
    trace = []
    frames = []   # [split id, unexplored siblings, accumulated conflict]
    stats = {"expansions": 0, "nodes": 0, "deepest": 0}
    next_id = 1

    def close(conf):
        while frames:
            sid, pending, acc = frames[-1]
            if cfg.backjump and sid not in conf:
                frames.pop()
                continue
            acc = frames[-1][2] = acc | (conf - {sid})
            if pending:
                return pending.pop(0)
            frames.pop()
            conf = acc
        return None

    opened = []

    def result():
        first = opened[0] if opened else (None, None, None)
        return ProofResult(not opened, index, stats["expansions"], stats["nodes"],
                           stats["deepest"], trace, *first, open_leaves=opened)

    b = root if branch_conflict(root, cfg, full) is None else None
    while b is not None:
        stats["nodes"] += 1
        depth = b.max_depth()
        stats["deepest"] = max(stats["deepest"], depth)
        if cfg.check_depth and bound is not None and depth > bound:
            raise AssertionError(f"world depth {depth} exceeds modal depth {bound}")
        insts = applicable_rules(b, cfg.strategy)
        if not insts:
            sys = translate_branch(b.constraints)
            core = unsat_core(sys, cfg.solver)
            if core is None:
                wit = solve(sys, cfg.solver)
                report = extract_countermodel(b, wit, query, ROOT, logic, index)
                opened.append((b, wit, report))
                if len(opened) >= cfg.collect_open:
                    return result()
                # an open leaf must not trigger a backjump over its siblings
                b = close(frozenset(fr[0] for fr in frames))
                continue
            if cfg.keep_trace:  # only the gap condition fails
                trace.append((b.id, "gap_closure", "", []))
            b = close(core_deps(b, *core))
            continue
        stats["expansions"] += 1
        if stats["expansions"] > cfg.max_branches:
            raise ResourceLimit(f"more than {cfg.max_branches} rule applications")
        inst = insts[0]
        children = apply_rule(b, inst)
        deep = full or (cfg.pruning == "modal" and inst.rule not in PROP_RULES)
        confs = []
        for ch in children:
            ch.id = next_id
            next_id += 1
            confs.append(branch_conflict(ch, cfg, deep))
        if cfg.keep_trace:
            trace.append((b.id, inst.rule, str(inst.principal),
                          [(ch.id, cf is None) for ch, cf in zip(children, confs)]))
        live = [ch for ch, cf in zip(children, confs) if cf is None]
        if len(children) == 1:
            b = live[0] if live else close(confs[0])
            continue
        sid = children[0].counters["split"]
        dead = [cf for cf in confs if cf is not None]
        if cfg.backjump and any(sid not in cf for cf in dead):
            b = close(next(cf for cf in dead if sid not in cf))
            continue
        acc = frozenset().union(*(cf - {sid} for cf in dead))
        if not live:
            b = close(acc)
            continue
        if rng is not None:
            rng.shuffle(live)
        frames.append([sid, live[1:], acc])
        b = live[0]
    return result()


def search(f, logic, cfg=None):
    """Run the tableaux for ``f``; stops at the first open one."""
    cfg = cfg or SearchConfig()
    core = desugar(f, logic)
    bound = F.modal_depth(core)
    results = []
    for index, root in enumerate(init_validity(f, logic, cfg.root_le), 1):
        res = run_tableau(root, f, logic, index, cfg, bound)
        results.append(res)
        if not res.closed:
            break
    return results


def is_valid(f, logic, cfg=None):
    return all(r.closed for r in search(f, logic, cfg))


# ---------------------------------------------------------------- extraction

def extract_countermodel(b, witness, query, root, logic, index=1):
    vals = witness.values
    worlds = tuple(b.depth)
    rel = {"+": {}, "-": {}}
    v = {1: {}, 2: {}}
    tsets = {1: {}, 2: {}}
    for key, x in vals.items():
        if isinstance(key, RelVal):
            rel[key.sign][(key.src, key.dst)] = x
        elif isinstance(key, FVal) and key.formula.op == F.VAR:
            v[key.index][(key.formula.name, key.world)] = x
        elif isinstance(key, TTerm):
            tsets[key.index].setdefault(key.world, set()).add(x)
    base = Model(worlds, rel["+"], rel["-"], v[1], v[2])
    fm = FModel(base, tsets[1], tsets[2])
    achieved = eval_fmodel(fm, query, root, logic)
    ok = achieved.pos < ONE if index == 1 else achieved.negv > ZERO
    if not ok:
        raise VerificationFailure(
            f"extracted model gives {achieved} at {root}; the branch demanded a refutation")
    return CountermodelReport(fm, root, achieved)
