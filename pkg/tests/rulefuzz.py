"""Sampling rule premises that a random F-model realises."""

from __future__ import annotations

from fractions import Fraction

from kgtab import formula as F
from kgtab.constraints import C0, C1, Constraint, FreshVar, FVal
from kgtab.formula import Logic
from kgtab.generate import random_fmodel, random_formula
from kgtab.tableau import (ALL_RULES, FAMILIES, Branch, RuleInstance, conclusions, family_of,
                           prop_rule)

from realise import Interp, premise_realised, realised

GT, LT, ANY = (">", ">="), ("<", "<="), ("<", "<=", ">", ">=", "=")

# rule -> (operators, truth index, relations) for propositional rules
PROP_SHAPES = {
    "and_gt": ((F.AND, F.IAND), 1, GT),
    "and_lt": ((F.AND, F.IAND), 1, LT),
    "and2_gt": ((F.AND,), 2, GT),
    "and2_lt": ((F.AND,), 2, LT),
    "iand2_gt": ((F.IAND,), 2, GT),
    "iand2_lt": ((F.IAND,), 2, LT),
    "imp_gt": ((F.IMPL, F.IIMPL), 1, GT),
    "imp_lt": ((F.IMPL, F.IIMPL), 1, LT),
    "iimp2_gt": ((F.IIMPL,), 2, GT),
    "iimp2_lt": ((F.IIMPL,), 2, LT),
    "imp2_gt": ((F.IMPL,), 2, (">",)),
    "imp2_ge": ((F.IMPL,), 2, (">=",)),
    "imp2_lt": ((F.IMPL,), 2, LT),
    "neg": ((F.NEG,), None, ANY),
    "conf": ((F.CONF,), None, ANY),
    "inv": ((F.INV,), None, ANY),
    "split_eq": ((F.AND, F.IAND, F.IMPL, F.IIMPL), None, ("=",)),
}

MODE_RELS = {"gt": GT, "lt": LT, "approx": ("<=",), "eq": ("=",), "val": ("=",)}


def _family_ops(name):
    out = [(op, i) for (op, i), fam in FAMILIES.items() if fam.name == name]
    return sorted(out)


def _logic_for(op):
    return Logic.KGINV2 if op in (F.BOX1, F.DIA1, F.BOX2, F.DIA2) else Logic.KGBL


def sample(rule, rng, den=12):
    """One (branch, instance, model, logic, worlds, env) with a realised premise,
    or None when the random draw did not realise it."""
    if rule in PROP_SHAPES:
        ops, index, rels = PROP_SHAPES[rule]
        op = rng.choice(ops)
        index = index or rng.choice((1, 2))
        mode = None
    else:
        name, mode = rule.rsplit("_", 1)
        op, index = rng.choice(_family_ops(name))
        rels = MODE_RELS[mode]
    logic = _logic_for(op)
    sub_logic = Logic.KGINV2 if logic is Logic.KGINV2 else Logic.KGBL

    def sub():
        return random_formula(rng, sub_logic, max_size=2, max_modal=1, core_only=True)

    arity = 2 if op in F.BINARY else 1
    phi = F.Formula(op, tuple(sub() for _ in range(arity)))
    fm = random_fmodel(rng, n_worlds=rng.randint(1, 3), den=den, extra=2)
    w = "u0"
    worlds = {w: w}
    lhs = FVal(w, index, phi)
    actual = Interp(fm, logic, worlds, {}).value(lhs)
    rel = rng.choice(rels)
    x = FreshVar("x")
    r = rng.random()
    if mode in ("approx", "eq") or r < 0.4:
        xval = actual
    else:
        xval = Fraction(rng.randint(0, den), den)
    X, env = x, {x: xval}
    if mode not in ("approx", "eq", "val") and r > 0.9:
        X, env = rng.choice((C0, C1)), {}

    b = Branch()
    partner = target = None
    if mode == "val":
        principal = Constraint(lhs, "=", lhs)
    else:
        principal = Constraint(lhs, rel, X)
        b.add(principal)
    if mode == "approx":
        partner = Constraint(lhs, ">=", X)
        b.add(partner)
    if mode == "eq":
        target = "v"
        worlds["v"] = rng.choice(fm.worlds)
    premise = [c for c in (principal, partner) if c is not None and c.lhs != c.rhs]
    if not premise_realised(premise, fm, logic, worlds, env):
        return None
    # the instance must be the one the prover itself would build
    if mode is None:
        assert prop_rule(principal) == rule, (rule, principal)
    else:
        assert f"{family_of(principal).name}_{mode}" == rule
    inst = RuleInstance(rule, principal, partner, target)
    return b, inst, fm, logic, worlds, env


def check_rule(rule, rng, wanted=50, max_tries=4000):
    """Returns (realised premises seen, failures as strings)."""
    hits, failures = 0, []
    for _ in range(max_tries):
        if hits >= wanted:
            break
        got = sample(rule, rng)
        if got is None:
            continue
        b, inst, fm, logic, worlds, env = got
        hits += 1
        cols = conclusions(b, inst)
        if not any(realised(col, fm, logic, worlds, env) for col in cols):
            failures.append(f"{inst} on {fm}")
    return hits, failures


RULES = ALL_RULES
