"""Random formulas and models for property tests and experiment scripts."""

from __future__ import annotations

import random
from fractions import Fraction

from . import formula as F
from .formula import Logic
from .kripke import FModel, Model

_BINARY = {
    Logic.KGINV: (F.AND, F.OR, F.IMPL, F.COIMPL),
    Logic.KGINV2: (F.AND, F.OR, F.IMPL, F.COIMPL),
    Logic.KGBL: (F.AND, F.OR, F.IMPL, F.COIMPL, F.IAND, F.IOR, F.IIMPL, F.ICOIMPL),
}
_UNARY = {
    Logic.KGINV: (F.INV, F.DELTA, F.SNOT),
    Logic.KGINV2: (F.INV, F.DELTA, F.SNOT),
    Logic.KGBL: (F.INV, F.NEG, F.CONF, F.DELTA, F.SNOT, F.IDELTA, F.ISNOT),
}
_MODAL = {
    Logic.KGINV: (F.BOX, F.DIA),
    Logic.KGINV2: (F.BOX1, F.DIA1, F.BOX2, F.DIA2),
    Logic.KGBL: (F.BOX, F.DIA, F.IBOX, F.IDIA),
}
_CONST = {
    Logic.KGINV: (F.ONE, F.ZERO),
    Logic.KGINV2: (F.ONE, F.ZERO),
    Logic.KGBL: F.CONSTANTS,
}


def random_formula(rng, logic, max_size=8, max_modal=2, variables=("p", "q", "r"),
                   core_only=False):
    """A random formula with at most ``max_size`` connectives."""
    unary = _UNARY[logic]
    binary = _BINARY[logic]
    if core_only:
        unary = tuple(op for op in unary if op in F.CORE[logic])
        binary = tuple(op for op in binary if op in F.CORE[logic])

    def build(budget, modal):
        if budget <= 0 or rng.random() < 0.2:
            if rng.random() < 0.1:
                return F.Formula(rng.choice(_CONST[logic]))
            return F.Var(rng.choice(variables))
        r = rng.random()
        if r < 0.3 and modal > 0:
            return F.Formula(rng.choice(_MODAL[logic]), (build(budget - 1, modal - 1),))
        if r < 0.5:
            return F.Formula(rng.choice(unary), (build(budget - 1, modal),))
        left = rng.randint(0, budget - 1)
        return F.Formula(rng.choice(binary),
                         (build(left, modal), build(budget - 1 - left, modal)))

    return build(max_size, max_modal)


def _value(rng, den, p_extreme=0.25):
    if rng.random() < p_extreme:
        return Fraction(rng.choice((0, 1)))
    return Fraction(rng.randint(0, den), den)


def random_model(rng, n_worlds=3, den=12, variables=("p", "q", "r"), bi=True,
                 density=0.6, crisp=False):
    worlds = tuple(f"u{k}" for k in range(n_worlds))

    def rel():
        out = {}
        for a in worlds:
            for b in worlds:
                if rng.random() < density:
                    out[(a, b)] = Fraction(1) if crisp else _value(rng, den)
        return out

    def val():
        return {(p, w): _value(rng, den) for p in variables for w in worlds}

    return Model(worlds, rel(), rel() if bi else {}, val(), val() if bi else {})


def random_fmodel(rng, n_worlds=3, den=12, variables=("p", "q", "r"), bi=True,
                  extra=2, **kw):
    m = random_model(rng, n_worlds, den, variables, bi, **kw)

    def tset():
        return {w: {_value(rng, den, 0) for _ in range(rng.randint(0, extra))}
                for w in m.worlds}

    return FModel(m, tset(), tset())


def seeded(seed):
    return random.Random(seed)


def random_constraints(rng, n_vars=4, n_rows=5, n_pairs=0, worlds=("w",), consts=True):
    """A random constraint list over fresh variables and T-pairs.

    T-pairs count towards ``n_vars`` (two variables each); constants are
    drawn from 0, 1/2, 1 so that the grid oracle applies.
    """
    from .constraints import C0, C1, Const, Constraint, FreshVar, RELS, TTerm, one_minus

    terms = [FreshVar(f"x{k}") for k in range(max(0, n_vars - 2 * n_pairs))]
    for k in range(n_pairs):
        w = rng.choice(worlds)
        terms += [TTerm(w, 1, k, 0), TTerm(w, 1, k, 1)]
    pool = list(terms)
    if consts:
        pool += [C0, C1, Const(Fraction(1, 2))]

    def pick():
        t = rng.choice(pool)
        if rng.random() < 0.3 and t in terms:
            return one_minus(t)
        return t

    out = []
    for _ in range(n_rows):
        a, b = pick(), pick()
        if a == b:
            continue
        out.append(Constraint(a, rng.choice(RELS), b))
    return out
