"""Translations between the bi-lattice language and the bi-modal involutive one.

``oplus``/``ominus`` map a KGBL formula to KGINV2 formulas computing its
truth and falsity support; ``join`` maps KGINV2 back into KGBL.
"""

from __future__ import annotations

from . import formula as F
from .formula import Logic, check_language, desugar


class StarMap(dict):
    """Injective renaming p -> p_star, fresh with respect to the source formula."""

    @classmethod
    def for_formula(cls, f):
        names = F.props(f)
        used = set(names)
        stars = cls()
        for p in sorted(names):
            cand = p + "_star"
            while cand in used:
                cand += "_star"
            used.add(cand)
            stars[p] = cand
        return stars


_CONST_PLUS = {F.ONE: F.TOP, F.ZERO: F.BOT, F.BOTH: F.TOP, F.NEITHER: F.BOT}
_CONST_MINUS = {F.ONE: F.BOT, F.ZERO: F.TOP, F.BOTH: F.TOP, F.NEITHER: F.BOT}


def _translate(f, stars):
    """Return (f_plus, f_minus) for a KGBL core formula."""
    memo = {}
    for g in F.subformulas(f):
        if g in memo:
            continue
        a = [memo[x] for x in g.args]
        op = g.op
        if op == F.VAR:
            r = (g, F.Var(stars[g.name]))
        elif op in _CONST_PLUS:
            r = (_CONST_PLUS[op], _CONST_MINUS[op])
        elif op == F.NEG:
            r = (a[0][1], a[0][0])
        elif op == F.CONF:
            r = (F.Inv(a[0][1]), F.Inv(a[0][0]))
        elif op == F.INV:
            r = (F.Inv(a[0][0]), F.Inv(a[0][1]))
        elif op == F.AND:
            r = (F.And(a[0][0], a[1][0]), F.Or(a[0][1], a[1][1]))
        elif op == F.IAND:
            r = (F.And(a[0][0], a[1][0]), F.And(a[0][1], a[1][1]))
        elif op == F.IMPL:
            r = (F.Impl(a[0][0], a[1][0]), F.Coimpl(a[1][1], a[0][1]))
        elif op == F.IIMPL:
            r = (F.Impl(a[0][0], a[1][0]), F.Impl(a[0][1], a[1][1]))
        elif op == F.BOX:
            r = (F.Box1(a[0][0]), F.Dia2(a[0][1]))
        elif op == F.DIA:
            r = (F.Dia1(a[0][0]), F.Box2(a[0][1]))
        elif op == F.IBOX:
            r = (F.Box1(a[0][0]), F.Box2(a[0][1]))
        elif op == F.IDIA:
            r = (F.Dia1(a[0][0]), F.Dia2(a[0][1]))
        else:  # pragma: no cover - desugar leaves only core nodes
            raise F.IllegalConnective(op, Logic.KGBL)
        memo[g] = r
    return memo[f]


def oplus(f, stars=None):
    core = desugar(f, Logic.KGBL)
    return _translate(core, stars or StarMap.for_formula(f))[0]


def ominus(f, stars=None):
    core = desugar(f, Logic.KGBL)
    return _translate(core, stars or StarMap.for_formula(f))[1]


def join(f):
    check_language(f, Logic.KGINV2)
    memo = {}
    for g in F.subformulas(f):
        if g in memo:
            continue
        a = tuple(memo[x] for x in g.args)
        if g.op in (F.BOX1, F.BOX):
            r = F.Box(a[0])
        elif g.op in (F.DIA1, F.DIA):
            r = F.Dia(a[0])
        elif g.op == F.BOX2:
            r = F.Neg(F.Dia(F.Neg(a[0])))
        elif g.op == F.DIA2:
            r = F.Neg(F.Box(F.Neg(a[0])))
        else:
            r = F.Formula(g.op, a, g.name)
        memo[g] = r
    return memo[f]


def embed_inv_to_bl(f):
    return F.Impl(F.B, join(f))


def embed_bl_to_inv(f):
    stars = StarMap.for_formula(f)
    plus, minus = _translate(desugar(f, Logic.KGBL), stars)
    return F.And(plus, F.SNot(minus))
