"""Finite fuzzy bi-relational Kripke models, F-models and exact evaluators."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import formula as F
from .formula import Logic, check_language

ZERO = Fraction(0)
ONE = Fraction(1)


class UnknownWorld(KeyError):
    pass


class FormatError(ValueError):
    def __init__(self, location, message):
        super().__init__(f"{location}: {message}")
        self.location = location


def as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {x!r}")


def fmt(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class ValuePair:
    pos: Fraction
    negv: Fraction

    def __iter__(self):
        return iter((self.pos, self.negv))

    def __str__(self):
        return f"({fmt(self.pos)}, {fmt(self.negv)})"


def _unit(x, where):
    x = as_fraction(x)
    if not ZERO <= x <= ONE:
        raise ValueError(f"{where}: value {x} outside [0,1]")
    return x


@dataclass(frozen=True)
class Model:
    """Weights and valuations are sparse: missing entries are 0."""

    worlds: tuple
    rel_plus: dict = field(default_factory=dict)
    rel_minus: dict = field(default_factory=dict)
    v1: dict = field(default_factory=dict)
    v2: dict = field(default_factory=dict)

    def __post_init__(self):
        worlds = tuple(self.worlds)
        if not worlds:
            raise ValueError("a model needs at least one world")
        if len(set(worlds)) != len(worlds):
            raise ValueError("duplicate world names")
        object.__setattr__(self, "worlds", worlds)
        ws = set(worlds)
        for attr in ("rel_plus", "rel_minus"):
            clean = {}
            for (a, b), x in dict(getattr(self, attr)).items():
                if a not in ws or b not in ws:
                    raise UnknownWorld(f"{attr}: ({a}, {b})")
                x = _unit(x, attr)
                if x:
                    clean[(a, b)] = x
            object.__setattr__(self, attr, clean)
        for attr in ("v1", "v2"):
            clean = {}
            for (p, w), x in dict(getattr(self, attr)).items():
                if w not in ws:
                    raise UnknownWorld(f"{attr}: ({p}, {w})")
                x = _unit(x, attr)
                if x:
                    clean[(p, w)] = x
            object.__setattr__(self, attr, clean)

    def relation(self, sign):
        return self.rel_plus if sign == "+" else self.rel_minus

    def successors(self, w, sign):
        rel = self.relation(sign)
        return [(u, rel[(w, u)]) for u in self.worlds if (w, u) in rel]


@dataclass(frozen=True)
class FModel:
    """A model with finite per-world value sets; {0,1} is always included."""

    base: Model
    T1: dict = field(default_factory=dict)
    T2: dict = field(default_factory=dict)

    def __post_init__(self):
        for attr in ("T1", "T2"):
            given = dict(getattr(self, attr))
            for w in given:
                if w not in self.base.worlds:
                    raise UnknownWorld(f"{attr}: {w}")
            clean = {w: frozenset(_unit(x, attr) for x in given.get(w, ())) | {ZERO, ONE}
                     for w in self.base.worlds}
            object.__setattr__(self, attr, clean)

    @property
    def worlds(self):
        return self.base.worlds

    def tset(self, w, index):
        return (self.T1 if index == 1 else self.T2)[w]


def is_crisp(m):
    base = m.base if isinstance(m, FModel) else m
    return all(x in (ZERO, ONE) for rel in (base.rel_plus, base.rel_minus)
               for x in rel.values())


# ---------------------------------------------------------------- evaluation

def _godel(x, y):
    return ONE if x <= y else y


def _cogodel(x, y):
    # x -< y
    return ZERO if x <= y else x


class _Evaluator:
    def __init__(self, model, logic, fmodel=None):
        self.m = model
        self.logic = logic
        self.fm = fmodel
        self.memo = {}

    def snap(self, w, index, raw, down):
        if self.fm is None:
            return raw
        t = self.fm.tset(w, index)
        if down:
            return max(x for x in t if x <= raw)
        return min(x for x in t if x >= raw)

    def inf(self, f, w, i, sign):
        # inf over u of (wSu -> v_i(f, u))
        return min((_godel(r, self.v(f, u, i)) for u, r in self.m.successors(w, sign)),
                   default=ONE)

    def sup(self, f, w, i, sign):
        # sup over u of min(wSu, v_i(f, u))
        return max((min(r, self.v(f, u, i)) for u, r in self.m.successors(w, sign)),
                   default=ZERO)

    def v(self, f, w, i):
        key = (f, w, i)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        val = self._v(f, w, i)
        self.memo[key] = val
        return val

    def _v(self, f, w, i):
        op, a = f.op, f.args
        j = 3 - i
        if op == F.VAR:
            return (self.m.v1 if i == 1 else self.m.v2).get((f.name, w), ZERO)
        if op == F.ONE:
            return ONE if i == 1 else ZERO
        if op == F.ZERO:
            return ZERO if i == 1 else ONE
        if op == F.BOTH:
            return ONE
        if op == F.NEITHER:
            return ZERO
        if op == F.INV:
            return ONE - self.v(a[0], w, i)
        if op == F.NEG:
            return self.v(a[0], w, j)
        if op == F.CONF:
            return ONE - self.v(a[0], w, j)
        if op in (F.AND, F.OR):
            x, y = self.v(a[0], w, i), self.v(a[1], w, i)
            return min(x, y) if (op == F.AND) == (i == 1) else max(x, y)
        if op == F.IAND:
            return min(self.v(a[0], w, i), self.v(a[1], w, i))
        if op == F.IOR:
            return max(self.v(a[0], w, i), self.v(a[1], w, i))
        if op == F.IMPL:
            x, y = self.v(a[0], w, i), self.v(a[1], w, i)
            return _godel(x, y) if i == 1 else _cogodel(y, x)
        if op == F.COIMPL:
            x, y = self.v(a[0], w, i), self.v(a[1], w, i)
            return _cogodel(x, y) if i == 1 else _godel(y, x)
        if op == F.IIMPL:
            return _godel(self.v(a[0], w, i), self.v(a[1], w, i))
        if op == F.ICOIMPL:
            return _cogodel(self.v(a[0], w, i), self.v(a[1], w, i))
        if op == F.SNOT:
            x = self.v(a[0], w, i)
            if i == 1:
                return ONE if x == ZERO else ZERO
            return ZERO if x == ONE else ONE
        if op == F.DELTA:
            x = self.v(a[0], w, i)
            if i == 1:
                return ONE if x == ONE else ZERO
            return ONE if x > ZERO else ZERO
        if op == F.IDELTA:
            return ONE if self.v(a[0], w, i) == ONE else ZERO
        if op == F.ISNOT:
            return ONE if self.v(a[0], w, i) == ZERO else ZERO
        return self._modal(f, w, i)

    def _modal(self, f, w, i):
        op, (g,) = f.op, f.args
        if i == 1:
            if op in (F.BOX, F.IBOX, F.BOX1):
                return self.snap(w, 1, self.inf(g, w, 1, "+"), True)
            if op in (F.DIA, F.IDIA, F.DIA1):
                return self.snap(w, 1, self.sup(g, w, 1, "+"), False)
            if op == F.BOX2:
                return self.snap(w, 2, self.inf(g, w, 1, "-"), True)
            if op == F.DIA2:
                return self.snap(w, 2, self.sup(g, w, 1, "-"), False)
        else:
            # falsity support: box/dia swap roles, ibox/idia keep them
            if op in (F.BOX, F.IDIA):
                return self.snap(w, 2, self.sup(g, w, 2, "-"), False)
            if op in (F.DIA, F.IBOX):
                return self.snap(w, 2, self.inf(g, w, 2, "-"), True)
        raise F.IllegalConnective(op, self.logic)


def _evaluate(m, f, w, logic, fmodel):
    check_language(f, logic)
    if w not in m.worlds:
        raise UnknownWorld(w)
    ev = _Evaluator(m, logic, fmodel)
    pos = ev.v(f, w, 1)
    if logic is Logic.KGBL:
        return ValuePair(pos, ev.v(f, w, 2))
    return ValuePair(pos, ONE - pos)


def eval_standard(m, f, w, logic=Logic.KGBL):
    if isinstance(m, FModel):
        m = m.base
    return _evaluate(m, f, w, logic, None)


def eval_fmodel(m, f, w, logic=Logic.KGBL):
    if isinstance(m, Model):
        m = FModel(m)
    return _evaluate(m.base, f, w, logic, m)


def evaluator(m, logic=Logic.KGBL):
    """A reusable memoising evaluator ``(f, w) -> ValuePair`` for one model."""
    fm = m if isinstance(m, FModel) else None
    base = m.base if fm else m
    ev = _Evaluator(base, logic, fm)

    def run(f, w):
        pos = ev.v(f, w, 1)
        return ValuePair(pos, ev.v(f, w, 2) if logic is Logic.KGBL else ONE - pos)

    return run


# ---------------------------------------------------------------- submodels

def generated_submodel(m, roots):
    base = m.base if isinstance(m, FModel) else m
    for r in roots:
        if r not in base.worlds:
            raise UnknownWorld(r)
    seen = set(roots)
    todo = list(roots)
    while todo:
        w = todo.pop()
        for sign in "+-":
            for u, _ in base.successors(w, sign):
                if u not in seen:
                    seen.add(u)
                    todo.append(u)
    worlds = tuple(w for w in base.worlds if w in seen)
    sub = Model(
        worlds,
        {k: x for k, x in base.rel_plus.items() if k[0] in seen},
        {k: x for k, x in base.rel_minus.items() if k[0] in seen},
        {k: x for k, x in base.v1.items() if k[1] in seen},
        {k: x for k, x in base.v2.items() if k[1] in seen},
    )
    if isinstance(m, FModel):
        return FModel(sub, {w: m.T1[w] for w in worlds}, {w: m.T2[w] for w in worlds})
    return sub


# ---------------------------------------------------------------- file I/O

META_KEYS = {"root", "achieved", "query", "logic", "comment"}


def model_to_dict(m):
    base = m.base if isinstance(m, FModel) else m

    def triples(d):
        return [[a, b, fmt(x)] for (a, b), x in sorted(d.items())]

    out = {
        "worlds": list(base.worlds),
        "rel_plus": triples(base.rel_plus),
        "rel_minus": triples(base.rel_minus),
        "v1": triples(base.v1),
        "v2": triples(base.v2),
    }
    if isinstance(m, FModel):
        for attr in ("T1", "T2"):
            out[attr] = {w: [fmt(x) for x in sorted(getattr(m, attr)[w])] for w in base.worlds}
    return out


def save_model(m, **meta):
    d = model_to_dict(m)
    d.update(meta)
    return json.dumps(d, indent=2).encode()


def _rational(x, loc):
    if not isinstance(x, (str, int)) or isinstance(x, bool):
        raise FormatError(loc, f"expected a rational string, got {x!r}")
    try:
        q = Fraction(str(x).strip())
    except (ValueError, ZeroDivisionError):
        raise FormatError(loc, f"malformed rational {x!r}") from None
    if not ZERO <= q <= ONE:
        raise FormatError(loc, f"{x!r} outside [0,1]")
    return q


def _triples(rows, key, worlds, first_is_world):
    if not isinstance(rows, list):
        raise FormatError(key, "expected a list")
    out = {}
    for k, row in enumerate(rows):
        loc = f"{key}[{k}]"
        if not isinstance(row, list) or len(row) != 3:
            raise FormatError(loc, "expected [a, b, \"p/q\"]")
        a, b, x = row
        if not isinstance(a, str) or not isinstance(b, str):
            raise FormatError(loc, "names must be strings")
        for pos, name in enumerate((a, b)):
            if (pos == 0 and not first_is_world) or name in worlds:
                continue
            raise FormatError(f"{loc}[{pos}]", f"unknown world {name!r}")
        out[(a, b)] = _rational(x, f"{loc}[2]")
    return out


def model_from_dict(d):
    if not isinstance(d, dict):
        raise FormatError("$", "expected an object")
    unknown = set(d) - {"worlds", "rel_plus", "rel_minus", "v1", "v2", "T1", "T2"} - META_KEYS
    if unknown:
        raise FormatError(sorted(unknown)[0], "unknown field")
    worlds = d.get("worlds")
    if not isinstance(worlds, list) or not worlds or not all(isinstance(w, str) for w in worlds):
        raise FormatError("worlds", "expected a non-empty list of strings")
    if len(set(worlds)) != len(worlds):
        raise FormatError("worlds", "duplicate world name")
    ws = set(worlds)
    rp = _triples(d.get("rel_plus", []), "rel_plus", ws, True)
    rm = _triples(d.get("rel_minus", []), "rel_minus", ws, True)
    v1 = _triples(d.get("v1", []), "v1", ws, False)
    v2 = _triples(d.get("v2", []), "v2", ws, False)
    base = Model(tuple(worlds), rp, rm, v1, v2)
    if "T1" not in d and "T2" not in d:
        return base
    tsets = {}
    for attr in ("T1", "T2"):
        raw = d.get(attr, {})
        if not isinstance(raw, dict):
            raise FormatError(attr, "expected a map world -> list")
        tsets[attr] = {}
        for w, xs in raw.items():
            if w not in ws:
                raise FormatError(f"{attr}.{w}", "unknown world")
            if not isinstance(xs, list):
                raise FormatError(f"{attr}.{w}", "expected a list")
            tsets[attr][w] = [_rational(x, f"{attr}.{w}[{k}]") for k, x in enumerate(xs)]
    return FModel(base, tsets["T1"], tsets["T2"])


def load_model(data):
    if isinstance(data, bytes):
        data = data.decode()
    try:
        d = json.loads(data)
    except json.JSONDecodeError as e:
        raise FormatError(f"line {e.lineno} col {e.colno}", e.msg) from None
    return model_from_dict(d)
