"""Formula syntax: AST, parser, printer, desugaring and language checks.

Three languages share one AST:

* ``KGINV``  Gödel modal logic with involutive negation (box, dia).
* ``KGINV2`` the bi-modal variant with indexed modalities box1/dia1/box2/dia2.
* ``KGBL``   the bi-lattice language with paired truth/falsity support.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass


class Logic(enum.Enum):
    KGINV = "kginv"
    KGINV2 = "kginv2"
    KGBL = "kgbl"

    @classmethod
    def parse(cls, text):
        try:
            return cls(text.lower())
        except ValueError:
            raise ValueError(f"unknown logic {text!r}") from None


# node kinds
VAR = "var"
ONE, ZERO, BOTH, NEITHER = "1", "0", "B", "N"
INV, NEG, CONF, DELTA, SNOT, IDELTA, ISNOT = (
    "inv", "neg", "conf", "delta", "snot", "idelta", "isnot")
AND, OR, IMPL, COIMPL = "&", "or", "->", "-<"
IAND, IOR, IIMPL, ICOIMPL = "iand", "ior", "iimpl", "icoimpl"
BOX, DIA, IBOX, IDIA = "box", "dia", "ibox", "idia"
BOX1, DIA1, BOX2, DIA2 = "box1", "dia1", "box2", "dia2"

CONSTANTS = (ONE, ZERO, BOTH, NEITHER)
UNARY = (INV, NEG, CONF, DELTA, SNOT, IDELTA, ISNOT)
MODAL = (BOX, DIA, IBOX, IDIA, BOX1, DIA1, BOX2, DIA2)
PREFIX = UNARY + MODAL
BINARY = (AND, OR, IMPL, COIMPL, IAND, IOR, IIMPL, ICOIMPL)

_INV_NODES = frozenset({VAR, ONE, ZERO, INV, DELTA, SNOT, AND, OR, IMPL, COIMPL})
LANGUAGE = {
    Logic.KGINV: _INV_NODES | {BOX, DIA},
    Logic.KGINV2: _INV_NODES | {BOX, DIA, BOX1, DIA1, BOX2, DIA2},
    Logic.KGBL: frozenset({VAR, *CONSTANTS, *UNARY, *BINARY, BOX, DIA, IBOX, IDIA}),
}
CORE = {
    Logic.KGINV: frozenset({VAR, ONE, ZERO, INV, AND, IMPL, BOX, DIA}),
    Logic.KGINV2: frozenset({VAR, ONE, ZERO, INV, AND, IMPL, BOX, DIA,
                             BOX1, DIA1, BOX2, DIA2}),
    Logic.KGBL: frozenset({VAR, *CONSTANTS, INV, NEG, CONF, AND, IMPL, IAND, IIMPL,
                           BOX, DIA, IBOX, IDIA}),
}


class IllegalConnective(ValueError):
    def __init__(self, op, logic):
        super().__init__(f"connective {op!r} is not part of {logic.value}")
        self.op = op
        self.logic = logic


class FormulaSyntaxError(ValueError):
    """Parse failure carrying the character offset and the expected tokens."""

    def __init__(self, position, expected, found):
        exp = ", ".join(sorted(expected))
        super().__init__(f"at position {position}: expected one of {{{exp}}}, found {found!r}")
        self.position = position
        self.expected = frozenset(expected)
        self.found = found


@dataclass(frozen=True)
class Formula:
    op: str
    args: tuple = ()
    name: str | None = None

    def __hash__(self):
        # formulas are hashed constantly by the prover; cache the deep hash
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.op, self.args, self.name))
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        if self.op == VAR:
            return f"Var({self.name!r})"
        if not self.args:
            return f"Const({self.op!r})"
        return f"{self.op}({', '.join(map(repr, self.args))})"

    @property
    def is_modal(self):
        return self.op in MODAL


def Var(name):
    return Formula(VAR, (), name)


TOP = Formula(ONE)
BOT = Formula(ZERO)
B = Formula(BOTH)
N = Formula(NEITHER)


def _unary(op):
    return lambda f: Formula(op, (f,))


def _binary(op):
    return lambda f, g: Formula(op, (f, g))


Inv, Neg, Conf, Delta, SNot, IDelta, ISNot = map(_unary, UNARY)
Box, Dia, IBox, IDia, Box1, Dia1, Box2, Dia2 = map(_unary, MODAL)
And, Or, Impl, Coimpl, IAnd, IOr, IImpl, ICoimpl = map(_binary, BINARY)


def Iff(f, g):
    return And(Impl(f, g), Impl(g, f))


# ---------------------------------------------------------------- measures

def subformulas(f):
    """All subformula occurrences, children before parents."""
    out = []
    stack = [(f, False)]
    while stack:
        g, done = stack.pop()
        if done:
            out.append(g)
            continue
        stack.append((g, True))
        stack.extend((a, False) for a in reversed(g.args))
    return out


def size(f):
    return len(subformulas(f))


def props(f):
    return frozenset(g.name for g in subformulas(f) if g.op == VAR)


def modal_depth(f):
    depth = {}
    for g in subformulas(f):
        inner = max((depth[a] for a in g.args), default=0)
        depth[g] = inner + (1 if g.op in MODAL else 0)
    return depth[f]


def ops(f):
    return frozenset(g.op for g in subformulas(f))


def check_language(f, logic):
    for op in ops(f):
        if op not in LANGUAGE[logic]:
            raise IllegalConnective(op, logic)


def in_language(f, logic):
    return ops(f) <= LANGUAGE[logic]


# ---------------------------------------------------------------- desugaring

def _coimpl_inv(a, b):
    # a -< b := inv(inv b -> inv a)
    return Inv(Impl(Inv(b), Inv(a)))


def _coimpl_bl(a, b):
    return Neg(Impl(Neg(b), Neg(a)))


def _icoimpl_bl(a, b):
    # information-order co-implication, componentwise Gödel co-implication
    return Conf(IImpl(Conf(b), Conf(a)))


def desugar(f, logic):
    """Rewrite defined connectives into the core connectives of ``logic``."""
    check_language(f, logic)
    bl = logic is Logic.KGBL
    memo = {}
    for g in subformulas(f):
        if g in memo:
            continue
        a = tuple(memo[x] for x in g.args)
        op = g.op
        if op == OR:
            r = Neg(And(Neg(a[0]), Neg(a[1]))) if bl else Inv(And(Inv(a[0]), Inv(a[1])))
        elif op == COIMPL:
            r = _coimpl_bl(*a) if bl else _coimpl_inv(*a)
        elif op == SNOT:
            r = Impl(a[0], BOT)
        elif op == DELTA:
            co = _coimpl_bl if bl else _coimpl_inv
            r = co(TOP, co(TOP, a[0]))
        elif op == IOR:
            r = Conf(IAnd(Conf(a[0]), Conf(a[1])))
        elif op == ICOIMPL:
            r = _icoimpl_bl(*a)
        elif op == IDELTA:
            r = _icoimpl_bl(B, _icoimpl_bl(B, a[0]))
        elif op == ISNOT:
            r = IImpl(a[0], N)
        else:
            r = Formula(op, a, g.name)
        memo[g] = r
    return memo[f]


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(<->|->|-<|[()&|])|([A-Za-z0-9_]+))")
_KEYWORD_BINARY = {"and": AND, "or": OR, "iand": IAND, "ior": IOR,
                   "iimpl": IIMPL, "icoimpl": ICOIMPL}
_SYMBOL_BINARY = {"&": AND, "|": OR, "->": IMPL, "-<": COIMPL}
RESERVED = frozenset(PREFIX) | frozenset(_KEYWORD_BINARY) | {"B", "N"}
_VAR_RE = re.compile(r"[a-z][a-z0-9_]*\Z")

# binding strength, loosest first
_LEVEL = {COIMPL: 1, ICOIMPL: 1, IMPL: 2, IIMPL: 2, OR: 3, IOR: 3, AND: 4, IAND: 4}


def _tokenize(text):
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise FormulaSyntaxError(start, {"formula"}, text[start])
        word = m.group(1) or m.group(2)
        toks.append((word, m.start(m.lastindex)))
        pos = m.end()
    toks.append(("<end>", len(text)))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def fail(self, expected):
        word, pos = self.toks[self.i]
        raise FormulaSyntaxError(pos, expected, word)

    def take(self):
        tok = self.toks[self.i][0]
        self.i += 1
        return tok

    def binop(self, level):
        tok = self.peek()
        op = _SYMBOL_BINARY.get(tok) or _KEYWORD_BINARY.get(tok)
        if op is not None and _LEVEL[op] == level:
            return op
        return None

    def parse(self):
        f = self.coimpl()
        if self.peek() != "<end>":
            self.fail({"end of input", "binary operator"})
        return f

    def coimpl(self):
        f = self.impl()
        while (op := self.binop(1)) is not None:
            self.take()
            f = Formula(op, (f, self.impl()))
        return f

    def impl(self):
        f = self.disj()
        op = self.binop(2)
        if op is not None:
            self.take()
            return Formula(op, (f, self.impl()))
        if self.peek() == "<->":
            self.take()
            return Iff(f, self.disj())
        return f

    def disj(self):
        f = self.conj()
        while (op := self.binop(3)) is not None:
            self.take()
            f = Formula(op, (f, self.conj()))
        return f

    def conj(self):
        f = self.unary()
        while (op := self.binop(4)) is not None:
            self.take()
            f = Formula(op, (f, self.unary()))
        return f

    def unary(self):
        tok = self.peek()
        if tok in PREFIX:
            self.take()
            return Formula(tok, (self.unary(),))
        return self.atom()

    def atom(self):
        tok = self.peek()
        if tok == "(":
            self.take()
            f = self.coimpl()
            if self.peek() != ")":
                self.fail({")"})
            self.take()
            return f
        if tok in CONSTANTS:
            self.take()
            return Formula(tok)
        if tok not in RESERVED and _VAR_RE.match(tok):
            self.take()
            return Var(tok)
        self.fail({"variable", "constant", "(", "prefix operator"})


def parse(text):
    return _Parser(text).parse()


# ---------------------------------------------------------------- printing

def _level(f):
    if f.op in _LEVEL:
        return _LEVEL[f.op]
    return 5 if f.op in PREFIX else 6


def to_text(f):
    if f.op == VAR:
        return f.name
    if not f.args:
        return f.op
    if f.op in PREFIX:
        (a,) = f.args
        inner = to_text(a)
        # information modalities bracket any compound operand: idia(neg q)
        if _level(a) < 5 or (f.op in (IBOX, IDIA) and _level(a) < 6):
            return f"{f.op}({inner})"
        return f"{f.op} {inner}"
    lvl = _LEVEL[f.op]
    left, right = f.args
    right_assoc = lvl == 2
    lt, rt = to_text(left), to_text(right)
    if _level(left) < lvl or (right_assoc and _level(left) == lvl):
        lt = f"({lt})"
    if _level(right) < lvl or (not right_assoc and _level(right) == lvl):
        rt = f"({rt})"
    return f"{lt} {f.op} {rt}"
