import pytest
from hypothesis import given, settings

from kgtab import formula as F
from kgtab.formula import FormulaSyntaxError, IllegalConnective, Logic, desugar, parse, to_text

from strategies import formulas

p, q, r = F.Var("p"), F.Var("q"), F.Var("r")
MIXED = "box(p -> idia(neg q)) or conf r"


def test_parse_simple_implication():
    assert parse("p -> p") == F.Impl(p, p)


def test_parse_bilattice_example():
    expected = F.Or(F.Box(F.Impl(p, F.IDia(F.Neg(q)))), F.Conf(r))
    assert parse("box(p -> idia (neg q)) or conf r") == expected
    assert to_text(expected) == MIXED


def test_syntax_error_points_at_second_arrow():
    with pytest.raises(FormulaSyntaxError) as err:
        parse("p -> -> q")
    assert err.value.position == 5
    assert "variable" in err.value.expected


@pytest.mark.parametrize("text", ["", "p &", "(p", "p q", "box", "inv -> p", "p $ q", "B1"])
def test_malformed_inputs_raise(text):
    with pytest.raises(FormulaSyntaxError):
        parse(text)


def test_print_double_inversion():
    assert to_text(F.Inv(F.Inv(p))) == "inv inv p"


@pytest.mark.parametrize("text,expected", [
    ("p -> q -> r", F.Impl(p, F.Impl(q, r))),
    ("p -< q -< r", F.Coimpl(F.Coimpl(p, q), r)),
    ("p & q or r", F.Or(F.And(p, q), r)),
    ("p or q -> r", F.Impl(F.Or(p, q), r)),
    ("p -> q -< r", F.Coimpl(F.Impl(p, q), r)),
    ("box p & q", F.And(F.Box(p), q)),
    ("p iand q ior r iimpl p", F.IImpl(F.IOr(F.IAnd(p, q), r), p)),
    ("p <-> q", F.Iff(p, q)),
])
def test_precedence(text, expected):
    assert parse(text) == expected


def test_reserved_words_are_not_variables():
    with pytest.raises(FormulaSyntaxError):
        parse("box & p")


@settings(max_examples=300)
@given(formulas(Logic.KGBL))
def test_round_trip(f):
    assert parse(to_text(f)) == f


@pytest.mark.parametrize("logic", list(Logic))
def test_round_trip_each_language(logic):
    @settings(max_examples=100)
    @given(formulas(logic))
    def check(f):
        assert parse(to_text(f)) == f
        assert F.in_language(f, logic)
    check()


@pytest.mark.parametrize("logic", list(Logic))
def test_desugar_idempotent_and_closed(logic):
    @settings(max_examples=150)
    @given(formulas(logic))
    def check(f):
        core = desugar(f, logic)
        assert desugar(core, logic) == core
        assert F.ops(core) <= F.CORE[logic]
        assert F.props(core) == F.props(f)
    check()


def test_desugar_disjunction():
    assert desugar(parse("p or q"), Logic.KGINV) == F.Inv(F.And(F.Inv(p), F.Inv(q)))


def test_desugar_delta_follows_coimplication_definition():
    one = F.TOP
    one_coimpl_p = F.Inv(F.Impl(F.Inv(p), F.Inv(one)))
    expected = F.Inv(F.Impl(F.Inv(one_coimpl_p), F.Inv(one)))
    assert desugar(F.Delta(p), Logic.KGINV) == expected


def test_desugar_identity_on_core():
    for logic in Logic:
        assert desugar(p, logic) == p


def test_illegal_connective():
    with pytest.raises(IllegalConnective):
        desugar(parse("neg p"), Logic.KGINV)
    with pytest.raises(IllegalConnective):
        desugar(parse("box1 p"), Logic.KGINV)
    with pytest.raises(IllegalConnective):
        F.check_language(parse("box1 p"), Logic.KGBL)


@pytest.mark.parametrize("text,size,depth", [
    ("p", 1, 0),
    ("box p", 2, 1),
    (MIXED, 9, 2),
    ("box box dia p -> q", 6, 3),
])
def test_measures(text, size, depth):
    f = parse(text)
    assert F.size(f) == size
    assert F.modal_depth(f) == depth


def test_props():
    assert F.props(parse(MIXED)) == {"p", "q", "r"}
    assert F.props(parse("1 -> B")) == set()


def test_formula_hash_is_structural():
    a, b = parse("box(p & q) -> r"), parse("box(p & q) -> r")
    assert a == b and hash(a) == hash(b) and len({a, b}) == 1
