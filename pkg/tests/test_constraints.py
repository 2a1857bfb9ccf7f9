import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgtab.constraints import (C0, C1, Constraint, ConstraintSyntaxError, FreshVar, FVal,
                               OneMinus, RelVal, ResourceLimit, SolverConfig, TTerm, Witness,
                               check_witness, gap_violations, one_minus, oracle_solve,
                               order_conflict, parse_constraints, parse_term, solve,
                               translate_branch, unsat_core)
from kgtab.formula import parse
from kgtab.generate import random_constraints

from models import BRANCH_A, BRANCH_B, WITNESS_A, WITNESS_B, witness_values


def system(text):
    return translate_branch(parse_constraints(text))


def test_translation_of_initial_constraints():
    sys = system("w:1:p < c\nc < 1")
    assert sys.variables == [FVal("w", 1, parse("p")), FreshVar("c")]
    assert [(a.key, rel, b.key) for a, rel, b in sys.rows] == [
        (FVal("w", 1, parse("p")), "<", FreshVar("c")), (FreshVar("c"), "<", None)]
    assert solve(sys) is not None


def test_empty_system():
    sys = translate_branch([])
    assert sys.variables == [] and sys.rows == []
    assert solve(sys) == Witness({})


def test_pairs_are_added_for_every_tterm():
    sys = system("w:1:box p = t0@w:1")
    lo, hi = TTerm("w", 1, 0, 0), TTerm("w", 1, 0, 1)
    assert sys.pairs == [(lo, hi)]
    assert set(sys.gap_groups[("w", 1)]) == {lo, hi}


def test_greater_than_is_oriented():
    sys = system("c > d")
    ((a, rel, b),) = sys.rows
    assert (a.key, rel, b.key) == (FreshVar("d"), "<", FreshVar("c"))


@pytest.mark.parametrize("text,sat", [
    ("c < d\nd < c", False),
    ("w:1:p <= c\nc < 1", True),
    ("x = 1 - x", True),
    ("x < 1 - x\n1 - x < x", False),
    ("x < 0", False),
    ("x > 1", False),
    ("c < 1\nc > 0\nc < d\nd < 1 - c\n1 - c < c", False),
])
def test_small_systems(text, sat):
    sys = system(text)
    assert (solve(sys) is not None) == sat
    assert (oracle_solve(sys) is not None) == sat


def test_forced_midpoint():
    wit = solve(system("x = 1 - x"))
    assert wit.values[FreshVar("x")] == Q(1, 2)


def test_gap_forcing_is_unsat():
    text = "t0@w:1 < t0@w:1#1\nt0@w:1#1 < t1@w:1"
    assert solve(system(text)) is None
    assert oracle_solve(system(text)) is None
    # the same terms in different truth-index groups do not interact
    assert solve(system("t0@w:1 < t0@w:2\nt0@w:2 < t1@w:1")) is not None


def test_gap_pairs_may_coincide():
    text = "t0@w:1 = t0@w:1#1\nt1@w:1 = t1@w:1#1"
    assert solve(system(text)) is not None


@pytest.mark.parametrize("branch,named", [(BRANCH_A, WITNESS_A), (BRANCH_B, WITNESS_B)])
def test_reference_branches(branch, named):
    sys = system(branch)
    values = witness_values(named)
    assert set(values) == set(sys.variables)
    assert check_witness(sys, values)
    wit = solve(sys)
    assert wit is not None and check_witness(sys, wit)


def test_witness_a_values():
    values = witness_values(WITNESS_A)
    assert values[RelVal("w", "+", "u")] == Q(1, 5)
    assert values[FVal("u", 1, parse("p"))] == Q(2, 5)
    assert (values[TTerm("w", 1, 0, 0)], values[TTerm("w", 1, 0, 1)]) == (Q(1, 6), Q(1, 4))


def test_witness_breaking_the_gap_is_rejected():
    sys = system(BRANCH_B)
    values = witness_values(WITNESS_B)
    values[TTerm("w", 1, 1, 1)] = Q(19, 20)   # dia pair now straddles the box pair
    assert gap_violations(sys, values)
    assert not check_witness(sys, values)


def test_one_minus_normalises():
    x = FreshVar("x")
    assert one_minus(one_minus(x)) == x
    assert one_minus(C0) == C1
    assert isinstance(one_minus(x), OneMinus)


def test_parse_terms():
    assert parse_term("t1@w:2#3") == TTerm("w", 2, 3, 1)
    assert parse_term("w R- u") == RelVal("w", "-", "u")
    assert parse_term("1 - c") == OneMinus(FreshVar("c"))
    assert parse_term("1/2").value == Q(1, 2)
    assert parse_term("w:2:p -> q") == FVal("w", 2, parse("p -> q"))


@pytest.mark.parametrize("text", ["c", "c < d < e", "c < 3/2", "w:1:p -> < c", "c < %"])
def test_constraint_syntax_errors(text):
    with pytest.raises(ConstraintSyntaxError):
        parse_constraints(text)


def test_explain_lists_rows_pairs_and_groups():
    out = system("w:1:box p = t0@w:1\nc < 1 - c").explain()
    assert "pair t0@w:1 < t1@w:1" in out
    assert "gap group (w, 1)" in out
    assert "c < 1 - c" in out


def test_split_limit_is_reported():
    # the first candidate interleaves the pairs, refuting it needs case splits
    sys = system("t0@w:1 < t1@w:1#1\nt0@w:1#1 < t1@w:1\nt0@w:1 < t0@w:1#1")
    with pytest.raises(ResourceLimit):
        solve(sys, SolverConfig(max_splits=0))
    assert solve(sys) is None
    assert oracle_solve(sys) is None


def test_oracle_bound():
    sys = system("\n".join(f"x{k} < x{k + 1}" for k in range(8)))
    with pytest.raises(ResourceLimit):
        oracle_solve(sys)


def _random_system(seed):
    rng = random.Random(seed)
    return random_constraints(rng, n_vars=rng.randint(2, 6), n_rows=rng.randint(1, 7),
                              n_pairs=rng.randint(0, 2), worlds=("w", "v"))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_solver_agrees_with_oracle(seed):
    cs = _random_system(seed)
    sys = translate_branch(cs)
    wit = solve(sys)
    assert (wit is None) == (oracle_solve(sys) is None)
    if wit is not None:
        assert check_witness(sys, wit)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_complement_coherence(seed):
    cs = _random_system(seed)
    wit = solve(translate_branch(cs))
    if wit is None:
        return
    for c in cs:
        for t in (c.lhs, c.rhs):
            assert wit[one_minus(t)] == 1 - wit[t]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(0, 10 ** 9))
def test_monotonicity(seed, extra_seed):
    cs = _random_system(seed)
    more = cs + _random_system(extra_seed)
    if solve(translate_branch(cs)) is None:
        assert solve(translate_branch(more)) is None


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_unsat_core_is_unsat(seed):
    cs = _random_system(seed)
    sys = translate_branch(cs)
    core = unsat_core(sys)
    if core is None:
        assert solve(sys) is not None
        return
    rows, pairs = core
    sub = [cs[k] for k in sorted(rows)] + [Constraint(lo, "<", hi) for lo, hi in pairs]
    assert solve(translate_branch(sub)) is None


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_order_conflict_is_sound(seed):
    cs = _random_system(seed)
    rows = order_conflict(translate_branch(cs))
    if rows is not None:
        sub = [cs[k] for k in sorted(rows)]
        assert solve(translate_branch(sub)) is None


def test_witness_prefers_small_denominators():
    wit = solve(system("w:1:p < c\nc < 1"))
    assert all(x.denominator <= 4 for x in wit.values.values())
