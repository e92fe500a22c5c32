import math

import pytest

from boxres.errors import BudgetExceededError, PreconditionError
from boxres.groups import Integers, boolean_group
from boxres.theorem1 import (
    Theorem1Engine,
    member_of_AB,
    run_theorem1,
    separation_bruteforce,
    separation_k,
)
from boxres.topology import BasisVectors, Factorials

BOOL = boolean_group()
Z = Integers()


@pytest.fixture(scope="module")
def boolean_run():
    return run_theorem1(BasisVectors(BOOL), 4)


@pytest.fixture(scope="module")
def factorial_run():
    return run_theorem1(Factorials(Z), 4)


def test_member_of_AB_examples():
    seq = BasisVectors(BOOL)
    e = BOOL.identity
    assert member_of_AB(seq, BOOL.basis(5), [e])
    assert not member_of_AB(seq, (1, 1), [e])
    B = [(1, 1), (0, 1, 1)]
    assert all(member_of_AB(seq, b, B) for b in B)


def test_separation_boolean_example():
    seq = BasisVectors(BOOL)
    F, g = [BOOL.identity], (1, 1)
    k = separation_k(seq, F, g)
    assert k <= 2
    assert separation_bruteforce(seq, F, g, k, 50) is None
    assert separation_bruteforce(seq, F, g, k - 1, 50) is not None  # k is least


def test_separation_factorial_example():
    seq = Factorials(Z)
    assert separation_k(seq, [(0,)], (1,)) == 0
    assert separation_bruteforce(seq, [(0,)], (1,), 0, 12) is None


def test_separation_empty_and_precondition():
    seq = BasisVectors(BOOL)
    assert separation_k(seq, [], (1, 1)) == 0
    with pytest.raises(PreconditionError):
        separation_k(seq, [BOOL.identity], BOOL.basis(4))


@pytest.mark.parametrize("seq", [BasisVectors(BOOL), Factorials(Z)], ids=lambda s: s.name)
def test_separation_is_exact_on_windows(seq, boolean_run, factorial_run):
    run = boolean_run if isinstance(seq, BasisVectors) else factorial_run
    F = run.records[2].B
    G = seq.group
    checked = 0
    for i in range(200):
        g = run.H.enumerate(i)
        if member_of_AB(seq, g, F):
            continue
        k = separation_k(seq, F, g)
        assert separation_bruteforce(seq, F, g, k, 14) is None, g
        if k > 0:
            assert separation_bruteforce(seq, F, g, k - 1, 14) is not None, g
        checked += 1
    assert checked > 20


def test_stage_zero():
    res = run_theorem1(BasisVectors(BOOL), 0)
    assert res.B == [BOOL.identity] and res.records[0].n == 0


def test_stage_one_boolean(boolean_run):
    rec = boolean_run.records[1]
    assert rec.g == (1, 1)  # first element that is neither 0 nor a basis vector
    assert BOOL.identity in rec.B and BOOL.op(rec.c, rec.g) in rec.B


@pytest.mark.parametrize("name", ["boolean_run", "factorial_run"])
def test_stage_invariants(name, request):
    res = request.getfixturevalue(name)
    seq = res.seq
    for prev, rec in zip(res.records, res.records[1:]):
        assert set(prev.B) < set(rec.B)
        assert all(rec.checks.values()) and set(rec.checks) == {"partial", "coverage", "placement"}
        assert len(rec.c_list) == len(rec.x_list)
        assert all(member_of_AB(seq, res.H.enumerate(i), rec.B) for i in range(rec.n + 1))
        assert rec.B == prev.B + [seq.group.op(rec.c, rec.g)] + [
            seq.group.op(ci, seq.group.op(rec.s, x)) for ci, x in zip(rec.c_list, rec.x_list)
        ]


def test_growth_is_at_least_factorial(boolean_run, factorial_run):
    for res in (boolean_run, factorial_run):
        sizes = [len(r.B) for r in res.records]
        assert all(a < b for a, b in zip(sizes, sizes[1:]))
        assert all(s >= math.factorial(n) for n, s in enumerate(sizes))


def test_factorials_run_inside_even_integers(factorial_run):
    assert factorial_run.H.label == "2Z"
    assert all(b[0] % 2 == 0 for b in factorial_run.B)
    assert factorial_run.R == [(0,), (1,)]
    assert len(factorial_run.lifted_B) == 2 * len(factorial_run.B)


def test_budget_error_carries_transcript():
    with pytest.raises(BudgetExceededError) as info:
        Theorem1Engine(BasisVectors(BOOL), max_elements=50).run(10)
    assert [r.n for r in info.value.transcript] == [0, 1, 2, 3]


def test_determinism(boolean_run):
    again = run_theorem1(BasisVectors(BOOL), 4)
    assert [r.to_json() for r in again.records] == [r.to_json() for r in boolean_run.records]
