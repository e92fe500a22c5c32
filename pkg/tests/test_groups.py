import pytest
from hypothesis import given, settings, strategies as st

from boxres.errors import InstanceMismatchError, InvalidSeedError, PreconditionError
from boxres.groups import (
    Cyclic,
    DirectSum,
    FiniteProduct,
    Integers,
    abelian_groups_up_to,
    all_subgroups,
    boolean_group,
    coset_transversal,
    multiples,
    parse_element,
    parse_group,
    subgroup_generated,
    tail_subgroup,
)

Z = Integers()
BOOL = boolean_group()
GROUPS = [Z, BOOL, Cyclic(6), Cyclic(9), FiniteProduct([2, 4]), DirectSum([3], repeating=True)]


def test_operation_examples():
    assert Z.op((3,), (-5,)) == (-2,)
    assert Cyclic(4).op((3,), (2,)) == (1,)
    e0 = BOOL.basis(0)
    assert BOOL.op(e0, e0) == BOOL.identity == ()


def test_check_rejects_non_canonical():
    with pytest.raises(InstanceMismatchError):
        BOOL.check((1, 0))
    with pytest.raises(InstanceMismatchError):
        Cyclic(4).check((4,))
    with pytest.raises(InstanceMismatchError):
        Z.op((1,), (1, 2))


@pytest.mark.parametrize("G", GROUPS, ids=lambda g: g.descriptor)
def test_enumeration_is_a_bijection_on_a_prefix(G):
    n = 300 if G.order is None else G.order
    seen = [G.enumerate(i) for i in range(n)]
    assert len(set(seen)) == n
    assert seen[0] == G.identity
    assert all(G.index_of(g) == i for i, g in enumerate(seen))


def _element(G):
    limit = 500 if G.order is None else G.order - 1
    return st.integers(0, limit).map(G.enumerate)


@pytest.mark.parametrize("G", GROUPS, ids=lambda g: g.descriptor)
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_group_axioms(G, data):
    x, y, z = (data.draw(_element(G)) for _ in range(3))
    assert G.op(G.op(x, y), z) == G.op(x, G.op(y, z))
    assert G.op(x, G.identity) == x
    assert G.op(x, G.inv(x)) == G.identity
    assert G.op(x, y) == G.op(y, x)
    assert G.div(x, y) == G.op(x, G.inv(y))


def test_subgroup_generated_examples():
    H = subgroup_generated(Z, [(4,), (6,)])
    assert H.index == 2 and H.contains((2,)) and not H.contains((3,))
    W = subgroup_generated(Cyclic(9), [(2,)])
    assert W.order == 9 and W.index == 1


def test_boolean_span_membership_and_keys():
    H = subgroup_generated(BOOL, [BOOL.basis(0), BOOL.op(BOOL.basis(1), BOOL.basis(2))])
    assert H.order == 4 and H.index is None
    assert H.contains((0, 1, 1)) and not H.contains((0, 1))
    assert H.same_coset((0, 1), (1, 0, 1))


def test_tail_subgroup_index():
    assert tail_subgroup(BOOL, 3).index == 8
    assert tail_subgroup(BOOL, 3).contains((0, 0, 0, 1))


def test_transversal_seed_and_conflict():
    G = Cyclic(6)
    H = subgroup_generated(G, [(3,)])
    assert coset_transversal(H, 6, seed=[(5,)]) == [(5,), (0,), (1,)]
    with pytest.raises(InvalidSeedError):
        coset_transversal(H, 6, seed=[(1,), (4,)])


@pytest.mark.parametrize("G", [Cyclic(8), FiniteProduct([2, 2, 2]), FiniteProduct([2, 6])], ids=lambda g: g.descriptor)
def test_every_transversal_meets_each_coset_once(G):
    for H in all_subgroups(G):
        R = coset_transversal(H, G.order)
        assert len(R) == H.index
        covered = {G.op(h, r) for h in H.elements() for r in R}
        assert len(covered) == G.order


def test_subgroup_counts():
    assert len(all_subgroups(FiniteProduct([2, 2, 2, 2]))) == 67
    assert len(all_subgroups(Cyclic(12))) == 6


def test_abelian_groups_up_to_16():
    groups = abelian_groups_up_to(16)
    assert len(groups) == 25
    assert sum(1 for G in groups if G.order == 16) == 5
    assert sum(1 for G in groups if G.order == 8) == 3


def test_parsing():
    assert parse_group("dsum:2*") == BOOL
    assert parse_group("cyclic:5") == Cyclic(5)
    assert parse_element(BOOL, "e0+e2") == (1, 0, 1)
    assert parse_element(BOOL, "[0,1,0]") == (0, 1)
    assert parse_element(Z, "-7") == (-7,)
    with pytest.raises(PreconditionError):
        parse_group("klein")
    with pytest.raises(PreconditionError):
        parse_element(Z, "e3")


def test_multiples_zero_is_trivial():
    H = multiples(Z, 0)
    assert H.order == 1 and H.index is None and H.contains((0,)) and not H.contains((1,))
