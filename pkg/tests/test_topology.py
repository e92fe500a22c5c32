import itertools

import pytest

from boxres.errors import PreconditionError, UnsupportedInstanceError
from boxres.groups import Cyclic, Integers, boolean_group, multiples
from boxres.topology import (
    BasisVectors,
    DiscreteTopology,
    Factorials,
    FiniteIndexTopology,
    ProductTopology,
    is_dense_window,
    tail_index,
    total_boundedness_cover,
)

Z = Integers()
BOOL = boolean_group()


def test_total_boundedness_covers():
    assert multiples(Z, 3).transversal_hint() == [(0,), (1,), (2,)]
    assert total_boundedness_cover(ProductTopology(BOOL), 2) == [(), (1,), (0, 1), (1, 1)]
    assert len(total_boundedness_cover(DiscreteTopology(Cyclic(6)), 1)) == 6


def test_covers_meet_every_coset():
    base = FiniteIndexTopology(Z)
    for k in range(5):
        level = base.level(k)
        cover = total_boundedness_cover(base, k)
        assert len({level.coset_key(z) for z in cover}) == level.index == len(cover)


def test_density_examples():
    even = [(2 * i,) for i in range(-50, 50)]
    report = is_dense_window(FiniteIndexTopology(Z), even, 2, 10)
    assert any(c.level == "2Z" and c.target == (1,) and c.witness is None for c in report.cells)
    report = is_dense_window(ProductTopology(BOOL), [()], 1, 5)
    cell = next(c for c in report.cells if c.level == "U_1" and c.target == (1,))
    assert cell.witness is None and not report.all_witnessed


def test_tail_index_examples():
    assert tail_index(BasisVectors(BOOL), 3) == 3
    f = Factorials(Z)
    assert tail_index(f, 3) == 3
    assert tail_index(f, 0) == 0


def test_sequence_instance_checks():
    with pytest.raises(UnsupportedInstanceError):
        BasisVectors(Z)
    with pytest.raises(UnsupportedInstanceError):
        Factorials(BOOL)
    with pytest.raises(UnsupportedInstanceError):
        ProductTopology(Cyclic(4))
    with pytest.raises(PreconditionError):
        BasisVectors(BOOL).bad_indices(BOOL.basis(3))


def test_code_round_trip():
    s = BasisVectors(BOOL)
    for i in range(200):
        x = BOOL.enumerate(i)
        assert s.decode(s.encode(x)) == x
        assert s.encode(x) == i  # mixed radix over 2 is binary


@pytest.mark.parametrize("seq", [BasisVectors(BOOL), Factorials(Z)], ids=lambda s: s.name)
def test_capabilities_agree_with_brute_force(seq):
    """Probes are small enough that every representation uses indices <= 12."""
    G = seq.group
    A = seq.A_n(12)
    Aset = set(A)
    AinvA = {G.op(G.inv(a), b) for a in A for b in A}
    small = seq.A_n(8)
    probes = {G.enumerate(i) for i in range(400)} | {G.op(a, b) for a in small for b in small}
    for x in probes:
        assert seq.member_of_A(x) == (x in Aset)
        assert seq.member_of_AinvA(x) == (x in AinvA)
    for k in range(5):
        C = [c for c in A if c != G.identity and seq.sequence_index(c) > k]
        CC = {G.op(c, d) for c in C for d in C}
        for x in probes:
            assert seq.member_of_CkCk(k, x) == (x in CC), (k, x)
        for c in A:
            assert seq.member_of_C(k, c) == (c in C)


@pytest.mark.parametrize("seq", [BasisVectors(BOOL), Factorials(Z)], ids=lambda s: s.name)
def test_bad_indices_match_window_search(seq):
    """``m`` is bad for ``d`` iff ``a_m^±1`` lies in ``A^-1 A d`` (indices <= 9)."""
    G = seq.group
    window = 9
    A = seq.A_n(window)
    terms = {}
    for m in range(seq.start, window + 1):
        for t in (seq.term(m), G.inv(seq.term(m))):
            terms[t] = m
    for i in range(1, 300):
        d = G.enumerate(i)
        if seq.member_of_A(d):
            continue
        brute = {terms[G.op(G.op(G.inv(a), b), d)] for a in A for b in A
                 if G.op(G.op(G.inv(a), b), d) in terms}
        assert {m for m in seq.bad_indices(d) if m <= window} == brute, d


def test_factorial_decompositions_exhaustive():
    f = Factorials(Z)
    terms = [s * f.factorial(i) for i in range(2, 8) for s in (1, -1)]
    sums = {0}
    for r in (1, 2, 3):
        for combo in itertools.combinations_with_replacement(terms, r):
            sums.add(sum(combo))
    for x in range(-5000, 5000):
        assert (x in sums) == any(True for _ in f.decompositions(x, 3)), x
