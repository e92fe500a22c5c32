from itertools import combinations

import pytest

from boxres.errors import PreconditionError, SizeBoundError
from boxres.factorization import verify_witness
from boxres.groups import Cyclic, FiniteProduct, Integers, abelian_groups_up_to
from boxres.oracle import (
    TilingCertificate,
    enumerate_boxes,
    hajos_periodicity_scan,
    odd_torsion_obstruction,
    tile_integers,
    tile_integers_bruteforce,
)


def _naive_boxes(G, index):
    """Every pair (A, B) containing e, checked directly on all products."""
    elements = list(G.elements())
    e = G.identity
    out = set()
    for A in combinations(elements, index):
        if e not in A:
            continue
        for B in combinations(elements, G.order // index):
            if e not in B:
                continue
            if len({G.op(a, b) for a in A for b in B}) == G.order:
                out.add((tuple(sorted(A)), tuple(sorted(B))))
    return out


@pytest.mark.parametrize("G", [Cyclic(4), Cyclic(6), Cyclic(8), FiniteProduct([2, 2, 2]), FiniteProduct([2, 4])],
                         ids=lambda g: g.descriptor)
def test_enumerate_boxes_matches_naive_search(G):
    for d in range(1, G.order + 1):
        if G.order % d:
            continue
        found = enumerate_boxes(G, d)
        assert all(verify_witness(w)["ok"] for w in found)
        assert {(tuple(sorted(w.A)), tuple(sorted(w.B))) for w in found} == _naive_boxes(G, d)


def test_enumerate_boxes_examples():
    found = {(tuple(w.A), tuple(w.B)) for w in enumerate_boxes(Cyclic(4), 2)}
    assert (((0,), (1,)), ((0,), (2,))) in found
    assert (((0,), (2,)), ((0,), (1,))) in found
    assert enumerate_boxes(Cyclic(3), 2) == []
    assert enumerate_boxes(Cyclic(9), 2) == []
    assert enumerate_boxes(FiniteProduct([3, 3]), 2) == []


def test_enumerate_boxes_guards():
    with pytest.raises(PreconditionError):
        enumerate_boxes(Integers(), 2)
    with pytest.raises(SizeBoundError):
        enumerate_boxes(Cyclic(30), 2)


def test_odd_torsion():
    r = odd_torsion_obstruction(Cyclic(5))
    g1 = next(e for e in r.exponents if e["g"] == [1])
    assert g1["w"] == 3 and g1["ok"] and r.ok and r.index2_boxes == 0
    even = odd_torsion_obstruction(Cyclic(6))
    assert not even.applicable and even.order2_element == (3,)
    for G in abelian_groups_up_to(15):
        if G.order % 2:
            assert odd_torsion_obstruction(G).index2_boxes == 0


@pytest.mark.parametrize("A,period,residues", [
    ((0, 2), 4, (0, 1)),
    ((0, 1, 2), 3, (0,)),
    ((0, 3), 2, (0,)),
    ((0, 1, 2, 3), 4, (0,)),
    ((0, 1, 4, 5), 8, (0, 2)),
])
def test_tile_least_period(A, period, residues):
    cert = tile_integers(A, 1000)
    assert cert.period == period and cert.residues == residues and cert.verify()


def test_tile_non_minimal_certificate_still_verifies():
    assert TilingCertificate((0, 3), 6, (0, 1, 2)).verify()
    assert not TilingCertificate((0, 3), 6, (0, 1)).verify()


def test_tile_non_tiling():
    assert tile_integers((0, 1, 3), 4096) is None


def test_tile_input_guard():
    with pytest.raises(PreconditionError):
        tile_integers((1, 2), 10)


def test_automaton_agrees_with_bruteforce():
    for size in range(1, 4):
        for rest in combinations(range(1, 6), size - 1):
            A = (0,) + rest
            fast, slow = tile_integers(A, 12), tile_integers_bruteforce(A, 12)
            assert (fast is None) == (slow is None), A
            if fast is not None:
                assert fast.period == slow.period, A


def test_hajos_scan_small():
    report = hajos_periodicity_scan(8, 3)
    assert report.ok and report.certificates and report.non_tiling
