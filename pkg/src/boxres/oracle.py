"""Brute-force ground truth on finite groups and integer tilings.

Nothing here depends on the construction engines; it exists to check them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from .errors import PreconditionError, SizeBoundError, SoundnessError
from .factorization import FULL_ON_WINDOW, FactorizationWitness
from .groups import Element, Group

DEFAULT_BOUND = 24


def enumerate_boxes(G: Group, index: int, bound: int = DEFAULT_BOUND) -> List[FactorizationWitness]:
    """All factorizations ``G = A B`` with ``|A| = index`` and ``e`` in both factors.

    For every candidate ``B`` the left factor is found by exact-cover
    backtracking: always cover the least uncovered element, trying left
    factors in enumeration order.
    """
    if not G.is_finite:
        raise PreconditionError("enumerate_boxes needs a finite group")
    n = G.order
    if n > bound:
        raise SizeBoundError(f"|G| = {n} exceeds the oracle bound {bound}")
    if index < 1 or n % index:
        return []
    elements = list(G.elements())
    pos = {g: i for i, g in enumerate(elements)}
    mul = [[pos[G._op(a, b)] for b in elements] for a in elements]
    inv = [pos[G._inv(a)] for a in elements]
    full = (1 << n) - 1
    size_b = n // index
    found: List[Tuple[Tuple[int, ...], Tuple[int, ...]]] = []

    for rest in combinations(range(1, n), size_b - 1):
        B = (0,) + rest
        trans = [0] * n
        for a in range(n):
            m = 0
            for b in B:
                m |= 1 << mul[a][b]
            trans[a] = m

        def extend(covered: int, A: List[int]) -> None:
            if covered == full:
                found.append((tuple(sorted(A)), B))
                return
            u = (~covered & (covered + 1)).bit_length() - 1
            for a in sorted({mul[u][inv[b]] for b in B}):
                if not trans[a] & covered:
                    A.append(a)
                    extend(covered | trans[a], A)
                    A.pop()

        extend(trans[0], [0])

    found.sort()
    return [
        FactorizationWitness(G, [elements[i] for i in A], [elements[j] for j in B], FULL_ON_WINDOW, index, n)
        for A, B in found
    ]


@dataclass
class ObstructionReport:
    group: str
    order: int
    applicable: bool
    index2_boxes: int
    exponents: List[dict] = field(default_factory=list)
    order2_element: Optional[Element] = None

    @property
    def ok(self) -> bool:
        if not self.applicable:
            return True
        return self.index2_boxes == 0 and all(e["ok"] for e in self.exponents)

    def to_json(self) -> dict:
        doc = {
            "group": self.group,
            "order": self.order,
            "applicable": self.applicable,
            "index2_boxes": self.index2_boxes,
            "exponents": self.exponents,
            "ok": self.ok,
        }
        if self.order2_element is not None:
            doc["order2_element"] = list(self.order2_element)
        return doc


def odd_torsion_obstruction(G: Group, bound: int = DEFAULT_BOUND) -> ObstructionReport:
    """No boxes of index 2 in a group of odd order.

    Besides the exhaustive count, every ``g != e`` gets the exponent
    ``w = (ord(g) + 1) / 2`` with ``(g^2)^w = g``, so ``g`` lies in ``<g^2>``.
    """
    n = G.order
    if n is None:
        raise PreconditionError("odd_torsion_obstruction needs a finite group")
    if n % 2 == 0:
        g2 = next(g for g in G.elements() if G.element_order(g) == 2)
        return ObstructionReport(G.descriptor, n, False, len(enumerate_boxes(G, 2, bound)), order2_element=g2)
    report = ObstructionReport(G.descriptor, n, True, len(enumerate_boxes(G, 2, bound)))
    for g in G.elements():
        if g == G.identity:
            continue
        k = G.element_order(g)
        w = (k + 1) // 2
        square = G._op(g, g)
        report.exponents.append(
            {"g": list(g), "order": k, "w": w, "ok": G.power(square, w) == g}
        )
    return report


# ------------------------------------------------------------------ tilings


@dataclass(frozen=True)
class TilingCertificate:
    """``A ⊕ residues = Z_period``, certifying ``A ⊕ (residues + period Z) = Z``."""

    A: Tuple[int, ...]
    period: int
    residues: Tuple[int, ...]

    def verify(self) -> bool:
        m = self.period
        hits = [0] * m
        for a in self.A:
            for b in self.residues:
                hits[(a + b) % m] += 1
        exact = all(h == 1 for h in hits)
        periodic = {(b + m) % m for b in self.residues} == {b % m for b in self.residues}
        return exact and periodic

    def to_json(self) -> dict:
        return {"A": list(self.A), "period": self.period, "residues": list(self.residues)}


def _tiling_cycles(A: Sequence[int]) -> List[List[int]]:
    """Cycles of the deterministic left-to-right tiling automaton.

    A state is the coverage bitmask of the next ``max(A) + 1`` positions.  An
    uncovered current position can only be covered by a translate starting
    there, so every state has at most one successor; bi-infinite tilings are
    exactly the cycles, and a cycle of length L is a tiling of period L.
    """
    mask = 0
    for a in A:
        mask |= 1 << a
    nstates = 1 << (max(A) + 1)

    def succ(s: int) -> Optional[int]:
        if s & 1:
            return s >> 1
        if s & mask:
            return None
        return (s | mask) >> 1

    color = [0] * nstates  # 0 new, 1 on current path, 2 finished
    cycles = []
    for start in range(nstates):
        if color[start]:
            continue
        path = []
        s: Optional[int] = start
        while s is not None and color[s] == 0:
            color[s] = 1
            path.append(s)
            s = succ(s)
        if s is not None and color[s] == 1:
            cycles.append(path[path.index(s):])
        for p in path:
            color[p] = 2
    return cycles


def tile_integers(A: Sequence[int], max_period: int) -> Optional[TilingCertificate]:
    """Least-period periodic complement of ``A`` in the integers, if any up to ``max_period``.

    Among the tilings of least period the residue set containing 0 that is
    lexicographically smallest is returned.
    """
    A = tuple(sorted(set(int(a) for a in A)))
    if not A or A[0] != 0:
        raise PreconditionError("A must be a non-empty set with min(A) = 0")
    if max_period < 1:
        raise PreconditionError("max_period must be >= 1")
    cycles = _tiling_cycles(A)
    if not cycles:
        return None
    L = min(len(c) for c in cycles)
    if L > max_period:
        return None
    best = None
    for cyc in cycles:
        if len(cyc) != L:
            continue
        placed = [j for j, s in enumerate(cyc) if not s & 1]
        for b in placed:
            cand = tuple(sorted((x - b) % L for x in placed))
            if best is None or cand < best:
                best = cand
    cert = TilingCertificate(A, L, best)
    if not cert.verify():
        raise SoundnessError(f"tiling automaton produced an invalid certificate {cert}")
    return cert


def tile_integers_bruteforce(A: Sequence[int], max_period: int) -> Optional[TilingCertificate]:
    """Period-by-period exhaustive search; independent check for ``tile_integers``."""
    A = tuple(sorted(set(A)))
    k = len(A)
    for m in range(1, max_period + 1):
        if m % k or len({a % m for a in A}) != k:
            continue
        for rest in combinations(range(1, m), m // k - 1):
            cert = TilingCertificate(A, m, (0,) + rest)
            if cert.verify():
                return cert
    return None


@dataclass
class HajosScanReport:
    diameter: int
    max_size: int
    max_period: int
    examined: int = 0
    certificates: List[TilingCertificate] = field(default_factory=list)
    non_tiling: List[Tuple[int, ...]] = field(default_factory=list)
    counterexamples: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def to_json(self) -> dict:
        return {
            "diameter": self.diameter,
            "max_size": self.max_size,
            "max_period": self.max_period,
            "examined": self.examined,
            "tiling": len(self.certificates),
            "non_tiling": len(self.non_tiling),
            "largest_period": max((c.period for c in self.certificates), default=0),
            "counterexamples": self.counterexamples,
            "ok": self.ok,
        }


def hajos_periodicity_scan(diameter: int = 12, max_size: int = 4) -> HajosScanReport:
    """Every ``A ⊆ [0, diameter)`` with ``0 ∈ A`` and ``|A| <= max_size`` that tiles
    the integers must get a periodic certificate with period ``<= 2^diameter``."""
    max_period = 2 ** diameter
    report = HajosScanReport(diameter, max_size, max_period)
    for size in range(1, max_size + 1):
        for rest in combinations(range(1, diameter), size - 1):
            A = (0,) + rest
            report.examined += 1
            tiles = bool(_tiling_cycles(A))
            cert = tile_integers(A, max_period)
            if cert is not None:
                report.certificates.append(cert)
            elif tiles:
                report.counterexamples.append({"A": list(A), "reason": "tiles but no period <= 2^diameter"})
            else:
                report.non_tiling.append(A)
    return report
