"""Group topologies given by chains of finite-index subgroups at the identity,
convergent sequences with exact membership capabilities, and windowed density
reports."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterator, List, Optional, Sequence, Set, Tuple

from .errors import CapabilityViolationError, PreconditionError, UnsupportedInstanceError
from .groups import (
    DirectSum,
    Element,
    Group,
    Integers,
    SubgroupView,
    multiples,
    tail_subgroup,
    trivial_subgroup,
    whole_group,
)


# ------------------------------------------------------------------ bases


class NeighborhoodBase:
    """Decreasing chain ``U_0 >= U_1 >= ...`` of finite-index subgroups."""

    name = ""

    def __init__(self, group: Group):
        self.group = group
        self._levels: Dict[int, SubgroupView] = {}

    def _make_level(self, k: int) -> SubgroupView:
        raise NotImplementedError

    def level(self, k: int) -> SubgroupView:
        if k < 0:
            raise PreconditionError("levels are indexed from 0")
        if k not in self._levels:
            self._levels[k] = self._make_level(k)
        return self._levels[k]

    def index_of_level(self, k: int) -> int:
        return self.level(k).index

    def density_levels(self, depth: int) -> List[Tuple[str, SubgroupView]]:
        """Neighborhoods checked by density reports up to ``depth``."""
        return [(f"U_{k}", self.level(k)) for k in range(depth + 1)]

    @property
    def descriptor(self) -> str:
        return self.name


class FiniteIndexTopology(NeighborhoodBase):
    """Topology of finite indices on the integers.

    The chain is ``U_k = k! Z``, cofinal among all ``nZ``.  Density reports
    check every basic neighborhood ``nZ`` with ``1 <= n <= depth`` instead,
    which is the natural cell grid for residues.
    """

    name = "finite-index"

    def __init__(self, group: Integers):
        if not isinstance(group, Integers):
            raise UnsupportedInstanceError("finite-index topology is defined on the integers")
        super().__init__(group)

    def _make_level(self, k: int) -> SubgroupView:
        return multiples(self.group, math.factorial(k))

    def density_levels(self, depth: int) -> List[Tuple[str, SubgroupView]]:
        return [(f"{n}Z", multiples(self.group, n)) for n in range(1, depth + 1)]


class ProductTopology(NeighborhoodBase):
    """Product topology on a countable direct sum: ``U_k`` kills coordinates < k."""

    name = "product"

    def __init__(self, group: DirectSum):
        if not isinstance(group, DirectSum) or not group.repeating:
            raise UnsupportedInstanceError("product topology needs an infinite direct sum")
        super().__init__(group)

    def _make_level(self, k: int) -> SubgroupView:
        return tail_subgroup(self.group, k)


class DiscreteTopology(NeighborhoodBase):
    """Discrete topology on a finite group: ``U_0 = G`` and ``U_k = {e}`` afterwards."""

    name = "discrete"

    def __init__(self, group: Group):
        if not group.is_finite:
            raise UnsupportedInstanceError("discrete base is only shipped for finite groups")
        super().__init__(group)

    def _make_level(self, k: int) -> SubgroupView:
        return whole_group(self.group) if k == 0 else trivial_subgroup(self.group)


def default_topology(group: Group, name: Optional[str] = None) -> NeighborhoodBase:
    if name in (None, "default"):
        if isinstance(group, Integers):
            return FiniteIndexTopology(group)
        if isinstance(group, DirectSum) and group.repeating:
            return ProductTopology(group)
        return DiscreteTopology(group)
    table = {"finite-index": FiniteIndexTopology, "product": ProductTopology, "discrete": DiscreteTopology}
    if name not in table:
        raise PreconditionError(f"unknown topology {name!r}")
    return table[name](group)


def total_boundedness_cover(base: NeighborhoodBase, k: int) -> List[Element]:
    """Finitely many ``z_i`` with ``G = z_1 U_k + ... + z_n U_k`` (a transversal of ``U_k``)."""
    level = base.level(k)
    if level.transversal_hint is None:
        raise UnsupportedInstanceError(f"no transversal for level {k} of {base.descriptor}")
    return level.transversal_hint()


# ------------------------------------------------------------------ density


@dataclass
class DensityCell:
    level: str
    target: Element
    witness: Optional[Element]


@dataclass
class DensityReport:
    """For each checked neighborhood ``U`` and target ``g``: some ``b`` in ``B`` with ``b in U g``."""

    cells: List[DensityCell] = field(default_factory=list)

    @property
    def all_witnessed(self) -> bool:
        return all(c.witness is not None for c in self.cells)

    @property
    def missing(self) -> List[DensityCell]:
        return [c for c in self.cells if c.witness is None]

    def witnessed_set(self) -> Set[Tuple[str, Element]]:
        return {(c.level, c.target) for c in self.cells if c.witness is not None}

    def to_json(self) -> dict:
        return {
            "all_witnessed": self.all_witnessed,
            "cells": len(self.cells),
            "missing": [{"level": c.level, "target": list(c.target)} for c in self.missing],
        }


def is_dense_window(base: NeighborhoodBase, B: Sequence[Element], depth: int, horizon: int) -> DensityReport:
    """Check ``B ∩ U g != ∅`` for every level up to ``depth`` and the first ``horizon`` targets.

    Absence is recorded in the report, never raised: density is a limit
    property and a finite window can only collect evidence.
    """
    group = base.group
    targets = list(group.elements(horizon))
    report = DensityReport()
    for label, U in base.density_levels(depth):
        first: Dict[Hashable, Element] = {}
        for b in B:
            first.setdefault(U.coset_key(b), b)
        for g in targets:
            report.cells.append(DensityCell(label, g, first.get(U.coset_key(g))))
    return report


# ------------------------------------------------------------------ sequences


class ConvergentSequence:
    """An injective sequence ``a_n -> e`` (for ``n >= start``) with exact capabilities.

    ``A = {e} ∪ {a_n, a_n^-1}``, ``A_n`` keeps indices ``<= n`` and
    ``C_n = A \\ A_n``.  Subclasses decide membership in ``A``, ``A^-1 A``,
    ``C_k`` and ``C_k C_k`` exactly, and report the finite set of sequence
    indices that can break a separation requirement (``bad_indices``).

    Heavy loops run on integer *codes* (``encode``/``decode``) rather than
    coordinate tuples; the ``c*`` methods are the code-level arithmetic and
    the ``_``-prefixed predicates the code-level capabilities.
    """

    name = ""
    start = 0

    def __init__(self, group: Group, base: NeighborhoodBase):
        self.group = group
        self.base = base

    # code level, implemented by subclasses

    def encode(self, x: Element) -> int:
        raise NotImplementedError

    def decode(self, u: int) -> Element:
        raise NotImplementedError

    def cmul(self, u: int, v: int) -> int:
        raise NotImplementedError

    def cinv(self, u: int) -> int:
        raise NotImplementedError

    def cterm(self, n: int) -> int:
        raise NotImplementedError

    def _index(self, u: int) -> Optional[int]:
        raise NotImplementedError

    def _in_AinvA(self, u: int) -> bool:
        raise NotImplementedError

    def _in_CkCk(self, k: int, u: int) -> bool:
        raise NotImplementedError

    def _bad(self, u: int) -> Set[int]:
        raise NotImplementedError

    def tail_bound(self, k: int) -> int:
        """Least ``t`` with ``term(n) in U_k`` for every ``n >= t``."""
        raise NotImplementedError

    def generated_subgroup(self) -> SubgroupView:
        """The subgroup generated by the terms."""
        raise NotImplementedError

    # derived code level

    def cdiv(self, u: int, v: int) -> int:
        return self.cmul(u, self.cinv(v))

    def _in_A(self, u: int) -> bool:
        return u == 0 or self._index(u) is not None

    def cterms_pm(self, n: int) -> List[int]:
        a = self.cterm(n)
        ainv = self.cinv(a)
        return [a] if ainv == a else [a, ainv]

    def cA_n(self, n: int) -> List[int]:
        out = [0]
        for m in range(self.start, n + 1):
            out.extend(self.cterms_pm(m))
        return out

    def citer_C(self, k: int) -> Iterator[int]:
        m = max(k + 1, self.start)
        while True:
            yield from self.cterms_pm(m)
            m += 1

    # element level

    def term(self, n: int) -> Element:
        if n < self.start:
            raise IndexError(f"{self.name} starts at n = {self.start}")
        return self.decode(self.cterm(n))

    def sequence_index(self, x: Element) -> Optional[int]:
        """``m`` with ``x in {a_m, a_m^-1}``, or ``None``."""
        return self._index(self.encode(x))

    def member_of_A(self, x: Element) -> bool:
        return self._in_A(self.encode(x))

    def member_of_AinvA(self, x: Element) -> bool:
        return self._in_AinvA(self.encode(x))

    def member_of_C(self, k: int, x: Element) -> bool:
        m = self.sequence_index(x)
        return m is not None and m > k

    def member_of_CkCk(self, k: int, x: Element) -> bool:
        return self._in_CkCk(k, self.encode(x))

    def bad_indices(self, d: Element) -> Set[int]:
        """Indices ``m`` with ``a_m`` or ``a_m^-1`` in ``A^-1 A d``, for ``d`` not in ``A``."""
        return self._bad(self.encode(d))

    def A_n(self, n: int) -> List[Element]:
        """``A_n`` in sequence order ``e, a_s, a_s^-1, ...``."""
        return [self.decode(u) for u in self.cA_n(n)]

    def iter_C(self, k: int) -> Iterator[Element]:
        """``C_k`` in sequence order."""
        for u in self.citer_C(k):
            yield self.decode(u)

    @property
    def descriptor(self) -> str:
        return self.name


class BasisVectors(ConvergentSequence):
    """``a_n = e_n`` in the Boolean group; ``A = {0} ∪ {e_n}`` (self-inverse).

    Codes are bitmasks: bit ``i`` is coordinate ``i``.
    """

    name = "basis-vectors"
    start = 0

    def __init__(self, group: DirectSum, base: Optional[NeighborhoodBase] = None):
        if not (isinstance(group, DirectSum) and group.is_boolean):
            raise UnsupportedInstanceError("basis-vectors sequence is shipped for the Boolean group")
        super().__init__(group, base or ProductTopology(group))

    def encode(self, x):
        self.group.check(x)
        return int("".join(map(str, reversed(x))), 2) if x else 0

    def decode(self, u):
        return tuple(map(int, reversed(bin(u)[2:]))) if u else ()

    def cmul(self, u, v):
        return u ^ v

    def cinv(self, u):
        return u

    def cterm(self, n):
        return 1 << n

    def tail_bound(self, k):
        return k

    def generated_subgroup(self):
        return whole_group(self.group)

    def _index(self, u):
        return u.bit_length() - 1 if u and not u & (u - 1) else None

    def _in_AinvA(self, u):
        return bin(u).count("1") <= 2

    def _in_CkCk(self, k, u):
        if not u:
            return True
        return bin(u).count("1") == 2 and (u & -u).bit_length() - 1 > k

    def _bad(self, u):
        # e_m + d has weight <= 2 only when m is in the support of d and |d| <= 3
        w = bin(u).count("1")
        if w <= 1:
            raise PreconditionError("bad_indices requires d outside A")
        if w > 3:
            return set()
        return {i for i in range(u.bit_length()) if u >> i & 1}


class Factorials(ConvergentSequence):
    """``a_n = n!`` for ``n >= 2`` in the integers with the finite-index topology."""

    name = "factorials"
    start = 2

    def __init__(self, group: Integers, base: Optional[NeighborhoodBase] = None):
        if not isinstance(group, Integers):
            raise UnsupportedInstanceError("factorials sequence lives in the integers")
        super().__init__(group, base or FiniteIndexTopology(group))
        self._fact = [1, 1]

    def factorial(self, n: int) -> int:
        while len(self._fact) <= n:
            self._fact.append(self._fact[-1] * len(self._fact))
        return self._fact[n]

    def _top_index(self, v: int) -> int:
        """Largest ``i`` with ``i! <= v`` (``v >= 1``)."""
        while self._fact[-1] <= v:
            self.factorial(len(self._fact))
        return bisect.bisect_right(self._fact, v) - 1

    def encode(self, x):
        return self.group.check(x)[0]

    def decode(self, u):
        return (u,)

    def cmul(self, u, v):
        return u + v

    def cinv(self, u):
        return -u

    def cterm(self, n):
        return self.factorial(n)

    def tail_bound(self, k):
        # m! is divisible by k! iff m >= k; every term (m >= 2) lies in 2!Z
        return 0 if k <= 2 else k

    def generated_subgroup(self):
        return multiples(self.group, 2)

    def _index(self, u):
        v = abs(u)
        if v < 2:
            return None
        i = self._top_index(v)
        return i if self._fact[i] == v else None

    def decompositions(self, x: int, r: int, max_index: Optional[int] = None) -> Iterator[Tuple[Tuple[int, int], ...]]:
        """Ways to write ``x`` as a sum of at most ``r`` terms ``±i!`` (``i >= 2``).

        Terms come with non-increasing index and no cancelling pair.  A leading
        term of index ``i`` forces ``(i - r + 1)(i - 1)! <= |x| <= r i!``, which
        leaves only a handful of candidates per level.
        """
        if x == 0:
            yield ()
        if r == 0:
            return
        v = abs(x)
        hi = self._top_index(max(v, 1)) + 2
        if max_index is not None:
            hi = min(hi, max_index)
        for i in range(hi, 1, -1):
            f = self.factorial(i)
            if r * f < v:
                break
            if i > r + 1 and (i - r + 1) * self.factorial(i - 1) > v:
                continue
            for sign in (1, -1):
                for tail in self.decompositions(x - sign * f, r - 1, i):
                    if tail and tail[0][1] == i and tail[0][0] != sign:
                        continue  # cancelling pair
                    yield ((sign, i),) + tail

    def _in_AinvA(self, u):
        return u == 0 or any(True for _ in self.decompositions(u, 2))

    def _in_CkCk(self, k, u):
        if u == 0:
            return True
        return any(len(rep) == 2 and rep[-1][1] > k for rep in self.decompositions(u, 2))

    def _bad(self, u):
        if self._in_A(u):
            raise PreconditionError("bad_indices requires d outside A")
        return {i for rep in self.decompositions(u, 3) for _, i in rep}


def default_sequence(group: Group, name: str, base: Optional[NeighborhoodBase] = None) -> ConvergentSequence:
    if name == "basis-vectors":
        return BasisVectors(group, base)
    if name == "factorials":
        return Factorials(group, base)
    raise PreconditionError(f"unknown sequence {name!r}")


def tail_index(seq: ConvergentSequence, k: int, window: int = 200) -> int:
    """``t(k)`` with ``a_n in U_k`` for ``n >= t(k)``, checked on ``[t, t + window]``."""
    t = seq.tail_bound(k)
    U = seq.base.level(k)
    for n in range(max(t, seq.start), max(t, seq.start) + window + 1):
        if not U.contains(seq.term(n)):
            raise CapabilityViolationError(f"a_{n} not in level {k} although tail bound is {t}")
    return t
