"""Greedy constructions on countable totally bounded groups.

* ``construct_t2i``: a dense ``B`` with ``F B`` a partial factorization, for a
  finite ``F``.  Finite sets ``K`` with ``K^-1 K ∩ F^-1 F = {e}`` are
  enumerated canonically and each gets a shift ``x`` keeping the blocks
  ``F K^-1 x`` pairwise disjoint.
* ``construct_t2ii``: a dense transversal ``R`` of an infinite-index subgroup
  ``H``, seeded by shifted covers whose elements lie in distinct ``H``-cosets.
* ``example3_construct``: a dense transversal of a finite subgroup, one
  point per basic open set.

Transfinite choices are truncated to ``steps`` rounds; each round's exclusion
set is finite, so "first enumerated element outside it" is always defined.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count, islice
from typing import Hashable, Iterator, List, Optional, Sequence, Set, Tuple

from .errors import HorizonError, PreconditionError, SoundnessError, UnsupportedInstanceError
from .groups import DirectSum, Element, Group, Integers, SubgroupView, coset_transversal
from .topology import NeighborhoodBase, total_boundedness_cover

DEFAULT_HORIZON = 100_000
DEFAULT_WINDOW = 200


def difference_set(group: Group, F: Sequence[Element]) -> Set[Element]:
    """``F^-1 F \\ {e}``."""
    D = {group._op(group._inv(f), f2) for f in F for f2 in F}
    D.discard(group.identity)
    return D


def in_FF(group: Group, F: Sequence[Element], K: Sequence[Element], D: Optional[Set[Element]] = None) -> bool:
    """``K^-1 K ∩ F^-1 F = {e}``."""
    if D is None:
        D = difference_set(group, F)
    return not any(group._op(group._inv(k), k2) in D for k in K for k2 in K)


def iter_FF(group: Group, F: Sequence[Element]) -> Iterator[Tuple[Element, ...]]:
    """Non-empty finite ``K`` with ``K^-1 K ∩ F^-1 F = {e}``, in canonical order.

    Sets are ordered by the enumeration index of their largest element, then
    lexicographically on their sorted index tuples.  Prefixes that already
    contain a forbidden difference are pruned.
    """
    D = difference_set(group, F)
    order = group.order

    def ok(x: Element, others: Sequence[Element]) -> bool:
        return all(group._op(group._inv(x), y) not in D for y in others)

    for m in count():
        if order is not None and m >= order:
            return
        top = group.enumerate(m)

        def extend(prefix: List[Element], nxt: int) -> Iterator[Tuple[Element, ...]]:
            for j in range(nxt, m + 1):
                if j == m:
                    yield tuple(prefix) + (top,)
                    continue
                y = group.enumerate(j)
                if ok(y, prefix) and ok(y, [top]):
                    prefix.append(y)
                    yield from extend(prefix, j + 1)
                    prefix.pop()

        yield from extend([], 0)


def enumerate_FF(group: Group, F: Sequence[Element], count_: int) -> List[Tuple[Element, ...]]:
    """The first ``count_`` members of ``iter_FF``."""
    F = [group.check(f) for f in F]
    return list(islice(iter_FF(group, F), count_))


def _first_in_coset(group: Group, level: SubgroupView, t: Element, horizon: int,
                    accept=lambda y: True) -> Element:
    key = level.coset_key(t)
    for i in range(horizon):
        y = group.enumerate(i)
        if level.coset_key(y) == key and accept(y):
            return y
    raise HorizonError(f"no admissible element of the open set around {t} among the first {horizon}")


def pick_separated_points(
    group: Group,
    F: Sequence[Element],
    opens: Sequence[Tuple[SubgroupView, Element]],
    horizon: int = DEFAULT_HORIZON,
) -> List[Element]:
    """Greedy ``y_i`` in ``U_i t_i`` with ``{y_1, ..., y_n}`` separated by ``F^-1 F``.

    Each ``y_i`` is the first enumerated element of its open set that is new
    and differs from every earlier pick by something outside ``F^-1 F``.
    """
    F = [group.check(f) for f in F]
    D = difference_set(group, F)
    picks: List[Element] = []

    def accept(y: Element) -> bool:
        return y not in picks and all(group._op(group._inv(p), y) not in D for p in picks)

    for level, t in opens:
        picks.append(_first_in_coset(group, level, group.check(t), horizon, accept))
    return picks


# ------------------------------------------------------------------ (i)


@dataclass
class T2iStep:
    alpha: int
    K: Tuple[Element, ...]
    x: Element

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "K": [list(k) for k in self.K], "x": list(self.x)}

    @classmethod
    def from_json(cls, doc: dict) -> "T2iStep":
        return cls(doc["alpha"], tuple(tuple(k) for k in doc["K"]), tuple(doc["x"]))


@dataclass
class T2iResult:
    group: Group
    F: List[Element]
    steps: List[T2iStep]
    B: List[Element]


def block(group: Group, F: Sequence[Element], K: Sequence[Element], x: Element) -> List[Element]:
    """``F K^-1 x``."""
    return [group._op(group._op(f, group._inv(k)), x) for f in F for k in K]


def construct_t2i(group: Group, F: Sequence[Element], steps: int, horizon: int = DEFAULT_HORIZON) -> T2iResult:
    if steps < 0:
        raise PreconditionError("steps must be >= 0")
    F = [group.check(f) for f in F]
    if not F:
        raise PreconditionError("F must be non-empty")
    if len(set(F)) != len(F):
        raise PreconditionError("F has repeated elements")
    used: Set[Element] = set()
    records: List[T2iStep] = []
    for alpha, K in enumerate(islice(iter_FF(group, F), steps)):
        for i in range(horizon):
            x = group.enumerate(i)
            blk = block(group, F, K, x)
            if not any(y in used for y in blk):
                break
        else:
            raise HorizonError(f"step {alpha}: the first {horizon} shifts are all excluded")
        used.update(blk)
        records.append(T2iStep(alpha, K, x))
    B = [group._op(group._inv(k), r.x) for r in records for k in r.K]
    if len(set(B)) != len(B):
        raise SoundnessError("blocks K^-1 x overlap although their F-translates are disjoint")
    return T2iResult(group, F, records, B)


# ------------------------------------------------------------------ (ii)


def ruler_level(alpha: int) -> int:
    """2-adic valuation of ``alpha + 1``: every level recurs infinitely often."""
    a = alpha + 1
    return (a & -a).bit_length() - 1


def _support_width(H: SubgroupView) -> int:
    group = H.ambient
    return max((len(group.check(h)) for h in H.generators), default=0)


def cover_with_distinct_cosets(base: NeighborhoodBase, H: SubgroupView, n: int) -> List[Element]:
    """Finite ``F_U`` meeting every coset of ``U = U_n`` with pairwise distinct ``H``-cosets.

    Direct sums: attach the marker ``e_{M + i}`` to the ``i``-th pattern on the
    first ``n`` coordinates, where ``M`` lies past the support of ``H``.
    Integers: ``H`` must be trivial and the transversal of ``U_n`` is used.
    """
    group = base.group
    level = base.level(n)
    patterns = total_boundedness_cover(base, n)
    if isinstance(group, DirectSum):
        M = max(n, _support_width(H))
        out = []
        for i, p in enumerate(patterns):
            out.append(group._op(p, group.basis(M + i)))
    elif isinstance(group, Integers):
        if H.order != 1:
            raise UnsupportedInstanceError("the integers have no non-trivial subgroup of infinite index")
        out = list(patterns)
    else:
        raise UnsupportedInstanceError(f"no cover construction for {group.descriptor}")
    keys = [H.coset_key(f) for f in out]
    if len(set(keys)) != len(keys):
        raise SoundnessError(f"level {n} cover has two elements in one H-coset")
    if len({level.coset_key(f) for f in out}) != level.index:
        raise SoundnessError(f"level {n} cover misses a coset of U_{n}")
    return out


def _infinite_index(H: SubgroupView) -> None:
    group = H.ambient
    if group.is_finite:
        raise PreconditionError("a finite group has no subgroup of infinite index")
    if H.index is not None:
        raise PreconditionError(f"H has finite index {H.index}")


@dataclass
class T2iiStep:
    alpha: int
    level: int
    K: Tuple[Element, ...]
    x: Element

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "level": self.level, "K": [list(k) for k in self.K], "x": list(self.x)}

    @classmethod
    def from_json(cls, doc: dict) -> "T2iiStep":
        return cls(doc["alpha"], doc["level"], tuple(tuple(k) for k in doc["K"]), tuple(doc["x"]))


@dataclass
class T2iiResult:
    H: SubgroupView
    steps: List[T2iiStep]
    S: List[Element]
    R: List[Element]
    window: int


def construct_t2ii(
    base: NeighborhoodBase,
    H: SubgroupView,
    steps: int,
    window: int = DEFAULT_WINDOW,
    horizon: int = DEFAULT_HORIZON,
) -> T2iiResult:
    if steps < 0:
        raise PreconditionError("steps must be >= 0")
    _infinite_index(H)
    group = base.group
    covers = {}
    used: Set[Hashable] = set()
    records: List[T2iiStep] = []
    for alpha in range(steps):
        n = ruler_level(alpha)
        if n not in covers:
            covers[n] = cover_with_distinct_cosets(base, H, n)
        K = covers[n]
        for i in range(horizon):
            x = group.enumerate(i)
            keys = [H.coset_key(group._op(k, x)) for k in K]
            if not any(key in used for key in keys):
                break
        else:
            raise HorizonError(f"step {alpha}: the first {horizon} shifts all meet used cosets")
        used.update(keys)
        records.append(T2iiStep(alpha, n, tuple(K), x))
    S = [group._op(k, r.x) for r in records for k in r.K]
    R = coset_transversal(H, window, seed=S)
    return T2iiResult(H, records, S, R, window)


# ------------------------------------------------------------------ one point per coset


@dataclass
class Ex3Step:
    level: int
    translate: Element
    x: Element

    def to_json(self) -> dict:
        return {"level": self.level, "translate": list(self.translate), "x": list(self.x)}

    @classmethod
    def from_json(cls, doc: dict) -> "Ex3Step":
        return cls(doc["level"], tuple(doc["translate"]), tuple(doc["x"]))


@dataclass
class Ex3Result:
    A: SubgroupView
    steps: List[Ex3Step]
    B: List[Element]
    window: int


def iter_opens(base: NeighborhoodBase) -> Iterator[Tuple[int, Element]]:
    """Basic open sets ``U_n t``, level by level, translates in transversal order."""
    for n in count():
        for t in total_boundedness_cover(base, n):
            yield n, t


def example3_construct(
    base: NeighborhoodBase,
    A: SubgroupView,
    steps: int,
    window: int = DEFAULT_WINDOW,
    horizon: int = DEFAULT_HORIZON,
) -> Ex3Result:
    """Dense right factor ``B`` of ``G = A B`` for a finite subgroup ``A``."""
    group = base.group
    if steps < 0:
        raise PreconditionError("steps must be >= 0")
    if group.is_finite:
        raise UnsupportedInstanceError("ex3 needs a non-discrete group; finite groups are discrete")
    if A.order is None:
        raise PreconditionError("A must be a finite subgroup")
    used: Set[Hashable] = set()
    records: List[Ex3Step] = []
    for n, t in islice(iter_opens(base), steps):
        x = _first_in_coset(group, base.level(n), t, horizon, lambda y: A.coset_key(y) not in used)
        used.add(A.coset_key(x))
        records.append(Ex3Step(n, t, x))
    B = coset_transversal(A, window, seed=[r.x for r in records])
    return Ex3Result(A, records, B, window)
