"""Concrete countable abelian groups with canonical integer-vector elements.

Every element is a plain tuple of ints in canonical form, so equality and
hashing are structural.  Each group fixes an enumeration ``g_0 = e, g_1, ...``
used for every "first element such that ..." choice in the package:

* ``Integers``: zig-zag order 0, 1, -1, 2, -2, ...
* ``DirectSum`` / ``FiniteProduct``: mixed-radix digits of the index, lowest
  coordinate first (binary digits for the Boolean group).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import count
from typing import Callable, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import HorizonError, InstanceMismatchError, InvalidSeedError, PreconditionError

Element = Tuple[int, ...]

DEFAULT_HORIZON = 100_000


class Group:
    """Common interface; subclasses implement the arithmetic and enumeration."""

    order: Optional[int] = None  # None for infinite groups

    @property
    def descriptor(self) -> str:
        raise NotImplementedError

    @property
    def identity(self) -> Element:
        raise NotImplementedError

    def is_element(self, g) -> bool:
        raise NotImplementedError

    def _op(self, g: Element, h: Element) -> Element:
        raise NotImplementedError

    def _inv(self, g: Element) -> Element:
        raise NotImplementedError

    def enumerate(self, i: int) -> Element:
        raise NotImplementedError

    def index_of(self, g: Element) -> int:
        raise NotImplementedError

    # checked public arithmetic

    def check(self, g) -> Element:
        if not self.is_element(g):
            raise InstanceMismatchError(f"{g!r} is not a canonical element of {self.descriptor}")
        return g

    def op(self, g: Element, h: Element) -> Element:
        return self._op(self.check(g), self.check(h))

    def inv(self, g: Element) -> Element:
        return self._inv(self.check(g))

    def div(self, g: Element, h: Element) -> Element:
        """Return ``g * h^-1``."""
        return self._op(self.check(g), self._inv(self.check(h)))

    def power(self, g: Element, n: int) -> Element:
        self.check(g)
        if n < 0:
            g, n = self._inv(g), -n
        result, base = self.identity, g
        while n:
            if n & 1:
                result = self._op(result, base)
            base = self._op(base, base)
            n >>= 1
        return result

    def element_order(self, g: Element) -> Optional[int]:
        """Order of ``g``; ``None`` when ``g`` has infinite order."""
        raise NotImplementedError

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    def elements(self, limit: Optional[int] = None) -> Iterator[Element]:
        """Elements in enumeration order (all of them for a finite group)."""
        stop = self.order if limit is None else (limit if self.order is None else min(limit, self.order))
        indices = count() if stop is None else range(stop)
        for i in indices:
            yield self.enumerate(i)

    def sort_key(self, g: Element) -> int:
        return self.index_of(g)

    def canonical(self, elements: Iterable[Element]) -> List[Element]:
        """Deduplicate and sort by enumeration index."""
        return sorted(set(elements), key=self.index_of)

    def __eq__(self, other) -> bool:
        return isinstance(other, Group) and self.descriptor == other.descriptor

    def __hash__(self) -> int:
        return hash(self.descriptor)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.descriptor}>"


class Integers(Group):
    """The additive group of integers; elements are 1-tuples ``(n,)``."""

    @property
    def descriptor(self) -> str:
        return "integers"

    @property
    def identity(self) -> Element:
        return (0,)

    def is_element(self, g) -> bool:
        return type(g) is tuple and len(g) == 1 and type(g[0]) is int

    def _op(self, g, h):
        return (g[0] + h[0],)

    def _inv(self, g):
        return (-g[0],)

    def enumerate(self, i: int) -> Element:
        if i < 0:
            raise ValueError("enumeration index must be non-negative")
        return ((i + 1) // 2,) if i % 2 else (-(i // 2),)

    def index_of(self, g: Element) -> int:
        n = self.check(g)[0]
        return 2 * n - 1 if n > 0 else -2 * n

    def element_order(self, g):
        return 1 if self.check(g)[0] == 0 else None


class DirectSum(Group):
    """Direct sum of cyclic groups ``Z_{m_0} + Z_{m_1} + ...``.

    With ``repeating=True`` the moduli pattern repeats forever (the countable
    direct sum, e.g. the Boolean group for pattern ``(2,)``); otherwise the sum
    is finite.  Canonical form trims trailing zeros, so the identity is ``()``.
    """

    def __init__(self, moduli: Sequence[int], repeating: bool = True):
        moduli = tuple(int(m) for m in moduli)
        if not moduli or any(m < 2 for m in moduli):
            raise PreconditionError("direct sum moduli must all be >= 2")
        self.pattern = moduli
        self.repeating = repeating
        self.order = None if repeating else math.prod(moduli)

    @property
    def descriptor(self) -> str:
        if self.repeating and self.pattern == (2,):
            return "boolean"
        body = ",".join(map(str, self.pattern))
        return f"dsum:{body}*" if self.repeating else f"dsum:{body}"

    @property
    def is_boolean(self) -> bool:
        return self.repeating and self.pattern == (2,)

    @property
    def identity(self) -> Element:
        return ()

    def modulus(self, i: int) -> int:
        if self.repeating:
            return self.pattern[i % len(self.pattern)]
        return self.pattern[i]

    def is_element(self, g) -> bool:
        if type(g) is not tuple:
            return False
        if not self.repeating and len(g) > len(self.pattern):
            return False
        if g and g[-1] == 0:
            return False
        return all(type(c) is int and 0 <= c < self.modulus(i) for i, c in enumerate(g))

    @staticmethod
    def _trim(coords: List[int]) -> Element:
        while coords and coords[-1] == 0:
            coords.pop()
        return tuple(coords)

    def _op(self, g, h):
        if len(g) < len(h):
            g, h = h, g
        out = list(g)
        for i, c in enumerate(h):
            out[i] = (out[i] + c) % self.modulus(i)
        return self._trim(out)

    def _inv(self, g):
        return self._trim([(-c) % self.modulus(i) for i, c in enumerate(g)])

    def basis(self, i: int) -> Element:
        if i < 0 or (not self.repeating and i >= len(self.pattern)):
            raise PreconditionError(f"no basis vector e_{i} in {self.descriptor}")
        return (0,) * i + (1,)

    def support(self, g: Element) -> List[int]:
        return [i for i, c in enumerate(g) if c]

    def enumerate(self, i: int) -> Element:
        if i < 0 or (self.order is not None and i >= self.order):
            raise IndexError(f"enumeration index {i} out of range for {self.descriptor}")
        out = []
        k = 0
        while i:
            m = self.modulus(k)
            out.append(i % m)
            i //= m
            k += 1
        return self._trim(out)

    def index_of(self, g: Element) -> int:
        self.check(g)
        idx, place = 0, 1
        for i, c in enumerate(g):
            idx += c * place
            place *= self.modulus(i)
        return idx

    def element_order(self, g):
        self.check(g)
        result = 1
        for i, c in enumerate(g):
            if c:
                m = self.modulus(i)
                result = math.lcm(result, m // math.gcd(m, c))
        return result


class FiniteProduct(Group):
    """Finite product ``Z_{m_1} x ... x Z_{m_r}`` with fixed-length tuples."""

    def __init__(self, moduli: Sequence[int]):
        moduli = tuple(int(m) for m in moduli)
        if not moduli or any(m < 1 for m in moduli):
            raise PreconditionError("product moduli must all be >= 1")
        self.moduli = moduli
        self.order = math.prod(moduli)

    @property
    def descriptor(self) -> str:
        return "product:" + ",".join(map(str, self.moduli))

    @property
    def identity(self) -> Element:
        return (0,) * len(self.moduli)

    def is_element(self, g) -> bool:
        return (
            type(g) is tuple
            and len(g) == len(self.moduli)
            and all(type(c) is int and 0 <= c < m for c, m in zip(g, self.moduli))
        )

    def _op(self, g, h):
        return tuple((a + b) % m for a, b, m in zip(g, h, self.moduli))

    def _inv(self, g):
        return tuple((-a) % m for a, m in zip(g, self.moduli))

    def enumerate(self, i: int) -> Element:
        if not 0 <= i < self.order:
            raise IndexError(f"enumeration index {i} out of range for {self.descriptor}")
        out = []
        for m in self.moduli:
            out.append(i % m)
            i //= m
        return tuple(out)

    def index_of(self, g: Element) -> int:
        self.check(g)
        idx, place = 0, 1
        for c, m in zip(g, self.moduli):
            idx += c * place
            place *= m
        return idx

    def element_order(self, g):
        self.check(g)
        result = 1
        for c, m in zip(g, self.moduli):
            result = math.lcm(result, m // math.gcd(m, c))
        return result


class Cyclic(FiniteProduct):
    """``Z_n``; elements are 1-tuples reduced mod ``n``."""

    def __init__(self, n: int):
        super().__init__((n,))
        self.n = n

    @property
    def descriptor(self) -> str:
        return f"cyclic:{self.n}"


def boolean_group() -> DirectSum:
    return DirectSum((2,), repeating=True)


def parse_group(text: str) -> Group:
    """Build a group from its CLI name (``integers``, ``cyclic:6``, ``boolean``, ...)."""
    text = text.strip()
    if text == "integers":
        return Integers()
    if text == "boolean":
        return boolean_group()
    kind, _, body = text.partition(":")
    try:
        if kind == "cyclic":
            return Cyclic(int(body))
        if kind == "dsum":
            repeating = body.endswith("*")
            moduli = [int(t) for t in body.rstrip("*").split(",") if t]
            return DirectSum(moduli, repeating=repeating)
        if kind == "product":
            return FiniteProduct([int(t) for t in body.split(",") if t])
    except ValueError as exc:
        raise PreconditionError(f"bad group name {text!r}: {exc}") from None
    raise PreconditionError(f"unknown group name {text!r}")


def parse_element(group: Group, token: str) -> Element:
    """Parse ``3``, ``-2``, ``e4``, ``e0+e2`` or ``[1,0,1]`` into an element."""
    token = token.strip()
    if token.startswith("["):
        coords = tuple(int(t) for t in token.strip("[]").split(",") if t.strip())
        if isinstance(group, DirectSum):
            coords = DirectSum._trim(list(coords))
        return group.check(coords)
    result = group.identity
    for part in token.split("+"):
        part = part.strip()
        if part.startswith("e"):
            if not isinstance(group, DirectSum):
                raise PreconditionError(f"basis vectors need a direct sum, not {group.descriptor}")
            term = group.basis(int(part[1:]))
        else:
            n = int(part)
            if isinstance(group, Integers):
                term = (n,)
            elif isinstance(group, Cyclic):
                term = (n % group.n,)
            elif isinstance(group, DirectSum) and n == 0:
                term = ()
            else:
                raise PreconditionError(f"cannot read {part!r} as an element of {group.descriptor}")
        result = group.op(result, term)
    return result


# ---------------------------------------------------------------- subgroups


@dataclass(frozen=True, eq=False)
class SubgroupView:
    """A subgroup given by an exact membership test.

    ``coset_key`` maps ``x`` to a canonical label of the coset ``H x`` (all
    shipped groups are abelian, so left and right cosets agree).
    ``order``/``index`` are ``None`` when infinite.
    """

    ambient: Group
    generators: Tuple[Element, ...]
    membership: Callable[[Element], bool]
    coset_key: Callable[[Element], Hashable]
    order: Optional[int] = None
    index: Optional[int] = None
    enumerate: Optional[Callable[[int], Element]] = None
    transversal_hint: Optional[Callable[[], List[Element]]] = None
    label: str = ""

    def contains(self, x: Element) -> bool:
        return self.membership(self.ambient.check(x))

    def same_coset(self, x: Element, y: Element) -> bool:
        return self.membership(self.ambient.div(x, y))

    def elements(self) -> List[Element]:
        if self.order is None:
            raise PreconditionError(f"subgroup {self.label} is infinite")
        return [self.enumerate(i) for i in range(self.order)]

    def __repr__(self) -> str:
        return f"<SubgroupView {self.label or self.generators} of {self.ambient.descriptor}>"


def zigzag(i: int) -> int:
    return (i + 1) // 2 if i % 2 else -(i // 2)


def multiples(group: Integers, d: int) -> SubgroupView:
    """``d * Z`` inside the integers (``d = 0`` gives the trivial subgroup)."""
    d = abs(d)
    if d == 0:
        return SubgroupView(
            group, (), lambda x: x[0] == 0, lambda x: x, order=1, index=None,
            enumerate=lambda i: (0,) if i == 0 else _raise_index(i), label="{0}",
        )
    return SubgroupView(
        group, ((d,),), lambda x: x[0] % d == 0, lambda x: x[0] % d, order=None, index=d,
        enumerate=lambda i: (d * zigzag(i),),
        transversal_hint=lambda: [(r,) for r in range(d)], label=f"{d}Z",
    )


def _raise_index(i):
    raise IndexError(f"subgroup enumeration index {i} out of range")


def tail_subgroup(group: DirectSum, k: int) -> SubgroupView:
    """``U_k = {x : coordinates < k are zero}`` in a direct sum."""
    if not group.repeating:
        k = min(k, len(group.pattern))
    index = math.prod(group.modulus(i) for i in range(k))

    def key(x: Element) -> Element:
        return DirectSum._trim(list(x[:k]))

    order = None if group.order is None else group.order // index
    return SubgroupView(
        group, tuple(group.basis(i) for i in range(k, k + 3) if group.repeating),
        lambda x: all(c == 0 for c in x[:k]), key, order=order, index=index,
        transversal_hint=lambda: [group.enumerate(i) for i in range(index)], label=f"U_{k}",
    )


def whole_group(group: Group) -> SubgroupView:
    return SubgroupView(
        group, (), lambda x: True, lambda x: (), order=group.order, index=1,
        enumerate=group.enumerate, transversal_hint=lambda: [group.identity], label="G",
    )


def trivial_subgroup(group: Group) -> SubgroupView:
    e = group.identity
    return SubgroupView(
        group, (), lambda x: x == e, lambda x: x, order=1, index=group.order,
        enumerate=lambda i: e if i == 0 else _raise_index(i),
        transversal_hint=(lambda: list(group.elements())) if group.is_finite else None,
        label="{e}",
    )


def _closure(group: Group, gens: Sequence[Element], horizon: int) -> List[Element]:
    seen = {group.identity}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                for y in (group._op(x, s), group._op(x, group._inv(s))):
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
                        if len(seen) > horizon:
                            raise HorizonError(
                                f"subgroup closure exceeded horizon {horizon} in {group.descriptor}"
                            )
        frontier = nxt
    return sorted(seen, key=group.index_of)


def _finite_view(group: Group, gens: Tuple[Element, ...], members: List[Element], label: str) -> SubgroupView:
    member_set = frozenset(members)

    def key(x: Element) -> Element:
        return min((group._op(h, x) for h in members), key=group.index_of)

    index = None if group.order is None else group.order // len(members)
    hint = None
    if index is not None:
        hint = lambda: coset_transversal_list(group, key, group.order, ())  # noqa: E731
    return SubgroupView(
        group, gens, member_set.__contains__, key, order=len(members), index=index,
        enumerate=members.__getitem__, transversal_hint=hint, label=label,
    )


def _prime_span(group: DirectSum, gens: Tuple[Element, ...], p: int, width: int, label: str) -> SubgroupView:
    """Span over GF(p) via reduced row echelon form on the first ``width`` coordinates."""
    rows: List[List[int]] = []
    pivots: List[int] = []
    for g in gens:
        v = list(g) + [0] * (width - len(g))
        for r, c in zip(rows, pivots):
            if v[c]:
                f = v[c]
                v = [(a - f * b) % p for a, b in zip(v, r)]
        lead = next((i for i, a in enumerate(v) if a), None)
        if lead is None:
            continue
        invl = pow(v[lead], -1, p)
        v = [(a * invl) % p for a in v]
        for j, r in enumerate(rows):
            if r[lead]:
                f = r[lead]
                rows[j] = [(a - f * b) % p for a, b in zip(r, v)]
        rows.append(v)
        pivots.append(lead)

    def reduce(x: Element) -> List[int]:
        v = list(x[:width]) + [0] * max(0, width - len(x))
        for r, c in zip(rows, pivots):
            if v[c]:
                f = v[c]
                v = [(a - f * b) % p for a, b in zip(v, r)]
        return v

    def member(x: Element) -> bool:
        return len(x) <= width and not any(reduce(x))

    def key(x: Element) -> Element:
        return DirectSum._trim(reduce(x) + list(x[width:]))

    rank = len(rows)
    order = p ** rank

    def enum(i: int) -> Element:
        if not 0 <= i < order:
            _raise_index(i)
        v = [0] * width
        for r in rows:
            coef = i % p
            i //= p
            if coef:
                v = [(a + coef * b) % p for a, b in zip(v, r)]
        return DirectSum._trim(v)

    index = None if group.order is None else group.order // order
    return SubgroupView(group, gens, member, key, order=order, index=index, enumerate=enum, label=label)


def subgroup_generated(group: Group, gens: Iterable[Element], horizon: int = DEFAULT_HORIZON) -> SubgroupView:
    """The subgroup generated by a finite set, with exact membership.

    Integers use the gcd; direct sums whose relevant moduli are one prime use
    linear algebra; everything else falls back to a breadth-first closure that
    raises ``HorizonError`` instead of truncating.
    """
    gens = tuple(group.check(g) for g in gens)
    label = "<" + ", ".join(map(str, gens)) + ">"
    if isinstance(group, Integers):
        d = 0
        for g in gens:
            d = math.gcd(d, g[0])
        return multiples(group, d)
    if isinstance(group, DirectSum):
        width = max((len(g) for g in gens), default=0)
        moduli = {group.modulus(i) for i in range(width)}
        if len(moduli) == 1:
            p = moduli.pop()
            if all(p % q for q in range(2, int(p ** 0.5) + 1)):
                return _prime_span(group, gens, p, width, label)
        if width == 0:
            return trivial_subgroup(group)
    members = _closure(group, gens, horizon)
    return _finite_view(group, gens, members, label)


def coset_transversal_list(group: Group, key: Callable[[Element], Hashable], horizon: int,
                           seed: Sequence[Element]) -> List[Element]:
    seen = {}
    out = []
    for s in seed:
        k = key(s)
        if k in seen:
            raise InvalidSeedError(f"seed elements {seen[k]} and {s} lie in the same coset")
        seen[k] = s
        out.append(s)
    for x in group.elements(horizon):
        k = key(x)
        if k not in seen:
            seen[k] = x
            out.append(x)
    return out


def coset_transversal(H: SubgroupView, horizon: int, seed: Sequence[Element] = ()) -> List[Element]:
    """Extend ``seed`` greedily (enumeration order) to representatives of every
    coset met by the first ``horizon`` elements.  Seed order is preserved."""
    seed = [H.ambient.check(s) for s in seed]
    return coset_transversal_list(H.ambient, H.coset_key, horizon, seed)


def all_subgroups(group: Group) -> List[SubgroupView]:
    """Every subgroup of a finite group, smallest first."""
    if not group.is_finite:
        raise PreconditionError("all_subgroups needs a finite group")
    elements = list(group.elements())
    found = {frozenset([group.identity]): ()}
    frontier = [(frozenset([group.identity]), ())]
    while frontier:
        nxt = []
        for members, gens in frontier:
            for g in elements:
                if g in members:
                    continue
                new_gens = gens + (g,)
                closed = frozenset(_closure(group, new_gens, group.order))
                if closed not in found:
                    found[closed] = new_gens
                    nxt.append((closed, new_gens))
        frontier = nxt
    views = [
        _finite_view(group, gens, sorted(members, key=group.index_of), "<" + ", ".join(map(str, gens)) + ">")
        for members, gens in found.items()
    ]
    return sorted(views, key=lambda v: (v.order, [group.index_of(x) for x in v.elements()]))


def abelian_groups_up_to(bound: int) -> List[Group]:
    """One representative per isomorphism class of finite abelian groups of order <= bound.

    Invariant-factor form ``d_1 | d_2 | ... | d_r``; a single factor is a cyclic group.
    """

    def chains(n: int, lowest: int) -> Iterator[Tuple[int, ...]]:
        # factorisations n = d_1 * ... * d_r with lowest | d_1 | ... | d_r
        if n == 1:
            yield ()
            return
        for d in range(max(lowest, 2), n + 1):
            if n % d == 0 and d % lowest == 0:
                for rest in chains(n // d, d):
                    yield (d,) + rest

    groups: List[Group] = []
    for n in range(1, bound + 1):
        for factors in chains(n, 1) if n > 1 else [()]:
            if not factors:
                groups.append(Cyclic(1))
            elif len(factors) == 1:
                groups.append(Cyclic(factors[0]))
            else:
                groups.append(FiniteProduct(factors))
    return groups
