"""Partial factorizations, boxes and their indices, lifting through a
transversal, and the windowed thinness report."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .errors import InvalidWitnessError, PreconditionError
from .groups import Element, Group, SubgroupView, coset_transversal, parse_group

OMEGA = "omega"

PARTIAL = "partial"
FULL_ON_WINDOW = "full-on-window"


@dataclass
class FactorizationWitness:
    group: Group
    A: List[Element]
    B: List[Element]
    claim: str = PARTIAL
    kappa: Union[int, str, None] = None
    window: Optional[int] = None  # coverage window for full-on-window claims

    def __post_init__(self):
        if self.claim not in (PARTIAL, FULL_ON_WINDOW):
            raise PreconditionError(f"unknown claim {self.claim!r}")
        self.A = [self.group.check(a) for a in self.A]
        self.B = [self.group.check(b) for b in self.B]
        if self.kappa is None:
            self.kappa = len(self.A)

    def to_json(self) -> dict:
        doc = {
            "group": self.group.descriptor,
            "A": [list(a) for a in self.A],
            "B": [list(b) for b in self.B],
            "claim": self.claim,
            "kappa": self.kappa,
        }
        if self.window is not None:
            doc["window"] = self.window
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "FactorizationWitness":
        return cls(
            parse_group(doc["group"]),
            [tuple(a) for a in doc["A"]],
            [tuple(b) for b in doc["B"]],
            doc.get("claim", PARTIAL),
            doc.get("kappa"),
            doc.get("window"),
        )


@dataclass
class Violation:
    a: Element
    a2: Element
    collision: Element

    def to_json(self) -> dict:
        return {"a": list(self.a), "a2": list(self.a2), "collision": list(self.collision)}


def verify_partial_factorization(w: FactorizationWitness) -> Tuple[bool, Optional[Violation]]:
    """Are the translates ``aB`` (a in A) pairwise disjoint?

    Translates are materialized in (A, B) order; the first repeated product is
    reported together with the two left factors that produced it.
    """
    G = w.group
    owner: Dict[Element, Element] = {}
    for a in w.A:
        row = set()
        for b in w.B:
            x = G._op(a, b)
            if x in row:
                # duplicate inside B itself makes the translates degenerate
                return False, Violation(a, a, x)
            row.add(x)
            if x in owner:
                return False, Violation(owner[x], a, x)
        for x in row:
            owner[x] = a
    return True, None


def quotient_violation(
    group: Group, B: Sequence[Element], in_AinvA: Callable[[Element], bool]
) -> Optional[Tuple[Element, Element]]:
    """First pair ``b != b'`` with ``b b'^-1`` in ``A^-1 A``, or ``None``.

    Works for infinite ``A`` given an exact membership test for ``A^-1 A``
    (the identity is excluded by the distinctness of the pair).
    """
    seen = set()
    for i, b in enumerate(B):
        if b in seen:
            return b, b
        seen.add(b)
        for b2 in B[:i]:
            if in_AinvA(group._op(b, group._inv(b2))):
                return b2, b
    return None


def covers_window(w: FactorizationWitness, window: int) -> Optional[Element]:
    """First element among the first ``window`` not in ``A B``, or ``None``."""
    G = w.group
    products = {G._op(a, b) for a in w.A for b in w.B}
    for g in G.elements(window):
        if g not in products:
            return g
    return None


def verify_witness(w: FactorizationWitness) -> dict:
    """Verification report ``{ok, violation?, uncovered?}`` for a witness."""
    ok, violation = verify_partial_factorization(w)
    report: dict = {"ok": ok}
    if violation is not None:
        report["violation"] = violation.to_json()
    if ok and w.claim == FULL_ON_WINDOW:
        window = w.window if w.window is not None else (w.group.order or 0)
        missing = covers_window(w, window)
        if missing is not None:
            report["ok"] = False
            report["uncovered"] = list(missing)
    if isinstance(w.kappa, int) and w.kappa != len(w.A):
        report["ok"] = False
        report["kappa_mismatch"] = {"declared": w.kappa, "actual": len(w.A)}
    return report


def box_index(w: FactorizationWitness, subgroup: Optional[SubgroupView] = None) -> Union[int, str]:
    """Index of the box ``B``: the cardinality of ``A``.

    When ``B`` is declared to be ``subgroup`` and the claim is full, the value
    is cross-checked against ``|G : H|``.
    """
    report = verify_witness(w)
    if not report["ok"]:
        raise InvalidWitnessError(f"witness does not verify: {report}")
    if w.kappa == OMEGA:
        return OMEGA
    index = len(w.A)
    if subgroup is not None and w.claim == FULL_ON_WINDOW:
        if set(w.B) != set(subgroup.elements()):
            raise InvalidWitnessError("B is not the declared subgroup")
        if subgroup.index is not None and subgroup.index != index:
            raise InvalidWitnessError(f"box index {index} differs from subgroup index {subgroup.index}")
    return index


def subgroup_box(H: SubgroupView) -> FactorizationWitness:
    """``G = R H``: the subgroup as a box of index ``|G : H|``."""
    G = H.ambient
    R = coset_transversal(H, G.order)
    return FactorizationWitness(G, R, H.elements(), FULL_ON_WINDOW, len(R), G.order)


def transversal_box(H: SubgroupView) -> FactorizationWitness:
    """``G = H R``: a transversal as a box of index ``|H|``."""
    G = H.ambient
    R = coset_transversal(H, G.order)
    return FactorizationWitness(G, H.elements(), R, FULL_ON_WINDOW, H.order, G.order)


def lift_factorization(
    H: SubgroupView, A: Sequence[Element], B: Sequence[Element], R: Sequence[Element], window: int
) -> FactorizationWitness:
    """Lift a factorization ``H = A B`` to ``G = A (B R)`` through a transversal ``R`` of ``H``.

    ``A B`` is checked to be a factorization of ``H`` (exactly when ``H`` is
    finite, otherwise on the first ``window`` elements of ``H``) and ``R`` to
    meet each coset at most once and every coset met by the window.  The
    lifted witness is re-verified before it is returned.
    """
    G = H.ambient
    A = [G.check(a) for a in A]
    B = [G.check(b) for b in B]
    R = [G.check(r) for r in R]
    if not all(H.contains(x) for x in list(A) + list(B)):
        raise PreconditionError("A and B must lie in H")
    inner = FactorizationWitness(G, A, B, PARTIAL)
    ok, violation = verify_partial_factorization(inner)
    if not ok:
        raise PreconditionError(f"A B is not a partial factorization of H: {violation}")
    products = {G._op(a, b) for a in A for b in B}
    if H.order is not None:
        if len(A) * len(B) != H.order or len(products) != H.order:
            raise PreconditionError(
                f"A B is not a factorization of H (|A||B| = {len(A) * len(B)}, |H| = {H.order})"
            )
    else:
        for i in range(window):
            h = H.enumerate(i)
            if h not in products:
                raise PreconditionError(f"A B misses {h} of H")
    keys = {}
    for r in R:
        k = H.coset_key(r)
        if k in keys:
            raise PreconditionError(f"R is not a transversal: {keys[k]} and {r} share a coset")
        keys[k] = r
    for g in G.elements(window):
        if H.coset_key(g) not in keys:
            raise PreconditionError(f"R misses the coset of {g}")
    BR = [G._op(b, r) for r in R for b in B]
    lifted = FactorizationWitness(G, A, BR, FULL_ON_WINDOW, len(A), window)
    report = verify_witness(lifted)
    if not report["ok"]:
        raise InvalidWitnessError(f"lifted witness failed verification: {report}")
    return lifted


@dataclass
class ThinWindowReport:
    """Exact sizes ``|gX ∩ X|`` for a finite truncation ``X`` and targets ``g != e``."""

    X: List[Element]
    sizes: List[Tuple[Element, int]] = field(default_factory=list)

    @property
    def bound(self) -> int:
        return max((s for _, s in self.sizes), default=0)


def thin_window_check(group: Group, X: Sequence[Element], g_horizon: int,
                      targets: Optional[Sequence[Element]] = None) -> ThinWindowReport:
    """Report ``|gX ∩ X|`` for the non-identity elements among the first ``g_horizon``.

    Thinness of the infinite set is not decided, only measured on ``X``.
    """
    X = [group.check(x) for x in X]
    xs = set(X)
    if targets is None:
        targets = [g for g in group.elements(g_horizon) if g != group.identity]
    report = ThinWindowReport(X)
    for g in targets:
        report.sizes.append((g, sum(1 for x in xs if group._op(g, x) in xs)))
    return report
