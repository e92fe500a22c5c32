"""Stagewise construction of a dense subset B with B B^-1 ∩ A^-1 A = {e} and
A B = G, for a convergent sequence A = {e} ∪ {a_n^±1}.

Each stage adds ``c g`` for the first uncovered ``g``, then repairs every
``x`` in ``A_n B_n \\ B_n`` by adding ``c_i s x_i`` with ``c_i, s`` taken far
enough along the sequence.  Stages record every choice so that certificates
can be replayed and checked independently.

The engine works on the sequence's integer codes.  When the terms generate a
proper subgroup ``H`` (factorials generate ``2Z``) the construction runs
inside ``H`` and the result is lifted to ``G`` through a transversal of ``H``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

from .errors import BudgetExceededError, HorizonError, PreconditionError, SoundnessError
from .groups import Element, SubgroupView, coset_transversal
from .topology import ConvergentSequence

log = logging.getLogger(__name__)

DEFAULT_HORIZON = 100_000
DEFAULT_MAX_ELEMENTS = 3000


@dataclass
class StageRecord:
    """``B_n`` together with the choices that produced it from ``B_{n-1}``."""

    n: int
    B: List[Element]
    g: Optional[Element] = None
    k: Optional[int] = None
    c: Optional[Element] = None
    x_list: List[Element] = field(default_factory=list)
    s: Optional[Element] = None
    c_list: List[Element] = field(default_factory=list)
    k_list: List[int] = field(default_factory=list)
    checks: Dict[str, bool] = field(default_factory=dict)

    def to_json(self) -> dict:
        el = lambda x: None if x is None else list(x)
        return {
            "n": self.n,
            "B": [list(b) for b in self.B],
            "g": el(self.g),
            "k": self.k,
            "c": el(self.c),
            "x_list": [list(x) for x in self.x_list],
            "s": el(self.s),
            "c_list": [list(c) for c in self.c_list],
            "k_list": list(self.k_list),
            "checks": dict(self.checks),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "StageRecord":
        el = lambda x: None if x is None else tuple(x)
        return cls(
            n=doc["n"],
            B=[tuple(b) for b in doc["B"]],
            g=el(doc.get("g")),
            k=doc.get("k"),
            c=el(doc.get("c")),
            x_list=[tuple(x) for x in doc.get("x_list", [])],
            s=el(doc.get("s")),
            c_list=[tuple(c) for c in doc.get("c_list", [])],
            k_list=list(doc.get("k_list", [])),
            checks=dict(doc.get("checks", {})),
        )


@dataclass
class Theorem1Result:
    seq: ConvergentSequence
    H: SubgroupView
    records: List[StageRecord]
    R: List[Element]
    lifted_B: List[Element]

    @property
    def B(self) -> List[Element]:
        return self.records[-1].B


# ------------------------------------------------------------------ primitives


def member_of_AB(seq: ConvergentSequence, x: Element, B: Iterable[Element]) -> bool:
    """Is ``x`` in ``A B``?  Exact for finite ``B``."""
    u = seq.encode(x)
    return _in_AB(seq, u, [seq.encode(b) for b in B])


def _in_AB(seq: ConvergentSequence, u: int, B: Iterable[int]) -> bool:
    return any(seq._in_A(seq.cdiv(u, b)) for b in B)


def _separation_k(seq: ConvergentSequence, F: Iterable[int], g: int) -> int:
    k = 0
    for f in F:
        d = seq.cdiv(f, g)
        if seq._in_A(d):
            raise PreconditionError("separation needs g outside A F")
        bad = seq._bad(d)
        if bad:
            k = max(k, max(bad))
    return k


def separation_k(seq: ConvergentSequence, F: Sequence[Element], g: Element) -> int:
    """Least ``k`` with ``A C_k g ∩ A F = ∅``, for finite ``F`` and ``g`` outside ``A F``.

    ``a c g = a' f`` means ``c`` lies in ``A^-1 A f g^-1``; only the indices
    reported by ``bad_indices`` can occur, so ``k`` is their maximum.
    """
    return _separation_k(seq, [seq.encode(f) for f in F], seq.encode(g))


def separation_bruteforce(
    seq: ConvergentSequence, F: Sequence[Element], g: Element, k: int, window: int
) -> Optional[tuple]:
    """Search ``a c g = a' f`` with ``c`` in ``C_k`` and sequence indices ``<= window``.

    Returns the offending ``(a, c, a', f)`` or ``None``.  Independent of
    ``bad_indices``; used to validate ``separation_k`` on finite windows.
    """
    G = seq.group
    A = seq.A_n(window)
    AF = {G._op(a, f): (a, f) for a in A for f in F}
    for m in range(max(k + 1, seq.start), window + 1):
        for c in {seq.term(m), G._inv(seq.term(m))}:
            for a in A:
                y = G._op(G._op(a, c), g)
                if y in AF:
                    return (a, c) + AF[y]
    return None


# ------------------------------------------------------------------ engine


class Theorem1Engine:
    """Runs stages inside the subgroup generated by the sequence."""

    def __init__(
        self,
        seq: ConvergentSequence,
        horizon: int = DEFAULT_HORIZON,
        max_elements: int = DEFAULT_MAX_ELEMENTS,
    ):
        self.seq = seq
        self.group = seq.group
        self.H = seq.generated_subgroup()
        self.horizon = horizon
        self.max_elements = max_elements
        self._ambient: List[int] = []

    def ambient(self, i: int) -> int:
        """Code of the ``i``-th element of ``H``."""
        while len(self._ambient) <= i:
            self._ambient.append(self.seq.encode(self.H.enumerate(len(self._ambient))))
        return self._ambient[i]

    def _order_key(self, u: int) -> int:
        return self.group.index_of(self.seq.decode(u))

    def initial(self) -> StageRecord:
        return StageRecord(n=0, B=[self.group.identity], checks={"partial": True, "coverage": True})

    def step(self, rec: StageRecord, transcript: Sequence[StageRecord] = ()) -> StageRecord:
        seq = self.seq
        n = rec.n
        B = [seq.encode(b) for b in rec.B]
        Bset = set(B)
        A_n = seq.cA_n(n)

        xs = {seq.cmul(a, b) for a in A_n for b in B} - Bset
        x_list = sorted(xs, key=self._order_key)
        projected = len(B) + 1 + len(x_list)
        if projected > self.max_elements:
            raise BudgetExceededError(
                f"stage {n + 1} needs {projected} elements, budget is {self.max_elements}",
                transcript=list(transcript),
            )

        # first element of H outside A B_n
        for i in range(self.horizon):
            g = self.ambient(i)
            if not _in_AB(seq, g, B):
                break
        else:
            raise HorizonError(f"A B_{n} covers the first {self.horizon} elements", list(transcript))

        k = _separation_k(seq, B, g)
        c = next(seq.citer_C(k))
        cg = seq.cmul(c, g)
        F = B + [cg]

        s = None
        if x_list:
            for t, cand in enumerate(seq.citer_C(n + 1)):
                if t >= self.horizon:
                    raise HorizonError(f"no shift s found within {self.horizon} terms", list(transcript))
                if not any(_in_AB(seq, seq.cmul(cand, x), F) for x in x_list):
                    s = cand
                    break
        sx = [seq.cmul(s, x) for x in x_list]

        c_list: List[int] = []
        k_list: List[int] = []
        for i, y in enumerate(sx):
            ki = _separation_k(seq, F, y)
            later = sx[i + 1:]
            for t, ci in enumerate(seq.citer_C(max(ki, n + 1))):
                if t >= self.horizon:
                    raise HorizonError(f"no c_{i} found within {self.horizon} terms", list(transcript))
                z = seq.cmul(ci, y)
                if not any(seq._in_A(seq.cdiv(w, z)) for w in later):
                    break
            c_list.append(ci)
            k_list.append(ki)
            F.append(z)

        dec = seq.decode
        out = StageRecord(
            n=n + 1,
            B=[dec(b) for b in F],
            g=dec(g),
            k=k,
            c=dec(c),
            x_list=[dec(x) for x in x_list],
            s=None if s is None else dec(s),
            c_list=[dec(ci) for ci in c_list],
            k_list=k_list,
        )
        out.checks = self.check_stage(F, n + 1, prev=B)
        if not all(out.checks.values()):
            raise SoundnessError(f"stage {n + 1} failed its checks {out.checks}")
        log.info("stage %d: |B| = %d", n + 1, len(F))
        return out

    def check_stage(self, B: List[int], n: int, prev: Optional[List[int]] = None) -> Dict[str, bool]:
        """The three stage invariants on codes.

        ``partial``: ``b b'^-1`` outside ``A^-1 A`` for distinct ``b, b'``.
        ``coverage``: the first ``n + 1`` elements of ``H`` lie in ``A B_n``.
        ``placement``: every ``x`` in ``A_{n-1} B_{n-1}`` has ``x b^-1`` in ``C_n C_n``
        for some ``b`` in ``B_n``.
        """
        seq = self.seq
        ok_partial = len(set(B)) == len(B) and not any(
            seq._in_AinvA(seq.cdiv(b, b2)) for i, b in enumerate(B) for b2 in B[:i]
        )
        ok_cover = all(_in_AB(seq, self.ambient(i), B) for i in range(n + 1))
        checks = {"partial": ok_partial, "coverage": ok_cover}
        if prev is not None:
            targets = {seq.cmul(a, b) for a in seq.cA_n(n - 1) for b in prev}
            checks["placement"] = all(any(seq._in_CkCk(n, seq.cdiv(x, b)) for b in reversed(B)) for x in targets)
        return checks

    def run(self, stages: int) -> Theorem1Result:
        records = [self.initial()]
        for _ in range(stages):
            records.append(self.step(records[-1], records))
        return self.finish(records)

    def finish(self, records: List[StageRecord]) -> Theorem1Result:
        """Lift the last stage to ``G`` through a transversal of ``H``."""
        G = self.group
        R = coset_transversal(self.H, 4 * self.H.index)
        lifted = [G._op(b, r) for r in R for b in records[-1].B]
        return Theorem1Result(self.seq, self.H, records, R, lifted)


def run_theorem1(
    seq: ConvergentSequence,
    stages: int,
    horizon: int = DEFAULT_HORIZON,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
) -> Theorem1Result:
    return Theorem1Engine(seq, horizon, max_elements).run(stages)
