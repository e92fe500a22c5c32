"""Certificates: serialization, independent verification, and the oracle crosscheck.

A certificate is a JSON document carrying the instance descriptors, the
engine configuration, the per-step transcript and the final sets.  The
verifiers below recompute every claim from the raw sets; nothing recorded in
the transcript is trusted, and the recorded ``checks`` fields are ignored.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from .errors import InstanceMismatchError, InvalidSeedError, InvalidWitnessError, PreconditionError, SizeBoundError
from .factorization import (
    FactorizationWitness,
    box_index,
    subgroup_box,
    transversal_box,
    verify_partial_factorization,
    verify_witness,
)
from .groups import Element, Group, SubgroupView, abelian_groups_up_to, all_subgroups, coset_transversal, parse_group, subgroup_generated
from .oracle import DEFAULT_BOUND, enumerate_boxes, odd_torsion_obstruction
from .theorem1 import Theorem1Result
from .theorem2 import Ex3Result, T2iiResult, T2iResult, difference_set, iter_FF, iter_opens, ruler_level
from .topology import NeighborhoodBase, default_sequence, default_topology, is_dense_window

SCHEMA_VERSION = 1
KINDS = ("t1", "t2i", "t2ii", "ex3")


def _el(x: Element) -> List[int]:
    return list(x)


def _els(xs: Sequence[Element]) -> List[List[int]]:
    return [list(x) for x in xs]


def _tup(x) -> Element:
    return tuple(x)


def _tups(xs) -> List[Element]:
    return [tuple(x) for x in xs]


def dumps(doc: Any) -> str:
    """Canonical serialization: sorted keys, no whitespace, trailing newline."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


# ------------------------------------------------------------------ building


def _header(kind: str, group: Group, base: NeighborhoodBase, config: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "group": group.descriptor,
        "topology": base.descriptor,
        "config": config,
    }


def t1_certificate(res: Theorem1Result, horizon: int, max_elements: int) -> dict:
    seq = res.seq
    doc = _header("t1", seq.group, seq.base, {
        "stages": len(res.records) - 1,
        "horizon": horizon,
        "max_elements": max_elements,
    })
    doc["sequence"] = seq.descriptor
    doc["subgroup"] = {"label": res.H.label, "generators": _els(res.H.generators)}
    doc["transcript"] = [r.to_json() for r in res.records]
    doc["final"] = {"B": _els(res.B), "R": _els(res.R), "lifted_B": _els(res.lifted_B)}
    return doc


def t2i_certificate(res: T2iResult, base: NeighborhoodBase, horizon: int) -> dict:
    doc = _header("t2i", res.group, base, {"F": _els(res.F), "steps": len(res.steps), "horizon": horizon})
    doc["transcript"] = [s.to_json() for s in res.steps]
    doc["final"] = {"F": _els(res.F), "B": _els(res.B)}
    return doc


def t2ii_certificate(res: T2iiResult, base: NeighborhoodBase, horizon: int) -> dict:
    doc = _header("t2ii", base.group, base, {
        "subgroup": _els(res.H.generators),
        "steps": len(res.steps),
        "window": res.window,
        "horizon": horizon,
    })
    doc["transcript"] = [s.to_json() for s in res.steps]
    doc["final"] = {"S": _els(res.S), "R": _els(res.R)}
    return doc


def ex3_certificate(res: Ex3Result, base: NeighborhoodBase, horizon: int) -> dict:
    doc = _header("ex3", base.group, base, {
        "subgroup": _els(res.A.generators),
        "steps": len(res.steps),
        "window": res.window,
        "horizon": horizon,
    })
    doc["transcript"] = [s.to_json() for s in res.steps]
    doc["final"] = {"B": _els(res.B)}
    return doc


# ------------------------------------------------------------------ reports


@dataclass
class Check:
    name: str
    ok: bool
    detail: Optional[dict] = None

    def to_json(self) -> dict:
        doc: Dict[str, Any] = {"name": self.name, "ok": self.ok}
        if self.detail is not None:
            doc["detail"] = self.detail
        return doc


@dataclass
class VerificationReport:
    kind: str
    checks: List[Check] = field(default_factory=list)
    density: Optional[dict] = None
    elapsed_ms: int = 0

    @property
    def verdict(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name: str, ok: bool, detail: Optional[dict] = None) -> None:
        self.checks.append(Check(name, ok, None if ok else detail))

    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.ok]

    def to_json(self) -> dict:
        doc = {
            "kind": self.kind,
            "verdict": "pass" if self.verdict else "fail",
            "checks": [c.to_json() for c in self.checks],
            "elapsed_ms": self.elapsed_ms,
        }
        if self.density is not None:
            doc["density"] = self.density
        return doc


def _list_diff(expected: Sequence[Element], actual: Sequence[Element]) -> Optional[dict]:
    """Locate the first disagreement between two element lists."""
    if list(expected) == list(actual):
        return None
    for i, (e, a) in enumerate(zip(expected, actual)):
        if e != a:
            return {"position": i, "expected": _el(e), "found": _el(a)}
    i = min(len(expected), len(actual))
    if len(expected) > len(actual):
        return {"position": i, "missing": _el(expected[i])}
    return {"position": i, "unexpected": _el(actual[i])}


def _density(report: VerificationReport, base: NeighborhoodBase, B: Sequence[Element],
             depth: int, window: int, require: bool) -> None:
    dens = is_dense_window(base, B, depth, window)
    report.density = dict(dens.to_json(), depth=depth, window=window, required=require)
    if require:
        miss = dens.missing
        report.add("density", not miss,
                   {"level": miss[0].level, "target": _el(miss[0].target)} if miss else None)


# ------------------------------------------------------------------ t1


def _verify_t1(doc: dict, report: VerificationReport, window: int, depth: int, require_density: bool) -> None:
    group = parse_group(doc["group"])
    seq = default_sequence(group, doc["sequence"], default_topology(group, doc.get("topology")))
    H = seq.generated_subgroup()
    enc, dec = seq.encode, seq.decode
    records = doc["transcript"]

    def in_AB(u: int, B: Sequence[int]) -> bool:
        return any(seq._in_A(seq.cdiv(u, b)) for b in B)

    # brute-force window for A^-1 A: sequence indices up to 200
    Aw = seq.cA_n(200)
    AinvA_window = {seq.cmul(seq.cinv(a), a2) for a in Aw for a2 in Aw}

    def quotient_failure(B: List[int]) -> Optional[dict]:
        seen: Dict[int, int] = {}
        for i, b in enumerate(B):
            if b in seen:
                return {"pair": [_el(dec(b)), _el(dec(b))], "reason": "repeated element"}
            seen[b] = i
            for b2 in B[:i]:
                d = seq.cdiv(b, b2)
                exact = seq._in_AinvA(d)
                if exact or d in AinvA_window:
                    return {"pair": [_el(dec(b2)), _el(dec(b))], "exact": exact,
                            "window": d in AinvA_window}
        return None

    ambient: List[int] = []

    def h(i: int) -> int:
        while len(ambient) <= i:
            ambient.append(enc(H.enumerate(len(ambient))))
        return ambient[i]

    prev: Optional[List[int]] = None
    for n, rec in enumerate(records):
        tag = f"stage {n}"
        if rec.get("n") != n:
            report.add(f"{tag}: numbering", False, {"found": rec.get("n")})
            return
        B = [enc(tuple(b)) for b in rec["B"]]
        if n == 0:
            report.add(f"{tag}: B_0 = {{e}}", B == [0] and dec(0) == group.identity,
                       {"found": rec["B"]})
        else:
            g, c = enc(tuple(rec["g"])), enc(tuple(rec["c"]))
            xs = [enc(tuple(x)) for x in rec["x_list"]]
            cs = [enc(tuple(x)) for x in rec["c_list"]]
            s = None if rec["s"] is None else enc(tuple(rec["s"]))
            # choices
            first = next(i for i in range(doc["config"]["horizon"]) if not in_AB(h(i), prev))
            report.add(f"{tag}: g first outside A B", g == h(first),
                       {"expected": _el(dec(h(first))), "found": rec["g"]})
            idx = seq._index(c)
            report.add(f"{tag}: c in C_k", idx is not None and idx > rec["k"], {"c": rec["c"], "k": rec["k"]})
            expected_x = {seq.cmul(a, b) for a in seq.cA_n(n - 1) for b in prev} - set(prev)
            report.add(f"{tag}: x_list = A_n B_n minus B_n", set(xs) == expected_x and len(xs) == len(expected_x),
                       {"missing": [_el(dec(x)) for x in sorted(expected_x - set(xs), key=abs)][:3],
                        "extra": [_el(dec(x)) for x in sorted(set(xs) - expected_x, key=abs)][:3]})
            shifts_ok = len(cs) == len(xs) and (not xs or (s is not None and (seq._index(s) or -1) > n))
            shifts_ok = shifts_ok and all((seq._index(ci) or -1) > n for ci in cs)
            report.add(f"{tag}: s and c_i in C_n", shifts_ok, {"s": rec["s"]})
            if shifts_ok:
                assembled = prev + [seq.cmul(c, g)] + [seq.cmul(ci, seq.cmul(s, x)) for ci, x in zip(cs, xs)]
                diff = _list_diff([dec(u) for u in assembled], [dec(u) for u in B])
                report.add(f"{tag}: assembly", diff is None, diff)
            # every point of A_{n-1} B_{n-1} sits in C_n C_n b for some b in B_n
            bad5 = next((x for x in {seq.cmul(a, b) for a in seq.cA_n(n - 1) for b in prev}
                         if not any(seq._in_CkCk(n, seq.cdiv(x, b)) for b in reversed(B))), None)
            report.add(f"{tag}: placement", bad5 is None, {"target": _el(dec(bad5)) if bad5 is not None else None})
        q = quotient_failure(B)
        report.add(f"{tag}: partial factorization", q is None, q)
        miss = next((i for i in range(n + 1) if not in_AB(h(i), B)), None)
        report.add(f"{tag}: coverage", miss is None,
                   {"uncovered": _el(dec(h(miss))) if miss is not None else None})
        prev = B
        if not report.verdict:
            return

    final = doc["final"]
    B = _tups(final["B"])
    diff = _list_diff(_tups(records[-1]["B"]), B)
    report.add("final B = last stage", diff is None, diff)
    q = quotient_failure([enc(b) for b in B])
    report.add("final B partial factorization", q is None, q)
    R = _tups(final["R"])
    expected_R = coset_transversal(H, 4 * (H.index or 1))
    diff = _list_diff(expected_R, R)
    report.add("transversal R", diff is None, diff)
    lifted = _tups(final["lifted_B"])
    expected_lift = [group._op(b, r) for r in R for b in B]
    diff = _list_diff(expected_lift, lifted)
    report.add("lifted B = B R", diff is None, diff)
    if H.index != 1:
        q = quotient_failure([enc(b) for b in lifted])
        report.add("lifted B partial factorization", q is None, q)
    _density(report, seq.base, lifted, depth, window, require_density)


# ------------------------------------------------------------------ t2i


def _verify_t2i(doc: dict, report: VerificationReport, window: int, depth: int, require_density: bool) -> None:
    group = parse_group(doc["group"])
    base = default_topology(group, doc.get("topology"))
    F = _tups(doc["final"]["F"])
    report.add("F matches config", F == _tups(doc["config"]["F"]), {"F": doc["final"]["F"]})
    D = difference_set(group, F)
    steps = doc["transcript"]
    canonical = iter_FF(group, F)
    owner: Dict[Element, int] = {}
    expected_B: List[Element] = []
    for alpha, st in enumerate(steps):
        K = _tups(st["K"])
        x = _tup(st["x"])
        bad = next(((k, k2) for k in K for k2 in K if group._op(group._inv(k), k2) in D), None)
        report.add(f"step {alpha}: K in F-family", st.get("alpha") == alpha and bad is None,
                   {"pair": [_el(bad[0]), _el(bad[1])]} if bad else {"alpha": st.get("alpha")})
        want = next(canonical, None)
        report.add(f"step {alpha}: canonical K", want is not None and list(want) == K,
                   {"expected": _els(want) if want else None, "found": st["K"]})
        clash = None
        for f in F:
            for k in K:
                y = group._op(group._op(f, group._inv(k)), x)
                if owner.get(y, alpha) != alpha:
                    clash = {"alpha": owner[y], "beta": alpha, "element": _el(y)}
                owner.setdefault(y, alpha)
        report.add(f"step {alpha}: blocks disjoint", clash is None, clash)
        expected_B.extend(group._op(group._inv(k), x) for k in K)
        if not report.verdict:
            return
    B = _tups(doc["final"]["B"])
    diff = _list_diff(expected_B, B)
    report.add("B = union of K^-1 x", diff is None, diff)
    ok, violation = verify_partial_factorization(FactorizationWitness(group, F, B))
    report.add("F B partial factorization", ok, violation.to_json() if violation else None)
    _density(report, base, B, depth, window, require_density)


# ------------------------------------------------------------------ t2ii / ex3


def _transversal_checks(report: VerificationReport, H: SubgroupView, R: List[Element], seed: List[Element],
                        window: int) -> None:
    group = H.ambient
    seen: Dict[Any, Element] = {}
    clash = None
    for r in R:
        key = H.coset_key(r)
        if key in seen and clash is None:
            clash = {"pair": [_el(seen[key]), _el(r)]}
        seen.setdefault(key, r)
    report.add("one representative per coset", clash is None, clash)
    miss = next((g for g in group.elements(window) if H.coset_key(g) not in seen), None)
    report.add("window cover", miss is None, {"uncovered": _el(miss) if miss is not None else None})
    Rset = set(R)
    out = next((s for s in seed if s not in Rset), None)
    report.add("seed contained in transversal", out is None, {"missing": _el(out) if out is not None else None})
    if clash is None:
        try:
            diff = _list_diff(coset_transversal(H, window, seed=seed), R)
        except InvalidSeedError as exc:
            diff = {"error": str(exc)}
        report.add("deterministic completion", diff is None, diff)


def _subgroup(group: Group, gens) -> SubgroupView:
    return subgroup_generated(group, _tups(gens))


def _verify_t2ii(doc: dict, report: VerificationReport, window: int, depth: int, require_density: bool) -> None:
    group = parse_group(doc["group"])
    base = default_topology(group, doc.get("topology"))
    H = _subgroup(group, doc["config"]["subgroup"])
    if H.index is not None:
        report.add("H of infinite index", False, {"index": H.index})
        return
    used: Dict[Any, int] = {}
    expected_S: List[Element] = []
    for alpha, st in enumerate(doc["transcript"]):
        n = st["level"]
        K = _tups(st["K"])
        x = _tup(st["x"])
        report.add(f"step {alpha}: level schedule", st.get("alpha") == alpha and n == ruler_level(alpha),
                   {"level": n, "expected": ruler_level(alpha)})
        level = base.level(n)
        covers = len(K) == level.index and len({level.coset_key(k) for k in K}) == level.index
        report.add(f"step {alpha}: K meets every coset of U_{n}", covers, {"size": len(K)})
        keys = [H.coset_key(k) for k in K]
        report.add(f"step {alpha}: K in distinct H-cosets", len(set(keys)) == len(keys), {"K": st["K"]})
        clash = None
        for k in K:
            y = group._op(k, x)
            key = H.coset_key(y)
            if key in used and clash is None:
                clash = {"alpha": used[key], "beta": alpha, "element": _el(y)}
            used.setdefault(key, alpha)
            expected_S.append(y)
        report.add(f"step {alpha}: H K x disjoint from earlier", clash is None, clash)
        if not report.verdict:
            return
    S = _tups(doc["final"]["S"])
    diff = _list_diff(expected_S, S)
    report.add("S = union of K x", diff is None, diff)
    R = _tups(doc["final"]["R"])
    _transversal_checks(report, H, R, S, doc["config"]["window"])
    _density(report, base, R, depth, window, require_density)
    report.density["seed_all_witnessed"] = is_dense_window(base, S, depth, window).all_witnessed


def _verify_ex3(doc: dict, report: VerificationReport, window: int, depth: int, require_density: bool) -> None:
    group = parse_group(doc["group"])
    base = default_topology(group, doc.get("topology"))
    A = _subgroup(group, doc["config"]["subgroup"])
    if A.order is None:
        report.add("A finite", False, {"subgroup": doc["config"]["subgroup"]})
        return
    opens = iter_opens(base)
    used: Dict[Any, int] = {}
    xs: List[Element] = []
    for i, st in enumerate(doc["transcript"]):
        n, t = next(opens)
        x = _tup(st["x"])
        report.add(f"step {i}: open set order", st["level"] == n and _tup(st["translate"]) == t,
                   {"expected": [n, _el(t)]})
        level = base.level(n)
        report.add(f"step {i}: x in U t", level.coset_key(x) == level.coset_key(t), {"x": st["x"]})
        key = A.coset_key(x)
        report.add(f"step {i}: new A-coset", key not in used, {"x": st["x"], "earlier": used.get(key)})
        used.setdefault(key, i)
        xs.append(x)
        if not report.verdict:
            return
    B = _tups(doc["final"]["B"])
    _transversal_checks(report, A, B, xs, doc["config"]["window"])
    _density(report, base, B, depth, window, require_density)


# ------------------------------------------------------------------ entry points


_VERIFIERS = {"t1": _verify_t1, "t2i": _verify_t2i, "t2ii": _verify_t2ii, "ex3": _verify_ex3}


def verify_certificate(doc: dict, window: int = 200, depth: int = 5, require_density: bool = False) -> VerificationReport:
    """Recompute every claim of a certificate from its raw sets."""
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        raise PreconditionError("not a schema_version 1 certificate")
    kind = doc.get("kind")
    if kind not in _VERIFIERS:
        raise PreconditionError(f"unknown certificate kind {kind!r}")
    report = VerificationReport(kind)
    t0 = time.monotonic()
    try:
        _VERIFIERS[kind](doc, report, window, depth, require_density)
    except InstanceMismatchError as exc:
        report.add("canonical elements", False, {"error": str(exc)})
    except PreconditionError:
        raise
    except (KeyError, TypeError, ValueError, StopIteration) as exc:
        raise PreconditionError(f"malformed certificate: {exc!r}") from exc
    report.elapsed_ms = int((time.monotonic() - t0) * 1000)
    return report


def verify_document(doc: Any, window: int = 200, depth: int = 5, require_density: bool = False) -> dict:
    """Verify a certificate, a factorization witness, or a list of witnesses."""
    if isinstance(doc, dict) and "kind" in doc:
        return verify_certificate(doc, window, depth, require_density).to_json()
    witnesses = doc if isinstance(doc, list) else [doc]
    results = []
    for w in witnesses:
        try:
            results.append(verify_witness(FactorizationWitness.from_json(w)))
        except (KeyError, TypeError) as exc:
            raise PreconditionError(f"malformed witness: {exc!r}") from exc
    ok = all(r["ok"] for r in results)
    return {"kind": "witness", "verdict": "pass" if ok else "fail", "witnesses": results}


# ------------------------------------------------------------------ crosscheck


def crosscheck(bound: int) -> dict:
    """Consistency of the factorization module with the exhaustive oracle.

    For every shipped finite group of order ``<= bound``: each subgroup gives
    verifying boxes of index ``|G:H|`` and ``|H|`` that the oracle also
    lists; every oracle output verifies; odd orders have no index-2 boxes.
    """
    if bound > DEFAULT_BOUND:
        raise SizeBoundError(f"crosscheck bound {bound} exceeds {DEFAULT_BOUND}")
    groups = []
    counterexamples = []
    for G in abelian_groups_up_to(bound):
        n = G.order
        listing = {d: enumerate_boxes(G, d, bound) for d in range(1, n + 1) if n % d == 0}
        found = {d: {(tuple(sorted(w.A)), tuple(sorted(w.B))) for w in ws} for d, ws in listing.items()}
        for d, ws in listing.items():
            for w in ws:
                if not verify_witness(w)["ok"]:
                    counterexamples.append({"group": G.descriptor, "reason": "oracle box fails", "witness": w.to_json()})
        subgroups = all_subgroups(G)
        for H in subgroups:
            for w, declared, want in ((subgroup_box(H), H, H.index), (transversal_box(H), None, H.order)):
                try:
                    got = box_index(w, declared)
                except InvalidWitnessError as exc:
                    counterexamples.append({"group": G.descriptor, "subgroup": H.label, "reason": str(exc)})
                    continue
                key = (tuple(sorted(w.A)), tuple(sorted(w.B)))
                if got != want or key not in found.get(want, set()):
                    counterexamples.append({
                        "group": G.descriptor, "subgroup": H.label, "index": want,
                        "reason": "box missing from oracle listing" if got == want else f"index {got}",
                    })
        entry = {
            "group": G.descriptor,
            "order": n,
            "subgroups": len(subgroups),
            "boxes": {str(d): len(ws) for d, ws in listing.items()},
        }
        if n % 2:
            obstruction = odd_torsion_obstruction(G, bound)
            entry["odd_torsion_ok"] = obstruction.ok
            if not obstruction.ok:
                counterexamples.append({"group": G.descriptor, "reason": "index-2 box in odd order"})
        groups.append(entry)
    return {"bound": bound, "groups": groups, "counterexamples": counterexamples, "ok": not counterexamples}
