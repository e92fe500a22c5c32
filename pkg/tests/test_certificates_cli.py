import copy
import json

import pytest

from boxres.certificates import crosscheck, dumps, verify_certificate, verify_document
from boxres.cli import EXIT_CHECK_FAILED, EXIT_HORIZON, EXIT_OK, EXIT_USAGE, main, split_elements
from boxres.errors import PreconditionError, SizeBoundError
from boxres.groups import Cyclic
from boxres.oracle import enumerate_boxes

CONSTRUCT = {
    "t1": ["construct", "t1", "--group", "boolean", "--seq", "basis-vectors", "--stages", "3"],
    "t1-factorials": ["construct", "t1", "--group", "integers", "--seq", "factorials", "--stages", "3"],
    "t2i": ["construct", "t2i", "--group", "integers", "--topology", "finite-index", "--factor", "0,1", "--steps", "60"],
    "t2ii": ["construct", "t2ii", "--group", "dsum:2*", "--subgroup", "e1", "--steps", "40"],
    "ex3": ["construct", "ex3", "--group", "dsum:2*", "--subgroup", "e0", "--steps", "30"],
}


def _construct(tmp_path, name, extra=()):
    out = tmp_path / f"{name}.json"
    assert main(CONSTRUCT[name] + list(extra) + ["--out", str(out)]) == EXIT_OK
    return out


@pytest.fixture(scope="module")
def certs(tmp_path_factory):
    d = tmp_path_factory.mktemp("certs")
    return {name: json.loads(_construct(d, name).read_text()) for name in CONSTRUCT}


@pytest.mark.parametrize("name", list(CONSTRUCT))
def test_engine_certificates_verify(certs, name):
    report = verify_certificate(certs[name])
    assert report.verdict, [c.to_json() for c in report.failures()]
    assert report.checks and report.density is not None


@pytest.mark.parametrize("name", list(CONSTRUCT))
def test_round_trip_is_byte_exact(certs, name):
    text = dumps(certs[name])
    assert dumps(json.loads(text)) == text


@pytest.mark.parametrize("name", list(CONSTRUCT))
def test_construct_is_deterministic(tmp_path, name):
    first = _construct(tmp_path, name).read_bytes()
    second = _construct(tmp_path, name).read_bytes()
    assert first == second


def _flip(x):
    if len(x) == 1:
        return [x[0] + 1]
    y = list(x) or [0]
    y[0] ^= 1
    while y and y[-1] == 0:
        y.pop()
    return y


def mutations(doc):
    """Single-element removals, replacements and duplications of the final sets."""
    for key in sorted(k for k in doc["final"] if k != "F"):
        items = doc["final"][key]
        for i in sorted({0, len(items) // 2, len(items) - 1}):
            for mode in ("remove", "replace", "duplicate"):
                d = copy.deepcopy(doc)
                target = d["final"][key]
                if mode == "remove":
                    del target[i]
                elif mode == "replace":
                    target[i] = _flip(target[i])
                else:
                    target.insert(i + 1, target[i])
                yield f"{key}[{i}] {mode}", d


@pytest.mark.parametrize("name", list(CONSTRUCT))
def test_mutations_fail_with_location(certs, name):
    count = 0
    for label, doc in mutations(certs[name]):
        report = verify_certificate(doc)
        assert not report.verdict, label
        assert report.failures()[0].detail, label
        count += 1
    assert count >= 9


def test_duplicate_in_t2i_reports_colliding_pair(certs):
    doc = copy.deepcopy(certs["t2i"])
    doc["final"]["B"].append(doc["final"]["B"][0])
    report = verify_certificate(doc)
    names = {c.name: c.detail for c in report.failures()}
    assert "F B partial factorization" in names
    assert names["F B partial factorization"]["collision"] == doc["final"]["B"][0]


def test_recorded_checks_are_not_trusted(certs):
    doc = copy.deepcopy(certs["t1"])
    last = doc["transcript"][-1]
    last["B"] = last["B"][:-1]
    last["checks"] = {"partial": True, "coverage": True, "placement": True}
    assert not verify_certificate(doc).verdict


def test_witness_documents():
    boxes = [w.to_json() for w in enumerate_boxes(Cyclic(6), 2)]
    assert verify_document(boxes)["verdict"] == "pass"
    bad = {"group": "cyclic:4", "A": [[0], [1]], "B": [[0], [1]], "claim": "partial"}
    report = verify_document(bad)
    assert report["verdict"] == "fail" and report["witnesses"][0]["violation"]["collision"] == [1]


def test_unknown_schema():
    with pytest.raises(PreconditionError):
        verify_certificate({"kind": "t1"})


def test_crosscheck_examples():
    assert crosscheck(3)["ok"]
    report = crosscheck(12)
    assert report["ok"]
    c6 = next(g for g in report["groups"] if g["group"] == "cyclic:6")
    assert c6["boxes"]["2"] > 0 and c6["boxes"]["3"] > 0
    with pytest.raises(SizeBoundError):
        crosscheck(30)


def test_cyclic6_boxes_listed():
    two = {(tuple(w.A), tuple(w.B)) for w in enumerate_boxes(Cyclic(6), 2)}
    three = {(tuple(w.A), tuple(w.B)) for w in enumerate_boxes(Cyclic(6), 3)}
    assert (((0,), (3,)), ((0,), (1,), (2,))) in two
    assert (((0,), (1,), (2,)), ((0,), (3,))) in three


def test_exit_codes(tmp_path, capsys):
    assert main(["construct", "t1", "--group", "nonsense"]) == EXIT_USAGE
    assert main(["construct", "t1", "--stages", "9", "--max-elements", "100", "--out", str(tmp_path / "x")]) == EXIT_HORIZON
    assert main(["construct", "t2ii", "--group", "integers", "--subgroup", "2", "--steps", "3"]) == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["verify", "--cert", str(bad)]) == EXIT_USAGE
    assert main(["tile", "--set", "0,1,3"]) == EXIT_CHECK_FAILED
    assert main(["tile", "--set", "0,2"]) == EXIT_OK
    assert main(["check", "odd-torsion", "--group", "cyclic:9"]) == EXIT_OK
    assert main(["oracle", "boxes", "--group", "cyclic:8", "--index", "2"]) == EXIT_OK


def test_verify_exit_code_on_mutation(tmp_path, certs):
    doc = copy.deepcopy(certs["ex3"])
    del doc["final"]["B"][0]
    path = tmp_path / "m.json"
    path.write_text(dumps(doc))
    assert main(["verify", "--cert", str(path), "--out", str(tmp_path / "r.json")]) == EXIT_CHECK_FAILED
    assert json.loads((tmp_path / "r.json").read_text())["verdict"] == "fail"


def test_zero_step_constructions(tmp_path):
    out = tmp_path / "z.json"
    assert main(["construct", "t1", "--stages", "0", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["final"]["B"] == [[]] and verify_certificate(doc).verdict
    assert main(["construct", "t2i", "--factor", "0,1", "--steps", "0", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["final"]["B"] == [] and verify_certificate(doc).verdict


def test_split_elements():
    assert split_elements("0,1") == ["0", "1"]
    assert split_elements("[1,0,1];e2") == ["[1,0,1]", "e2"]
