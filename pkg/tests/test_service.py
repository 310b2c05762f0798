"""HTTP service contract: payload shapes, status codes, session isolation."""
import pathlib

import pytest
from fastapi.testclient import TestClient

from minifun.service import create_app

CORPUS = pathlib.Path(__file__).parent / "corpus"


@pytest.fixture()
def client():
    return TestClient(create_app())


@pytest.fixture()
def session(client):
    src = (CORPUS / "imp.mf").read_text()
    r = client.post("/session", json={"source": src})
    assert r.status_code == 200
    body = r.json()
    assert body["diagnostics"] == []
    assert body["text"]
    return body["sessionId"]


def test_parse_error_is_400(client):
    r = client.post("/session", json={"source": "data T = |;"})
    assert r.status_code == 400
    assert r.json()["diagnostics"][0]["code"] == "SyntaxError"


def test_missing_source_is_400(client):
    assert client.post("/session", json={}).status_code == 400


def test_unknown_session_is_404(client):
    assert client.get("/session/nope/source").status_code == 404
    assert client.post("/session/nope/undo").status_code == 404


def test_source_carries_span_map(client, session):
    body = client.get(f"/session/{session}/source").json()
    text = body["text"]
    spans = body["spans"]
    by_loc = {s["loc"]: text[s["start"]:s["end"]] for s in spans}
    assert by_loc["cons:Prog.Prog/2"] == "[Dec]"
    assert by_loc["decl:Prog"] == "data Prog = Prog Name [Dec] [Stat];"
    assert "eq:run/1" in by_loc


def test_focus_rendering(client, session):
    r = client.post(f"/session/{session}/focus", json={"selector": "cons:Prog.Prog/2-3"})
    assert r.status_code == 200
    assert "{! [Dec] [Stat] !}" in r.json()["text"]
    assert r.json()["focus"] == "cons:Prog.Prog/2-3"


def test_focus_bad_selector(client, session):
    r = client.post(f"/session/{session}/focus", json={"selector": "cons:Prog.Prog/9"})
    assert r.status_code == 409
    assert r.json()["code"] == "BadIndex"


def test_ops_for_focus(client, session):
    client.post(f"/session/{session}/focus", json={"selector": "cons:Prog.Prog/2-3"})
    body = client.get(f"/session/{session}/ops").json()
    ops = {o["op"] for o in body["ops"]}
    assert {"group", "compound-fold"} <= ops
    assert "Prog" in body["declaredTypes"]
    for o in body["ops"]:
        assert isinstance(o["line"], str) and o["args"]


def test_fold_dialogue_payload(client, session):
    r = client.post(
        f"/session/{session}/fold",
        json={"range": "cons:Prog.Prog/2-3", "typeName": "Block", "kind": "data",
              "consName": "Block", "introduce": True},
    )
    assert r.status_code == 200
    body = r.json()
    assert "data Block = Block [Dec] [Stat];" in body["text"]
    assert "decl:Prog" in body["changed"] and "decl:Block" in body["changed"]


def test_apply_refusal_is_409_and_source_unchanged(client, session):
    before = client.get(f"/session/{session}/source").json()["text"]
    r = client.post(f"/session/{session}/apply", json={"opInvocation": "eliminate Prog"})
    assert r.status_code == 409
    body = r.json()
    assert body["code"] == "StillReferenced" and body["locations"]
    assert client.get(f"/session/{session}/source").json()["text"] == before


def test_apply_undo_round_trip_bytes(client, session):
    before = client.get(f"/session/{session}/source").json()["text"]
    r = client.post(f"/session/{session}/apply", json={"opInvocation": "rename-type Prog Program"})
    assert r.status_code == 200
    assert client.get(f"/session/{session}/source").json()["text"] != before
    assert client.post(f"/session/{session}/undo").status_code == 200
    assert client.get(f"/session/{session}/source").json()["text"] == before


def test_apply_structured_invocation(client, session):
    r = client.post(
        f"/session/{session}/apply",
        json={"opInvocation": {"op": "rename-cons", "args": {"old": "Skip", "new": "Pass"}}},
    )
    assert r.status_code == 200
    assert "Pass" in r.json()["text"]


def test_malformed_invocation_400_or_409(client, session):
    r = client.post(f"/session/{session}/apply", json={})
    assert r.status_code == 400
    r = client.post(f"/session/{session}/apply", json={"opInvocation": "frobnicate"})
    assert r.status_code == 409
    assert r.json()["code"] == "BadArguments"


def test_todos_listed_and_undone(client, session):
    assert client.get(f"/session/{session}/todos").json()["todos"] == []
    r = client.post(
        f"/session/{session}/apply",
        json={"opInvocation": 'include-cons Stat "SBlock Int"'},
    )
    assert r.status_code == 200
    todos = client.get(f"/session/{session}/todos").json()["todos"]
    assert {t["fun"] for t in todos} == {"exec", "describe"}
    assert all("loc" in t for t in todos)
    client.post(f"/session/{session}/undo")
    assert client.get(f"/session/{session}/todos").json()["todos"] == []


def test_history_lists_script_lines(client, session):
    client.post(f"/session/{session}/apply", json={"opInvocation": "rename-type Prog P2"})
    client.post(
        f"/session/{session}/fold",
        json={"range": "cons:P2.Prog/2-3", "typeName": "Block", "kind": "data", "consName": "Block"},
    )
    hist = client.get(f"/session/{session}/history").json()["history"]
    assert hist[0] == "rename-type Prog P2"
    assert len(hist) == 7  # rename + six compound constituents


def test_undo_empty_history_409(client, session):
    r = client.post(f"/session/{session}/undo")
    assert r.status_code == 409 and r.json()["code"] == "EmptyHistory"


def test_occurrences_equals_type(client, session):
    r = client.get(f"/session/{session}/occurrences", params={"equalsType": "[Stat]"})
    assert r.status_code == 200
    sels = r.json()["selectors"]
    assert "cons:Prog.Prog/3" in sels
    r2 = client.get(f"/session/{session}/occurrences", params={"mentionsName": "Undeclared"})
    assert r2.json()["selectors"] == []
    r3 = client.get(f"/session/{session}/occurrences")
    assert r3.status_code == 400


def test_sessions_are_independent(client):
    a = client.post("/session", json={"source": "data A = K;"}).json()["sessionId"]
    b = client.post("/session", json={"source": "data B = L;"}).json()["sessionId"]
    client.post(f"/session/{a}/apply", json={"opInvocation": "rename-type A A2"})
    assert "data B = L;" in client.get(f"/session/{b}/source").json()["text"]
    assert "A2" in client.get(f"/session/{a}/source").json()["text"]
