"""HTTP service contract: CRUD, etags, persistence, and engine equivalence."""

import json
import threading

import pytest
import requests

from lessonforge.service import create_server


def create_doc(base, mode="welding", title="Service test"):
    response = requests.post(f"{base}/documents", json={"mode": mode, "title": title})
    assert response.status_code == 201
    body = response.json()
    return body["documentId"], body["etag"]


def mutate(base, doc_id, etag, method, path, body=None, expect=200):
    response = requests.request(method, f"{base}/documents/{doc_id}{path}",
                                json=body, headers={"If-Match": etag})
    assert response.status_code == expect, response.text
    return response.json()


def test_create_set_outcomes_generate_flow(live_server):
    base, _server = live_server
    doc_id, etag = create_doc(base)
    state = mutate(base, doc_id, etag, "PUT", "/outcomes",
                   {"text": "Learn basics of MIG welding including safety"})
    assert state["plan"]["staleLevels"] == ["objectives", "skills", "assessment",
                                            "activities"]
    state = mutate(base, doc_id, state["etag"], "POST", "/generate",
                   {"level": "objectives", "generator": "deterministic"})
    assert len(state["plan"]["objectives"]) == 3
    assert len(state["plan"]["skills"]) == 3
    assert len(state["plan"]["criteria"]) == 3
    assert state["plan"]["activitySequence"]
    assert state["plan"]["staleLevels"] == []
    fetched = requests.get(f"{base}/documents/{doc_id}").json()
    assert fetched["plan"] == state["plan"]


def test_stale_etag_yields_412(live_server):
    base, _server = live_server
    doc_id, etag = create_doc(base)
    mutate(base, doc_id, etag, "PUT", "/outcomes", {"text": "Learn welding"})
    response = requests.put(f"{base}/documents/{doc_id}/outcomes",
                            json={"text": "race"}, headers={"If-Match": etag})
    assert response.status_code == 412
    assert response.json()["code"] == "StaleEtag"


def test_missing_if_match_is_refused(live_server):
    base, _server = live_server
    doc_id, _etag = create_doc(base)
    response = requests.put(f"{base}/documents/{doc_id}/outcomes",
                            json={"text": "no header"})
    assert response.status_code == 400
    assert response.json()["code"] == "MissingIfMatch"


def test_unknown_document_is_404(live_server):
    base, _server = live_server
    assert requests.get(f"{base}/documents/doc-missing").status_code == 404
    response = requests.post(f"{base}/documents/doc-missing/undo",
                             headers={"If-Match": "x"})
    assert response.status_code == 404


def test_item_crud_and_undo_over_http(live_server):
    base, _server = live_server
    doc_id, etag = create_doc(base)
    state = mutate(base, doc_id, etag, "PUT", "/outcomes", {"text": "Learn welding"})
    state = mutate(base, doc_id, state["etag"], "POST", "/generate",
                   {"level": "objectives"})
    skill_id = state["plan"]["skills"][0]["id"]
    state = mutate(base, doc_id, state["etag"], "PATCH", f"/items/skills/{skill_id}",
                   {"text": "Hold a stable arc"})
    skills = {item["id"]: item for item in state["plan"]["skills"]}
    assert skills[skill_id]["text"] == "Hold a stable arc"
    assert skills[skill_id]["provenance"] == "manual"
    assert "skills" not in state["plan"]["staleLevels"]
    assert "assessment" in state["plan"]["staleLevels"]

    state = mutate(base, doc_id, state["etag"], "POST", "/items/skills",
                   {"text": "A brand new skill"}, expect=201)
    assert len(state["plan"]["skills"]) == 4

    new_id = state["plan"]["skills"][-1]["id"]
    state = mutate(base, doc_id, state["etag"], "DELETE", f"/items/skills/{new_id}")
    assert len(state["plan"]["skills"]) == 3

    state = mutate(base, doc_id, state["etag"], "POST",
                   f"/items/skills/{skill_id}/undo")
    skills = {item["id"]: item for item in state["plan"]["skills"]}
    assert skills[skill_id]["provenance"] == "generated"

    state = mutate(base, doc_id, state["etag"], "POST", "/undo")
    assert state["canRedo"] is True
    state = mutate(base, doc_id, state["etag"], "POST", "/redo")
    assert state["canRedo"] is False

    response = requests.patch(f"{base}/documents/{doc_id}/items/skills/bogus",
                              json={"text": "x"}, headers={"If-Match": state["etag"]})
    assert response.status_code == 404


def test_graph_editing_validation_and_sequence(live_server):
    base, _server = live_server
    doc_id, etag = create_doc(base)
    state = mutate(base, doc_id, etag, "POST", "/graph/nodes",
                   {"activityId": "equipment-tour"}, expect=201)
    first = state["node"]["nodeId"]
    state = mutate(base, doc_id, state["etag"], "POST", "/graph/nodes",
                   {"activityId": "ppe-walkthrough", "position": {"x": 300, "y": 40}},
                   expect=201)
    second = state["node"]["nodeId"]
    state = mutate(base, doc_id, state["etag"], "POST", "/graph/edges",
                   {"from": first, "to": second}, expect=201)
    edge_id = state["edge"]["edgeId"]

    state = mutate(base, doc_id, state["etag"], "PATCH", f"/graph/nodes/{second}",
                   {"properties": {"timingSeconds": 45, "hintAudio": False}})
    assert state["node"]["properties"]["timingSeconds"] == 45

    diagnostics = requests.get(f"{base}/documents/{doc_id}/validate").json()["diagnostics"]
    assert diagnostics == []

    sequence = requests.get(f"{base}/documents/{doc_id}/sequence").json()
    assert [entry["nodeId"] for entry in sequence["entries"]] == [first, second]
    assert sequence["entries"][1]["timingSeconds"] == 45

    state = mutate(base, doc_id, state["etag"], "DELETE", f"/graph/edges/{edge_id}")
    diagnostics = requests.get(f"{base}/documents/{doc_id}/validate").json()["diagnostics"]
    assert {d["category"] for d in diagnostics} == {"MultipleSequences", "IsolatedNode"}

    state = mutate(base, doc_id, state["etag"], "DELETE", f"/graph/nodes/{second}")
    assert len(state["graph"]["nodes"]) == 1

    response = requests.post(f"{base}/documents/{doc_id}/graph/edges",
                             json={"from": first, "to": first},
                             headers={"If-Match": state["etag"]})
    assert response.status_code == 400
    assert response.json()["code"] == "SelfLoop"


def test_sequence_on_cyclic_graph_is_400_cyclicgraph(live_server):
    base, _server = live_server
    doc_id, etag = create_doc(base)
    state = mutate(base, doc_id, etag, "POST", "/graph/nodes",
                   {"activityId": "equipment-tour"}, expect=201)
    a = state["node"]["nodeId"]
    state = mutate(base, doc_id, state["etag"], "POST", "/graph/nodes",
                   {"activityId": "ppe-walkthrough"}, expect=201)
    b = state["node"]["nodeId"]
    state = mutate(base, doc_id, state["etag"], "POST", "/graph/edges",
                   {"from": a, "to": b}, expect=201)
    state = mutate(base, doc_id, state["etag"], "POST", "/graph/edges",
                   {"from": b, "to": a}, expect=201)
    response = requests.get(f"{base}/documents/{doc_id}/sequence")
    assert response.status_code == 400
    assert response.json()["code"] == "CyclicGraph"


def test_lessongraph_builds_chain_from_sequence(live_server):
    base, _server = live_server
    doc_id, etag = create_doc(base)
    state = mutate(base, doc_id, etag, "PUT", "/outcomes",
                   {"text": "Learn tee joint welding"})
    state = mutate(base, doc_id, state["etag"], "POST", "/generate",
                   {"level": "objectives"})
    state = mutate(base, doc_id, state["etag"], "POST", "/graph/lessongraph")
    sequence = requests.get(f"{base}/documents/{doc_id}/sequence").json()
    assert [e["activityId"] for e in sequence["entries"]] == \
        [ref["activityId"] for ref in state["plan"]["activitySequence"]]
    assert requests.get(f"{base}/documents/{doc_id}/validate").json()["diagnostics"] == []


def test_download_returns_canonical_lesson_bytes(live_server):
    base, _server = live_server
    doc_id, etag = create_doc(base)
    state = mutate(base, doc_id, etag, "PUT", "/outcomes", {"text": "Learn welding"})
    response = requests.get(f"{base}/documents/{doc_id}/download")
    assert response.status_code == 200
    payload = json.loads(response.content)
    assert payload["schemaVersion"] == 1
    assert response.headers["ETag"] == state["etag"]
    # upload it back as a new document: same content, same etag
    again = requests.post(f"{base}/documents", json=payload)
    assert again.status_code == 201
    assert again.json()["etag"] == state["etag"]


def test_mode_switch_flags_foreign_nodes_without_deleting(live_server):
    base, _server = live_server
    doc_id, etag = create_doc(base)
    state = mutate(base, doc_id, etag, "POST", "/graph/nodes",
                   {"activityId": "equipment-tour"}, expect=201)
    state = mutate(base, doc_id, state["etag"], "PUT", "/mode", {"mode": "demo"})
    assert state["mode"] == "demo"
    assert len(state["graph"]["nodes"]) == 1
    diagnostics = requests.get(f"{base}/documents/{doc_id}/validate").json()["diagnostics"]
    assert [d["category"] for d in diagnostics] == ["UnknownActivity"]
    # switching to the current mode changes nothing
    unchanged = mutate(base, doc_id, state["etag"], "PUT", "/mode", {"mode": "demo"})
    assert unchanged["etag"] == state["etag"]


def test_libraries_endpoints(live_server):
    base, _server = live_server
    listing = requests.get(f"{base}/libraries").json()["libraries"]
    assert {entry["libraryId"]: entry["descriptorCount"] for entry in listing} == \
        {"welding": 27, "demo": 12}
    bundle = requests.get(f"{base}/libraries/welding").json()
    assert len(bundle["descriptors"]) == 27
    assert len(bundle["phases"]) == 4
    practice = requests.get(f"{base}/libraries/welding/phase/Practice").json()
    assert practice["descriptors"]
    assert all(d["phase"] == "practice" for d in practice["descriptors"])
    assert requests.get(f"{base}/libraries/nope").status_code == 404
    assert requests.get(f"{base}/libraries/welding/phase/nope").status_code == 404


def test_delete_level_and_clear_graph(live_server):
    base, _server = live_server
    doc_id, etag = create_doc(base)
    state = mutate(base, doc_id, etag, "PUT", "/outcomes", {"text": "Learn welding"})
    state = mutate(base, doc_id, state["etag"], "POST", "/generate",
                   {"level": "objectives"})
    state = mutate(base, doc_id, state["etag"], "POST", "/graph/lessongraph")
    assert state["graph"]["nodes"]

    state = mutate(base, doc_id, state["etag"], "DELETE", "/levels/skills")
    assert state["plan"]["skills"] == []
    assert all(item["link"] is None for item in state["plan"]["criteria"])

    state = mutate(base, doc_id, state["etag"], "DELETE", "/graph")
    assert state["graph"]["nodes"] == [] and state["graph"]["edges"] == []
    state = mutate(base, doc_id, state["etag"], "POST", "/undo")
    assert state["graph"]["nodes"]

    state = mutate(base, doc_id, state["etag"], "DELETE", "/levels/outcomes")
    assert state["plan"]["outcomes"] == ""


def test_delete_document(live_server):
    base, _server = live_server
    doc_id, etag = create_doc(base)
    response = requests.delete(f"{base}/documents/{doc_id}",
                               headers={"If-Match": etag})
    assert response.status_code == 204
    assert requests.get(f"{base}/documents/{doc_id}").status_code == 404
    assert requests.get(f"{base}/documents").json()["documents"] == []


def test_restart_preserves_documents_and_etags(tmp_path):
    state_dir = tmp_path / "state"
    server = create_server(state_dir=state_dir, port=0)
    thread = threading.Thread(target=lambda: server.serve_forever(poll_interval=0.02), daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}"
    created = {}
    for index in range(3):
        doc_id, etag = create_doc(base, title=f"persisted {index}")
        state = mutate(base, doc_id, etag, "PUT", "/outcomes",
                       {"text": f"Learn welding topic {index}"})
        created[doc_id] = state["etag"]
    server.shutdown()
    server.server_close()
    thread.join(timeout=5)

    revived = create_server(state_dir=state_dir, port=0)
    thread = threading.Thread(target=lambda: revived.serve_forever(poll_interval=0.02), daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{revived.server_address[1]}"
    listing = requests.get(f"{base}/documents").json()["documents"]
    assert {entry["documentId"]: entry["etag"] for entry in listing} == created
    assert [entry["title"] for entry in listing] == \
        ["persisted 0", "persisted 1", "persisted 2"]
    revived.shutdown()
    revived.server_close()
    thread.join(timeout=5)


def test_empty_state_dir_yields_empty_listing(tmp_path):
    server = create_server(state_dir=tmp_path / "fresh", port=0)
    thread = threading.Thread(target=lambda: server.serve_forever(poll_interval=0.02), daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}"
    assert requests.get(f"{base}/documents").json()["documents"] == []
    server.shutdown()
    server.server_close()
    thread.join(timeout=5)


def test_unwritable_state_dir_fails_at_boot(tmp_path):
    from lessonforge.errors import StateDirUnwritable
    blocker = tmp_path / "occupied"
    blocker.write_text("not a directory", "utf-8")
    with pytest.raises(StateDirUnwritable):
        create_server(state_dir=blocker / "state", port=0)


def test_concurrent_mutations_serialize_without_loss(live_server):
    base, _server = live_server
    doc_id, etag = create_doc(base)
    mutate(base, doc_id, etag, "PUT", "/outcomes", {"text": "Learn welding"})
    texts = [f"concurrent skill {index}" for index in range(12)]
    errors = []

    def add(text):
        try:
            for _ in range(60):
                current = requests.get(f"{base}/documents/{doc_id}").json()["etag"]
                response = requests.post(f"{base}/documents/{doc_id}/items/skills",
                                         json={"text": text},
                                         headers={"If-Match": current})
                if response.status_code == 201:
                    return
                assert response.status_code == 412
            errors.append(f"gave up on {text}")
        except Exception as exc:  # pragma: no cover - thread diagnostics
            errors.append(repr(exc))

    threads = [threading.Thread(target=add, args=(text,)) for text in texts]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join(timeout=30)
    assert errors == []
    state = requests.get(f"{base}/documents/{doc_id}").json()
    got = [item["text"] for item in state["plan"]["skills"]]
    assert sorted(got) == sorted(texts)
    # final etag equals the hash of the persisted canonical content
    import hashlib
    download = requests.get(f"{base}/documents/{doc_id}/download")
    assert hashlib.sha256(download.content).hexdigest() == state["etag"]


def test_generator_domain_failure_maps_to_409(live_server):
    base, _server = live_server
    doc_id, etag = create_doc(base)
    state = mutate(base, doc_id, etag, "PUT", "/outcomes",
                   {"text": "quantum chromodynamics"})
    response = requests.post(f"{base}/documents/{doc_id}/generate",
                             json={"level": "objectives"},
                             headers={"If-Match": state["etag"]})
    assert response.status_code == 409
    assert response.json()["code"] == "GeneratorFailure"


def test_llm_generator_without_endpoint_maps_to_502(live_server, monkeypatch):
    monkeypatch.delenv("LESSONFORGE_LLM_URL", raising=False)
    base, _server = live_server
    doc_id, etag = create_doc(base)
    state = mutate(base, doc_id, etag, "PUT", "/outcomes", {"text": "Learn welding"})
    response = requests.post(f"{base}/documents/{doc_id}/generate",
                             json={"level": "objectives", "generator": "llm"},
                             headers={"If-Match": state["etag"]})
    assert response.status_code == 502


def test_api_state_equals_engine_state(live_server, welding):
    """The document reached over HTTP matches calling the engine directly."""
    from lessonforge.generator import deterministic_generate, full_plan_generate
    from lessonforge.graph import chain_from_sequence
    from lessonforge.interchange import lesson_bytes

    base, _server = live_server
    outcomes = "Learn basics of MIG welding including safety"
    doc_id, etag = create_doc(base, title="parity")
    state = mutate(base, doc_id, etag, "PUT", "/outcomes", {"text": outcomes})
    state = mutate(base, doc_id, state["etag"], "POST", "/generate",
                   {"level": "objectives"})
    state = mutate(base, doc_id, state["etag"], "POST", "/graph/lessongraph")

    doc = full_plan_generate(outcomes, welding, deterministic_generate)
    graph = chain_from_sequence([r.activity_id for r in doc.activity_sequence], welding)
    expected = json.loads(lesson_bytes(doc, graph, "parity"))
    served = json.loads(requests.get(f"{base}/documents/{doc_id}/download").content)
    assert served == expected
