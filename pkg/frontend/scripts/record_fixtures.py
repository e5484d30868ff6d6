#!/usr/bin/env python3
"""Record live-service API fixtures for the web client's contract tests.

Boots the real authoring service in-process, replays the exact action
sequence the tests drive, and captures every response verbatim. The tests
then run the client against these recordings, so any value the client
renders is guaranteed to have come from the service, never from client-side
recomputation.

Usage: python3 scripts/record_fixtures.py   (from the frontend/ directory)
"""

import json
import math
import threading
from pathlib import Path

import requests

from lessonforge.service import create_server

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

OUTCOMES_TEXT = "Teach Tee joint welding technique"
SKILL_EDIT_TEXT = "Maintain correct travel speed"
NEW_NODE_ACTIVITY = "weld-quality-check"
NODE_PATCH = {"timingSeconds": 300, "message": "Final check",
              "hintAudio": True, "hintVisual": False}


class Recorder:
    def __init__(self, base_url):
        self.base_url = base_url
        self.http = requests.Session()
        self.queues = {}
        self.uploads = {}
        self.meta = {}

    def call(self, method, path, body=None, raw_body=None, etag=None, record=True):
        headers = {}
        kwargs = {}
        if raw_body is not None:
            headers["Content-Type"] = "application/json"
            kwargs["data"] = raw_body
        elif body is not None:
            kwargs["json"] = body
        if etag is not None:
            headers["If-Match"] = etag
        response = self.http.request(method, f"{self.base_url}{path}",
                                     headers=headers, **kwargs)
        if record:
            if raw_body is not None and method == "POST" and path == "/documents":
                self.uploads[raw_body] = {"status": response.status_code,
                                          "body": response.text}
            else:
                key = f"{method} {path}"
                self.queues.setdefault(key, []).append(
                    {"status": response.status_code, "body": response.text})
        return response

    def refresh_views(self, document_id):
        """Mirror the client's post-mutation reads: validate, then sequence."""
        self.call("GET", f"/documents/{document_id}/validate")
        self.call("GET", f"/documents/{document_id}/sequence")

    def dump(self, name):
        FIXTURES.mkdir(parents=True, exist_ok=True)
        payload = {"meta": self.meta, "queues": self.queues, "uploads": self.uploads}
        path = FIXTURES / f"{name}.json"
        path.write_text(json.dumps(payload, indent=1, sort_keys=True), "utf-8")
        print(f"wrote {path} ({sum(len(q) for q in self.queues.values())} responses)")


def record_main(base_url):
    rec = Recorder(base_url)

    # boot: empty listing, create document, load library, initial views
    rec.call("GET", "/documents")
    created = rec.call("POST", "/documents",
                       body={"mode": "welding", "title": "Untitled lesson"}).json()
    doc_id = created["documentId"]
    etag = created["etag"]
    rec.meta["documentId"] = doc_id
    rec.call("GET", "/libraries/welding")
    rec.refresh_views(doc_id)

    # outcomes
    state = rec.call("PUT", f"/documents/{doc_id}/outcomes",
                     body={"text": OUTCOMES_TEXT}, etag=etag).json()
    rec.refresh_views(doc_id)
    rec.meta["staleEtag"] = state["etag"]

    # generate plan
    state = rec.call("POST", f"/documents/{doc_id}/generate",
                     body={"level": "objectives", "generator": "deterministic"},
                     etag=state["etag"]).json()
    rec.refresh_views(doc_id)
    rec.meta["skillId"] = state["plan"]["skills"][0]["id"]

    # lesson graph
    state = rec.call("POST", f"/documents/{doc_id}/graph/lessongraph",
                     etag=state["etag"]).json()
    rec.refresh_views(doc_id)
    rec.meta["chainTailId"] = state["graph"]["nodes"][-1]["nodeId"]

    # local skill edit, then per-item undo
    state = rec.call("PATCH", f"/documents/{doc_id}/items/skills/{rec.meta['skillId']}",
                     body={"text": SKILL_EDIT_TEXT}, etag=state["etag"]).json()
    rec.refresh_views(doc_id)
    state = rec.call("POST",
                     f"/documents/{doc_id}/items/skills/{rec.meta['skillId']}/undo",
                     etag=state["etag"]).json()
    rec.refresh_views(doc_id)

    # place a node from the palette (same position formula as the client)
    count = len(state["graph"]["nodes"])
    position = {"x": 60 + (count % 5) * 230, "y": 60 + math.floor(count / 5) * 170}
    state = rec.call("POST", f"/documents/{doc_id}/graph/nodes",
                     body={"activityId": NEW_NODE_ACTIVITY, "position": position},
                     etag=state["etag"]).json()
    rec.refresh_views(doc_id)
    rec.meta["newNodeId"] = state["node"]["nodeId"]

    # connect chain tail -> new node
    state = rec.call("POST", f"/documents/{doc_id}/graph/edges",
                     body={"from": rec.meta["chainTailId"],
                           "to": rec.meta["newNodeId"]},
                     etag=state["etag"]).json()
    rec.refresh_views(doc_id)

    # node property form
    state = rec.call("PATCH",
                     f"/documents/{doc_id}/graph/nodes/{rec.meta['newNodeId']}",
                     body={"properties": NODE_PATCH}, etag=state["etag"]).json()
    rec.refresh_views(doc_id)
    rec.meta["etagBeforeUpload"] = state["etag"]

    # download, then upload the same bytes as a new document
    download = rec.call("GET", f"/documents/{doc_id}/download")
    uploaded = rec.call("POST", "/documents", raw_body=download.text).json()
    assert uploaded["etag"] == state["etag"], "upload must preserve the etag"
    rec.meta["uploadedDocumentId"] = uploaded["documentId"]
    rec.refresh_views(uploaded["documentId"])

    # stale write -> 412, then the reload the client performs
    stale = rec.call("PUT", f"/documents/{doc_id}/outcomes",
                     body={"text": "race"}, etag=rec.meta["staleEtag"])
    assert stale.status_code == 412
    rec.call("GET", f"/documents/{doc_id}")
    rec.refresh_views(doc_id)

    rec.dump("scenario_main")


def record_cyclic(base_url):
    rec = Recorder(base_url)
    # set up a cyclic document without recording the edits, since the client
    # only ever *opens* this document
    setup = Recorder(base_url)
    created = setup.call("POST", "/documents",
                         body={"mode": "welding", "title": "Cyclic lesson"},
                         record=False).json()
    doc_id, etag = created["documentId"], created["etag"]
    a = setup.call("POST", f"/documents/{doc_id}/graph/nodes",
                   body={"activityId": "equipment-tour"}, etag=etag,
                   record=False).json()
    b = setup.call("POST", f"/documents/{doc_id}/graph/nodes",
                   body={"activityId": "ppe-walkthrough"}, etag=a["etag"],
                   record=False).json()
    e1 = setup.call("POST", f"/documents/{doc_id}/graph/edges",
                    body={"from": a["node"]["nodeId"], "to": b["node"]["nodeId"]},
                    etag=b["etag"], record=False).json()
    setup.call("POST", f"/documents/{doc_id}/graph/edges",
               body={"from": b["node"]["nodeId"], "to": a["node"]["nodeId"]},
               etag=e1["etag"], record=False)

    rec.meta["documentId"] = doc_id
    rec.call("GET", "/documents")
    rec.call("GET", f"/documents/{doc_id}")
    rec.call("GET", "/libraries/welding")
    rec.refresh_views(doc_id)
    rec.dump("scenario_cyclic")


def main():
    import tempfile
    with tempfile.TemporaryDirectory() as state_dir:
        server = create_server(state_dir=f"{state_dir}/main", port=0)
        thread = threading.Thread(
            target=lambda: server.serve_forever(poll_interval=0.02), daemon=True)
        thread.start()
        try:
            record_main(f"http://127.0.0.1:{server.server_address[1]}")
        finally:
            server.shutdown()
            server.server_close()

        server = create_server(state_dir=f"{state_dir}/cyclic", port=0)
        thread = threading.Thread(
            target=lambda: server.serve_forever(poll_interval=0.02), daemon=True)
        thread.start()
        try:
            record_cyclic(f"http://127.0.0.1:{server.server_address[1]}")
        finally:
            server.shutdown()
            server.server_close()


if __name__ == "__main__":
    main()
