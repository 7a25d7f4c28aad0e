#!/usr/bin/env python3
"""Walks the HTTP service through upload, labelling, training and extraction.

Start the service first:
    build/fuzzwrap serve --port 8080 --store /tmp/fuzzwrap-store
then:
    python3 samples/service_client.py [http://127.0.0.1:8080]
"""
import json
import pathlib
import sys
import urllib.request

URL = sys.argv[1] if len(sys.argv) > 1 else "http://127.0.0.1:8080"
BOOKS = pathlib.Path(__file__).resolve().parent / "books"


def call(method, path, body=None):
    data = None if body is None else json.dumps(body).encode()
    req = urllib.request.Request(URL + path, data=data, method=method,
                                 headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(req) as r:
        return json.load(r)


labels = {p["page_id"]: p for p in json.loads((BOOKS / "labels.json").read_text())["pages"]}
for pid, entry in labels.items():
    call("POST", "/pages", {"page_id": pid, "html": (BOOKS / entry["html_path"]).read_text()})
    call("PUT", f"/pages/{pid}/labels", {k: v for k, v in entry.items() if k != "html_path"})

model = call("POST", "/train", {"pages": list(labels)})["model_id"]
print("model", model)
print("c_moy per side:", [(s["zone"], s["edge"], s["left"]["c_moy"], s["right"]["c_moy"])
                          for s in call("GET", f"/models/{model}")["separators"]][:3], "...")

call("POST", "/pages", {"page_id": "shelf4", "html": (BOOKS / "shelf4.html").read_text()})
for t in call("POST", f"/models/{model}/extract?page=shelf4")["tuples"]:
    print({name: [v["text"] for v in vs] for name, vs in t["attributes"].items()})

print(call("POST", "/eval", {"model": model, "pages": list(labels)}))
