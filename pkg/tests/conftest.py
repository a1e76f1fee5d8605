"""Shared fixtures: live portal server on an ephemeral port, HTTP helpers."""

from __future__ import annotations

import json
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path

import pytest

from hibou.server import PortalApp, ServerConfig, make_server

REPO = Path(__file__).resolve().parent.parent
DEMO_DIR = REPO / "demo"


@dataclass
class HttpReply:
    status: int
    body: bytes
    content_type: str

    @property
    def text(self) -> str:
        return self.body.decode("utf-8")

    def json(self):
        return json.loads(self.body)


class PortalClient:
    def __init__(self, port: int):
        self.base = f"http://127.0.0.1:{port}"

    def request(
        self, method: str, path: str, body: bytes | None = None, content_type: str = "application/json"
    ) -> HttpReply:
        request = urllib.request.Request(self.base + path, data=body, method=method)
        if body is not None:
            request.add_header("Content-Type", content_type)
        try:
            with urllib.request.urlopen(request) as response:
                return HttpReply(response.status, response.read(), response.headers.get("Content-Type", ""))
        except urllib.error.HTTPError as err:
            return HttpReply(err.code, err.read(), err.headers.get("Content-Type", ""))

    def get(self, path: str) -> HttpReply:
        return self.request("GET", path)

    def post_json(self, path: str, payload: dict) -> HttpReply:
        return self.request("POST", path, json.dumps(payload).encode("utf-8"))

    def post_text(self, path: str, text: str) -> HttpReply:
        return self.request("POST", path, text.encode("utf-8"), content_type="text/plain")


@dataclass
class RunningPortal:
    app: PortalApp
    client: PortalClient
    port: int


def start_portal(config: ServerConfig):
    app = PortalApp(config)
    app.startup()
    server_config = ServerConfig(port=0)
    server = make_server(server_config, app)
    port = server.server_address[1]
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return RunningPortal(app=app, client=PortalClient(port), port=port), server


@pytest.fixture
def portal(tmp_path):
    config = ServerConfig(journal_dir=tmp_path / "journals")
    running, server = start_portal(config)
    yield running
    server.shutdown()
    server.server_close()


@pytest.fixture
def demo_portal(tmp_path):
    config = ServerConfig(
        ontology_dir=DEMO_DIR,
        ui_config=DEMO_DIR / "custom.uicfg.hfs",
        journal_dir=tmp_path / "journals",
    )
    running, server = start_portal(config)
    yield running
    server.shutdown()
    server.server_close()
