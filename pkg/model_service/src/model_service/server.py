"""HTTP scoring service.

Implements the pipeline's wire protocol bit-exactly::

    POST /score {"items": [{"id": str, "text": str}, ...]}
      -> 200 {"items": [{"id": str, "p_vulnerable": float}, ...]}
      -> 400 {"error": "..."} on any protocol violation

Scoring holds a lock around the forward pass, so responses are
deterministic for a fixed checkpoint regardless of request concurrency.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


def validate_request(payload) -> list[dict] | str:
    """Return the items list, or an error message string."""
    if not isinstance(payload, dict):
        return "request body must be a JSON object"
    items = payload.get("items")
    if not isinstance(items, list):
        return "request must carry an 'items' list"
    if not items:
        return "items must be non-empty"
    seen = set()
    for item in items:
        if not isinstance(item, dict):
            return "each item must be an object"
        if "id" not in item or "text" not in item:
            return "each item needs 'id' and 'text'"
        if not isinstance(item["id"], str) or not isinstance(item["text"], str):
            return "'id' and 'text' must be strings"
        if item["id"] in seen:
            return f"duplicate id {item['id']!r}"
        seen.add(item["id"])
    return items


def make_server(bundle, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    """Build (without starting) a threading HTTP server around *bundle*."""
    lock = threading.Lock()

    class Handler(BaseHTTPRequestHandler):
        def _send(self, code: int, body: dict) -> None:
            data = json.dumps(body).encode("utf-8")
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def do_POST(self):
            if self.path != "/score":
                self._send(404, {"error": f"unknown path {self.path}"})
                return
            try:
                length = int(self.headers.get("Content-Length", 0))
                payload = json.loads(self.rfile.read(length))
            except (ValueError, json.JSONDecodeError) as exc:
                self._send(400, {"error": f"invalid JSON body: {exc}"})
                return
            items = validate_request(payload)
            if isinstance(items, str):
                self._send(400, {"error": items})
                return
            try:
                with lock:
                    scores = bundle.score_texts([i["text"] for i in items])
            except Exception as exc:
                self._send(500, {"error": f"scoring failed: {exc}"})
                return
            self._send(200, {"items": [
                {"id": item["id"], "p_vulnerable": score}
                for item, score in zip(items, scores)
            ]})

        def do_GET(self):
            self._send(404, {"error": "POST /score is the only endpoint"})

        def log_message(self, *args):
            pass

    return ThreadingHTTPServer((host, port), Handler)


def serve(bundle, host: str = "127.0.0.1", port: int = 8900) -> None:
    """Serve forever (CLI entry)."""
    server = make_server(bundle, host, port)
    print(f"scoring service listening on http://{host}:{server.server_address[1]}/score")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
