"""Scripted in-process HTTP collector for sink tests."""

import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class Collector:
    """Answers POSTs with scripted status codes, then with ``default``.

    ``accepted`` holds the bodies of 2xx requests in arrival order;
    ``attempts`` holds (status, content type, body) for every request.
    """

    def __init__(self, script=(), default=200):
        self.script = list(script)
        self.default = default
        self.accepted: list[bytes] = []
        self.attempts: list[tuple[int, str, bytes]] = []
        collector = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                body = self.rfile.read(int(self.headers.get("Content-Length", 0)))
                status = collector.script.pop(0) if collector.script else collector.default
                collector.attempts.append((status, self.headers.get("Content-Type"), body))
                if 200 <= status < 300:
                    collector.accepted.append(body)
                self.send_response(status)
                self.send_header("Content-Length", "0")
                self.end_headers()

            def log_message(self, *args):
                pass

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self.server.server_address
        return f"http://{host}:{port}/ingest"

    def lines(self) -> list[str]:
        return [line for body in self.accepted for line in body.decode().splitlines()]

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()
