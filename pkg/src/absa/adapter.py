"""Line-delimited JSON protocol for out-of-process scorers.

The adapter is either a child process (requests on stdin, responses on
stdout) or a TCP server. Both sides first exchange ``{"proto": 1}``;
after that each request ``{"id", "text"}`` gets exactly one response
``{"id", "probs": [p_neg, p_neu, p_pos]}``.
"""

from __future__ import annotations

import json
import math
import queue
import shlex
import socket
import subprocess
import threading
from dataclasses import dataclass, field
from typing import Optional

from absa.classify import BackendError, SentimentScores

PROTO_VERSION = 1
RESPONSE_TOL = 1e-6


class AdapterError(BackendError):
    pass


class AdapterTimeoutError(AdapterError):
    pass


class MalformedResponseError(AdapterError):
    pass


class NonSimplexError(AdapterError):
    pass


@dataclass(frozen=True)
class AdapterConfig:
    command: tuple[str, ...] = ()
    host: Optional[str] = None
    port: Optional[int] = None
    timeout: float = 10.0
    concurrent: bool = False
    name: str = "external"

    @property
    def endpoint(self) -> str:
        if self.command:
            return "cmd:" + shlex.join(self.command)
        return f"tcp://{self.host}:{self.port}"

    @classmethod
    def parse(cls, endpoint: str, **kw) -> "AdapterConfig":
        """``tcp://host:port`` or a shell-style command line."""
        if endpoint.startswith("tcp://"):
            host, _, port = endpoint[len("tcp://"):].rpartition(":")
            return cls(host=host, port=int(port), **kw)
        return cls(command=tuple(shlex.split(endpoint)), **kw)


def validate_probs(probs, endpoint: str = "") -> SentimentScores:
    """Accept a response triple if it is a simplex within ``RESPONSE_TOL``."""
    if not isinstance(probs, list) or len(probs) != 3:
        raise MalformedResponseError(f"{endpoint}: probs must be a list of 3 numbers, got {probs!r}")
    try:
        vals = [float(p) for p in probs]
    except (TypeError, ValueError):
        raise MalformedResponseError(f"{endpoint}: non-numeric probs {probs!r}") from None
    if any(isinstance(p, bool) for p in probs) or not all(math.isfinite(v) for v in vals):
        raise MalformedResponseError(f"{endpoint}: non-numeric probs {probs!r}")
    if any(v < -RESPONSE_TOL or v > 1 + RESPONSE_TOL for v in vals) or abs(
        math.fsum(vals) - 1.0
    ) > RESPONSE_TOL:
        raise NonSimplexError(f"{endpoint}: response {vals} is not a probability simplex")
    vals = [min(max(v, 0.0), 1.0) for v in vals]
    return SentimentScores.from_array(vals)


@dataclass(eq=False)
class ExternalScorer:
    """Blocking client for one adapter; calls are serialized unless the
    config declares the adapter concurrency-safe."""

    config: AdapterConfig
    _proc: Optional[subprocess.Popen] = field(default=None, repr=False)
    _sock: Optional[socket.socket] = field(default=None, repr=False)
    _lines: "queue.Queue[Optional[bytes]]" = field(default_factory=queue.Queue, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _next_id: int = 0

    @property
    def name(self) -> str:
        return self.config.name

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, *exc):
        self.close()

    # -- transport -----------------------------------------------------------

    def start(self) -> None:
        if self._proc is not None or self._sock is not None:
            return
        cfg = self.config
        if cfg.command:
            try:
                self._proc = subprocess.Popen(
                    list(cfg.command),
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    stderr=subprocess.DEVNULL,
                )
            except OSError as exc:
                raise AdapterTimeoutError(f"adapter {cfg.endpoint} unreachable: {exc}") from exc
            threading.Thread(target=self._pump, args=(self._proc.stdout,), daemon=True).start()
        elif cfg.host is not None and cfg.port is not None:
            try:
                self._sock = socket.create_connection((cfg.host, cfg.port), timeout=cfg.timeout)
            except OSError as exc:
                raise AdapterTimeoutError(f"adapter {cfg.endpoint} unreachable: {exc}") from exc
            threading.Thread(
                target=self._pump, args=(self._sock.makefile("rb"),), daemon=True
            ).start()
        else:
            raise AdapterError("adapter config needs a command or host/port")
        self._send({"proto": PROTO_VERSION})
        hello = self._recv()
        if hello.get("proto") != PROTO_VERSION:
            self.close()
            raise MalformedResponseError(
                f"{cfg.endpoint}: protocol handshake failed, got {hello!r}"
            )

    def _pump(self, stream) -> None:
        try:
            for line in stream:
                self._lines.put(line)
        except (OSError, ValueError):
            pass
        self._lines.put(None)

    def _send(self, obj) -> None:
        data = (json.dumps(obj, ensure_ascii=False) + "\n").encode("utf-8")
        try:
            if self._proc is not None:
                self._proc.stdin.write(data)
                self._proc.stdin.flush()
            else:
                self._sock.sendall(data)
        except OSError as exc:
            raise AdapterError(f"{self.config.endpoint}: send failed: {exc}") from exc

    def _recv(self) -> dict:
        try:
            line = self._lines.get(timeout=self.config.timeout)
        except queue.Empty:
            raise AdapterTimeoutError(
                f"adapter {self.config.endpoint} timed out after {self.config.timeout}s"
            ) from None
        if line is None:
            raise AdapterError(f"adapter {self.config.endpoint} closed the connection")
        try:
            obj = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise MalformedResponseError(
                f"{self.config.endpoint}: malformed response {line[:80]!r}"
            ) from None
        if not isinstance(obj, dict):
            raise MalformedResponseError(f"{self.config.endpoint}: malformed response {obj!r}")
        return obj

    def close(self) -> None:
        if self._proc is not None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=1)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
            self._proc = None
        if self._sock is not None:
            self._sock.close()
            self._sock = None

    # -- scoring -------------------------------------------------------------

    def _call(self, text: str) -> SentimentScores:
        self.start()
        self._next_id += 1
        rid = str(self._next_id)
        self._send({"id": rid, "text": text})
        resp = self._recv()
        if resp.get("id") != rid:
            raise MalformedResponseError(
                f"{self.config.endpoint}: response id {resp.get('id')!r} != request id {rid!r}"
            )
        return validate_probs(resp.get("probs"), self.config.endpoint)

    def score(self, text: str) -> SentimentScores:
        # the pipe is a single ordered stream; concurrent-safe adapters
        # still share it, so only the request/response pair is locked
        with self._lock:
            return self._call(text)
