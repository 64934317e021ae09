"""Minimal external scorer speaking the adapter protocol.

Used for testing and as a template for wrapping a real model::

    python -m absa.stub_adapter --probs 0.2,0.3,0.5
    python -m absa.stub_adapter --tcp 9000

If a request text is itself a JSON list it is echoed back as the
probabilities, otherwise ``--probs`` is returned.
"""

import argparse
import json
import socketserver
import sys
import time


def _respond(line: bytes, probs, delay: float) -> bytes:
    req = json.loads(line.decode("utf-8"))
    if "proto" in req:
        return b'{"proto": 1}\n'
    out = probs
    try:
        echoed = json.loads(req["text"])
        if isinstance(echoed, list):
            out = echoed
    except (ValueError, TypeError):
        pass
    if delay:
        time.sleep(delay)
    return (json.dumps({"id": req["id"], "probs": out}) + "\n").encode("utf-8")


def serve_pipe(probs, delay):
    for line in sys.stdin.buffer:
        sys.stdout.buffer.write(_respond(line, probs, delay))
        sys.stdout.buffer.flush()


def serve_tcp(port, probs, delay):
    class Handler(socketserver.StreamRequestHandler):
        def handle(self):
            for line in self.rfile:
                self.wfile.write(_respond(line, probs, delay))
                self.wfile.flush()

    with socketserver.ThreadingTCPServer(("127.0.0.1", port), Handler) as srv:
        print(srv.server_address[1], flush=True)
        srv.serve_forever()


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--probs", default="0.2,0.3,0.5")
    ap.add_argument("--delay", type=float, default=0.0, help="seconds to wait before each reply")
    ap.add_argument("--tcp", type=int, default=None, help="listen on this port (0 = any)")
    args = ap.parse_args(argv)
    probs = [float(p) for p in args.probs.split(",")]
    if args.tcp is None:
        serve_pipe(probs, args.delay)
    else:
        serve_tcp(args.tcp, probs, args.delay)


if __name__ == "__main__":
    main()
