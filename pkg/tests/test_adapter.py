import json
import subprocess
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from absa.adapter import (
    AdapterConfig,
    AdapterError,
    AdapterTimeoutError,
    ExternalScorer,
    MalformedResponseError,
    NonSimplexError,
    validate_probs,
)
from absa.classify import external_score

STUB = (sys.executable, "-m", "absa.stub_adapter")


def stub(*args, timeout=5.0):
    return AdapterConfig(command=STUB + args, timeout=timeout)


class TestValidate:
    def test_accepts_within_tolerance(self):
        s = validate_probs([0.2, 0.3, 0.5 + 5e-7])
        assert abs(sum(s.as_tuple()) - 1) < 1e-12

    @pytest.mark.parametrize("probs", [[0.5, 0.6, 0.2], [-0.1, 0.6, 0.5], [1.2, -0.1, -0.1]])
    def test_non_simplex(self, probs):
        with pytest.raises(NonSimplexError):
            validate_probs(probs, "ep")

    @pytest.mark.parametrize("probs", [None, [0.5, 0.5], "abc", [0.2, "x", 0.8], [True, False, False],
                                       [float("nan"), 0.5, 0.5]])
    def test_malformed(self, probs):
        with pytest.raises(MalformedResponseError):
            validate_probs(probs, "ep")


class TestParse:
    def test_tcp(self):
        c = AdapterConfig.parse("tcp://127.0.0.1:9000", timeout=2)
        assert (c.host, c.port, c.timeout) == ("127.0.0.1", 9000, 2)

    def test_command(self):
        c = AdapterConfig.parse("python3 -m absa.stub_adapter --probs '0.1,0.1,0.8'")
        assert c.command[-1] == "0.1,0.1,0.8"
        assert c.endpoint.startswith("cmd:")


class TestPipeAdapter:
    def test_fixed_probs(self):
        s = external_score(stub(), "anything at all")
        np.testing.assert_allclose(s.as_tuple(), (0.2, 0.3, 0.5))

    def test_echo_non_simplex_rejected(self):
        with ExternalScorer(stub()) as sc:
            with pytest.raises(NonSimplexError):
                sc.score(json.dumps([0.5, 0.6, 0.2]))
            # the connection stays usable after a rejected response
            assert sc.score("ok").p_pos == 0.5

    def test_many_calls_in_order(self):
        with ExternalScorer(stub()) as sc:
            for i in range(20):
                p = [0.1, 0.1, 0.8] if i % 2 else [0.6, 0.2, 0.2]
                np.testing.assert_allclose(sc.score(json.dumps(p)).as_tuple(), p)

    def test_threads_serialized(self):
        with ExternalScorer(stub()) as sc:
            reqs = [[0.1 * (i % 5), 0.5 - 0.1 * (i % 5), 0.5] for i in range(40)]
            with ThreadPoolExecutor(8) as pool:
                out = list(pool.map(lambda p: sc.score(json.dumps(p)).as_tuple(), reqs))
        np.testing.assert_allclose(out, reqs, atol=1e-12)

    def test_timeout(self):
        t0 = time.monotonic()
        with pytest.raises(AdapterTimeoutError, match="timed out"):
            with ExternalScorer(stub("--delay", "5", timeout=0.5)) as sc:
                sc.score("slow please")
        assert time.monotonic() - t0 < 4

    def test_unreachable_command_names_endpoint(self):
        cfg = AdapterConfig(command=("/nonexistent/scorer-binary",), timeout=1)
        with pytest.raises(AdapterError, match="nonexistent/scorer-binary"):
            external_score(cfg, "x")

    def test_process_exits(self):
        cfg = AdapterConfig(command=(sys.executable, "-c", "pass"), timeout=2)
        with pytest.raises(AdapterError, match="closed"):
            external_score(cfg, "x")

    def test_bad_handshake(self):
        code = "import sys; sys.stdin.readline(); print('not json', flush=True)"
        cfg = AdapterConfig(command=(sys.executable, "-c", code), timeout=2)
        with pytest.raises(MalformedResponseError):
            external_score(cfg, "x")

    def test_empty_config(self):
        with pytest.raises(AdapterError):
            ExternalScorer(AdapterConfig()).start()


class TestTcpAdapter:
    @pytest.fixture
    def server(self):
        proc = subprocess.Popen(list(STUB) + ["--tcp", "0", "--probs", "0.7,0.2,0.1"],
                                stdout=subprocess.PIPE, text=True)
        port = int(proc.stdout.readline())
        yield port
        proc.terminate()
        proc.wait()

    def test_round_trip(self, server):
        s = external_score(f"tcp://127.0.0.1:{server}", "x")
        np.testing.assert_allclose(s.as_tuple(), (0.7, 0.2, 0.1))

    def test_unreachable_names_endpoint(self):
        import socket

        with socket.socket() as s:
            s.bind(("127.0.0.1", 0))
            port = s.getsockname()[1]
        with pytest.raises(AdapterError, match=f"127.0.0.1:{port}"):
            external_score(AdapterConfig(host="127.0.0.1", port=port, timeout=1), "x")
