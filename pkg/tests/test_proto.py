"""Wire format, framing, traffic ledger, in-process and TCP runners."""

import threading

import numpy as np
import pytest

from ftp_sdmm import proto
from ftp_sdmm.errors import (
    ConnectionFailed,
    DigitOverflow,
    MalformedFrame,
    VersionMismatch,
)
from ftp_sdmm.fields import make_base_field
from ftp_sdmm.ftp import build_scheme, cost_report
from ftp_sdmm.matrices import SplitMix64, mat_mul, random_mat


@pytest.fixture(scope="module")
def scheme():
    return build_scheme(L=2, T=1, primes=(2, 3), base=make_base_field(11, 1),
                        a=2, b=2, c=2)


@pytest.fixture(scope="module")
def scheme_ext():
    """Extension base field, so byte counts and symbol counts differ (d=3)."""
    return build_scheme(L=1, T=1, primes=(5,), base=make_base_field(2, 3),
                        a=1, b=2, c=1)


def test_elem_roundtrip_full(scheme_ext):
    t = scheme_ext.tower
    rng = SplitMix64(1)
    for _ in range(10):
        x = t.random(rng)
        raw = proto.elem_to_bytes(t, x)
        assert len(raw) == t.flat_size * t.base.d
        assert np.array_equal(proto.elem_from_bytes(t, raw), x)


def test_elem_roundtrip_subfield(scheme):
    t = scheme.tower
    rng = SplitMix64(2)
    for i in (1, 2):
        x = t.trace_to_subfield(t.random(rng), i)
        raw = proto.elem_to_bytes(t, x, group=i)
        assert len(raw) == t.flat_size // t.primes[i - 1] * t.base.d
        assert np.array_equal(proto.elem_from_bytes(t, raw, group=i), x)


def test_digit_overflow():
    big = build_scheme(L=1, T=1, primes=(2,), base=make_base_field(257, 1),
                       a=1, b=1, c=1)
    with pytest.raises(DigitOverflow):
        proto.elem_to_bytes(big.tower, big.tower.one())


def test_framing_roundtrip():
    frame = proto.pack_message(proto.MSG_HELLO, b"payload")
    mtype, body, rest = proto.unpack_message(frame + b"extra")
    assert (mtype, body, rest) == (proto.MSG_HELLO, b"payload", b"extra")


def test_framing_errors():
    good = proto.pack_message(proto.MSG_HELLO, b"abc")
    with pytest.raises(MalformedFrame):
        proto.unpack_message(good[:5])            # shorter than header
    with pytest.raises(MalformedFrame):
        proto.unpack_message(good[:-1])           # truncated body
    with pytest.raises(MalformedFrame):
        proto.unpack_message(b"XXXX" + good[4:])  # bad magic
    bumped = good[:4] + bytes([99]) + good[5:]
    with pytest.raises(VersionMismatch):
        proto.unpack_message(bumped)


def test_params_share_responses_roundtrip(scheme):
    job = b"jobid123"
    body = proto.params_body(job, scheme, 3)
    parsed = proto.parse_params(body)
    assert parsed.job_id == job and parsed.server_index == 3
    assert parsed.tower.primes == scheme.tower.primes
    assert (parsed.a, parsed.b, parsed.c) == (scheme.a, scheme.b, scheme.c)
    for i, w in parsed.scalars.items():
        assert np.array_equal(w, scheme.server_scalars[i - 1][2])


def test_inprocess_matches_oracle_and_formulas(scheme):
    A = random_mat(scheme.a, scheme.b, scheme.tower, seed=6)
    B = random_mat(scheme.b, scheme.c, scheme.tower, seed=7)
    product, ledger = proto.run_inprocess(scheme, A, B, seed=1)
    assert product.eq(mat_mul(A, B))
    report = cost_report(scheme)
    assert ledger.upload_symbols == report.upload_symbols
    assert ledger.download_symbols == report.download_symbols
    d = scheme.base.d
    assert ledger.upload_bytes == d * ledger.upload_symbols
    assert ledger.download_bytes == d * ledger.download_symbols


def test_inprocess_byte_accounting_extension_field(scheme_ext):
    A = random_mat(1, 2, scheme_ext.tower, seed=1)
    B = random_mat(2, 1, scheme_ext.tower, seed=2)
    product, ledger = proto.run_inprocess(scheme_ext, A, B)
    assert product.eq(mat_mul(A, B))
    assert ledger.upload_bytes == 3 * ledger.upload_symbols
    assert ledger.download_bytes == 3 * ledger.download_symbols


@pytest.fixture()
def live_server():
    server = proto.Server()
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server
    server.stop()
    thread.join(timeout=5)


def test_remote_identical_to_inprocess(scheme, live_server):
    A = random_mat(scheme.a, scheme.b, scheme.tower, seed=8)
    B = random_mat(scheme.b, scheme.c, scheme.tower, seed=9)
    local_product, local_ledger = proto.run_inprocess(scheme, A, B, seed=2)
    endpoints = [("127.0.0.1", live_server.port)] * scheme.N[-1]
    remote_product, remote_ledger = proto.run_remote(endpoints, scheme, A, B, seed=2)
    assert remote_product.eq(local_product)
    assert remote_ledger.per_server == local_ledger.per_server


def test_remote_server_down(scheme, monkeypatch):
    monkeypatch.setenv(proto.TIMEOUT_ENV, "400")
    A = random_mat(scheme.a, scheme.b, scheme.tower, seed=8)
    B = random_mat(scheme.b, scheme.c, scheme.tower, seed=9)
    endpoints = [("127.0.0.1", 1)] * scheme.N[-1]
    with pytest.raises(ConnectionFailed) as err:
        proto.run_remote(endpoints, scheme, A, B)
    assert err.value.server_index >= 1


def test_remote_too_few_endpoints(scheme):
    A = random_mat(scheme.a, scheme.b, scheme.tower, seed=8)
    B = random_mat(scheme.b, scheme.c, scheme.tower, seed=9)
    with pytest.raises(ConnectionFailed):
        proto.run_remote([("127.0.0.1", 1)], scheme, A, B)


def test_server_unknown_message_type(live_server):
    import socket

    with socket.create_connection(("127.0.0.1", live_server.port), timeout=5) as sock:
        sock.sendall(proto.pack_message(42, b""))
        mtype, body = proto.read_message(sock)
    assert mtype == proto.MSG_ERROR
    assert b"unknown message type" in body


def test_server_unknown_job(scheme, live_server):
    import socket

    from ftp_sdmm.ftp import encode

    shares = encode(
        scheme,
        random_mat(scheme.a, scheme.b, scheme.tower, seed=1),
        random_mat(scheme.b, scheme.c, scheme.tower, seed=2),
    )
    with socket.create_connection(("127.0.0.1", live_server.port), timeout=5) as sock:
        sock.sendall(proto.pack_message(
            proto.MSG_SHARE, proto.share_body(b"nosuchjb", scheme, shares[0])))
        mtype, body = proto.read_message(sock)
    assert mtype == proto.MSG_ERROR
    assert b"unknown job id" in body
