"""The pinned small-field showcase and its published constants."""

import time
from fractions import Fraction

from ftp_sdmm.demo import (
    DEMO_MODULUS,
    EVAL_EXPONENTS,
    SERVER_TRACE_EXPONENTS,
    alpha_pow,
    demo_field,
    demo_points,
    run_demo,
    trace_to_f4,
)
from ftp_sdmm.poly import dual_weights


def test_pinned_constants():
    assert DEMO_MODULUS == (1, 1, 0, 0, 1)  # x^4 + x + 1, low-degree first
    assert SERVER_TRACE_EXPONENTS == (1, 2, 8, 4)
    assert EVAL_EXPONENTS == (None, 5, 10, 15)
    F = demo_field()
    assert F.order == 16
    g = alpha_pow(F, 1)
    # alpha^4 = alpha + 1 under the pinned modulus
    assert F.eq(F.pow(g, 4), F.add(g, F.one()))


def test_identity_100_seeds_under_1s():
    start = time.perf_counter()
    for seed in range(100):
        assert run_demo(a=2, b=2, c=2, seed=seed).verified
    assert time.perf_counter() - start < 1.0


def test_rates():
    res = run_demo(a=2, b=2, c=2, seed=0)
    assert res.ftp_rate == Fraction(1, 10)
    assert res.traditional_rate == Fraction(1, 9)
    assert res.upload_symbols == 64
    assert res.download_symbols == 16


def test_nonsquare_shapes():
    for a, b, c in [(1, 3, 2), (3, 1, 1), (2, 4, 3)]:
        assert run_demo(a=a, b=b, c=c, seed=5).verified


def test_server_weights_match_general_dual_weights():
    """The published per-server multipliers alpha^{-e_j} coincide exactly with
    the generic GRS dual weights of the domain (alpha, 0, a^5, a^10, a^15)."""
    F = demo_field()
    g = alpha_pow(F, 1)
    domain_pts = [g] + demo_points(F)
    w = dual_weights(F, domain_pts)
    # weight at the reconstruction point alpha is 1
    assert F.eq(w[0], F.one())
    for j, e in enumerate(SERVER_TRACE_EXPONENTS):
        assert F.eq(w[1 + j], F.inv(alpha_pow(F, e)))


def test_trace_lands_in_f4():
    """x + x^4 maps into the fixed field of x -> x^4, i.e. F_4."""
    F = demo_field()
    for k in range(16):
        x = F.from_int(k)
        tr = trace_to_f4(F, x)
        # the trace of F_16 over F_4 is Frobenius-stable
        assert F.eq(F.pow(tr, 4), tr)
