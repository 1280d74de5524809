"""Polynomials, Lagrange machinery, annihilators, dual weights."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftp_sdmm.errors import DuplicatePoint, FieldMismatch, IndexOutOfRange
from ftp_sdmm.fields import make_base_field
from ftp_sdmm.matrices import SplitMix64
from ftp_sdmm.poly import (
    EvalDomain,
    Poly,
    annihilator,
    dual_orthogonality_check,
    dual_weights,
    eval_poly,
    lagrange_basis,
    lagrange_interpolate,
)


def test_eval_poly_example(tower16):
    t = tower16
    g = t.gen(1)
    # (x^2 + x) at alpha equals alpha^2 + alpha
    p = Poly(t, [t.zero(), t.one(), t.one()])
    got = eval_poly(p, g)
    want = t.add(t.mul(g, g), g)
    assert t.is_zero(t.sub(got, want))


def test_eval_poly_field_mismatch(tower16, f5):
    p = Poly(tower16, [tower16.one()])
    with pytest.raises(FieldMismatch):
        eval_poly(p, f5.from_int(1), field=f5)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 5))
def test_interpolation_roundtrip(seed, npts):
    f = make_base_field(11, 1)
    rng = SplitMix64(seed)
    points = [f.from_int(k) for k in range(npts)]
    values = [f.random(rng) for _ in range(npts)]
    p = lagrange_interpolate(f, points, values)
    assert len(p.coeffs) <= npts
    for pt, v in zip(points, values):
        assert f.is_zero(f.sub(eval_poly(p, pt), v))


def test_lagrange_basis_partition_of_unity(f5):
    points = [f5.from_int(k) for k in range(4)]
    acc = Poly.zero(f5)
    for i in range(4):
        acc = acc.add(lagrange_basis(f5, i, points))
    assert acc.eq(Poly.one(f5))
    with pytest.raises(IndexOutOfRange):
        lagrange_basis(f5, 4, points)
    with pytest.raises(DuplicatePoint):
        lagrange_basis(f5, 0, points + [points[0]])


def test_annihilator_vanishes(tower11_6):
    t = tower11_6
    pts = [t.embed_scalar_int(k) for k in range(4)] + [t.gen(1)]
    k = annihilator(t, pts)
    assert len(k.coeffs) == 6  # monic of degree = number of points
    assert t.is_zero(t.sub(k.coeffs[-1], t.one()))
    for pt in pts:
        assert t.is_zero(eval_poly(k, pt))
    off = t.gen(2)
    assert not t.is_zero(eval_poly(k, off))


def test_dual_weights_known_example(f5):
    # points {0,1,2} over F_5: v_j = prod_{i != j is}(a_j - a_i)^(-1) = (3,4,3)
    points = [f5.from_int(k) for k in (0, 1, 2)]
    w = dual_weights(f5, points)
    assert [f5.to_int(v) for v in w] == [3, 4, 3]


def test_dual_orthogonality_and_corruption(tower16):
    t = tower16
    # domain: both generators' span won't fit here, use 5 scalar points + gen
    points = [t.gen(1)] + [t.embed_scalar_int(k) for k in range(3)]
    domain = EvalDomain(t, points)
    # h of degree <= n - 2 = 2, k = 1: sum_j v_j h(a_j) a_j^s = 0 for s == 0
    rng = SplitMix64(3)
    h = Poly(t, [t.random(rng) for _ in range(3)])
    h_values = [eval_poly(h, a) for a in points]
    k_one = Poly.one(t)
    assert dual_orthogonality_check(domain, k_one, h_values, 1)
    corrupted = list(h_values)
    corrupted[0] = t.add(corrupted[0], t.one())
    assert not dual_orthogonality_check(domain, k_one, corrupted, 1)


def test_poly_algebra(f5):
    x = Poly(f5, [f5.from_int(0), f5.from_int(1)])
    one = Poly.one(f5)
    p = x.mul(x).add(x)          # x^2 + x
    q = p.sub(x)                 # x^2
    assert q.eq(x.mul(x))
    assert p.mul(one).eq(p)
    assert len(Poly.zero(f5).coeffs) == 0
