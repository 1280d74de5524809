"""Classical comparison schemes: the three-server construction and MatDot."""

import pytest

from ftp_sdmm.errors import BadVariantParams, NotDivisible, TooFewPoints
from ftp_sdmm.baseline import make_traditional, matdot_run, trad_run
from ftp_sdmm.fields import make_base_field
from ftp_sdmm.matrices import mat_mul, random_mat


def test_traditional_matches_oracle(f11):
    scheme = make_traditional(f11)
    for seed in range(10):
        A = random_mat(2, 3, f11, seed=seed)
        B = random_mat(3, 2, f11, seed=seed + 50)
        product, report = trad_run(scheme, A, B, seed=seed)
        assert product.eq(mat_mul(A, B))
        assert report.upload_symbols == 3 * (2 * 3 + 3 * 2)
        assert report.download_symbols == 3 * 2 * 2
        assert report.output_symbols == 4


def test_traditional_rejects_other_params(f11):
    with pytest.raises(BadVariantParams):
        make_traditional(f11, L=2, T=1)
    with pytest.raises(TooFewPoints):
        make_traditional(make_base_field(3, 1))  # only 2 nonzero scalars


@pytest.mark.parametrize("L,T", [(1, 1), (2, 1), (2, 2), (3, 1)])
def test_matdot_matches_oracle(L, T):
    f = make_base_field(13, 1)
    A = random_mat(2, 6, f, seed=7)
    B = random_mat(6, 2, f, seed=8)
    product, report = matdot_run(L, T, A, B, f, seed=3)
    assert product.eq(mat_mul(A, B))
    n_servers = 2 * L + 2 * T - 1
    assert report.upload_symbols == n_servers * (2 * 6 + 6 * 2) // L
    assert report.download_symbols == n_servers * 2 * 2


def test_matdot_divisibility(f11):
    A = random_mat(2, 3, f11, seed=0)
    B = random_mat(3, 2, f11, seed=1)
    with pytest.raises(NotDivisible):
        matdot_run(2, 1, A, B, f11)


def test_matdot_cross_terms_cancel():
    """With L=2, T=1 the product polynomial has degree 4; its x^1 coefficient
    must be exactly A_1B_1 + A_2B_2 independent of the random masks, so two
    runs with different seeds decode the same product."""
    f = make_base_field(13, 1)
    A = random_mat(1, 4, f, seed=21)
    B = random_mat(4, 1, f, seed=22)
    p1, _ = matdot_run(2, 1, A, B, f, seed=0)
    p2, _ = matdot_run(2, 1, A, B, f, seed=999)
    assert p1.eq(p2)
    assert p1.eq(mat_mul(A, B))
