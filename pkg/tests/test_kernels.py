"""Both convolution backends must agree exactly; the env flag selects them."""

import numpy as np
import pytest

from ftp_sdmm import kernels
from ftp_sdmm.fields import make_base_field, make_tower
from ftp_sdmm.matrices import SplitMix64


@pytest.mark.parametrize("primes,p,d", [((2, 3), 7, 1), ((5,), 2, 3)])
def test_backends_agree(primes, p, d):
    tower = make_tower(make_base_field(p, d), primes)
    rng = SplitMix64(13)
    for _ in range(5):
        x = tower.random(rng).reshape(tower.flat_size, tower.base.d)
        y = tower.random(rng).reshape(tower.flat_size, tower.base.d)
        out_np = kernels.convolve(x, y, tower._addtable, tower._ext_flat,
                                  backend="numpy")
        out_nb = kernels.convolve(x, y, tower._addtable, tower._ext_flat,
                                  backend="numba")
        assert np.array_equal(out_np, out_nb)


def test_env_flag_selects_backend(monkeypatch):
    monkeypatch.setenv("FTP_SDMM_BACKEND", "numpy")
    assert kernels.active_backend() == "numpy"
    monkeypatch.setenv("FTP_SDMM_BACKEND", "numba")
    assert kernels.active_backend() == "numba"
    monkeypatch.delenv("FTP_SDMM_BACKEND")
    assert kernels.active_backend() in ("numba", "numpy")


def test_numpy_backend_full_roundtrip(monkeypatch):
    """A complete multiply under the fallback backend matches the default."""
    monkeypatch.setenv("FTP_SDMM_BACKEND", "numpy")
    tower = make_tower(make_base_field(11, 1), (2, 3))
    rng = SplitMix64(3)
    x, y = tower.random(rng), tower.random(rng)
    slow = tower.mul(x, y)
    monkeypatch.setenv("FTP_SDMM_BACKEND", "numba")
    fast = tower.mul(x, y)
    assert np.array_equal(slow, fast)
