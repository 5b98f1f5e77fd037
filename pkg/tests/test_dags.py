"""Parameter sets, key generation, and key file handling."""

import numpy as np
import pytest

from dagsattack import codes
from dagsattack.dags import (
    KeyPair,
    ParamSet,
    key_equivalent,
    keygen,
    load_key,
    preset,
    preset_names,
    save_key,
)
from dagsattack.errors import UnknownPreset
from dagsattack.matrix import Mat

# published parameter rows: name -> (q, n, k, dyadic order, c)
PUBLISHED = {
    "DAGS-1": (32, 832, 416, 16, 4),
    "DAGS-3": (64, 1216, 512, 32, 4),
    "DAGS-5": (64, 2112, 704, 64, 2),
    "DAGS-1.1": (64, 832, 416, 16, 8),
    "DAGS-3.1": (256, 1216, 512, 32, 16),
    "DAGS-5.1": (256, 1600, 896, 32, 16),
}


def test_published_parameter_rows():
    for name, (q, n, k, order, c) in PUBLISHED.items():
        p = preset(name)
        assert p.q == q and p.n == n and p.k == k
        assert (1 << p.gamma) == order
        assert p.c == c
        assert p.r == (n - k) // 2


def test_dim_d_values():
    # the direct attack needs dim D = k0 - c >= 1; DAGS-3.1 degenerates
    assert preset("DAGS-1").dim_d == 22
    assert preset("DAGS-3.1").dim_d == 0
    assert preset("DESK-A").dim_d == 6


def test_preset_lookup():
    assert set(PUBLISHED) <= set(preset_names())
    assert {"DESK-A", "DESK-B", "DESK-C"} <= set(preset_names())
    with pytest.raises(UnknownPreset):
        preset("DAGS-9")


def test_paramset_validation():
    with pytest.raises(ValueError):
        ParamSet("bad", 4, 3, 30, 11, 10)  # k0 != n0 - 2 r0
    with pytest.raises(ValueError):
        ParamSet("bad", 3, 3, 70, 50, 10)  # support exceeds GF(q^2)


def test_keygen_deterministic_and_structured():
    p = preset("DESK-A")
    k1 = keygen(p, seed=42)
    k2 = keygen(p, seed=42)
    assert save_key(k1) == save_key(k2)
    assert keygen(p, seed=43).h_pub != k1.h_pub

    blk = 1 << p.gamma
    H = k1.h_pub
    assert (H.rows, H.cols) == (p.n - p.k, p.n)
    # systematic
    assert np.array_equal(H.data[:, : p.n - p.k], np.eye(p.n - p.k, dtype=np.uint16))
    # public code dimension
    pub = k1.public_code()
    assert pub.k == p.k == (p.k0 << p.gamma)
    # quasi-dyadic: closed under the permutation induced by each group generator
    for l in range(p.gamma):
        swap = np.arange(p.n).reshape(-1, blk)
        swap = (swap ^ (1 << l)).reshape(-1)
        permuted = Mat(pub.field, pub.gen.data[:, swap].copy())
        assert permuted.row_space() == pub.gen.row_space()


def test_public_code_is_alternant_of_secret():
    p = preset("DESK-C")
    kp = keygen(p, seed=7)
    s = kp.secret
    A = codes.alternant_code(p.tower(), list(s.x), list(s.z), p.r)
    assert A == kp.public_code()
    assert key_equivalent((list(s.x), list(s.z)), kp)


def test_key_equivalent_rejects_wrong_triples():
    p = preset("DESK-C")
    kp = keygen(p, seed=9)
    x = [int(v) for v in kp.secret.x]
    z = [int(v) for v in kp.secret.z]
    bad_x = list(x)
    bad_x[0] = bad_x[1]  # repeated support entry
    assert not key_equivalent((bad_x, z), kp)
    assert not key_equivalent((x, [0] + z[1:]), kp)


def test_key_equivalent_accepts_affine_image():
    # x -> a*x + b with z scaled accordingly yields the same code
    p = preset("DESK-C")
    kp = keygen(p, seed=11)
    tw = p.tower()
    a, b = 0x17, 0x2B
    x2 = [tw.mul(a, int(v)) ^ b for v in kp.secret.x]
    assert key_equivalent((x2, [int(v) for v in kp.secret.z]), kp)


def test_key_file_roundtrip():
    p = preset("DESK-A")
    kp = keygen(p, seed=5)
    kp2 = load_key(save_key(kp))
    assert kp2.params == kp.params
    assert kp2.h_pub == kp.h_pub
    assert list(kp2.secret.x) == list(kp.secret.x)
    assert list(kp2.secret.z) == list(kp.secret.z)
    assert save_key(kp2) == save_key(kp)
