"""Dense GF(2^s) linear algebra."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dagsattack.errors import RankDeficient, ShapeMismatch
from dagsattack.galois import field, tower
from dagsattack.matrix import Mat, star_row

F = field(4)


def rand_mat(rng, rows, cols, fld=F):
    return Mat(fld, np.array([[rng.randrange(fld.q) for _ in range(cols)] for _ in range(rows)]))


mats = st.integers(min_value=0, max_value=2**32 - 1)


def _mk(seed, rows, cols, fld=F):
    import random

    return rand_mat(random.Random(seed), rows, cols, fld)


@given(seed=mats)
def test_rref_is_idempotent_and_canonical(seed):
    M = _mk(seed, 5, 7)
    R, piv = M.rref()
    R2, piv2 = R.rref()
    assert R == R2 and piv == piv2
    # pivot columns are unit vectors
    for r, c in enumerate(piv):
        col = R.data[:, c]
        assert col[r] == 1 and np.count_nonzero(col) == 1


@given(seed=mats)
def test_rref_preserves_row_space(seed):
    M = _mk(seed, 4, 6)
    R, _ = M.rref()
    assert M.row_space() == R.row_space()


@given(seed=mats)
def test_echelon_same_pivots_as_rref(seed):
    M = _mk(seed, 5, 5)
    assert M.echelon()[1] == M.rref()[1]


@given(seed=mats)
def test_kernel_is_annihilated(seed):
    M = _mk(seed, 4, 7)
    K = M.kernel_basis()
    assert K.rows == 7 - M.rank()
    prod = M @ K.transpose()
    assert not prod.data.any()
    assert K.rank() == K.rows


@given(seed=mats)
def test_matmul_associative(seed):
    import random

    rng = random.Random(seed)
    A, B, C = rand_mat(rng, 3, 4), rand_mat(rng, 4, 2), rand_mat(rng, 2, 5)
    assert (A @ B) @ C == A @ (B @ C)


@given(seed=mats)
def test_solve_right_solves(seed):
    import random

    rng = random.Random(seed)
    A = rand_mat(rng, 5, 4)
    X = rand_mat(rng, 4, 2)
    B = A @ X
    Y = A.solve_right(B)
    assert Y is not None
    assert A @ Y == B


def test_solve_right_infeasible():
    A = Mat.from_rows(F, [[1, 0], [0, 0]])
    B = Mat.from_rows(F, [[0], [1]])
    assert A.solve_right(B) is None


def test_systematic_form():
    A = Mat.from_rows(F, [[1, 2, 3], [0, 1, 7]])
    R, ok = A.systematic_form()
    assert ok
    assert np.array_equal(R.data[:, :2], np.eye(2, dtype=np.uint16))
    # leading minor singular but full rank: flag False
    B = Mat.from_rows(F, [[0, 1, 0], [0, 0, 1]])
    R, ok = B.systematic_form()
    assert not ok
    with pytest.raises(RankDeficient):
        Mat.from_rows(F, [[1, 1, 0], [1, 1, 0]]).systematic_form()


def test_shape_and_field_errors():
    A = Mat.from_rows(F, [[1, 2], [3, 4]])
    B = Mat.from_rows(F, [[1, 2, 3]])
    with pytest.raises(ShapeMismatch):
        A @ B @ B
    with pytest.raises(ShapeMismatch):
        A + B
    C = Mat.from_rows(field(5), [[1, 2], [3, 4]])
    with pytest.raises(ShapeMismatch):
        A + C


def test_identity_and_scale():
    I = Mat.identity(F, 3)
    A = _mk(0, 3, 3)
    assert I @ A == A and A @ I == A
    assert A.scale(1) == A
    assert not A.scale(0).data.any()
    assert A.scale(5).scale(F.inv(5)) == A


@given(seed=mats)
def test_serialization_roundtrip(seed):
    M = _mk(seed, 3, 9)
    assert Mat.from_text(F, M.to_text()) == M


def test_serialization_format():
    M = Mat.from_rows(F, [[0, 10, 15]])
    assert M.to_text() == "MAT 1 3\n0 a f\n"


def test_star_row_matches_field_mul():
    import random

    rng = random.Random(7)
    a = np.array([rng.randrange(16) for _ in range(20)], dtype=np.uint16)
    b = np.array([rng.randrange(16) for _ in range(20)], dtype=np.uint16)
    out = star_row(F, a, b)
    assert [int(v) for v in out] == [F.mul(int(x), int(y)) for x, y in zip(a, b)]


def test_tower_matrices_work():
    tw = tower(4)
    A = _mk(3, 4, 4, tw)
    K = A.kernel_basis()
    assert (A @ K.transpose()).data.any() == False  # noqa: E712
