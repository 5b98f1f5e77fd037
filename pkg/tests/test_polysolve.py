"""Bilinear system construction, counting, and the bounded-degree
Macaulay solver."""

import numpy as np
import pytest

from dagsattack import codes, polysolve
from dagsattack.dags import keygen, preset
from dagsattack.errors import NonexistentD, SolutionSpaceTooLarge
from dagsattack.galois import field
from dagsattack.matrix import Mat, star_row
from dagsattack.polysolve import (
    BilinearSystem,
    SystemShape,
    assemble_u,
    assemble_v,
    build_system,
    count_system,
    extract_solutions,
    macaulay_solve,
    orbit_vector,
    p_add,
    p_deg,
    p_eval,
    p_mul,
    p_substitute,
    specialize,
)

F16 = field(4)


# -- polynomial helpers -------------------------------------------------


def test_poly_arithmetic():
    x0, x1 = {(0,): 1}, {(1,): 1}
    prod = p_mul(p_add(x0, x1), p_add(x0, x1), F16)
    # characteristic 2: (x0 + x1)^2 = x0^2 + x1^2
    assert prod == {(0, 0): 1, (1, 1): 1}
    assert p_deg(prod) == 2
    assert p_eval(prod, {0: 3, 1: 5}, F16) == F16.mul(3 ^ 5, 3 ^ 5)
    sub = p_substitute(prod, 0, {(1,): 1}, F16)  # x0 := x1
    assert sub == {}


def test_orbit_vector_binary_expansion():
    assert orbit_vector(["B1"]) == [(), ("B1",)]
    assert orbit_vector(["B1", "B2", "B3"]) == [
        (),
        ("B1",),
        ("B2",),
        ("B1", "B2"),
        ("B3",),
        ("B1", "B3"),
        ("B2", "B3"),
        ("B1", "B2", "B3"),
    ]
    v = orbit_vector(list("abcd"))
    assert len(v) == 16 and len(set(v)) == 16


# -- closed-form counting ----------------------------------------------


def test_count_system_desk_a():
    cnt = count_system(preset("DESK-A"), 3)
    assert (cnt.n_u, cnt.n_t, cnt.n_b) == (12, 23, 1)
    assert cnt.nvars == 36 and cnt.quadratic == 57
    assert cnt.elimination == 3


def test_count_system_range_and_degenerate():
    p = preset("DESK-A")
    count_system(p, p.k0 - p.c)  # boundary: empty quadratic part allowed
    with pytest.raises(ValueError):
        count_system(p, p.k0 - p.c + 1)
    with pytest.raises(ValueError):
        count_system(p, -1)
    with pytest.raises(NonexistentD):
        count_system(preset("DAGS-3.1"), 0)


def test_shape_agrees_with_counts():
    for name, a0 in [("DESK-A", 3), ("DESK-C", 0), ("DAGS-1", 17)]:
        p = preset(name)
        cnt = count_system(p, a0)
        shape = SystemShape(
            p.n0, p.k0, p.c, p.gamma, a0, ((1, 0), (2, 1)), tuple(range(p.n0))
        )
        assert (shape.n_u, shape.n_t, shape.n_b) == (cnt.n_u, cnt.n_t, cnt.n_b)
        assert shape.nvars == cnt.nvars


def test_shape_variable_names():
    p = preset("DESK-A")
    shape = SystemShape(p.n0, p.k0, p.c, p.gamma, 3, ((1, 0), (2, 1)), tuple(range(p.n0)))
    names = shape.variables()
    assert names[0] == "U_1_1"
    assert names[shape.u_index(1, 2)] == "U_2_3"
    assert names[shape.n_u] == "T_7"  # first free T: block d, 1-indexed a0+d+1
    assert names[-1] == "B_3"
    assert shape.b_index(3) == shape.nvars - 1


# -- system assembly ----------------------------------------------------


@pytest.fixture(scope="module")
def desk_c_system():
    p = preset("DESK-C")
    kp = keygen(p, seed=3)
    return p, kp, build_system(kp, p, a0=1, seed=3)


def test_build_system_counts_and_degrees(desk_c_system):
    p, _, sys_ = desk_c_system
    cnt = count_system(p, 1)
    assert len(sys_.polys) == cnt.quadratic
    assert len(sys_.elim) == cnt.elimination
    assert all(1 <= p_deg(q) <= 2 for q in sys_.polys)
    # bilinear: every quadratic monomial pairs a U-variable with a T/B one
    n_u = sys_.shape.n_u
    for q in sys_.polys:
        for m in q:
            if len(m) == 2:
                assert (m[0] < n_u) != (m[1] < n_u)


def test_build_system_dedup_redundancy(desk_c_system):
    p, kp, sys_ = desk_c_system
    raw = build_system(kp, p, a0=1, seed=3, dedup=False)
    blk = 1 << p.gamma
    assert len(raw.polys) == blk * len(sys_.polys)


def test_equations_vanish_exactly_on_bilinear_identity(desk_c_system):
    """Independent oracle: each equation is the inner product
    <row_i(I|U) * G_inv ** h, V> for its parity row, for any assignment."""
    import random

    p, _, sys_ = desk_c_system
    fld, shape = sys_.field, sys_.shape
    rng = random.Random(0)
    blk = 1 << p.gamma
    for _ in range(3):
        assign = {v: rng.randrange(fld.q) for v in range(shape.nvars)}
        U = assemble_u(sys_, assign)
        V = assemble_v(sys_, assign)
        comp = codes.block_compress(sys_.g_sys, p.gamma)
        K = np.concatenate([np.eye(shape.d, dtype=np.uint16), U], axis=1)
        D = codes.block_expand((Mat(fld, K) @ Mat(fld, comp)).data, p.gamma)
        idx = 0
        for i in range(shape.d):
            for beta in range(p.n0 - p.k0):
                if beta == shape.a0 + i:
                    continue  # consumed by the T-elimination
                w = star_row(fld, star_row(fld, D[i], sys_.h_punct[beta * blk]), V)
                expect = int(np.bitwise_xor.reduce(w))
                assert p_eval(sys_.polys[idx], assign, fld) == expect
                idx += 1
        assert idx == len(sys_.polys)


def test_assemble_v_is_quasi_dyadic(desk_c_system):
    import random

    p, _, sys_ = desk_c_system
    rng = random.Random(5)
    assign = {v: rng.randrange(sys_.field.q) for v in range(sys_.shape.nvars)}
    V = assemble_v(sys_, assign).reshape(-1, 1 << p.gamma)
    diffs = V ^ V[:, :1]
    assert np.all(diffs == diffs[0])
    # pinned normalization: B_1 = 0, B_2 = 1, last block offset T = 0
    assert diffs[0][1] == 0 and diffs[0][2] == 1
    assert V[-1, 0] == 0


def test_specialize_consistency(desk_c_system):
    import random

    _, _, sys_ = desk_c_system
    rng = random.Random(9)
    part = {0: 7, 1: 0}
    spec = specialize(sys_, part)
    assert spec.assigned == part
    rest = {v: rng.randrange(sys_.field.q) for v in range(2, sys_.shape.nvars)}
    for orig, red in zip(sys_.polys, spec.polys):
        assert p_eval(red, rest, sys_.field) == p_eval(orig, {**part, **rest}, sys_.field)
    with pytest.raises(KeyError):
        specialize(sys_, {sys_.shape.nvars: 1})


# -- solver on small synthetic systems ----------------------------------


def _toy_system(polys, nvars=3):
    # shape whose bookkeeping yields `nvars` plain variables
    shape = SystemShape(nvars + 1, 2, 1, 2, 0, ((1, 0), (2, 1)), tuple(range(nvars + 1)))
    assert shape.nvars == nvars
    z = np.zeros((1, 1), dtype=np.uint16)
    return BilinearSystem(F16, shape, polys, [], z, z)


def test_macaulay_solve_unique_point():
    # x0*x1 = 3*5, x1*x2 = 5*7, x0 + x1 + x2 = 3^5^7, x0 + x2 = 3^7
    sol = {0: 3, 1: 5, 2: 7}
    polys = [
        {(0, 1): 1, (): F16.mul(3, 5)},
        {(1, 2): 1, (): F16.mul(5, 7)},
        {(0,): 1, (1,): 1, (2,): 1, (): 3 ^ 5 ^ 7},
        {(0,): 1, (2,): 1, (): 3 ^ 7},
    ]
    sys_ = _toy_system(polys)
    out = macaulay_solve(sys_)
    assert out.status == "solutions"
    points = extract_solutions(sys_, out)
    assert sol in points
    for pt in points:
        assert all(p_eval(q, pt, F16) == 0 for q in polys)


def test_macaulay_solve_infeasible_constant():
    # x0 = 1 and x0 = 0 force the constant 1 into the ideal
    sys_ = _toy_system([{(0,): 1, (): 1}, {(0,): 1}])
    out = macaulay_solve(sys_)
    assert out.status == "infeasible"
    assert out.certificate is not None


def test_macaulay_solve_quadratic_contradiction():
    # x0*x1 = 1 (both nonzero) but x0*x2 = 0 with x2 = x1: contradiction
    sys_ = _toy_system(
        [{(0, 1): 1, (): 1}, {(0, 2): 1}, {(1,): 1, (2,): 1}]
    )
    out = macaulay_solve(sys_)
    assert out.status == "infeasible"


def test_macaulay_solve_positive_dimension_extraction():
    # single relation x0 = x1: q^2 points once the free x2 is enumerated
    sys_ = _toy_system([{(0,): 1, (1,): 1}])
    out = macaulay_solve(sys_)
    assert out.status == "solutions"
    points = extract_solutions(sys_, out)
    assert len(points) == F16.q * F16.q
    assert all(pt[0] == pt[1] for pt in points)


def test_extract_solutions_cap():
    shape = SystemShape(12, 2, 1, 2, 0, ((1, 0), (2, 1)), tuple(range(12)))
    z = np.zeros((1, 1), dtype=np.uint16)
    sys_ = BilinearSystem(F16, shape, [], [], z, z)
    out = macaulay_solve(sys_)
    with pytest.raises(SolutionSpaceTooLarge):
        extract_solutions(sys_, out)


def test_solve_outcome_stats_line(desk_c_system):
    _, _, sys_ = desk_c_system
    spec = specialize(sys_, {v: 0 for v in range(sys_.shape.nvars - 3)})
    out = macaulay_solve(spec)
    line = out.stats_line()
    assert line.startswith("SOLVE maxdeg=") and f"outcome={out.status}" in line


def test_system_text_rendering(desk_c_system):
    _, _, sys_ = desk_c_system
    text = sys_.to_text()
    assert text.count("POLY") == len(sys_.polys)
    assert "U_1_1" in text and "T_" in text
