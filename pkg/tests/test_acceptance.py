"""Acceptance gate for the key-recovery artifact.

Six criteria:
  1. published system-shape counts reproduced bit-exactly, sub-second;
  2. structural property suite (invariant dimension, GRS star products,
     the star-product inclusion, dual multipliers, trace/norm subcode
     dimensions, orbit ordering);
  3. end-to-end recovery on the desk-scale preset DESK-A within budget
     (the full 100-seed sweep runs with DAGSATTACK_FULL=1; the default
     run checks a 3-seed sample);
  4. full-parameter DAGS-5 spot check (gated, DAGSATTACK_FULL=1);
  5. hybrid branch cutting and the work-factor estimator values;
  6. systematic-form success probability.
"""

import math
import os
import random
import time

import numpy as np
import pytest

from dagsattack import attack, codes, dags, polysolve
from dagsattack.codes import (
    alternant_code,
    dual_multiplier,
    dyadic_support,
    group_orbit,
    grs_code,
    invariant_code,
    rs_code,
    star_product,
    subfield_subcode,
    trace_norm_vectors,
)
from dagsattack.errors import RankDeficient
from dagsattack.galois import tower
from dagsattack.matrix import Mat
from dagsattack.polysolve import SystemShape, count_system

FULL = bool(os.environ.get("DAGSATTACK_FULL"))

STANDARD_PINS = ((1, 0), (2, 1))


def _shape(p, a0):
    return SystemShape(p.n0, p.k0, p.c, p.gamma, a0, STANDARD_PINS, tuple(range(p.n0)))


# -- criterion 1: exact count reproduction ------------------------------


def test_criterion1_published_counts():
    t0 = time.process_time()
    expected = {  # preset -> (a0, vars, eqs)
        "DAGS-1": (0, 119, 550),
        "DAGS-3": (0, 76, 252),
        "DAGS-5": (0, 45, 189),
        "DAGS-1.1": (0, 179, 450),
        "DAGS-5.1": (0, 232, 252),
    }
    for name, (a0, nvars, eqs) in expected.items():
        p = dags.preset(name)
        cnt = count_system(p, a0)
        assert (cnt.nvars, cnt.quadratic) == (nvars, eqs), name
        sh = _shape(p, a0)
        assert sh.nvars == nvars
    # shortened DAGS-1 at searched dimensions 2..5
    p = dags.preset("DAGS-1")
    for dim, nvars, eqs in [(2, 39, 50), (3, 43, 75), (4, 47, 100), (5, 51, 125)]:
        a0 = p.k0 - p.c - dim
        cnt = count_system(p, a0)
        assert (cnt.nvars, cnt.quadratic) == (nvars, eqs)
        assert _shape(p, a0).nvars == nvars
    # over-determination ratio of the updated smallest parameters
    assert abs(count_system(dags.preset("DAGS-1.1"), 0).ratio - 2.5) < 0.05
    assert time.process_time() - t0 < 1.0


# -- criterion 2: structural property suite ------------------------------


def test_criterion2_invariant_dimension_100_keys():
    p = dags.preset("DESK-C")
    for seed in range(100):
        key = dags.keygen(p, seed=seed)
        assert invariant_code(key.public_code(), p.gamma).k == p.k0


def test_criterion2_grs_star_product_50_instances():
    tw = tower(4)
    rng = random.Random(100)
    for _ in range(50):
        n = rng.randrange(10, 41)
        x = rng.sample(range(tw.q), n)
        y1 = [rng.randrange(1, tw.q) for _ in range(n)]
        y2 = [rng.randrange(1, tw.q) for _ in range(n)]
        t1 = rng.randrange(1, 6)
        t2 = rng.randrange(1, min(8, n - t1 + 1))
        yy = [tw.mul(a, b) for a, b in zip(y1, y2)]
        assert star_product(grs_code(tw, x, y1, t1), grs_code(tw, x, y2, t2)) == grs_code(
            tw, x, yy, t1 + t2 - 1
        )


def test_criterion2_star_inclusion_50_instances():
    # A_{r+t-1}(x,y) ** (RS_t(x) over the base field) is inside A_r(x,y)
    tw = tower(4)
    t = tw.base.q + 1
    rng = random.Random(200)
    for _ in range(50):
        n = rng.randrange(38, 41)
        x = rng.sample(range(tw.q), n)
        y = [rng.randrange(1, tw.q) for _ in range(n)]
        r = rng.randrange(1, 3)
        big = alternant_code(tw, x, y, r + t - 1)
        small = alternant_code(tw, x, y, r)
        rs_sub = subfield_subcode(rs_code(tw, x, t), tw)
        assert big.k > 0 and rs_sub.k >= 2
        assert small.contains(star_product(big, rs_sub))


def test_criterion2_dual_multiplier_25_instances():
    tw = tower(4)
    rng = random.Random(300)
    for _ in range(25):
        n = rng.randrange(6, 20)
        x = rng.sample(range(tw.q), n)
        y = [rng.randrange(1, tw.q) for _ in range(n)]
        t = rng.randrange(1, n)
        yd = dual_multiplier(tw, x, y)
        assert grs_code(tw, x, y, t).gen.kernel_basis().row_space() == grs_code(
            tw, x, yd, n - t
        ).gen.row_space()


def test_criterion2_trace_norm_subcode_dims_25_supports():
    tw = tower(4)
    q = tw.base.q
    rng = random.Random(400)
    for i in range(25):
        gamma = rng.choice([2, 3])
        n0 = rng.randrange(5, 8)  # n >= q + 2 so the RS dimensions below exist
        while True:
            try:
                b = [rng.randrange(1, tw.q) for _ in range(gamma)]
                tau = rng.sample(range(tw.q), n0)
                sup = dyadic_support(tw, b, tau, [1] * n0, gamma)
                break
            except Exception:
                continue
        x = [int(v) for v in sup.x]
        ones, tr, trw, nr = trace_norm_vectors(x, tw)
        # degree <= q polynomials capture 1, tr(x), tr(wx): dim >= 3
        sub = subfield_subcode(rs_code(tw, x, q + 1), tw)
        assert sub.k >= 3
        assert sub.contains(codes.Code(tw.base, Mat(tw.base, np.array([ones, tr, trw]))))
        # one degree more captures the norm x^{q+1} as well: dim >= 4
        sub_big = subfield_subcode(rs_code(tw, x, q + 2), tw)
        assert sub_big.k >= 4
        assert sub_big.contains(codes.Code(tw.base, Mat(tw.base, np.array([ones, tr, trw, nr]))))


def test_criterion2_orbit_examples_verbatim():
    assert group_orbit([7], 1) == [0, 7]
    b1, b2, b3 = 5, 9, 17
    assert group_orbit([b1, b2, b3], 3) == [
        0, b1, b2, b1 ^ b2, b3, b1 ^ b3, b2 ^ b3, b1 ^ b2 ^ b3,
    ]
    assert polysolve.orbit_vector(["B1", "B2", "B3"]) == [
        (), ("B1",), ("B2",), ("B1", "B2"), ("B3",), ("B1", "B3"), ("B2", "B3"),
        ("B1", "B2", "B3"),
    ]


# -- criterion 3: end-to-end desk-scale recovery --------------------------


def _run_desk_a(seed):
    p = dags.preset("DESK-A")
    key = dags.keygen(p, seed=seed)
    t0 = time.process_time()
    rep = attack.run_direct(key, p, attack.AttackConfig(seed=seed))
    elapsed = time.process_time() - t0
    return rep, elapsed


@pytest.mark.parametrize("seed", [1, 2, 11])
def test_criterion3_desk_a_recovery_sample(seed):
    rep, elapsed = _run_desk_a(seed)
    assert rep.outcome == "success" and rep.equivalent
    assert rep.maxdeg <= 4
    assert elapsed < 300.0


@pytest.mark.skipif(not FULL, reason="full 100-seed sweep: set DAGSATTACK_FULL=1 (~3 h)")
def test_criterion3_desk_a_recovery_full():
    wins = 0
    for seed in range(100):
        rep, elapsed = _run_desk_a(seed)
        if rep.outcome == "success" and elapsed < 300.0:
            assert rep.maxdeg <= 4
            wins += 1
    assert wins >= 95


# -- criterion 4: full-parameter spot check -------------------------------


@pytest.mark.skipif(not FULL, reason="DAGS-5 spot check: set DAGSATTACK_FULL=1")
def test_criterion4_dags5_direct():
    p = dags.preset("DAGS-5")
    key = dags.keygen(p, seed=1)
    rep = attack.run_direct(key, p, attack.AttackConfig(seed=1, dmax=3))
    assert rep.outcome == "success" and rep.maxdeg <= 3


# -- criterion 5: hybrid branch cutting and the estimator -----------------


def test_criterion5_branch_cut_completeness():
    p = dags.preset("DESK-A")
    key = dags.keygen(p, seed=11)
    sys_ = polysolve.build_system(key, p, a0=3, seed=11)
    out = polysolve.macaulay_solve(sys_)
    assert out.status == "solutions"
    points = polysolve.extract_solutions(sys_, out)
    assert points
    row0 = [sys_.shape.u_index(0, l) for l in range(p.c)]
    true_guesses = {tuple(pt[v] for v in row0) for pt in points}

    # the true branch solves and reproduces a verified point
    guess = dict(zip(row0, next(iter(true_guesses))))
    spec = polysolve.specialize(sys_, guess)
    out_true = polysolve.macaulay_solve(spec)
    assert out_true.status == "solutions"
    assert polysolve.extract_solutions(spec, out_true)

    # sampled wrong one-U-row guesses are all reported infeasible
    rng = random.Random(0)
    wrong_tried = 0
    while wrong_tried < 15:
        g = tuple(rng.randrange(p.q) for _ in row0)
        if g in true_guesses:
            continue
        wrong_tried += 1
        out_wrong = polysolve.macaulay_solve(polysolve.specialize(sys_, dict(zip(row0, g))))
        assert out_wrong.status == "infeasible", g
        assert out_wrong.certificate is not None


def test_criterion5_estimator_values():
    assert math.isclose(
        attack.estimate_workfactor(dags.preset("DAGS-1.1"), "linear"), 111.39, abs_tol=0.01
    )
    assert math.isclose(
        attack.estimate_workfactor(
            dags.preset("DAGS-1.1"), "hybrid", a0=15, guessed_vars=8,
            false_log2=35.0, true_log2=36.0,
        ),
        83.0,
        abs_tol=0.01,
    )


# -- criterion 6: systematic-form probability -----------------------------


def test_criterion6_systematic_form_probability():
    from dagsattack.galois import field

    fld = field(5)
    q = fld.q
    d, n = 10, 20
    rng = np.random.default_rng(1234)
    trials = 10_000
    ok = 0
    done = 0
    while done < trials:
        M = Mat(fld, rng.integers(0, q, size=(d, n), dtype=np.uint16))
        try:
            _, flag = M.systematic_form()
        except RankDeficient:
            continue  # not full rank: resample
        done += 1
        ok += flag
    expected = 1.0
    for i in range(1, d + 1):
        expected *= 1.0 - q**-i
    assert abs(ok / trials - expected) <= 0.02
