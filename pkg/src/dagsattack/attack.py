"""Full key recovery: solve the bilinear system, rebuild the support
from the recovered trace vectors, complete the shortened blocks, and
recover the multipliers.  Includes the hybrid guess-and-solve mode and
the work-factor estimator.

The solver returns the pair (U, V): U identifies the hidden invariant
subcode D, and V is the normalized trace vector of an affine image of
the secret support.  The support itself is rebuilt by pairing V with a
second trace-type vector from the dual-constraint kernel and inverting
(tr(x), tr(w*x)) -> x.  All reconstruction is verified end-to-end: a
run reports success only when the rebuilt alternant code equals the
public code.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field as dc_field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import codes, polysolve
from .codes import Code
from .dags import KeyPair, ParamSet, key_equivalent
from .errors import (
    DegenerateSupport,
    ExhaustedSearchSpace,
    InconsistentStructure,
    NonexistentD,
    NoValidMultiplier,
    SolutionSpaceTooLarge,
)
from .galois import TowerSpec
from .matrix import Mat, star_row
from .polysolve import BilinearSystem, SolveOutcome

# default shortening per desk preset, tuned so the Macaulay degree stays <= 4
# while the matrices fit a small machine
_DEFAULT_A0 = {"DESK-A": 3, "DESK-B": 0, "DESK-C": 2}


@dataclass
class AttackConfig:
    a0: Optional[int] = None  # None: preset default, else k0-c-3 clamped
    dmax: int = polysolve.DEFAULT_DMAX
    hybrid: bool = False
    guess_width: int = 0  # number of U-variables specialized (row-major)
    seed: int = 0
    jobs: int = 1
    max_retries: int = 10
    max_guesses: Optional[int] = None


@dataclass
class AttackReport:
    outcome: str  # "success" | "failure"
    reason: str = ""
    x: Optional[List[int]] = None
    z: Optional[List[int]] = None
    equivalent: bool = False
    maxdeg: int = 0
    rows: int = 0
    cols: int = 0
    groebner_cycles: int = 0  # process-time ns spent in the system solver
    linalg_cycles: int = 0  # process-time ns spent in build + reconstruction
    guesses_tried: int = 0
    retries: int = 0
    a0: int = 0
    branch_histogram: Dict[str, int] = dc_field(default_factory=dict)

    def to_text(self) -> str:
        lines = [
            f"outcome = {self.outcome}",
            f"reason = {self.reason}",
            f"equivalent = {'true' if self.equivalent else 'false'}",
            f"maxdeg = {self.maxdeg}",
            f"rows = {self.rows}",
            f"cols = {self.cols}",
            f"groebner_cycles = {self.groebner_cycles}",
            f"linalg_cycles = {self.linalg_cycles}",
            f"guesses_tried = {self.guesses_tried}",
            f"retries = {self.retries}",
            f"a0 = {self.a0}",
        ]
        for k, v in sorted(self.branch_histogram.items()):
            lines.append(f"branch_{k} = {v}")
        if self.x is not None:
            lines.append("x = " + " ".join(f"{v:x}" for v in self.x))
            lines.append("z = " + " ".join(f"{v:x}" for v in self.z))
        return "\n".join(lines) + "\n"


def default_a0(p: ParamSet) -> int:
    if p.name in _DEFAULT_A0:
        return _DEFAULT_A0[p.name]
    return max(0, min(p.k0 - p.c - 3, p.k0 - p.c - 1))


# -- step 2: support from trace vectors --------------------------------


def _dyadic_structure(px: np.ndarray, gamma: int, tower: TowerSpec) -> Tuple[List[int], List[int]]:
    """(b, tau) of a block-affine vector; raises InconsistentStructure."""
    blk = 1 << gamma
    if len(px) % blk:
        raise InconsistentStructure("length not a multiple of the block size")
    X = np.asarray(px).reshape(-1, blk)
    diffs = X ^ X[:, :1]
    if not np.all(diffs == diffs[0]):
        raise InconsistentStructure("within-block differences vary across blocks")
    g = [int(v) for v in diffs[0]]
    b = [g[1 << l] for l in range(gamma)]
    if g != codes.group_orbit(b, gamma):
        raise InconsistentStructure("block differences are not a group orbit")
    return b, [int(v) for v in X[:, 0]]


def _candidate_ok(px: np.ndarray, gamma: int, tower: TowerSpec) -> bool:
    if len(set(int(v) for v in px)) != len(px):
        return False
    try:
        b, _ = _dyadic_structure(px, gamma, tower)
    except InconsistentStructure:
        return False
    return len(set(codes.group_orbit(b, gamma))) == 1 << gamma


def dual_constraint_kernel(sys_: BilinearSystem, solution: Dict[int, int]) -> Mat:
    """Basis of N' = {v : D * v orthogonal to the public rows}, the
    space the trace vectors of the support live in (punctured)."""
    fld = sys_.field
    shape = sys_.shape
    comp = codes.block_compress(sys_.g_sys, shape.gamma)
    U = polysolve.assemble_u(sys_, solution)
    K = np.concatenate([np.eye(shape.d, dtype=np.uint16), U], axis=1)
    dcomp = (Mat(fld, K) @ Mat(fld, comp)).data
    dgen = codes.block_expand(dcomp, shape.gamma)
    rows = [star_row(fld, drow, h) for drow in dgen for h in sys_.h_punct]
    return Mat(fld, np.array(rows)).kernel_basis()


def _quasi_dyadic_subspace(kernel: Mat, gamma: int) -> Mat:
    """Restrict a kernel basis to its block-affine (quasi-dyadic) part."""
    fld = kernel.field
    n = kernel.cols
    blk = 1 << gamma
    B = kernel.data  # dim x n
    cons = []
    for m in range(1, n // blk):
        for pos in range(1, blk):
            cons.append(B[:, m * blk + pos] ^ B[:, m * blk] ^ B[:, pos] ^ B[:, 0])
    lam = Mat(fld, np.array(cons)).kernel_basis() if cons else Mat.identity(fld, B.shape[0])
    return lam @ kernel


def reconstruct_x(
    sys_: BilinearSystem, solution: Dict[int, int], tower: TowerSpec
) -> Iterator[np.ndarray]:
    """Candidate punctured supports over GF(q^2), most plausible first.

    The solved V is tr of an affine image x* of the support; candidates
    pair it with each direction w2 in the quasi-dyadic part of the dual
    constraint kernel and lift (V, w2) -> x.  Structurally inconsistent
    lifts (repeated entries, non-dyadic blocks) are filtered out here;
    the caller confirms survivors with multiplier recovery.
    """
    fld = sys_.field
    gamma = sys_.shape.gamma
    v = polysolve.assemble_v(sys_, solution)
    kern = dual_constraint_kernel(sys_, solution)
    aff = _quasi_dyadic_subspace(kern, gamma).row_space()
    n = aff.cols
    # directions modulo the all-ones vector: a constant shift of the
    # second trace coordinate is an affine shift of the support, so one
    # representative per coset suffices; multiples of v are kept
    ones = np.ones((1, n), dtype=np.uint16)
    pool = Mat(fld, np.concatenate([ones, aff.data]))
    R, piv = pool.rref()
    quot = R.data[1 : len(piv)]
    # the true direction can sit anywhere in the quotient, so the caps
    # only guard against degenerate (high-dimensional) kernels
    count = 0
    tried = 0
    for coeffs in itertools.product(range(fld.q), repeat=len(quot)):
        if all(c == 0 for c in coeffs):
            continue
        tried += 1
        w2 = np.zeros(n, dtype=np.uint16)
        for cf, row in zip(coeffs, quot):
            if cf:
                w2 ^= np.array([fld.mul(cf, int(t)) for t in row], dtype=np.uint16)
        px = codes.lift_from_traces(tower, v, w2)
        if _candidate_ok(px, gamma, tower):
            count += 1
            yield px
        if count >= 4096 or tried >= 65536:
            return


# -- step 3: multipliers and completion --------------------------------


def recover_y(
    x: Sequence[int], gen: np.ndarray, tower: TowerSpec, r: int, dyadic_gamma: Optional[int] = None
) -> np.ndarray:
    """Multipliers z with sum_j c_j x_j^t z_j = 0 for all generator rows
    c and t < r.  Constraint rows are added batch-wise until the
    solution space is a single line; that line must have no zero entry
    (and be block-constant when dyadic_gamma is given)."""
    n = len(x)
    xs = np.array([int(v) for v in x], dtype=np.uint16)
    rows: List[np.ndarray] = []
    power = np.ones(n, dtype=np.uint16)
    kern = None
    for t in range(r):
        for c in gen:
            rows.append(star_row(tower, c.astype(np.uint16), power))
        power = star_row(tower, power, xs)
        if len(rows) < n - 1 and t + 1 < r:
            continue
        kern = Mat(tower, np.array(rows)).kernel_basis()
        if kern.rows <= 1:
            break
    if kern is None or kern.rows != 1:
        raise NoValidMultiplier(f"multiplier space has dimension {0 if kern is None else kern.rows}")
    z = kern.data[0]
    if np.any(z == 0):
        raise NoValidMultiplier("multiplier has zero entries")
    if dyadic_gamma is not None:
        blk = 1 << dyadic_gamma
        Z = z.reshape(-1, blk)
        if not np.all(Z == Z[:, :1]):
            raise NoValidMultiplier("multiplier is not constant on dyadic blocks")
    return z


def complete_support(
    px: np.ndarray, pz: np.ndarray, gen_perm: np.ndarray, p: ParamSet, a0: int, tower: TowerSpec
) -> np.ndarray:
    """Extend a punctured support to the shortened blocks.

    Solves for m0 = z_I and m1 = z_I * x_I from the degree-0/1 dual
    relations of the full public generator (I-columns must have full
    rank), then reads x_I = m1/m0.
    """
    blk = 1 << p.gamma
    ni = a0 * blk
    if ni == 0:
        return px
    A = Mat(tower, gen_perm[:, :ni].copy())
    known = np.concatenate([np.zeros(ni, dtype=np.uint16), pz])
    rhs0 = np.array([[_dot(tower, c, known)] for c in gen_perm], dtype=np.uint16)
    zx = np.concatenate([np.zeros(ni, dtype=np.uint16), star_row(tower, pz, px)])
    rhs1 = np.array([[_dot(tower, c, zx)] for c in gen_perm], dtype=np.uint16)
    if A.rank() != ni:
        raise InconsistentStructure("shortened columns of the generator are rank-deficient")
    m0 = A.solve_right(Mat(tower, rhs0))
    m1 = A.solve_right(Mat(tower, rhs1))
    if m0 is None or m1 is None:
        raise InconsistentStructure("no consistent multiplier extension")
    x_i = np.zeros(ni, dtype=np.uint16)
    for j in range(ni):
        lo = int(m0.data[j, 0])
        if lo == 0:
            raise DegenerateSupport("zero multiplier on a shortened position")
        x_i[j] = tower.mul(int(m1.data[j, 0]), tower.inv(lo))
    full = np.concatenate([x_i, px])
    if not _candidate_ok(full, p.gamma, tower):
        raise DegenerateSupport("completed support is not a valid dyadic support")
    return full


def _dot(fld, a: np.ndarray, b: np.ndarray) -> int:
    return int(np.bitwise_xor.reduce(star_row(fld, a, b)))


# -- orchestration ------------------------------------------------------


def _unpermute(vec: np.ndarray, perm: Sequence[int], gamma: int) -> List[int]:
    blk = 1 << gamma
    out = [0] * len(vec)
    for i, orig in enumerate(perm):
        out[orig * blk : (orig + 1) * blk] = [int(v) for v in vec[i * blk : (i + 1) * blk]]
    return out


def _try_solution(
    key: KeyPair, p: ParamSet, sys_: BilinearSystem, solution: Dict[int, int]
) -> Optional[Tuple[List[int], List[int]]]:
    """Steps 2-3 for one solver solution; None when no candidate confirms."""
    tw = p.tower()
    blk = 1 << p.gamma
    a0 = sys_.shape.a0
    perm = sys_.shape.perm
    cols = np.concatenate([np.arange(i * blk, (i + 1) * blk) for i in perm])
    base_perm = key.public_code().gen.data[:, cols].copy()
    gen_perm = _lift_base_matrix(base_perm)
    sh = codes.shorten(Code(sys_.field, Mat(sys_.field, base_perm)), list(range(a0 * blk)))
    gen_punct = _lift_base_matrix(sh.gen.data)
    for px in reconstruct_x(sys_, solution, tw):
        try:
            pz = recover_y(px, gen_punct, tw, p.r, dyadic_gamma=p.gamma)
            full_x = complete_support(px, pz, gen_perm, p, a0, tw)
            z = recover_y(full_x, gen_perm, tw, p.r, dyadic_gamma=p.gamma)
            x_orig = _unpermute(full_x, perm, p.gamma)
            z_orig = _unpermute(z, perm, p.gamma)
            if key_equivalent((x_orig, z_orig), key):
                return x_orig, z_orig
        except (NoValidMultiplier, InconsistentStructure, DegenerateSupport):
            continue
    return None


def _lift_base_matrix(data: np.ndarray) -> np.ndarray:
    """Reinterpret a GF(q) matrix as a GF(q^2) matrix (same bit patterns)."""
    return data.astype(np.uint16)


def run_direct(key: KeyPair, p: ParamSet, cfg: Optional[AttackConfig] = None) -> AttackReport:
    """Direct (non-hybrid) key recovery with the retry ladder: fresh
    shortening blocks, then the alternate B-normalization, then a0 +- 1."""
    cfg = cfg or AttackConfig()
    if p.dim_d <= 0:
        raise NonexistentD(f"{p.name}: dim D = {p.dim_d} <= 0")
    base_a0 = cfg.a0 if cfg.a0 is not None else default_a0(p)
    report = AttackReport("failure", reason="not attempted", a0=base_a0)
    attempts: List[Tuple[int, str, int]] = []
    for retry in range(cfg.max_retries):
        norm = "standard"
        a0 = base_a0
        if retry in (3, 4) and p.gamma >= 3:
            norm = "alternate"
        if retry in (5, 6):
            a0 = min(base_a0 + 1, p.k0 - p.c - 1)
        if retry in (7, 8):
            a0 = max(base_a0 - 1, 0)
        attempts.append((a0, norm, cfg.seed * 1000 + retry))
    for retry, (a0, norm, bseed) in enumerate(attempts):
        t0 = time.process_time_ns()
        try:
            sys_ = polysolve.build_system(key, p, a0=a0, normalization=norm, seed=bseed)
        except Exception as exc:  # SystematicFormFailure and kin: try next rung
            report.reason = f"build: {exc}"
            report.retries = retry + 1
            continue
        t1 = time.process_time_ns()
        report.linalg_cycles += t1 - t0
        try:
            out = polysolve.macaulay_solve(sys_, dmax=cfg.dmax)
        except Exception as exc:
            report.reason = f"solve: {exc}"
            report.retries = retry + 1
            report.linalg_cycles += time.process_time_ns() - t1
            continue
        t2 = time.process_time_ns()
        report.groebner_cycles += t2 - t1
        report.maxdeg = max(report.maxdeg, out.maxdeg)
        report.rows = max(report.rows, out.rows)
        report.cols = max(report.cols, out.cols)
        report.a0 = a0
        report.retries = retry + 1
        if out.status != "solutions":
            report.reason = f"solver: {out.status}"
            continue
        try:
            solutions = polysolve.extract_solutions(sys_, out)
        except SolutionSpaceTooLarge as exc:
            report.reason = f"extract: {exc}"
            continue
        hit = None
        for solution in solutions:
            hit = _try_solution(key, p, sys_, solution)
            if hit:
                break
        report.linalg_cycles += time.process_time_ns() - t2
        if hit:
            report.outcome = "success"
            report.reason = ""
            report.x, report.z = hit
            report.equivalent = True
            return report
        report.reason = f"no solution of {len(solutions)} confirmed"
    return report


def hybrid_attack(key: KeyPair, p: ParamSet, cfg: Optional[AttackConfig] = None) -> AttackReport:
    """Guess a block of U-variables, solve each specialized system, and
    cut branches that put a nonzero constant in the ideal."""
    cfg = cfg or AttackConfig(hybrid=True)
    if cfg.guess_width == 0:
        return run_direct(key, p, cfg)
    a0 = cfg.a0 if cfg.a0 is not None else default_a0(p)
    report = AttackReport("failure", reason="exhausted", a0=a0)
    t0 = time.process_time_ns()
    sys_ = polysolve.build_system(key, p, a0=a0, seed=cfg.seed)
    report.linalg_cycles += time.process_time_ns() - t0
    width = cfg.guess_width
    if width > sys_.shape.n_u:
        raise ValueError("guess width exceeds the number of U-variables")
    guess_vars = list(range(width))
    q = sys_.field.q
    rng = random.Random(cfg.seed)
    space = list(itertools.product(range(q), repeat=width))
    rng.shuffle(space)
    if cfg.max_guesses is not None:
        space = space[: cfg.max_guesses]
    hist: Dict[str, int] = {}
    for guess in space:
        report.guesses_tried += 1
        spec = polysolve.specialize(sys_, dict(zip(guess_vars, guess)))
        t1 = time.process_time_ns()
        try:
            out = polysolve.macaulay_solve(spec, dmax=cfg.dmax)
        except Exception:
            hist["error"] = hist.get("error", 0) + 1
            continue
        finally:
            report.groebner_cycles += time.process_time_ns() - t1
        report.maxdeg = max(report.maxdeg, out.maxdeg)
        report.rows = max(report.rows, out.rows)
        report.cols = max(report.cols, out.cols)
        hist[out.status] = hist.get(out.status, 0) + 1
        if out.status != "solutions":
            continue
        t2 = time.process_time_ns()
        try:
            solutions = polysolve.extract_solutions(spec, out)
        except SolutionSpaceTooLarge:
            hist["too_large"] = hist.get("too_large", 0) + 1
            continue
        hit = None
        for solution in solutions:
            full = dict(solution)
            full.update(zip(guess_vars, guess))
            hit = _try_solution(key, p, sys_, full)
            if hit:
                break
        report.linalg_cycles += time.process_time_ns() - t2
        if hit:
            report.outcome = "success"
            report.reason = ""
            report.x, report.z = hit
            report.equivalent = True
            report.branch_histogram = hist
            return report
    report.branch_histogram = hist
    raise ExhaustedSearchSpace(
        f"no guess of {report.guesses_tried} confirmed; branch outcomes {hist}"
    )


# -- work-factor estimator ----------------------------------------------


def estimate_workfactor(
    p: ParamSet,
    strategy: str = "linear",
    a0: int = 0,
    guessed_vars: Optional[int] = None,
    false_log2: Optional[float] = None,
    true_log2: Optional[float] = None,
) -> float:
    """log2 operation count.

    linear: guess whole U-rows until the remaining system is linear in
    the n_V variables, then solve each guess by one n_V^3 elimination.
    hybrid: q^guessed branches at a measured/supplied per-branch cost,
    plus one true-branch cost.
    """
    cnt = polysolve.count_system(p, a0)
    n_v = cnt.n_t + cnt.n_b
    per_row = p.n0 - p.k0 - 1
    if strategy == "linear":
        rows_needed = math.ceil(n_v / per_row)
        g = guessed_vars if guessed_vars is not None else rows_needed * p.c
        return g * p.s + 3 * math.log2(n_v)
    if strategy == "hybrid":
        g = guessed_vars if guessed_vars is not None else p.c
        if true_log2 is None:
            raise ValueError("hybrid strategy needs the true-branch cost input")
        if g == 0:
            return true_log2  # single branch: the true one
        if false_log2 is None:
            raise ValueError("hybrid strategy needs the per-false-branch cost input")
        return math.log2(2 ** (g * p.s + false_log2) + 2**true_log2)
    if strategy == "direct":
        if true_log2 is None:
            raise ValueError("direct strategy needs the solve cost input")
        return true_log2
    raise ValueError(f"unknown strategy {strategy!r}")
