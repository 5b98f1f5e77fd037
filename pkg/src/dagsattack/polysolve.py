"""Bilinear modeling of the quasi-dyadic key-recovery problem and a
bounded-degree Macaulay (XL-style) solver.

The unknowns are the mixing matrix ``U`` (expressing the searched
invariant subcode D against the systematic generator of the invariant
code) and the quasi-dyadic vector ``V = T (x) 1 + 1 (x) orbit(B)``.
Writing both the public parity check and the shortened invariant
generator in systematic form collapses the system to

    n_U = (k0 - c - a0) * c          U-variables
    n_T = n0 - k0 + c - 1            free T-variables
    n_B = gamma - 2                  free B-variables
    (k0 - c - a0) * (n0 - k0 - 1)    bilinear equations

plus one equation per U-row that expresses its T-variable in terms of
the rest (those are substituted away before solving).

Polynomials are dicts mapping a sorted variable-index tuple (the
monomial) to a nonzero GF(q) coefficient; addition is coefficient XOR.
"""

from __future__ import annotations

import itertools
import math
import os
import random
from dataclasses import dataclass, field as dc_field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels, codes
from .dags import KeyPair, ParamSet
from .errors import (
    MemoryCapExceeded,
    NonexistentD,
    SolutionSpaceTooLarge,
    SystematicFormFailure,
)
from .galois import FieldSpec
from .matrix import Mat, star_row

Poly = Dict[Tuple[int, ...], int]

DEFAULT_DMAX = 4
SOLUTION_CAP = 10_000


# -- polynomial helpers ------------------------------------------------


def p_deg(p: Poly) -> int:
    return max((len(m) for m in p), default=0)


def p_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for m, c in b.items():
        nc = out.get(m, 0) ^ c
        if nc:
            out[m] = nc
        else:
            out.pop(m, None)
    return out


def p_scale(a: Poly, s: int, fld: FieldSpec) -> Poly:
    if s == 0:
        return {}
    if s == 1:
        return dict(a)
    return {m: fld.mul(c, s) for m, c in a.items()}


def p_mul(a: Poly, b: Poly, fld: FieldSpec) -> Poly:
    out: Poly = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(sorted(m1 + m2))
            nc = out.get(m, 0) ^ fld.mul(c1, c2)
            if nc:
                out[m] = nc
            else:
                out.pop(m, None)
    return out


def p_substitute(p: Poly, var: int, rep: Poly, fld: FieldSpec) -> Poly:
    """Substitute ``var := rep`` into p."""
    out: Poly = {}
    for m, c in p.items():
        e = 0
        rest = []
        for v in m:
            if v == var:
                e += 1
            else:
                rest.append(v)
        term: Poly = {tuple(rest): c}
        for _ in range(e):
            term = p_mul(term, rep, fld)
        out = p_add(out, term)
    return out


def p_eval(p: Poly, assign: Dict[int, int], fld: FieldSpec) -> int:
    acc = 0
    for m, c in p.items():
        v = c
        for var in m:
            v = fld.mul(v, assign[var])
            if v == 0:
                break
        acc ^= v
    return acc


def _mono_key(m: Tuple[int, ...]) -> Tuple[int, Tuple[int, ...]]:
    # graded order, descending by degree, lexicographic tie-break
    return (-len(m), m)


# -- system shape ------------------------------------------------------


def orbit_vector(labels: Sequence) -> List[Tuple]:
    """The 2^gamma formal sums of the dyadic group in binary-expansion
    order: entry p is the set of labels at the set bits of p."""
    if not labels:
        raise ValueError("need at least one generator label")
    out: List[Tuple] = [()]
    for lab in labels:
        out = out + [m + (lab,) for m in out]
    return out


@dataclass(frozen=True)
class Counts:
    n_u: int
    n_t: int
    n_b: int
    quadratic: int
    elimination: int

    @property
    def nvars(self) -> int:
        return self.n_u + self.n_t + self.n_b

    @property
    def ratio(self) -> float:
        return self.quadratic / self.nvars if self.nvars else float("inf")


def count_system(p: ParamSet, a0: int) -> Counts:
    """Closed-form system shape under the normalization T_{n0}=0, B_1=0,
    B_2=1 (no key required)."""
    if p.dim_d <= 0:
        raise NonexistentD(f"{p.name}: k0 = {p.k0} <= c = {p.c}")
    if not 0 <= a0 <= p.k0 - p.c:
        raise ValueError(f"a0 = {a0} out of range [0, {p.k0 - p.c}]")
    d = p.k0 - p.c - a0
    return Counts(
        n_u=d * p.c,
        n_t=p.n0 - p.k0 + p.c - 1,
        n_b=p.gamma - 2,
        quadratic=d * (p.n0 - p.k0 - 1),
        elimination=d,
    )


@dataclass(frozen=True)
class SystemShape:
    """Variable bookkeeping: U row-major, then free T, then free B.

    T-variables are named by the original (pre-shortening) 1-indexed
    block; the punctured block m corresponds to T_{a0+m+1}.  Pinned
    values: T_{n0} = 0 and the B entries in ``pins``.
    """

    n0: int
    k0: int
    c: int
    gamma: int
    a0: int
    pins: Tuple[Tuple[int, int], ...]  # ((B-index, value), ...)
    perm: Tuple[int, ...]  # dyadic-block order applied to the public code

    @property
    def d(self) -> int:
        return self.k0 - self.c - self.a0

    @property
    def n0p(self) -> int:
        return self.n0 - self.a0

    @property
    def free_b(self) -> Tuple[int, ...]:
        pinned = {j for j, _ in self.pins}
        return tuple(j for j in range(1, self.gamma + 1) if j not in pinned)

    @property
    def n_u(self) -> int:
        return self.d * self.c

    @property
    def n_t(self) -> int:
        return self.n0p - 1 - self.d

    @property
    def n_b(self) -> int:
        return len(self.free_b)

    @property
    def nvars(self) -> int:
        return self.n_u + self.n_t + self.n_b

    def u_index(self, i: int, l: int) -> int:
        return i * self.c + l

    def t_index(self, m: int) -> int:
        """Variable index of the free T at punctured block m (d <= m < n0p-1)."""
        return self.n_u + (m - self.d)

    def b_index(self, j: int) -> int:
        return self.n_u + self.n_t + self.free_b.index(j)

    def var_name(self, idx: int) -> str:
        if idx < self.n_u:
            return f"U_{idx // self.c + 1}_{idx % self.c + 1}"
        if idx < self.n_u + self.n_t:
            m = idx - self.n_u + self.d
            return f"T_{self.a0 + m + 1}"
        return f"B_{self.free_b[idx - self.n_u - self.n_t]}"

    def variables(self) -> List[str]:
        return [self.var_name(i) for i in range(self.nvars)]


_NORMALIZATIONS = {
    "standard": ((1, 0), (2, 1)),
    "alternate": ((1, 0), (2, 0), (3, 1)),
}


@dataclass
class BilinearSystem:
    field: FieldSpec
    shape: SystemShape
    polys: List[Poly]
    elim: List[Poly]  # elim[i]: T'_i = elim[i] (punctured blocks 0..d-1)
    g_sys: np.ndarray  # (k0-a0) x n' expanded shortened invariant generator
    h_punct: np.ndarray  # (n-k) x n' punctured public parity rows
    assigned: Dict[int, int] = dc_field(default_factory=dict)

    def to_text(self) -> str:
        return "\n".join(poly_text(self.shape, p) for p in self.polys) + "\n"


def poly_text(shape: SystemShape, p: Poly) -> str:
    if not p:
        return "POLY 0"
    terms = []
    for m in sorted(p, key=_mono_key):
        c = p[m]
        parts = [f"{c:x}"]
        for v in sorted(set(m)):
            parts.append(f"{shape.var_name(v)}^{m.count(v)}")
        terms.append(" ".join(parts[:1] + [" * ".join(parts[1:])]).strip())
    return "POLY " + " + ".join(terms)


def _block_sums(fld: FieldSpec, g: np.ndarray, h: np.ndarray, gamma: int):
    """For w = g * h (component-wise): per-block XOR sums, and per group
    generator the XOR over positions with that bit set."""
    blk = 1 << gamma
    W = star_row(fld, g, h).reshape(-1, blk)
    bs = np.bitwise_xor.reduce(W, axis=1)
    bb = np.zeros(gamma, dtype=np.uint16)
    for b in range(gamma):
        cols = [p for p in range(blk) if (p >> b) & 1]
        bb[b] = np.bitwise_xor.reduce(W[:, cols], axis=None)
    return bs, bb


def build_system(
    key: KeyPair,
    p: ParamSet,
    a0: int = 0,
    normalization: str = "standard",
    seed: int = 0,
    max_attempts: int = 50,
    dedup: bool = True,
) -> BilinearSystem:
    """Assemble the bilinear system for a public key.

    The first a0 dyadic blocks (after an optional block permutation,
    retried when the required systematic forms fail) are shortened.
    With ``dedup=False`` every parity row is kept instead of one
    representative per dyadic block, exposing the 2^gamma-fold
    redundancy of the raw system.
    """
    cnt = count_system(p, a0)  # validates dim D and a0 range
    if a0 > p.k0 - p.c - 1:
        raise ValueError("a0 leaves an empty searched subcode")
    pins = _NORMALIZATIONS[normalization]
    if any(j > p.gamma for j, _ in pins):
        raise ValueError(f"{normalization!r} normalization needs gamma >= 3")
    fld = p.tower().base
    blk = 1 << p.gamma
    rng = random.Random(seed)
    gpub = key.public_code().gen.data
    order = list(range(p.n0))

    # a fresh block order every attempt: the searched subcode must come
    # out systematic in the first d compressed coordinates, and whether
    # it does depends on the order in a way no pre-check can see
    for _ in range(max_attempts):
        rng.shuffle(order)
        cols = np.concatenate([np.arange(i * blk, (i + 1) * blk) for i in order])
        C = codes.Code(fld, Mat(fld, gpub[:, cols].copy()))
        H, hpiv = C.gen.kernel_basis().rref()
        if hpiv != list(range(p.n - p.k)):
            continue
        ginv = codes.invariant_code(C, p.gamma)
        if ginv.k != p.k0:
            continue
        I = list(range(a0 * blk))
        sh = codes.shorten(ginv, I)
        comp, piv = Mat(fld, codes.block_compress(sh.gen.data, p.gamma)).rref()
        if sh.k != p.k0 - a0 or piv != list(range(p.k0 - a0)):
            continue
        g_sys = codes.block_expand(comp.data[: p.k0 - a0], p.gamma)
        h_punct = H.data[: p.n - p.k, a0 * blk :].copy()
        shape = SystemShape(p.n0, p.k0, p.c, p.gamma, a0, pins, tuple(order))
        sys_ = _assemble(fld, shape, g_sys, h_punct, dedup)
        if dedup:
            assert len(sys_.polys) == cnt.quadratic and len(sys_.elim) == cnt.elimination
        return sys_
    raise SystematicFormFailure(
        f"no block order gave systematic forms after {max_attempts} attempts"
    )


def _assemble(
    fld: FieldSpec, shape: SystemShape, g_sys: np.ndarray, h_punct: np.ndarray, dedup: bool
) -> BilinearSystem:
    d, c, a0, gamma = shape.d, shape.c, shape.a0, shape.gamma
    n0, k0, n0p = shape.n0, shape.k0, shape.n0p
    blk = 1 << gamma
    pin_bits = [j - 1 for j, v in shape.pins if v == 1]
    free_b = shape.free_b
    nblocks = n0 - k0

    # precompute block/bit sums for every generator row x parity row used
    hrows = range(0, nblocks * blk, blk) if dedup else range(nblocks * blk)
    BS = {}
    BB = {}
    for gi in range(k0 - a0):
        for hr in hrows:
            BS[gi, hr], BB[gi, hr] = _block_sums(fld, g_sys[gi], h_punct[hr], gamma)

    def equation(i: int, hr: int) -> Poly:
        poly: Poly = {}

        def put(mono: Tuple[int, ...], coeff: int):
            if coeff:
                poly[mono] = poly.get(mono, 0) ^ coeff

        for gi, umono in [(i, ())] + [(d + l, (shape.u_index(i, l),)) for l in range(c)]:
            bs, bb = BS[gi, hr], BB[gi, hr]
            for bit in pin_bits:
                put(umono, int(bb[bit]))
            for j in free_b:
                put(tuple(sorted(umono + (shape.b_index(j),))), int(bb[j - 1]))
            for m in range(n0p - 1):  # T'_{n0p-1} pinned to 0
                if int(bs[m]) == 0:
                    continue
                if m < d:
                    put(tuple(sorted(umono + (-1 - m,))), int(bs[m]))
                else:
                    put(tuple(sorted(umono + (shape.t_index(m),))), int(bs[m]))
        return poly

    polys: List[Poly] = []
    elim: List[Poly] = [None] * d
    for i in range(d):
        for beta in range(nblocks):
            for hr in ([beta * blk] if dedup else range(beta * blk, (beta + 1) * blk)):
                poly = equation(i, hr)
                # sentinel variables -1-m mark eliminated T'_m (m < d)
                tvars = [v for mono in poly for v in mono if v < 0]
                if beta == a0 + i:
                    assert tvars == [-1 - i] and poly.pop((-1 - i,)) == 1
                    if hr == beta * blk:
                        elim[i] = poly
                else:
                    assert not tvars
                    polys.append(poly)
    return BilinearSystem(fld, shape, polys, elim, g_sys, h_punct)


def specialize(sys_: BilinearSystem, assignment: Dict[int, int]) -> BilinearSystem:
    """Substitute a partial variable assignment into the system."""
    for v in assignment:
        if not 0 <= v < sys_.shape.nvars:
            raise KeyError(f"variable index {v} out of range")
    fld = sys_.field

    def sub_all(p: Poly) -> Poly:
        for v, val in assignment.items():
            p = p_substitute(p, v, {(): val} if val else {}, fld)
        return p

    return BilinearSystem(
        fld,
        sys_.shape,
        [sub_all(p) for p in sys_.polys],
        [sub_all(p) for p in sys_.elim],
        sys_.g_sys,
        sys_.h_punct,
        {**sys_.assigned, **assignment},
    )


# -- value assembly (used by the attack once a solution is known) ------


def full_assignment(sys_: BilinearSystem, solution: Dict[int, int]) -> Dict[int, int]:
    assign = dict(sys_.assigned)
    assign.update(solution)
    return assign


def assemble_v(sys_: BilinearSystem, solution: Dict[int, int]) -> np.ndarray:
    """The punctured quasi-dyadic vector V for a full solution."""
    shape = sys_.shape
    fld = sys_.field
    assign = full_assignment(sys_, solution)
    bvals = dict(shape.pins)
    for j in shape.free_b:
        bvals[j] = assign[shape.b_index(j)]
    tvals = np.zeros(shape.n0p, dtype=np.uint16)
    for m in range(shape.d):
        tvals[m] = p_eval(sys_.elim[m], assign, fld)
    for m in range(shape.d, shape.n0p - 1):
        tvals[m] = assign[shape.t_index(m)]
    blk = 1 << shape.gamma
    v = np.zeros(shape.n0p * blk, dtype=np.uint16)
    for m in range(shape.n0p):
        for pos in range(blk):
            acc = int(tvals[m])
            for j in range(1, shape.gamma + 1):
                if (pos >> (j - 1)) & 1:
                    acc ^= bvals[j]
            v[m * blk + pos] = acc
    return v


def assemble_u(sys_: BilinearSystem, solution: Dict[int, int]) -> np.ndarray:
    shape = sys_.shape
    assign = full_assignment(sys_, solution)
    U = np.zeros((shape.d, shape.c), dtype=np.uint16)
    for i in range(shape.d):
        for l in range(shape.c):
            U[i, l] = assign[shape.u_index(i, l)]
    return U


# -- Macaulay solver ---------------------------------------------------


def _mem_cap_bytes() -> int:
    return int(os.environ.get("DYADIC_MEM_CAP_MB", "8192")) << 20


@dataclass
class SolveOutcome:
    status: str  # "solutions" | "infeasible" | "degree_exceeded"
    maxdeg: int
    rows: int
    cols: int
    branches: List[Dict[int, int]]  # assignments of the enumerated variables
    subs: Dict[int, Poly]  # solved variables, in terms of enumerated/free ones
    free: List[int]
    certificate: Optional[dict] = None

    def stats_line(self) -> str:
        return f"SOLVE maxdeg={self.maxdeg} rows={self.rows} cols={self.cols} outcome={self.status}"


class _Infeasible(Exception):
    def __init__(self, certificate):
        self.certificate = certificate


class _DegreeExceeded(Exception):
    pass


MAX_BRANCH_DEPTH = 8
BRANCH_MAX_VARS = 16


def _shift_monomials(variables: Sequence[int], maxdeg: int) -> List[Tuple[int, ...]]:
    out: List[Tuple[int, ...]] = []
    for t in range(maxdeg + 1):
        out.extend(itertools.combinations_with_replacement(variables, t))
    return out


def _pack_bits(rows: List[Poly], col_of: Dict[Tuple[int, ...], int], ncols: int, s: int):
    words = (ncols + 63) >> 6
    P = np.zeros((len(rows), s, words), dtype=np.uint64)
    for r, poly in enumerate(rows):
        for m, cf in poly.items():
            cidx = col_of[m]
            w, b = cidx >> 6, np.uint64(cidx & 63)
            for l in range(s):
                if (cf >> l) & 1:
                    P[r, l, w] |= np.uint64(1) << b
    return P


def _mul_tables(fld: FieldSpec):
    s, q = fld.s, fld.q
    mulmap = np.zeros((q, s), dtype=np.uint64)
    invtab = np.zeros(q, dtype=np.uint16)
    for a in range(1, q):
        invtab[a] = fld.inv(a)
        for l in range(s):
            prod = fld.mul(a, 1 << l)
            for o in range(s):
                if (prod >> o) & 1:
                    mulmap[a, o] |= np.uint64(1) << np.uint64(l)
    return mulmap, invtab


def macaulay_solve(
    sys_: BilinearSystem, dmax: int = DEFAULT_DMAX, mem_cap: Optional[int] = None
) -> SolveOutcome:
    """Bounded-degree elimination with linear-harvest restarts and
    recursive branching.

    Each level substitutes away every linear relation, then row-reduces
    the Macaulay matrix at degree D <= dmax and harvests the reduced
    rows of degree < D (a nonzero constant row certifies infeasibility).
    New linear relations restart the level; a harvest of higher-degree
    relations triggers a cheap re-expansion at a lower degree where they
    combine with up-shifted originals.  When escalating D the working
    set is pruned back to the original equations, which bounds the peak
    matrix at the core Macaulay size.  A level that exhausts its degree
    budget with few live variables branches on the most constrained one
    and recurses on each specialization; infeasible branches are cut.
    """
    if dmax < 2:
        raise ValueError("dmax must be >= 2")
    fld = sys_.field
    cap = _mem_cap_bytes() if mem_cap is None else mem_cap
    mulmap, invtab = _mul_tables(fld)
    trace = bool(os.environ.get("DYADIC_SOLVE_TRACE"))
    stats = {"maxdeg": 1, "rows": 0, "cols": 0}

    def monic(p: Poly) -> Poly:
        lead = min(p, key=_mono_key)
        return p_scale(p, fld.inv(p[lead]), fld)

    def solve_rec(work_in: Sequence[Poly], depth: int) -> List[Dict[int, int]]:
        """Complete assignments for the constrained variables of work_in."""
        work = [dict(p) for p in work_in if p]
        is_core = [True] * len(work)
        subs: Dict[int, Poly] = {}
        stats["maxdeg"] = max(stats["maxdeg"], max((p_deg(p) for p in work), default=1))

        def substitute(var: int, rep: Poly) -> None:
            subs[var] = rep
            for v in list(subs):
                if v != var:
                    subs[v] = p_substitute(subs[v], var, rep, fld)
            for idx in range(len(work)):
                work[idx] = p_substitute(work[idx], var, rep, fld)

        def reduce_linear() -> None:
            while True:
                idx = next((i for i, p in enumerate(work) if p_deg(p) <= 1), None)
                if idx is None:
                    return
                poly = work.pop(idx)
                is_core.pop(idx)
                if not poly:
                    continue
                if set(poly) == {()}:
                    raise _Infeasible({"kind": "constant", "poly": poly})
                var = min(v for m in poly for v in m)
                coeff = poly[(var,)]
                rest = p_scale(p_add(poly, {(var,): coeff}), fld.inv(coeff), fld)
                substitute(var, rest)

        def start_degree() -> int:
            return max(2, max((p_deg(p) for p in work), default=2))

        def estimate(D: int, nv: int) -> int:
            est_rows = 0
            dict_bytes = 0  # shifted rows live as term dicts before packing
            for p in work:
                shifts = math.comb(nv + D - p_deg(p), D - p_deg(p))
                est_rows += shifts
                dict_bytes += shifts * len(p) * 120
            est_cols = math.comb(nv + D, D)
            return est_rows * fld.s * (((est_cols + 63) >> 6) + 1) * 8 + dict_bytes

        def prune_to_core() -> None:
            keep = [(p, c) for p, c in zip(work, is_core) if c]
            work[:] = [p for p, _ in keep]
            is_core[:] = [c for _, c in keep]

        reduce_linear()
        D = start_degree()
        seen = {frozenset(monic(p).items()) for p in work}
        d_tried = 0
        expansions = 0
        branches: Optional[List[Dict[int, int]]] = None
        while work:
            live = sorted({v for p in work for m in p for v in m})
            if len(live) <= 2:
                break
            expansions += 1
            stuck = D > dmax or expansions > 25
            if not stuck and D > d_tried:
                # escalation: harvested relations are dropped in favour of
                # higher-degree shifts of the originals, bounding memory
                prune_to_core()
                seen = {frozenset(monic(p).items()) for p in work}
            if not stuck:
                est = estimate(D, len(live))
                if est > cap:
                    prune_to_core()
                    seen = {frozenset(monic(p).items()) for p in work}
                    est = estimate(D, len(live))
                if est > cap:
                    raise MemoryCapExceeded(
                        f"Macaulay estimate {est >> 20} MB exceeds cap {cap >> 20} MB at D={D}"
                    )
            if stuck:
                if depth >= MAX_BRANCH_DEPTH or len(live) > BRANCH_MAX_VARS:
                    raise _DegreeExceeded
                occ: Dict[int, int] = {}
                for p in work:
                    for v in {v for m in p for v in m}:
                        occ[v] = occ.get(v, 0) + 1
                var = max(occ, key=lambda v: (occ[v], -v))
                if trace:
                    print(f"[solve] depth={depth} branch on var {var} ({len(live)} live)", flush=True)
                results: List[Dict[int, int]] = []
                for val in range(fld.q):
                    rep = {(): val} if val else {}
                    sub_work = [p_substitute(p, var, rep, fld) for p in work]
                    try:
                        for sol in solve_rec(sub_work, depth + 1):
                            sol[var] = val
                            results.append(sol)
                    except _Infeasible:
                        continue
                if not results:
                    raise _Infeasible({"kind": "branch", "variable": var})
                branches = results
                break
            if trace:
                degs: Dict[int, int] = {}
                for p in work:
                    degs[p_deg(p)] = degs.get(p_deg(p), 0) + 1
                print(f"[solve] depth={depth} D={D} live={len(live)} work={len(work)} degs={degs}", flush=True)
            stats["maxdeg"] = max(stats["maxdeg"], D)
            d_tried = max(d_tried, D)
            rows: List[Poly] = []
            for poly in work:
                for shift in _shift_monomials(live, D - p_deg(poly)):
                    if shift:
                        rows.append({tuple(sorted(m + shift)): cf for m, cf in poly.items()})
                    else:
                        rows.append(poly)
            monos = sorted({m for poly in rows for m in poly}, key=_mono_key)
            col_of = {m: i for i, m in enumerate(monos)}
            ncols = len(monos)
            stats["rows"] = max(stats["rows"], len(rows))
            stats["cols"] = max(stats["cols"], ncols)
            P = _pack_bits(rows, col_of, ncols, fld.s)
            piv = _kernels.echelon_bits(P, ncols, mulmap, invtab, False)
            # harvest echelon rows whose pivot monomial has degree < D
            harvest_idx = [r for r, pc in enumerate(piv) if len(monos[pc]) < D]
            got_linear = False
            max_new_deg = 0
            if harvest_idx:
                dense = _kernels.unpack_rows(P, np.array(harvest_idx, dtype=np.int64), ncols)
                for drow in dense:
                    nz = np.nonzero(drow)[0]
                    poly = {monos[c]: int(drow[c]) for c in nz}
                    if p_deg(poly) == 0:
                        raise _Infeasible({"kind": "constant", "poly": poly, "degree": D})
                    key = frozenset(poly.items())
                    if key in seen:
                        continue
                    seen.add(key)
                    work.append(poly)
                    # linear finds survive the prune below; they are
                    # consumed by the substitution pass right after
                    is_core.append(p_deg(poly) == 1)
                    if p_deg(poly) == 1:
                        got_linear = True
                    else:
                        max_new_deg = max(max_new_deg, p_deg(poly))
            if got_linear:
                # substituting into thousands of harvested rows is dead
                # weight: reduce the originals only and re-derive
                prune_to_core()
                reduce_linear()
                seen = {frozenset(monic(p).items()) for p in work}
                D = start_degree()
            elif max_new_deg and min(p_deg(p) for p in work) < max_new_deg:
                # descend: combine the fresh relations with up-shifted
                # lower-degree ones at a much smaller matrix size
                D = max_new_deg
            else:
                D += 1

        if branches is None:
            # at most two live variables remain: enumerate them directly
            branches = [{}]
            if work:
                live = sorted({v for p in work for m in p for v in m})
                branches = []
                for vals in itertools.product(range(fld.q), repeat=len(live)):
                    assign = dict(zip(live, vals))
                    if all(p_eval(p, assign, fld) == 0 for p in work):
                        branches.append(assign)
                if not branches:
                    raise _Infeasible({"kind": "enumeration", "variables": live})

        # resolve substituted variables per branch; a substitution whose
        # value still depends on an unconstrained variable stays open and
        # is enumerated at extraction time
        out: List[Dict[int, int]] = []
        for br in branches:
            full = dict(br)
            for var, rep in subs.items():
                vs = {v for m in rep for v in m}
                if vs <= full.keys():
                    full[var] = p_eval(rep, full, fld)
            out.append(full)
        return out

    try:
        branches = solve_rec([p for p in sys_.polys], 0)
    except _Infeasible as inf:
        return SolveOutcome(
            "infeasible", stats["maxdeg"], stats["rows"], stats["cols"], [], {}, [], inf.certificate
        )
    except _DegreeExceeded:
        return SolveOutcome("degree_exceeded", stats["maxdeg"], stats["rows"], stats["cols"], [], {}, [])
    constrained = set()
    for br in branches:
        constrained.update(br)
    free = [
        v
        for v in range(sys_.shape.nvars)
        if v not in constrained and v not in sys_.assigned
    ]
    return SolveOutcome("solutions", stats["maxdeg"], stats["rows"], stats["cols"], branches, {}, free)


def extract_solutions(sys_: BilinearSystem, outcome: SolveOutcome) -> List[Dict[int, int]]:
    """Enumerate and re-verify all GF(q)-points of a solved system."""
    if outcome.status != "solutions":
        return []
    fld = sys_.field
    q = fld.q
    nvars = sys_.shape.nvars
    per_branch_free = [
        [v for v in range(nvars) if v not in br and v not in sys_.assigned]
        for br in outcome.branches
    ]
    total = sum(q ** len(free) for free in per_branch_free)
    if total > SOLUTION_CAP:
        raise SolutionSpaceTooLarge(f"{total} candidate points exceed cap {SOLUTION_CAP}")
    points: List[Dict[int, int]] = []
    for br, free in zip(outcome.branches, per_branch_free):
        for vals in itertools.product(range(q), repeat=len(free)):
            assign = dict(br)
            assign.update(zip(free, vals))
            if all(p_eval(p, assign, fld) == 0 for p in sys_.polys):
                points.append(assign)
    return points
