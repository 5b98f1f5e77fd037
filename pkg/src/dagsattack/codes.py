"""Linear-code constructions and operators.

Covers generalized Reed-Solomon and alternant codes over the quadratic
extension, dyadic supports, duals, shortening/puncturing, star
(component-wise) products, invariant codes of quasi-dyadic codes, and
the trace/norm vectors that live in subfield subcodes of RS codes.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .errors import (
    CosetCollision,
    DegenerateGroup,
    InvalidSupport,
    ShapeMismatch,
)
from .galois import FieldSpec, TowerSpec
from .matrix import Mat, star_row


class Code:
    """A length-n linear code held by a generator matrix.

    The basis is canonicalized (rref) on construction, so two Code
    objects compare equal iff they are the same subspace.
    """

    def __init__(self, fld: FieldSpec, gen: Mat):
        if gen.field != fld:
            raise ShapeMismatch("generator field mismatch")
        self.field = fld
        self.gen = gen.row_space()

    @property
    def n(self) -> int:
        return self.gen.cols

    @property
    def k(self) -> int:
        return self.gen.rows

    def parity_check(self) -> Mat:
        """Generator of the dual code."""
        return self.gen.kernel_basis().row_space()

    def dual(self) -> "Code":
        return Code(self.field, self.gen.kernel_basis())

    def contains(self, other: "Code") -> bool:
        stacked = Mat(self.field, np.concatenate([self.gen.data, other.gen.data]))
        return stacked.rank() == self.k

    def __eq__(self, other):
        return isinstance(other, Code) and other.field == self.field and other.gen == self.gen

    def __hash__(self):
        return hash((self.field, self.gen))

    def __repr__(self):
        return f"Code(n={self.n}, k={self.k})"

    def to_text(self) -> str:
        return f"CODE n={self.n} k={self.k} field={self.field.modulus:x}\n" + self.gen.to_text()

    @classmethod
    def from_text(cls, fld: FieldSpec, text: str) -> "Code":
        lines = text.strip().splitlines()
        if not lines[0].startswith("CODE "):
            raise ValueError("not a CODE block")
        return cls(fld, Mat.from_text(fld, "\n".join(lines[1:])))


def _check_support(x: Sequence[int], y: Sequence[int]) -> None:
    if len(set(x)) != len(x):
        raise InvalidSupport("support entries must be pairwise distinct")
    if any(v == 0 for v in y):
        raise InvalidSupport("multipliers must be nonzero")
    if len(x) != len(y):
        raise InvalidSupport("support/multiplier length mismatch")


def grs_generator(fld: FieldSpec, x: Sequence[int], y: Sequence[int], t: int) -> Mat:
    """The t x n matrix (y_j * x_j^i), i = 0..t-1."""
    _check_support(x, y)
    n = len(x)
    if not 1 <= t <= n:
        raise InvalidSupport(f"dimension t={t} out of range for n={n}")
    G = np.zeros((t, n), dtype=np.uint16)
    row = np.array(y, dtype=np.uint16)
    for i in range(t):
        G[i] = row
        if i + 1 < t:
            row = star_row(fld, row, np.array(x, dtype=np.uint16))
    return Mat(fld, G)


def grs_code(fld: FieldSpec, x: Sequence[int], y: Sequence[int], t: int) -> Code:
    return Code(fld, grs_generator(fld, x, y, t))


def rs_code(fld: FieldSpec, x: Sequence[int], t: int) -> Code:
    return grs_code(fld, x, [1] * len(x), t)


def dual_multiplier(fld: FieldSpec, x: Sequence[int], y: Sequence[int]) -> List[int]:
    """y' with (y'_j)^{-1} = y_j * prod_{l != j}(x_l - x_j); the dual of
    GRS_t(x, y) is GRS_{n-t}(x, y')."""
    _check_support(x, y)
    out = []
    for j, xj in enumerate(x):
        acc = y[j]
        for l, xl in enumerate(x):
            if l != j:
                acc = fld.mul(acc, xl ^ xj)
        out.append(fld.inv(acc))
    return out


def alternant_code(tower: TowerSpec, x: Sequence[int], y: Sequence[int], t: int) -> Code:
    """A_t(x, y) over the base field: the subfield subcode of the dual
    GRS code, computed from the 2t parity rows expanded on {1, w}."""
    if t == 0:
        return Code(tower.base, Mat.identity(tower.base, len(x)))
    H = grs_generator(tower, x, y, t)
    Hexp = expand_rows(tower, H.data)
    return Code(tower.base, Mat(tower.base, Hexp).kernel_basis())


def expand_rows(tower: TowerSpec, rows: np.ndarray) -> np.ndarray:
    """Split each GF(q^2) row into its two GF(q) coordinate rows."""
    s = tower.base.s
    lo = rows & (tower.base.q - 1)
    hi = rows >> s
    return np.concatenate([lo, hi]).astype(np.uint16)


def subfield_subcode(code: Code, tower: TowerSpec) -> Code:
    """code ∩ GF(q)^n for a code defined over the tower field."""
    if code.field != tower:
        raise ShapeMismatch("code is not over the given tower field")
    H = code.parity_check()
    Hexp = expand_rows(tower, H.data)
    return Code(tower.base, Mat(tower.base, Hexp).kernel_basis())


@dataclass(frozen=True)
class DyadicSupport:
    """Secret dyadic structure (b, tau, y) with the derived (x, z).

    The support is laid out block-contiguously: block i occupies
    positions i*2^gamma .. (i+1)*2^gamma - 1, ordered by the binary
    expansion of the group (orbit order: position p maps to the group
    element XOR_{l: bit l of p} b_{l+1}).
    """

    tower: TowerSpec
    gamma: int
    b: Tuple[int, ...]
    tau: Tuple[int, ...]
    y: Tuple[int, ...]
    x: np.ndarray = dc_field(compare=False, default=None)
    z: np.ndarray = dc_field(compare=False, default=None)

    @property
    def n0(self) -> int:
        return len(self.tau)

    @property
    def n(self) -> int:
        return len(self.tau) << self.gamma


def group_orbit(b: Sequence[int], gamma: int) -> List[int]:
    """The 2^gamma group elements in orbit (binary-expansion) order."""
    g = []
    for p in range(1 << gamma):
        acc = 0
        for l in range(gamma):
            if (p >> l) & 1:
                acc ^= b[l]
        g.append(acc)
    return g


def dyadic_support(
    tower: TowerSpec, b: Sequence[int], tau: Sequence[int], y: Sequence[int], gamma: int
) -> DyadicSupport:
    if len(b) != gamma:
        raise DegenerateGroup(f"need {gamma} group generators, got {len(b)}")
    g = group_orbit(b, gamma)
    if len(set(g)) != 1 << gamma:
        raise DegenerateGroup("generators are GF(2)-dependent")
    if any(v == 0 for v in y) or len(y) != len(tau):
        raise InvalidSupport("multipliers must be nonzero, one per block")
    n0 = len(tau)
    x = np.zeros(n0 << gamma, dtype=np.uint16)
    z = np.zeros(n0 << gamma, dtype=np.uint16)
    for i, (t, yi) in enumerate(zip(tau, y)):
        base = i << gamma
        for p, gp in enumerate(g):
            x[base + p] = t ^ gp
        z[base : base + (1 << gamma)] = yi
    if len(set(int(v) for v in x)) != len(x):
        raise CosetCollision("cosets tau_i + G are not pairwise disjoint")
    return DyadicSupport(tower, gamma, tuple(b), tuple(tau), tuple(y), x, z)


def star_product(A: Code, B: Code) -> Code:
    """Span of all component-wise products of codewords of A and B.

    Products are folded in with incremental rank updates so the work
    stops as soon as the span saturates.
    """
    if A.field != B.field or A.n != B.n:
        raise ShapeMismatch("star product needs codes of equal length and field")
    fld, n = A.field, A.n
    basis = np.zeros((0, n), dtype=np.uint16)
    rank = 0
    batch: List[np.ndarray] = []

    def flush(basis, rank, batch):
        if not batch:
            return basis, rank
        stacked = np.concatenate([basis] + [np.array(batch)])
        R, piv = Mat(fld, stacked).rref()
        return R.data[: len(piv)].copy(), len(piv)

    for a in A.gen.data:
        for b in B.gen.data:
            batch.append(star_row(fld, a, b))
            if len(batch) >= 4 * max(rank, 32):
                basis, rank = flush(basis, rank, batch)
                batch = []
                if rank == n:
                    return Code(fld, Mat(fld, basis))
    basis, rank = flush(basis, rank, batch)
    return Code(fld, Mat(fld, basis))


def _normalize_indices(I: Iterable[int], n: int) -> List[int]:
    idx = sorted(set(I))
    if idx and (idx[0] < 0 or idx[-1] >= n):
        raise IndexError(f"index set out of range for length {n}")
    return idx


def puncture(C: Code, I: Iterable[int]) -> Code:
    idx = _normalize_indices(I, C.n)
    keep = [j for j in range(C.n) if j not in set(idx)]
    return Code(C.field, Mat(C.field, C.gen.data[:, keep].copy()))


def shorten(C: Code, I: Iterable[int]) -> Code:
    idx = _normalize_indices(I, C.n)
    if not idx:
        return C
    keep = [j for j in range(C.n) if j not in set(idx)]
    sub = Mat(C.field, C.gen.data[:, idx].T.copy())
    K = sub.kernel_basis()  # row combos vanishing on I
    gen = K @ Mat(C.field, C.gen.data)
    return Code(C.field, Mat(C.field, gen.data[:, keep].copy()))


def invariant_code(C: Code, gamma: int) -> Code:
    """Subcode of codewords constant on each dyadic block of size 2^gamma."""
    n = C.n
    blk = 1 << gamma
    if n % blk:
        raise ShapeMismatch(f"length {n} not divisible by block size {blk}")
    G = C.gen.data
    diffs = []
    for start in range(0, n, blk):
        for p in range(1, blk):
            diffs.append(G[:, start + p] ^ G[:, start])
    A = Mat(C.field, np.array(diffs).T.copy() if diffs else np.zeros((G.shape[0], 0)))
    K = A.transpose().kernel_basis()
    gen = K @ Mat(C.field, G)
    return Code(C.field, gen)


def block_compress(data: np.ndarray, gamma: int) -> np.ndarray:
    """One column per dyadic block (first position of each block)."""
    return data[:, :: 1 << gamma].copy()


def block_expand(data: np.ndarray, gamma: int) -> np.ndarray:
    return np.repeat(data, 1 << gamma, axis=1)


def trace_norm_vectors(
    x: Sequence[int] | np.ndarray, tower: TowerSpec
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(1_n, tr(x), tr(w*x), nr(x)) as vectors over the base field."""
    xs = [int(v) for v in x]
    ones = np.ones(len(xs), dtype=np.uint16)
    tr = np.array([tower.trace(v) for v in xs], dtype=np.uint16)
    trw = np.array([tower.trace(tower.mul(tower.omega, v)) for v in xs], dtype=np.uint16)
    nr = np.array([tower.norm(v) for v in xs], dtype=np.uint16)
    return ones, tr, trw, nr


def lift_from_traces(tower: TowerSpec, tr_x: np.ndarray, tr_wx: np.ndarray) -> np.ndarray:
    """Invert (tr(x), tr(w*x)) -> x via x = (w^q - w)^{-1} (w^q tr(x) - tr(w*x))."""
    w = tower.omega
    wq = tower.frobenius(w)
    coef = tower.inv(wq ^ w)
    out = np.zeros(len(tr_x), dtype=np.uint16)
    for j in range(len(tr_x)):
        out[j] = tower.mul(coef, tower.mul(wq, int(tr_x[j])) ^ int(tr_wx[j]))
    return out
