"""Dense linear algebra over GF(2^s) fields (base and tower).

Matrices are value-semantic wrappers around uint16 numpy arrays; all
operations are pure and return fresh matrices.  Pivoting is always
"first nonzero, left to right", so rref output is canonical and
deterministic.
"""

from __future__ import annotations

from typing import List, Tuple

import numpy as np

from . import _kernels
from .errors import RankDeficient, ShapeMismatch
from .galois import FieldSpec

_DTYPE = np.uint16


class Mat:
    """A rows x cols matrix over a fixed field."""

    def __init__(self, field: FieldSpec, data: np.ndarray):
        data = np.ascontiguousarray(data, dtype=_DTYPE)
        if data.ndim != 2:
            raise ShapeMismatch("matrix data must be 2-dimensional")
        self.field = field
        self.data = data

    # -- constructors ------------------------------------------------

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "Mat":
        return cls(field, np.zeros((rows, cols), dtype=_DTYPE))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Mat":
        return cls(field, np.eye(n, dtype=_DTYPE))

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: List[List[int]]) -> "Mat":
        return cls(field, np.array(rows, dtype=_DTYPE))

    # -- basics ------------------------------------------------------

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def copy(self) -> "Mat":
        return Mat(self.field, self.data.copy())

    def transpose(self) -> "Mat":
        return Mat(self.field, self.data.T.copy())

    def __eq__(self, other):
        return (
            isinstance(other, Mat)
            and other.field == self.field
            and other.data.shape == self.data.shape
            and bool(np.array_equal(other.data, self.data))
        )

    def __hash__(self):
        return hash((self.field, self.data.tobytes(), self.data.shape))

    def __repr__(self):
        return f"Mat({self.rows}x{self.cols} over {self.field!r})"

    def _check_field(self, other: "Mat") -> None:
        if other.field != self.field:
            raise ShapeMismatch("matrices over different fields")

    def __add__(self, other: "Mat") -> "Mat":
        self._check_field(other)
        if other.data.shape != self.data.shape:
            raise ShapeMismatch("shape mismatch in addition")
        return Mat(self.field, self.data ^ other.data)

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check_field(other)
        if self.cols != other.rows:
            raise ShapeMismatch(f"{self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        out = _kernels.matmul(self.data, other.data, self.field.exp, self.field.log)
        return Mat(self.field, out)

    def scale(self, a: int) -> "Mat":
        fld = self.field
        out = self.data.copy()
        nz = out != 0
        if a == 0:
            return Mat(fld, np.zeros_like(out))
        out[nz] = fld.exp[fld.log[out[nz]] + fld.log[a]]
        return Mat(fld, out)

    # -- elimination -------------------------------------------------

    def rref(self) -> Tuple["Mat", List[int]]:
        """Unique reduced row echelon form and its pivot columns."""
        M = self.data.copy()
        piv = _kernels.rref_inplace(M, self.field.exp, self.field.log, True)
        return Mat(self.field, M), [int(c) for c in piv]

    def echelon(self) -> Tuple["Mat", List[int]]:
        """Row echelon form (not reduced); same pivots as rref."""
        M = self.data.copy()
        piv = _kernels.rref_inplace(M, self.field.exp, self.field.log, False)
        return Mat(self.field, M), [int(c) for c in piv]

    def rank(self) -> int:
        return len(self.echelon()[1])

    def row_space(self) -> "Mat":
        """Canonical basis of the row space (nonzero rows of the rref)."""
        R, piv = self.rref()
        return Mat(self.field, R.data[: len(piv)].copy())

    def kernel_basis(self) -> "Mat":
        """Rows form a basis of the right kernel: self @ basis.T = 0."""
        R, piv = self.rref()
        n = self.cols
        pivset = set(piv)
        free = [c for c in range(n) if c not in pivset]
        basis = np.zeros((len(free), n), dtype=_DTYPE)
        for idx, fc in enumerate(free):
            basis[idx, fc] = 1
            for r, pc in enumerate(piv):
                basis[idx, pc] = R.data[r, fc]  # -v = v in characteristic 2
        return Mat(self.field, basis)

    def systematic_form(self) -> Tuple["Mat", bool]:
        """Reduce to [I | A]; flag is False when the leading minor is
        singular.  Raises RankDeficient for rank-deficient input."""
        R, piv = self.rref()
        if len(piv) < self.rows:
            raise RankDeficient(f"rank {len(piv)} < rows {self.rows}")
        ok = piv == list(range(self.rows))
        return R, ok

    def solve_right(self, rhs: "Mat") -> "Mat | None":
        """One solution X of self @ X = rhs, or None when infeasible."""
        self._check_field(rhs)
        if rhs.rows != self.rows:
            raise ShapeMismatch("rhs row count mismatch")
        aug = np.concatenate([self.data, rhs.data], axis=1)
        R, piv = Mat(self.field, aug).rref()
        n = self.cols
        if any(p >= n for p in piv):
            return None
        X = np.zeros((n, rhs.cols), dtype=_DTYPE)
        for r, pc in enumerate(piv):
            X[pc, :] = R.data[r, n:]
        return Mat(self.field, X)

    # -- serialization -----------------------------------------------

    def to_text(self) -> str:
        lines = [f"MAT {self.rows} {self.cols}"]
        for row in self.data:
            lines.append(" ".join(f"{int(v):x}" for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, field: FieldSpec, text: str) -> "Mat":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        head = lines[0].split()
        if head[0] != "MAT":
            raise ValueError("not a MAT block")
        rows, cols = int(head[1]), int(head[2])
        data = np.zeros((rows, cols), dtype=_DTYPE)
        for i in range(rows):
            vals = lines[1 + i].split()
            if len(vals) != cols:
                raise ValueError(f"row {i} has {len(vals)} entries, expected {cols}")
            data[i] = [int(v, 16) for v in vals]
        return cls(field, data)


def star_row(field: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Component-wise product of two row vectors."""
    return _kernels.mulvec(
        np.ascontiguousarray(a, dtype=_DTYPE),
        np.ascontiguousarray(b, dtype=_DTYPE),
        field.exp,
        field.log,
    )
