"""Numba-compiled inner loops for dense GF(2^s) linear algebra.

Two families of kernels:

* exp/log-table elimination and multiplication on uint16 matrices,
  usable for any field order up to 2^16 (including the tower fields);
* bit-sliced elimination for the Macaulay solver, where a row over
  GF(2^s) is stored as s packed uint64 bit planes.  Row updates become
  plane XORs, which is what makes desk-scale solving fast on one core.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def rref_inplace(M, expt, logt, reduced):
    """Row-reduce M in place (first-nonzero pivoting, canonical result).

    Returns the pivot column array.  ``reduced=False`` stops at row
    echelon form (enough for rank/pivot questions, half the work).
    """
    rows, cols = M.shape
    n1 = expt.shape[0] // 2
    piv = np.empty(min(rows, cols), np.int64)
    r = 0
    for c in range(cols):
        p = -1
        for i in range(r, rows):
            if M[i, c] != 0:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for j in range(c, cols):
                t = M[p, j]
                M[p, j] = M[r, j]
                M[r, j] = t
        lv = logt[M[r, c]]
        if lv != 0:
            li = n1 - lv
            for j in range(c, cols):
                v = M[r, j]
                if v != 0:
                    M[r, j] = expt[li + logt[v]]
        lo = 0 if reduced else r + 1
        for i in range(lo, rows):
            if i == r:
                continue
            f = M[i, c]
            if f == 0:
                continue
            lf = logt[f]
            M[i, c] = 0
            for j in range(c + 1, cols):
                v = M[r, j]
                if v != 0:
                    M[i, j] ^= expt[lf + logt[v]]
        piv[r] = c
        r += 1
        if r == rows:
            break
    return piv[:r]


@njit(cache=True)
def matmul(A, B, expt, logt):
    n, m = A.shape
    k = B.shape[1]
    C = np.zeros((n, k), dtype=A.dtype)
    for i in range(n):
        for j in range(m):
            a = A[i, j]
            if a == 0:
                continue
            la = logt[a]
            for t in range(k):
                v = B[j, t]
                if v != 0:
                    C[i, t] ^= expt[la + logt[v]]
    return C


@njit(cache=True)
def mulvec(a, b, expt, logt):
    """Component-wise product of two vectors."""
    n = a.shape[0]
    out = np.zeros(n, dtype=a.dtype)
    for i in range(n):
        x = a[i]
        y = b[i]
        if x != 0 and y != 0:
            out[i] = expt[logt[x] + logt[y]]
    return out


@njit(cache=True)
def unpack_rows(P, idx, ncols):
    """Densify selected rows of a bit-sliced matrix back to uint16."""
    s = P.shape[1]
    out = np.zeros((idx.shape[0], ncols), np.uint16)
    one = np.uint64(1)
    for t in range(idx.shape[0]):
        r = idx[t]
        for c in range(ncols):
            w = c >> 6
            b = np.uint64(c & 63)
            v = 0
            for l in range(s):
                v |= int((P[r, l, w] >> b) & one) << l
            out[t, c] = v
    return out


@njit(cache=True)
def echelon_bits(P, ncols, mulmap, invtab, reduced):
    """Bit-sliced Gaussian elimination over GF(2^s).

    P has shape (rows, s, words); column c lives at word c>>6, bit c&63.
    mulmap[a][o] is a bitmask over input planes l such that plane l of x
    contributes to plane o of a*x.  Returns the pivot column array.
    """
    R, s, W = P.shape
    q = mulmap.shape[0]
    prod = np.zeros((q, s, W), np.uint64)
    have = np.zeros(q, np.uint8)
    tmp = np.zeros((s, W), np.uint64)
    piv = np.empty(min(R, ncols), np.int64)
    r = 0
    for c in range(ncols):
        w = c >> 6
        bpos = np.uint64(c & 63)
        one = np.uint64(1)
        p = -1
        v = 0
        for i in range(r, R):
            vi = 0
            for l in range(s):
                vi |= int((P[i, l, w] >> bpos) & one) << l
            if vi != 0:
                p = i
                v = vi
                break
        if p < 0:
            continue
        if p != r:
            for l in range(s):
                for j in range(W):
                    t = P[p, l, j]
                    P[p, l, j] = P[r, l, j]
                    P[r, l, j] = t
        if v != 1:
            fi = invtab[v]
            for o in range(s):
                mask = mulmap[fi, o]
                for j in range(w, W):
                    acc = np.uint64(0)
                    for l in range(s):
                        if (mask >> l) & 1:
                            acc ^= P[r, l, j]
                    tmp[o, j] = acc
            for o in range(s):
                for j in range(w, W):
                    P[r, o, j] = tmp[o, j]
        for i in range(q):
            have[i] = 0
        lo = 0 if reduced else r + 1
        for i in range(lo, R):
            if i == r:
                continue
            f = 0
            for l in range(s):
                f |= int((P[i, l, w] >> bpos) & one) << l
            if f == 0:
                continue
            if have[f] == 0:
                for o in range(s):
                    mask = mulmap[f, o]
                    for j in range(w, W):
                        acc = np.uint64(0)
                        for l in range(s):
                            if (mask >> l) & 1:
                                acc ^= P[r, l, j]
                        prod[f, o, j] = acc
                have[f] = 1
            for o in range(s):
                for j in range(w, W):
                    P[i, o, j] ^= prod[f, o, j]
        piv[r] = c
        r += 1
        if r == R:
            break
    return piv[:r]
