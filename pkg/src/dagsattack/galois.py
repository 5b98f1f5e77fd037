"""Arithmetic in GF(2^s) and its quadratic extension GF(2^(2s)).

Elements are integers whose binary digits are polynomial coefficients
over GF(2) (bit i = coefficient of degree i).  A quadratic extension of
GF(q) is represented on the basis {1, w} where w^2 + a*w + b is
irreducible over GF(q): an element c0 + c1*w is packed as
``c0 | (c1 << s)``.  Addition is therefore plain XOR in both fields.

Multiplication and inversion go through exp/log tables, which also back
the dense linear-algebra kernels.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Tuple

import numpy as np

from .errors import DivisionByZero, FieldMismatch

MAX_S = 16  # largest supported extension degree over GF(2)


def _poly_mulmod(x: int, y: int, modulus: int, deg: int) -> int:
    r = 0
    while y:
        if y & 1:
            r ^= x
        y >>= 1
        x <<= 1
        if x >> deg & 1:
            x ^= modulus
    return r


def is_irreducible(modulus: int, deg: int) -> bool:
    """Exhaustive check that a degree-``deg`` polynomial over GF(2) has no
    factor of degree <= deg//2."""
    if modulus >> deg != 1:
        return False
    for fdeg in range(1, deg // 2 + 1):
        for f in range(1 << fdeg, 1 << (fdeg + 1)):
            # trial division of modulus by f
            r = modulus
            while r.bit_length() - 1 >= fdeg:
                r ^= f << (r.bit_length() - 1 - fdeg)
            if r == 0:
                return False
    return True


@lru_cache(maxsize=None)
def default_modulus(s: int) -> int:
    """Lexicographically-least irreducible polynomial of degree s."""
    for m in range(1 << s, 1 << (s + 1)):
        if is_irreducible(m, s):
            return m
    raise ValueError(f"no irreducible polynomial of degree {s}")


def _build_tables(order: int, mul) -> Tuple[np.ndarray, np.ndarray]:
    """exp/log tables for a field of the given order with multiplication
    callable ``mul``.  exp is doubled so products can skip the modular
    reduction of the log sum.  log[0] is -1 (sentinel)."""
    # find a generator
    n = order - 1
    factors = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            factors.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        factors.append(m)

    def has_order_n(g: int) -> bool:
        for f in factors:
            e = n // f
            acc, base = 1, g
            while e:
                if e & 1:
                    acc = mul(acc, base)
                base = mul(base, base)
                e >>= 1
            if acc == 1:
                return False
        return True

    g = 2
    while not has_order_n(g):
        g += 1
    exp = np.zeros(2 * n, dtype=np.int64)
    log = np.full(order, -1, dtype=np.int64)
    v = 1
    for i in range(n):
        exp[i] = v
        exp[i + n] = v
        log[v] = i
        v = mul(v, g)
    assert v == 1
    return exp, log


class FieldSpec:
    """The field GF(2^s) with a fixed irreducible modulus."""

    def __init__(self, s: int, modulus: int | None = None):
        if not 1 <= s <= MAX_S:
            raise ValueError(f"s must be in [1, {MAX_S}]")
        if modulus is None:
            modulus = default_modulus(s)
        elif not is_irreducible(modulus, s):
            raise ValueError(f"modulus {modulus:#x} is not irreducible of degree {s}")
        self.s = s
        self.modulus = modulus
        self.q = 1 << s
        self.exp, self.log = _build_tables(self.q, lambda a, b: _poly_mulmod(a, b, modulus, s))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of 0")
        return int(self.exp[self.q - 1 - self.log[a]])

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e else 1
        return int(self.exp[(int(self.log[a]) * e) % (self.q - 1)])

    def element(self, value: int) -> "Element":
        return Element(self, value)

    def header(self) -> str:
        return f"GF2E s={self.s} mod={self.modulus:x}"

    def __eq__(self, other):
        return (
            isinstance(other, FieldSpec)
            and not isinstance(other, TowerSpec)
            and not isinstance(self, TowerSpec)
            and self.s == other.s
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((type(self).__name__, self.s, self.modulus))

    def __repr__(self):
        return f"FieldSpec(s={self.s}, modulus={self.modulus:#x})"


class TowerSpec(FieldSpec):
    """GF(q^2) built as GF(q)[w]/(w^2 + a*w + b).

    The representation is always the degree-2 tower over the base so
    that trace and norm down to GF(q) are cheap coordinate formulas.
    By construction ``a != 0`` (i.e. the trace of w is nonzero), which
    later pins the attack's affine gauge unambiguously.
    """

    def __init__(self, base: FieldSpec, a: int | None = None, b: int | None = None):
        self.base = base
        if a is None or b is None:
            a, b = _find_tower_poly(base)
        if a == 0:
            raise ValueError("tower polynomial must have a != 0 (nonzero trace of w)")
        if _has_root(base, a, b):
            raise ValueError("w^2 + a*w + b is reducible over the base field")
        self.a = a
        self.b = b
        s = base.s
        self.s = 2 * s
        self.q = base.q * base.q
        self.modulus = 0  # not a GF(2)[x] quotient; kept for interface parity
        self.omega = base.q  # the element 0 + 1*w

        bq, bmul = base.q, base.mul

        def mul(x: int, y: int) -> int:
            x0, x1 = x & (bq - 1), x >> s
            y0, y1 = y & (bq - 1), y >> s
            t = bmul(x1, y1)
            lo = bmul(x0, y0) ^ bmul(t, b)
            hi = bmul(x0, y1) ^ bmul(x1, y0) ^ bmul(t, a)
            return lo | (hi << s)

        self.exp, self.log = _build_tables(self.q, mul)

    def split(self, x: int) -> Tuple[int, int]:
        return x & (self.base.q - 1), x >> self.base.s

    def join(self, lo: int, hi: int) -> int:
        return lo | (hi << self.base.s)

    def frobenius(self, x: int) -> int:
        """x -> x^q, the nontrivial automorphism over the base field."""
        return self.pow(x, self.base.q)

    def trace(self, x: int) -> int:
        """Trace down to GF(q): x + x^q."""
        return x ^ self.frobenius(x)

    def norm(self, x: int) -> int:
        """Norm down to GF(q): x^(q+1)."""
        return self.pow(x, self.base.q + 1)

    def in_base(self, x: int) -> bool:
        return x >> self.base.s == 0

    def header(self) -> str:
        return f"TOWER a={self.a:x} b={self.b:x}"

    def __eq__(self, other):
        return (
            isinstance(other, TowerSpec)
            and self.base == other.base
            and self.a == other.a
            and self.b == other.b
        )

    def __hash__(self):
        return hash(("TowerSpec", self.base, self.a, self.b))

    def __repr__(self):
        return f"TowerSpec(base=GF(2^{self.base.s}), a={self.a:#x}, b={self.b:#x})"


def _has_root(base: FieldSpec, a: int, b: int) -> bool:
    for z in range(base.q):
        if base.mul(z, z) ^ base.mul(a, z) ^ b == 0:
            return True
    return False


def _find_tower_poly(base: FieldSpec) -> Tuple[int, int]:
    # smallest (a, b) with a >= 1 making w^2 + a*w + b irreducible
    for a in range(1, base.q):
        for b in range(1, base.q):
            if not _has_root(base, a, b):
                return a, b
    raise ValueError("no irreducible quadratic over the base field")


@lru_cache(maxsize=None)
def field(s: int) -> FieldSpec:
    """Canonical GF(2^s) with the default modulus."""
    return FieldSpec(s)


@lru_cache(maxsize=None)
def tower(s: int) -> TowerSpec:
    """Canonical GF(2^(2s)) as a tower over field(s)."""
    return TowerSpec(field(s))


class Element:
    """A field element tagged with its owning field.

    Mixed-field arithmetic raises :class:`FieldMismatch`; it is a
    programming error, not a recoverable condition.
    """

    __slots__ = ("field", "value")

    def __init__(self, fld: FieldSpec, value: int):
        if not 0 <= value < fld.q:
            raise ValueError(f"value {value} out of range for field of order {fld.q}")
        self.field = fld
        self.value = value

    def _check(self, other: "Element") -> None:
        if not isinstance(other, Element) or other.field != self.field:
            raise FieldMismatch(f"{self!r} vs {other!r}")

    def __add__(self, other):
        self._check(other)
        return Element(self.field, self.value ^ other.value)

    __sub__ = __add__  # characteristic 2

    def __mul__(self, other):
        self._check(other)
        return Element(self.field, self.field.mul(self.value, other.value))

    def inv(self) -> "Element":
        return Element(self.field, self.field.inv(self.value))

    def __truediv__(self, other):
        self._check(other)
        return self * other.inv()

    def __pow__(self, e: int):
        return Element(self.field, self.field.pow(self.value, e))

    def __eq__(self, other):
        return isinstance(other, Element) and other.field == self.field and other.value == self.value

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"Element({self.value:#x})"

    def hex(self) -> str:
        return f"{self.value:x}"


def trace_q2_to_q(x: Element) -> Element:
    """Trace from GF(q^2) to GF(q); the result lives in the base field."""
    fld = x.field
    if not isinstance(fld, TowerSpec):
        raise FieldMismatch("trace needs an element of a tower field")
    return Element(fld.base, fld.trace(x.value))


def norm_q2_to_q(x: Element) -> Element:
    """Norm from GF(q^2) to GF(q)."""
    fld = x.field
    if not isinstance(fld, TowerSpec):
        raise FieldMismatch("norm needs an element of a tower field")
    return Element(fld.base, fld.norm(x.value))
