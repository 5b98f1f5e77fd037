"""DAGS-style quasi-dyadic alternant key generation and key handling.

The KEM itself (encapsulation, decoding) is out of scope; only the key
structure matters here.  Keys are generated by this artifact's own
seeded sampler -- the attack consumes nothing but the row space of the
public parity-check matrix, which is representation-independent.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import codes
from .codes import Code, DyadicSupport
from .errors import SamplingExhausted, SystematicFormFailure, UnknownPreset
from .galois import TowerSpec, tower
from .matrix import Mat


@dataclass(frozen=True)
class ParamSet:
    """One row of the parameter table (m = 2 always)."""

    name: str
    s: int
    gamma: int
    n0: int
    k0: int
    r0: int

    def __post_init__(self):
        if self.k0 != self.n0 - 2 * self.r0:
            raise ValueError(f"{self.name}: k0 must equal n0 - 2*r0")
        if self.n > self.q * self.q:
            raise ValueError(f"{self.name}: support does not fit in GF(q^2)")
        if self.gamma < 1 or self.gamma - 1 > self.s:
            raise ValueError(f"{self.name}: c = q/2^(gamma-1) must be a positive integer")

    @property
    def q(self) -> int:
        return 1 << self.s

    @property
    def n(self) -> int:
        return self.n0 << self.gamma

    @property
    def k(self) -> int:
        return self.k0 << self.gamma

    @property
    def r(self) -> int:
        return self.r0 << self.gamma

    @property
    def c(self) -> int:
        # m * q^(m-1) / 2^gamma with m = 2
        return self.q >> (self.gamma - 1)

    @property
    def dim_d(self) -> int:
        """Dimension of the searched invariant subcode; may be <= 0 for
        parameter sets where the direct attack does not apply."""
        return self.k0 - self.c

    def tower(self) -> TowerSpec:
        return tower(self.s)


_PRESETS: Dict[str, ParamSet] = {
    p.name: p
    for p in [
        ParamSet("DAGS-1", 5, 4, 52, 26, 13),
        ParamSet("DAGS-3", 6, 5, 38, 16, 11),
        ParamSet("DAGS-5", 6, 6, 33, 11, 11),
        ParamSet("DAGS-1.1", 6, 4, 52, 26, 13),
        ParamSet("DAGS-3.1", 8, 5, 38, 16, 11),
        ParamSet("DAGS-5.1", 8, 5, 50, 28, 11),
        # Desk-scale presets: same invariants, sized for minutes not days.
        ParamSet("DESK-A", 4, 3, 30, 10, 10),
        ParamSet("DESK-B", 5, 2, 40, 20, 10),
        ParamSet("DESK-C", 4, 2, 30, 12, 9),
    ]
}


def preset(name: str) -> ParamSet:
    try:
        return _PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; known: {sorted(_PRESETS)}") from None


def preset_names() -> List[str]:
    return list(_PRESETS)


@dataclass
class KeyPair:
    params: ParamSet
    secret: DyadicSupport
    h_pub: Mat  # (n-k) x n parity check over GF(q), systematic quasi-dyadic
    seed: int

    def public_code(self) -> Code:
        return Code(self.params.tower().base, self.h_pub.kernel_basis())


def _coset_representatives(tw: TowerSpec, b: Sequence[int], gamma: int) -> List[int]:
    orbit = codes.group_orbit(b, gamma)
    reps = []
    seen = set()
    for v in range(tw.q):
        if v in seen:
            continue
        coset = [v ^ g for g in orbit]
        seen.update(coset)
        reps.append(min(coset))
    return reps


def _sample_group(rng: random.Random, tw: TowerSpec, gamma: int) -> List[int]:
    for _ in range(1000):
        b = [rng.randrange(1, tw.q) for _ in range(gamma)]
        if len(set(codes.group_orbit(b, gamma))) == 1 << gamma:
            return b
    raise SamplingExhausted("could not sample GF(2)-independent group generators")


def keygen(p: ParamSet, seed: int) -> KeyPair:
    """Deterministic key generation: same seed, byte-identical key."""
    rng = random.Random(seed)
    tw = p.tower()
    blk = 1 << p.gamma
    for _ in range(50):
        b = _sample_group(rng, tw, p.gamma)
        reps = _coset_representatives(tw, b, p.gamma)
        if len(reps) < p.n0:
            continue  # cannot happen for valid params (n <= q^2)
        tau = rng.sample(reps, p.n0)
        y = [rng.randrange(1, tw.q) for _ in range(p.n0)]
        support = codes.dyadic_support(tw, b, tau, y, p.gamma)
        pub = codes.alternant_code(tw, list(support.x), list(support.z), p.r)
        if pub.k != p.k:
            continue  # non-generic support; resample
        # retry dyadic-block column permutations until H_pub is systematic
        order = list(range(p.n0))
        for _ in range(50):
            cols = np.concatenate([np.arange(i * blk, (i + 1) * blk) for i in order])
            gen = Mat(tw.base, pub.gen.data[:, cols].copy())
            h = gen.kernel_basis()
            hr, piv = h.rref()
            if piv == list(range(p.n - p.k)):
                tau_p = [tau[i] for i in order]
                y_p = [y[i] for i in order]
                secret = codes.dyadic_support(tw, b, tau_p, y_p, p.gamma)
                return KeyPair(p, secret, Mat(tw.base, hr.data[: p.n - p.k].copy()), seed)
            rng.shuffle(order)
    raise SystematicFormFailure("no systematic quasi-dyadic form reached")


def key_equivalent(recovered: Tuple[Sequence[int], Sequence[int]], key: KeyPair) -> bool:
    """True iff A_r(recovered x, recovered z) is exactly the public code.

    Equality of codes, not of triples: supports related by an affine map
    define the same code, so any gauge representative is accepted.
    """
    x, z = recovered
    p = key.params
    if len(set(int(v) for v in x)) != p.n or any(int(v) == 0 for v in z):
        return False
    cand = codes.alternant_code(p.tower(), [int(v) for v in x], [int(v) for v in z], p.r)
    return cand == key.public_code()


# -- key files --------------------------------------------------------


def _hexlist(vals: Sequence[int]) -> str:
    return " ".join(f"{int(v):x}" for v in vals)


def save_key(key: KeyPair) -> str:
    p = key.params
    s = key.secret
    lines = [
        f"PARAMS name={p.name} s={p.s} gamma={p.gamma} n0={p.n0} r0={p.r0}",
        f"SEED {key.seed:x}",
        f"B {_hexlist(s.b)}",
        f"TAU {_hexlist(s.tau)}",
        f"Y {_hexlist(s.y)}",
        f"CODE n={p.n} k={p.k} field={p.tower().base.modulus:x}",
    ]
    return "\n".join(lines) + "\n" + key.h_pub.to_text()


def load_key(text: str) -> KeyPair:
    lines = text.strip().splitlines()
    fields = dict(tok.split("=") for tok in lines[0].split()[1:])
    n0, r0 = int(fields["n0"]), int(fields["r0"])
    p = ParamSet(fields["name"], int(fields["s"]), int(fields["gamma"]), n0, n0 - 2 * r0, r0)
    known = preset(p.name) if p.name in _PRESETS else None
    if known is not None and known != p:
        raise ValueError(f"key file parameters disagree with preset {p.name}")
    seed = int(lines[1].split()[1], 16)
    b = [int(v, 16) for v in lines[2].split()[1:]]
    tau = [int(v, 16) for v in lines[3].split()[1:]]
    y = [int(v, 16) for v in lines[4].split()[1:]]
    tw = p.tower()
    secret = codes.dyadic_support(tw, b, tau, y, p.gamma)
    h = Mat.from_text(tw.base, "\n".join(lines[6:]))
    return KeyPair(p, secret, h, seed)
