"""Algebraic key recovery for quasi-dyadic alternant (DAGS-style) KEM keys.

The pipeline models the hidden invariant subcode of a public key as a
bilinear polynomial system, solves it by bounded-degree Macaulay
elimination, and rebuilds an equivalent secret support/multiplier pair
by linear algebra.  See the ``cli`` module for the command-line entry
points.
"""

from .attack import (
    AttackConfig,
    AttackReport,
    estimate_workfactor,
    hybrid_attack,
    run_direct,
)
from .codes import Code, DyadicSupport, alternant_code, grs_code
from .dags import KeyPair, ParamSet, keygen, key_equivalent, load_key, preset, preset_names, save_key
from .galois import Element, FieldSpec, TowerSpec, field, tower
from .matrix import Mat
from .polysolve import BilinearSystem, Counts, build_system, count_system, macaulay_solve

__version__ = "0.1.0"

__all__ = [
    "AttackConfig",
    "AttackReport",
    "BilinearSystem",
    "Code",
    "Counts",
    "DyadicSupport",
    "Element",
    "FieldSpec",
    "KeyPair",
    "Mat",
    "ParamSet",
    "TowerSpec",
    "alternant_code",
    "build_system",
    "count_system",
    "estimate_workfactor",
    "field",
    "grs_code",
    "hybrid_attack",
    "key_equivalent",
    "keygen",
    "load_key",
    "macaulay_solve",
    "preset",
    "preset_names",
    "run_direct",
    "save_key",
    "tower",
    "__version__",
]
