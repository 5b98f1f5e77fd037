"""Command-line front door: key generation, direct and hybrid attacks,
system-shape statistics, work-factor estimation, the benchmark harness,
and an embedded self-test.

Exit codes: 0 success, 2 usage error, 3 attack failure, 4 resource cap.
"""

from __future__ import annotations

import argparse
import csv
import secrets
import statistics
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import attack, codes, dags, galois, polysolve
from .dags import KeyPair, ParamSet
from .errors import DagsAttackError, MemoryCapExceeded, NonexistentD, UnknownPreset
from .matrix import Mat

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ATTACK_FAILED = 3
EXIT_RESOURCE_CAP = 4

_DAGS_SCALE = {"DAGS-1", "DAGS-3", "DAGS-5", "DAGS-1.1", "DAGS-3.1", "DAGS-5.1"}


class _UsageError(Exception):
    pass


def _parse_params(spec: str) -> ParamSet:
    try:
        s, gamma, n0, r0 = (int(tok) for tok in spec.split(","))
    except ValueError:
        raise _UsageError("--params wants s,gamma,n0,r0") from None
    return ParamSet(f"custom-{spec}", s, gamma, n0, n0 - 2 * r0, r0)


def _resolve_params(args) -> ParamSet:
    if getattr(args, "params", None):
        return _parse_params(args.params)
    if getattr(args, "preset", None):
        return dags.preset(args.preset)
    raise _UsageError("need --preset or --params")


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return int(args.seed, 16)
    seed = secrets.randbits(48)
    print(f"seed = {seed:x} (randomized)")
    return seed


def _load_or_generate_key(args, p: Optional[ParamSet], seed: int) -> KeyPair:
    if getattr(args, "key", None):
        key = dags.load_key(Path(args.key).read_text())
        return key
    if p is None:
        raise _UsageError("need --key, --preset, or --params")
    return dags.keygen(p, seed)


def _write_or_print(out: Optional[str], text: str) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- subcommands --------------------------------------------------------


def cmd_keygen(args) -> int:
    p = _resolve_params(args)
    seed = _resolve_seed(args)
    key = dags.keygen(p, seed)
    _write_or_print(args.out, dags.save_key(key))
    return EXIT_OK


def _attack_config(args, hybrid: bool) -> attack.AttackConfig:
    return attack.AttackConfig(
        a0=args.a0,
        dmax=args.dmax,
        hybrid=hybrid,
        guess_width=getattr(args, "guess_width", 0) or 0,
        seed=args.seed_int,
        jobs=args.jobs,
    )


def _run_attack(args, hybrid: bool) -> int:
    seed = _resolve_seed(args)
    args.seed_int = seed
    p = None
    if getattr(args, "preset", None) or getattr(args, "params", None):
        p = _resolve_params(args)
    key = _load_or_generate_key(args, p, seed)
    p = key.params
    _gate_scale(args, [p.name])
    cfg = _attack_config(args, hybrid)
    try:
        report = attack.hybrid_attack(key, p, cfg) if hybrid else attack.run_direct(key, p, cfg)
    except MemoryCapExceeded as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE_CAP
    except DagsAttackError as exc:
        print(f"attack failed: {exc}", file=sys.stderr)
        return EXIT_ATTACK_FAILED
    _write_or_print(args.out, report.to_text())
    return EXIT_OK if report.outcome == "success" else EXIT_ATTACK_FAILED


def cmd_attack(args) -> int:
    return _run_attack(args, hybrid=False)


def cmd_hybrid(args) -> int:
    return _run_attack(args, hybrid=True)


def cmd_stats(args) -> int:
    p = _resolve_params(args)
    if p.dim_d <= 0:
        print(f"{p.name}: the searched subcode does not exist (c = {p.c} >= k0 = {p.k0})")
        return EXIT_OK
    if args.a0 is None:
        a0_list = list(range(p.k0 - p.c + 1))
    elif args.a0 == -1:  # "max"
        a0_list = [p.k0 - p.c]
    else:
        a0_list = [args.a0]
    rows = [("a0", "dim", "Var.", "Eq.", "Ratio", "note")]
    for a0 in a0_list:
        cnt = polysolve.count_system(p, a0)
        note = "underdetermined" if 0 < cnt.ratio < 1 else ""
        ratio = f"{cnt.ratio:.1f}" if cnt.nvars else "-"
        rows.append((str(a0), str(p.k0 - p.c - a0), str(cnt.nvars), str(cnt.quadratic), ratio, note))
    _emit_table(rows, args.csv)
    return EXIT_OK


def cmd_estimate(args) -> int:
    p = _resolve_params(args)
    log2 = attack.estimate_workfactor(
        p,
        strategy=args.strategy,
        a0=args.a0 or 0,
        guessed_vars=args.guessed,
        false_log2=args.false_log2,
        true_log2=args.true_log2,
    )
    print(f"{p.name} {args.strategy}: 2^{log2:.2f} operations")
    return EXIT_OK


def _gate_scale(args, names: Sequence[str]) -> None:
    blocked = [n for n in names if n in _DAGS_SCALE]
    if blocked and not getattr(args, "i_have_time", False):
        raise _UsageError(
            f"{', '.join(blocked)} needs large memory and hours of CPU; "
            "pass --i-have-time to run anyway"
        )


def cmd_bench(args) -> int:
    if not args.preset:
        raise _UsageError("bench wants at least one --preset")
    _gate_scale(args, args.preset)
    seed0 = _resolve_seed(args)
    outdir = Path(args.out) if args.out else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    rows = [("preset", "runs", "success", "med.deg", "med.groebner_s", "med.linalg_s")]
    for name in args.preset:
        p = dags.preset(name)
        reports = []
        for i in range(args.runs):
            key = dags.keygen(p, seed0 + i)
            cfg = attack.AttackConfig(a0=args.a0, dmax=args.dmax, seed=seed0 + i, jobs=args.jobs)
            try:
                rep = attack.run_direct(key, p, cfg)
            except DagsAttackError as exc:
                rep = attack.AttackReport("failure", reason=str(exc))
            reports.append(rep)
            if outdir:
                (outdir / f"{name}-{seed0 + i:x}.report").write_text(rep.to_text())
        ok = [r for r in reports if r.outcome == "success"]
        rows.append(
            (
                name,
                str(len(reports)),
                f"{len(ok)}/{len(reports)}",
                str(statistics.median(r.maxdeg for r in reports)) if reports else "-",
                f"{statistics.median(r.groebner_cycles for r in reports) / 1e9:.1f}",
                f"{statistics.median(r.linalg_cycles for r in reports) / 1e9:.1f}",
            )
        )
    _emit_table(rows, args.csv)
    return EXIT_OK


def _emit_table(rows: List[tuple], csv_path: Optional[str]) -> None:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for r in rows:
        print("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            csv.writer(fh).writerows(rows)


def cmd_selftest(args) -> int:
    failures: List[str] = []

    def check(name: str, cond: bool) -> None:
        if not cond:
            failures.append(name)
        print(f"  {'ok' if cond else 'FAIL'}  {name}")

    import random as _random

    rng = _random.Random(0xDA65)

    fld = galois.FieldSpec(5)
    if args.fault_injection:
        fld.exp = fld.exp.copy()
        fld.exp[3] ^= 1  # deliberate table corruption: the checks must fail
    ok = True
    for _ in range(200):
        a, b, c = (rng.randrange(fld.q) for _ in range(3))
        ok &= fld.mul(a, fld.mul(b, c)) == fld.mul(fld.mul(a, b), c)
        ok &= fld.mul(a, b ^ c) == (fld.mul(a, b) ^ fld.mul(a, c))
        if a:
            ok &= fld.mul(a, fld.inv(a)) == 1
    check("field axioms GF(2^5)", ok)

    tw = galois.tower(4)
    ok = all(tw.in_base(tw.trace(x)) and tw.in_base(tw.norm(x)) for x in range(tw.q))
    check("trace and norm land in the base field", ok)

    p = dags.preset("DESK-A")
    key = dags.keygen(p, 7)
    inv = codes.invariant_code(key.public_code(), p.gamma)
    check("invariant code of a quasi-dyadic key has dimension k0", inv.k == p.k0)

    tw = p.tower()
    x = [int(v) for v in key.secret.x[:20]]
    z = [int(v) for v in key.secret.z[:20]]
    zz = [tw.mul(v, v) for v in z]
    st = codes.star_product(codes.grs_code(tw, x, z, 5), codes.grs_code(tw, x, z, 6))
    check("star product of GRS codes is GRS", st == codes.grs_code(tw, x, zz, 10))

    y = codes.dual_multiplier(tw, x, z)
    dual = codes.grs_code(tw, x, z, 8).dual()
    check("dual of GRS is GRS with the reciprocal multiplier", dual == codes.grs_code(tw, x, y, 12))

    cnt = polysolve.count_system(dags.preset("DAGS-1"), 0)
    check("bilinear system shape", (cnt.nvars, cnt.quadratic) == (119, 550))

    ov = polysolve.orbit_vector(["b1", "b2"])
    check("group orbit expansion order", ov == [(), ("b1",), ("b2",), ("b1", "b2")])

    print("selftest:", "pass" if not failures else f"FAIL ({', '.join(failures)})")
    return EXIT_OK if not failures else 1


# -- parser -------------------------------------------------------------


def _add_common(sp, key_flag=False, guess=False):
    sp.add_argument("--preset", help="named parameter set", default=None)
    sp.add_argument("--params", help="custom parameters s,gamma,n0,r0", default=None)
    sp.add_argument("--seed", help="hex seed (default: randomized, printed)", default=None)
    sp.add_argument("--a0", type=int, default=None, help="number of shortened dyadic blocks")
    sp.add_argument("--dmax", type=int, default=polysolve.DEFAULT_DMAX)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out", default=None, help="output file (default: stdout)")
    sp.add_argument("--csv", default=None, help="also dump tables as CSV")
    if key_flag:
        sp.add_argument("--key", default=None, help="key file (instead of generating)")
    if guess:
        sp.add_argument("--guess-width", type=int, default=None, dest="guess_width")
    sp.add_argument("--i-have-time", action="store_true", dest="i_have_time",
                    help="allow full DAGS-scale runs (hours of CPU, tens of GB)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dagsattack", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("keygen", help="generate a quasi-dyadic alternant key pair")
    _add_common(sp)
    sp.set_defaults(func=cmd_keygen)

    sp = sub.add_parser("attack", help="direct algebraic key recovery")
    _add_common(sp, key_flag=True)
    sp.set_defaults(func=cmd_attack)

    sp = sub.add_parser("hybrid", help="guess-and-solve key recovery")
    _add_common(sp, key_flag=True, guess=True)
    sp.set_defaults(func=cmd_hybrid)

    sp = sub.add_parser("stats", help="bilinear system shapes per shortening level")
    _add_common(sp)
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("estimate", help="work-factor estimates")
    _add_common(sp)
    sp.add_argument("--strategy", choices=["linear", "hybrid", "direct"], default="linear")
    sp.add_argument("--guessed", type=int, default=None, help="number of guessed variables")
    sp.add_argument("--false-log2", type=float, default=None, dest="false_log2")
    sp.add_argument("--true-log2", type=float, default=None, dest="true_log2")
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("bench", help="multi-run attack harness with aggregate table")
    _add_common(sp)
    sp.add_argument("--runs", type=int, default=10)
    sp.set_defaults(func=cmd_bench)
    # bench takes a repeatable preset list
    for act in sp._actions:
        if act.dest == "preset":
            act.nargs = "*"
            act.default = []

    sp = sub.add_parser("selftest", help="run the embedded invariant checks")
    sp.add_argument("--fault-injection", action="store_true", dest="fault_injection",
                    help="corrupt a field table to prove the checks can fail")
    sp.set_defaults(func=cmd_selftest)

    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UnknownPreset, NonexistentD, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
