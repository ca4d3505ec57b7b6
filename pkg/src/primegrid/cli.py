"""Command-line front end.

Subcommands: gen-params, build-seq, verify, ops-test, simulate, export.
Exit status: 0 success, 1 a check failed (including parameter infeasibility),
2 configuration error.  Data goes to files or stdout; diagnostics to stderr.
Identical configuration plus seed produces byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

from . import __version__
from .constants import constants_for
from .dynsim import (
    BernoulliSystem,
    CyclicSystem,
    RotationSystem,
    convergence_report,
    count_bounds_check,
    indicator,
    sample_orbit,
)
from .ledger import (
    InfeasibleAtScale,
    LedgerError,
    NoPrimeWindow,
    build_ledger,
    extend_ledger,
    full_report,
    ledger_to_json,
    load_ledger,
    new_ledger,
    save_ledger,
)
from .rng import SplitMix64, derive_seed
from .sequence import (
    banach_density,
    block_summaries,
    build_store,
    gap_profile,
    verify_block,
    write_elements,
)
from .zbattery import run_all

F = Fraction


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit_json(obj, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# config files: flat key=value lines, '#' comments

def read_config(path: str) -> dict:
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def _frac(text: str) -> Fraction:
    return Fraction(text)


# ---------------------------------------------------------------------------
# subcommands

_OVERRIDABLE = ("gamma_beta", "gamma_small", "f19_p", "f4c_div", "f4c_floor")


def _apply_overrides(profile: str, pairs: list[str]):
    """Scalar constant overrides `name=fraction` on top of a profile table."""
    import dataclasses

    from .constants import Family

    table = constants_for(profile)
    if not pairs:
        return table
    changes: dict = {"profile": f"{profile}+custom"}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"override must be name=value, got {pair!r}")
        name, val = pair.split("=", 1)
        name = name.strip()
        if name == "gamma_main":
            changes[name] = Family(F(val))
        elif name in _OVERRIDABLE:
            changes[name] = F(val)
        else:
            raise ValueError(f"unknown constant {name!r}; overridable: "
                             f"{', '.join(_OVERRIDABLE + ('gamma_main',))}")
    return dataclasses.replace(table, **changes)


def cmd_gen_params(args) -> int:
    try:
        table = _apply_overrides(args.profile, args.set or [])
        ledger = new_ledger(table)
        while len(ledger.blocks) < args.horizon:
            ledger = extend_ledger(ledger, max_k=args.max_k,
                                   max_prime=args.max_prime,
                                   max_beta=args.max_beta)
    except InfeasibleAtScale as exc:
        _err(f"InfeasibleAtScale: block {exc.m} needs {exc.what} >= {exc.required} "
             f"(cap {exc.cap})")
        return 1
    except NoPrimeWindow as exc:
        _err(f"NoPrimeWindow: {exc}")
        return 1
    except LedgerError as exc:
        _err(f"ledger check failed: {exc}")
        return 1
    if args.out:
        save_ledger(ledger, args.out)
    else:
        _emit_json(ledger_to_json(ledger), None)
    _err(f"ledger: {len(ledger.blocks)} blocks, "
         f"{ledger.complete_horizon} closed, profile {ledger.constants.profile}")
    return 0


def cmd_build_seq(args) -> int:
    ledger = load_ledger(args.ledger)
    if ledger.complete_horizon < 1:
        _err("ledger closes no blocks; extend it first")
        return 2
    store = build_store(ledger)
    write_elements(store, args.out)
    if args.summary_out:
        _emit_json(block_summaries(store), args.summary_out)
    _err(f"wrote {store.total} elements through horizon {store.horizon}")
    return 0


def cmd_verify(args) -> int:
    ledger = load_ledger(args.ledger)
    report: dict = {"profile": ledger.constants.profile, "checks": []}
    ok = True
    for rep in full_report(ledger):
        entry = {
            "kind": "ledger",
            "block": rep.m,
            "overall": rep.overall,
            "records": [
                {"name": r.name, "lhs": str(r.lhs), "rhs": str(r.rhs),
                 "op": r.op, "satisfied": r.satisfied}
                for r in rep.records
            ],
        }
        ok &= rep.overall
        report["checks"].append(entry)
    if ledger.complete_horizon >= 1:
        store = build_store(ledger)
        for m in range(1, ledger.complete_horizon + 1):
            rep = verify_block(ledger, store, m)
            ok &= rep.ok
            report["checks"].append({
                "kind": "block_windows", "block": m, "overall": rep.ok,
                "n_windows": rep.n_windows,
                "min_ratio": str(rep.min_ratio), "max_ratio": str(rep.max_ratio),
                "min_gap": rep.min_gap, "k1_edge": rep.k1_edge,
            })
        for rec in count_bounds_check(ledger, store):
            ok &= rec["ok"]
            report["checks"].append({
                "kind": "count_bounds", "block": rec["m"], "overall": rec["ok"],
            })
        report["gap_profile"] = gap_profile(store)
        ds = []
        L = 1000
        while L <= store.horizon:
            ds.append({"L": L, "density": str(banach_density(store, L))})
            L *= 10
        report["banach_density"] = ds
    report["overall"] = ok
    _emit_json(report, args.out)
    _err("verify: " + ("PASS" if ok else "FAIL"))
    return 0 if ok else 1


def cmd_ops_test(args) -> int:
    res = run_all(args.seed, trials=args.trials)
    lines = []
    for name, recs in sorted(res["records"].items()):
        for rec in recs:
            lines.append(json.dumps(rec, sort_keys=True))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        sys.stdout.write("\n".join(lines) + "\n")
    failures = sum(v["failures"] for v in res["summary"].values())
    for name, v in sorted(res["summary"].items()):
        _err(f"{name}: trials={v['trials']} failures={v['failures']} "
             f"max_ratio={v['max_ratio']}")
    return 0 if failures == 0 else 1


def _build_system(cfg: dict):
    system = cfg.get("system", "rotation")
    if system == "rotation":
        alpha = cfg.get("alpha", "golden")
        sys_obj = RotationSystem.golden() if alpha == "golden" \
            else RotationSystem.from_fraction(_frac(alpha))
        obs = indicator(_frac(cfg.get("f_lo", "0")), _frac(cfg.get("f_hi", "1/2")))
        return sys_obj, obs
    if system == "cyclic":
        P = int(cfg["cyclic_p"])
        spec = cfg.get("residues", "0")
        chosen = set()
        for part in spec.split(","):
            if "-" in part:
                a, b = part.split("-")
                chosen.update(range(int(a), int(b) + 1))
            else:
                chosen.add(int(part))
        table = tuple(1 if r in chosen else 0 for r in range(P))
        return CyclicSystem(P, table), None
    if system == "bernoulli":
        if "seed" not in cfg:
            raise ValueError("bernoulli systems need seed=")
        return BernoulliSystem(_frac(cfg.get("prob", "1/2")),
                               derive_seed(int(cfg["seed"]), "orbit")), None
    raise ValueError(f"unknown system {system!r}")


def cmd_simulate(args) -> int:
    cfg = read_config(args.config) if args.config else {}
    if args.seed is not None:
        cfg["seed"] = str(args.seed)
    try:
        if args.ledger:
            ledger = load_ledger(args.ledger)
        else:
            ledger = build_ledger(cfg.get("profile", "demo"),
                                  int(cfg.get("horizon", "6")))
        system, obs = _build_system(cfg)
    except (ValueError, KeyError, LedgerError) as exc:
        _err(f"config error: {exc}")
        return 2
    store = build_store(ledger)
    x0_text = cfg.get("x0", "0")
    if x0_text == "random":
        if "seed" not in cfg:
            _err("config error: x0=random needs seed=")
            return 2
        rng = SplitMix64(derive_seed(int(cfg["seed"]), "x0"))
        x0 = F(rng.next_u64(), 1 << 64)
    else:
        x0 = _frac(x0_text)
    if isinstance(system, CyclicSystem):
        x0 = int(x0)
    orbit = sample_orbit(system, x0, store.horizon, obs)
    checkpoints = None
    if "checkpoints" in cfg and cfg["checkpoints"] not in ("blocks+log", ""):
        if cfg["checkpoints"] == "blocks":
            checkpoints = [b.beta for b in store.blocks]
        else:
            checkpoints = [int(x) for x in cfg["checkpoints"].split(",")]
    rep = convergence_report(orbit, store, checkpoints)
    rep.to_csv(args.out)
    _err(f"simulate: {len(rep.rows)} checkpoints, final deviation "
         f"{rep.final_deviation!r}, trend slope {rep.trend_slope!r}")
    return 0


def cmd_export(args) -> int:
    rows: list[dict] = []
    with open(args.infile, encoding="utf-8") as fh:
        head = fh.read(1)
        fh.seek(0)
        if head == "{" or args.infile.endswith((".jsonl", ".ndjson")):
            for line in fh:
                line = line.strip()
                if line:
                    rows.append(json.loads(line))
        else:
            rows.extend(dict(r) for r in csv.DictReader(fh))
    if not rows:
        _err("no rows to export")
        return 2
    cols = sorted({k for r in rows for k in r if not isinstance(r[k], (dict, list))})
    if args.format == "csv":
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=cols, extrasaction="ignore")
            w.writeheader()
            for r in rows:
                w.writerow({k: r.get(k, "") for k in cols})
    else:
        _emit_json([{k: r.get(k) for k in cols} for r in rows], args.out)
    _err(f"exported {len(rows)} rows to {args.out}")
    return 0


# ---------------------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="primegrid",
        description="Sparse good-sequence construction, operator checks, and "
                    "ergodic average experiments.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-params", help="extend a parameter ledger")
    g.add_argument("--profile", choices=("faithful", "demo"), default="demo")
    g.add_argument("--horizon", type=int, required=True,
                   help="number of blocks to give parameters (the last stays open)")
    g.add_argument("--set", action="append", metavar="NAME=FRACTION",
                   help="override a scalar table constant (repeatable)")
    g.add_argument("--out", default=None)
    g.add_argument("--max-k", type=int, default=10**6)
    g.add_argument("--max-prime", type=int, default=2**62)
    g.add_argument("--max-beta", type=int, default=2**62)
    g.set_defaults(fn=cmd_gen_params)

    b = sub.add_parser("build-seq", help="write the sequence elements")
    b.add_argument("--ledger", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--summary-out", default=None)
    b.set_defaults(fn=cmd_build_seq)

    v = sub.add_parser("verify", help="run every ledger/sequence/count check")
    v.add_argument("--ledger", required=True)
    v.add_argument("--out", default=None)
    v.set_defaults(fn=cmd_verify)

    o = sub.add_parser("ops-test", help="randomized maximal-inequality batteries")
    o.add_argument("--seed", type=int, required=True)
    o.add_argument("--trials", type=int, default=1000)
    o.add_argument("--out", default=None)
    o.set_defaults(fn=cmd_ops_test)

    s = sub.add_parser("simulate", help="subsequence-average convergence run")
    s.add_argument("--config", default=None)
    s.add_argument("--ledger", default=None)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_simulate)

    e = sub.add_parser("export", help="convert result files between csv/json")
    e.add_argument("--in", dest="infile", required=True)
    e.add_argument("--format", choices=("csv", "json"), default="csv")
    e.add_argument("--out", required=True)
    e.set_defaults(fn=cmd_export)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (FileNotFoundError, ValueError) as exc:
        _err(f"config error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
