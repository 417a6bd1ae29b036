"""Command-line entry point: ``adhocauth <command>``."""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import gqid
from .bench import SizeReport, bench_puzzles
from .errors import ScenarioError
from .scenario import bundled, load, run_scenario


def _run_one(path: Path, out: Path | None) -> bool:
    script = load(path)
    target = out / script.name if out is not None else None
    result = run_scenario(script, target)
    for e in result.expects:
        print(f"{script.name}: {e}")
    status = "ok" if result.passed else "FAILED"
    print(f"{script.name}: {status} ({len(result.expects)} expects, "
          f"{len(result.app.net.transcript)} transcript records)")
    return result.passed


def cmd_run(args) -> int:
    try:
        return 0 if _run_one(Path(args.scenario), args.out) else 1
    except ScenarioError as exc:
        print(f"{args.scenario}: {exc}", file=sys.stderr)
        return 2


def cmd_suite(args) -> int:
    ok = True
    for path in bundled():
        try:
            ok &= _run_one(path, args.out)
        except ScenarioError as exc:
            print(f"{path.name}: {exc}", file=sys.stderr)
            ok = False
    return 0 if ok else 1


def cmd_bench(args) -> int:
    report = bench_puzzles(args.bits, args.count, args.seeds)
    print("\n".join(report.rows()))
    return 0


def keys_to_json(keys: gqid.BootstrapKeys) -> str:
    return json.dumps({"p": keys.p, "q": keys.q, "N": keys.N, "K_P": keys.K_P,
                       "k_p": keys.k_p}, indent=2, sort_keys=True) + "\n"


def keys_from_json(text: str) -> gqid.BootstrapKeys:
    d = json.loads(text)
    return gqid.BootstrapKeys(p=d["p"], q=d["q"], N=d["N"], K_P=d["K_P"], k_p=d["k_p"])


def cmd_keygen(args) -> int:
    rng = random.Random(args.seed)
    try:
        keys = gqid.keygen(args.bits, args.exponent, rng, p=args.p, q=args.q)
    except (ValueError, gqid.KeygenError) as exc:
        print(f"keygen: {exc}", file=sys.stderr)
        return 1
    text = keys_to_json(keys)
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return 0


def cmd_size_report(args) -> int:
    try:
        result = run_scenario(load(args.scenario))
    except ScenarioError as exc:
        print(f"{args.scenario}: {exc}", file=sys.stderr)
        return 2
    report = SizeReport(result.app.size_stats)
    print("\n".join(report.rows()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="adhocauth")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario script")
    p.add_argument("scenario")
    p.add_argument("--out", type=Path, help="write transcript, audit and logs here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("suite", help="run every bundled scenario")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("bench-puzzles", help="measure brute-force trials")
    p.add_argument("--bits", type=int, required=True, help="effective key bits k")
    p.add_argument("--count", type=int, default=64, help="puzzles per set")
    p.add_argument("--seeds", type=int, default=20)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("keygen", help="write a bootstrap key fixture")
    p.add_argument("--bits", type=int, default=512)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exponent", type=int, default=65537)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("size-report", help="puzzle-set bytes vs message bytes")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_size_report)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
