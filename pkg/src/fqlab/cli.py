"""Command line front end: ``fqlab <group> <check> [options]``.

Exit status is 0 when every trial passes, 1 when some trial violates its
check, and 2 for usage errors (bad flags, unknown fields, oversized
exhaustive runs, unreadable input files).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

from . import designs
from .checks import (GENERATOR, REGISTRY, RunConfig, UsageError, get_design, get_field,
                     resolve_params, run_rows)
from .field import FieldError, prime_power
from .geometry import GeometryError, read_points

GROUPS = {
    "verify": ["lemma1", "lemma-hd", "vinh", "vinh-hd", "direction", "marstrand"],
    "sumprod": ["pinned-dot", "linear", "product-shift", "hd-dot"],
    "dist": ["pinned", "diag", "transform"],
    "design": ["check", "moment", "lund-saraf", "gram"],
    "sidon": ["check", "variance", "theorem1", "near-design", "k22"],
}


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def run(cfg: RunConfig) -> dict:
    """Run a check and return its report (a JSON-ready dict)."""
    start = time.perf_counter()
    mode, params, rows = run_rows(cfg)
    violations = sum(1 for r in rows if not r["ok"])
    tight, max_ratio = None, None
    for i, r in enumerate(rows):
        ratio = r.get("ratio")
        if ratio is not None and (max_ratio is None or ratio > max_ratio):
            tight, max_ratio = i, ratio
    if tight is None and violations:
        tight = next(i for i, r in enumerate(rows) if not r["ok"])
    shown = {k: v for k, v in params.items() if not k.endswith("_doc")}
    report = {
        "check": cfg.check,
        "params": shown,
        "mode": mode,
        "seed": cfg.seed if mode == "sample" else None,
        "generator": GENERATOR if mode == "sample" else None,
        "trials": len(rows),
        "violations": violations,
        "max_ratio": max_ratio,
        "tightest_trial": tight,
        "tightest": rows[tight] if tight is not None else None,
        "rows": [{"trial": i, **r} for i, r in enumerate(rows)],
        "wall_time": round(time.perf_counter() - start, 6),
    }
    return _clean(report)


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def to_csv(report: dict) -> str:
    rows = report["rows"]
    cols = ["check", "trial"] + [k for k in rows[0] if k != "trial"] if rows else ["check", "trial"]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({"check": report["check"], **r})
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fqlab", description="Exact checks of incidence bounds over finite fields.")
    groups = ap.add_subparsers(dest="group", required=True)
    for group, names in GROUPS.items():
        gp = groups.add_parser(group)
        sub = gp.add_subparsers(dest="name", required=True)
        for name in names:
            p = sub.add_parser(name)
            _add_common(p)
    return ap


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--q", type=int, help="field order (prime power)")
    p.add_argument("--p", type=int, help="characteristic; with --k gives q = p^k")
    p.add_argument("--k", type=int, help="extension degree")
    p.add_argument("--d", type=int, help="ambient dimension")
    p.add_argument("--m", type=int, help="flat dimension for --family m-flats")
    p.add_argument("--z", type=int, help="last coordinate of directions (hd checks)")
    p.add_argument("--variant", choices=["ratio", "self"], help="sumprod linear: Theta = AA^-1 or Theta = A")
    p.add_argument("--line", choices=["diag", "rich"], help="dist pinned: pin on span(1,1) or on a rich line")
    p.add_argument("--family", choices=["points-lines", "hyperplanes", "m-flats"])
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--cap", type=int, default=2**20, help="largest exhaustive space allowed")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--points", metavar="FILE")
    p.add_argument("--design", metavar="FILE")
    p.add_argument("--sidon", metavar="FILE")
    p.add_argument("--write-design", metavar="FILE", help="design check: save the design as JSON")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", metavar="PATH")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    check = f"{args.group} {args.name}"
    q = args.q
    if args.k is not None:
        if args.p is None:
            raise UsageError("--k needs --p")
        pk = args.p**args.k
        if q is not None and q != pk:
            raise UsageError(f"--q {q} disagrees with --p {args.p} --k {args.k}")
        q = pk
    elif args.p is not None and args.group != "sidon":
        q = q if q is not None else args.p
    if q is not None:
        prime_power(q)
    params = {"q": q, "d": args.d, "m": args.m, "z": args.z, "variant": args.variant,
              "line": args.line, "family": args.family}
    if args.group == "sidon":
        params["p"] = args.p
    if args.design:
        params["design_doc"] = json.dumps(json.loads(Path(args.design).read_text()))
        params["design_file"] = args.design
    if args.sidon:
        params["sidon_doc"] = json.dumps(json.loads(Path(args.sidon).read_text()))
        params["sidon_file"] = args.sidon
    points = None
    if args.points:
        if q is None:
            raise UsageError("--points needs --q")
        check_obj = REGISTRY[check]
        d = args.d if args.d is not None else check_obj.defaults.get("d", 2)
        points = read_points(args.points, get_field(q), d)
        params["points_file"] = args.points
    return RunConfig(check, params, args.exhaustive, args.samples, args.seed, args.cap, points, args.workers)


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = run(cfg)
        if args.write_design:
            params = resolve_params(REGISTRY[cfg.check], cfg.params)
            designs.save_design(args.write_design, get_design(params))
    except (UsageError, FieldError, GeometryError, designs.DesignError, ValueError, OSError) as exc:
        print(f"fqlab: error: {exc}", file=sys.stderr)
        return 2
    text = to_json(report) if args.format == "json" else to_csv(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if report["violations"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
