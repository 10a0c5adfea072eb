"""Command line entry point: ``toriclab {validate,run,render,h0}``.

Exit codes: 0 when every selected suite passes, 1 when any suite fails or is
undetermined, 2 for configuration, usage and I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
import time
from typing import Optional, Sequence

from . import render
from .canonical import ScaffoldError, build_scaffold, canonicalize, f0_group_elements, h0_dimension, syndrome_class_count
from .config import SUITES, ConfigError, RunConfig, load_config, validate_config
from .lattice import LatticeError, Verdict, is_distally_separated
from .pauli import PauliOp
from .split import random_string_product
from .suites import FAIL, PASS, SUITE_FUNCTIONS, UNDETERMINED

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def build_config(args) -> RunConfig:
    """Load the config file and apply command line overrides, then revalidate."""
    data = load_config(args.config)
    if getattr(args, "suite", None):
        names = [s.strip() for s in args.suite.split(",") if s.strip()]
        unknown = [s for s in names if s not in SUITES]
        if unknown:
            raise UsageError(f"unknown suite(s) {', '.join(unknown)}; choose from {', '.join(SUITES)}")
        data["suites"] = names
    if getattr(args, "seed", None) is not None:
        data["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        data["trials"] = {k: args.trials for k in data["trials"]}
    if getattr(args, "out", None):
        data["out"] = args.out
    return RunConfig(validate_config(data, args.config or "<defaults>"))


def _scaffold(cfg: RunConfig):
    if not cfg.has_pair():
        raise UsageError("this command needs cones lambda1 and lambda2")
    c1, c2 = cfg.cone("lambda1"), cfg.cone("lambda2")
    w = cfg.window()
    sep = is_distally_separated(c1, c2, w)
    if sep.verdict is not Verdict.TRUE:
        raise ScaffoldError(f"cones are not distally separated on this window ({sep.verdict.value}): {sep.detail}")
    return build_scaffold(c1, c2, w)


def _figures(cfg: RunConfig, out: str) -> list[str]:
    """Figures that accompany a run; the scaffold one only when a scaffold exists."""
    written = []
    cones = {name: cfg.cone(name) for name in sorted(cfg.data["cones"])}
    written.append(render.save_svg(render.cones_figure(cfg.window(), cones), os.path.join(out, "cones.svg")))
    try:
        sc = _scaffold(cfg)
    except (UsageError, LatticeError):
        return written
    written.append(render.save_svg(render.scaffold_figure(sc), os.path.join(out, "scaffold.svg")))
    return written


def _summary_rows(results) -> list[list[str]]:
    rows = [["suite", "status", "counters", "first_failure"]]
    for r in results:
        counters = ";".join(f"{k}={v}" for k, v in sorted(r.counters.items()))
        failure = "" if r.first_failure_certificate is None else r.first_failure_certificate.get("check", "yes")
        rows.append([r.name, r.status, counters, failure])
    return rows


def cmd_validate(args) -> int:
    cfg = build_config(args)
    print(f"config ok: {len(cfg.suites)} suite(s), seed {cfg.seed}")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = build_config(args)
    out = cfg.data["out"]
    os.makedirs(out, exist_ok=True)
    results, timings = [], {}
    for name in cfg.suites:
        t0 = time.perf_counter()
        res = SUITE_FUNCTIONS[name](cfg)
        timings[name] = round(time.perf_counter() - t0, 3)
        results.append(res)
        print(f"{name:<16} {res.status:<13} {timings[name]:8.2f}s")
    statuses = {r.status for r in results}
    overall = FAIL if FAIL in statuses else UNDETERMINED if UNDETERMINED in statuses else PASS
    report = {"status": overall, "seed": cfg.seed, "config": cfg.data,
              "suites": [r.to_json() for r in results]}
    _write(os.path.join(out, "report.json"), _dump(report))
    _write(os.path.join(out, "timings.json"), _dump({"wall_time_seconds": timings}))
    with open(os.path.join(out, "summary.csv"), "w", encoding="utf-8", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(_summary_rows(results))
    figures = _figures(cfg, out)
    print(f"overall: {overall}; wrote report.json, summary.csv, timings.json and {len(figures)} figure(s) to {out}")
    return EXIT_OK if overall == PASS else EXIT_FAIL


def _canonical_op(args, cfg: RunConfig, sc) -> PauliOp:
    if args.op:
        with open(args.op, encoding="utf-8") as fh:
            try:
                return PauliOp.from_json(json.load(fh))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"{args.op}: not a Pauli operator: {exc}") from exc
    return random_string_product(sc.window.shrink(2), random.Random(cfg.seed))


def cmd_render(args) -> int:
    cfg = build_config(args)
    what = args.what
    cones = {name: cfg.cone(name) for name in sorted(cfg.data["cones"])}
    if what == "lattice":
        fig, text = render.lattice_figure(cfg.window()), None
        if args.ascii:
            text = render.ascii_bonds(cfg.window(), {})
    elif what == "cones":
        fig = render.cones_figure(cfg.window(), cones)
        text = render.ascii_cones(cfg.window(), cones) if args.ascii else None
    else:
        sc = _scaffold(cfg)
        if what == "scaffold":
            fig = render.scaffold_figure(sc)
            text = render.ascii_scaffold(sc) if args.ascii else None
        else:
            form = canonicalize(_canonical_op(args, cfg, sc), sc)
            fig = render.canonical_figure(form)
            text = _dump(form.to_json()) if args.ascii else None
    out = cfg.data["out"]
    os.makedirs(out, exist_ok=True)
    path = render.save_svg(fig, os.path.join(out, f"{what}.svg"))
    if text is not None:
        sys.stdout.write(text)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_h0(args) -> int:
    cfg = build_config(args)
    sc = _scaffold(cfg)
    elements = f0_group_elements(sc)
    section = {
        "scaffold": sc.to_json(),
        "scaffold_paths": len(sc.gamma),
        "group_elements": len(elements),
        "h0_dimension": h0_dimension(sc),
        "syndrome_classes": syndrome_class_count(sc),
    }
    sys.stdout.write(_dump(section))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toriclab", description="Exact toric code cone checks.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, run_flags=False):
        p.add_argument("--config", metavar="PATH", help="JSON config; defaults are used when omitted")
        p.add_argument("--seed", type=int, metavar="N", help="override the configured seed")
        p.add_argument("--out", metavar="DIR", help="output directory (default: out)")
        if run_flags:
            p.add_argument("--suite", metavar="NAME[,NAME...]", help="run only these suites")
            p.add_argument("--trials", type=int, metavar="N", help="override every trial count")

    common(sub.add_parser("validate", help="check a config file and exit"), run_flags=True)
    common(sub.add_parser("run", help="run verification suites and write a report"), run_flags=True)
    p = sub.add_parser("render", help="write one SVG figure")
    common(p)
    p.add_argument("what", choices=render.KINDS)
    p.add_argument("--ascii", action="store_true", help="also print a plain-text picture")
    p.add_argument("--op", metavar="PATH", help="operator JSON for canonical-form (default: seeded random)")
    common(sub.add_parser("h0", help="print the scaffold and the dimension of the gap space"))
    return parser


COMMANDS = {"validate": cmd_validate, "run": cmd_run, "render": cmd_render, "h0": cmd_h0}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.verb](args)
    except (ConfigError, UsageError, LatticeError) as exc:
        print(f"toriclab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"toriclab: error: {exc.filename or ''}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
