"""Command-line front end: carpet rendering, figures, and verification runs.

Exit codes: 0 when every checked bound holds, 1 when some bound fails, 2 for
configuration errors.  All outputs are byte-deterministic for a fixed
configuration.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .carpet import (
    CarpetSpec,
    SpecError,
    TailDiverges,
    geometry_json_records,
    parse_spec_config,
    prefractal_measure,
    tail_measure_bounds,
    validate_spec,
)
from .fields import affine_field, constant_field, coordinate_field
from .forms import verify_wedge_approximation
from .report import report_to_csv, report_to_json
from .svgout import carpet_svg, cells_svg, neighborhoods_svg, staircase_svg, tents_svg
from .witness import verify_witness_sequence

EXIT_OK = 0
EXIT_BOUND_FAILED = 1
EXIT_CONFIG = 2


class ConfigError(ValueError):
    pass


def _build_spec(args) -> CarpetSpec:
    try:
        if getattr(args, "config", None):
            text = Path(args.config).read_text(encoding="utf-8")
            return parse_spec_config(text)
        ratios = ()
        if args.ratios:
            ratios = tuple(Fraction(part.strip()) for part in args.ratios.split(","))
        generator = args.generator if args.generator != "none" else None
        spec = CarpetSpec(ratios=ratios, generator=generator)
        if not spec.ratios and spec.generator is None:
            raise ConfigError("no ratios given and no generator rule")
        return spec
    except (ValueError, ZeroDivisionError, OSError) as exc:
        raise ConfigError(str(exc)) from exc


def _target_field(selector: str):
    if selector == "const":
        return constant_field(1)
    if selector == "x":
        return coordinate_field("x")
    if selector == "y":
        return coordinate_field("y")
    if selector.startswith("affine:"):
        try:
            a, b, c = (Fraction(p) for p in selector[len("affine:"):].split(","))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad affine target {selector!r}") from exc
        return affine_field(a, b, c)
    raise ConfigError(f"unknown target function {selector!r}")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_spec_check(args) -> int:
    spec = _build_spec(args)
    diag = validate_spec(spec)
    print(f"ratios: {', '.join(str(r) for r in diag['ratios'])}")
    print(f"generator: {spec.generator or 'none'}")
    sums = ", ".join(str(s) for s in diag["square_sums"])
    print(f"partial sums of squared ratios: {sums}")
    shrinks = ", ".join(str(r) for r in diag["shrink_ratios"])
    print(f"shrink ratios (prefix product / next ratio): {shrinks}")
    print(f"square summable: {diag['square_summable']}")
    print(f"shrink ratios tend to zero: {diag['shrink_to_zero']}")
    print(f"hypothesis satisfied: {diag['hypothesis_satisfied']}")
    if spec.generator:
        try:
            tail = tail_measure_bounds(spec, len(spec.ratios))
            print(f"tail area factor in [{tail.lower}, {tail.upper}]")
        except TailDiverges:
            print("tail area factor: diverges (carpet has zero area)")
    return EXIT_OK


def cmd_carpet(args) -> int:
    spec = _build_spec(args)
    validate_spec(spec)
    out = _out_dir(args)
    (out / "carpet.svg").write_text(carpet_svg(spec, args.depth), encoding="utf-8")
    records = []
    for stage in range(1, args.depth + 1):
        records.extend(geometry_json_records(spec, stage))
    import json
    payload = {
        "depth": args.depth,
        "measure": [prefractal_measure(spec, args.depth).numerator,
                    prefractal_measure(spec, args.depth).denominator],
        "holes": records,
    }
    (out / "carpet.json").write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n",
                                     encoding="utf-8")
    print(f"wrote {out / 'carpet.svg'} and {out / 'carpet.json'}")
    return EXIT_OK


def cmd_figures(args) -> int:
    spec = _build_spec(args)
    validate_spec(spec)
    out = _out_dir(args)
    n = args.nmax
    (out / "cells.svg").write_text(cells_svg(spec, n), encoding="utf-8")
    (out / "phi.svg").write_text(staircase_svg(spec, n), encoding="utf-8")
    (out / "psi.svg").write_text(tents_svg(spec, n), encoding="utf-8")
    (out / "unk.svg").write_text(neighborhoods_svg(spec, n), encoding="utf-8")
    print(f"wrote cells.svg, phi.svg, psi.svg, unk.svg in {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = _build_spec(args)
    validate_spec(spec)
    out = _out_dir(args)
    f = _target_field(args.f)
    report = verify_witness_sequence(spec, f, n_max=args.nmax, m=args.depth,
                                     mode=args.mode)
    wedge_stages = tuple(n for n in (2, 3) if n <= args.nmax)
    if wedge_stages:
        wedge_report = verify_wedge_approximation(
            spec, coordinate_field("x"), coordinate_field("y"),
            wedge_stages, m=min(args.depth, 3), mode=args.mode)
        report.extend(wedge_report)
    (out / "report.csv").write_text(report_to_csv(report), encoding="utf-8")
    (out / "report.json").write_text(report_to_json(report), encoding="utf-8")
    failed = report.failed_rows()
    for row in report.rows:
        if row.passed is False:
            print(f"FAILED bound: {row.section} n={row.n} {row.name}: "
                  f"{row.value} vs {row.bound}")
    print(f"wrote {out / 'report.csv'} and {out / 'report.json'}; "
          f"{len(failed)} failed bound(s)")
    return EXIT_OK if not failed else EXIT_BOUND_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carpetcurl",
        description="exact carpet geometry and curl non-closability checks")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--ratios", default="", help="comma list like 1/3,1/5,1/7")
        p.add_argument("--generator", default="none",
                       choices=["none", "odd-reciprocal", "constant"])
        p.add_argument("--config", default=None, help="spec config file")
        p.add_argument("--depth", type=int, default=4, help="prefractal level m")
        p.add_argument("--nmax", type=int, default=3, help="largest corrector stage")
        p.add_argument("--mode", default="exact", choices=["exact", "f64"])
        p.add_argument("--f", default="const",
                       help="target function: const | x | y | affine:a,b,c")
        p.add_argument("--out", default="out", help="output directory")

    for name, fn in (("spec-check", cmd_spec_check), ("carpet", cmd_carpet),
                     ("figures", cmd_figures), ("verify", cmd_verify)):
        p = sub.add_parser(name)
        common(p)
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, SpecError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
