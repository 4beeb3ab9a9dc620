"""``aoi-ntn`` command line entry point.

Exit codes: 0 success, 1 parse/validation error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..analytic import FlowSet, ServiceSpec
from ..errors import AoIError, ParseError, ValidationError
from .config import load_scenario
from .report import compare_analytic_vs_des
from .sweep import emit_csv, estimate_psj, family_label, read_csv, run_sweep

log = logging.getLogger("aoi_ntn")


def _meta(cfg, member):
    meta = {"scenario": cfg.name, "system": cfg.system, "family": member, "root_seed": cfg.root_seed}
    if cfg.flows is not None:
        f = cfg.flows
        meta["flows"] = {
            "rates": list(f.rates),
            "p_success": f.p_success,
            "mu": f.service.rate,
            "scv": f.service.scv,
            "family": f.service.family,
            "target": f.target,
        }
    return meta


def _flows_from_meta(meta):
    f = meta.get("flows")
    if not f:
        return None, 0
    service = ServiceSpec(f["mu"], 1.0, "exponential")
    return FlowSet(tuple(f["rates"]), f["p_success"], service), int(f.get("target", 0))


def cmd_run(args):
    overrides = {}
    if args.seed is not None:
        overrides["root_seed"] = args.seed
    if args.replications is not None:
        overrides["replications"] = args.replications
    if args.horizon is not None:
        overrides["horizon"] = args.horizon
    cfg = load_scenario(args.scenario)
    if overrides:
        cfg = cfg.with_overrides(overrides)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report_parts = []
    cache = {}
    for member in cfg.family_members():
        label = family_label(cfg, member)
        log.info("running %s", label)
        rows = run_sweep(cfg, member, workers=args.workers, psj_cache=cache)
        path = emit_csv(rows, out / f"{label}.csv")
        meta = _meta(cfg.with_overrides(member) if member else cfg, member)
        (out / f"{label}.meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        flows, target = _flows_from_meta(meta)
        report_parts.append(compare_analytic_vs_des(rows, cfg.tolerance, flows, target, label).render())
        print(path)
    (out / "discrepancies.txt").write_text("\n".join(report_parts))
    return 0


def cmd_compare(args):
    rows = read_csv(args.results)
    meta_path = Path(args.results).with_suffix(".meta.json")
    flows, target = None, 0
    if meta_path.exists():
        flows, target = _flows_from_meta(json.loads(meta_path.read_text()))
    report = compare_analytic_vs_des(rows, args.tolerance, flows, target, Path(args.results).stem)
    text = report.render()
    sys.stdout.write(text)
    Path(args.results).with_name("discrepancies.txt").write_text(text)
    return 0


def cmd_estimate(args):
    cfg = load_scenario(args.scenario)
    print("sweep_value,p_hat,ci_halfwidth,realizations")
    for value in cfg.sweep_values:
        p, ci, n = estimate_psj(cfg.at(value))
        print(f"{value!r},{p!r},{ci!r},{n}")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="aoi-ntn", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario sweep and write CSV results")
    run.add_argument("scenario")
    run.add_argument("--out", default="results")
    run.add_argument("--seed", type=int)
    run.add_argument("--replications", type=int)
    run.add_argument("--horizon", type=float)
    run.add_argument("--workers", type=int, default=1)
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="discrepancy report for a results CSV")
    cmp_.add_argument("results")
    cmp_.add_argument("--tolerance", type=float, default=0.1)
    cmp_.set_defaults(func=cmd_compare)

    est = sub.add_parser("estimate-psj", help="Monte Carlo transmission success probability")
    est.add_argument("scenario")
    est.set_defaults(func=cmd_estimate)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (AoIError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
