"""Command-line entry point: ``secmetrics <subcommand> ...``.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from secmetrics import llr_analysis, metrics, runner, scenarios
from secmetrics.config import ConfigError, ScenarioConfig, parse_config

log = logging.getLogger("secmetrics")

EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _load(args) -> ScenarioConfig:
    cfg = parse_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.out is not None:
        changes["out_dir"] = str(args.out)
    return cfg.replace(**changes) if changes else cfg


def cmd_analytic(args) -> int:
    cfg = _load(args)
    if cfg.kind != "analytic":
        cfg = cfg.replace(kind="analytic")
    m = runner.run(cfg, out_dir=cfg.out_dir)
    print(json.dumps({"out_dir": cfg.out_dir, "files": m.files}))
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    if cfg.kind == "analytic":
        raise ConfigError("kind", "sweep needs a Monte Carlo scenario kind")
    m = runner.run(cfg, workers=args.workers, out_dir=cfg.out_dir)
    print(json.dumps({"out_dir": cfg.out_dir, "files": m.files}))
    return 0


def cmd_kl(args) -> int:
    cfg = _load(args)
    if cfg.kind != "keyed":
        raise ConfigError("kind", "kl needs the keyed scenario (soft LDPC decoder)")
    scen = runner.build_scenario(cfg)
    points = llr_analysis.kl_vs_ber_sweep(scen, cfg.grid, cfg.trials, cfg.seed, dump_dir=args.dump_samples)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "kl_vs_ber.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["axis_db", "ber", "kl_bits", "n_correct", "n_error", "degenerate"])
        for p in points:
            w.writerow([f"{p.x:.6f}", repr(p.ber), repr(p.kl_bits), p.n_correct, p.n_error, int(p.degenerate)])
    summary = {"file": str(path)}
    try:
        summary["spearman"] = llr_analysis.trend_correlation(points)
    except ValueError:
        summary["spearman"] = None
    print(json.dumps(summary))
    return 0


def read_kl_csv(path) -> list[llr_analysis.KlPoint]:
    with open(path, newline="") as fh:
        return [llr_analysis.KlPoint(float(r["axis_db"]), float(r["ber"]), float(r["kl_bits"]),
                                     int(r["n_correct"]), int(r["n_error"]), bool(int(r["degenerate"])))
                for r in csv.DictReader(fh)]


def cmd_gap(args) -> int:
    bob = metrics.MetricCurve.read_csv(args.bob)
    eve = metrics.MetricCurve.read_csv(args.eve)
    bob_x = metrics.reliability_point(bob, args.bob_target)
    eve_x = metrics.security_point(eve, args.eve_target)
    print(json.dumps({"security_gap_db": bob_x - eve_x, "bob_x_db": bob_x, "eve_x_db": eve_x}))
    return 0


def cmd_reduce_bsc(args) -> int:
    eve = metrics.MetricCurve.read_csv(args.eve, axis="ebno_db")
    kl = read_kl_csv(args.kl) if args.kl else None
    report = scenarios.reduce_to_bsc(eve, args.delta, args.target, bob_be_cdf=args.bob_be_cdf,
                                     bob_ber=args.bob_ber, kl_points=kl)
    print(json.dumps(report.as_dict(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="secmetrics", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(sp):
        sp.add_argument("--config", required=True, type=Path)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--out", type=Path)
        sp.add_argument("--workers", type=int, default=1, help="parallel processes; never changes results")
        return sp

    with_config(sub.add_parser("analytic", help="closed-form curves")).set_defaults(func=cmd_analytic)
    with_config(sub.add_parser("sweep", help="Monte Carlo scenario sweep")).set_defaults(func=cmd_sweep)
    kl = with_config(sub.add_parser("kl", help="LLR divergence vs. post-decoder BER"))
    kl.add_argument("--dump-samples", type=Path, help="directory for raw little-endian float64 LLR samples")
    kl.set_defaults(func=cmd_kl)

    gap = sub.add_parser("gap", help="security gap from two curve CSVs")
    gap.add_argument("--bob", required=True, type=Path)
    gap.add_argument("--bob-target", required=True, type=float)
    gap.add_argument("--eve", required=True, type=Path)
    gap.add_argument("--eve-target", required=True, type=float)
    gap.set_defaults(func=cmd_gap)

    red = sub.add_parser("reduce-bsc", help="effective-BSC report from Eve's BER-CDF curve")
    red.add_argument("--eve", required=True, type=Path, help="BER-CDF curve CSV (Eb/N0 axis)")
    red.add_argument("--delta", required=True, type=float)
    red.add_argument("--target", type=float, default=0.995)
    red.add_argument("--bob-be-cdf", type=float, help="Bob's BE-CDF at his operating point")
    red.add_argument("--bob-ber", type=float, help="Bob's post-decoder BER")
    red.add_argument("--kl", type=Path, help="kl_vs_ber.csv from the kl subcommand")
    red.set_defaults(func=cmd_reduce_bsc)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - top-level exit-code mapping
        log.debug("runtime failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
