"""Turn a :class:`ScenarioConfig` into curve CSVs and a JSON summary."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from secmetrics import __version__, metrics, scenarios, sim
from secmetrics.codes.bch import bch_construct
from secmetrics.codes.ldpc import fixture_digest, fixture_path, ldpc_construct_fixture
from secmetrics.config import ScenarioConfig
from secmetrics.modem import ModScheme, ebno_to_snr


@dataclass
class RunManifest:
    config_digest: str
    tool_version: str
    fixture_digests: dict[str, str]
    started: str
    finished: str = ""
    files: list[str] = field(default_factory=list)


def config_digest(cfg: ScenarioConfig) -> str:
    return hashlib.sha256(cfg.to_ini().encode()).hexdigest()


def fixture_digests(cfg: ScenarioConfig) -> dict[str, str]:
    if cfg.kind != "keyed":
        return {}
    path = Path(cfg.ldpc_fixture) if cfg.ldpc_fixture else fixture_path()
    return {path.name: fixture_digest(path)}


def build_scenario(cfg: ScenarioConfig):
    mod = ModScheme(cfg.modulation, cfg.order)
    if cfg.kind == "uncoded":
        return scenarios.UncodedScenario(cfg.n, mod)
    if cfg.kind == "bch":
        return scenarios.BchScenario(bch_construct(cfg.bch_m, cfg.bch_t), mod, cfg.codewords_per_frame)
    if cfg.kind == "scrambler":
        return scenarios.ScramblerBchScenario.build(cfg.seed, cfg.bch_m, cfg.bch_t)
    if cfg.kind == "keyed":
        ldpc = ldpc_construct_fixture(cfg.ldpc_fixture or None)
        if cfg.party:
            return scenarios.KeyedJammingScenario.build(party=cfg.party, max_iters=cfg.max_iters, ldpc=ldpc)
        return scenarios.KeyedJammingScenario.build(alpha=cfg.alpha, max_iters=cfg.max_iters, ldpc=ldpc)
    raise ValueError(f"no Monte Carlo scenario for kind {cfg.kind!r}")


def analytic_curves(cfg: ScenarioConfig) -> tuple[dict[str, metrics.MetricCurve], dict]:
    """Closed-form curves for uncoded BPSK feeding a t-error-correcting code."""
    code = bch_construct(cfg.bch_m, cfg.bch_t)
    n, rate = code.n, code.rate
    S_b = cfg.s_b or code.k
    xs = cfg.grid
    snrs = [x if cfg.axis == "snr_db" else ebno_to_snr(x, rate) for x in xs]
    pbs = [metrics.ber_bpsk_awgn(10 ** (s / 10)) for s in snrs]
    params = {"n": n, "k": code.k, "t": cfg.t, "S_b": S_b}
    curves = {
        "ber_bpsk": metrics.MetricCurve("ber_bpsk", cfg.axis, [metrics.CurvePoint.exact(x, p) for x, p in zip(xs, pbs)], params),
        f"be_cdf_t{cfg.t}": metrics.MetricCurve(
            f"be_cdf_t{cfg.t}", cfg.axis,
            [metrics.CurvePoint.exact(x, metrics.be_cdf_analytic(n, cfg.t, p)) for x, p in zip(xs, pbs)], params),
    }
    for d in cfg.deltas:
        name = f"ber_cdf_iid_d{d:g}"
        curves[name] = metrics.MetricCurve(
            name, cfg.axis, [metrics.CurvePoint.exact(x, metrics.ber_cdf_ac_exact_iid(S_b, d, p)) for x, p in zip(xs, pbs)],
            params)
    extras = {
        "limiting_values": {f"{d:g}": metrics.limiting_value(d, S_b) for d in cfg.deltas},
        "be_cdf_thresholds_snr_db": {
            "reliability_0.99": metrics.be_cdf_threshold_snr(n, cfg.t, 0.99),
            "confidentiality_0.01": metrics.be_cdf_threshold_snr(n, cfg.t, 0.01),
        },
    }
    return curves, extras


def mc_curves(cfg: ScenarioConfig, workers: int = 1) -> dict[str, metrics.MetricCurve]:
    scen = build_scenario(cfg)
    executor = sim.make_executor(workers)
    try:
        return scenarios.sweep(scen, cfg.grid, cfg.axis, cfg.trials, cfg.seed, t=cfg.t, deltas=cfg.deltas,
                               S_b=cfg.s_b or scen.post_len, executor=executor)
    finally:
        if executor is not None:
            executor.shutdown()


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def run(cfg: ScenarioConfig, workers: int = 1, out_dir: Path | str | None = None) -> RunManifest:
    out = Path(out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(config_digest(cfg), __version__, fixture_digests(cfg),
                           datetime.now(timezone.utc).isoformat())
    extras: dict = {}
    if cfg.kind == "analytic":
        curves, extras = analytic_curves(cfg)
    else:
        curves = mc_curves(cfg, workers)
    for name, curve in curves.items():
        path = out / f"{name}.csv"
        curve.write_csv(path)
        manifest.files.append(path.name)
    manifest.finished = datetime.now(timezone.utc).isoformat()
    summary = {
        "manifest": asdict(manifest),
        "config": cfg.to_ini(),
        "curves": {name: {"axis": c.axis, "params": c.params, "x": c.xs.tolist(), "value": c.values.tolist()}
                   for name, c in curves.items()},
        **extras,
    }
    (out / "summary.json").write_text(json.dumps(_clean(summary), indent=2, sort_keys=True) + "\n")
    return manifest
