"""Experiment configuration: an INI file with one section per component.

Example::

    [scenario]
    kind = keyed            # analytic | uncoded | bch | scrambler | keyed

    [code]
    bch_m = 7
    bch_t = 10

    [channel]
    party = eve             # or give alpha directly

    [metric]
    t = 10
    deltas = 0.05, 0.15

    [sweep]
    axis = snr_db           # or ebno_db
    start = 3
    stop = 7
    step = 0.5
    trials = 10000
    seed = 1

Unset keys take the defaults of :class:`ScenarioConfig`.
"""
from __future__ import annotations

import configparser
import io
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

SCENARIO_KINDS = ("analytic", "uncoded", "bch", "scrambler", "keyed")
AXES = ("snr_db", "ebno_db")


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


# (section, key) for every config field
_LAYOUT = {
    "kind": "scenario",
    "n": "code", "bch_m": "code", "bch_t": "code", "codewords_per_frame": "code",
    "ldpc_fixture": "code", "max_iters": "code",
    "modulation": "modem", "order": "modem",
    "party": "channel", "alpha": "channel",
    "t": "metric", "deltas": "metric", "s_b": "metric",
    "axis": "sweep", "start": "sweep", "stop": "sweep", "step": "sweep", "trials": "sweep", "seed": "sweep",
    "out_dir": "output",
}


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str = "analytic"
    n: int = 127
    bch_m: int = 7
    bch_t: int = 10
    codewords_per_frame: int = 1
    ldpc_fixture: str = ""
    max_iters: int = 50
    modulation: str = "bpsk"
    order: int = 2
    party: str = ""
    alpha: float = 0.0
    t: int = 10
    deltas: tuple[float, ...] = ()
    s_b: int = 0
    axis: str = "snr_db"
    start: float = 0.0
    stop: float = 0.0
    step: float = 1.0
    trials: int = 1000
    seed: int = 0
    out_dir: str = "results"

    def __post_init__(self):
        validate(self)

    @property
    def grid(self) -> list[float]:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + i * self.step, 10) for i in range(count)]

    def replace(self, **changes) -> ScenarioConfig:
        d = asdict(self)
        d.update(changes)
        return ScenarioConfig(**d)

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        for f in fields(self):
            section = _LAYOUT[f.name]
            if not cp.has_section(section):
                cp.add_section(section)
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ", ".join(repr(x) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            cp.set(section, f.name, str(v))
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def validate(c: ScenarioConfig) -> None:
    if c.kind not in SCENARIO_KINDS:
        raise ConfigError("kind", f"unknown scenario kind {c.kind!r}; expected one of {', '.join(SCENARIO_KINDS)}")
    if c.axis not in AXES:
        raise ConfigError("axis", f"must be one of {', '.join(AXES)}")
    if not c.step > 0:
        raise ConfigError("step", "grid step must be positive")
    if c.stop < c.start:
        raise ConfigError("stop", "grid stop is below start")
    if c.trials < 1:
        raise ConfigError("trials", "must be >= 1")
    if not 2 <= c.bch_m <= 10:
        raise ConfigError("bch_m", "must be in [2, 10]")
    if c.bch_t < 1:
        raise ConfigError("bch_t", "must be >= 1")
    if not 0 <= c.t:
        raise ConfigError("t", "must be >= 0")
    if c.n < 1:
        raise ConfigError("n", "must be >= 1")
    if c.modulation not in ("bpsk", "dpsk"):
        raise ConfigError("modulation", "must be bpsk or dpsk")
    if c.modulation == "dpsk" and c.order not in (2, 4):
        raise ConfigError("order", "DPSK order must be 2 or 4")
    if c.modulation == "bpsk" and c.order != 2:
        raise ConfigError("order", "BPSK order must be 2")
    if c.party and c.party not in ("bob", "eve"):
        raise ConfigError("party", "must be bob or eve")
    if c.alpha < 0:
        raise ConfigError("alpha", "must be >= 0")
    if any(not 0 <= d <= 0.5 for d in c.deltas):
        raise ConfigError("deltas", "each delta must be in [0, 0.5]")
    if c.s_b < 0:
        raise ConfigError("s_b", "must be >= 0 (0 = one message block)")
    if c.codewords_per_frame < 1:
        raise ConfigError("codewords_per_frame", "must be >= 1")
    if c.max_iters < 1:
        raise ConfigError("max_iters", "must be >= 1")
    if c.ldpc_fixture and not Path(c.ldpc_fixture).is_file():
        raise ConfigError("ldpc_fixture", f"fixture file not found: {c.ldpc_fixture}")


def _convert(name: str, raw: str):
    default = ScenarioConfig.__dataclass_fields__[name].default
    try:
        if name == "deltas":
            return tuple(float(x) for x in raw.split(",") if x.strip())
        if isinstance(default, bool):
            return raw.strip().lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError as exc:
        raise ConfigError(name, f"cannot parse {raw!r}") from exc
    return raw.strip()


def parse_config_text(text: str) -> ScenarioConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("file", str(exc)) from exc
    values = {}
    for section in cp.sections():
        for key, raw in cp.items(section):
            if key not in _LAYOUT:
                raise ConfigError(key, f"unknown key in [{section}]")
            if _LAYOUT[key] != section:
                raise ConfigError(key, f"belongs in [{_LAYOUT[key]}], not [{section}]")
            values[key] = _convert(key, raw)
    return ScenarioConfig(**values)


def parse_config(path: Path | str) -> ScenarioConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"file not found: {path}")
    return parse_config_text(path.read_text())
