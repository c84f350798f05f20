"""Experiment specifications and the flat ``key=value`` config file format.

Example file::

    n_t=32
    n_r=1
    m_y=8
    m_z=8
    r_bs=8
    r_ue=1
    q=16
    rounds=4
    snr_db_list=-15,-10,-5,0,5
    methods=full-csi,exhaustive,multidirectional,hierarchical

Blank lines and lines starting with ``#`` are ignored. Unknown keys are an
error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from risbeam.channel import ChannelConfig
from risbeam.errors import ConfigurationError
from risbeam.geometry import BeamMode
from risbeam.sounding import SoundingConfig
from risbeam.system import SystemConfig

KINDS = ("ba-prob", "rate-curve", "predict", "decode-demo")
METHODS = ("exhaustive", "hierarchical", "multidirectional", "full-csi")

_INT_KEYS = (
    "n_t", "n_r", "m_y", "m_z", "r_bs", "r_ue", "q", "rounds", "branching",
    "nlos_paths_br", "nlos_paths_ru", "trials", "hier_budget_slots",
)
_FLOAT_KEYS = ("rician_br_db", "rician_ru_db")
KEYS = frozenset(_INT_KEYS + _FLOAT_KEYS + ("on_grid", "snr_db_list", "methods", "ris_beam_mode"))


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    system: SystemConfig
    channel: ChannelConfig
    snr_db_list: tuple[float, ...] = (0.0,)
    methods: tuple[str, ...] = ("exhaustive", "hierarchical", "multidirectional")
    trials: int = 1000
    seed: int = 0
    workers: int = 1
    noiseless: bool = False
    combinatorial: bool = False
    hier_budget_slots: int | None = None
    target: float = 0.99

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.methods:
            raise ConfigurationError("methods must not be empty")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ConfigurationError(f"unknown methods {sorted(bad)}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.kind == "rate-curve" and not self.snr_db_list:
            raise ValueError("rate-curve needs a nonempty snr_db_list")

    def sounding(self, snr_db: float) -> SoundingConfig:
        if self.noiseless:
            return SoundingConfig(snr_db=math.inf, noiseless=True)
        return SoundingConfig(snr_db=snr_db)


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"not a boolean: {text!r}")


def parse_config_text(text: str) -> dict:
    """Parse ``key=value`` lines into typed values; rejects unknown keys."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _INT_KEYS:
                out[key] = int(value)
            elif key in _FLOAT_KEYS:
                out[key] = float(value)
            elif key == "on_grid":
                out[key] = _parse_bool(value)
            elif key == "snr_db_list":
                out[key] = tuple(float(v) for v in value.split(",") if v.strip())
            elif key == "methods":
                out[key] = tuple(v.strip() for v in value.split(",") if v.strip())
            else:
                out[key] = BeamMode(value).value
        except ValueError as exc:
            raise ConfigurationError(f"line {lineno}: bad value for {key}: {exc}") from None
    return out


def build_spec(kind: str, values: dict, **overrides) -> ExperimentSpec:
    """Assemble an :class:`ExperimentSpec` from parsed config values.

    Missing keys fall back to the Fig. 3 toy sizes (8x4x8, groups 4/2/2).
    """
    v = dict(values)
    system = SystemConfig(
        n_t=v.get("n_t", 8),
        n_r=v.get("n_r", 4),
        m_y=v.get("m_y", 8),
        m_z=v.get("m_z", 1),
        r_bs=v.get("r_bs", 4),
        r_ue=v.get("r_ue", 2),
        q=v.get("q", 2),
        rounds=v.get("rounds", 3),
        branching=v.get("branching", 2),
        ris_beam_mode=v.get("ris_beam_mode", BeamMode.PHASE_ONLY),
    )
    channel = ChannelConfig(
        n_t=system.n_t,
        n_r=system.n_r,
        m_y=system.m_y,
        m_z=system.m_z,
        rician_br_db=v.get("rician_br_db", 13.2),
        rician_ru_db=v.get("rician_ru_db", 13.2),
        nlos_paths_br=v.get("nlos_paths_br", 3),
        nlos_paths_ru=v.get("nlos_paths_ru", 3),
        on_grid=v.get("on_grid", kind != "rate-curve"),
    )
    fields = dict(
        kind=kind,
        system=system,
        channel=channel,
        trials=v.get("trials", 1000),
        hier_budget_slots=v.get("hier_budget_slots"),
    )
    if "snr_db_list" in v:
        fields["snr_db_list"] = v["snr_db_list"]
    if "methods" in v:
        fields["methods"] = v["methods"]
    fields.update({k: val for k, val in overrides.items() if val is not None})
    return ExperimentSpec(**fields)


def load_spec(kind: str, path: str | Path | None, **overrides) -> ExperimentSpec:
    values = parse_config_text(Path(path).read_text(encoding="utf-8")) if path else {}
    return build_spec(kind, values, **overrides)

