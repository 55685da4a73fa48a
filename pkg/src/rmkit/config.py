"""Run configuration: defaults, config-file parsing, CLI overrides.

Precedence is defaults < config file < command-line flags.  Config files
are flat key=value lines (# comments allowed); keys match RunConfig field
names.  The resolved configuration is echoed to stderr one key=value per
line so runs are reproducible from their logs.
"""

import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path


def _opt_float(s):
    if isinstance(s, str) and s.strip().lower() == "none":
        return None
    return float(s)


def _scales(s):
    parts = [p for p in str(s).split(",") if p.strip()]
    if not parts:
        raise ValueError("scales must be a comma-separated float list")
    return tuple(float(p) for p in parts)


@dataclass(frozen=True)
class RunConfig:
    # outline extraction
    eps: float = None
    sigma: float = 1.0
    scales: tuple = (0.5, 1.0, 2.0)
    boundary: str = "replicate"
    threshold: float = 0.0
    indicator: str = "k-eff"
    # metrics
    tol: float = 3.0
    ssim_l: float = 1.0
    # synthetic generators
    gamma: float = 0.1
    k: float = 1.0
    wall_loss_db: float = 10.0
    floor_db: float = -150.0
    reflection_order: int = 2
    # gray-image interpretation
    gray_mode: str = "direct"
    p_min_db: float = -100.0
    p_max_db: float = 0.0
    # localization
    stride: int = 1
    knn_k: int = 5
    n_queries: int = 1000
    noise_sigma: float = 0.0
    # diffusion simulation
    steps: int = 50
    runs: int = 1000
    mu0: float = 2.0
    var0: float = 1.0
    # radio defaults carried into generated scenes
    tx_power_dbm: float = 23.0
    carrier_hz: float = 5.9e9
    tx_height_m: float = 1.5
    building_height_m: float = 25.0
    # execution
    jobs: int = 1
    seed: int = 0


_CONVERTERS = {
    "eps": _opt_float,
    "sigma": float,
    "scales": _scales,
    "boundary": str,
    "threshold": float,
    "indicator": str,
    "tol": float,
    "ssim_l": float,
    "gamma": float,
    "k": float,
    "wall_loss_db": float,
    "floor_db": float,
    "reflection_order": int,
    "gray_mode": str,
    "p_min_db": float,
    "p_max_db": float,
    "stride": int,
    "knn_k": int,
    "n_queries": int,
    "noise_sigma": float,
    "steps": int,
    "runs": int,
    "mu0": float,
    "var0": float,
    "tx_power_dbm": float,
    "carrier_hz": float,
    "tx_height_m": float,
    "building_height_m": float,
    "jobs": int,
    "seed": int,
}

FIELD_NAMES = tuple(f.name for f in dataclasses.fields(RunConfig))


def converter_for(name):
    return _CONVERTERS[name]


def load_config_file(path):
    """Read key=value lines into a raw string dict (no conversion yet)."""
    raw = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError("malformed config line: %r" % line)
        key, _, value = line.partition("=")
        raw[key.strip()] = value.strip()
    return raw


def apply_overrides(cfg, raw):
    """Apply a raw string dict onto a RunConfig; unknown keys are errors."""
    updates = {}
    for key, value in raw.items():
        if key not in _CONVERTERS:
            raise ValueError("unknown config key %r" % key)
        updates[key] = _CONVERTERS[key](value)
    return dataclasses.replace(cfg, **updates)


def _format_value(v):
    if v is None:
        return "none"
    if isinstance(v, tuple):
        return ",".join(repr(float(s)) for s in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def echo_config(cfg, stream=None):
    """Print the resolved configuration, one key=value line per field."""
    out = sys.stderr if stream is None else stream
    for f in dataclasses.fields(cfg):
        print("%s=%s" % (f.name, _format_value(getattr(cfg, f.name))), file=out)
