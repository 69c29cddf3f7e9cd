"""Run configuration files.

A config is a flat JSON object.  Recognised keys and defaults:

    g                   nonlinear gain                      (required)
    eta_B               Bob detection efficiency            1.0
    eta_A               Alice trigger efficiency            1.0
    pm_noise            relative PM gain spread             0.0
    threshold           absolute filter threshold           0.0
    threshold_multiple  multiple of mean arm signal; null -> absolute threshold
                                                            8.0
    phi_B               Bob analysis phase (rad)            0.0
    phi_A_list          list of Alice phases (rad)          -
    n_phases            evenly spaced scan points over [0, 2pi), used when
                        phi_A_list is absent                12
    trials              trials per scan point               100000
    seed                64-bit seed                         0
    discriminator       orthogonality_filter | ideal_parity | ideal_difference
    block_size          trials per random stream            65536
    workers             worker threads                      1
    decorrelate         replace Alice outcomes by a fair coin   false
    dense_cutoff        Fock cutoff for ideal_difference    40
"""
from dataclasses import asdict
import json
import math

from .detection import DetectionParams
from .experiment import Discriminator, ExperimentConfig
from .macrostate import make_gain

DEFAULTS = {
    "eta_B": 1.0,
    "eta_A": 1.0,
    "pm_noise": 0.0,
    "threshold": 0.0,
    "threshold_multiple": 8.0,
    "phi_B": 0.0,
    "n_phases": 12,
    "trials": 100_000,
    "seed": 0,
    "discriminator": Discriminator.ORTHOGONALITY_FILTER.value,
    "block_size": 1 << 16,
    "workers": 1,
    "decorrelate": False,
    "dense_cutoff": 40,
}
KNOWN = set(DEFAULTS) | {"g", "phi_A_list"}


class ConfigError(ValueError):
    pass


def _line_of(text: str, key: str) -> str:
    for n, line in enumerate(text.splitlines(), 1):
        if f'"{key}"' in line:
            return f"line {n}: "
    return ""


def parse_config(text: str, overrides: dict | None = None) -> dict:
    """Validate config text into a complete flat dict (defaults filled in)."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(raw) - KNOWN)
    if unknown:
        raise ConfigError(f"{_line_of(text, unknown[0])}unknown field {unknown[0]!r}")
    cfg = dict(DEFAULTS)
    cfg.update(raw)
    for k, v in (overrides or {}).items():
        if v is not None:
            cfg[k] = v
    if "g" not in cfg:
        raise ConfigError("missing required field 'g'")

    def field(key, kind, check=None, desc=""):
        v = cfg[key]
        try:
            if kind is bool:
                if not isinstance(v, bool):
                    raise TypeError
            elif kind is int:
                if isinstance(v, bool) or int(v) != v:
                    raise TypeError
                v = int(v)
            else:
                v = kind(v)
        except (TypeError, ValueError):
            raise ConfigError(f"{_line_of(text, key)}field {key!r}: expected {kind.__name__}, got {cfg[key]!r}") from None
        if check is not None and not check(v):
            raise ConfigError(f"{_line_of(text, key)}field {key!r}: {desc}, got {v!r}")
        cfg[key] = v

    field("g", float, lambda v: math.isfinite(v) and v >= 0, "must be finite and >= 0")
    field("eta_B", float, lambda v: 0 <= v <= 1, "must lie in [0, 1]")
    field("eta_A", float, lambda v: 0 <= v <= 1, "must lie in [0, 1]")
    field("pm_noise", float, lambda v: v >= 0, "must be >= 0")
    field("threshold", float, lambda v: v >= 0, "must be >= 0")
    if cfg["threshold_multiple"] is not None:
        field("threshold_multiple", float, lambda v: v >= 0, "must be >= 0 or null")
    field("phi_B", float, math.isfinite, "must be finite")
    field("n_phases", int, lambda v: v >= 1, "must be >= 1")
    field("trials", int, lambda v: v > 0, "must be > 0")
    field("seed", int, lambda v: 0 <= v < 2 ** 64, "must be a 64-bit unsigned integer")
    field("block_size", int, lambda v: v > 0, "must be > 0")
    field("workers", int, lambda v: v > 0, "must be > 0")
    field("decorrelate", bool)
    field("dense_cutoff", int, lambda v: v >= 1, "must be >= 1")
    try:
        cfg["discriminator"] = Discriminator(cfg["discriminator"]).value
    except ValueError:
        choices = ", ".join(d.value for d in Discriminator)
        raise ConfigError(f"{_line_of(text, 'discriminator')}field 'discriminator': "
                          f"expected one of {choices}") from None
    if "phi_A_list" in cfg:
        lst = cfg["phi_A_list"]
        if not isinstance(lst, list) or not lst:
            raise ConfigError(f"{_line_of(text, 'phi_A_list')}field 'phi_A_list': "
                              "expected a nonempty list of phases")
        try:
            cfg["phi_A_list"] = [float(x) for x in lst]
        except (TypeError, ValueError):
            raise ConfigError(f"{_line_of(text, 'phi_A_list')}field 'phi_A_list': "
                              "entries must be numbers") from None
        if not all(math.isfinite(x) for x in cfg["phi_A_list"]):
            raise ConfigError("field 'phi_A_list': phases must be finite")
    else:
        n = cfg["n_phases"]
        cfg["phi_A_list"] = [2 * math.pi * k / n for k in range(n)]
    return cfg


def to_experiment(cfg: dict) -> ExperimentConfig:
    return ExperimentConfig(
        gain=make_gain(cfg["g"]),
        detection=DetectionParams(eta_B=cfg["eta_B"], eta_A=cfg["eta_A"],
                                  pm_noise=cfg["pm_noise"], threshold=cfg["threshold"]),
        phi_B=cfg["phi_B"],
        phi_A_list=tuple(cfg["phi_A_list"]),
        trials=cfg["trials"],
        seed=cfg["seed"],
        discriminator=cfg["discriminator"],
        threshold_multiple=cfg["threshold_multiple"],
        block_size=cfg["block_size"],
        workers=cfg["workers"],
        decorrelate=cfg["decorrelate"],
        dense_cutoff=cfg["dense_cutoff"],
    )


def load_config(path, overrides: dict | None = None) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
    return parse_config(text, overrides)
