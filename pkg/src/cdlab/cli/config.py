"""Experiment configuration: JSON documents and shipped presets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .descriptors import DescriptorError, parse_1d, parse_2d


class ConfigError(ValueError):
    pass


METHODS_1D = (
    "sl",
    "spls",
    "upg-quadratic",
    "upg-scaled",
    "upg-exponential",
    "upg-forward",
    "reduced-sl",
    "reduced-spls",
    "greens-inverse",
    "l2-projection",
)
METHODS_2D = ("upg2d", "reduced-2d")
METHODS = METHODS_1D + METHODS_2D
REDUCED = ("reduced-sl", "reduced-spls", "reduced-2d", "l2-projection")
OUTPUTS = ("solution", "errors", "oscillation", "table")
TARGETS = ("M_h", "M_bar", "M_tilde")


@dataclass
class ExperimentConfig:
    method: str
    eps: list = field(default_factory=lambda: [0.0])
    n: list = field(default_factory=lambda: [16])
    f: str = "const:1"
    window: Optional[Union[list, str]] = None
    outputs: list = field(default_factory=lambda: ["solution", "errors"])
    preset: Optional[str] = None
    description: str = ""
    sections: Optional[list] = None
    target: str = "M_tilde"

    @property
    def is_2d(self) -> bool:
        return self.method in METHODS_2D


def _as_list(v, name):
    if isinstance(v, (list, tuple)):
        if not v:
            raise ConfigError(f"{name} must not be empty")
        return list(v)
    return [v]


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    if cfg.method not in METHODS:
        raise ConfigError(f"unknown method {cfg.method!r}; valid: {', '.join(METHODS)}")
    cfg.eps = _as_list(cfg.eps, "eps")
    cfg.n = _as_list(cfg.n, "n")
    for e in cfg.eps:
        if isinstance(e, bool) or not isinstance(e, (int, float)) or e < 0:
            raise ConfigError(f"eps must be a non-negative number, got {e!r}")
    if cfg.method in REDUCED:
        if any(e != 0 for e in cfg.eps):
            raise ConfigError(f"method {cfg.method} is the eps = 0 problem; set eps to 0")
    elif any(e == 0 for e in cfg.eps):
        raise ConfigError(f"method {cfg.method} needs eps > 0")
    for k in cfg.n:
        if isinstance(k, bool) or not isinstance(k, int) or k < 2:
            raise ConfigError(f"n must be an integer >= 2, got {k!r}")
    cfg.outputs = _as_list(cfg.outputs, "outputs")
    bad = [o for o in cfg.outputs if o not in OUTPUTS]
    if bad:
        raise ConfigError(f"unknown outputs {bad}; valid: {', '.join(OUTPUTS)}")
    if "table" in cfg.outputs:
        ns = cfg.n
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ConfigError("table output needs a strictly increasing n list")
        if any(b != 2 * a for a, b in zip(ns, ns[1:])):
            raise ConfigError("table output needs n doubling from row to row")
    if cfg.window is not None:
        w = cfg.window
        if isinstance(w, str):
            head, _, k = w.partition(":")
            if head != "abl" or not k.isdigit():
                raise ConfigError(f"window string must be 'abl:<k>', got {w!r}")
        elif not (isinstance(w, list) and len(w) == 2 and 0 <= w[0] < w[1] <= 1):
            raise ConfigError(f"window must be [a, b] with 0 <= a < b <= 1, got {w!r}")
    if cfg.target not in TARGETS:
        raise ConfigError(f"unknown projection target {cfg.target!r}")
    if cfg.sections is not None:
        cfg.sections = _as_list(cfg.sections, "sections")
        if not all(isinstance(i, int) for i in cfg.sections):
            raise ConfigError("sections must be integers (negative counts from n)")
    try:
        if cfg.is_2d:
            parse_2d(cfg.f)
        else:
            parse_1d(cfg.f)
    except DescriptorError as exc:
        raise ConfigError(f"bad function descriptor: {exc}") from None
    return cfg


# --------------------------------------------------------------------------
# presets

_PRESET_PACKAGE = "cdlab.cli.presets"


def preset_names() -> list:
    files = resources.files(_PRESET_PACKAGE).iterdir()
    return sorted(p.name[:-5] for p in files if p.name.endswith(".json"))


def load_preset(name: str) -> dict:
    names = preset_names()
    if name not in names:
        raise ConfigError(f"unknown preset {name!r}; valid presets: {', '.join(names)}")
    text = resources.files(_PRESET_PACKAGE).joinpath(name + ".json").read_text()
    return json.loads(text)


def from_dict(doc: dict, **overrides) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    doc = dict(doc)
    if doc.get("preset"):
        base = load_preset(doc["preset"])
        base.update({k: v for k, v in doc.items()})
        doc = base
    doc.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "method" not in doc:
        raise ConfigError("config needs a method")
    return validate(ExperimentConfig(**doc))


def load_config(path) -> ExperimentConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from None
    return from_dict(doc)
