"""TOML configuration: one [defaults] table mirroring every module config.

Example:

    [defaults]
    seed = 7
    [defaults.canny]
    low = 0.05
    high = 0.15
    [defaults.synth]
    mode = "voronoi"

Unknown keys are rejected rather than ignored, so typos fail loudly.
"""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .bicolor import CannyConfig
from .contour import ContourConfig
from .losses import LossWeights
from .patchmatch import PMCfg
from .pipeline import PipelineCfg
from .raster import InvalidArgumentError
from .shading import ShadeCfg
from .synthesizer import SynthCfg


@dataclass(frozen=True)
class AppConfig:
    seed: int = 0
    contour: ContourConfig = ContourConfig()
    canny: CannyConfig = CannyConfig()
    synth: SynthCfg = SynthCfg()
    shade: ShadeCfg = ShadeCfg()
    patchmatch: PMCfg = PMCfg()
    weights: LossWeights = LossWeights()
    pipeline: PipelineCfg = PipelineCfg()


def _merge(instance, table: dict, path: str):
    names = {f.name for f in dataclasses.fields(instance)}
    kwargs = {}
    for key, value in table.items():
        if key not in names:
            raise InvalidArgumentError(f"unknown config key {path}.{key}")
        current = getattr(instance, key)
        if dataclasses.is_dataclass(current):
            if not isinstance(value, dict):
                raise InvalidArgumentError(f"{path}.{key} must be a table")
            kwargs[key] = _merge(current, value, f"{path}.{key}")
        elif isinstance(value, list):
            kwargs[key] = tuple(value)
        else:
            kwargs[key] = value
    return dataclasses.replace(instance, **kwargs)


def load_config(path=None) -> AppConfig:
    """Load an AppConfig; with no path, return all defaults."""
    cfg = AppConfig()
    if path is None:
        return cfg
    raw = Path(path).read_bytes()
    try:
        doc = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise InvalidArgumentError(f"cannot parse config: {exc}") from exc
    table = doc.get("defaults", {})
    if not isinstance(table, dict):
        raise InvalidArgumentError("[defaults] must be a table")
    return _merge(cfg, table, "defaults")
