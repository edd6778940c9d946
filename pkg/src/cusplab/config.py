"""Run configuration: strict JSON with per-scenario validation."""

from dataclasses import asdict, dataclass, field, fields
import json
import math

from .errors import ConfigError, DomainError
from .models import ModelParams
from .propagate import GridSpec

SCENARIOS = ("free_vaporized", "hydrogen_field", "delta_well_field", "synthetic")

_TOP_KEYS = {"scenario", "params", "grid", "outputs", "seed", "times", "radii", "synthetic"}
_SYNTH_KEYS = {"amplitude", "nu", "eta", "noise", "t_max", "dt", "omegas"}

# Scenario defaults, chosen so every command finishes within seconds.
_DEFAULT_GRIDS = {
    "free_vaporized": GridSpec("radial", 60.0, 0.008, 2e-4, 2500),
    "hydrogen_field": GridSpec("radial", 30.0, 0.01, 1e-3, 50, l_max=2),
    "delta_well_field": GridSpec("line", 40.0, 0.01, 1e-3, 200),
    "synthetic": GridSpec("radial", 1.0, 0.01, 1e-3, 0),
}
_DEFAULT_PARAMS = {
    "free_vaporized": {},
    "hydrogen_field": {"field": 0.01},
    "delta_well_field": {"field": 0.01, "dim": 1},
    "synthetic": {},
}
DEFAULT_TIMES = (0.0, 0.2, 0.5, 1.0)
DEFAULT_RADII = (0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0)


@dataclass(frozen=True)
class SyntheticSpec:
    """Synthetic dipole ``mu = A t^nu e^{-eta t}`` with multiplicative noise."""

    amplitude: float = 1.0
    nu: float = 4.5
    eta: float = 0.1
    noise: float = 0.0
    t_max: float = 600.0
    dt: float = 1e-3
    omegas: tuple = (20.0, 30.0, 50.0, 70.0, 100.0)


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    params: ModelParams
    grid: GridSpec
    outputs: str = "out"
    seed: int = 0
    times: tuple = DEFAULT_TIMES
    radii: tuple = DEFAULT_RADII
    synthetic: SyntheticSpec = field(default_factory=SyntheticSpec)

    def to_dict(self):
        d = asdict(self)
        d["times"], d["radii"] = list(self.times), list(self.radii)
        d["synthetic"]["omegas"] = list(self.synthetic.omegas)
        return d


def _check_keys(block, allowed, where):
    if not isinstance(block, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _number_list(val, name, min_value):
    if not isinstance(val, list) or not val:
        raise ConfigError(f"{name} must be a non-empty list of numbers")
    out = []
    for v in val:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigError(f"{name} entries must be finite numbers")
        if v < min_value:
            raise ConfigError(f"{name} entries must be >= {min_value}")
        out.append(float(v))
    return tuple(out)


def _build(cls, block, where, defaults=None):
    names = {f.name for f in fields(cls)}
    _check_keys(block, names, where)
    merged = dict(defaults or {})
    merged.update(block)
    try:
        return cls(**merged)
    except (DomainError, ConfigError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def config_from_dict(d):
    """Validate a decoded JSON document; raise ConfigError naming the offending key."""
    _check_keys(d, _TOP_KEYS, "config")
    scenario = d.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario must be one of {', '.join(SCENARIOS)}; got {scenario!r}")
    params = _build(ModelParams, d.get("params", {}), "params", _DEFAULT_PARAMS[scenario])
    grid = _build(GridSpec, d.get("grid", {}), "grid", asdict(_DEFAULT_GRIDS[scenario]))
    synth_block = dict(d.get("synthetic", {}))
    _check_keys(synth_block, _SYNTH_KEYS, "synthetic")
    if "omegas" in synth_block:
        synth_block["omegas"] = _number_list(synth_block["omegas"], "synthetic.omegas", 0.0)
    synthetic = _build(SyntheticSpec, synth_block, "synthetic")
    seed = d.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed must be a non-negative integer")
    outputs = d.get("outputs", "out")
    if not isinstance(outputs, str) or not outputs:
        raise ConfigError("outputs must be a directory path")
    times = _number_list(d["times"], "times", 0.0) if "times" in d else DEFAULT_TIMES
    radii = _number_list(d["radii"], "radii", 0.0) if "radii" in d else DEFAULT_RADII

    if scenario == "free_vaporized" and (grid.kind != "radial" or params.field != 0):
        raise ConfigError("free_vaporized needs a radial grid and field = 0")
    if scenario == "hydrogen_field":
        if grid.kind != "radial" or params.dim != 3:
            raise ConfigError("hydrogen_field needs a radial grid and dim = 3")
        if params.field != 0 and grid.l_max < 1:
            raise ConfigError("hydrogen_field with a field needs grid.l_max >= 1")
    if scenario == "delta_well_field" and (grid.kind != "line" or params.dim != 1):
        raise ConfigError("delta_well_field needs a line grid and dim = 1")
    if scenario == "synthetic":
        s = synthetic
        if not (s.t_max > 0 and s.dt > 0 and s.eta >= 0 and s.noise >= 0 and s.nu > 0):
            raise ConfigError("synthetic needs t_max, dt, nu > 0 and eta, noise >= 0")
    return RunConfig(scenario, params, grid, outputs, seed, times, radii, synthetic)


def load_config(path):
    """Read a JSON config file; duplicate keys are rejected as well."""
    def pairs(items):
        keys = [k for k, _ in items]
        dup = sorted({k for k in keys if keys.count(k) > 1})
        if dup:
            raise ConfigError(f"duplicate key(s): {', '.join(dup)}")
        return dict(items)

    try:
        with open(path) as fh:
            d = json.load(fh, object_pairs_hook=pairs)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(d)


def default_config(scenario):
    return config_from_dict({"scenario": scenario})
