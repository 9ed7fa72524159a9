"""
Scenario configuration: JSON files, command-line overrides and hashing.

A scenario is a plain JSON object. Every key may also be set from the command
line; flags win over file values. The resolved configuration is hashed
(SHA-256 of its canonical JSON) and the hash goes into every run manifest.
"""

import hashlib
import json
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

import bath
from bath import SqueezedBathSpec
import states
from dynamics import Convention, DEFAULT_HORIZON
from errors import ConfigError

log = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "SQUEEZELIGHT_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "out"
STDOUT = "-"
FORMATS = ("csv", "json")
AXES = ("tau", "c1", "theta", "r")

DEFAULT_TAU = {"start": 0.0, "stop": 10.0, "count": 201}

_KEYS = {
    "": {"state", "bath", "method", "grid", "output", "convention", "horizon", "drive_time", "workers"},
    "state": {"c1", "c2", "c3"},
    "bath": {"r", "theta", "beta", "omega_c", "spectral", "omega_0"},
    "method": {"name", "rel_tol", "abs_tol"},
    "grid": set(AXES),
    "output": {"path", "format"},
}
_AXIS_KEYS = ({"start", "stop", "count"}, {"values"})


@dataclass(frozen=True)
class Axis:
    values: tuple

    @classmethod
    def parse(cls, raw, where):
        if not isinstance(raw, dict):
            raise ConfigError(f"{where}: expected an object, got {type(raw).__name__}")
        keys = set(raw)
        if keys == _AXIS_KEYS[1]:
            values = raw["values"]
            if not isinstance(values, list) or not values:
                raise ConfigError(f"{where}.values: expected a non-empty list")
            return cls(tuple(_number(v, f"{where}.values") for v in values))
        if keys == _AXIS_KEYS[0]:
            start = _number(raw["start"], f"{where}.start")
            stop = _number(raw["stop"], f"{where}.stop")
            count = raw["count"]
            if not isinstance(count, int) or isinstance(count, bool) or count < 1:
                raise ConfigError(f"{where}.count: expected a positive integer, got {count!r}")
            return cls(tuple(float(v) for v in np.linspace(start, stop, count)))
        raise ConfigError(f"{where}: give either start/stop/count or values, got keys {sorted(keys)}")

    def to_dict(self):
        return {"values": list(self.values)}


@dataclass(frozen=True)
class MethodConfig:
    name: str = "auto"
    rel_tol: float = bath.DEFAULT_REL_TOL
    abs_tol: float = bath.DEFAULT_ABS_TOL

    def __post_init__(self):
        if self.name not in ("auto", *(m.value for m in bath.Method)):
            raise ConfigError(f"method.name: unknown method '{self.name}'")
        for key in ("rel_tol", "abs_tol"):
            value = getattr(self, key)
            if not isinstance(value, (int, float)) or not value > 0.0:
                raise ConfigError(f"method.{key}: expected a positive number, got {value!r}")

    def to_dict(self):
        return {"name": self.name, "rel_tol": self.rel_tol, "abs_tol": self.abs_tol}


@dataclass(frozen=True)
class OutputConfig:
    path: str = None
    format: str = "csv"

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ConfigError(f"output.format: expected one of {', '.join(FORMATS)}, got '{self.format}'")

    @property
    def to_stdout(self):
        return self.path == STDOUT

    def to_dict(self):
        return {"path": self.path, "format": self.format}


@dataclass(frozen=True)
class ScenarioConfig:
    state: states.XStateParams = field(default_factory=lambda: states.XStateParams(0.5, 0.0, 0.3))
    bath: SqueezedBathSpec = field(default_factory=SqueezedBathSpec)
    method: MethodConfig = field(default_factory=MethodConfig)
    grid: dict = field(default_factory=dict)
    output: OutputConfig = field(default_factory=OutputConfig)
    convention: Convention = Convention.TIME_AVERAGE
    horizon: float = DEFAULT_HORIZON
    drive_time: float = 1.0
    workers: int = None

    def profile(self):
        if self.method.name == "auto":
            return bath.DephasingProfile.for_bath(self.bath, self.method.rel_tol, self.method.abs_tol)
        return bath.DephasingProfile(self.bath, self.method.name, self.method.rel_tol, self.method.abs_tol)

    def axis(self, name):
        """Resolved axis values; theta and r fall back to the bath, tau to the default range."""
        if name in self.grid:
            return self.grid[name].values
        if name == "tau":
            return Axis.parse(DEFAULT_TAU, "grid.tau").values
        if name == "theta":
            return (self.bath.theta,)
        if name == "r":
            return (self.bath.r,)
        if name == "c1":
            return (self.state.c1,)
        raise KeyError(name)

    def squeezing_points(self):
        """
        (theta, r) pairs swept by a run: the theta axis at the bath's r, then
        the r axis at the bath's theta, first occurrence kept.
        """
        points = [(t, self.bath.r) for t in self.axis("theta")]
        points += [(self.bath.theta, r) for r in self.axis("r")]
        seen, unique = set(), []
        for theta, r in points:
            key = (theta % bath.TWO_PI, r)
            if key not in seen:
                seen.add(key)
                unique.append((theta, r))
        return unique

    def profiles(self):
        """(theta, r, DephasingProfile) for every squeezing point."""
        base = self.profile()
        return [(t, r, base.with_bath(self.bath.with_squeezing(r=r, theta=t))) for t, r in self.squeezing_points()]

    def to_dict(self):
        return {
            "state": dict(zip(("c1", "c2", "c3"), self.state.as_tuple())),
            "bath": self.bath.to_dict(),
            "method": self.method.to_dict(),
            "grid": {name: self.grid[name].to_dict() for name in sorted(self.grid)},
            "output": self.output.to_dict(),
            "convention": self.convention.value,
            "horizon": self.horizon,
            "drive_time": self.drive_time,
            "workers": self.workers,
        }


# --- Parsing ---

def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{where}: expected a finite number, got {value!r}")
    return float(value)


def _check_keys(raw, section):
    where = section or "config"
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected an object, got {type(raw).__name__}")
    unknown = sorted(set(raw) - _KEYS[section])
    if unknown:
        prefix = f"{section}." if section else ""
        raise ConfigError(f"unknown configuration key '{prefix}{unknown[0]}'")


def _beta(value):
    if value is None or value == "inf":
        return bath.ZERO_TEMPERATURE
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"bath.beta: expected a positive number, \"inf\" or null, got {value!r}")
    return float(value)


def parse_config(raw):
    """Build a ScenarioConfig from a decoded JSON object."""
    _check_keys(raw, "")
    for section in ("state", "bath", "method", "grid", "output"):
        _check_keys(raw.get(section, {}), section)

    s = raw.get("state", {})
    state = states.XStateParams(
        _number(s.get("c1", 0.5), "state.c1"),
        _number(s.get("c2", 0.0), "state.c2"),
        _number(s.get("c3", 0.3), "state.c3"),
    )

    b = raw.get("bath", {})
    spec = bath.SqueezedBathSpec(
        r=_number(b.get("r", 0.0), "bath.r"),
        theta=_number(b.get("theta", 0.0), "bath.theta"),
        beta=_beta(b.get("beta")),
        omega_c=_number(b.get("omega_c", 1.0), "bath.omega_c"),
        spectral=b.get("spectral", "ohmic"),
        omega_0=_number(b.get("omega_0", 1.0), "bath.omega_0"),
    )

    m = raw.get("method", {})
    method = MethodConfig(
        name=m.get("name", "auto"),
        rel_tol=m.get("rel_tol", bath.DEFAULT_REL_TOL),
        abs_tol=m.get("abs_tol", bath.DEFAULT_ABS_TOL),
    )

    grid = {name: Axis.parse(axis, f"grid.{name}") for name, axis in raw.get("grid", {}).items()}

    o = raw.get("output", {})
    output = OutputConfig(path=o.get("path"), format=o.get("format", "csv"))

    try:
        convention = Convention(raw.get("convention", Convention.TIME_AVERAGE.value))
    except ValueError:
        known = ", ".join(c.value for c in Convention)
        raise ConfigError(f"convention: expected one of {known}, got {raw.get('convention')!r}") from None

    horizon = _number(raw.get("horizon", DEFAULT_HORIZON), "horizon")
    drive_time = _number(raw.get("drive_time", 1.0), "drive_time")
    if horizon <= 0.0:
        raise ConfigError(f"horizon: must be > 0, got {horizon!r}")
    if drive_time <= 0.0:
        raise ConfigError(f"drive_time: must be > 0, got {drive_time!r}")

    workers = raw.get("workers")
    if workers is not None and (not isinstance(workers, int) or isinstance(workers, bool) or workers < 1):
        raise ConfigError(f"workers: expected a positive integer, got {workers!r}")

    cfg = ScenarioConfig(state, spec, method, grid, output, convention, horizon, drive_time, workers)
    cfg.profile()
    return cfg


def load_config(path):
    """Read and decode a scenario file. OSError propagates; bad JSON is a ConfigError."""
    with open(path, "r", encoding="utf-8") as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a JSON object at the top level, got {type(raw).__name__}")
    return raw


# --- Command-line overrides ---

def _set(raw, dotted, value):
    if value is None:
        return
    section, _, key = dotted.rpartition(".")
    target = raw
    if section:
        target = raw.setdefault(section, {})
    target[key] = value


def _range(triple, where):
    start, stop, count = triple
    try:
        return {"start": float(start), "stop": float(stop), "count": int(count)}
    except ValueError:
        raise ConfigError(f"{where}: expected START STOP COUNT, got {' '.join(triple)}") from None


def apply_overrides(raw, args):
    """Merge argparse flags into a raw config dict (a copy is returned)."""
    merged = json.loads(json.dumps(raw))
    get = lambda name: getattr(args, name, None)
    for name, dotted in (
        ("c1", "state.c1"), ("c2", "state.c2"), ("c3", "state.c3"),
        ("r", "bath.r"), ("theta", "bath.theta"), ("omega_c", "bath.omega_c"),
        ("method", "method.name"), ("rel_tol", "method.rel_tol"), ("abs_tol", "method.abs_tol"),
        ("output", "output.path"), ("format", "output.format"),
        ("convention", "convention"), ("horizon", "horizon"),
        ("drive_time", "drive_time"), ("workers", "workers"),
    ):
        _set(merged, dotted, get(name))
    beta = get("beta")
    if beta is not None:
        if beta.lower() in ("inf", "none"):
            beta = "inf"
        else:
            try:
                beta = float(beta)
            except ValueError:
                raise ConfigError(f"--beta: expected a number or 'inf', got {beta!r}") from None
        merged.setdefault("bath", {})["beta"] = beta
    if get("tau") is not None:
        merged.setdefault("grid", {})["tau"] = _range(get("tau"), "--tau")
    if get("c1_range") is not None:
        merged.setdefault("grid", {})["c1"] = _range(get("c1_range"), "--c1-range")
    if get("thetas") is not None:
        merged.setdefault("grid", {})["theta"] = {"values": [float(v) for v in get("thetas")]}
    if get("rs") is not None:
        merged.setdefault("grid", {})["r"] = {"values": [float(v) for v in get("rs")]}
    return merged


def add_config_arguments(parser):
    """Flag namespace shared by every computing subcommand."""
    g = parser.add_argument_group("scenario")
    g.add_argument("--config", help="JSON scenario file")
    g.add_argument("--c1", type=float, help="state.c1")
    g.add_argument("--c2", type=float, help="state.c2")
    g.add_argument("--c3", type=float, help="state.c3")
    g.add_argument("--r", type=float, help="bath.r, squeezing strength")
    g.add_argument("--theta", type=float, help="bath.theta, squeezing phase (radians)")
    g.add_argument("--beta", help="bath.beta, inverse temperature or 'inf'")
    g.add_argument("--omega-c", dest="omega_c", type=float, help="bath.omega_c, cutoff frequency")
    g.add_argument("--method", choices=["auto", *(m.value for m in bath.Method)], help="method.name")
    g.add_argument("--rel-tol", dest="rel_tol", type=float, help="method.rel_tol")
    g.add_argument("--abs-tol", dest="abs_tol", type=float, help="method.abs_tol")
    g.add_argument("--tau", nargs=3, metavar=("START", "STOP", "COUNT"), help="grid.tau")
    g.add_argument("--c1-range", dest="c1_range", nargs=3, metavar=("START", "STOP", "COUNT"), help="grid.c1")
    g.add_argument("--thetas", nargs="+", type=float, help="grid.theta values")
    g.add_argument("--rs", nargs="+", type=float, help="grid.r values")
    g.add_argument("--output", help="output.path ('-' for stdout)")
    g.add_argument("--format", choices=FORMATS, help="output.format")
    g.add_argument("--convention", choices=[c.value for c in Convention], help="amplification-rate convention")
    g.add_argument("--horizon", type=float, help="amplification window")
    g.add_argument("--drive-time", dest="drive_time", type=float, help="QSL drive time")
    g.add_argument("--workers", type=int, help="worker threads (default: all cores)")
    return parser


def merge_sections(raw, update):
    """Layer `update` over `raw`; sections merge key by key, scalars replace."""
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(raw.get(key), dict):
            raw[key] = {**raw[key], **value}
        else:
            raw[key] = value
    return raw


def resolve(args, base=None):
    """Preset/base values, then the config file (if any), then flags."""
    raw = json.loads(json.dumps(base)) if base else {}
    if getattr(args, "config", None):
        loaded = load_config(args.config)
        _check_keys(loaded, "")
        merge_sections(raw, loaded)
    return parse_config(apply_overrides(raw, args))


# --- Hashing and output paths ---

def canonical_json(cfg):
    data = cfg.to_dict() if isinstance(cfg, ScenarioConfig) else cfg
    return json.dumps(data, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_hash(cfg):
    return hashlib.sha256(canonical_json(cfg).encode("utf-8")).hexdigest()


def default_output_dir():
    return os.environ.get(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR)


def output_path(cfg, stem):
    """Configured output path, or <output dir>/<stem>.<format>."""
    if cfg.output.path:
        return cfg.output.path
    return os.path.join(default_output_dir(), f"{stem}.{cfg.output.format}")


def validate_output_path(path):
    """
    (ok, msg) for a prospective artifact path: the target must not be a
    directory and its parent must exist or be creatable and be writable.
    """
    if path == STDOUT:
        return True, "stdout"
    abs_path = os.path.abspath(path)
    if os.path.isdir(abs_path):
        return False, f"{path} is a directory"
    parent = os.path.dirname(abs_path)
    ancestor = parent
    while not os.path.exists(ancestor):
        ancestor = os.path.dirname(ancestor)
    if not os.path.isdir(ancestor):
        return False, f"{ancestor} is not a directory"
    if not os.access(ancestor, os.W_OK):
        return False, f"{ancestor} is not writable"
    return True, "path writable"


def ensure_output_path(path):
    ok, msg = validate_output_path(path)
    if not ok:
        raise OSError(f"cannot write output: {msg}")
    if path != STDOUT:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    return path


def schema():
    """JSON Schema of a scenario file."""
    number = {"type": "number"}
    axis = {
        "oneOf": [
            {"type": "object", "additionalProperties": False, "required": ["start", "stop", "count"],
             "properties": {"start": number, "stop": number, "count": {"type": "integer", "minimum": 1}}},
            {"type": "object", "additionalProperties": False, "required": ["values"],
             "properties": {"values": {"type": "array", "items": number, "minItems": 1}}},
        ]
    }

    def section(properties):
        return {"type": "object", "additionalProperties": False, "properties": properties}

    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "squeezelight scenario",
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "state": section({"c1": number, "c2": number, "c3": number}),
            "bath": section({
                "r": {"type": "number", "minimum": 0},
                "theta": number,
                "beta": {"oneOf": [{"type": "number", "exclusiveMinimum": 0}, {"const": "inf"}, {"type": "null"}]},
                "omega_c": {"type": "number", "exclusiveMinimum": 0},
                "spectral": {"type": "string", "enum": bath.available_spectral_densities()},
                "omega_0": number,
            }),
            "method": section({
                "name": {"enum": ["auto", *(m.value for m in bath.Method)]},
                "rel_tol": {"type": "number", "exclusiveMinimum": 0},
                "abs_tol": {"type": "number", "exclusiveMinimum": 0},
            }),
            "grid": section({name: axis for name in AXES}),
            "output": section({"path": {"type": ["string", "null"]}, "format": {"enum": list(FORMATS)}}),
            "convention": {"enum": [c.value for c in Convention]},
            "horizon": {"type": "number", "exclusiveMinimum": 0},
            "drive_time": {"type": "number", "exclusiveMinimum": 0},
            "workers": {"type": ["integer", "null"], "minimum": 1},
        },
    }
