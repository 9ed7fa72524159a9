"""
Named scenarios for the standard sweeps over both state families.

A preset is a subcommand plus a scenario dict in the same shape as a config
file, so `preset <name>` is exactly `<command> --config presets/<name>.json`.
"""

import math
from dataclasses import dataclass

from errors import ConfigError

QUARTER_PI = math.pi / 4.0
HALF_PI = math.pi / 2.0

FAMILY_A = {"c2": 0.0, "c3": 0.3}
FAMILY_B = {"c2": 0.6, "c3": -0.6}

THETAS = {"values": [0.0, QUARTER_PI, HALF_PI]}
RS = {"values": [0.1, 0.5, 1.0]}
TAU = {"start": 0.0, "stop": 10.0, "count": 201}


@dataclass(frozen=True)
class Preset:
    name: str
    command: str
    description: str
    config: dict


def _state(c1, family):
    return {"c1": c1, **family}


PRESETS = {p.name: p for p in (
    Preset("traces-theta", "trace", "discord traces at r = 0.5 for three squeezing phases",
           {"state": _state(0.5, FAMILY_A), "bath": {"r": 0.5, "theta": 0.0},
            "grid": {"tau": TAU, "theta": THETAS}}),
    Preset("traces-r", "trace", "discord traces at theta = pi/2 for three squeezing strengths",
           {"state": _state(0.5, FAMILY_A), "bath": {"r": 0.1, "theta": HALF_PI},
            "grid": {"tau": TAU, "r": RS}}),
    Preset("critical-times", "critical", "critical time against c1 for the phase and strength families",
           {"state": _state(0.5, FAMILY_A), "bath": {"r": 0.5, "theta": HALF_PI},
            "grid": {"c1": {"start": 0.31, "stop": 0.59, "count": 29}, "theta": THETAS, "r": RS}}),
    Preset("phase-a", "phase", "Q(tau, c1) with c2 = 0, c3 = 0.3",
           {"state": _state(0.5, FAMILY_A), "bath": {"r": 0.5, "theta": HALF_PI},
            "grid": {"c1": {"start": 0.0, "stop": 0.7, "count": 71},
                     "tau": {"start": 0.0, "stop": 10.0, "count": 101}}}),
    Preset("amplify-a", "amplify", "amplification rate against c1 with c2 = 0, c3 = 0.3",
           {"state": _state(0.5, FAMILY_A), "bath": {"r": 0.5, "theta": HALF_PI},
            "grid": {"c1": {"start": 0.3, "stop": 0.7, "count": 41}, "theta": THETAS, "r": RS}}),
    Preset("traces-b", "trace", "discord traces for c = (0.9, 0.6, -0.6)",
           {"state": _state(0.9, FAMILY_B), "bath": {"r": 0.5, "theta": HALF_PI},
            "grid": {"tau": TAU, "theta": THETAS, "r": RS}}),
    Preset("phase-b", "phase", "Q(tau, c1) with c2 = 0.6, c3 = -0.6",
           {"state": _state(0.9, FAMILY_B), "bath": {"r": 0.5, "theta": HALF_PI},
            "grid": {"c1": {"start": 0.2, "stop": 1.0, "count": 81},
                     "tau": {"start": 0.0, "stop": 10.0, "count": 101}}}),
    Preset("amplify-b", "amplify", "amplification rate against c1 with c2 = 0.6, c3 = -0.6",
           {"state": _state(0.9, FAMILY_B), "bath": {"r": 0.5, "theta": HALF_PI},
            "grid": {"c1": {"start": 0.62, "stop": 1.0, "count": 39}, "theta": THETAS, "r": RS}}),
    Preset("amplify-b-theta", "amplify", "amplification rate at c1 = 0.9 against the squeezing phase",
           {"state": _state(0.9, FAMILY_B), "bath": {"r": 0.5, "theta": 0.0},
            "grid": {"c1": {"values": [0.9]}, "theta": {"start": 0.0, "stop": math.pi, "count": 25}}}),
    Preset("amplify-b-r", "amplify", "amplification rate at c1 = 0.9 against the squeezing strength",
           {"state": _state(0.9, FAMILY_B), "bath": {"r": 0.0, "theta": HALF_PI},
            "grid": {"c1": {"values": [0.9]}, "r": {"start": 0.0, "stop": 1.5, "count": 31}}}),
    Preset("qsl-theta", "qsl", "QSL time over c1 and the squeezing phase at r = 0.5, tau = 1",
           {"state": _state(0.5, FAMILY_A), "bath": {"r": 0.5, "theta": 0.0}, "drive_time": 1.0,
            "grid": {"c1": {"start": 0.0, "stop": 0.7, "count": 15},
                     "theta": {"start": 0.0, "stop": 2.0 * math.pi, "count": 73}}}),
    Preset("qsl-r", "qsl", "QSL time over c1 and the squeezing strength at theta = pi/2, tau = 1",
           {"state": _state(0.5, FAMILY_A), "bath": {"r": 0.0, "theta": HALF_PI}, "drive_time": 1.0,
            "grid": {"c1": {"start": 0.0, "stop": 0.7, "count": 15},
                     "r": {"start": 0.0, "stop": 1.0, "count": 41}}}),
)}


# alternate names accepted by `preset <name>`
ALIASES = {
    "fig1-theta": "traces-theta",
    "fig2": "critical-times",
    "fig3": "phase-a",
    "fig4": "amplify-a",
    "fig5": "traces-b",
    "fig6": "phase-b",
    "fig9a": "qsl-theta",
    "fig9b": "qsl-r",
}


def preset_names():
    return sorted([*PRESETS, *ALIASES])


def get_preset(name):
    try:
        return PRESETS[ALIASES.get(name, name)]
    except KeyError:
        raise ConfigError(f"unknown preset '{name}' (known: {', '.join(preset_names())})") from None

