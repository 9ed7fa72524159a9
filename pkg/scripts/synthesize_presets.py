# ==============================================================================
# squeezelight: Preset and Schema Synthesis
# ==============================================================================
#
# Writes every named sweep preset to presets/<name>.json as a plain scenario
# file, so `squeezelight <command> --config presets/<name>.json` reproduces
# `squeezelight preset <name>`, plus presets/index.json mapping names to
# commands, and the scenario JSON Schema to docs/config_schema.json.
#
# Usage: python scripts/synthesize_presets.py
# ==============================================================================

import json
import os
import sys

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..")
sys.path.append(os.path.join(ROOT, "squeeze-python"))

import config  # noqa: E402
import presets  # noqa: E402


def get_output_dir(name):
    target_dir = os.path.join(ROOT, name)
    os.makedirs(target_dir, exist_ok=True)
    return target_dir


def write_json(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def generate_presets():
    target_dir = get_output_dir("presets")
    index = {}
    for name, preset in presets.PRESETS.items():
        # round-trips through the loader so a broken preset fails here, not at run time
        config.parse_config(preset.config)
        write_json(os.path.join(target_dir, f"{name}.json"), preset.config)
        index[name] = {"command": preset.command, "description": preset.description}
    write_json(os.path.join(target_dir, "index.json"), index)
    return len(index)


def generate_schema():
    path = os.path.join(get_output_dir("docs"), "config_schema.json")
    write_json(path, config.schema())
    return path


def main():
    print("Synthesizing squeezelight presets...")
    count = generate_presets()
    print(f"Presets written: {count}")
    print(f"Schema written: {generate_schema()}")


if __name__ == "__main__":
    main()
