#!/usr/bin/env python3
"""Regenerate the bundled scenario configs in configs/ from the defaults."""

import json
from pathlib import Path

from omnoise.scenarios import SCENARIOS, default_config


def main() -> None:
    out = Path(__file__).resolve().parent.parent / "configs"
    out.mkdir(exist_ok=True)
    for scenario in SCENARIOS:
        cfg = default_config(scenario)
        path = out / f"{scenario}.json"
        path.write_text(json.dumps(cfg.to_dict(), sort_keys=True, indent=2) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
