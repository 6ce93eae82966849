#!/usr/bin/env python3
"""Rebuild the golden expectation files from the scenario construction rules.

Run this only when a deliberate change to canonical forms or scenario
pipelines is being made; review the resulting diffs before committing them.
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from isolattice import scenarios  # noqa: E402

GOLDEN_DIR = Path(__file__).resolve().parents[1] / "src" / "isolattice" / "goldens"


def main() -> int:
    GOLDEN_DIR.mkdir(exist_ok=True)
    for scenario in scenarios._SCENARIOS:
        expected = scenario.expected_builder(dict(scenario.defaults))
        path = GOLDEN_DIR / f"{scenario.golden}.json"
        path.write_text(json.dumps(expected, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
