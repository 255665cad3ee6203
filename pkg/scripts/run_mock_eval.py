#!/usr/bin/env python3
"""One-command offline evaluation over the bundled toy problems.

Runs both tutors at all three student levels with the scripted mock
provider and writes results.json, results.csv, and quality.json into the
output directory (first argument, default ./results).
"""

from __future__ import annotations

import sys
from pathlib import Path

from codeedu.evaluation.cli import main

REPO_ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    out_dir = sys.argv[1] if len(sys.argv) > 1 else "results"
    main(
        [
            "run",
            "--problems", str(REPO_ROOT / "data" / "toy_problems.jsonl"),
            "--out", out_dir,
        ]
    )
