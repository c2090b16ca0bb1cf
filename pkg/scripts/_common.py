"""Shared helpers for the experiment scripts."""

import json
import sys
from pathlib import Path


def report_to_stdout_and_file(report, out: str | None) -> None:
    print(f"experiment: {report.name}")
    for key, val in report.scalars.items():
        print(f"  {key}: {val:.6g}")
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {
            "name": report.name,
            "inputs": report.inputs,
            "scalars": report.scalars,
            "provenance": report.provenance,
        }
        path.write_text(json.dumps(payload, indent=2, default=str) + "\n")
        print(f"wrote {path}", file=sys.stderr)
