#!/usr/bin/env python3
"""Run the full benchmark study set and write CSVs plus summary tables.

Usage: python scripts/run_benchmarks.py [config names...]
With no arguments every config in scripts/configs is executed; results
land in results/ as CSV with a JSON summary alongside.
"""

import json
import sys
import time
from pathlib import Path

from vqebench.bench import ScanSpec, rows_to_csv, run_scan, summarize

REPO = Path(__file__).resolve().parents[1]


def main(argv):
    names = argv or sorted(p.name for p in (REPO / "scripts/configs").glob("*.json"))
    (REPO / "results").mkdir(exist_ok=True)
    for name in names:
        cfg_path = REPO / "scripts/configs" / name
        spec = ScanSpec.from_json(cfg_path)
        spec.manifest_path = str(REPO / "fixtures/manifest.json")
        print(f"== {name}: {len(spec.fixtures)} fixtures x {len(spec.methods)} methods",
              file=sys.stderr)
        t0 = time.time()
        rows = run_scan(spec)
        out = REPO / (spec.out_path or f"results/{name}.csv")
        out.parent.mkdir(exist_ok=True)
        out.write_text(rows_to_csv(rows))
        summary = summarize(rows)
        out.with_suffix(".summary.json").write_text(json.dumps(summary, indent=1))
        print(f"   {len(rows)} rows in {time.time()-t0:.0f}s -> {out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
