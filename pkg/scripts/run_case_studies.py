#!/usr/bin/env python3
"""Run the bundled example deployments end to end and print the findings.

For every packaged fixture configuration this ingests the bundled CVE feed,
runs the full analysis, and prints the goal verdicts, the shortest attack
trace for each reachable goal, and the recommended patch set.

Usage:
    python3 scripts/run_case_studies.py [--fixtures fig2,system28] [--out DIR]
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from importlib import resources
from pathlib import Path

from iotgraph.cvestore import CveStore
from iotgraph.model import parse_config
from iotgraph.pipeline import analyze, render_summary, write_outputs

DEFAULT_FIXTURES = ("listing10", "hall_light", "fig2", "system28", "system37")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--fixtures", default=",".join(DEFAULT_FIXTURES))
    parser.add_argument("--out", help="also write full outputs under this directory")
    args = parser.parse_args(argv)
    names = [n for n in args.fixtures.split(",") if n]

    fixtures = resources.files("iotgraph") / "fixtures"
    with tempfile.TemporaryDirectory() as tmp:
        with CveStore(Path(tmp) / "store.db") as store:
            store.ingest_feed(str(fixtures / "mini_feed.json"))
            for name in names:
                doc = json.loads((fixtures / f"{name}.json").read_text())
                config = parse_config(doc, source=name)
                result = analyze(config, store)

                print(f"==== {name} " + "=" * max(0, 60 - len(name)))
                print(render_summary(result))
                for gr in result.goal_results:
                    if gr.trace is not None:
                        print()
                        print(gr.trace.render())
                if args.out:
                    out_dir = Path(args.out) / name
                    for path in write_outputs(result, out_dir):
                        print(f"wrote {path}")
                print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
