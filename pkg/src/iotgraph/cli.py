"""Command-line interface.

Exit codes: 0 success, 1 reachable goal under --fail-on-reachable, 2 bad
configuration or arguments, 3 missing CVE store, 4 ingest or analysis
stage failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .apps import AppBindError, AppParseError, bind_app, parse_app_description
from .cvestore import CveStore, StoreError
from .logic import LogicError, parse_atom
from .model import ConfigError, parse_config
from .pipeline import analyze, render_summary, write_outputs
from .rules import compile_system, render_program
from .synth import render_synth

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REACHABLE = 1
EXIT_CONFIG = 2
EXIT_NO_STORE = 3
EXIT_STAGE = 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _store_path(args: argparse.Namespace) -> str:
    path = args.store or os.environ.get("IOTGRAPH_STORE")
    if not path:
        raise CliError("no CVE store given: pass --store or set IOTGRAPH_STORE", EXIT_CONFIG)
    return path


def _open_store(args: argparse.Namespace) -> CveStore:
    path = _store_path(args)
    try:
        return CveStore.open_existing(path)
    except StoreError as exc:
        raise CliError(str(exc), EXIT_NO_STORE) from exc


def _load_config(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}", EXIT_CONFIG) from exc
    try:
        return parse_config(text, source=path)
    except ConfigError as exc:
        raise CliError(f"invalid config {path}: {exc}", EXIT_CONFIG) from exc


def _parse_goals(texts: list[str]) -> tuple:
    goals = []
    for text in texts:
        try:
            goals.append(parse_atom(text))
        except LogicError as exc:
            raise CliError(f"bad goal {text!r}: {exc}", EXIT_CONFIG) from exc
    return tuple(goals)


def _load_overrides(path: str | None) -> dict | None:
    if path is None:
        return None
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read overrides {path}: {exc}", EXIT_CONFIG) from exc
    if not isinstance(data, dict):
        raise CliError(f"overrides {path} must be a JSON object keyed by CVE id", EXIT_CONFIG)
    for cve, entry in data.items():
        if not isinstance(entry, dict) or not set(entry) <= {"precondition", "effect"}:
            raise CliError(
                f"override for {cve} must be an object with precondition/effect keys",
                EXIT_CONFIG,
            )
    return data


def cmd_ingest(args: argparse.Namespace) -> int:
    path = _store_path(args)
    with CveStore(path) as store:
        total_added = total_skipped = 0
        for feed in args.feeds:
            try:
                added, skipped = store.ingest_feed(feed)
            except StoreError as exc:
                raise CliError(f"ingest failed for {feed}: {exc}", EXIT_STAGE) from exc
            print(f"{feed}: {added} records added, {skipped} skipped")
            total_added += added
            total_skipped += skipped
        print(f"store {path}: {store.count()} records ({total_added} new, {total_skipped} skipped)")
    return EXIT_OK


def cmd_scan(args: argparse.Namespace) -> int:
    with _open_store(args) as store:
        for name in args.names:
            records = store.search(name)
            print(f"{name}: {len(records)} match(es)")
            for r in records:
                print(f"  {r.cve_id} [{r.attack_vector}] {r.description[:90]}")
    return EXIT_OK


def cmd_model(args: argparse.Namespace) -> int:
    from .pipeline import build_models, scan_devices

    config = _load_config(args.config)
    overrides = _load_overrides(args.overrides)
    with _open_store(args) as store:
        findings = scan_devices(config, store)
        models = build_models(config, findings, overrides=overrides)
    for m in models:
        print(
            f"{m.cve_id} @ {m.device}: precondition={m.precondition} effect={m.effect} "
            f"vulProperty({m.cve_id!r}, {m.pre_term}, {m.effect_term})"
        )
    if not models:
        print("no exploit models (no CVE matches)")
    return EXIT_OK


def cmd_extract_apps(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    failures = 0
    for app in config.apps:
        print(f"== {app.name}")
        try:
            semantics = parse_app_description(app.description)
        except AppParseError as exc:
            print(f"  parse error: {exc}")
            failures += 1
            continue
        print("  " + semantics.render_split().replace("\n", "\n  "))
        print("  " + semantics.render_phrases().replace("\n", "\n  "))
        print(f"  tuple: {semantics.as_tuple()!r}")
        try:
            bound = bind_app(app, semantics, config)
        except AppBindError as exc:
            print(f"  bind error: {exc}")
            failures += 1
            continue
        for rule in bound.rules:
            print("  " + rule.render().replace("\n", "\n  "))
    return EXIT_STAGE if failures and args.strict else EXIT_OK


def cmd_compile(args: argparse.Namespace) -> int:
    from .pipeline import bind_apps, build_models, scan_devices

    config = _load_config(args.config)
    overrides = _load_overrides(args.overrides)
    with _open_store(args) as store:
        findings = scan_devices(config, store)
        models = build_models(config, findings, overrides=overrides)
    bound, _skipped = bind_apps(config)
    try:
        compiled = compile_system(config, models, bound, extra_goals=_parse_goals(args.goals))
    except (LogicError, ConfigError) as exc:
        raise CliError(f"compile failed: {exc}", EXIT_STAGE) from exc
    text = render_program(compiled)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        print(f"wrote {out}")
    else:
        print(text, end="")
    return EXIT_OK


def _run_analysis(args: argparse.Namespace):
    config = _load_config(args.config)
    overrides = _load_overrides(args.overrides)
    with _open_store(args) as store:
        try:
            return analyze(
                config,
                store,
                extra_goals=_parse_goals(args.goals),
                overrides=overrides,
            )
        except (LogicError, ConfigError) as exc:
            raise CliError(f"analysis failed: {exc}", EXIT_STAGE) from exc


def cmd_analyze(args: argparse.Namespace) -> int:
    result = _run_analysis(args)
    written = write_outputs(result, args.out, graph_format=args.format)
    print(render_summary(result))
    for path in written:
        print(f"wrote {path}")
    if args.fail_on_reachable and result.any_reachable:
        return EXIT_REACHABLE
    return EXIT_OK


def cmd_metrics(args: argparse.Namespace) -> int:
    from .metrics import render_report

    result = _run_analysis(args)
    print(render_report(result.graph), end="")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    try:
        text = render_synth(args.devices, args.seed)
    except (ValueError, ConfigError) as exc:
        raise CliError(f"synthesis failed: {exc}", EXIT_CONFIG) from exc
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iotgraph",
        description="System-level security analysis for smart-home deployments",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_store(p):
        p.add_argument("--store", help="CVE store path (default: $IOTGRAPH_STORE)")

    p = sub.add_parser("ingest", help="load NVD-style JSON feeds into the CVE store")
    add_store(p)
    p.add_argument("feeds", nargs="+", help="feed files (.json or .json.gz)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("scan", help="search the store for device names")
    add_store(p)
    p.add_argument("names", nargs="+", help="device display names")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("model", help="show exploit models for a configuration")
    add_store(p)
    p.add_argument("--config", required=True)
    p.add_argument("--overrides", help="JSON file overriding classifications per CVE")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("extract-apps", help="parse and bind app descriptions")
    p.add_argument("--config", required=True)
    p.add_argument("--strict", action="store_true", help="exit 4 if any app fails")
    p.set_defaults(func=cmd_extract_apps)

    p = sub.add_parser("compile", help="compile the ground Horn program")
    add_store(p)
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="write the program here instead of stdout")
    p.add_argument("--goals", nargs="*", default=[], help="extra goal atoms")
    p.add_argument("--overrides")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("analyze", help="full analysis: graph, metrics, manifest")
    add_store(p)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--goals", nargs="*", default=[])
    p.add_argument("--format", choices=("dot", "text"), default="dot")
    p.add_argument("--overrides")
    p.add_argument(
        "--fail-on-reachable",
        action="store_true",
        help="exit 1 if any goal is reachable",
    )
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("metrics", help="print the metrics report")
    add_store(p)
    p.add_argument("--config", required=True)
    p.add_argument("--goals", nargs="*", default=[])
    p.add_argument("--overrides")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("synth", help="generate a synthetic deployment")
    p.add_argument("--devices", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
