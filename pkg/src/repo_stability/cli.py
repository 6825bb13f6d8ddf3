"""Command-line interface.

    repo-stability analyze --fixtures a.json b.json --window-end 2024-01-01
    repo-stability analyze --repos django/django --format csv
    repo-stability calibrate --fixtures data/*.json > params.json
    repo-stability analyze --fixtures data/*.json --params params.json
    repo-stability report analysis.json --format csv
    repo-stability config
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from datetime import datetime, timedelta
from pathlib import Path

from . import __version__
from ._time import UTC, format_utc
from .calibration import CALIBRATED_COMPONENTS, apply_calibration, calibrate
from .config import OUTPUT_FORMATS, RunConfig, load_config, load_params
from .csi import MISSING_POLICIES, Weights, component_measures
from .exceptions import EmptyCohort, MalformedAnalysis, StabilityError
from .ingestion import CachePolicy, RepoRef, RestSource, fetch_events, load_fixture, save_fixture, screen_repository
from .pipeline import analyze_events
from .report import build_report, dumps_json, error_record, render
from .stability import PRESETS
from .synthgen import generate, random_spec

log = logging.getLogger("repo_stability")

EXIT_OK = 0
EXIT_PARTIAL = 2
EXIT_USAGE = 64


def _split(values):
    out = []
    for value in values or ():
        out.extend(v for v in value.split(",") if v)
    return out


def _inputs(config: RunConfig):
    return [("fixture", p) for p in config.fixtures] + [("repo", r) for r in config.repos]


def _load(kind, ref, config, window, source):
    if kind == "fixture":
        return load_fixture(ref)
    return fetch_events(RepoRef.parse(ref), window, source)


def run_batch(config: RunConfig, now=None, source=None):
    """Analyze every input; returns ``[(label, ref, RepoAnalysis | Exception)]`` in input order."""
    window = config.window(now)
    regime = config.regime_obj
    sweep = timedelta(days=config.sweep_days) if config.sweep_days else None
    if config.repos and source is None:
        source = RestSource.from_env(config.token_env, cache=CachePolicy(Path(config.cache_dir)))

    def one(item):
        kind, ref = item
        try:
            events = _load(kind, ref, config, window, source)
            return str(events.repo), ref, analyze_events(
                events, window, regime, config.thresholds, config.params,
                config.weights, config.missing_policy, sweep,
            )
        except (StabilityError, OSError, ValueError) as exc:
            log.warning("%s: %s", ref, exc)
            return ref, ref, exc

    items = _inputs(config)
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            return list(pool.map(one, items))
    return [one(item) for item in items]


def cmd_analyze(config: RunConfig, now=None, source=None):
    """Returns ``(report_document, exit_code)``."""
    window = config.window(now)
    records, failed = [], False
    for label, ref, outcome in run_batch(config, now, source):
        if isinstance(outcome, Exception):
            failed = True
            records.append(error_record(label, str(ref), outcome))
        else:
            records.append({**outcome.to_dict(), "source": str(ref)})
    effective = config.effective()
    effective["window"] = {"start": format_utc(window.start), "end": format_utc(window.end)}
    return build_report(effective, records), (EXIT_PARTIAL if failed else EXIT_OK)


def cmd_calibrate(config: RunConfig, now=None, source=None):
    """Returns ``(params_document, exit_code)``; the document loads via ``--params``."""
    regime = config.regime_obj
    cohorts = {k: [] for k in CALIBRATED_COMPONENTS}
    for label, _ref, outcome in run_batch(config, now, source):
        if isinstance(outcome, Exception):
            continue
        measures = component_measures(outcome.metrics, regime)
        for component in CALIBRATED_COMPONENTS:
            cohorts[component].append((label, measures[component], outcome.verdict(component)))
    results, calibration = [], {}
    for component, rows in cohorts.items():
        try:
            result = calibrate(component, rows)
        except EmptyCohort as exc:
            calibration[component] = {"error": "EmptyCohort", "message": str(exc)}
            continue
        results.append(result)
        calibration[component] = result.to_dict()
    params = apply_calibration(config.params, results, config.sigma_floor)
    doc = {
        "params": params.to_dict(),
        "calibration": calibration,
        "regime": regime.to_dict(),
        "thresholds": config.thresholds.to_dict(),
        "sigma_floor": config.sigma_floor,
    }
    return doc, (EXIT_OK if results else EXIT_PARTIAL)


def cmd_report(doc, fmt="json") -> str:
    return render(doc, fmt)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="repo-stability", description="Composite stability index for repositories")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def run_options(p):
        p.add_argument("--config", help="JSON config file (flags override it)")
        p.add_argument("--repos", action="append", help="owner/name, comma-separated or repeated")
        p.add_argument("--fixtures", nargs="+", help="fixture JSON files")
        p.add_argument("--window-years", type=int)
        p.add_argument("--window-end", help="ISO-8601 window end (default: latest UTC midnight)")
        p.add_argument("--window-start", help="ISO-8601 window start (overrides --window-years)")
        p.add_argument("--regime", choices=sorted(PRESETS))
        p.add_argument("--params", help="normalizer params JSON (bands or a calibrate document)")
        p.add_argument("--weights", help="w_c,w_i,w_p,w_a")
        p.add_argument("--missing-policy", choices=MISSING_POLICIES)
        p.add_argument("--format", choices=OUTPUT_FORMATS, dest="output_format")
        p.add_argument("--cache-dir")
        p.add_argument("--token-env", help="environment variable holding the API token")
        p.add_argument("--jobs", type=int)
        p.add_argument("--sweep-days", type=int, help="require stability in every sub-window of this length")
        p.add_argument("--sigma-floor", type=float)
        p.add_argument("-o", "--out", help="write output here instead of stdout")

    run_options(sub.add_parser("analyze", help="score repositories"))
    run_options(sub.add_parser("calibrate", help="derive normalizer params from stable repositories"))
    run_options(sub.add_parser("config", help="print the effective configuration"))

    rep = sub.add_parser("report", help="render an analysis document")
    rep.add_argument("analysis", nargs="?", default="-", help="analysis JSON (default: stdin)")
    rep.add_argument("--format", choices=OUTPUT_FORMATS, default="json")
    rep.add_argument("-o", "--out")

    scr = sub.add_parser("screen", help="check fixtures against the repository inclusion criteria")
    scr.add_argument("fixtures", nargs="+")
    scr.add_argument("--now", help="reference time (default: now)")

    gen = sub.add_parser("generate", help="write a synthetic fixture")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--history-days", type=int, default=0)
    gen.add_argument("-o", "--out", required=True)
    return parser


def config_from_args(args) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    changes = {}
    for name in ("window_years", "window_end", "window_start", "regime", "missing_policy",
                 "output_format", "cache_dir", "token_env", "jobs", "sweep_days", "sigma_floor"):
        value = getattr(args, name, None)
        if value is not None:
            changes[name] = value
    if args.repos:
        changes["repos"] = tuple(_split(args.repos))
    if args.fixtures:
        changes["fixtures"] = tuple(args.fixtures)
    if args.params:
        changes["params"] = load_params(args.params, config.params)
    if args.weights:
        changes["weights"] = Weights.parse(args.weights)
    return replace(config, **changes)


def _emit(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(message)s")
    try:
        if args.command == "report":
            text = sys.stdin.read() if args.analysis == "-" else Path(args.analysis).read_text(encoding="utf-8")
            try:
                doc = json.loads(text)
            except json.JSONDecodeError as exc:
                raise MalformedAnalysis(f"invalid JSON: {exc}") from None
            _emit(cmd_report(doc, args.format), args.out)
            return EXIT_OK
        if args.command == "screen":
            rows = {}
            for path in args.fixtures:
                events = load_fixture(path)
                verdict = screen_repository(events.metadata, args.now or datetime.now(UTC))
                rows[str(events.repo)] = {"passed": verdict.passed, "failed": list(verdict.failed)}
            _emit(dumps_json(rows), None)
            return EXIT_OK if all(r["passed"] for r in rows.values()) else EXIT_PARTIAL
        if args.command == "generate":
            save_fixture(generate(random_spec(args.seed, history_days=args.history_days)), args.out)
            return EXIT_OK

        config = config_from_args(args)
        if args.command == "config":
            _emit(dumps_json(config.to_dict()), args.out)
            return EXIT_OK
        if not config.repos and not config.fixtures:
            parser.error("give at least one of --repos or --fixtures")
        if args.command == "analyze":
            doc, code = cmd_analyze(config)
            _emit(render(doc, config.output_format), args.out)
            return code
        doc, code = cmd_calibrate(config)
        _emit(dumps_json(doc), args.out)
        return code
    except (StabilityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
