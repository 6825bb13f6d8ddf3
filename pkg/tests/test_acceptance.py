"""Acceptance criteria 1-10; a one-line verdict per criterion is printed at session end."""
import json
import math
import os
import random
import time
from dataclasses import replace
from datetime import timedelta
from pathlib import Path

import pytest

from helpers import UTC, utc
from oracles import naive_metrics, sorted_mad, sorted_median
from repo_stability.calibration import calibrate
from repo_stability.cli import cmd_analyze, main
from repo_stability.csi import NormalizerParams, triangular_normalize
from repo_stability.exceptions import SourceUnavailable
from repo_stability.ingestion import (
    CachePolicy,
    IssueRecord,
    PullRequestRecord,
    Response,
    RestSource,
    RetryPolicy,
    save_fixture,
)
from repo_stability.metrics import (
    MAD_SCALE,
    bin_events,
    coefficient_of_variation,
    compute_metrics,
    issue_resolution_rate,
    pr_merge_rate,
    robust_stats,
)
from repo_stability.config import RunConfig
from repo_stability.report import dumps_json
from repo_stability.stability import (
    StabilityThresholds,
    classify_activity,
    classify_commit,
    classify_issue,
    classify_pull,
)
from repo_stability.synthgen import CommitProcess, ScenarioSpec, generate, random_spec
from repo_stability.window import AnalysisWindow

DEFAULT_BANDS = {"commit": (0.25, 0.25), "issue": (0.40, 0.10), "pull": (0.50, 0.10), "activity": (0.35, 0.10)}


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_criterion_01_worked_example(criterion):
    criterion(1, "triangular normalizer worked example and default band apex/edges")
    with Timer() as t:
        assert abs(triangular_normalize(0.55, 0.50, 0.10) - 0.5) <= 1e-12
        params = NormalizerParams()
        for component, (mu, sigma) in DEFAULT_BANDS.items():
            band = params.band(component)
            assert (band.mu, band.sigma) == (mu, sigma)
            assert band.score(mu) == 1.0
            assert band.score(mu + sigma) == 0.0
            assert band.score(mu - sigma) == 0.0
    assert t.elapsed < 1.0


def test_criterion_02_default_config(criterion, capsys):
    criterion(2, "no-flag CLI config equals the documented defaults")
    assert main(["config"]) == 0
    config = json.loads(capsys.readouterr().out)
    assert config["params"] == {k: {"mu": mu, "sigma": s} for k, (mu, s) in DEFAULT_BANDS.items()}
    assert config["weights"] == [0.3, 0.25, 0.25, 0.2]
    assert config["thresholds"] == {
        "alpha_c": 0.5, "beta_i": 0.3, "tau_i": 14, "beta_p": 0.4,
        "tau_p": 5, "gamma_a": 0.25, "delta_a": 0.15,
    }
    assert config["window_years"] == 5
    assert config["window_start"] is None and config["window_end"] is None


def test_criterion_03_robust_stats_oracle(criterion):
    criterion(3, "median/MAD match a sort-based oracle on 1000 cohorts")
    rnd = random.Random(20240603)
    with Timer() as t:
        for n in range(1000):
            size = rnd.randint(1, 1000)
            if n % 3 == 0:
                values = [rnd.randint(0, 20) / 4 for _ in range(size)]  # ties
            else:
                values = [rnd.lognormvariate(0, 1.5) for _ in range(size)]
            stats = robust_stats(values)
            assert stats.median == sorted_median(values)
            expected = MAD_SCALE * sorted_mad(values)
            if expected == 0:
                assert stats.scaled_mad == 0
            else:
                assert abs(stats.scaled_mad - expected) / expected <= 1e-12
    assert t.elapsed < 10.0


ARCHIVE_TARGETS = {"issue": (0.6204, 0.2208), "pull": (0.5616, 0.1534), "activity": (3.7056, 3.2644)}


def test_criterion_04_calibration_reproduction(criterion):
    criterion(4, "calibration reproduces the reference cohort bands (needs archive)")
    archive = os.environ.get("REPO_STABILITY_ARCHIVE")
    if not archive or not Path(archive).exists():
        pytest.skip("reference dataset archive not available (set REPO_STABILITY_ARCHIVE)")
    import csv

    from repo_stability.stability import ComponentVerdict, Criterion

    rows = {k: [] for k in ARCHIVE_TARGETS}
    with open(archive, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            component = row["component"]
            if component not in rows:
                continue
            stable = row["stable"].strip().lower() in ("1", "true", "yes")
            measure = float(row["measure"])
            verdict = ComponentVerdict(component, stable, measure, (Criterion("archive", None, measure, stable, ""),))
            rows[component].append((row["repo"], measure, verdict))
    for component, (mu, sigma) in ARCHIVE_TARGETS.items():
        result = calibrate(component, rows[component])
        assert abs(result.mu - mu) <= 5e-4
        assert abs(result.sigma - sigma) <= 5e-4


def _close(got, want):
    if want is None or got is None:
        return got is want
    return abs(got - want) <= 1e-9 * max(1.0, abs(want))


def test_criterion_05_metric_oracle(criterion):
    criterion(5, "MetricVector equals a naive recomputation on 200 scenarios")
    fields = ("c", "cv_daily", "cv_weekly", "i_ratio", "i_time", "i_full", "p_ratio", "p_time", "p_full",
              "a", "active_user_ratio", "mean_resolution_days", "median_resolution_days",
              "mean_review_days", "median_review_days")
    with Timer() as t:
        for seed in range(200):
            spec = random_spec(seed, history_days=seed % 4 * 30)
            events, window = generate(spec), spec.window
            tendency, denom = ("median", "windowed") if seed % 2 else ("mean", "cumulative")
            got = compute_metrics(events, window, tendency, denom)
            want = naive_metrics(events, window.start, window.end, tendency, denom)
            stamps = [c.timestamp for c in events.commits]
            assert list(bin_events(stamps, window, "daily").counts) == want["_daily"]
            assert list(bin_events(stamps, window, "weekly").counts) == want["_weekly"]
            for rate, key in ((issue_resolution_rate(events.issues, window, denom, tendency), "_issue_counts"),
                              (pr_merge_rate(events.pulls, window, denom, tendency), "_pull_counts")):
                if want[key] is not None:
                    assert (rate.numerator, rate.denominator) == want[key]
            for name in fields:
                assert _close(getattr(got, name), want[name]), (seed, name, getattr(got, name), want[name])
    assert t.elapsed < 60.0


def test_criterion_06_classifier_brute_force(criterion):
    criterion(6, "classifiers equal direct inequality checks on 10,000 tuples")
    rnd = random.Random(6)
    grid = [0.0, 0.15, 0.25, 0.3, 0.4, 0.5, 5.0, 14.0]

    def draw():
        return rnd.choice(grid) if rnd.random() < 0.3 else rnd.uniform(0, 20)

    with Timer() as t:
        for _ in range(10_000):
            th = StabilityThresholds(*(draw() for _ in range(7)))
            x, y = draw(), draw()
            assert classify_commit(x, th).stable == (x <= th.alpha_c)
            assert classify_issue(x, y, th).stable == (x >= th.beta_i and y <= th.tau_i)
            assert classify_pull(x, y, th).stable == (x >= th.beta_p and y <= th.tau_p)
            assert classify_activity(x, y, th).stable == (x >= th.gamma_a and y >= th.delta_a)
    assert t.elapsed < 5.0


def test_criterion_07_weekly_smoothing(criterion):
    criterion(7, "weekly CV < daily CV for >= 95 of 100 Poisson streams")
    wins = 0
    for seed in range(100):
        rate = 1.0 + (seed % 10) * 0.5
        spec = ScenarioSpec(seed=seed, duration_days=364, commit_process=CommitProcess.poisson(rate))
        stamps = [c.timestamp for c in generate(spec).commits]
        daily = coefficient_of_variation(bin_events(stamps, spec.window, "daily"))
        weekly = coefficient_of_variation(bin_events(stamps, spec.window, "weekly"))
        wins += weekly < daily
    assert wins >= 95, wins


def _history(rnd, start, count, first_id):
    """Pre-window items that are resolved before the window or still open after it."""
    issues, pulls = [], []
    for k in range(count):
        created = start - timedelta(days=rnd.uniform(1, 2000))
        done = created + timedelta(days=rnd.uniform(0, (start - created).days)) if rnd.random() < 0.5 else None
        if done is not None and done >= start:
            done = None
        if k % 2:
            issues.append(IssueRecord(first_id + k, created, "old", done))
        else:
            pulls.append(PullRequestRecord(first_id + k, created, "old", merged_at=done, closed_at=done))
    return issues, pulls


def test_criterion_08_ratio_bounds_and_denominator_drag(criterion):
    criterion(8, "windowed ratios in [0,1]; cumulative ratios fall as history grows")
    for seed in range(200):
        spec = random_spec(seed, history_days=90)
        m = compute_metrics(generate(spec), spec.window, "median", "windowed")
        for value in (m.i_ratio, m.p_ratio):
            assert value is None or 0.0 <= value <= 1.0

    for seed in range(50):
        spec = random_spec(1000 + seed)
        events, window = generate(spec), spec.window
        rnd = random.Random(seed)
        old_issues, old_pulls = _history(rnd, window.start, 200, 10**6)
        previous = None
        for size in (0, 10, 50, 100, 200):
            grown = replace(
                events,
                issues=tuple(sorted(events.issues + tuple(i for i in old_issues if i.id < 10**6 + size),
                                    key=lambda i: i.id)),
                pulls=tuple(sorted(events.pulls + tuple(p for p in old_pulls if p.id < 10**6 + size),
                                   key=lambda p: p.id)),
            )
            m = compute_metrics(grown, window, "mean", "cumulative")
            current = (m.i_ratio, m.p_ratio)
            if previous is not None:
                for before, after in zip(previous, current):
                    if before is not None:
                        assert after <= before
            previous = current


class _Transport:
    def __init__(self, failures):
        self.failures = failures
        self.calls = 0

    def __call__(self, url, params, headers):
        self.calls += 1
        if self.calls <= self.failures:
            return Response(503, b"{}")
        return Response(200, b'{"ok": true}')


def _source(tmp_path, transport, clock):
    return RestSource(
        transport=transport,
        cache=CachePolicy(tmp_path / "cache"),
        retry=RetryPolicy(max_retries=5, base_delay=1.0, backoff=2.0),
        sleep=lambda s: None,
        clock=clock,
    )


def test_criterion_09_ingestion_contract(criterion, tmp_path):
    criterion(9, "24h cache, success after 5 failures, SourceUnavailable after 6")
    now = [utc(2024, 1, 1)]
    clock = lambda: now[0]  # noqa: E731
    with Timer() as t:
        cached = _Transport(0)
        source = _source(tmp_path / "a", cached, clock)
        source.get_json("/repos/o/r")
        now[0] += timedelta(hours=23)
        source.get_json("/repos/o/r")
        assert cached.calls == 1

        flaky = _Transport(5)
        assert _source(tmp_path / "b", flaky, clock).get_json("/repos/o/r") == {"ok": True}
        assert flaky.calls == 6

        dead = _Transport(6)
        with pytest.raises(SourceUnavailable):
            _source(tmp_path / "c", dead, clock).get_json("/repos/o/r")
        assert dead.calls == 6
    assert t.elapsed < 5.0


def test_criterion_10_determinism(criterion, tmp_path):
    criterion(10, "two cmd_analyze runs give byte-identical JSON")
    paths = []
    for seed in range(3):
        path = tmp_path / f"f{seed}.json"
        save_fixture(generate(random_spec(seed, history_days=30)), path)
        paths.append(str(path))
    paths.append("docs/example_fixture.json")
    config = RunConfig(fixtures=tuple(paths), window_end="2024-01-01T00:00:00Z")
    first = dumps_json(cmd_analyze(config)[0])
    second = dumps_json(cmd_analyze(config, now=utc(2030, 1, 1))[0])
    assert first == second

    outs = [tmp_path / "a.json", tmp_path / "b.json"]
    for out in outs:
        assert main(["analyze", "--fixtures", *paths, "--window-end", "2024-01-01", "-o", str(out)]) == 0
    assert outs[0].read_bytes() == outs[1].read_bytes()
    assert outs[0].read_text() == first
