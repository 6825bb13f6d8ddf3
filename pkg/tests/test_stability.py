from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from repo_stability.metrics import MetricVector
from repo_stability.stability import (
    ORIGINAL,
    REVISED,
    ComponentVerdict,
    Regime,
    StabilityThresholds,
    classify_activity,
    classify_all,
    classify_commit,
    classify_issue,
    classify_pull,
    combine_sweep,
)

DEFAULT = StabilityThresholds()


def test_default_thresholds():
    assert DEFAULT.to_dict() == {
        "alpha_c": 0.5, "beta_i": 0.3, "tau_i": 14.0, "beta_p": 0.4,
        "tau_p": 5.0, "gamma_a": 0.25, "delta_a": 0.15,
    }


def test_presets():
    assert ORIGINAL == Regime("daily", "mean", "cumulative")
    assert REVISED == Regime("weekly", "median", "windowed")
    assert Regime.named("original").name == "original"
    assert Regime("weekly", "mean", "windowed").name == "custom"
    with pytest.raises(ValueError):
        Regime.named("fancy")
    with pytest.raises(ValueError):
        Regime("hourly")


def test_commit_examples():
    # a typical unsmoothed cohort CV
    assert not classify_commit(0.621).stable
    assert classify_commit(0.0).stable
    assert classify_commit(0.5).stable


def test_issue_examples():
    assert classify_issue(0.4, 5.25).stable
    v = classify_issue(0.29, 1.0)
    assert not v.stable and [c.name for c in v.criteria if not c.passed] == ["ratio"]
    v = classify_issue(0.9, 20.0)
    assert not v.stable and [c.name for c in v.criteria if not c.passed] == ["time_days"]


def test_pull_examples():
    assert classify_pull(0.4167, 2.0).stable
    assert not classify_pull(0.39, 1.0).stable
    assert classify_pull(0.5, 5.0).stable


def test_activity_examples():
    assert classify_activity(0.3313, 0.2).stable
    assert not classify_activity(0.24, 0.9).stable
    assert classify_activity(3.7056, 0.15).stable


def vector(**kw):
    base = dict(
        c=1.0, cv_daily=0.0, cv_weekly=0.0, i_ratio=None, i_time=None, i_full=None,
        p_ratio=None, p_time=None, p_full=None, a=None, active_user_ratio=0.0,
        mean_resolution_days=None, median_resolution_days=None,
        mean_review_days=None, median_review_days=None,
    )
    base.update(kw)
    return MetricVector(**base)


def test_classify_all_degenerate_repo():
    verdicts = classify_all(vector(), ORIGINAL)
    assert [v.component for v in verdicts] == ["commit", "issue", "pull", "activity"]
    assert verdicts[0].stable
    assert [v.status for v in verdicts[1:]] == ["missing"] * 3
    assert not any(v.stable for v in verdicts[1:])


def test_classify_all_uses_regime_granularity():
    m = vector(cv_daily=1.2, cv_weekly=0.4)
    assert not classify_all(m, ORIGINAL)[0].stable
    assert classify_all(m, REVISED)[0].stable


def test_classify_all_alpha_zero():
    zero = replace(DEFAULT, alpha_c=0.0)
    assert classify_all(vector(cv_weekly=0.0), REVISED, zero)[0].stable
    assert not classify_all(vector(cv_weekly=0.01), REVISED, zero)[0].stable


def test_all_four_stable():
    m = vector(cv_weekly=0.3, i_ratio=0.5, i_time=3.0, p_ratio=0.6, p_time=1.0, a=0.4, active_user_ratio=0.5)
    assert all(v.stable for v in classify_all(m, REVISED))


def test_negative_threshold_rejected():
    with pytest.raises(ValueError):
        StabilityThresholds(beta_i=-0.1)


nonneg = st.floats(0, 50, allow_nan=False)


@given(nonneg, nonneg, nonneg, nonneg, nonneg)
def test_relaxing_never_destabilizes(ratio, time, cv, beta, tau):
    strict = StabilityThresholds(alpha_c=cv / 2, beta_i=beta, tau_i=tau)
    loose = StabilityThresholds(alpha_c=cv, beta_i=beta / 2, tau_i=tau * 2)
    if classify_issue(ratio, time, strict).stable:
        assert classify_issue(ratio, time, loose).stable
    if classify_commit(cv, strict).stable:
        assert classify_commit(cv, loose).stable


@given(nonneg, nonneg, nonneg, nonneg)
def test_verdict_depends_only_on_own_inputs(i_ratio, i_time, p_ratio, p_time):
    a = vector(i_ratio=i_ratio, i_time=i_time, p_ratio=p_ratio, p_time=p_time)
    b = vector(i_ratio=i_ratio, i_time=i_time, p_ratio=p_ratio / 2, p_time=p_time + 1, cv_weekly=9.0)
    assert classify_all(a, REVISED)[1] == classify_all(b, REVISED)[1]


def test_verdict_dict_round_trip():
    v = classify_issue(0.4, 2.0)
    assert ComponentVerdict.from_dict(v.to_dict()) == v


def test_combine_sweep():
    good = classify_all(vector(cv_weekly=0.1), REVISED)
    bad = classify_all(vector(cv_weekly=0.9), REVISED)
    combined = combine_sweep([good, bad, good])
    assert not combined[0].stable
    assert combined[0].measured == 0.9
    assert combine_sweep([good, good])[0].stable
    assert all(v.status == "missing" for v in combined[1:])
    for v in combined:
        assert v.stable == all(c.passed for c in v.criteria)
