"""Independent reference computations used to check the library.

Pure Python, no numpy, no shared helpers with the package: bins are found
with ``timedelta.days`` and statistics come from sorted lists.
"""
import math


def sorted_median(values):
    xs = sorted(values)
    n = len(xs)
    mid = n // 2
    if n % 2:
        return xs[mid]
    return (xs[mid - 1] + xs[mid]) / 2


def sorted_mad(values):
    med = sorted_median(values)
    return sorted_median([abs(v - med) for v in values])


def naive_bins(timestamps, start, end, width_days):
    n = (end - start).days // width_days
    counts = [0] * n
    for ts in timestamps:
        if ts < start:
            continue
        k = (ts - start).days // width_days
        if k < n:
            counts[k] += 1
    return counts


def naive_cv(counts):
    if len(counts) < 2:
        return None
    mean = sum(counts) / len(counts)
    if mean == 0:
        return None
    var = sum((c - mean) ** 2 for c in counts) / len(counts)
    return math.sqrt(var) / mean


def _in(t, start, end):
    return t is not None and start <= t < end


def naive_rate(items, done_attr, start, end, denom, tendency):
    if denom == "cumulative":
        base = [x for x in items if x.created_at < end]
    else:
        base = [x for x in items if start <= x.created_at < end]
    if not base:
        return None
    ages = []
    for x in base:
        done = getattr(x, done_attr)
        if _in(done, start, end):
            ages.append((done - x.created_at).total_seconds() / 86400)
    ratio = len(ages) / len(base)
    if not ages:
        time = 0.0
    elif tendency == "mean":
        time = sum(ages) / len(ages)
    else:
        time = sorted_median(ages)
    return ratio, time, ratio / (1 + time), len(ages), len(base)


def naive_activity(events, start, end):
    open_items = 0
    for i in events.issues:
        if i.created_at < end and (i.closed_at is None or i.closed_at >= end):
            open_items += 1
    for p in events.pulls:
        if p.created_at < end and (p.merged_at is None or p.merged_at >= end):
            open_items += 1
    comments = len([c for c in events.comments if start <= c.timestamp < end])
    active = set()
    for c in events.comments:
        if start <= c.timestamp < end:
            active.add(c.author)
    for c in events.commits:
        if start <= c.timestamp < end:
            active.add(c.author)
    for p in events.pulls:
        if start <= p.created_at < end:
            active.add(p.author)
    everyone = set()
    for group in (events.commits, events.issues, events.pulls, events.comments):
        for r in group:
            everyone.add(r.author)
    ratio = len(active) / len(everyone) if everyone else 0.0
    a = comments / open_items * ratio if open_items else None
    return a, ratio


def naive_metrics(events, start, end, tendency, denom):
    stamps = [c.timestamp for c in events.commits]
    daily = naive_bins(stamps, start, end, 1)
    weekly = naive_bins(stamps, start, end, 7)
    issue = naive_rate(events.issues, "closed_at", start, end, denom, tendency)
    pull = naive_rate(events.pulls, "merged_at", start, end, denom, tendency)
    issue_mean = naive_rate(events.issues, "closed_at", start, end, denom, "mean")
    issue_median = naive_rate(events.issues, "closed_at", start, end, denom, "median")
    pull_mean = naive_rate(events.pulls, "merged_at", start, end, denom, "mean")
    pull_median = naive_rate(events.pulls, "merged_at", start, end, denom, "median")
    a, ratio = naive_activity(events, start, end)
    return {
        "c": sum(daily) / len(daily) if daily else None,
        "cv_daily": naive_cv(daily),
        "cv_weekly": naive_cv(weekly),
        "i_ratio": issue and issue[0],
        "i_time": issue and issue[1],
        "i_full": issue and issue[2],
        "p_ratio": pull and pull[0],
        "p_time": pull and pull[1],
        "p_full": pull and pull[2],
        "a": a,
        "active_user_ratio": ratio,
        "mean_resolution_days": issue_mean and issue_mean[1],
        "median_resolution_days": issue_median and issue_median[1],
        "mean_review_days": pull_mean and pull_mean[1],
        "median_review_days": pull_median and pull_median[1],
        "_daily": daily,
        "_weekly": weekly,
        "_issue_counts": issue and issue[3:],
        "_pull_counts": pull and pull[3:],
    }
