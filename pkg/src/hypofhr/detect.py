"""Fallback event detectors for recordings without manual annotations.

Desaturations use the pre-event running maximum as baseline (the same notion
used for the burden area); FHR accelerations/decelerations use a centred
rolling median. Both refine event boundaries outward from the threshold
crossing to where the excursion starts and ends, so reported spans cover
the whole dip or rise rather than only its supra-threshold core.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .core import (
    Channel,
    ChannelKind,
    EventInterval,
    EventKind,
    EventSource,
    TimeSpan,
    merge_intervals,
    union_spans,
)


@dataclass(frozen=True)
class DesatParams:
    drop_threshold: float = 3.0
    baseline_window: float = 120.0
    resat_margin: float = 1.0
    min_duration: float = 10.0
    merge_gap: float = 30.0

    def __post_init__(self):
        for name in ("drop_threshold", "baseline_window", "resat_margin", "min_duration", "merge_gap"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.drop_threshold > self.resat_margin:
            raise ValueError("drop_threshold must exceed resat_margin")


@dataclass(frozen=True)
class FhrParams:
    baseline_window: float = 600.0
    excursion: float = 15.0
    min_duration: float = 15.0
    max_duration: float = 600.0

    def __post_init__(self):
        for name in ("baseline_window", "excursion", "min_duration", "max_duration"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def _check_kind(channel: Channel, kind: ChannelKind) -> None:
    if channel.kind != kind:
        raise ValueError(f"expected {kind.value} channel, got {channel.kind.value}")


def running_baseline(spo2: Channel, window: float) -> np.ndarray:
    """Max of valid samples in the ``window`` seconds before each sample
    (the sample itself excluded); NaN where none exist."""
    n = max(1, int(round(window * spo2.sample_rate)))
    x = pd.Series(np.where(spo2.valid, spo2.samples, np.nan))
    return x.rolling(n, min_periods=1).max().shift(1).to_numpy()


def detect_desaturations(spo2: Channel, params: DesatParams = DesatParams()) -> list[EventInterval]:
    """Desaturations of at least ``drop_threshold`` below the running baseline.

    Candidate episodes are runs where SpO2 sits more than ``resat_margin``
    below the running baseline, widened to the start of the descending limb
    and the top of the recovery limb, then merged across gaps shorter than
    ``merge_gap``. Only then are episodes kept if their depth below the
    baseline at onset reaches ``drop_threshold`` and they last at least
    ``min_duration``. Because the threshold is applied last, raising it can
    only remove episodes, never split one.
    """
    _check_kind(spo2, ChannelKind.SPO2)
    x = np.where(spo2.valid, spo2.samples, np.nan)
    # carry the last valid value across dropouts so a gap neither ends nor starts an episode
    xf = pd.Series(x).ffill().to_numpy()
    base = running_baseline(spo2, params.baseline_window)
    t = spo2.times()
    n = x.size
    max_back = int(round(params.baseline_window * spo2.sample_rate))
    with np.errstate(invalid="ignore"):
        low = xf < base - params.resat_margin

    spans = []
    for a, b in _runs(low):
        level = base[a]
        k = a
        while k > 0 and a - k < max_back and xf[k - 1] > xf[k] and xf[k - 1] < level:
            k -= 1
        if b < n:
            j = b
            while j + 1 < n and xf[j] < level and xf[j + 1] > xf[j]:
                j += 1
            end = t[j]
        else:
            end = t[-1] + spo2.dt
        if end > t[k]:
            spans.append(TimeSpan(t[k], end))
    candidates = merge_intervals(
        [EventInterval(EventKind.HYPOXIA, s, EventSource.DETECTED) for s in union_spans(spans)],
        params.merge_gap,
    )

    events = []
    for ev in candidates:
        i0, i1 = spo2.index_range(ev.start, ev.end)
        level = base[i0] if i0 > 0 else np.nan
        seg = x[i0:i1]
        if not np.isfinite(level) or np.all(np.isnan(seg)):
            continue
        if level - np.nanmin(seg) >= params.drop_threshold and ev.duration() >= params.min_duration:
            events.append(ev)
    return events


def rolling_median_baseline(fhr: Channel, window: float) -> np.ndarray:
    n = max(1, int(round(window * fhr.sample_rate)))
    x = pd.Series(np.where(fhr.valid, fhr.samples, np.nan))
    return x.rolling(n, center=True, min_periods=1).median().to_numpy()


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    padded = np.concatenate(([0], mask.view(np.int8), [0]))
    edges = np.flatnonzero(np.diff(padded))
    return list(zip(edges[0::2], edges[1::2]))


def _excursions(x, base, sign, params, t, dt, kind):
    # sign=+1 for rises, -1 for dips; work on the signed deviation
    dev = sign * (x - base)
    with np.errstate(invalid="ignore"):
        core = dev >= params.excursion
    n = x.size
    spans = []
    for a, b in _runs(core):
        k, j = a, b - 1
        while k > 0 and dev[k - 1] < dev[k] and dev[k - 1] > 0:
            k -= 1
        while j + 1 < n and dev[j + 1] < dev[j] and dev[j + 1] > 0:
            j += 1
        spans.append(TimeSpan(t[k], t[j] + dt))
    return [
        EventInterval(kind, s, EventSource.DETECTED)
        for s in union_spans(spans)
        if params.min_duration <= s.duration() < params.max_duration
    ]


def detect_fhr_events(fhr: Channel, params: FhrParams = FhrParams()) -> list[EventInterval]:
    """Accelerations and decelerations, sorted by start."""
    _check_kind(fhr, ChannelKind.FHR)
    x = np.where(fhr.valid, fhr.samples, np.nan)
    base = rolling_median_baseline(fhr, params.baseline_window)
    t = fhr.times()
    acc = _excursions(x, base, +1, params, t, fhr.dt, EventKind.ACCELERATION)
    dec = _excursions(x, base, -1, params, t, fhr.dt, EventKind.DECELERATION)
    return sorted(acc + dec, key=lambda e: (e.start, e.kind.value))
