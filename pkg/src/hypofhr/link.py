"""Pairing of maternal hypoxic events with FHR events, and per-event
hypoxic characteristics (nadir, drop, duration, burden area)."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import Channel, ChannelKind, EventInterval, EventKind, TimeSpan

LINK_WINDOW_S = 30.0
BASELINE_LOOKBACK_S = 30.0


class EventUnusable(ValueError):
    """Raised when an event has too little valid SpO2 to characterise."""


@dataclass(frozen=True)
class HypoxicFeatures:
    duration: float
    nadir: float
    drop: float
    baseline: float
    burden_area: Optional[float]  # None when too few valid samples to integrate

    def get(self, name: str) -> Optional[float]:
        return getattr(self, name)


@dataclass(frozen=True)
class LinkedEvent:
    hypoxia: EventInterval
    fhr_event: Optional[EventInterval]
    link_kind: Optional[EventKind]
    linked_duration: float
    features: Optional[HypoxicFeatures] = None
    participant_id: str = ""

    @property
    def linked_span(self) -> TimeSpan:
        return TimeSpan(self.hypoxia.start, self.hypoxia.start + self.linked_duration)


def linked_duration(h: TimeSpan, fhr: TimeSpan) -> float:
    """Duration of a linked event: from hypoxia onset to whichever ends last,
    the hypoxic event or the FHR event."""
    return max(fhr.end - h.start, h.end - h.start)


def link_events(
    hypoxic: Sequence[EventInterval],
    fhr_events: Sequence[EventInterval],
    window: float = LINK_WINDOW_S,
    spo2: Optional[Channel] = None,
    participant_id: str = "",
    lookback: float = BASELINE_LOOKBACK_S,
) -> list[LinkedEvent]:
    """Pair each hypoxic event with every FHR event whose onset lies in
    ``[h.start, h.end + window]``.

    ``hypoxic`` should already be merged with the same window. A hypoxic
    event with no qualifying FHR event yields one unlinked record; one with
    several yields one record per pairing. When ``spo2`` is given each record
    carries the event's :class:`HypoxicFeatures` (``None`` if unusable).
    """
    if window < 0:
        raise ValueError("link window must be non-negative")
    fhr = sorted(
        (e for e in fhr_events if e.kind in (EventKind.ACCELERATION, EventKind.DECELERATION)),
        key=lambda e: (e.start, e.kind.value),
    )
    onsets = np.array([e.start for e in fhr])
    out = []
    for h in sorted(hypoxic, key=lambda e: e.start):
        if h.kind != EventKind.HYPOXIA:
            raise ValueError(f"expected hypoxia events, got {h.kind.value}")
        features = None
        if spo2 is not None:
            try:
                features = event_features(spo2, h.span, lookback=lookback)
            except EventUnusable:
                features = None
        lo = np.searchsorted(onsets, h.start, side="left")
        hi = np.searchsorted(onsets, h.end + window, side="right")
        if lo == hi:
            out.append(LinkedEvent(h, None, None, h.duration(), features, participant_id))
            continue
        for f in fhr[lo:hi]:
            out.append(
                LinkedEvent(h, f, f.kind, linked_duration(h.span, f.span), features, participant_id)
            )
    return out


def _event_samples(spo2: Channel, span: TimeSpan) -> tuple[int, int]:
    return spo2.index_range(span.start, span.end, closed=True)


def spo2_baseline(spo2: Channel, onset: float, lookback: float = BASELINE_LOOKBACK_S) -> float:
    """Maximum valid SpO2 over ``[onset - lookback, onset]``."""
    i0, i1 = spo2.index_range(onset - lookback, onset, closed=True)
    vals = spo2.samples[i0:i1][spo2.valid[i0:i1]]
    if vals.size == 0:
        raise EventUnusable(f"no valid SpO2 in the {lookback:g} s before onset {onset:g}")
    return float(vals.max())


def simpson_uniform(y: np.ndarray, h: float) -> float:
    """Composite Simpson on a uniform grid.

    With an odd number of intervals the last interval is integrated with
    the trapezoid rule.
    """
    y = np.asarray(y, dtype=float)
    m = y.size - 1
    if m < 1:
        return 0.0
    even = m - (m % 2)
    total = 0.0
    if even:
        total = h / 3.0 * (y[0] + 4.0 * y[1:even:2].sum() + 2.0 * y[2:even - 1:2].sum() + y[even])
    if m % 2:
        total += 0.5 * h * (y[-2] + y[-1])
    return float(total)


def trapezoid_uniform(y: np.ndarray, h: float) -> float:
    y = np.asarray(y, dtype=float)
    if y.size < 2:
        return 0.0
    return float(h * (y.sum() - 0.5 * (y[0] + y[-1])))


def hypoxic_burden_area(
    spo2: Channel,
    event: TimeSpan,
    baseline: Optional[float] = None,
    lookback: float = BASELINE_LOOKBACK_S,
    method: str = "simpson",
) -> float:
    """Area of the SpO2 deficit below the pre-event baseline, in %*s.

    The deficit is clamped at zero. Invalid samples inside the event are
    linearly interpolated from their valid neighbours. ``method="trapezoid"``
    exists for additivity checks.
    """
    if spo2.kind != ChannelKind.SPO2:
        raise ValueError("burden area needs an SpO2 channel")
    if baseline is None:
        baseline = spo2_baseline(spo2, event.start, lookback)
    i0, i1 = _event_samples(spo2, event)
    valid = spo2.valid[i0:i1]
    if valid.sum() < 2:
        raise EventUnusable(f"fewer than 2 valid SpO2 samples in [{event.start:g}, {event.end:g}]")
    s = spo2.samples[i0:i1]
    if not valid.all():
        idx = np.arange(s.size)
        s = np.interp(idx, idx[valid], s[valid])
    deficit = np.maximum(baseline - s, 0.0)
    if method == "simpson":
        return simpson_uniform(deficit, spo2.dt)
    if method == "trapezoid":
        return trapezoid_uniform(deficit, spo2.dt)
    raise ValueError(f"unknown integration method {method!r}")


def event_features(spo2: Channel, event: TimeSpan, lookback: float = BASELINE_LOOKBACK_S) -> HypoxicFeatures:
    i0, i1 = _event_samples(spo2, event)
    vals = spo2.samples[i0:i1][spo2.valid[i0:i1]]
    if vals.size == 0:
        raise EventUnusable(f"no valid SpO2 in [{event.start:g}, {event.end:g}]")
    baseline = spo2_baseline(spo2, event.start, lookback)
    nadir = float(vals.min())
    try:
        burden = hypoxic_burden_area(spo2, event, baseline=baseline)
    except EventUnusable:
        burden = None
    return HypoxicFeatures(
        duration=event.duration(),
        nadir=nadir,
        drop=baseline - nadir,
        baseline=baseline,
        burden_area=burden,
    )


LINKED_CSV_COLUMNS = (
    "participant_id", "link_kind", "h_start", "h_end", "fhr_start", "fhr_end",
    "linked_duration", "nadir", "drop", "duration", "burden",
)


def _cell(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def linked_events_csv(linked: Iterable[LinkedEvent]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(LINKED_CSV_COLUMNS)
    for ev in linked:
        f = ev.features
        writer.writerow(
            _cell(v)
            for v in (
                ev.participant_id,
                ev.link_kind.value if ev.link_kind else "none",
                float(ev.hypoxia.start),
                float(ev.hypoxia.end),
                float(ev.fhr_event.start) if ev.fhr_event else None,
                float(ev.fhr_event.end) if ev.fhr_event else None,
                float(ev.linked_duration),
                f.nadir if f else None,
                f.drop if f else None,
                float(ev.hypoxia.duration()),
                f.burden_area if f else None,
            )
        )
    return buf.getvalue()
