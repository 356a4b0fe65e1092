"""FHR mean/STD/CV in the 10 s before, during, and 10 s after each hypoxic event."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import Channel, EventInterval, Recording, TimeSpan

PHASE_PAD_S = 10.0
MIN_VALID_FRACTION = 0.5


class Phase(str, enum.Enum):
    PRE = "pre"
    DURING = "during"
    POST = "post"


@dataclass(frozen=True)
class PhaseWindows:
    pre: TimeSpan
    during: TimeSpan
    post: TimeSpan
    pre_clipped: bool = False
    post_clipped: bool = False

    def __getitem__(self, phase: Phase) -> TimeSpan:
        return getattr(self, Phase(phase).value)


def phase_windows(event: TimeSpan, recording_span: TimeSpan, pad: float = PHASE_PAD_S) -> PhaseWindows:
    pre_start = max(event.start - pad, recording_span.start)
    post_end = min(event.end + pad, recording_span.end)
    pre = TimeSpan(min(pre_start, event.start), event.start)
    post = TimeSpan(event.end, max(post_end, event.end))
    return PhaseWindows(
        pre=pre,
        during=TimeSpan(event.start, event.end),
        post=post,
        pre_clipped=pre.duration() < pad,
        post_clipped=post.duration() < pad,
    )


@dataclass(frozen=True)
class PhaseStats:
    phase: Optional[Phase]
    mean: float
    std: float
    cv: float
    n_valid: int
    valid_fraction: float
    available: bool

    @property
    def cv_defined(self) -> bool:
        return self.available and self.mean > 0


def window_stats(
    fhr: Channel,
    window: TimeSpan,
    phase: Optional[Phase] = None,
    ddof: int = 0,
    min_valid_fraction: float = MIN_VALID_FRACTION,
) -> PhaseStats:
    """Mean, standard deviation (population by default) and CV of valid
    samples in ``[window.start, window.end)``."""
    i0, i1 = fhr.index_range(window.start, window.end)
    capacity = i1 - i0
    if capacity == 0:
        return PhaseStats(phase, math.nan, math.nan, math.nan, 0, 0.0, False)
    vals = fhr.samples[i0:i1][fhr.valid[i0:i1]]
    frac = vals.size / capacity
    if frac < min_valid_fraction or vals.size <= ddof:
        return PhaseStats(phase, math.nan, math.nan, math.nan, int(vals.size), frac, False)
    mean = float(vals.mean())
    std = float(vals.std(ddof=ddof))
    cv = std / mean if mean > 0 else math.nan
    return PhaseStats(phase, mean, std, cv, int(vals.size), frac, True)


@dataclass(frozen=True)
class BoxSummary:
    q1: float
    median: float
    q3: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...]
    n: int

    def to_dict(self) -> dict:
        return {
            "q1": self.q1, "median": self.median, "q3": self.q3,
            "whisker_low": self.whisker_low, "whisker_high": self.whisker_high,
            "outliers": list(self.outliers), "n": self.n,
        }


def boxplot_summary(values: Sequence[float], whis: float = 1.5) -> BoxSummary:
    """Tukey box-plot numbers; quartiles interpolate linearly between order statistics."""
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        raise ValueError("box plot of empty data")
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - whis * iqr, q3 + whis * iqr
    inside = v[(v >= lo_fence) & (v <= hi_fence)]
    outliers = v[(v < lo_fence) | (v > hi_fence)]
    return BoxSummary(
        float(q1), float(med), float(q3),
        float(inside.min()), float(inside.max()),
        tuple(float(o) for o in outliers), int(v.size),
    )


METRICS = ("mean", "std", "cv")


@dataclass
class PhaseReport:
    """Per-phase box summaries and grand means of the per-event FHR metrics."""

    boxes: dict = field(default_factory=dict)        # {phase: {metric: BoxSummary}}
    grand_means: dict = field(default_factory=dict)  # {phase: {metric: float}}
    n_events: int = 0
    values: dict = field(default_factory=dict)       # {phase: {metric: [float]}}
    reason: Optional[str] = None

    @property
    def empty(self) -> bool:
        return self.n_events == 0

    def to_dict(self) -> dict:
        out = {"n_events": self.n_events, "phases": {}}
        if self.reason:
            out["reason"] = self.reason
        for phase in Phase:
            if phase.value not in self.boxes:
                continue
            out["phases"][phase.value] = {
                m: {
                    "box": self.boxes[phase.value][m].to_dict() if m in self.boxes[phase.value] else None,
                    "grand_mean": self.grand_means[phase.value].get(m),
                }
                for m in METRICS
            }
        return out


def event_phase_stats(fhr: Channel, event: TimeSpan, recording_span: TimeSpan, **kw) -> dict:
    win = phase_windows(event, recording_span)
    return {p: window_stats(fhr, win[p], p, **kw) for p in Phase}


def cohort_phase_report(
    recordings: Iterable[Recording],
    events_by_participant: dict,
    ddof: int = 0,
) -> PhaseReport:
    """Aggregate phase statistics over every hypoxic event of every recording.

    ``events_by_participant`` maps participant id to its hypoxic events.
    """
    values = {p.value: {m: [] for m in METRICS} for p in Phase}
    n_events = 0
    for rec in recordings:
        if rec.fhr is None:
            continue
        for ev in events_by_participant.get(rec.participant_id, ()):
            span = ev.span if isinstance(ev, EventInterval) else ev
            stats = event_phase_stats(rec.fhr, span, rec.total_span, ddof=ddof)
            n_events += 1
            for phase, st in stats.items():
                if not st.available:
                    continue
                values[phase.value]["mean"].append(st.mean)
                values[phase.value]["std"].append(st.std)
                if st.cv_defined:
                    values[phase.value]["cv"].append(st.cv)
    report = PhaseReport(n_events=n_events, values=values)
    if not any(values[p][m] for p in values for m in METRICS):
        report.n_events = 0
        report.reason = "no usable hypoxic events"
        return report
    for phase, metrics in values.items():
        report.boxes[phase] = {m: boxplot_summary(v) for m, v in metrics.items() if v}
        report.grand_means[phase] = {m: (float(np.mean(v)) if v else None) for m, v in metrics.items()}
    return report
