"""Time spans, sampled channels, typed event intervals and interval algebra.

All times are real-valued seconds from a per-recording epoch. Spans are
half-open, ``[start, end)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np


class ChannelKind(str, enum.Enum):
    SPO2 = "spo2"
    FHR = "fhr"


class EventKind(str, enum.Enum):
    HYPOXIA = "hypoxia"
    ACCELERATION = "acc"
    DECELERATION = "dec"


class EventSource(str, enum.Enum):
    ANNOTATED = "annotated"
    DETECTED = "detected"


# Physiological plausibility ranges; samples outside are flagged invalid.
VALID_RANGE = {
    ChannelKind.SPO2: (50.0, 100.0),
    ChannelKind.FHR: (50.0, 240.0),
}


@dataclass(frozen=True)
class TimeSpan:
    start: float
    end: float

    def __post_init__(self):
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "end", float(self.end))
        if not (np.isfinite(self.start) and np.isfinite(self.end)):
            raise ValueError(f"non-finite span [{self.start}, {self.end})")
        if self.end < self.start:
            raise ValueError(f"span end {self.end} precedes start {self.start}")

    def duration(self) -> float:
        return self.end - self.start

    def contains(self, t: float) -> bool:
        return self.start <= t < self.end


@dataclass(frozen=True, eq=False)
class Channel:
    """One uniformly sampled signal with a validity mask.

    Sample ``i`` sits at ``t0 + i / sample_rate``. The stored mask is the
    conjunction of the caller's mask, finiteness and the physiological range
    for ``kind``, so out-of-range values are kept but never treated as data.
    """

    kind: ChannelKind
    sample_rate: float
    t0: float
    samples: np.ndarray
    valid: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        kind = ChannelKind(self.kind)
        if not self.sample_rate > 0 or not np.isfinite(self.sample_rate):
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if self.valid is None:
            valid = np.ones(samples.shape, dtype=bool)
        else:
            valid = np.array(self.valid, dtype=bool)
            if valid.shape != samples.shape:
                raise ValueError("samples and valid mask differ in length")
        lo, hi = VALID_RANGE[kind]
        with np.errstate(invalid="ignore"):
            valid &= np.isfinite(samples) & (samples >= lo) & (samples <= hi)
        samples.setflags(write=False)
        valid.setflags(write=False)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "valid", valid)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) / self.sample_rate

    def extent(self) -> TimeSpan:
        """Sampled extent; each sample covers one sample period."""
        return TimeSpan(self.t0, self.t0 + self.samples.size / self.sample_rate)

    def index_range(self, start: float, end: float, closed: bool = False) -> tuple[int, int]:
        """Indices ``[i0, i1)`` of samples with times in ``[start, end)``
        (or ``[start, end]`` when ``closed``)."""
        fs = self.sample_rate
        # small tolerance so that sample times computed by t0 + i/fs land on
        # boundaries given in seconds
        eps = 1e-9
        i0 = int(np.ceil((start - self.t0) * fs - eps))
        if closed:
            i1 = int(np.floor((end - self.t0) * fs + eps)) + 1
        else:
            i1 = int(np.ceil((end - self.t0) * fs - eps))
        n = self.samples.size
        i0 = min(max(i0, 0), n)
        i1 = min(max(i1, i0), n)
        return i0, i1

    def valid_fraction(self) -> float:
        return float(self.valid.mean()) if self.samples.size else 0.0

    def __eq__(self, other):
        if not isinstance(other, Channel):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.sample_rate == other.sample_rate
            and self.t0 == other.t0
            and np.array_equal(self.samples, other.samples, equal_nan=True)
            and np.array_equal(self.valid, other.valid)
        )


@dataclass(frozen=True)
class EventInterval:
    kind: EventKind
    span: TimeSpan
    source: EventSource = EventSource.ANNOTATED

    def __post_init__(self):
        object.__setattr__(self, "kind", EventKind(self.kind))
        object.__setattr__(self, "source", EventSource(self.source))
        if not self.span.duration() > 0:
            raise ValueError(f"{self.kind.value} event has non-positive duration: {self.span}")

    @property
    def start(self) -> float:
        return self.span.start

    @property
    def end(self) -> float:
        return self.span.end

    def duration(self) -> float:
        return self.span.duration()


@dataclass(frozen=True)
class Recording:
    """One time-synchronised overnight SpO2 + FHR recording.

    Either channel may be ``None`` when the file was missing; such recordings
    fail the quality screen rather than raising.
    """

    participant_id: str
    center: str
    spo2: Optional[Channel]
    fhr: Optional[Channel]
    annotations: tuple[EventInterval, ...] = ()
    total_span: Optional[TimeSpan] = None

    def __post_init__(self):
        if not self.participant_id:
            raise ValueError("participant_id must be non-empty")
        object.__setattr__(self, "annotations", tuple(self.annotations))
        extents = [c.extent() for c in (self.spo2, self.fhr) if c is not None]
        if extents:
            cover = TimeSpan(min(e.start for e in extents), max(e.end for e in extents))
            if self.total_span is None:
                object.__setattr__(self, "total_span", cover)
            elif self.total_span.start > cover.start or self.total_span.end < cover.end:
                raise ValueError("total_span does not cover the sampled channels")
        elif self.total_span is None:
            raise ValueError("total_span required when no channel is present")

    def events(self, kind: EventKind) -> list[EventInterval]:
        return sorted((e for e in self.annotations if e.kind == kind), key=lambda e: e.start)

    def has_fhr_annotations(self) -> bool:
        return any(e.kind != EventKind.HYPOXIA for e in self.annotations)


def _as_span(x) -> TimeSpan:
    return x.span if isinstance(x, EventInterval) else x


def overlap_duration(a: TimeSpan, b: TimeSpan) -> float:
    """Length of the intersection of two spans (0 for disjoint or touching)."""
    return max(0.0, min(a.end, b.end) - max(a.start, b.start))


def union_spans(spans: Iterable) -> list[TimeSpan]:
    """Union of spans (or events) as sorted, disjoint, non-touching spans."""
    items = sorted(((s.start, s.end) for s in map(_as_span, spans)), key=lambda p: p[0])
    out: list[list[float]] = []
    for start, end in items:
        if out and start <= out[-1][1]:
            out[-1][1] = max(out[-1][1], end)
        else:
            out.append([start, end])
    return [TimeSpan(s, e) for s, e in out]


def union_duration(*spans) -> float:
    return float(sum(s.duration() for s in union_spans(spans)))


def total_duration(events: Iterable) -> float:
    """Duration of the union of the given spans or events; overlaps count once."""
    return float(sum(s.duration() for s in union_spans(events)))


def merge_intervals(events: Sequence[EventInterval], max_gap: float) -> list[EventInterval]:
    """Merge same-kind events separated by less than ``max_gap`` seconds.

    A merged event spans ``[min start, max end]`` of its constituents and is
    marked detected only if every constituent was.
    """
    if max_gap < 0:
        raise ValueError("max_gap must be non-negative")
    if not events:
        return []
    kinds = {e.kind for e in events}
    if len(kinds) != 1:
        raise ValueError(f"cannot merge events of mixed kinds: {sorted(k.value for k in kinds)}")
    kind = kinds.pop()
    ordered = sorted(events, key=lambda e: (e.start, e.end))
    groups: list[list[EventInterval]] = [[ordered[0]]]
    group_end = ordered[0].end
    for ev in ordered[1:]:
        if ev.start - group_end < max_gap or ev.start <= group_end:
            groups[-1].append(ev)
            group_end = max(group_end, ev.end)
        else:
            groups.append([ev])
            group_end = ev.end
    out = []
    for g in groups:
        if len(g) == 1:
            out.append(g[0])
            continue
        source = (
            EventSource.DETECTED
            if all(e.source == EventSource.DETECTED for e in g)
            else EventSource.ANNOTATED
        )
        span = TimeSpan(min(e.start for e in g), max(e.end for e in g))
        out.append(EventInterval(kind, span, source))
    return out
