"""Signal/annotation CSV readers and writers, cohort manifests, quality screen.

Signal CSV::

    # kind=spo2, sample_rate=1, t0=0
    97
    96

    95

A blank line is a missing sample. Annotation CSV has the header
``kind,start_s,end_s`` with kinds ``hypoxia``, ``acc`` and ``dec``.
"""

from __future__ import annotations

import enum
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Optional, Union

import numpy as np

from .core import Channel, ChannelKind, EventInterval, EventKind, EventSource, Recording, TimeSpan


class ParseError(ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.line = line
        self.path = path
        where = ""
        if path:
            where += f"{path}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)


Source = Union[bytes, str, os.PathLike, BinaryIO]


def _read_text(source: Source) -> tuple[str, Optional[str]]:
    if isinstance(source, bytes):
        raw, name = source, None
    elif isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            raw = fh.read()
        name = os.fspath(source)
    else:
        raw, name = source.read(), getattr(source, "name", None)
        if isinstance(raw, str):
            raw = raw.encode("utf-8")
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8 ({exc})", path=name) from None
    return text, name


def _parse_header(line: str, path: Optional[str]) -> dict[str, str]:
    if not line.startswith("#"):
        raise ParseError("expected header '# kind=..., sample_rate=..., t0=...'", 1, path)
    fields = {}
    for part in line[1:].split(","):
        if not part.strip():
            continue
        key, sep, value = part.partition("=")
        if not sep:
            raise ParseError(f"malformed header field {part.strip()!r}", 1, path)
        fields[key.strip().lower()] = value.strip()
    missing = {"kind", "sample_rate"} - fields.keys()
    if missing:
        raise ParseError(f"header missing {', '.join(sorted(missing))}", 1, path)
    return fields


def parse_signal_file(source: Source, kind: Optional[Union[ChannelKind, str]] = None) -> Channel:
    """Read a signal CSV into a :class:`Channel`.

    Blank cells, ``nan`` and values outside the physiological range become
    invalid samples; zero falls outside both ranges so the common ``0``
    dropout sentinel is covered too.
    """
    text, path = _read_text(source)
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", 1, path)
    header = _parse_header(lines[0].strip(), path)
    try:
        file_kind = ChannelKind(header["kind"].lower())
    except ValueError:
        raise ParseError(f"unknown channel kind {header['kind']!r}", 1, path) from None
    if kind is not None and ChannelKind(kind) != file_kind:
        raise ParseError(f"expected {ChannelKind(kind).value} channel, file declares {file_kind.value}", 1, path)
    try:
        fs = float(header["sample_rate"])
        t0 = float(header.get("t0", "0"))
    except ValueError:
        raise ParseError("non-numeric sample_rate or t0 in header", 1, path) from None
    if not (fs > 0 and math.isfinite(fs)):
        raise ParseError(f"sample_rate must be positive, got {header['sample_rate']}", 1, path)
    if not math.isfinite(t0):
        raise ParseError("t0 must be finite", 1, path)

    # one sample per line; an empty final line (before the last LF) is a blank sample
    body = lines[1:]
    values = np.empty(len(body), dtype=float)
    for i, cell in enumerate(body):
        cell = cell.strip()
        if not cell:
            values[i] = np.nan
            continue
        try:
            values[i] = float(cell)
        except ValueError:
            raise ParseError(f"non-numeric value {cell!r}", i + 2, path) from None
    return Channel(file_kind, fs, t0, values)


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        return ""
    r = repr(float(x))
    return r[:-2] if r.endswith(".0") else r


def format_signal(channel: Channel) -> str:
    head = (
        f"# kind={channel.kind.value}, sample_rate={_format_float(channel.sample_rate)}, "
        f"t0={_format_float(channel.t0)}\n"
    )
    return head + "".join(_format_float(v) + "\n" for v in channel.samples)


def write_signal_file(channel: Channel, path: Union[str, os.PathLike]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_signal(channel))


ANNOTATION_HEADER = ("kind", "start_s", "end_s")


def parse_annotation_file(source: Source) -> list[EventInterval]:
    text, path = _read_text(source)
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file (missing header)", 1, path)
    header = tuple(c.strip().lower() for c in lines[0].split(","))
    if header != ANNOTATION_HEADER:
        raise ParseError(f"expected header {','.join(ANNOTATION_HEADER)}", 1, path)
    events = []
    for lineno, row in enumerate(lines[1:], start=2):
        if not row.strip():
            continue
        cells = [c.strip() for c in row.split(",")]
        if len(cells) != 3:
            raise ParseError(f"expected 3 columns, got {len(cells)}", lineno, path)
        try:
            kind = EventKind(cells[0].lower())
        except ValueError:
            raise ParseError(f"unknown event kind {cells[0]!r}", lineno, path) from None
        try:
            start, end = float(cells[1]), float(cells[2])
        except ValueError:
            raise ParseError("non-numeric start/end", lineno, path) from None
        if not (math.isfinite(start) and math.isfinite(end)):
            raise ParseError("non-finite start/end", lineno, path)
        if end <= start:
            raise ParseError(f"end {cells[2]} not after start {cells[1]}", lineno, path)
        events.append(EventInterval(kind, TimeSpan(start, end), EventSource.ANNOTATED))
    return events


def format_annotations(events) -> str:
    rows = [",".join(ANNOTATION_HEADER)]
    for e in sorted(events, key=lambda e: (e.start, e.end, e.kind.value)):
        rows.append(f"{e.kind.value},{_format_float(e.start)},{_format_float(e.end)}")
    return "\n".join(rows) + "\n"


def write_annotation_file(events, path: Union[str, os.PathLike]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_annotations(events))


@dataclass(frozen=True)
class ManifestEntry:
    participant_id: str
    center: str
    spo2_path: Optional[Path]
    fhr_path: Optional[Path]
    annotation_path: Optional[Path]


def read_manifest(path: Union[str, os.PathLike]) -> list[ManifestEntry]:
    """Read a cohort manifest; relative paths resolve against its directory."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON ({exc.msg})", exc.lineno, str(path)) from None
    if not isinstance(data, list):
        raise ParseError("manifest must be a JSON array", path=str(path))
    base = path.parent
    entries = []
    for i, item in enumerate(data):
        if not isinstance(item, dict) or not item.get("participant_id"):
            raise ParseError(f"entry {i} lacks participant_id", path=str(path))

        def resolve(key):
            value = item.get(key)
            return None if not value else base / value

        entries.append(
            ManifestEntry(
                participant_id=str(item["participant_id"]),
                center=str(item.get("center", "")),
                spo2_path=resolve("spo2_path"),
                fhr_path=resolve("fhr_path"),
                annotation_path=resolve("annotation_path"),
            )
        )
    return entries


def write_manifest(entries, path: Union[str, os.PathLike]) -> None:
    path = Path(path)

    def rel(p):
        if p is None:
            return None
        try:
            return Path(os.path.relpath(p, path.parent)).as_posix()
        except ValueError:
            return Path(p).as_posix()

    data = [
        {
            "participant_id": e.participant_id,
            "center": e.center,
            "spo2_path": rel(e.spo2_path),
            "fhr_path": rel(e.fhr_path),
            "annotation_path": rel(e.annotation_path),
        }
        for e in entries
    ]
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def load_recording(entry: ManifestEntry) -> Recording:
    """Assemble a recording; missing files yield absent channels.

    Files that exist but cannot be parsed raise :class:`ParseError`.
    """

    def maybe(path, reader):
        if path is None or not Path(path).exists():
            return None
        return reader(path)

    spo2 = maybe(entry.spo2_path, lambda p: parse_signal_file(p, ChannelKind.SPO2))
    fhr = maybe(entry.fhr_path, lambda p: parse_signal_file(p, ChannelKind.FHR))
    annotations = maybe(entry.annotation_path, parse_annotation_file) or []
    total = None
    if spo2 is None and fhr is None:
        ends = [e.end for e in annotations]
        total = TimeSpan(0.0, max(ends, default=0.0))
    return Recording(entry.participant_id, entry.center, spo2, fhr, tuple(annotations), total)


class ScreenReason(str, enum.Enum):
    MISSING_CHANNEL = "MissingChannel"
    ZERO_SIGNAL_RUN = "ZeroSignalRun"
    EXCESS_INVALID_FRACTION = "ExcessInvalidFraction"
    ABNORMAL_FLUCTUATION = "AbnormalFluctuation"


@dataclass(frozen=True)
class ScreenPolicy:
    max_invalid_run_s: float = 300.0
    max_invalid_fraction: float = 0.20
    max_spo2_slope: float = 4.0  # %/s between consecutive valid samples


@dataclass(frozen=True)
class ScreenReport:
    participant_id: str
    passed: bool
    reasons: tuple[ScreenReason, ...] = ()
    metrics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "participant_id": self.participant_id,
            "passed": self.passed,
            "reasons": [r.value for r in self.reasons],
            "metrics": {k: self.metrics[k] for k in sorted(self.metrics)},
        }


def longest_invalid_run(channel: Channel) -> float:
    """Longest contiguous run of invalid samples, in seconds."""
    bad = ~channel.valid
    if not bad.any():
        return 0.0
    padded = np.concatenate(([0], bad.view(np.int8), [0]))
    edges = np.flatnonzero(np.diff(padded))
    runs = edges[1::2] - edges[0::2]
    return float(runs.max()) / channel.sample_rate


def max_valid_slope(channel: Channel) -> float:
    """Largest |change|/time between consecutive valid samples."""
    idx = np.flatnonzero(channel.valid)
    if idx.size < 2:
        return 0.0
    vals = channel.samples[idx]
    return float(np.max(np.abs(np.diff(vals)) / (np.diff(idx) / channel.sample_rate)))


def quality_screen(recording: Recording, policy: ScreenPolicy = ScreenPolicy()) -> ScreenReport:
    reasons = []
    metrics = {}
    channels = {"spo2": recording.spo2, "fhr": recording.fhr}
    if any(c is None for c in channels.values()):
        reasons.append(ScreenReason.MISSING_CHANNEL)
    run_fail = frac_fail = False
    for name, ch in channels.items():
        if ch is None:
            continue
        run = longest_invalid_run(ch)
        frac = 1.0 - ch.valid_fraction()
        metrics[f"{name}_longest_invalid_run_s"] = run
        metrics[f"{name}_invalid_fraction"] = frac
        run_fail |= run > policy.max_invalid_run_s
        frac_fail |= frac > policy.max_invalid_fraction
    if run_fail:
        reasons.append(ScreenReason.ZERO_SIGNAL_RUN)
    if frac_fail:
        reasons.append(ScreenReason.EXCESS_INVALID_FRACTION)
    if recording.spo2 is not None:
        slope = max_valid_slope(recording.spo2)
        metrics["spo2_max_jump_per_s"] = slope
        if slope > policy.max_spo2_slope:
            reasons.append(ScreenReason.ABNORMAL_FLUCTUATION)
    return ScreenReport(recording.participant_id, not reasons, tuple(reasons), metrics)
