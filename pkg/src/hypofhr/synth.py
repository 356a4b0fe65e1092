"""Seeded synthetic cohorts with planted maternal-fetal coupling.

SpO2 (1 Hz) carries V-shaped desaturations: a linear descent over the first
third of the event, a nadir plateau over the middle third and a linear
recovery over the last third, so the burden area of a planted event is
``drop * 2/3 * duration``. FHR (4 Hz) is a per-participant baseline plus an
AR(1) wander and white noise, with trapezoidal accelerations added on top.
Each hypoxic event triggers an acceleration with probability
``coupling_prob`` (or ``logistic(a + b * duration)`` when ``coupling_logit``
is set) starting ``lag`` seconds after the hypoxia onset.

All randomness comes from :mod:`hypofhr.rng`, keyed by
``(seed, participant_index, stream_id)``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional, Union

import numpy as np
from scipy.signal import lfilter

from .core import Channel, ChannelKind, EventInterval, EventKind, EventSource, Recording, TimeSpan
from .ingest import ManifestEntry, write_annotation_file, write_manifest, write_signal_file
from .rng import Stream, derive_key

# stream ids
_HYPOXIA, _COUPLING, _SPONTANEOUS, _FHR_NOISE, _LEVELS = 1, 2, 3, 4, 5


@dataclass(frozen=True)
class SynthConfig:
    n_participants: int = 40
    hours: float = 8.0
    hypoxia_rate: float = 10.0              # events / hour
    duration_log_mu: float = math.log(35.0)
    duration_log_sigma: float = 0.35
    duration_clip: tuple = (10.0, 180.0)
    drop_range: tuple = (3.0, 8.0)          # % below baseline
    coupling_prob: float = 0.7
    coupling_logit: Optional[tuple] = None  # (intercept, slope per second of duration)
    coupling_lag_range: tuple = (0.0, 8.0)  # s after hypoxia onset
    acc_amplitude_range: tuple = (15.0, 25.0)
    acc_duration_range: tuple = (15.0, 30.0)
    acc_ramp_s: float = 3.0
    spontaneous_acc_rate: float = 3.0       # events / hour
    fhr_baseline_range: tuple = (125.0, 150.0)
    baseline_wander_sd: float = 2.0
    baseline_wander_tau: float = 60.0
    noise_sd: float = 1.5
    spo2_baseline_range: tuple = (95.0, 98.0)
    spo2_rate: float = 1.0
    fhr_rate: float = 4.0
    min_separation: float = 35.0            # s between planted hypoxic events
    edge_margin: float = 60.0
    centers: tuple = ("A",)
    seed: int = 0
    max_retries: int = 10_000

    def __post_init__(self):
        for name in ("duration_clip", "drop_range", "coupling_lag_range", "acc_amplitude_range",
                     "acc_duration_range", "fhr_baseline_range", "spo2_baseline_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} must be ordered, got {(lo, hi)}")
            object.__setattr__(self, name, (float(lo), float(hi)))
        if self.n_participants < 1:
            raise ValueError("n_participants must be at least 1")
        if not self.hours > 0:
            raise ValueError("hours must be positive")
        if self.hypoxia_rate < 0 or self.spontaneous_acc_rate < 0:
            raise ValueError("rates must be non-negative")
        if not 0.0 <= self.coupling_prob <= 1.0:
            raise ValueError("coupling_prob must lie in [0, 1]")
        lo, hi = self.coupling_lag_range
        if lo < 0 or hi > 30:
            raise ValueError("coupling_lag_range must lie within [0, 30] s")
        if self.noise_sd < 0 or self.baseline_wander_sd < 0 or self.duration_log_sigma < 0:
            raise ValueError("standard deviations must be non-negative")
        if self.drop_range[0] <= 0:
            raise ValueError("drops must be positive")
        if self.coupling_logit is not None:
            object.__setattr__(self, "coupling_logit", tuple(map(float, self.coupling_logit)))
        object.__setattr__(self, "centers", tuple(self.centers))
        if not self.centers:
            raise ValueError("need at least one center label")

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}

    @classmethod
    def from_dict(cls, d: dict) -> "SynthConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown synth config keys: {sorted(unknown)}")
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in d.items()})


@dataclass(frozen=True)
class PlantedHypoxia:
    span: TimeSpan
    drop: float
    coupled: bool
    coupling_probability: float
    acceleration: Optional[TimeSpan] = None


@dataclass
class SynthRecording:
    recording: Recording
    hypoxia: list = field(default_factory=list)       # PlantedHypoxia
    spontaneous: list = field(default_factory=list)   # TimeSpan
    spo2_baseline: float = 0.0
    fhr_baseline: float = 0.0


def _place(stream: Stream, n: int, draw_len, lo: float, hi: float, taken: list, gap: float, retries: int):
    """Place ``n`` intervals uniformly in ``[lo, hi]`` without coming within
    ``gap`` of any interval in ``taken`` (which is extended in place)."""
    placed = []
    for _ in range(n):
        for _attempt in range(retries):
            length = draw_len()
            if hi - length <= lo:
                continue
            start = stream.scalar(lo, hi - length)
            end = start + length
            if all(end + gap <= s or start >= e + gap for s, e in taken):
                taken.append((start, end))
                placed.append((start, end))
                break
        else:
            raise RuntimeError(f"could not place non-overlapping interval after {retries} attempts")
    return placed


def _v_profile(t: np.ndarray, start: float, end: float, drop: float) -> np.ndarray:
    d = end - start
    a, b = start + d / 3.0, start + 2.0 * d / 3.0
    out = np.zeros_like(t)
    m = (t > start) & (t < a)
    out[m] = drop * (t[m] - start) / (a - start)
    out[(t >= a) & (t <= b)] = drop
    m = (t > b) & (t < end)
    out[m] = drop * (end - t[m]) / (end - b)
    return out


def _trapezoid(t: np.ndarray, start: float, end: float, amp: float, ramp: float) -> np.ndarray:
    ramp = min(ramp, (end - start) / 3.0)
    return amp * np.clip(np.minimum(t - start, end - t) / ramp, 0.0, 1.0)


def _round(x: np.ndarray) -> np.ndarray:
    return np.round(x, 2)


def generate_recording(config: SynthConfig, participant_index: int) -> SynthRecording:
    """Generate one participant; fully determined by ``(config, participant_index)``."""
    c = config
    key = lambda sid: derive_key(c.seed, participant_index, sid)  # noqa: E731
    levels = Stream(key(_LEVELS))
    spo2_base = levels.scalar(*c.spo2_baseline_range)
    fhr_base = levels.scalar(*c.fhr_baseline_range)
    T = c.hours * 3600.0

    hs = Stream(key(_HYPOXIA))
    n_h = hs.poisson(c.hypoxia_rate * c.hours)
    lo_d, hi_d = c.duration_clip

    def draw_duration():
        return float(np.clip(math.exp(c.duration_log_mu + c.duration_log_sigma * hs.normal(1)[0]), lo_d, hi_d))

    taken: list = []
    spans = _place(hs, n_h, draw_duration, c.edge_margin, T - c.edge_margin, taken, c.min_separation, c.max_retries)
    spans.sort()
    drops = hs.uniform(len(spans), *c.drop_range)

    cs = Stream(key(_COUPLING))
    planted = []
    accs = []
    for (s, e), drop in zip(spans, drops):
        if c.coupling_logit is not None:
            a, b = c.coupling_logit
            prob = 1.0 / (1.0 + math.exp(-(a + b * (e - s))))
        else:
            prob = c.coupling_prob
        u, lag, amp, dur = cs.uniform(4)
        coupled = bool(u < prob)
        acc = None
        if coupled:
            lag = c.coupling_lag_range[0] + lag * (c.coupling_lag_range[1] - c.coupling_lag_range[0])
            dur = c.acc_duration_range[0] + dur * (c.acc_duration_range[1] - c.acc_duration_range[0])
            amp = c.acc_amplitude_range[0] + amp * (c.acc_amplitude_range[1] - c.acc_amplitude_range[0])
            acc = TimeSpan(s + lag, min(s + lag + dur, T))
            accs.append((acc, amp))
        planted.append(PlantedHypoxia(TimeSpan(s, e), float(drop), coupled, prob, acc))

    ss = Stream(key(_SPONTANEOUS))
    n_sp = ss.poisson(c.spontaneous_acc_rate * c.hours)
    acc_taken = [(a.start, a.end) for a, _ in accs]
    spont = _place(
        ss, n_sp, lambda: ss.scalar(*c.acc_duration_range), 0.0, T, acc_taken, 0.0, c.max_retries
    )
    amps = ss.uniform(len(spont), *c.acc_amplitude_range)
    spont_spans = [TimeSpan(s, e) for s, e in sorted(spont)]
    for (s, e), amp in zip(spont, amps):
        accs.append((TimeSpan(s, e), float(amp)))

    # SpO2
    t_s = np.arange(int(round(T * c.spo2_rate))) / c.spo2_rate
    deficit = np.zeros_like(t_s)
    for p in planted:
        i0, i1 = np.searchsorted(t_s, [p.span.start, p.span.end])
        deficit[i0:i1 + 1] = np.maximum(
            deficit[i0:i1 + 1], _v_profile(t_s[i0:i1 + 1], p.span.start, p.span.end, p.drop)
        )
    spo2 = Channel(ChannelKind.SPO2, c.spo2_rate, 0.0, _round(spo2_base - deficit))

    # FHR
    t_f = np.arange(int(round(T * c.fhr_rate))) / c.fhr_rate
    ns = Stream(key(_FHR_NOISE))
    z = ns.normal(2 * t_f.size)
    phi = math.exp(-1.0 / (c.fhr_rate * c.baseline_wander_tau))
    innov = c.baseline_wander_sd * math.sqrt(1.0 - phi * phi) * z[: t_f.size]
    innov[0] = c.baseline_wander_sd * z[0]
    wander = lfilter([1.0], [1.0, -phi], innov)
    bump = np.zeros_like(t_f)
    for span, amp in accs:
        i0, i1 = np.searchsorted(t_f, [span.start, span.end])
        seg = slice(i0, i1 + 1)
        bump[seg] = np.maximum(bump[seg], _trapezoid(t_f[seg], span.start, span.end, amp, c.acc_ramp_s))
    fhr_vals = fhr_base + wander + c.noise_sd * z[t_f.size:] + bump
    fhr = Channel(ChannelKind.FHR, c.fhr_rate, 0.0, _round(fhr_vals))

    annotations = [EventInterval(EventKind.HYPOXIA, p.span, EventSource.ANNOTATED) for p in planted]
    annotations += [EventInterval(EventKind.ACCELERATION, span, EventSource.ANNOTATED) for span, _ in accs]
    annotations.sort(key=lambda e: (e.start, e.kind.value))
    rec = Recording(
        participant_id=f"P{participant_index:03d}",
        center=c.centers[participant_index % len(c.centers)],
        spo2=spo2,
        fhr=fhr,
        annotations=tuple(annotations),
        total_span=TimeSpan(0.0, T),
    )
    return SynthRecording(rec, planted, spont_spans, spo2_base, fhr_base)


def generate_cohort(config: SynthConfig) -> list[SynthRecording]:
    return [generate_recording(config, i) for i in range(config.n_participants)]


def write_cohort(config: SynthConfig, out_dir: Union[str, os.PathLike]) -> dict:
    """Write a cohort as signal/annotation CSVs plus ``manifest.json`` and
    ``truth.json``; returns the ground-truth summary."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    truth = {"config": config.to_dict(), "participants": []}
    for i in range(config.n_participants):
        sr = generate_recording(config, i)
        rec = sr.recording
        pid = rec.participant_id
        paths = {k: out / f"{pid}_{k}.csv" for k in ("spo2", "fhr", "events")}
        write_signal_file(rec.spo2, paths["spo2"])
        write_signal_file(rec.fhr, paths["fhr"])
        write_annotation_file(rec.annotations, paths["events"])
        entries.append(ManifestEntry(pid, rec.center, paths["spo2"], paths["fhr"], paths["events"]))
        truth["participants"].append({
            "participant_id": pid,
            "center": rec.center,
            "n_hypoxia": len(sr.hypoxia),
            "n_coupled": sum(p.coupled for p in sr.hypoxia),
            "n_spontaneous_acc": len(sr.spontaneous),
        })
    write_manifest(entries, out / "manifest.json")
    parts = truth["participants"]
    truth["summary"] = {
        "participants": len(parts),
        "hypoxic_events": sum(p["n_hypoxia"] for p in parts),
        "coupled_events": sum(p["n_coupled"] for p in parts),
        "spontaneous_accelerations": sum(p["n_spontaneous_acc"] for p in parts),
    }
    (out / "truth.json").write_text(json.dumps(truth, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return truth["summary"]


def null_config(config: SynthConfig = SynthConfig()) -> SynthConfig:
    """Same cohort with all maternal-fetal coupling removed."""
    return replace(config, coupling_prob=0.0, coupling_logit=None)
