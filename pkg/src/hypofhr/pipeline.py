"""Cohort-level orchestration: screen, choose events, link, and run every analysis."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import EventInterval, EventKind, Recording, merge_intervals
from .detect import DesatParams, FhrParams, detect_desaturations, detect_fhr_events
from .ingest import ScreenPolicy, ScreenReport, quality_screen
from .link import BASELINE_LOOKBACK_S, LINK_WINDOW_S, LinkedEvent, link_events
from .phase import PhaseReport, cohort_phase_report
from .stats import (
    FEATURES,
    FEATURE_LABELS,
    ContingencyTable,
    DegenerateTable,
    GlmRow,
    MissingFhrAnnotations,
    Outcome,
    TestResult,
    aggregate_tables,
    chi_square_test,
    contingency_from_recording,
    event_rows,
    glm_feature_screen,
    pooled_t_from_summary,
    welch_t_from_summary,
)

log = logging.getLogger(__name__)

FHR_KINDS = (EventKind.ACCELERATION, EventKind.DECELERATION)


@dataclass(frozen=True)
class AnalysisConfig:
    link_window: float = LINK_WINDOW_S
    baseline_lookback: float = BASELINE_LOOKBACK_S
    desat: DesatParams = DesatParams()
    fhr: FhrParams = FhrParams()
    screen: ScreenPolicy = ScreenPolicy()
    from_annotations: bool = True
    chi_square_kinds: tuple = FHR_KINDS
    glm_outcomes: tuple = tuple(Outcome)
    phase_report: bool = True
    phase_ddof: int = 0
    pooled_t: bool = False

    def __post_init__(self):
        if self.link_window < 0:
            raise ValueError("link window must be non-negative")


@dataclass
class ParticipantResult:
    recording: Recording
    screen: ScreenReport
    hypoxia: list = field(default_factory=list)
    fhr_events: Optional[list] = None
    linked: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)  # kind -> ContingencyTable


def choose_events(rec: Recording, config: AnalysisConfig) -> tuple[list, Optional[list]]:
    """Hypoxic events (merged over the link window) and FHR events.

    Annotations win over detection for each channel; detection only runs
    when ``from_annotations`` is off and that channel has no annotations.
    FHR events are ``None`` when no FHR event data exists at all.
    """
    hyp = rec.events(EventKind.HYPOXIA)
    fhr = [e for e in rec.annotations if e.kind in FHR_KINDS]
    has_fhr = rec.has_fhr_annotations()
    if not config.from_annotations:
        if not hyp and rec.spo2 is not None:
            hyp = detect_desaturations(rec.spo2, config.desat)
        if not has_fhr and rec.fhr is not None:
            fhr = detect_fhr_events(rec.fhr, config.fhr)
            has_fhr = True
    hyp = merge_intervals(hyp, config.link_window)
    fhr = sorted(fhr, key=lambda e: (e.start, e.kind.value))
    return hyp, (fhr if has_fhr else None)


def process_participant(rec: Recording, config: AnalysisConfig = AnalysisConfig()) -> ParticipantResult:
    screen = quality_screen(rec, config.screen)
    res = ParticipantResult(rec, screen)
    if not screen.passed:
        return res
    res.hypoxia, res.fhr_events = choose_events(rec, config)
    res.linked = link_events(
        res.hypoxia, res.fhr_events or [], config.link_window, rec.spo2,
        rec.participant_id, config.baseline_lookback,
    )
    for kind in config.chi_square_kinds:
        try:
            res.tables[kind] = contingency_from_recording(rec, res.linked, res.fhr_events, kind)
        except MissingFhrAnnotations as exc:
            log.info("excluded from %s table: %s", kind.value, exc)
    return res


@dataclass
class ChiSquareResult:
    kind: EventKind
    table: Optional[ContingencyTable]
    test: Optional[TestResult]
    n_participants: int
    error: Optional[str] = None

    def to_dict(self) -> dict:
        d = {"linked_event_type": self.kind.value, "n_participants": self.n_participants}
        if self.table is not None:
            d["table"] = self.table.to_dict()
            d["odds_ratio"] = _json_float(self.table.odds_ratio())
        if self.test is not None:
            d.update({"chi2": self.test.statistic, "df": self.test.df, "p_value": self.test.p_value})
        if self.error:
            d["error"] = self.error
        return d


def _json_float(x):
    return None if x is None or not math.isfinite(x) else float(x)


def cohort_chi_square(results: Sequence[ParticipantResult], kind: EventKind) -> ChiSquareResult:
    tables = [r.tables[kind] for r in results if kind in r.tables]
    if not tables:
        return ChiSquareResult(kind, None, None, 0, "no participants with FHR event data")
    total = aggregate_tables(tables)
    try:
        test = chi_square_test(total)
    except DegenerateTable as exc:
        return ChiSquareResult(kind, total, None, len(tables), str(exc))
    return ChiSquareResult(kind, total, test, len(tables))


@dataclass
class FeatureRow:
    feature: str
    groups: dict  # center -> (mean, sd, n)
    test: Optional[TestResult] = None


def feature_table(linked: Iterable[LinkedEvent], centers: dict, pooled: bool = False) -> list[FeatureRow]:
    """Event-level mean +- SD per center for each hypoxic feature, with a
    two-sample t-test when exactly two centers are present.

    ``centers`` maps participant id to center label.
    """
    rows = [r for r in event_rows(linked) if r.features is not None]
    labels = sorted({centers[r.participant_id] for r in rows})
    out = []
    for name in FEATURES:
        groups = {}
        for lab in labels:
            vals = np.array([
                r.features.get(name) for r in rows
                if centers[r.participant_id] == lab and r.features.get(name) is not None
            ], dtype=float)
            sd = float(vals.std(ddof=1)) if vals.size > 1 else math.nan
            groups[lab] = (float(vals.mean()) if vals.size else math.nan, sd, int(vals.size))
        test = None
        if len(labels) == 2:
            (m1, s1, n1), (m2, s2, n2) = groups[labels[0]], groups[labels[1]]
            if n1 >= 2 and n2 >= 2:
                fn = pooled_t_from_summary if pooled else welch_t_from_summary
                try:
                    test = fn(m1, s1, n1, m2, s2, n2)
                except ZeroDivisionError:
                    test = None
        out.append(FeatureRow(name, groups, test))
    return out


@dataclass
class AnalysisResult:
    participants: list
    chi_square: dict
    glm: dict  # Outcome -> list[GlmRow]
    features: list
    phase: Optional[PhaseReport]

    @property
    def passing(self) -> list:
        return [p for p in self.participants if p.screen.passed]

    def linked(self) -> list:
        return [ev for p in self.passing for ev in p.linked]


class NoUsableParticipants(RuntimeError):
    pass


def analyze(recordings: Iterable[Recording], config: AnalysisConfig = AnalysisConfig()) -> AnalysisResult:
    results = [process_participant(r, config) for r in recordings]
    passing = [r for r in results if r.screen.passed]
    if not passing:
        raise NoUsableParticipants("no participant passed the quality screen")
    chi = {kind: cohort_chi_square(passing, kind) for kind in config.chi_square_kinds}
    linked = [ev for r in passing for ev in r.linked]
    glm = {Outcome(o): glm_feature_screen(linked, o) for o in config.glm_outcomes}
    centers = {r.recording.participant_id: r.recording.center for r in passing}
    features = feature_table(linked, centers, pooled=config.pooled_t)
    phase = None
    if config.phase_report:
        phase = cohort_phase_report(
            [r.recording for r in passing],
            {r.recording.participant_id: r.hypoxia for r in passing},
            ddof=config.phase_ddof,
        )
    return AnalysisResult(results, chi, glm, features, phase)
