"""Temporal coupling between maternal hypoxic events and fetal heart rate changes."""

from .core import (
    Channel,
    ChannelKind,
    EventInterval,
    EventKind,
    EventSource,
    Recording,
    TimeSpan,
    merge_intervals,
    overlap_duration,
    total_duration,
    union_duration,
)
from .detect import DesatParams, FhrParams, detect_desaturations, detect_fhr_events
from .ingest import (
    ParseError,
    ScreenPolicy,
    ScreenReport,
    parse_annotation_file,
    parse_signal_file,
    quality_screen,
)
from .link import (
    HypoxicFeatures,
    LinkedEvent,
    event_features,
    hypoxic_burden_area,
    link_events,
    linked_duration,
)
from .phase import BoxSummary, PhaseStats, boxplot_summary, cohort_phase_report, phase_windows, window_stats
from .special import chisq1_sf, normal_sf, student_t_sf
from .stats import (
    ContingencyTable,
    GlmFit,
    Outcome,
    TestResult,
    aggregate_tables,
    chi_square_test,
    contingency_from_recording,
    fit_logistic_univariate,
    glm_feature_screen,
    pooled_t_from_summary,
    welch_t_from_summary,
)
from .synth import SynthConfig, generate_cohort, generate_recording

__version__ = "0.1.0"
