"""Duration-weighted chi-square, t-tests from summaries, univariate logistic GLM.

The 2x2 table cells are durations in seconds used directly as counts, so the
chi-square statistic scales linearly with the time unit. That is how the
method is defined; treat p-values as descriptive, since successive seconds
are far from independent observations.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import EventKind, Recording, TimeSpan, total_duration
from .link import LinkedEvent
from .special import chisq1_sf, normal_two_sided, student_t_two_sided


class TestKind(str, enum.Enum):
    CHI_SQUARE = "ChiSquare"
    WELCH_T = "WelchT"
    POOLED_T = "PooledT"


class DegenerateTable(ValueError):
    pass


class MissingFhrAnnotations(ValueError):
    """The recording has no FHR event data and is left out of the aggregate."""


class GlmError(ValueError):
    pass


class SingularDesign(GlmError):
    pass


class SingleClass(GlmError):
    pass


@dataclass(frozen=True)
class ContingencyTable:
    a1: float
    a2: float
    b1: float
    b2: float

    def __post_init__(self):
        for name in ("a1", "a2", "b1", "b2"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError(f"cell {name} must be finite and non-negative, got {v}")

    def cells(self) -> tuple[float, float, float, float]:
        return (self.a1, self.a2, self.b1, self.b2)

    @property
    def total(self) -> float:
        return self.a1 + self.a2 + self.b1 + self.b2

    def odds_ratio(self) -> float:
        den = self.a2 * self.b1
        if den == 0:
            return math.inf if self.a1 * self.b2 > 0 else math.nan
        return self.a1 * self.b2 / den

    def scaled(self, k: float) -> "ContingencyTable":
        return ContingencyTable(self.a1 * k, self.a2 * k, self.b1 * k, self.b2 * k)

    def to_dict(self) -> dict:
        return {"A1": self.a1, "A2": self.a2, "B1": self.b1, "B2": self.b2}


@dataclass(frozen=True)
class TestResult:
    statistic: float
    df: float
    p_value: float
    kind: TestKind

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "statistic": self.statistic, "df": self.df, "p_value": self.p_value}


def contingency_from_recording(
    recording: Recording,
    linked: Sequence[LinkedEvent],
    fhr_events: Optional[Sequence],
    kind: EventKind,
) -> ContingencyTable:
    """Per-participant 2x2 table of durations for one FHR event kind.

    ``a1``: union of linked-event spans (hypoxia onset + linked duration);
    ``a2``: hypoxic events with no link of this kind; ``b1``: FHR events of
    this kind not part of any link; ``b2``: the remaining recording time,
    floored at zero. ``fhr_events=None`` means the participant has no FHR
    event data at all, which excludes it.
    """
    if kind not in (EventKind.ACCELERATION, EventKind.DECELERATION):
        raise ValueError("kind must be acceleration or deceleration")
    if fhr_events is None:
        raise MissingFhrAnnotations(f"{recording.participant_id}: no FHR event annotations")
    of_kind = [ev for ev in linked if ev.link_kind == kind]
    a1 = total_duration(ev.linked_span for ev in of_kind)

    linked_h = {(ev.hypoxia.start, ev.hypoxia.end) for ev in of_kind}
    hypoxia = {(ev.hypoxia.start, ev.hypoxia.end): ev.hypoxia for ev in linked}
    a2 = total_duration(h for key, h in hypoxia.items() if key not in linked_h)

    used = {(ev.fhr_event.start, ev.fhr_event.end) for ev in linked if ev.fhr_event is not None}
    b1 = total_duration(
        e for e in fhr_events if e.kind == kind and (e.start, e.end) not in used
    )
    b2 = max(0.0, recording.total_span.duration() - a1 - a2 - b1)
    return ContingencyTable(a1, a2, b1, b2)


def aggregate_tables(tables: Iterable[ContingencyTable]) -> ContingencyTable:
    tables = list(tables)
    if not tables:
        raise ValueError("no contingency tables to aggregate")
    sums = np.sum([t.cells() for t in tables], axis=0)
    return ContingencyTable(*map(float, sums))


def expected_cells(t: ContingencyTable) -> tuple[float, float, float, float]:
    n = t.total
    if not n > 0:
        raise DegenerateTable("contingency table is empty")
    row_a, row_b = t.a1 + t.a2, t.b1 + t.b2
    col_1, col_2 = t.a1 + t.b1, t.a2 + t.b2
    return (row_a * col_1 / n, row_a * col_2 / n, row_b * col_1 / n, row_b * col_2 / n)


def chi_square_test(t: ContingencyTable) -> TestResult:
    """Pearson chi-square on a 2x2 table, one degree of freedom, no continuity correction."""
    expected = expected_cells(t)
    if min(expected) <= 0:
        raise DegenerateTable(f"zero expected cell in {t.to_dict()}")
    stat = sum((o - e) ** 2 / e for o, e in zip(t.cells(), expected))
    return TestResult(stat, 1.0, chisq1_sf(stat), TestKind.CHI_SQUARE)


def welch_t_from_summary(m1, s1, n1, m2, s2, n2) -> TestResult:
    """Unequal-variance two-sample t-test from means, SDs and sizes."""
    if n1 < 2 or n2 < 2:
        raise ValueError("each group needs at least two observations")
    v1, v2 = s1 * s1 / n1, s2 * s2 / n2
    se2 = v1 + v2
    if se2 == 0:
        if m1 == m2:
            return TestResult(0.0, float(n1 + n2 - 2), 1.0, TestKind.WELCH_T)
        raise ZeroDivisionError("zero variance in both groups with unequal means")
    t = (m1 - m2) / math.sqrt(se2)
    df = se2 * se2 / (v1 * v1 / (n1 - 1) + v2 * v2 / (n2 - 1))
    return TestResult(t, df, student_t_two_sided(t, df), TestKind.WELCH_T)


def pooled_t_from_summary(m1, s1, n1, m2, s2, n2) -> TestResult:
    if n1 < 2 or n2 < 2:
        raise ValueError("each group needs at least two observations")
    df = n1 + n2 - 2
    sp2 = ((n1 - 1) * s1 * s1 + (n2 - 1) * s2 * s2) / df
    se2 = sp2 * (1.0 / n1 + 1.0 / n2)
    if se2 == 0:
        if m1 == m2:
            return TestResult(0.0, float(df), 1.0, TestKind.POOLED_T)
        raise ZeroDivisionError("zero variance in both groups with unequal means")
    t = (m1 - m2) / math.sqrt(se2)
    return TestResult(t, float(df), student_t_two_sided(t, df), TestKind.POOLED_T)


@dataclass(frozen=True)
class GlmFit:
    beta0: float
    beta1: float
    se0: float
    se1: float
    z1: float
    p1: float
    converged: bool
    iterations: int
    n: int
    deviance: float = math.nan

    def to_dict(self) -> dict:
        return {
            "coef": self.beta1, "std_err": self.se1, "z": self.z1, "p_value": self.p1,
            "intercept": self.beta0, "intercept_std_err": self.se0,
            "converged": self.converged, "iterations": self.iterations, "n": self.n,
        }


def _expit(eta):
    return 0.5 * (1.0 + np.tanh(0.5 * eta))


def _deviance(y, p):
    with np.errstate(divide="ignore", invalid="ignore"):
        ll = np.where(y == 1, np.log(p), np.log1p(-p))
    return float(-2.0 * ll.sum())


def fit_logistic_univariate(x, y, max_iter: int = 100, tol: float = 1e-8) -> GlmFit:
    """Logistic regression of binary ``y`` on one covariate, fitted by IRLS.

    Standard errors come from the inverse Fisher information at the
    estimate; z and p are Wald statistics for the slope. When the data are
    (quasi-)separated the fit is returned with ``converged=False`` and NaN
    standard errors.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D arrays of equal length")
    n = x.size
    if n < 3:
        raise ValueError("need at least 3 observations")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("y must be 0/1")
    if not np.all(np.isfinite(x)):
        raise ValueError("x contains non-finite values")
    if y.min() == y.max():
        raise SingleClass("outcome has a single class")
    center, scale = x.mean(), x.std()
    if scale == 0 or not np.isfinite(scale):
        raise SingularDesign("covariate has zero variance")

    # iterate on the standardised covariate for conditioning, report on the original scale
    X = np.column_stack([np.ones(n), (x - center) / scale])
    ybar = y.mean()
    beta = np.array([np.clip(math.log(ybar / (1 - ybar)), -10, 10), 0.0])
    converged = False
    separated = False
    it = 0
    for it in range(1, max_iter + 1):
        eta = X @ beta
        p = _expit(eta)
        w = p * (1.0 - p)
        if np.any(w <= 0):
            separated = True
            break
        z = eta + (y - p) / w
        xtw = X.T * w
        try:
            new = np.linalg.solve(xtw @ X, xtw @ z)
        except np.linalg.LinAlgError:
            separated = True
            break
        step = np.max(np.abs(new - beta))
        beta = new
        if np.max(np.abs(beta)) > 30:
            separated = True
            break
        if step < tol:
            converged = True
            break

    p = _expit(X @ beta)
    dev = _deviance(y, p)
    if dev < 1e-8:
        separated = True
    b1 = beta[1] / scale
    b0 = beta[0] - beta[1] * center / scale
    if separated or not converged:
        return GlmFit(b0, b1, math.nan, math.nan, math.nan, math.nan, False, it, n, dev)

    # covariance on the original scale from the observed information
    w = p * (1.0 - p)
    Xo = np.column_stack([np.ones(n), x])
    cov = np.linalg.inv((Xo.T * w) @ Xo)
    se0, se1 = math.sqrt(cov[0, 0]), math.sqrt(cov[1, 1])
    z1 = b1 / se1
    return GlmFit(b0, b1, se0, se1, z1, normal_two_sided(z1), True, it, n, dev)


class Outcome(str, enum.Enum):
    ANY_LINK = "AnyLink"
    ACCELERATION_LINK = "AccelerationLink"
    DECELERATION_LINK = "DecelerationLink"


FEATURES = ("duration", "nadir", "drop", "burden_area")
FEATURE_LABELS = {
    "duration": "Hypoxic Duration",
    "nadir": "SpO2 nadir",
    "drop": "SpO2 Drop Value",
    "burden_area": "Hypoxic Burden Area",
}


@dataclass(frozen=True)
class EventRow:
    """One hypoxic event with its features and which link kinds it has."""

    participant_id: str
    span: TimeSpan
    features: object
    has_acc: bool
    has_dec: bool

    def outcome(self, outcome: Outcome) -> int:
        if outcome == Outcome.ACCELERATION_LINK:
            return int(self.has_acc)
        if outcome == Outcome.DECELERATION_LINK:
            return int(self.has_dec)
        return int(self.has_acc or self.has_dec)


def event_rows(linked: Iterable[LinkedEvent]) -> list[EventRow]:
    """Collapse linked pairings to one row per hypoxic event."""
    rows: dict = {}
    for ev in linked:
        key = (ev.participant_id, ev.hypoxia.start, ev.hypoxia.end)
        acc = ev.link_kind == EventKind.ACCELERATION
        dec = ev.link_kind == EventKind.DECELERATION
        if key in rows:
            r = rows[key]
            rows[key] = EventRow(r.participant_id, r.span, r.features, r.has_acc or acc, r.has_dec or dec)
        else:
            rows[key] = EventRow(ev.participant_id, ev.hypoxia.span, ev.features, acc, dec)
    return list(rows.values())


@dataclass(frozen=True)
class GlmRow:
    feature: str
    outcome: Outcome
    fit: Optional[GlmFit]
    error: Optional[str] = None

    def to_dict(self) -> dict:
        d = {"feature": self.feature, "label": FEATURE_LABELS[self.feature], "outcome": self.outcome.value}
        if self.fit is not None:
            d.update(self.fit.to_dict())
        if self.error is not None:
            d["error"] = self.error
        return d


# fewer events than this give Wald statistics too unstable to report
MIN_GLM_EVENTS = 10


def glm_feature_screen(linked: Iterable[LinkedEvent], outcome: Outcome) -> list[GlmRow]:
    """One univariate logistic fit per hypoxic feature for the given outcome.

    Events without features, or missing a particular feature, are left out
    of the affected rows only. A failing row records its error and the
    remaining rows are still fitted.
    """
    outcome = Outcome(outcome)
    rows = [r for r in event_rows(linked) if r.features is not None]
    out = []
    for name in FEATURES:
        pairs = [(r.features.get(name), r.outcome(outcome)) for r in rows]
        pairs = [(v, o) for v, o in pairs if v is not None]
        try:
            if len(pairs) < MIN_GLM_EVENTS:
                raise GlmError(f"{len(pairs)} events with this feature, need {MIN_GLM_EVENTS}")
            x, y = zip(*pairs)
            out.append(GlmRow(name, outcome, fit_logistic_univariate(x, y)))
        except (GlmError, ValueError) as exc:
            out.append(GlmRow(name, outcome, None, f"{type(exc).__name__}: {exc}"))
    return out
