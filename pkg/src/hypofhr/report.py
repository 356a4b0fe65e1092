"""Serialisers for analysis outputs: JSON, CSV and a minimal SVG box plot."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Optional
from xml.sax.saxutils import escape

from .phase import METRICS, Phase, PhaseReport
from .pipeline import AnalysisResult
from .stats import FEATURE_LABELS

METHOD_NOTE = (
    "Cells are durations in seconds used as counts; the statistic scales with "
    "the time unit and successive seconds are not independent observations."
)


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj, generated_at: Optional[str] = None) -> str:
    if generated_at is not None and isinstance(obj, dict):
        obj = {**obj, "generated_at": generated_at}
    return json.dumps(_clean(obj), indent=2, sort_keys=False) + "\n"


def screen_json(reports) -> dict:
    reports = list(reports)
    passed = sum(r.passed for r in reports)
    return {
        "summary": {"participants": len(reports), "passed": passed, "failed": len(reports) - passed},
        "participants": [r.to_dict() for r in reports],
    }


def chi_square_json(result: AnalysisResult) -> dict:
    return {
        "note": METHOD_NOTE,
        "results": [c.to_dict() for c in result.chi_square.values()],
    }


def glm_json(result: AnalysisResult) -> dict:
    return {
        "outcomes": [
            {"outcome": outcome.value, "rows": [row.to_dict() for row in rows]}
            for outcome, rows in result.glm.items()
        ]
    }


def features_csv(result: AnalysisResult) -> str:
    labels = sorted({lab for row in result.features for lab in row.groups})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["feature", "label"]
    for lab in labels:
        header += [f"{lab}_n", f"{lab}_mean", f"{lab}_sd"]
    header += ["test", "t", "df", "p_value"]
    w.writerow(header)
    for row in result.features:
        cells = [row.feature, FEATURE_LABELS[row.feature]]
        for lab in labels:
            mean, sd, n = row.groups.get(lab, (math.nan, math.nan, 0))
            cells += [n, _num(mean), _num(sd)]
        if row.test is not None:
            cells += [row.test.kind.value, _num(row.test.statistic), _num(row.test.df), _num(row.test.p_value)]
        else:
            cells += ["", "", "", ""]
        w.writerow(cells)
    return buf.getvalue()


def _num(x) -> str:
    return "" if x is None or not math.isfinite(x) else repr(float(x))


def phase_json(report: PhaseReport) -> dict:
    return report.to_dict()


_COLORS = {"pre": "#4c72b0", "during": "#dd8452", "post": "#55a868"}


def phase_svg(phase: dict, width: int = 900, height: int = 320) -> str:
    """Three panels (mean, std, cv), each with pre/during/post boxes.

    Takes the dictionary form written to ``phase.json`` so it can be
    re-rendered without re-running the analysis.
    """
    phases = phase.get("phases", {})
    panel_w = width / len(METRICS)
    top, bottom = 40.0, height - 40.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for mi, metric in enumerate(METRICS):
        x0 = mi * panel_w
        boxes = [(p.value, (phases.get(p.value) or {}).get(metric, {}).get("box")) for p in Phase]
        boxes = [(name, b) for name, b in boxes if b]
        parts.append(f'<text x="{x0 + panel_w / 2:.1f}" y="20" text-anchor="middle">FHR {escape(metric)}</text>')
        if not boxes:
            continue
        lo = min(min([b["whisker_low"]] + b["outliers"]) for _, b in boxes)
        hi = max(max([b["whisker_high"]] + b["outliers"]) for _, b in boxes)
        if hi == lo:
            lo, hi = lo - 1.0, hi + 1.0

        def y(v):
            return bottom - (v - lo) / (hi - lo) * (bottom - top)

        parts.append(f'<text x="{x0 + 4:.1f}" y="{top - 4:.1f}">{hi:.3g}</text>')
        parts.append(f'<text x="{x0 + 4:.1f}" y="{bottom + 14:.1f}">{lo:.3g}</text>')
        slot = (panel_w - 40) / 3
        for bi, (name, b) in enumerate(boxes):
            cx = x0 + 30 + slot * (bi + 0.5)
            half = slot * 0.3
            color = _COLORS.get(name, "#888888")
            parts.append(
                f'<line x1="{cx:.1f}" x2="{cx:.1f}" y1="{y(b["whisker_low"]):.1f}" '
                f'y2="{y(b["whisker_high"]):.1f}" stroke="black"/>'
            )
            parts.append(
                f'<rect x="{cx - half:.1f}" y="{y(b["q3"]):.1f}" width="{2 * half:.1f}" '
                f'height="{max(y(b["q1"]) - y(b["q3"]), 0.5):.1f}" fill="{color}" stroke="black"/>'
            )
            parts.append(
                f'<line x1="{cx - half:.1f}" x2="{cx + half:.1f}" y1="{y(b["median"]):.1f}" '
                f'y2="{y(b["median"]):.1f}" stroke="black" stroke-width="2"/>'
            )
            for o in b["outliers"]:
                parts.append(f'<circle cx="{cx:.1f}" cy="{y(o):.1f}" r="1.5" fill="none" stroke="black"/>')
            parts.append(f'<text x="{cx:.1f}" y="{height - 12}" text-anchor="middle">{escape(name)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def text_summary(bundle: dict) -> str:
    """Human-readable digest of a report bundle (dict of loaded JSON files)."""
    lines = []
    chi = bundle.get("chi_square")
    if chi:
        lines.append("Chi-square (duration-weighted 2x2)")
        for r in chi["results"]:
            if "chi2" in r:
                t = r["table"]
                lines.append(
                    f"  {r['linked_event_type']:>4}: A1={t['A1']:.2f} A2={t['A2']:.2f} B1={t['B1']:.2f} "
                    f"B2={t['B2']:.2f}  chi2={r['chi2']:.4g} p={r['p_value']:.3g} (n={r['n_participants']})"
                )
            else:
                lines.append(f"  {r['linked_event_type']:>4}: unavailable ({r.get('error', '')})")
    glm = bundle.get("glm")
    if glm:
        lines.append("Univariate logistic GLM (coef, std err, z, p)")
        for block in glm["outcomes"]:
            lines.append(f"  {block['outcome']}")
            for row in block["rows"]:
                if row.get("converged"):
                    lines.append(
                        f"    {row['label']:<22} {row['coef']:+.4f} {row['std_err']:.4f} "
                        f"{row['z']:+.3f} {row['p_value']:.3g}"
                    )
                else:
                    lines.append(f"    {row['label']:<22} {row.get('error', 'not converged')}")
    phase = bundle.get("phase")
    if phase and phase.get("phases"):
        lines.append(f"Phase FHR grand means over {phase['n_events']} events")
        for metric in METRICS:
            vals = [phase["phases"].get(p.value, {}).get(metric, {}).get("grand_mean") for p in Phase]
            cells = " -> ".join("n/a" if v is None else f"{v:.4g}" for v in vals)
            lines.append(f"  {metric:<5} pre -> during -> post: {cells}")
    return "\n".join(lines) + "\n"
