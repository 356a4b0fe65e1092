"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error.

The optional ``--config`` file is INI with these sections and keys (flags
override file values)::

    [link]      window, baseline_lookback
    [desat]     drop_threshold, baseline_window, resat_margin, min_duration, merge_gap
    [fhr]       baseline_window, excursion, min_duration, max_duration
    [screen]    max_invalid_run_s, max_invalid_fraction, max_spo2_slope
    [analysis]  from_annotations, chi_square_kinds (acc,dec), glm_outcomes
                (AnyLink,AccelerationLink,DecelerationLink), phase_report,
                phase_ddof, pooled_t, formats (json,csv,svg)
    [synth]     any SynthConfig field; ranges as "lo,hi"
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from dataclasses import fields
from datetime import datetime, timezone
from pathlib import Path

from . import report
from .core import EventKind
from .detect import DesatParams, FhrParams, detect_desaturations, detect_fhr_events
from .ingest import (
    ManifestEntry,
    ParseError,
    ScreenPolicy,
    format_annotations,
    load_recording,
    quality_screen,
    read_manifest,
    write_manifest,
)
from .link import linked_events_csv
from .pipeline import FHR_KINDS, AnalysisConfig, NoUsableParticipants, analyze, process_participant
from .stats import Outcome
from .synth import SynthConfig, write_cohort

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

log = logging.getLogger("hypofhr")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _bool(s: str) -> bool:
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"not a boolean: {s!r}")


def _read_config(path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    if path is None:
        return cp
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    return cp


def _section_params(cp, section, cls, overrides):
    values = {}
    names = {f.name for f in fields(cls)}
    if cp.has_section(section):
        for key, raw in cp.items(section):
            if key not in names:
                raise UsageError(f"unknown key [{section}] {key}")
            values[key] = float(raw)
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"[{section}] {exc}") from None


def build_analysis_config(args) -> AnalysisConfig:
    cp = _read_config(getattr(args, "config", None))
    desat = _section_params(cp, "desat", DesatParams, {
        "drop_threshold": args.drop_threshold, "baseline_window": args.desat_baseline_window,
        "resat_margin": args.resat_margin, "min_duration": args.desat_min_duration,
        "merge_gap": args.merge_gap,
    })
    fhr = _section_params(cp, "fhr", FhrParams, {
        "baseline_window": args.fhr_baseline_window, "excursion": args.excursion,
        "min_duration": args.fhr_min_duration, "max_duration": args.fhr_max_duration,
    })
    screen = _section_params(cp, "screen", ScreenPolicy, {
        "max_invalid_run_s": args.max_invalid_run, "max_invalid_fraction": args.max_invalid_fraction,
        "max_spo2_slope": args.max_spo2_slope,
    })
    link = dict(cp.items("link")) if cp.has_section("link") else {}
    unknown = set(link) - {"window", "baseline_lookback"}
    if unknown:
        raise UsageError(f"unknown key(s) in [link]: {sorted(unknown)}")
    window = args.window if args.window is not None else float(link.get("window", 30.0))
    lookback = float(link.get("baseline_lookback", 30.0))
    ana = dict(cp.items("analysis")) if cp.has_section("analysis") else {}
    try:
        kinds = tuple(EventKind(k.strip()) for k in ana.get("chi_square_kinds", "acc,dec").split(",") if k.strip())
        outcomes = tuple(Outcome(o.strip()) for o in ana.get("glm_outcomes", ",".join(o.value for o in Outcome)).split(",") if o.strip())
    except ValueError as exc:
        raise UsageError(f"[analysis] {exc}") from None
    if any(k not in FHR_KINDS for k in kinds):
        raise UsageError("[analysis] chi_square_kinds must be acc and/or dec")
    from_ann = args.from_annotations
    if from_ann is None:
        from_ann = _bool(ana.get("from_annotations", "true"))
    try:
        return AnalysisConfig(
            link_window=window,
            baseline_lookback=lookback,
            desat=desat,
            fhr=fhr,
            screen=screen,
            from_annotations=from_ann,
            chi_square_kinds=kinds,
            glm_outcomes=outcomes,
            phase_report=_bool(ana.get("phase_report", "true")),
            phase_ddof=int(ana.get("phase_ddof", 0)),
            pooled_t=_bool(ana.get("pooled_t", "false")),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _formats(args) -> set:
    cp = _read_config(getattr(args, "config", None))
    raw = args.formats
    if raw is None:
        raw = cp.get("analysis", "formats", fallback="json,csv,svg")
    fmts = {f.strip() for f in raw.split(",") if f.strip()}
    bad = fmts - {"json", "csv", "svg"}
    if bad:
        raise UsageError(f"unknown report format(s): {sorted(bad)}")
    return fmts


def _load_cohort(manifest_path):
    try:
        entries = read_manifest(manifest_path)
    except OSError as exc:
        raise DataError(f"cannot read manifest: {exc}") from None
    except ParseError as exc:
        raise DataError(str(exc)) from None
    if not entries:
        raise DataError("no participants in manifest")
    recordings, problems = [], []
    for entry in entries:
        try:
            recordings.append(load_recording(entry))
        except (ParseError, OSError, ValueError) as exc:
            problems.append(f"{entry.participant_id}: {exc}")
    if problems:
        raise DataError("unreadable input files:\n  " + "\n  ".join(problems))
    return entries, recordings


def _out_dir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataError(f"cannot create output directory {out}: {exc}") from None
    return out


def _stamp(args):
    if getattr(args, "timestamp", False):
        return datetime.now(timezone.utc).isoformat(timespec="seconds")
    return None


def _write(path: Path, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_validate(args) -> int:
    config = build_analysis_config(args)
    _, recordings = _load_cohort(args.manifest)
    out = _out_dir(args.out)
    reports = [quality_screen(r, config.screen) for r in recordings]
    payload = report.screen_json(reports)
    _write(out / "screen.json", report.dumps(payload, _stamp(args)))
    s = payload["summary"]
    print(f"screen: {s['passed']}/{s['participants']} passed")
    return EXIT_OK


def cmd_detect(args) -> int:
    config = build_analysis_config(args)
    entries, recordings = _load_cohort(args.manifest)
    out = _out_dir(args.out)
    new_entries = []
    for entry, rec in zip(entries, recordings):
        hyp = rec.events(EventKind.HYPOXIA)
        fhr = [e for e in rec.annotations if e.kind in FHR_KINDS]
        if not hyp and rec.spo2 is not None:
            hyp = detect_desaturations(rec.spo2, config.desat)
        if not fhr and rec.fhr is not None:
            fhr = detect_fhr_events(rec.fhr, config.fhr)
        path = out / f"{rec.participant_id}_events.csv"
        _write(path, format_annotations(list(hyp) + list(fhr)))
        new_entries.append(ManifestEntry(entry.participant_id, entry.center, entry.spo2_path, entry.fhr_path, path))
        print(f"{rec.participant_id}: {len(hyp)} hypoxic, "
              f"{sum(e.kind == EventKind.ACCELERATION for e in fhr)} acc, "
              f"{sum(e.kind == EventKind.DECELERATION for e in fhr)} dec")
    write_manifest(new_entries, out / "manifest.json")
    return EXIT_OK


def cmd_link(args) -> int:
    config = build_analysis_config(args)
    _, recordings = _load_cohort(args.manifest)
    out = _out_dir(args.out)
    results = [process_participant(r, config) for r in recordings]
    linked = [ev for r in results if r.screen.passed for ev in r.linked]
    _write(out / "linked.csv", linked_events_csv(linked))
    n_link = sum(ev.link_kind is not None for ev in linked)
    print(f"{n_link} linked pairings over {sum(r.screen.passed for r in results)} participants")
    return EXIT_OK


def cmd_analyze(args) -> int:
    config = build_analysis_config(args)
    fmts = _formats(args)
    _, recordings = _load_cohort(args.manifest)
    out = _out_dir(args.out)
    try:
        result = analyze(recordings, config)
    except NoUsableParticipants as exc:
        raise DataError(str(exc)) from None
    stamp = _stamp(args)
    _write(out / "screen.json", report.dumps(report.screen_json(p.screen for p in result.participants), stamp))
    if "json" in fmts:
        _write(out / "chi_square.json", report.dumps(report.chi_square_json(result), stamp))
        _write(out / "glm.json", report.dumps(report.glm_json(result), stamp))
        if result.phase is not None:
            _write(out / "phase.json", report.dumps(report.phase_json(result.phase), stamp))
    if "csv" in fmts:
        _write(out / "features.csv", report.features_csv(result))
        _write(out / "linked.csv", linked_events_csv(result.linked()))
    if "svg" in fmts and result.phase is not None and not result.phase.empty:
        _write(out / "phase.svg", report.phase_svg(report.phase_json(result.phase)))
    bundle = {
        "chi_square": report.chi_square_json(result),
        "glm": report.glm_json(result),
        "phase": report.phase_json(result.phase) if result.phase is not None else None,
    }
    print(report.text_summary(json.loads(report.dumps(bundle))), end="")
    return EXIT_OK


def _parse_value(raw: str, default):
    if isinstance(default, tuple) or default is None and "," in raw:
        return tuple(float(x) if _isnum(x) else x.strip() for x in raw.split(","))
    if isinstance(default, bool):
        return _bool(raw)
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def _isnum(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def build_synth_config(args) -> SynthConfig:
    cp = _read_config(args.config)
    defaults = SynthConfig()
    values = {}
    if cp.has_section("synth"):
        for key, raw in cp.items("synth"):
            if not hasattr(defaults, key):
                raise UsageError(f"unknown key [synth] {key}")
            values[key] = _parse_value(raw, getattr(defaults, key))
    flag_map = {
        "n_participants": args.n_participants, "hours": args.hours, "seed": args.seed,
        "coupling_prob": args.coupling_prob, "hypoxia_rate": args.hypoxia_rate,
        "spontaneous_acc_rate": args.spontaneous_acc_rate, "noise_sd": args.noise_sd,
    }
    values.update({k: v for k, v in flag_map.items() if v is not None})
    if args.centers is not None:
        values["centers"] = tuple(c.strip() for c in args.centers.split(",") if c.strip())
    try:
        return SynthConfig(**values)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid synth config: {exc}") from None


def cmd_synth(args) -> int:
    config = build_synth_config(args)
    out = _out_dir(args.out)
    try:
        summary = write_cohort(config, out)
    except OSError as exc:
        raise DataError(f"cannot write cohort: {exc}") from None
    print(json.dumps({**summary, "coupling_prob": config.coupling_prob, "seed": config.seed}, sort_keys=True))
    return EXIT_OK


def cmd_report(args) -> int:
    src = Path(args.results)
    bundle = {}
    for name in ("chi_square", "glm", "phase"):
        path = src / f"{name}.json"
        if path.exists():
            try:
                bundle[name] = json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: invalid JSON ({exc.msg})") from None
    if not bundle:
        raise DataError(f"no report files found in {src}")
    if args.svg and bundle.get("phase"):
        _write(src / "phase.svg", report.phase_svg(bundle["phase"]))
    print(report.text_summary(bundle), end="")
    return EXIT_OK


def _add_analysis_flags(p):
    p.add_argument("manifest", help="cohort manifest (JSON)")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.add_argument("--config", help="INI config file")
    p.add_argument("--window", type=float, help="link window in seconds (default 30)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--from-annotations", dest="from_annotations", action="store_true", default=None,
                   help="use annotated events only (default)")
    g.add_argument("--no-from-annotations", dest="from_annotations", action="store_false",
                   help="run detectors for channels without annotations")
    p.add_argument("--drop-threshold", type=float)
    p.add_argument("--desat-baseline-window", type=float)
    p.add_argument("--resat-margin", type=float)
    p.add_argument("--desat-min-duration", type=float)
    p.add_argument("--merge-gap", type=float)
    p.add_argument("--fhr-baseline-window", type=float)
    p.add_argument("--excursion", type=float)
    p.add_argument("--fhr-min-duration", type=float)
    p.add_argument("--fhr-max-duration", type=float)
    p.add_argument("--max-invalid-run", type=float, help="seconds")
    p.add_argument("--max-invalid-fraction", type=float)
    p.add_argument("--max-spo2-slope", type=float, help="%%/s")
    p.add_argument("--timestamp", action="store_true", help="add generated_at to JSON outputs")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hypofhr", description="Maternal hypoxia / fetal heart rate event analysis")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="run the data-quality screen")
    _add_analysis_flags(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("detect", help="detect events for channels lacking annotations")
    _add_analysis_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("link", help="pair hypoxic events with FHR events")
    _add_analysis_flags(p)
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("analyze", help="full analysis bundle")
    _add_analysis_flags(p)
    p.add_argument("--formats", help="comma list of json,csv,svg")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", help="write a synthetic cohort")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--config", help="INI config with a [synth] section")
    p.add_argument("--n-participants", type=int)
    p.add_argument("--hours", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--coupling-prob", type=float)
    p.add_argument("--hypoxia-rate", type=float)
    p.add_argument("--spontaneous-acc-rate", type=float)
    p.add_argument("--noise-sd", type=float)
    p.add_argument("--centers", help="comma-separated center labels, assigned round-robin")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="summarise an analysis output directory")
    p.add_argument("results", help="directory written by 'analyze'")
    p.add_argument("--svg", action="store_true", help="re-render phase.svg from phase.json")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help; keep main() returning a code
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hypofhr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"hypofhr: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
