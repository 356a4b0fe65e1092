"""Fallback detectors on a zero-noise synthetic night, compared with the truth."""
from hypofhr import SynthConfig
from hypofhr.core import EventKind, union_spans
from hypofhr.detect import DesatParams, detect_desaturations, detect_fhr_events
from hypofhr.synth import generate_recording

sr = generate_recording(SynthConfig(n_participants=1, hours=1, seed=4, noise_sd=0, baseline_wander_sd=0), 0)
rec = sr.recording

found = detect_desaturations(rec.spo2)
print(f"desaturations: planted {len(sr.hypoxia)}, detected {len(found)}")
for p, d in list(zip(sr.hypoxia, found))[:5]:
    print(f"  planted [{p.span.start:7.1f}, {p.span.end:7.1f})  detected [{d.start:7.1f}, {d.end:7.1f})")

# a stricter threshold can only drop episodes
for thr in (3, 5, 7):
    print(f"  drop threshold {thr}%: {len(detect_desaturations(rec.spo2, DesatParams(drop_threshold=thr)))} events")

accs = [e for e in detect_fhr_events(rec.fhr) if e.kind == EventKind.ACCELERATION]
truth = union_spans(e for e in rec.annotations if e.kind == EventKind.ACCELERATION)
print(f"accelerations: planted {len(truth)}, detected {len(accs)}")
