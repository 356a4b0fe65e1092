"""Pairing maternal hypoxic events with FHR events and building the 2x2 table."""
import numpy as np

from hypofhr import EventInterval, EventKind, Recording, TimeSpan
from hypofhr.core import merge_intervals
from hypofhr.link import link_events
from hypofhr.stats import chi_square_test, contingency_from_recording


def ev(kind, a, b):
    return EventInterval(EventKind(kind), TimeSpan(a, b))


# two desaturations 20 s apart are one episode once merged over the 30 s window
hypoxia = merge_intervals([ev("hypoxia", 100, 130), ev("hypoxia", 150, 160), ev("hypoxia", 600, 640)], 30)
print("merged hypoxic events:", [(e.start, e.end) for e in hypoxia])

fhr = [ev("acc", 170, 195), ev("dec", 120, 150), ev("acc", 900, 920)]

# an FHR event links if its onset falls between the hypoxia onset and 30 s after it ends
for le in link_events(hypoxia, fhr):
    kind = le.link_kind.value if le.link_kind else "none"
    print(f"hypoxia [{le.hypoxia.start:g}, {le.hypoxia.end:g}) -> {kind:>4}  linked duration {le.linked_duration:g} s")

# linked duration runs from hypoxia onset to whichever ends last
rec = Recording("demo", "A", None, None, total_span=TimeSpan(0, 3600))
linked = link_events(hypoxia, fhr)
for kind in (EventKind.ACCELERATION, EventKind.DECELERATION):
    t = contingency_from_recording(rec, linked, fhr, kind)
    print(kind.value, t.to_dict())

# seconds are the counting unit, so the statistic scales with the unit
t = contingency_from_recording(rec, linked, fhr, EventKind.ACCELERATION)
for k in (1, 60):
    r = chi_square_test(t.scaled(1 / k))
    print(f"unit {k:>2} s: chi2 = {r.statistic:.3f}, p = {r.p_value:.3g}")
