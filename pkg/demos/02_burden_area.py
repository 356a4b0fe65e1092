"""Hypoxic burden: area of the SpO2 deficit below the pre-event maximum."""
import numpy as np

from hypofhr import Channel, ChannelKind, TimeSpan
from hypofhr.link import event_features, hypoxic_burden_area

# 30 s of baseline (with one brief 98 % reading), then a 4-s triangular dip
pre = np.full(30, 97.0)
pre[20] = 98.0
dip = [98, 97, 96, 97, 98]
spo2 = Channel(ChannelKind.SPO2, 1.0, 0.0, np.concatenate([pre, dip, np.full(30, 97.0)]))
event = TimeSpan(30, 34)

# baseline is the highest valid reading in the 30 s before onset
f = event_features(spo2, event)
print(f"baseline {f.baseline}, nadir {f.nadir}, drop {f.drop}, burden {f.burden_area:g} %*s")

# Simpson is exact for piecewise quadratics on an even number of intervals
t = np.arange(9.0)
quad = 99 - 0.5 * t * (8 - t)
ch = Channel(ChannelKind.SPO2, 1.0, 0.0, np.concatenate([np.full(30, 99.0), quad]))
ev = TimeSpan(30, 38)
print("quadratic:", hypoxic_burden_area(ch, ev), "exact:", 0.5 * 8 ** 3 / 6)
print("trapezoid for comparison:", hypoxic_burden_area(ch, ev, method="trapezoid"))

# a missing sample inside the event is interpolated from its neighbours
holes = quad.copy()
holes[3] = np.nan
ch = Channel(ChannelKind.SPO2, 1.0, 0.0, np.concatenate([np.full(30, 99.0), holes]))
print("with one missing sample:", round(hypoxic_burden_area(ch, ev), 4))
