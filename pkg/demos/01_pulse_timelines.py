"""Walk through the signal layer: four sliders in, a pulse train out.

Every signal is (intensity I, balance T, rhythm R, grain G). The two
actuator amplitudes come from I and T, the on/off timing from R and G.
This script prints a few rendered timelines so the wire format is easy
to eyeball before any learning machinery gets involved.
"""

import json

from vibropref.signal import (
    PARAM_RANGES,
    SignalParams,
    denormalize,
    motor_strengths,
    normalize,
    pulse_timing,
    render_pulse_train,
)


def describe(params: SignalParams) -> None:
    left, right = motor_strengths(params)
    period, duration = pulse_timing(params.rhythm, params.grain)
    timeline = render_pulse_train(params)
    print(f"  params    : {params.as_dict()}")
    print(f"  motors    : left={left:.3f}  right={right:.3f}")
    print(f"  timing    : period={period:.1f} ms  pulse={duration:.1f} ms")
    print(f"  pulses    : {len(timeline.pulses)} in {timeline.total_ms:.0f} ms")
    first = timeline.to_json_dict()["pulses"][0]
    print(f"  first one : {json.dumps(first)}")
    print()


print("parameter ranges:")
for name, (lo, hi) in PARAM_RANGES.items():
    print(f"  {name:<10} [{lo}, {hi}]")
print()

print("a gentle, slow, left-leaning signal:")
describe(SignalParams(intensity=0.3, balance=0.2, rhythm=1.0, grain=0.3))

print("a strong, fast, balanced buzz:")
describe(SignalParams(intensity=0.9, balance=0.5, rhythm=4.0, grain=0.7))

print("high rhythm forces short pulses (the 45 ms gap always survives):")
describe(SignalParams(intensity=0.6, balance=0.8, rhythm=3.5, grain=0.65))

# The learner works on the unit cube; normalize/denormalize is the bridge.
p = SignalParams(intensity=0.52, balance=0.25, rhythm=2.8, grain=0.4)
x = normalize(p)
print(f"normalized point for {p.as_dict()}:")
print(f"  {[round(v, 4) for v in x.coords]}")
print(f"round trip: {denormalize(x).as_dict()}")
