"""Vibrotactile signal space: hardware ranges, normalization, pulse rendering.

A two-motor vibration is described by four physical parameters: overall
intensity, the left/right motor balance, the pulse rhythm in Hz, and the
grain (duty fraction of each rhythm period). The model side of the engine
never sees these units; it works on the unit hypercube [0,1]^4 produced by
`normalize`. Rendering turns parameters into a device-agnostic pulse
timeline that a client can play back on any dual-actuator controller.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PARAM_NAMES = ("intensity", "balance", "rhythm", "grain")

#: Closed hardware ranges per parameter. Intensity and balance are unitless,
#: rhythm is in Hz, grain is the duty fraction of one rhythm period.
PARAM_RANGES: dict[str, tuple[float, float]] = {
    "intensity": (0.20, 1.00),
    "balance": (0.00, 1.00),
    "rhythm": (0.60, 4.00),
    "grain": (0.10, 0.70),
}

#: Shortest pulse the actuators articulate reliably (ms).
MIN_PULSE_MS = 20.0
#: Shortest silence between consecutive pulses the hardware honors (ms).
MIN_GAP_MS = 45.0
#: Default rendered signal length (ms).
DEFAULT_TOTAL_MS = 3000.0


@dataclass(frozen=True)
class SignalParams:
    """Physical vibration parameters, validated against the hardware ranges."""

    intensity: float
    balance: float
    rhythm: float
    grain: float

    def __post_init__(self):
        for name in PARAM_NAMES:
            value = float(getattr(self, name))
            object.__setattr__(self, name, value)
            lo, hi = PARAM_RANGES[name]
            if not lo <= value <= hi:
                raise ValueError(
                    f"{name}={value!r} outside hardware range [{lo}, {hi}]"
                )

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    @classmethod
    def from_dict(cls, data) -> "SignalParams":
        try:
            return cls(**{name: data[name] for name in PARAM_NAMES})
        except KeyError as exc:
            raise ValueError(f"missing signal parameter {exc.args[0]!r}") from exc


@dataclass(frozen=True)
class NormalizedPoint:
    """A point of the model's native coordinate system, the unit hypercube.

    Coordinates follow the parameter order (intensity, balance, rhythm,
    grain). Instances are hashable so repeated query points deduplicate by
    exact coordinate match.
    """

    coords: tuple[float, float, float, float]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if len(coords) != 4:
            raise ValueError(f"expected 4 coordinates, got {len(coords)}")
        for i, c in enumerate(coords):
            if not 0.0 <= c <= 1.0:
                raise ValueError(f"coordinate {i} ({PARAM_NAMES[i]}) = {c!r} outside [0, 1]")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_array(cls, arr) -> "NormalizedPoint":
        return cls(tuple(np.asarray(arr, dtype=float)))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


@dataclass(frozen=True)
class Pulse:
    start_ms: float
    duration_ms: float
    left: float
    right: float


@dataclass(frozen=True)
class PulseTimeline:
    """Rendered pulse sequence; validates the hardware legality invariants.

    Pulses are sorted, non-overlapping, at least MIN_PULSE_MS long (the final
    pulse may be shorter only because total_ms truncates it), separated by
    at least MIN_GAP_MS, and never extend past total_ms.
    """

    total_ms: float
    pulses: tuple[Pulse, ...]

    _TOL = 1e-9

    def __post_init__(self):
        if self.total_ms <= 0:
            raise ValueError(f"total_ms={self.total_ms!r} must be positive")
        prev_end = None
        for i, p in enumerate(self.pulses):
            if p.duration_ms <= 0:
                raise ValueError(f"pulse {i} has non-positive duration")
            if not (0.0 <= p.left <= 1.0 and 0.0 <= p.right <= 1.0):
                raise ValueError(f"pulse {i} magnitudes outside [0, 1]")
            end = p.start_ms + p.duration_ms
            if end > self.total_ms + self._TOL:
                raise ValueError(f"pulse {i} extends past total duration")
            truncated_last = i == len(self.pulses) - 1 and end >= self.total_ms - self._TOL
            if p.duration_ms < MIN_PULSE_MS - self._TOL and not truncated_last:
                raise ValueError(f"pulse {i} shorter than {MIN_PULSE_MS} ms")
            if prev_end is not None:
                gap = p.start_ms - prev_end
                if gap < MIN_GAP_MS - self._TOL:
                    raise ValueError(f"gap before pulse {i} is {gap:.3f} ms < {MIN_GAP_MS} ms")
            prev_end = end

    def to_json_dict(self) -> dict:
        """Wire format consumed by playback clients."""
        return {
            "total_ms": self.total_ms,
            "pulses": [
                {
                    "start_ms": p.start_ms,
                    "duration_ms": p.duration_ms,
                    "left": p.left,
                    "right": p.right,
                }
                for p in self.pulses
            ],
        }

    @classmethod
    def from_json_dict(cls, data) -> "PulseTimeline":
        pulses = tuple(
            Pulse(p["start_ms"], p["duration_ms"], p["left"], p["right"])
            for p in data["pulses"]
        )
        return cls(total_ms=data["total_ms"], pulses=pulses)


def motor_strengths(params: SignalParams) -> tuple[float, float]:
    """Split intensity across the two motors: left = I*T, right = I*(1-T)."""
    left = params.intensity * params.balance
    right = params.intensity * (1.0 - params.balance)
    return left, right


def pulse_timing(rhythm_hz: float, grain: float) -> tuple[float, float]:
    """Period and effective pulse duration in ms for a rhythm/grain setting.

    The period is 1000/rhythm. The pulse duration is the duty-cycle length
    grain*period, clamped so the inter-pulse gap stays >= MIN_GAP_MS but the
    pulse never drops below MIN_PULSE_MS:

        d = min(P*G, max(MIN_PULSE_MS, P - MIN_GAP_MS))

    Out-of-range rhythm/grain values are accepted (only rhythm <= 0 is
    rejected) so the clamp branches stay probeable; within the hardware
    ranges the duty-cycle term always wins.
    """
    if rhythm_hz <= 0:
        raise ValueError(f"rhythm must be positive, got {rhythm_hz!r}")
    period = 1000.0 / rhythm_hz
    duration = min(period * grain, max(MIN_PULSE_MS, period - MIN_GAP_MS))
    return period, duration


def render_pulse_train(params: SignalParams, total_ms: float = DEFAULT_TOTAL_MS) -> PulseTimeline:
    """Lay out pulses at 0, P, 2P, ... with the final pulse truncated at total_ms."""
    if total_ms <= 0:
        raise ValueError(f"total_ms={total_ms!r} must be positive")
    period, duration = pulse_timing(params.rhythm, params.grain)
    left, right = motor_strengths(params)
    pulses = []
    start = 0.0
    k = 0
    while start < total_ms:
        pulses.append(
            Pulse(
                start_ms=start,
                duration_ms=min(duration, total_ms - start),
                left=left,
                right=right,
            )
        )
        k += 1
        start = k * period
    return PulseTimeline(total_ms=total_ms, pulses=tuple(pulses))


def normalize(params: SignalParams) -> NormalizedPoint:
    """Affine map from the hardware ranges onto [0,1]^4."""
    coords = []
    for name in PARAM_NAMES:
        lo, hi = PARAM_RANGES[name]
        coords.append((getattr(params, name) - lo) / (hi - lo))
    # Guard against rounding just past the ends of closed ranges.
    coords = [min(max(c, 0.0), 1.0) for c in coords]
    return NormalizedPoint(tuple(coords))


def denormalize(point: NormalizedPoint) -> SignalParams:
    """Inverse of `normalize`; exact up to float rounding."""
    values = {}
    for name, x in zip(PARAM_NAMES, point.coords):
        lo, hi = PARAM_RANGES[name]
        values[name] = lo + x * (hi - lo)
    return SignalParams(**values)
