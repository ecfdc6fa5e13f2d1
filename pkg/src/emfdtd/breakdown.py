"""Insulation breakdown evaluation on simulated voltage records.

Two criteria, both polarity-blind (|v| is used throughout):

* Disruptive effect: accumulate DE(t) = sum max(|v| - v0, 0)^k * dt and
  report the first sample where DE >= de_crit (Shindo & Suzuki 1985 style
  equal-area criterion).
* Leader progression: integrate the leader length with the velocity law
  dL/dt = k_v * |v| * (|v| / (gap - L) - e0), clamped at zero, breakdown
  when L reaches the gap (Pigini et al. 1989; constants per the CIGRE
  guide's table, see LEADER_CONSTANTS).

Integration is explicit first order at the record's sampling rate, so a
reported breakdown time always falls on a sample boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

#: (k_v in m^2 V^-2 s^-1, e0 in V/m) per gap configuration and polarity,
#: after the CIGRE leader-progression recommendations.
LEADER_CONSTANTS = {
    "air_positive": (0.8e-6, 600e3),
    "air_negative": (1.0e-6, 670e3),
    "cap_pin_positive": (1.2e-6, 520e3),
    "cap_pin_negative": (1.3e-6, 600e3),
}


@dataclass(frozen=True)
class DisruptiveEffectModel:
    v0: float
    de_crit: float
    k: float = 1.0

    def __post_init__(self):
        if self.v0 < 0.0:
            raise ParameterError("base voltage v0 must be >= 0")
        if self.k < 1.0:
            raise ParameterError("exponent k must be >= 1")
        if not self.de_crit > 0.0:
            raise ParameterError("threshold de_crit must be positive")


@dataclass(frozen=True)
class LeaderProgressionModel:
    gap_length: float
    e0: float = 600e3
    k_v: float = 0.8e-6

    def __post_init__(self):
        if not self.gap_length > 0.0:
            raise ParameterError("gap length must be positive")
        if not self.e0 > 0.0:
            raise ParameterError("inception field e0 must be positive")
        if not self.k_v > 0.0:
            raise ParameterError("velocity constant must be positive")


BreakdownModel = DisruptiveEffectModel | LeaderProgressionModel


def evaluate_breakdown(voltage, dt: float, model: BreakdownModel) -> float | None:
    """First breakdown time for a sampled voltage record, or None.

    The record starts at t = 0 with spacing ``dt``.
    """
    if not dt > 0.0:
        raise ParameterError("dt must be positive")
    v = np.abs(np.asarray(voltage, dtype=float))
    if v.size == 0:
        raise ParameterError("voltage record is empty")
    if isinstance(model, DisruptiveEffectModel):
        over = np.maximum(v - model.v0, 0.0) ** model.k
        de = np.cumsum(over) * dt
        hits = np.nonzero(de >= model.de_crit)[0]
        return float(hits[0] * dt) if hits.size else None
    length = 0.0
    gap = model.gap_length
    for idx in range(v.size):
        if length >= gap:
            return float(idx * dt)
        remaining = gap - length
        vel = model.k_v * v[idx] * (v[idx] / remaining - model.e0)
        if vel > 0.0:
            length += vel * dt
    return None
