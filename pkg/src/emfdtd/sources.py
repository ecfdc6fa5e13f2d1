"""Drive waveforms, field sources, and lumped circuit elements.

Waveforms are either sums of Heidler surge terms or sampled records
(linear interpolation, last value held).  Sources occupy a single grid
edge:

* ``current``   injects I(t) as a soft current density; with r_internal
  the edge also carries the Norton conductance.
* ``voltage``   ideal (r = 0) forces E = -V/delta on the edge; non-ideal
  becomes the Norton pair (conductance 1/(r*delta) plus I = V/r).
* ``hard_e`` / ``soft_e`` assign or add an E value (V/m) directly.

Resistors and capacitors reduce to per-edge material terms under the
semi-implicit update: a resistor R adds conductivity 1/(R*delta), a
capacitor C adds permittivity C/delta.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp

import numpy as np

from .errors import ParameterError

SOURCE_KINDS = ("current", "voltage", "hard_e", "soft_e")


@dataclass(frozen=True)
class HeidlerTerm:
    """One surge-current term: i0 * x^n / (1 + x^n) * exp(-t/tau2) / eta
    with x = t/tau1 and the peak-normalizing eta."""

    i0: float
    tau1: float
    tau2: float
    n: float

    def __post_init__(self):
        if not (self.tau1 > 0.0 and self.tau2 > 0.0):
            raise ParameterError("Heidler time constants must be positive")
        if self.n < 1.0:
            raise ParameterError("Heidler exponent n must be >= 1")

    @property
    def eta(self) -> float:
        return exp(-(self.tau1 / self.tau2) * (self.n * self.tau2 / self.tau1) ** (1.0 / self.n))


@dataclass(frozen=True)
class Waveform:
    """Either a sum of Heidler terms or a sampled record."""

    kind: str  # "heidler_sum" | "sampled"
    terms: tuple[HeidlerTerm, ...] = ()
    sample_dt: float = 0.0
    samples: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == "heidler_sum":
            if not self.terms:
                raise ParameterError("heidler waveform needs at least one term")
        elif self.kind == "sampled":
            if not self.samples:
                raise ParameterError("sampled waveform needs at least one sample")
            if not self.sample_dt > 0.0:
                raise ParameterError("sample spacing must be positive")
        else:
            raise ParameterError(f"unknown waveform kind {self.kind!r}")


def heidler_eval(terms, t):
    """Sum of Heidler terms at time(s) t; zero for t <= 0."""
    scalar = np.asarray(t).shape == ()
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros_like(t_arr)
    pos = t_arr > 0.0
    tp = t_arr[pos]
    for term in terms:
        x = (tp / term.tau1) ** term.n
        out[pos] += (term.i0 / term.eta) * x / (1.0 + x) * np.exp(-tp / term.tau2)
    return float(out[0]) if scalar else out


def waveform_sample(w: Waveform, t):
    """Evaluate a waveform at time(s) t (>= 0)."""
    if w.kind == "heidler_sum":
        return heidler_eval(w.terms, t)
    xp = np.arange(len(w.samples)) * w.sample_dt
    return np.interp(t, xp, np.asarray(w.samples, dtype=float))


@dataclass(frozen=True)
class Source:
    """A drive on one grid edge; span gives the two edge endpoints in
    meters (one cell apart along a single axis)."""

    kind: str
    span: tuple[tuple[float, float, float], tuple[float, float, float]]
    r_internal: float
    waveform: Waveform

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ParameterError(f"unknown source kind {self.kind!r}")
        if self.r_internal < 0.0:
            raise ParameterError("internal resistance must be >= 0")


@dataclass(frozen=True)
class LumpedElement:
    """Resistor (ohms) or capacitor (farads) across one grid edge."""

    kind: str  # "resistor" | "capacitor"
    span: tuple[tuple[float, float, float], tuple[float, float, float]]
    value: float

    def __post_init__(self):
        if self.kind not in ("resistor", "capacitor"):
            raise ParameterError(f"unknown lumped element kind {self.kind!r}")
        if not self.value > 0.0:
            raise ParameterError("lumped element value must be positive")


@dataclass
class BoundSource:
    """A source resolved to a concrete edge with cached update factors."""

    kind: str
    component: int
    index: tuple[int, int, int]
    sign: float
    waveform: Waveform
    r_internal: float
    cb_edge: float
    delta: float


def apply_sources(fields, bound: list[BoundSource], t_half: float, t_full: float) -> None:
    """Apply every source for the E step ending at ``t_full``.

    Additive currents are sampled at the half step (they live inside the
    curl equation); assignments at the full step.
    """
    for s in bound:
        e_arr = fields.e(s.component)
        if s.kind == "current":
            i_val = float(waveform_sample(s.waveform, t_half))
            e_arr[s.index] -= s.cb_edge * s.sign * i_val / s.delta**2
        elif s.kind == "voltage":
            v_val = float(waveform_sample(s.waveform, t_half if s.r_internal > 0 else t_full))
            if s.r_internal > 0.0:
                e_arr[s.index] -= s.cb_edge * s.sign * v_val / (s.r_internal * s.delta**2)
            else:
                e_arr[s.index] = -s.sign * v_val / s.delta
        elif s.kind == "hard_e":
            e_arr[s.index] = s.sign * float(waveform_sample(s.waveform, t_full))
        elif s.kind == "soft_e":
            e_arr[s.index] += s.sign * float(waveform_sample(s.waveform, t_full))
