"""Multi-pole Debye dielectrics advanced with auxiliary polarization
currents.

Each tagged edge carries one current J_p per pole, driven by

    tau_p dJ_p/dt + J_p = delta_eps_p * eps0 * dE/dt

discretized with the trapezoidal rule, which is stable for any tau_p > 0:

    J_p(n+1) = k_p J_p(n) + g_p (E(n+1) - E(n)) / 1
    k_p = (2 tau_p - dt) / (2 tau_p + dt)
    g_p = 2 delta_eps_p eps0 / (2 tau_p + dt)

The polarization currents join the conduction term in the E denominator,
so a medium with no poles reproduces the plain lossy update bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import EPS0
from .errors import ParameterError

MAX_POLES = 4


@dataclass(frozen=True)
class DebyeMedium:
    """Dispersive soil description: high-frequency permittivity, static
    conductivity, and up to four (delta_eps, tau) relaxation pairs."""

    name: str
    eps_inf: float
    sigma0: float
    poles: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.eps_inf < 1.0:
            raise ParameterError(f"{self.name}: eps_inf must be >= 1")
        if self.sigma0 < 0.0:
            raise ParameterError(f"{self.name}: sigma0 must be >= 0")
        if len(self.poles) > MAX_POLES:
            raise ParameterError(f"{self.name}: at most {MAX_POLES} poles supported")
        for de, tau in self.poles:
            if de < 0.0:
                raise ParameterError(f"{self.name}: delta_eps must be >= 0")
            if not tau > 0.0:
                raise ParameterError(f"{self.name}: tau must be positive")


def debye_complex_permittivity(medium: DebyeMedium, freq) -> complex | np.ndarray:
    """Complex relative permittivity including the conduction term:

    eps_inf + sum_p delta_eps_p / (1 + j w tau_p) - j sigma0 / (w eps0)
    """
    freq = np.asarray(freq, dtype=float)
    if np.any(freq <= 0.0):
        raise ParameterError("frequency must be positive")
    w = 2.0 * np.pi * freq
    out = np.full(freq.shape, medium.eps_inf, dtype=complex)
    for de, tau in medium.poles:
        out += de / (1.0 + 1j * w * tau)
    if medium.sigma0 > 0.0:
        out -= 1j * medium.sigma0 / (w * EPS0)
    return out if out.shape else complex(out)


@dataclass(frozen=True)
class AdeCoefficients:
    """Per-pole recursion factors for one medium at a fixed time step.

    ``a_extra`` is the poles' instantaneous contribution to the E update
    denominator (added to eps/dt); ``w`` weights J in the curl equation,
    ``k``/``g`` drive the pole recursion.
    """

    k: np.ndarray
    g: np.ndarray
    w: np.ndarray
    a_extra: float

    @property
    def n_poles(self) -> int:
        return self.k.size


def ade_coefficients(medium: DebyeMedium, dt: float) -> AdeCoefficients:
    if not dt > 0.0:
        raise ParameterError("dt must be positive")
    if medium.poles:
        de = np.array([p[0] for p in medium.poles])
        tau = np.array([p[1] for p in medium.poles])
        k = (2.0 * tau - dt) / (2.0 * tau + dt)
        g = 2.0 * de * EPS0 / (2.0 * tau + dt)
        w = 2.0 * tau / (2.0 * tau + dt)
        a_extra = float(np.sum(de * EPS0 / (2.0 * tau + dt)))
    else:
        k = np.zeros(0)
        g = np.zeros(0)
        w = np.zeros(0)
        a_extra = 0.0
    return AdeCoefficients(k=k, g=g, w=w, a_extra=a_extra)


class AdeState:
    """Polarization currents for every tagged E edge of one lattice.

    For each (medium, component) pair stores the edge index tuple, the
    gathered cb factors, and a (n_poles, n_edges) J array, all zero at
    start.
    """

    def __init__(self):
        self.groups: list[dict] = []

    @classmethod
    def build(cls, materials, dt: float, cb: list[np.ndarray] | None = None):
        """Scan the material map's tags and allocate J storage.

        ``cb`` (interior-shaped E factors) may be attached later via
        :meth:`bind_cb`; the engine passes it once coefficients exist.
        """
        state = cls()
        for mi, medium in enumerate(materials.debye_media):
            coef = ade_coefficients(medium, dt)
            for c in range(3):
                tags = materials.debye[c]
                interior = np.zeros(tags.shape, dtype=bool)
                sl = [slice(1, -1)] * 3
                sl[c] = slice(None)
                interior[tuple(sl)] = True
                idx = np.nonzero((tags == mi) & interior)
                if idx[0].size == 0:
                    continue
                state.groups.append(
                    {
                        "medium": mi,
                        "component": c,
                        "coef": coef,
                        "idx": idx,
                        "cb": None,
                        "j": np.zeros((coef.n_poles, idx[0].size)),
                    }
                )
        return state

    def bind_cb(self, cb: list[np.ndarray]) -> None:
        for g in self.groups:
            c = g["component"]
            idx = g["idx"]
            shifted = []
            for ax in range(3):
                shifted.append(idx[ax] if ax == c else idx[ax] - 1)
            g["cb"] = cb[c][tuple(shifted)]

    def gather_e_prev(self, fields) -> list[np.ndarray]:
        return [fields.e(g["component"])[g["idx"]].copy() for g in self.groups]

    def finish_step(self, fields, e_prev: list[np.ndarray]) -> None:
        """Subtract the J contribution from E and advance every pole."""
        for g, prev in zip(self.groups, e_prev):
            coef: AdeCoefficients = g["coef"]
            if coef.n_poles == 0:
                continue
            e_arr = fields.e(g["component"])
            j = g["j"]
            j_sum = coef.w @ j
            e_arr[g["idx"]] -= g["cb"] * j_sum
            de = e_arr[g["idx"]] - prev
            j *= coef.k[:, None]
            j += coef.g[:, None] * de[None, :]

    def all_finite(self) -> bool:
        return all(np.isfinite(g["j"]).all() for g in self.groups)


def debye_a_extra(materials, dt: float) -> list[np.ndarray]:
    """Interior-shaped pole contributions to the E denominators, one array
    per component (zero where untagged)."""
    out = []
    extras = [ade_coefficients(m, dt).a_extra for m in materials.debye_media]
    for c in range(3):
        sl = [slice(1, -1)] * 3
        sl[c] = slice(None)
        tags = materials.debye[c][tuple(sl)]
        arr = np.zeros(tags.shape)
        for mi, extra in enumerate(extras):
            if extra != 0.0:
                arr[tags == mi] = extra
        out.append(arr)
    return out


def step_debye_e(fields, materials, state: AdeState, dt: float):
    """Standalone dispersive E advance: plain semi-implicit sweep plus the
    polarization-current correction (reduces to the plain sweep when no
    medium has poles)."""
    from . import grid as _grid

    extra = debye_a_extra(materials, dt)
    coef = _grid.build_coefficients(materials, dt, debye_a_extra=extra)
    state.bind_cb(coef.cb)
    e_prev = state.gather_e_prev(fields)
    _grid.sweep_e(fields, coef)
    state.finish_step(fields, e_prev)
    return fields, state
