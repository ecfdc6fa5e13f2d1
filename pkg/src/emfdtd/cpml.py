"""Convolutional PML absorbing layers (complex-frequency-shifted, recursive
convolution form).

Inside a layer of ``npml`` cells the grading runs from the interior
interface (normalized depth d = 0) to the outer wall (d = 1)::

    sigma(d) = sigma_factor * sigma_opt * d**m,  sigma_opt = 0.8(m+1)/(eta0*delta)
    kappa(d) = 1 + (kappa_max - 1) * d**m
    alpha(d) = alpha_max * (1 - d)**alpha_order

and the per-step recursion coefficients are

    b = exp(-(sigma/kappa + alpha) * dt / eps0)
    c = sigma * (b - 1) / (kappa * (sigma + kappa * alpha))      (0 where sigma = 0)

Field derivatives inside the layer are divided by kappa and augmented with
the psi accumulators, which decay by b and absorb c times the raw
derivative each step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import EPS0, ETA0
from .errors import ParameterError
from .grid import X, Y, Z, FieldSet, UpdateCoefficients

ALL_FACES = ("x-", "x+", "y-", "y+", "z-", "z+")

# curl structure: E component -> ((deriv axis, H partner, sign), ...)
_E_TERMS = {
    "ex": ((Y, "hz", +1.0), (Z, "hy", -1.0)),
    "ey": ((Z, "hx", +1.0), (X, "hz", -1.0)),
    "ez": ((X, "hy", +1.0), (Y, "hx", -1.0)),
}
_H_TERMS = {
    "hx": ((Z, "ey", +1.0), (Y, "ez", -1.0)),
    "hy": ((X, "ez", +1.0), (Z, "ex", -1.0)),
    "hz": ((Y, "ex", +1.0), (X, "ey", -1.0)),
}
_E_INDEX = {"ex": X, "ey": Y, "ez": Z}
_H_INDEX = {"hx": X, "hy": Y, "hz": Z}


@dataclass(frozen=True)
class CpmlParams:
    """Layer thickness and grading settings (see module docstring)."""

    depth_m: float
    kappa_max: float = 1.0
    sigma_factor: float = 1.0
    alpha_max: float = 0.0
    poly_order: float = 3.0
    alpha_order: float = 1.0

    def cells(self, delta: float) -> int:
        n = self.depth_m / delta
        if abs(n - round(n)) > 0.01:
            raise ParameterError(
                f"absorbing-layer depth {self.depth_m:g} m is not a whole number of "
                f"{delta:g} m cells"
            )
        n = int(round(n))
        if n < 4:
            raise ParameterError(f"absorbing layer needs at least 4 cells, got {n}")
        return n

    def validate(self) -> None:
        if self.kappa_max < 1.0:
            raise ParameterError("kappa_max must be >= 1")
        if not self.sigma_factor > 0.0:
            raise ParameterError("sigma_factor must be positive")
        if self.alpha_max < 0.0:
            raise ParameterError("alpha_max must be >= 0")
        if self.poly_order < 1.0:
            raise ParameterError("poly_order must be >= 1")


def grade(params: CpmlParams, delta: float, dt: float, d: np.ndarray):
    """Evaluate the graded profiles and recursion coefficients at normalized
    depths ``d`` (0 at the interface, 1 at the wall)."""
    params.validate()
    d = np.asarray(d, dtype=float)
    m = params.poly_order
    sigma_opt = 0.8 * (m + 1.0) / (ETA0 * delta)
    sigma = params.sigma_factor * sigma_opt * d**m
    kappa = 1.0 + (params.kappa_max - 1.0) * d**m
    alpha = params.alpha_max * (1.0 - d) ** params.alpha_order
    b = np.exp(-(sigma / kappa + alpha) * dt / EPS0)
    denom = kappa * (sigma + kappa * alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(denom > 0.0, sigma * (b - 1.0) / denom, 0.0)
    return sigma, kappa, alpha, b, c


@dataclass
class CpmlTables:
    """Graded profile sampled on the layer's two staggers.

    ``node`` arrays run over integer positions 0..npml (d = i/npml measured
    from the interface); ``half`` arrays over positions i+1/2 for
    i = 0..npml-1.  Each row is (sigma, kappa, alpha, b, c).
    """

    npml: int
    node: tuple[np.ndarray, ...]
    half: tuple[np.ndarray, ...]


def cpml_profiles(params: CpmlParams, delta: float, dt: float) -> CpmlTables:
    """Coefficient tables for one absorbing slab of ``params.cells(delta)``
    cells with time step ``dt``."""
    npml = params.cells(delta)
    d_node = np.arange(npml + 1) / npml
    d_half = (np.arange(npml) + 0.5) / npml
    return CpmlTables(
        npml=npml,
        node=grade(params, delta, dt, d_node),
        half=grade(params, delta, dt, d_half),
    )


@dataclass
class _Slab:
    """One psi accumulator block: a field sub-slice plus its recursion."""

    field: str
    target_slice: tuple
    partner: str
    diff_hi: tuple
    diff_lo: tuple
    coef_slice: tuple
    sign: float
    b: np.ndarray
    c: np.ndarray
    psi: np.ndarray


class CpmlState:
    """All psi accumulators, zero-initialized, grouped by update phase."""

    def __init__(self, e_slabs: list[_Slab], h_slabs: list[_Slab]):
        self.e_slabs = e_slabs
        self.h_slabs = h_slabs

    def reset(self) -> None:
        for s in self.e_slabs + self.h_slabs:
            s.psi[...] = 0.0

    @property
    def psi_e(self) -> list[np.ndarray]:
        return [s.psi for s in self.e_slabs]

    @property
    def psi_h(self) -> list[np.ndarray]:
        return [s.psi for s in self.h_slabs]


def _axis_slices(deriv_axis, a_slice, other_rule):
    """3-tuple of slices: ``a_slice`` along ``deriv_axis``, ``other_rule(axis)``
    elsewhere."""
    return tuple(
        a_slice if ax == deriv_axis else other_rule(ax) for ax in (X, Y, Z)
    )


class CpmlRegion:
    """Graded absorbing slabs on the selected faces of one lattice.

    Builds per-axis kappa-scaled inverse steps (for the main sweep) and the
    psi slab list (applied right after each sweep).
    """

    def __init__(
        self,
        params: CpmlParams,
        counts: tuple[int, int, int],
        delta: float,
        dt: float,
        faces: tuple[str, ...] = ALL_FACES,
    ):
        params.validate()
        npml = params.cells(delta)
        for ax, n in enumerate(counts):
            lo_on = ALL_FACES[2 * ax] in faces
            hi_on = ALL_FACES[2 * ax + 1] in faces
            need = npml * ((1 if lo_on else 0) + (1 if hi_on else 0))
            if need >= n:
                raise ParameterError(
                    f"absorbing layers ({npml} cells per face) leave no interior "
                    f"along axis {ax} ({n} cells)"
                )
        self.params = params
        self.counts = counts
        self.delta = delta
        self.dt = dt
        self.faces = tuple(faces)
        self.npml = npml

        self.inv_de = [np.full(counts[a] + 1, 1.0 / delta) for a in (X, Y, Z)]
        self.inv_dh = [np.full(counts[a], 1.0 / delta) for a in (X, Y, Z)]
        for ax in (X, Y, Z):
            n = counts[ax]
            if ALL_FACES[2 * ax] in faces:
                d_node = (npml - np.arange(npml + 1)) / npml
                d_half = (npml - np.arange(npml) - 0.5) / npml
                self.inv_de[ax][: npml + 1] = 1.0 / (
                    grade(params, delta, dt, d_node)[1] * delta
                )
                self.inv_dh[ax][:npml] = 1.0 / (
                    grade(params, delta, dt, d_half)[1] * delta
                )
            if ALL_FACES[2 * ax + 1] in faces:
                d_node = (np.arange(n - npml, n + 1) - (n - npml)) / npml
                d_half = (np.arange(n - npml, n) + 0.5 - (n - npml)) / npml
                self.inv_de[ax][n - npml :] = 1.0 / (
                    grade(params, delta, dt, d_node)[1] * delta
                )
                self.inv_dh[ax][n - npml :] = 1.0 / (
                    grade(params, delta, dt, d_half)[1] * delta
                )

        self.state = CpmlState(self._build_e_slabs(), self._build_h_slabs())

    # -- slab construction -------------------------------------------------

    def _e_extent(self, name: str, ax: int) -> int:
        own = _E_INDEX[name]
        return self.counts[ax] + (0 if ax == own else 1)

    def _h_extent(self, name: str, ax: int) -> int:
        own = _H_INDEX[name]
        return self.counts[ax] + (1 if ax == own else 0)

    def _build_e_slabs(self) -> list[_Slab]:
        slabs = []
        npml = self.npml
        for name, terms in _E_TERMS.items():
            own = _E_INDEX[name]
            for a, partner, sign in terms:
                n_a = self.counts[a]
                for side in ("-", "+"):
                    face = f"{'xyz'[a]}{side}"
                    if face not in self.faces:
                        continue
                    if side == "-":
                        nodes = np.arange(1, npml)
                        d = (npml - nodes) / npml
                        a_sl = slice(1, npml)
                        hi_sl = slice(1, npml)
                        lo_sl = slice(0, npml - 1)
                        coef_a = slice(0, npml - 1)
                    else:
                        nodes = np.arange(n_a - npml + 1, n_a)
                        d = (nodes - (n_a - npml)) / npml
                        a_sl = slice(n_a - npml + 1, n_a)
                        hi_sl = a_sl
                        lo_sl = slice(n_a - npml, n_a - 1)
                        coef_a = slice(n_a - npml, n_a - 1)
                    if nodes.size == 0:
                        continue
                    _, _, _, b, c = grade(self.params, self.delta, self.dt, d)
                    shape = [1, 1, 1]
                    shape[a] = b.size

                    def other(ax, own=own):
                        if ax == own:
                            return slice(0, self._e_extent_own(own))
                        return slice(1, self.counts[ax])

                    target = _axis_slices(a, a_sl, other)
                    diff_hi = _axis_slices(a, hi_sl, other)
                    diff_lo = _axis_slices(a, lo_sl, other)
                    coef = tuple(
                        (coef_a if ax == a else
                         (slice(0, self._e_extent_own(own)) if ax == own
                          else slice(0, self.counts[ax] - 1)))
                        for ax in (X, Y, Z)
                    )
                    psi_shape = tuple(
                        (a_sl.stop - a_sl.start) if ax == a else
                        (self._e_extent_own(own) if ax == own else self.counts[ax] - 1)
                        for ax in (X, Y, Z)
                    )
                    slabs.append(
                        _Slab(
                            field=name,
                            target_slice=target,
                            partner=partner,
                            diff_hi=diff_hi,
                            diff_lo=diff_lo,
                            coef_slice=coef,
                            sign=sign,
                            b=b.reshape(shape),
                            c=c.reshape(shape),
                            psi=np.zeros(psi_shape),
                        )
                    )
        return slabs

    def _e_extent_own(self, own: int) -> int:
        return self.counts[own]

    def _build_h_slabs(self) -> list[_Slab]:
        slabs = []
        npml = self.npml
        for name, terms in _H_TERMS.items():
            own = _H_INDEX[name]
            for a, partner, sign in terms:
                n_a = self.counts[a]
                for side in ("-", "+"):
                    face = f"{'xyz'[a]}{side}"
                    if face not in self.faces:
                        continue
                    if side == "-":
                        half = np.arange(npml)
                        d = (npml - half - 0.5) / npml
                        a_sl = slice(0, npml)
                        hi_sl = slice(1, npml + 1)
                        lo_sl = slice(0, npml)
                    else:
                        half = np.arange(n_a - npml, n_a)
                        d = (half + 0.5 - (n_a - npml)) / npml
                        a_sl = slice(n_a - npml, n_a)
                        hi_sl = slice(n_a - npml + 1, n_a + 1)
                        lo_sl = slice(n_a - npml, n_a)
                    _, _, _, b, c = grade(self.params, self.delta, self.dt, d)
                    shape = [1, 1, 1]
                    shape[a] = b.size

                    def other(ax, name=name):
                        return slice(0, self._h_extent(name, ax))

                    target = _axis_slices(a, a_sl, other)
                    diff_hi = _axis_slices(a, hi_sl, other)
                    diff_lo = _axis_slices(a, lo_sl, other)
                    psi_shape = tuple(
                        (a_sl.stop - a_sl.start) if ax == a else self._h_extent(name, ax)
                        for ax in (X, Y, Z)
                    )
                    slabs.append(
                        _Slab(
                            field=name,
                            target_slice=target,
                            partner=partner,
                            diff_hi=diff_hi,
                            diff_lo=diff_lo,
                            coef_slice=target,
                            sign=sign,
                            b=b.reshape(shape),
                            c=c.reshape(shape),
                            psi=np.zeros(psi_shape),
                        )
                    )
        return slabs

    # -- per-step application ----------------------------------------------

    def apply_e(self, fields: FieldSet, coef: UpdateCoefficients) -> None:
        """Add the psi corrections to E right after the main E sweep."""
        inv_delta = 1.0 / self.delta
        arr = {"ex": fields.ex, "ey": fields.ey, "ez": fields.ez,
               "hx": fields.hx, "hy": fields.hy, "hz": fields.hz}
        cb = {"ex": coef.cb[X], "ey": coef.cb[Y], "ez": coef.cb[Z]}
        for s in self.state.e_slabs:
            h = arr[s.partner]
            d = (h[s.diff_hi] - h[s.diff_lo]) * inv_delta
            s.psi *= s.b
            s.psi += s.c * d
            arr[s.field][s.target_slice] += s.sign * cb[s.field][s.coef_slice] * s.psi

    def apply_h(self, fields: FieldSet, coef: UpdateCoefficients) -> None:
        """Add the psi corrections to H right after the main H sweep."""
        inv_delta = 1.0 / self.delta
        arr = {"ex": fields.ex, "ey": fields.ey, "ez": fields.ez,
               "hx": fields.hx, "hy": fields.hy, "hz": fields.hz}
        ch = {"hx": coef.ch[X], "hy": coef.ch[Y], "hz": coef.ch[Z]}
        for s in self.state.h_slabs:
            e = arr[s.partner]
            d = (e[s.diff_hi] - e[s.diff_lo]) * inv_delta
            s.psi *= s.b
            s.psi += s.c * d
            arr[s.field][s.target_slice] += s.sign * ch[s.field][s.coef_slice] * s.psi
